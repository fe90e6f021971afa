import argparse
import json
import logging
import random
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

from core.engine import betti_csv, fingerprint, groups, replicate_pairs, ring, stanley_reisner
from core.errors import ConsistencyError, ParseError, ValidationError
from core.exactlinalg import CoefficientRing
from core.koszul_oracle import guarded_compare, koszul_ring
from core.metadata import load_complex, load_pair, parse_flavor, parse_ring
from core.pairs import pair_to_json
from core.simplicial import complex_to_json
from core.storage import check_reports, init_db, load_report, report_digest, save_report
from core.trials import oracle_check, random_complex, separate
from utils.atomic_write import write_text_atomic

COMMANDS = ["groups", "ring", "sr", "oracle-check", "fingerprint", "separate", "init", "check", "help"]
CACHED = ("groups", "ring")
DEFAULT_PAIR = "builtin:disk_sphere:2"
SEPARATE_PAIRS = ["builtin:example_2_9:1", "builtin:example_2_9:2"]

EXIT_MISMATCH, EXIT_PARSE, EXIT_VALIDATION, EXIT_CONSISTENCY = 1, 2, 3, 4


@dataclass
class JobSpec:
    command: str
    complex_spec: Optional[str] = None
    pair_specs: List[str] = field(default_factory=list)
    ring: Optional[CoefficientRing] = None
    flavor: object = "auto"
    seed: Optional[int] = None
    out: Optional[Path] = None
    fmt: str = "json"
    m: int = 5
    trials: int = 25
    primes: List[int] = field(default_factory=lambda: [2, 3])
    max_degree: Optional[int] = None
    max_m: int = 4
    use_cache: bool = True


def _primes(text: str) -> List[int]:
    try:
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise ParseError(f"Invalid prime list '{text}' (expected e.g. 2,3).")


def _emit(job: JobSpec, report: dict):
    if job.fmt == "csv":
        source = report.get("fingerprint", report)
        betti = {int(d): n for d, n in source.get("betti", {}).items()}
        torsion = {int(d): tuple(t) for d, t in source.get("torsion", {}).items()}
        text = betti_csv(betti, torsion)
    else:
        text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if job.out is not None:
        write_text_atomic(job.out, text)
        print(f"[{job.command}] wrote {job.out}")
    else:
        sys.stdout.write(text)


def _complex(job: JobSpec):
    if not job.complex_spec:
        raise ParseError(f"{job.command} needs --complex.")
    if job.complex_spec == "random":
        if job.seed is None:
            raise ParseError("--seed is required with --complex random.")
        return random_complex(job.m, random.Random(job.seed))
    return load_complex(job.complex_spec)


def _pairs(job: JobSpec, m: int, default: Optional[str] = DEFAULT_PAIR):
    specs = job.pair_specs or ([default] if default else [])
    if not specs:
        raise ParseError(f"{job.command} needs at least one --pair.")
    return replicate_pairs([load_pair(s, job.ring) for s in specs], m)


def _cache_key(job: JobSpec, K, pairs) -> str:
    return report_digest({
        "command": job.command,
        "complex": complex_to_json(K),
        "pairs": [pair_to_json(p) for p in pairs],
        "ring": pairs[0].ring.label if pairs else None,
        "flavor": getattr(job.flavor, "value", job.flavor),
        "max_degree": job.max_degree,
        "primes": job.primes,
    })


def _compute(job: JobSpec, K, pairs) -> dict:
    if job.command == "groups":
        table = groups(K, pairs)
        print(f"[groups] {len(table.entries)} contributing indices, betti {table.betti()}", file=sys.stderr)
        return table.to_json()
    if job.command == "sr":
        R = stanley_reisner(K, pairs, job.max_degree)
    else:
        R = ring(K, pairs, job.flavor, job.max_degree)
    print(f"[{job.command}] {len(R.basis)} basis elements, {len(R.products)} products", file=sys.stderr)
    fp = fingerprint(R, job.primes)
    if job.command == "fingerprint":
        return fp.to_json()
    return {**R.to_json(), "fingerprint": fp.to_json()}


def _oracle(job: JobSpec) -> int:
    ring_ = job.ring or parse_ring("Z")
    if job.complex_spec in (None, "random"):
        if job.seed is None:
            raise ParseError("oracle-check on random complexes needs --seed.")
        report = oracle_check(job.m, job.trials, job.seed, ring_, job.primes)
        for r in report.results:
            print(f"[oracle-check] trial {r.trial}/{job.trials} {r.status}", file=sys.stderr)
        _emit(job, report.to_json())
        return 0 if report.all_equal else EXIT_MISMATCH
    K = load_complex(job.complex_spec)
    pairs = _pairs(job, K.m)
    result = guarded_compare(ring(K, pairs, job.flavor), koszul_ring(K, pairs[0].ring), pairs, job.primes)
    if not result.comparable:
        print(f"[oracle-check] non-comparable input: {result.differences[0]}", file=sys.stderr)
    print(f"[oracle-check] {'equal' if result.equal else 'mismatch'}", file=sys.stderr)
    _emit(job, result.to_json())
    return 0 if result.equal else EXIT_MISMATCH


def _separate(job: JobSpec) -> int:
    specs = job.pair_specs or SEPARATE_PAIRS
    if len(specs) != 2:
        raise ParseError("separate needs exactly two --pair specs.")
    pair_a, pair_b = (load_pair(s, job.ring) for s in specs)
    ring_ = job.ring or pair_a.ring
    complexes = None
    if job.complex_spec == "random":
        if job.seed is None:
            raise ParseError("separate with --complex random needs --seed.")
        rng = random.Random(job.seed)
        complexes = [random_complex(rng.randint(1, job.max_m), rng) for _ in range(job.trials)]
    elif job.complex_spec:
        complexes = [load_complex(job.complex_spec)]
    report = separate(pair_a, pair_b, job.max_m, ring_, job.primes, complexes=complexes)
    print(f"[separate] {report.candidates} candidates, {'separated' if report.separated else 'no separating complex'}",
          file=sys.stderr)
    _emit(job, report.to_json())
    return 0


def run(job: JobSpec) -> int:
    if job.command == "init":
        init_db()
        print("Initialized report store.")
        return 0
    if job.command == "check":
        check_reports()
        return 0
    if job.command == "oracle-check":
        return _oracle(job)
    if job.command == "separate":
        return _separate(job)

    K = _complex(job)
    pairs = _pairs(job, K.m)
    digest = None
    if job.command in CACHED and job.use_cache:
        digest = _cache_key(job, K, pairs)
        cached = load_report(digest)
        if cached is not None:
            print(f"[{job.command}] cached report {digest[:12]}", file=sys.stderr)
            _emit(job, cached)
            return 0
    report = _compute(job, K, pairs)
    if digest is not None:
        save_report(job.command, digest, report)
    _emit(job, report)
    return 0


def print_help():
    print("Usage: python main.py <command> [options]")
    print("  groups        - additive cohomology, index by index")
    print("  ring          - full cohomology ring as a presentation")
    print("  sr            - Stanley-Reisner form (every i* onto)")
    print("  fingerprint   - Betti, torsion and multiplication ranks")
    print("  oracle-check  - engine against the Koszul model of Z(K; D^2, S^1)")
    print("  separate      - search complexes separating two pairs' rings")
    print("  init          - initialize the report store")
    print("  check         - list cached reports")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polyprod")
    parser.add_argument("command", nargs="?", default="help", choices=COMMANDS)
    parser.add_argument("--complex", dest="complex_spec", default=None,
                        help="JSON path, builtin:<name>[:m], random:m:seed or 'random'")
    parser.add_argument("--pair", dest="pairs", action="append", default=[],
                        help="JSON path or builtin:<name>:<params>; repeat once per vertex, or give one")
    parser.add_argument("--ring", default=None, help="Z, Q or Fp:p (default: the pairs' ring, Z)")
    parser.add_argument("--flavor", default="auto")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--out", type=Path, default=None)
    parser.add_argument("--format", dest="fmt", choices=["json", "csv"], default="json")
    parser.add_argument("--m", type=int, default=5, help="Vertex count for random complexes")
    parser.add_argument("--trials", type=int, default=25)
    parser.add_argument("--primes", default="2,3")
    parser.add_argument("--max-degree", type=int, default=None)
    parser.add_argument("--max-m", type=int, default=4)
    parser.add_argument("--no-cache", action="store_true")
    parser.add_argument("--verbose", action="store_true")
    return parser


def job_from_args(args) -> JobSpec:
    return JobSpec(
        command=args.command,
        complex_spec=args.complex_spec,
        pair_specs=list(args.pairs),
        ring=parse_ring(args.ring) if args.ring else None,
        flavor=parse_flavor(args.flavor),
        seed=args.seed,
        out=args.out,
        fmt=args.fmt,
        m=args.m,
        trials=args.trials,
        primes=_primes(args.primes),
        max_degree=args.max_degree,
        max_m=args.max_m,
        use_cache=not args.no_cache,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    if args.command == "help":
        print_help()
        return 0
    try:
        return run(job_from_args(args))
    except ParseError as e:
        print(f"[{args.command}] parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except ValidationError as e:
        print(f"[{args.command}] invalid input: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except ConsistencyError as e:
        print(f"[{args.command}] internal consistency failure: {e}", file=sys.stderr)
        return EXIT_CONSISTENCY


if __name__ == "__main__":
    sys.exit(main())
