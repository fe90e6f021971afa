import json
import random
import re
from pathlib import Path

from core.errors import ParseError
from core.exactlinalg import CoefficientRing
from core.kalgebra import ProductFlavor
from core.pairs import PairData, builtin, pair_from_json
from core.simplicial import (
    SimplicialComplex,
    complex_from_json,
    empty,
    points,
    polygon,
    rp2,
    simplex,
    simplex_boundary,
    void,
)

RING_RE = re.compile(r"^(Z|Q|Fp:(\d+)|F(\d+))$")
BUILTIN_RE = re.compile(r"^builtin:([a-z_0-9]+)((?::-?\d+)*)$")
RANDOM_RE = re.compile(r"^random:(\d+):(\d+)$")


def parse_ring(text: str) -> CoefficientRing:
    """
    Accepts:
    - Z, Q
    - Fp:p (e.g. Fp:2), or the short form F2
    """
    match = RING_RE.match(str(text).strip())
    if not match:
        raise ParseError(f"Invalid coefficient ring '{text}' (use Z, Q or Fp:p).")
    if match.group(1) in ("Z", "Q"):
        return CoefficientRing(match.group(1))
    return CoefficientRing("Fp", int(match.group(2) or match.group(3)))


def parse_flavor(text: str):
    """A ProductFlavor, or the string "auto"."""
    value = str(text).strip().lower().replace("-", "_")
    if value == "auto":
        return "auto"
    try:
        return ProductFlavor(value)
    except ValueError:
        raise ParseError(f"Invalid flavor '{text}'. Choose auto or one of {[f.value for f in ProductFlavor]}.")


def parse_builtin(spec: str):
    """'builtin:name:1:2' -> ('name', [1, 2])"""
    match = BUILTIN_RE.match(spec.strip())
    if not match:
        raise ParseError(f"Invalid built-in spec '{spec}' (expected builtin:name[:int...]).")
    name, rest = match.groups()
    params = [int(p) for p in rest.split(":") if p]
    return name, params


def _read_json(path: str) -> dict:
    p = Path(path)
    if not p.exists():
        raise ParseError(f"File not found: {path}")
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as e:
        raise ParseError(f"{path} is not valid JSON: {e}")


def random_facets(m: int, rng: random.Random, density: float = 0.5):
    """Random facet list on [m]; vertices left out of every facet become ghosts."""
    facets = []
    for _ in range(rng.randint(1, m + 1)):
        facets.append(tuple(v for v in range(1, m + 1) if rng.random() < density))
    return tuple(facets)


COMPLEX_BUILTINS = {
    "polygon": polygon,
    "simplex": simplex,
    "boundary": simplex_boundary,
    "points": points,
    "empty": empty,
    "void": void,
}


def load_complex(spec: str) -> SimplicialComplex:
    """A JSON path, 'builtin:<name>[:m]' or 'random:m:seed'."""
    spec = spec.strip()
    match = RANDOM_RE.match(spec)
    if match:
        m, seed = int(match.group(1)), int(match.group(2))
        return SimplicialComplex(m, random_facets(m, random.Random(seed)))
    if spec.startswith("builtin:"):
        name, params = parse_builtin(spec)
        if name == "rp2" and not params:
            return rp2()
        if name not in COMPLEX_BUILTINS or len(params) != 1:
            raise ParseError(f"Unknown built-in complex '{spec}'. Known: rp2, {sorted(COMPLEX_BUILTINS)} (with :m).")
        return COMPLEX_BUILTINS[name](params[0])
    return complex_from_json(_read_json(spec))


def load_pair(spec: str, ring: CoefficientRing = None) -> PairData:
    """A JSON path or 'builtin:<name>:<params>'; ``ring`` overrides the file's ring."""
    spec = spec.strip()
    if spec.startswith("builtin:"):
        name, params = parse_builtin(spec)
        pair = builtin(name, params)
        return pair.with_ring(ring) if ring is not None else pair
    data = _read_json(spec)
    file_ring = parse_ring(data.get("ring", "Z")) if isinstance(data, dict) else None
    return pair_from_json(data, name=Path(spec).stem, ring=ring or file_ring)
