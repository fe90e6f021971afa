import json

import pytest

import core.storage as storage
from main import main


@pytest.fixture(autouse=True)
def store(tmp_path, monkeypatch):
    monkeypatch.setattr(storage, "DATA_DIR", tmp_path)
    monkeypatch.setattr(storage, "DB_PATH", tmp_path / "reports.db")
    monkeypatch.setattr(storage, "REPORTS_PATH", tmp_path / "reports")


def test_groups_of_the_square(capsys):
    assert main(["groups", "--complex", "builtin:polygon:4"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["betti"] == {"0": 1, "3": 2, "6": 1}


def test_second_run_is_served_from_the_cache(capsys):
    args = ["ring", "--complex", "builtin:polygon:4", "--pair", "builtin:disk_sphere:2"]
    assert main(args) == 0
    first = capsys.readouterr()
    assert "cached report" not in first.err
    assert main(args) == 0
    second = capsys.readouterr()
    assert "cached report" in second.err
    assert json.loads(second.out) == json.loads(first.out)


def test_no_cache_recomputes(capsys):
    args = ["groups", "--complex", "builtin:points:2", "--no-cache"]
    main(args)
    main(args)
    assert "cached report" not in capsys.readouterr().err
    assert storage.list_reports() == []


def test_csv_output(capsys):
    assert main(["groups", "--complex", "builtin:points:2", "--format", "csv"]) == 0
    assert capsys.readouterr().out == "degree,betti,torsion\n0,1,\n3,1,\n"


def test_out_file(tmp_path, capsys):
    target = tmp_path / "ring.json"
    assert main(["fingerprint", "--complex", "builtin:polygon:5", "--out", str(target)]) == 0
    assert "[fingerprint] wrote" in capsys.readouterr().out
    assert json.loads(target.read_text())["betti"] == {"0": 1, "3": 5, "4": 5, "7": 1}


def test_stanley_reisner_command(capsys):
    assert main(["sr", "--complex", "builtin:polygon:4", "--pair", "builtin:cp_truncated:2"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["relations"] == [[1, 3], [2, 4]]


@pytest.mark.parametrize(
    "argv, code",
    [
        (["ring", "--complex", "builtin:polygon:4", "--ring", "R"], 2),
        (["ring", "--complex", "builtin:torus:4"], 2),
        (["ring"], 2),
        (["sr", "--complex", "builtin:polygon:4"], 3),
        (["ring", "--complex", "builtin:polygon:4", "--pair", "builtin:cp_truncated:2", "--flavor", "special"], 3),
        (["oracle-check"], 2),
        (["groups", "--complex", "random"], 2),
    ],
)
def test_exit_codes(argv, code):
    assert main(argv) == code


def test_oracle_check_on_a_fixed_complex(capsys):
    assert main(["oracle-check", "--complex", "builtin:polygon:5"]) == 0
    assert json.loads(capsys.readouterr().out)["equal"] is True


def test_oracle_check_reports_non_comparable_pairs(capsys):
    code = main(["oracle-check", "--complex", "builtin:points:2", "--pair", "builtin:disk_sphere:3"])
    assert code == 1
    assert "non-comparable" in capsys.readouterr().err


def test_random_oracle_check(capsys):
    assert main(["oracle-check", "--seed", "5", "--m", "3", "--trials", "3"]) == 0
    assert json.loads(capsys.readouterr().out)["all_equal"] is True


def test_help_and_store_commands(capsys):
    assert main(["help"]) == 0
    assert "oracle-check" in capsys.readouterr().out
    assert main(["init"]) == 0
    assert main(["check"]) == 0
    assert "No cached reports." in capsys.readouterr().out


def test_corrupted_cache_entry_is_recomputed(capsys):
    args = ["groups", "--complex", "builtin:polygon:4"]
    assert main(args) == 0
    first = json.loads(capsys.readouterr().out)
    (row,) = storage.list_reports()
    with open(row["path"], "w", encoding="utf-8") as f:
        f.write("{truncated")
    assert main(args) == 0
    second = capsys.readouterr()
    assert "cached report" not in second.err
    assert json.loads(second.out) == first
