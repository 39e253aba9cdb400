import csv
import io
import json
import subprocess
import sys

import pytest

from ellint.cli import (
    REPORT_FIELDS,
    ConfigError,
    format_params,
    main,
    parse_params_text,
    parse_seeds,
)
from ellint.sampling import IdentityKind, from_flat, sample_main, to_flat


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_seeds():
    assert parse_seeds("1..3,7") == (1, 2, 3, 7)
    assert parse_seeds("5") == (5,)
    for bad in ("3..1", "a", "1-4"):
        with pytest.raises(ConfigError):
            parse_seeds(bad)


def test_params_text_round_trip():
    params = sample_main(1, 1, 4)
    flat = to_flat(params)
    back = parse_params_text(format_params(flat))
    assert from_flat(IdentityKind.MainTheorem, back) == params


def test_params_text_diagnostics():
    with pytest.raises(ConfigError, match=r"f:2: field 't'"):
        parse_params_text("p = 0.1\nt = oops\n", "f")
    with pytest.raises(ConfigError, match="given twice"):
        parse_params_text("p = 0.1\np = 0.2\n", "f")
    with pytest.raises(ConfigError, match="f:1: expected"):
        parse_params_text("junk\n", "f")
    assert parse_params_text("# comment\nq = 0.2, -0.1  # trailing\n") == {"q": 0.2 - 0.1j}


def test_verify_json_schema(capsys):
    code, out, _ = run(["verify", "--identity", "main", "--n", "1", "--m", "1", "--seeds", "0..1"], capsys)
    assert code == 0
    recs = json.loads(out)
    assert [r["seed"] for r in recs] == [0, 1]
    for r in recs:
        assert tuple(r) == REPORT_FIELDS
        assert r["identity"] == "main" and (r["n"], r["m"], r["k"]) == (1, 1, 2)
        assert r["passed"] and r["rel_err"] < 1e-9
        assert r["wall_ms"] is None
        assert r["history"]["lhs"][-1][0] >= 64


def test_timing_flag(capsys):
    _, out, _ = run(["verify", "--identity", "lemma-sym", "--n", "2", "--seeds", "0", "--timing"], capsys)
    assert json.loads(out)[0]["wall_ms"] >= 0


def test_params_file(tmp_path, capsys):
    params = sample_main(1, 0, 2)
    path = tmp_path / "p.txt"
    path.write_text(format_params(to_flat(params)))
    code, out, _ = run(["verify", "--identity", "main", "--params-file", str(path)], capsys)
    assert code == 0
    rec = json.loads(out)[0]
    assert rec["seed"] is None and rec["passed"]


def test_malformed_params_file(tmp_path, capsys):
    path = tmp_path / "bad.txt"
    path.write_text("p = 0.08\nq = 0.11\nt = oops\n")
    code, _, err = run(["verify", "--identity", "main", "--params-file", str(path)], capsys)
    assert code == 2
    assert f"{path}:3: field 't'" in err


def test_missing_field(tmp_path, capsys):
    path = tmp_path / "short.txt"
    path.write_text("p = 0.08\n")
    code, _, err = run(["verify", "--identity", "main", "--params-file", str(path)], capsys)
    assert code == 2 and "missing field 'q'" in err


@pytest.mark.parametrize("argv", [
    ["verify", "--identity", "main"],
    ["verify", "--identity", "main", "--seeds", "0", "--tol", "-1"],
    ["verify", "--identity", "nope", "--seeds", "0"],
    ["verify", "--identity", "main", "--seeds", "0", "--n", "9"],
])
def test_config_errors(argv, capsys):
    assert run(argv, capsys)[0] == 2


def test_infeasible_exit(capsys):
    code, out, err = run(["verify", "--identity", "main", "--n", "2", "--m", "0", "--seeds", "0"], capsys)
    assert code == 3
    assert "Infeasible" in err or "infeasible" in err.lower() or "main theorem" in err
    assert json.loads(out)[0]["passed"] is False


def test_no_convergence_exit(capsys):
    code, out, _ = run(["verify", "--identity", "main", "--n", "1", "--m", "1", "--seeds", "0",
                        "--target-rel", "1e-30", "--max-level", "1", "--grid-start", "8"], capsys)
    assert code == 4
    assert [row[0] for row in json.loads(out)[0]["history"]["lhs"]] == [8, 16]


def test_failed_exit(capsys):
    code, _, err = run(["verify", "--identity", "main", "--n", "1", "--m", "1", "--seeds", "0",
                        "--target-rel", "1e-3", "--grid-start", "16", "--tol", "1e-15"], capsys)
    assert code == 1 and "FAILED" in err


def test_csv_format(capsys):
    code, out, _ = run(["verify", "--identity", "classical-euler", "--seeds", "0..2", "--format", "csv"], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 3 and list(rows[0]) == list(REPORT_FIELDS)
    assert json.loads(rows[0]["history"])["lhs"]


def test_output_is_identical_across_thread_counts(tmp_path):
    outs = []
    for threads in ("1", "2", "8"):
        path = tmp_path / f"r{threads}.json"
        subprocess.run(
            [sys.executable, "-m", "ellint", "verify", "--identity", "all", "--seeds", "0..1",
             "--output", str(path)],
            check=True, env={"ELLINT_THREADS": threads, "PATH": ""},
        )
        outs.append(path.read_bytes())
    assert outs[0] == outs[1] == outs[2]
    kinds = [r["identity"] for r in json.loads(outs[0])]
    assert kinds == sorted(kinds)


def test_converge_grid(capsys):
    code, out, _ = run(["converge", "--identity", "dixon", "--n", "1", "--m", "1", "--seeds", "0",
                        "--max-level", "2", "--grid-start", "16"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert [r["size"] for r in doc["rows"]] == [16, 32, 64]
    errs = [r["rel_err"] for r in doc["rows"]]
    assert errs[0] > errs[1] > errs[2]


def test_converge_closed_form_side(capsys):
    code, out, _ = run(["converge", "--identity", "selberg-eval", "--seeds", "0", "--max-level", "1",
                        "--format", "csv"], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows[0]["rhs_rel_change"] == "" and len(rows) == 2


def test_converge_plimit(capsys):
    code, out, _ = run(["converge", "--identity", "bh1", "--n", "1", "--m", "1", "--seeds", "0",
                        "--study", "plimit"], capsys)
    assert code == 0
    gaps = [r["rel_gap"] for r in json.loads(out)["rows"]]
    assert gaps[0] > gaps[1] > gaps[2]


def test_converge_errors(capsys):
    assert run(["converge", "--identity", "lemma-sym", "--seeds", "0"], capsys)[0] == 2
    assert run(["converge", "--identity", "main", "--seeds", "0", "--study", "plimit"], capsys)[0] == 2
    assert run(["converge", "--identity", "main", "--n", "2", "--m", "0", "--seeds", "0"], capsys)[0] == 3
