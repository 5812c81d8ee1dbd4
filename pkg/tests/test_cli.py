import json
import math
from pathlib import Path

import numpy as np
import pytest

from dirtytape import cli

GOLDEN = Path(__file__).parent / "golden"

FIGURE_COMMANDS = {
    "single_user": ["single-user", "--p", "0.5,1,10,100,1e4", "--grid", "41"],
    "mac_dtc": ["mac-dtc", "--ps", "50", "--grid", "41", "--r1-points", "51"],
    "jdpt": ["jdpt", "--ps", "50", "--grid", "41", "--alpha-points", "61", "--r1-points", "51"],
}


def run(argv, tmp_path, name="out.txt"):
    out = tmp_path / name
    code = cli.main(argv + ["--out", str(out)])
    return code, out


def split_csv(text):
    meta = [ln for ln in text.splitlines() if ln.startswith("#")]
    body = [ln.split(",") for ln in text.splitlines() if ln and not ln.startswith("#")]
    return meta, body[0], body[1:]


def assert_same_table(got, want, rtol=1e-9, atol=1e-12):
    gm, gc, gr = split_csv(got)
    wm, wc, wr = split_csv(want)
    assert gm == wm and gc == wc and len(gr) == len(wr)
    for a, b in zip(gr, wr):
        for x, y in zip(a, b):
            try:
                fx, fy = float(x), float(y)
            except ValueError:
                assert x == y
                continue
            assert math.isclose(fx, fy, rel_tol=rtol, abs_tol=atol), (a, b)


@pytest.mark.parametrize("name", sorted(FIGURE_COMMANDS))
def test_golden(name, tmp_path):
    code, out = run(FIGURE_COMMANDS[name], tmp_path)
    assert code == 0
    assert_same_table(out.read_text(), (GOLDEN / f"{name}.csv").read_text())


@pytest.mark.parametrize("name", sorted(FIGURE_COMMANDS))
def test_byte_identical_reruns(name, tmp_path):
    _, a = run(FIGURE_COMMANDS[name], tmp_path, "a.csv")
    _, b = run(FIGURE_COMMANDS[name], tmp_path, "b.csv")
    assert a.read_bytes() == b.read_bytes()


def test_nats_scale_by_ln2(tmp_path):
    argv = ["single-user", "--p", "1,100", "--grid", "21"]
    _, b = run(argv, tmp_path, "b.csv")
    _, n = run(argv + ["--units", "nats"], tmp_path, "n.csv")
    _, _, rb = split_csv(b.read_text())
    _, _, rn = split_csv(n.read_text())
    for x, y in zip(rb, rn):
        assert x[:2] == y[:2]
        np.testing.assert_allclose(np.array(y[2:], float), np.array(x[2:], float) * math.log(2), rtol=1e-10)


def test_region_columns(tmp_path):
    code, out = run(["mac-dtc", "--ps", "10", "--grid", "11", "--r1-points", "11"], tmp_path)
    assert code == 0
    _, cols, rows = split_csv(out.read_text())
    assert cols == ["curve", "r1", "r2"]
    assert {r[0] for r in rows} == {"inner", "outer"}


def test_json_schema(tmp_path):
    code, out = run(["single-user", "--p", "2", "--grid", "21", "--format", "json"], tmp_path)
    assert code == 0
    doc = json.loads(out.read_text())
    assert set(doc) == {"meta", "rows"}
    assert doc["meta"]["command"] == "single-user"
    assert set(doc["rows"][0]) == {"p", "snr_db", "c1", "c2", "c3", "c4", "upper"}
    assert doc["rows"][0]["p"] == 2.0


def test_config_then_flags(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"p": [3.0], "grid": 21, "ps": 10.0, "units": "nats"}))
    _, a = run(["single-user", "--config", str(cfg)], tmp_path, "a.csv")
    meta, _, rows = split_csv(a.read_text())
    assert "# ps: 10.0" in meta and "# units: nats" in meta
    _, b = run(["single-user", "--config", str(cfg), "--ps", "20"], tmp_path, "b.csv")
    meta_b, _, rows_b = split_csv(b.read_text())
    assert "# ps: 20.0" in meta_b and rows != rows_b


def test_usage_errors(tmp_path, capsys):
    assert cli.main(["mac-dtc"]) == cli.EXIT_USAGE
    assert "--ps" in capsys.readouterr().err
    with pytest.raises(SystemExit) as exc:
        cli.main(["single-user", "--bogus"])
    assert exc.value.code == cli.EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        cli.main([])
    assert exc.value.code == cli.EXIT_USAGE
    assert cli.main(["single-user", "--p", "-1"]) == cli.EXIT_USAGE
    assert cli.main(["jdpt", "--ps", "1", "--alpha-bracket=2:1"]) == cli.EXIT_USAGE
    assert cli.main(["jdpt", "--ps", "1", "--alpha-bracket=oops"]) == cli.EXIT_USAGE


def test_bad_config(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    assert cli.main(["single-user", "--config", str(bad)]) == cli.EXIT_USAGE
    unknown = tmp_path / "unknown.json"
    unknown.write_text(json.dumps({"colour": 1}))
    assert cli.main(["single-user", "--config", str(unknown)]) == cli.EXIT_USAGE
    assert cli.main(["single-user", "--config", str(tmp_path / "missing.json")]) == cli.EXIT_USAGE


def test_io_error(tmp_path):
    target = tmp_path / "no" / "such" / "dir" / "x.csv"
    assert cli.main(["single-user", "--p", "1", "--grid", "11", "--out", str(target)]) == cli.EXIT_IO


def test_stdout(capsys):
    assert cli.main(["single-user", "--p", "1", "--grid", "11"]) == 0
    assert capsys.readouterr().out.startswith("# generator: dirtytape")


def test_verify_small(tmp_path, monkeypatch):
    from dirtytape import suites

    # the heavy quadrature and sampling suites have their own tests
    stub = suites.SuiteResult("non_gaussian_inputs", True, 0.0)
    monkeypatch.setattr(suites, "suite_non_gaussian_inputs", lambda: stub)
    argv = ["verify", "--draws", "50", "--trials", "200", "--mc-samples", "5000", "--seed", "7"]
    code, a = run(argv, tmp_path, "a.csv")
    _, b = run(argv, tmp_path, "b.csv")
    assert code == 0
    assert a.read_bytes() == b.read_bytes()
    _, cols, rows = split_csv(a.read_text())
    assert cols[:2] == ["check", "status"] and all(r[1] == "pass" for r in rows)


def test_verify_failure_exit(tmp_path, monkeypatch):
    from dirtytape import suites

    monkeypatch.setattr(suites, "run_all", lambda **kw: [suites.SuiteResult("x", False, 1.0)])
    code, out = run(["verify"], tmp_path)
    assert code == cli.EXIT_VERIFY
    assert ",FAIL," in out.read_text()


def test_fmt():
    assert cli.fmt(1 / 3) == "0.333333333333"
    assert cli.fmt(float("nan")) == "nan" and cli.fmt(-math.inf) == "-inf"
    assert cli.fmt("x") == "x"
