import json
import os
import subprocess
import sys

import pytest


def run(*args, check_rc=0, env=None):
    full = dict(os.environ, **(env or {}))
    p = subprocess.run([sys.executable, "-m", "nlgw", *args], capture_output=True, text=True, env=full)
    assert p.returncode == check_rc, p.stderr
    return p


def test_nl_dv_json():
    out = json.loads(run("nl-dv", "--terms", "16").stdout)
    assert out["p"] == 11 and out["constraint_solve_agrees"]
    nl = dict((D, v) for D, v in out["nl"])
    assert nl[15] == "11440" and nl[16] == "21450"
    assert all(v == "0" for v in out["gap"].values())


def test_nl_dv_single_term():
    assert run("nl-dv", "--terms", "1", "--format", "csv").stdout == "D,NL\n0,-10\n"


def test_nl_cubic_csv():
    lines = run("nl-cubic", "--format", "csv").stdout.splitlines()
    assert lines[0] == "D,NL"
    assert "7,917568" in lines and "4,3402" in lines


def test_hls_table():
    rows = {r["e"]: r for r in json.loads(run("hls").stdout)["rows"]}
    assert rows[15]["status"] == "not-HLS" and rows[15]["C"] == "11440"
    assert all(rows[e]["status"] == "HLS" for e in (1, 4, 9))


def test_hls_gap_divisors():
    rows = {r["e"]: r for r in json.loads(run("hls").stdout)["rows"]}
    assert rows[3]["gap_zero"] and rows[5]["gap_zero"]
    assert rows[3]["status"] == rows[5]["status"] == "absent"
    ext = {r["e"]: r for r in json.loads(run("hls", "--extended").stdout)["rows"]}
    assert ext[3]["status"] == ext[5]["status"] == "HLS"


def test_hls_bad_e():
    p = run("hls", "--e", "7", check_rc=1)
    assert "not a nonzero square" in p.stderr


def test_usage_error():
    run("check-gwnl", "--family", "fano-pencil", "--dmax", "0", check_rc=1)
    run("check-gwnl", "--family", "k3", check_rc=1)


def test_check_gwnl_fano():
    p = run("check-gwnl", "--family", "fano-pencil", "--dmax", "8", "--mode", "hybrid", "--quiet")
    out = json.loads(p.stdout)
    assert out["full_match"] and out["matched"] == 8
    assert p.stderr == ""


def test_check_gwnl_progress_on_stderr():
    p = run("check-gwnl", "--family", "fano-pencil", "--dmax", "2")
    for line in p.stderr.splitlines():
        json.loads(line)
    assert json.loads(p.stdout)["full_match"]


def test_chern():
    out = json.loads(run("chern", "--family", "dv-pencil").stdout)
    assert out["euler"] == -14712 and out["grr"] == "-30" and out["singular_fibers"] == "640"


def test_mirror_dump():
    out = json.loads(run("mirror", "--family", "fano-pencil", "--degree", "2").stdout)
    assert out["H3"]["2"] == "122472"


def test_bps_self_test():
    assert json.loads(run("bps", "--self-test").stdout)["self_test"] == "pass"


def test_bps_csv_round_trip(tmp_path):
    f = tmp_path / "gv.csv"
    f.write_text("g,m,value\n0,1,2\n0,2,1/3\n1,1,-1\n1,2,5\n")
    gw = run("bps", "--input", str(f), "--direction", "gv-to-gw", "--gmax", "1", "--mmax", "2",
             "--format", "csv").stdout
    g = tmp_path / "gw.csv"
    g.write_text(gw)
    back = run("bps", "--input", str(g), "--direction", "gw-to-gv", "--gmax", "1", "--mmax", "2",
               "--format", "csv").stdout
    assert back == f.read_text()


def test_hecke():
    out = json.loads(run("hecke", "--m", "2", "--ell", "3", "--coeff", "1,1,5").stdout)
    assert out["coeffs"] == [[2, 2, "20"]]


def test_config_defaults(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"hecke": {"m": 2, "ell": 3}}))
    out = json.loads(run("--config", str(cfg), "hecke", "--coeff", "1,1,5").stdout)
    assert out["m"] == 2


def test_deterministic():
    a = run("nl-cubic").stdout
    b = run("nl-cubic").stdout
    assert a == b


def test_config_flags_win(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"hecke": {"m": 2, "ell": 3}}))
    out = json.loads(run("--config", str(cfg), "hecke", "--m", "1", "--coeff", "1,1,5").stdout)
    assert out["m"] == 1 and out["coeffs"] == [[1, 1, "5"]]


def test_check_gwnl_dv():
    out = json.loads(run("check-gwnl", "--family", "dv-pencil", "--dmax", "5", "--quiet").stdout)
    assert out["full_match"] and out["matched"] == 5
    assert [r["lhs"] for r in out["rows"]] == ["0", "130680", "0", "3020160", "0"]


def test_worker_env():
    one = run("mirror", "--family", "fano-pencil", "--degree", "3").stdout
    two = run("mirror", "--family", "fano-pencil", "--degree", "3", env={"NLGW_WORKERS": "2"}).stdout
    assert one == two
    run("mirror", "--family", "fano-pencil", "--degree", "1", env={"NLGW_WORKERS": "0"}, check_rc=1)


def test_unverified_exits_one():
    p = run("check-gwnl", "--family", "fano-pencil", "--dmax", "6", "--quiet", check_rc=1)
    assert "conjectural" in p.stderr
    rows = json.loads(p.stdout)["rows"]
    assert rows[5]["status"] == "unverified"
