import json
import math
import os
import subprocess
import sys

import pytest

from toriclg.cli import main
from toriclg.scenario import Scenario, compile_expr

SCN = os.path.join(os.path.dirname(__file__), "..", "scenarios")


def scn(name):
    return os.path.join(SCN, name)


def read(outdir, fname):
    with open(os.path.join(outdir, fname)) as fh:
        return json.load(fh)


def test_expression_parser():
    f = compile_expr("lam^(2/3)+lam^(2/5)", "lam")
    lam = 12.5
    assert abs(f(lam) - (lam ** (2 / 3) + lam ** (2 / 5))) < 1e-14
    g = compile_expr("1/lam", "lam")
    assert abs(g(4.0) - 0.25) < 1e-15
    h = compile_expr("-2*lam + 3", "lam")
    assert abs(h(1.0) - 1.0) < 1e-15
    with pytest.raises(Exception):
        compile_expr("lam + bad", "lam")


def test_scenario_schema_errors(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"name": "x", "lattice": {"rank": 2}, "S": []}))
    with pytest.raises(Exception):
        Scenario.load(str(p))


def test_cmd_fans_a1(tmp_path):
    rc = main(["fans", "--scenario", scn("a1.json"), "--out", str(tmp_path)])
    assert rc == 0
    rep = read(tmp_path, "fans.json")
    assert rep["count"] == 2
    dims = sorted(f["dim_orbifold_cohomology"] for f in rep["fans"])
    assert dims == [2, 2]


def test_cmd_fans_cyclic5(tmp_path):
    rc = main(["fans", "--scenario", scn("cyclic-d5.json"), "--out",
               str(tmp_path)])
    assert rc == 0
    rep = read(tmp_path, "fans.json")
    assert rep["count"] == 2


def test_cmd_wallcross_blowup(tmp_path):
    rc = main(["wallcross", "--scenario", scn("blowup-c2.json"), "--out",
               str(tmp_path)])
    assert rc == 0
    rep = read(tmp_path, "wallcross.json")
    assert rep["kind"] == "contract_divisor"
    assert rep["J"] == 1 and rep["K"] == 1 and rep["discrepancy"] == 1


def test_cmd_wallcross_a1_crepant(tmp_path):
    rc = main(["wallcross", "--scenario", scn("a1.json"), "--out",
               str(tmp_path)])
    assert rc == 0
    rep = read(tmp_path, "wallcross.json")
    assert rep["kind"] == "crepant" and rep["discrepancy"] == 0


def test_cmd_critical_p2(tmp_path):
    rc = main(["critical", "--scenario", scn("p2.json"), "--out",
               str(tmp_path), "--seed", "5"])
    assert rc == 0
    rep = read(tmp_path, "critical.json")
    assert rep["count"] == 3 and rep["expected"] == 3
    assert rep["newton_nondegenerate"] is True
    assert abs(rep["conifold"]["value"][0] - 3.0) < 1e-9


def test_cmd_track_determinism(tmp_path):
    out1 = tmp_path / "r1"
    out2 = tmp_path / "r2"
    for out in (out1, out2):
        rc = main(["track", "--scenario", scn("blowup-c2.json"), "--out",
                   str(out), "--seed", "7"])
        assert rc == 0
    b1 = (out1 / "trajectory.csv").read_bytes()
    b2 = (out2 / "trajectory.csv").read_bytes()
    assert b1 == b2
    e1 = (out1 / "events.json").read_bytes()
    e2 = (out2 / "events.json").read_bytes()
    assert e1 == e2


def test_cmd_gkz_p2(tmp_path):
    rc = main(["gkz", "--scenario", scn("p2.json"), "--out", str(tmp_path)])
    assert rc == 0
    rep = read(tmp_path, "gkz.json")
    assert rep["char_variety_trivial_at_limit"] is True
    assert rep["rank"]["expected"] == 3
    assert all(o["annihilates"] for o in rep["operators"])


def test_cmd_orlov_bl_line(tmp_path):
    rc = main(["orlov", "--scenario", scn("bl-line-p4.json"), "--out",
               str(tmp_path)])
    assert rc == 0
    rep = read(tmp_path, "orlov.json")
    assert rep["J"] == 2 and rep["h"] == 1
    assert rep["blocks"] == [2, 5, 2]
    assert rep["semiorthogonal_and_unimodular"] is True


def test_cli_error_carries_module_error_name(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({
        "name": "bad", "lattice": {"rank": 2},
        "S": [[1, 0], [0, 1]],
        "fans": {"f": [[0], [1]]},
    }))
    rc = main(["fans", "--scenario", str(bad), "--out", str(tmp_path)])
    # enumeration works for a basis; force a module error via wallcross
    rc = main(["wallcross", "--scenario", str(bad), "--out", str(tmp_path)])
    captured = capsys.readouterr()
    assert rc == 2
    assert "NotAdjacent" in captured.err


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "toriclg.cli", "fans",
                          "--scenario", scn("a1.json"), "--out",
                          "/tmp/toriclg-cli-smoke"],
                         capture_output=True, text=True)
    assert out.returncode == 0
