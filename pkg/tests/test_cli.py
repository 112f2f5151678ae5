import json
import subprocess
import sys
from fractions import Fraction

from pmgames.cli import main


def run(capsys, *argv):
    status = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return status, json.loads(out)


def write(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return path


def test_solve_fig1(capsys, fixture_path):
    status, body = run(capsys, "solve", fixture_path("fig1.json"))
    assert status == 0 and body["value"] == "7"
    assert len(body["matching"]) == 3
    assert sum(Fraction(v) for v in body["u"].values()) == 7


def test_solve_bgame(capsys, fixture_path):
    status, body = run(capsys, "solve", fixture_path("fig3_bgame.json"))
    assert status == 0 and body["value"] == "10"


def test_core_check(capsys, fixture_path, tmp_path):
    status, body = run(capsys, "core", "check", fixture_path("fig1.json"), "--alloc", fixture_path("fig1_alloc.json"))
    assert status == 0 and body == {"in_core": True}
    bad = write(tmp_path, "bad.json", {"values": {"1": "7", "2": "0", "3": "0", "4": "0", "5": "0", "6": "0"}})
    status, body = run(capsys, "core", "check", fixture_path("fig1.json"), "--alloc", bad)
    assert status == 1 and body["in_core"] is False
    blocking = body["blocking"]
    assert Fraction(blocking["value"]) > Fraction(blocking["allocated"])


def test_core_find_and_cert(capsys, fixture_path, tmp_path):
    status, body = run(capsys, "core", "find", fixture_path("triangle.json"))
    assert status == 1 and body == {"core": "empty"}
    status, body = run(capsys, "core", "find", fixture_path("fig5.json"))
    assert status == 0 and body["allocation"] == {"1": "2", "2": "3", "3": "2"}
    status, body = run(capsys, "core", "cert", fixture_path("triangle.json"))
    assert status == 0 and body["certifies_empty"] is True
    lam = write(tmp_path, "lam.json", {"lambda": [
        {"players": ["1", "2"], "weight": "1/2"},
        {"players": ["2", "3"], "weight": "1/2"},
        {"players": ["1", "3"], "weight": "1/2"},
    ]})
    status, body = run(capsys, "core", "cert", fixture_path("triangle.json"), "--lambda", lam)
    assert status == 0 and body["weighted_value"] == "3/2" and body["grand_value"] == "1"
    unbalanced = write(tmp_path, "u.json", {"lambda": [{"players": ["1", "2"], "weight": "1"}]})
    status, body = run(capsys, "core", "cert", fixture_path("triangle.json"), "--lambda", unbalanced)
    assert status == 2 and body["error"] == "UnbalancedCertificate"


def test_lexmin_example2(capsys, fixture_path, tmp_path):
    target = write(tmp_path, "x.json", {"values": {"1": "3", "2": "1"}})
    status, body = run(capsys, "lexmin", fixture_path("example2.json"), "--target", target)
    assert status == 0 and body["mode"] == "directed"
    assert body["matching"] == [["i2", "j2"]] and body["deviation"] == ["0", "0"]
    status, body = run(capsys, "lexmin", fixture_path("example2_uniform.json"), "--target", target)
    assert body["mode"] == "uniform" and body["s"] == {"1": "2", "2": "2"}
    assert body["levels"] == [{"deviation": "1", "players": ["1", "2"]}]


def test_reduce_roundtrip(capsys, fixture_path, tmp_path):
    out = tmp_path / "exp.json"
    status, body = run(capsys, "reduce", "b2p", fixture_path("fig3_bgame.json"), "--out", out)
    assert status == 0
    pmap = json.loads((tmp_path / "exp.map.json").read_text())
    assert len(pmap) == 14
    status, body = run(capsys, "solve", out)
    assert body["value"] == "26" and body["players"] == 14
    status, body = run(capsys, "reduce", "p2b", fixture_path("fig5.json"))
    assert status == 0 and len(body["instance"]["vertices"]) == 9
    status, body = run(capsys, "reduce", "p2b", fixture_path("fig1.json"))
    assert status == 2 and body["error"] == "WidthError"


def test_gen_commands(capsys, fixture_path):
    status, body = run(capsys, "gen", "partition", "--a", "1,1")
    assert status == 0 and body["target"] == {"1": "3", "2": "1"} and body["expected"]["even_split"]
    status, body = run(capsys, "gen", "3partition", "--a", "2,2,2", "--c", "6")
    assert body["expected"]["three_partition"] is True
    status, body = run(capsys, "gen", "cycles", "--a", "3,5")
    assert len(body["instance"]["compact_cycles"]) == 2 and body["expected"]["even_split"] is False
    status, body = run(capsys, "gen", "nearly3regular", fixture_path("k4.json"))
    assert len(body["instance"]["vertices"]) == 13 * 4 + 1
    assert body["expected"]["nearly3regular_subgraph"] is None
    status, body = run(capsys, "gen", "epm", "--n", "6", "--red-density", "0.5", "--k", "1", "--seed", "3")
    assert status == 0 and body["k"] == 1 and "expected" in body
    status, again = run(capsys, "gen", "epm", "--n", "6", "--red-density", "1/2", "--k", "1", "--seed", "3")
    assert again == body


def test_epm_k4(capsys, fixture_path):
    status, body = run(capsys, "epm", fixture_path("k4.json"), "-k", "1")
    assert status == 1 and body == {"answer": "none"}
    status, body = run(capsys, "epm", fixture_path("k4.json"), "-k", "2", "--via-game")
    assert status == 0 and body["red"] == 2


def test_simulate_outputs(capsys, fixture_path, tmp_path):
    out = tmp_path / "trace.csv"
    status, body = run(capsys, "simulate", fixture_path("sim_config.json"), "--seed", "4", "--rounds", "1", "--out", out)
    assert status == 0 and body["rounds"] == 1
    lines = out.read_text().splitlines()
    assert lines[0] == "# seed=4" and len(lines) == 2 + 3  # comment, header, one row per country
    first = out.read_bytes()
    run(capsys, "simulate", fixture_path("sim_config.json"), "--seed", "4", "--rounds", "1", "--out", out)
    assert out.read_bytes() == first
    js = tmp_path / "trace.json"
    run(capsys, "simulate", fixture_path("sim_config.json"), "--rounds", "2", "--out", js, "--format", "json")
    assert [r["round"] for r in json.loads(js.read_text())["rounds"]] == [1, 2]


def test_errors_exit_2(capsys, tmp_path):
    status, body = run(capsys, "solve", tmp_path / "nope.json")
    assert status == 2 and body["error"] == "ParseError"
    bad = write(tmp_path, "bad.json", {"vertices": ["a", "b"], "arcs": [{"from": "a", "to": "b", "w": "0"}],
                                       "partition": [["a"], ["b"]]})
    status, body = run(capsys, "solve", bad)
    assert status == 2 and body["error"] == "ValidationError"


def test_module_entry_point(fixture_path):
    proc = subprocess.run([sys.executable, "-m", "pmgames", "solve", fixture_path("fig1.json")],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["value"] == "7"
    proc = subprocess.run([sys.executable, "-m", "pmgames", "core", "find", fixture_path("triangle.json")],
                          capture_output=True, text=True)
    assert proc.returncode == 1
