import json
import subprocess
import sys
from fractions import Fraction as F
from itertools import product

import pytest

from noisygames.core import Distribution, PrefixG, StrategyG1, StrategyG2, UncertaintyGame
from noisygames.gamefiles import read_pog, write_game, write_strategy1, write_strategy2


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "noisygames.cli", *args],
        capture_output=True,
        text=True,
    )


def single_loc_game() -> UncertaintyGame:
    return UncertaintyGame(
        locations=["x"],
        inputs=["a"],
        outputs=["o"],
        initial="x",
        delta={("x", "a", "o"): {"x": F(1)}},
        un={"x": {"x": F(1)}},
    )


def table_strategies(g: UncertaintyGame, depth: int):
    """Row tables covering every prefix the measure can ask about."""
    arows, brows = {}, {}
    uniform_in = Distribution.uniform(g.inputs)
    uniform_out = Distribution.uniform(g.outputs)
    prefixes = [PrefixG((l,), (), ()) for l in g.locations]
    for _ in range(depth):
        arows.update({r: uniform_in for r in prefixes})
        for r in prefixes:
            for i in g.inputs:
                brows[(r, i)] = uniform_out
        prefixes = [
            PrefixG(r.locs + (l,), r.ins + (i,), r.outs + (o,))
            for r in prefixes
            for i in g.inputs
            for o in g.outputs
            for l in g.locations
        ]
    alpha = StrategyG1(depth=depth, rows=arows)
    beta = StrategyG2(variant="ordinary", depth=depth, rows=brows)
    return alpha, beta


@pytest.fixture
def workdir(tmp_path, uniform_game):
    write_game(str(tmp_path / "g.json"), uniform_game)
    alpha, beta = table_strategies(uniform_game, depth=3)
    write_strategy1(str(tmp_path / "a.json"), alpha)
    write_strategy2(str(tmp_path / "b.json"), beta)
    return tmp_path


def test_measure_prints_rational_then_decimal(workdir):
    r = run_cli("measure", "--in", str(workdir / "g.json"),
                "--a", str(workdir / "a.json"), "--b", str(workdir / "b.json"),
                "--prefix", "x a o x")
    assert r.returncode == 0, r.stderr
    lines = r.stdout.splitlines()
    assert lines[0] == "1/4"
    assert lines[1] == "0.25"


def test_measure_mass_one_cone(tmp_path):
    write_game(str(tmp_path / "g.json"), single_loc_game())
    alpha, beta = table_strategies(single_loc_game(), depth=2)
    write_strategy1(str(tmp_path / "a.json"), alpha)
    write_strategy2(str(tmp_path / "b.json"), beta)
    r = run_cli("measure", "--in", str(tmp_path / "g.json"),
                "--a", str(tmp_path / "a.json"), "--b", str(tmp_path / "b.json"),
                "--prefix", "x a o x")
    assert r.returncode == 0
    assert r.stdout.splitlines() == ["1/1", "1"]


def test_solve_winning_exits_zero(workdir):
    r = run_cli("solve", "--in", str(workdir / "g.json"),
                "--objective", "reach", "--target", "x")
    assert r.returncode == 0
    assert "winning" in r.stdout


def test_solve_losing_exits_one(workdir):
    r = run_cli("solve", "--in", str(workdir / "g.json"),
                "--objective", "safe", "--target", "x")
    assert r.returncode == 1
    assert "not winning" in r.stdout


def test_solve_undecidable_exits_two(workdir):
    r = run_cli("solve", "--in", str(workdir / "g.json"),
                "--objective", "parity", "--priorities", "x=0,y=1",
                "--mode", "almost")
    assert r.returncode == 2
    assert r.stdout.strip() == "Unsupported: undecidable (Table 1)"


def test_solve_writes_a_witness_file(workdir):
    out = workdir / "region.json"
    r = run_cli("solve", "--in", str(workdir / "g.json"),
                "--objective", "reach", "--target", "x", "--witness", str(out))
    assert r.returncode == 0
    doc = json.loads(out.read_text())
    assert doc["initial_winning"] is True


def test_reduce_forward_emits_a_readable_pog(workdir):
    out = workdir / "h.json"
    r = run_cli("reduce-forward", "--in", str(workdir / "g.json"),
                "--mode", "standard", "--out", str(out))
    assert r.returncode == 0, r.stderr
    h, obj, prov = read_pog(str(out))
    assert prov["mode"] == "standard"
    assert len(h.states) > 4


def test_reduce_pomdp_round_trip(tmp_path, blind_pomdp):
    from noisygames.gamefiles import read_game, write_pomdp

    src = tmp_path / "m.json"
    out = tmp_path / "gm.json"
    write_pomdp(str(src), blind_pomdp)
    r = run_cli("reduce-pomdp", "--in", str(src), "--out", str(out))
    assert r.returncode == 0, r.stderr
    g, obj = read_game(str(out))
    assert sorted(g.locations) == ["x", "y"]


def test_malformed_file_exits_64(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{ nope")
    r = run_cli("solve", "--in", str(bad), "--objective", "reach", "--target", "x")
    assert r.returncode == 64
    assert "file error" in r.stderr
    assert ":1:" in r.stderr


def test_semantic_failure_exits_65(tmp_path, uniform_game):
    p = tmp_path / "g.json"
    write_game(str(p), uniform_game)
    doc = json.loads(p.read_text())
    doc["delta"] = [row for row in doc["delta"] if not (row["from"] == "y" and row["in"] == "b")]
    p.write_text(json.dumps(doc))
    r = run_cli("solve", "--in", str(p), "--objective", "reach", "--target", "x")
    assert r.returncode == 65
    assert "error" in r.stderr


def test_write_then_read_is_stable(tmp_path, uniform_game):
    from noisygames.gamefiles import read_game

    p1, p2 = tmp_path / "g1.json", tmp_path / "g2.json"
    write_game(str(p1), uniform_game)
    g2, _ = read_game(str(p1))
    write_game(str(p2), g2)
    assert p1.read_bytes() == p2.read_bytes()


def test_verify_single_kind_exit_codes(tmp_path):
    ok = run_cli("verify", "--lemma", "ObsBasedMapping", "--instances", "2", "--depth", "1")
    assert ok.returncode == 0, ok.stderr
    doc = json.loads(ok.stdout)
    assert doc["summary"]["by_kind"]["ObsBasedMapping"]["failed"] == 0
    bad = run_cli("verify", "--lemma", "ObsSeqConditional", "--instances", "2", "--depth", "2")
    assert bad.returncode == 1
    assert "FAIL" in bad.stderr


def test_verify_report_dir_contains_the_artifacts(tmp_path):
    rep = tmp_path / "rep"
    r = run_cli("verify", "--lemma", "ObsBasedMapping", "--instances", "2",
                "--depth", "1", "--report-dir", str(rep))
    assert r.returncode == 0, r.stderr
    assert (rep / "report.json").exists()
    assert (rep / "lemma_results.csv").exists()
    assert (rep / "outcomes.png").exists()
    assert (rep / "pairs.png").exists()
    instances = list((rep / "instances").iterdir())
    assert len(instances) == 2
    for d in instances:
        assert (d / "game.json").exists()
        assert (d / "pomdp.json").exists()


def test_sample_traces_are_deterministic(workdir):
    args = ("sample", "--in", str(workdir / "g.json"),
            "--a", str(workdir / "a.json"), "--b", str(workdir / "b.json"),
            "--depth", "2", "--seed", "11", "--samples", "3")
    r1, r2 = run_cli(*args), run_cli(*args)
    assert r1.returncode == 0, r1.stderr
    assert r1.stdout == r2.stdout
    lines = [json.loads(l) for l in r1.stdout.splitlines()]
    assert len(lines) == 3
    assert all(len(rec["true"]) == 7 for rec in lines)


def test_sample_estimates_a_cone(workdir):
    r = run_cli("sample", "--in", str(workdir / "g.json"),
                "--a", str(workdir / "a.json"), "--b", str(workdir / "b.json"),
                "--depth", "1", "--seed", "11", "--samples", "400",
                "--prefix", "x a o x")
    assert r.returncode == 0, r.stderr
    doc = json.loads(r.stdout)
    assert doc["samples"] == 400
    assert abs(doc["mean"] - 0.25) < 4 * (0.25 * 0.75 / 400) ** 0.5


def test_help_documents_the_enumeration_knob():
    r = run_cli("measure", "--help")
    assert "UG_MAX_ENUM" in r.stdout
