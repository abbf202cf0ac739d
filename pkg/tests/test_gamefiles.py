import json
from fractions import Fraction as F

import pytest

from noisygames.core import Distribution, Objective, PrefixG, StrategyG1
from noisygames.gamefiles import (
    FileFormatError,
    frac_str,
    parse_frac,
    read_game,
    read_pog,
    read_pomdp,
    read_strategy1,
    read_strategy2,
    write_game,
    write_pog,
    write_pomdp,
    write_region,
    write_strategy1,
    write_strategy2,
)
from noisygames.reduce_forward import reduce_game
from noisygames.simulate import random_game, random_pomdp, random_strategy1, random_strategy2
from noisygames.solvers import almost_sure_reach, positive_reach


def test_frac_str_always_carries_a_denominator():
    assert frac_str(F(1)) == "1/1"
    assert frac_str(F(3, 7)) == "3/7"


def test_parse_frac_round_trip():
    assert parse_frac("41/400", "w") == F(41, 400)
    with pytest.raises(FileFormatError):
        parse_frac("0.5x", "w")


def test_game_round_trip(tmp_path, uniform_game):
    p = str(tmp_path / "g.json")
    write_game(p, uniform_game, Objective.parity({"x": 0, "y": 1}))
    g2, obj = read_game(p)
    assert list(g2.locations) == list(uniform_game.locations)
    assert g2.initial == uniform_game.initial
    assert obj.kind == "parity" and obj.priority_map() == {"x": 0, "y": 1}
    for l in "xy":
        for i in "ab":
            assert dict(g2.transition_dist(l, i, "o").items()) == dict(
                uniform_game.transition_dist(l, i, "o").items()
            )
        assert dict(g2.un_dist(l).items()) == dict(uniform_game.un_dist(l).items())


def test_game_round_trip_many_random(tmp_path):
    for seed in range(8):
        g = random_game(seed)
        p = str(tmp_path / f"g{seed}.json")
        write_game(p, g)
        g2, obj = read_game(p)
        assert obj is None
        assert list(g2.locations) == list(g.locations)
        for l in g.locations:
            assert dict(g2.un_dist(l).items()) == dict(g.un_dist(l).items())
            for i in g.inputs:
                for o in g.outputs:
                    assert dict(g2.transition_dist(l, i, o).items()) == dict(
                        g.transition_dist(l, i, o).items()
                    )


def test_pomdp_round_trip(tmp_path, blind_pomdp):
    p = str(tmp_path / "m.json")
    write_pomdp(p, blind_pomdp, Objective.reach(["y"]))
    m2, obj = read_pomdp(p)
    assert list(m2.states) == ["x", "y"]
    assert [list(b) for b in m2.obs] == [["x", "y"]]
    assert obj.kind == "reach" and set(obj.target) == {"y"}


def test_pog_round_trip_keeps_provenance(tmp_path, uniform_game):
    red = reduce_game(uniform_game, Objective.safe(["x"]), "standard")
    p = str(tmp_path / "h.json")
    states = {}
    for s, parts in red.provenance.items():
        rec = {"true": parts[0], "observed": parts[1]}
        if len(parts) == 3:
            rec["input"] = parts[2]
        states[s] = rec
    prov = {"mode": red.mode, "states": states}
    write_pog(p, red.pog, red.objective_h, prov)
    h2, obj, prov2 = read_pog(p)
    assert list(h2.states) == list(red.pog.states)
    assert prov2["mode"] == "standard"
    assert set(obj.target) == set(red.objective_h.target)


def test_strategy1_round_trip(tmp_path, uniform_game):
    alpha = random_strategy1(uniform_game, depth=2, seed=5)
    rows = {}
    for locs in (("x",), ("y",)):
        rows[PrefixG(locs, (), ())] = alpha.dist(PrefixG(locs, (), ()))
    fixed = StrategyG1(depth=2, rows=rows)
    p = str(tmp_path / "a.json")
    write_strategy1(p, fixed)
    back = read_strategy1(p)
    assert back.depth == 2
    for rho in rows:
        assert dict(back.dist(rho).items()) == dict(fixed.dist(rho).items())


def test_strategy2_round_trip_both_variants(tmp_path, uniform_game):
    for variant in ("ordinary", "all-powerful"):
        beta = random_strategy2(uniform_game, depth=2, seed=6, variant=variant)
        keys = []
        rho = PrefixG(("x",), (), ())
        if variant == "ordinary":
            keys.append((rho, "a"))
            rows = {k: beta.dist(*k) for k in keys}
        else:
            keys.append((rho, rho, "a"))
            rows = {k: beta.dist(k[0], k[2], observed=k[1]) for k in keys}
        from noisygames.core import StrategyG2

        fixed = StrategyG2(variant=variant, depth=2, rows=rows)
        p = str(tmp_path / f"b-{variant}.json")
        write_strategy2(p, fixed)
        back = read_strategy2(p)
        assert back.variant == variant
        for k in keys:
            if variant == "ordinary":
                assert dict(back.dist(*k).items()) == dict(rows[k].items())
            else:
                assert dict(back.dist(k[0], k[2], observed=k[1]).items()) == dict(rows[k].items())


def test_region_file_has_witness_and_verdict(tmp_path):
    m = random_pomdp(3, n_states=3)
    target = [m.states[-1]]
    region = positive_reach(m, target)
    p = str(tmp_path / "w.json")
    write_region(p, region)
    doc = json.loads(open(p).read())
    assert doc["mode"] == "positive"
    assert doc["initial_winning"] == region.initial_winning


def test_malformed_json_reports_position(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"locations": [,]}')
    with pytest.raises(FileFormatError) as err:
        read_game(str(p))
    assert "invalid JSON" in str(err.value)
    assert ":1:" in str(err.value)


def test_missing_field_names_its_path(tmp_path):
    p = tmp_path / "partial.json"
    p.write_text(json.dumps({"locations": ["x"], "inputs": ["a"]}))
    with pytest.raises(FileFormatError) as err:
        read_game(str(p))
    assert err.value.where


def test_bad_probability_names_the_row(tmp_path, uniform_game):
    p = tmp_path / "g.json"
    write_game(str(p), uniform_game)
    doc = json.loads(p.read_text())
    doc["delta"][0]["to"][0]["prob"] = "nonsense"
    p.write_text(json.dumps(doc))
    with pytest.raises(FileFormatError) as err:
        read_game(str(p))
    assert "delta" in err.value.where
