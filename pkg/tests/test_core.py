from fractions import Fraction as F

import pytest

from noisygames.core import (
    DepthExceededError,
    Distribution,
    DomainError,
    Objective,
    PrefixG,
    StrategyG1,
    StrategyG2,
    UncertaintyGame,
    enum_budget,
    eval_objective_on_lasso,
    parity_form,
    parity_form_lasso,
    validate_game,
)


def test_distribution_stays_exact():
    d = Distribution({"a": F(1, 3), "b": F(2, 3)})
    assert d.total() == 1
    assert d["a"] + d["b"] == F(1)
    assert d.is_valid()


def test_distribution_merges_on_relabel():
    d = Distribution({"a": F(1, 3), "b": F(2, 3)})
    assert dict(d.map_keys(lambda _: "z").items()) == {"z": F(1)}


def test_dirac_and_uniform():
    assert dict(Distribution.dirac("a").items()) == {"a": F(1)}
    u = Distribution.uniform(["p", "q", "r"])
    assert all(w == F(1, 3) for _, w in u.items())


def test_prefix_parse_and_slices():
    rho = PrefixG.parse("x a o y b o x".split())
    assert rho.locs == ("x", "y", "x")
    assert rho.steps == 2
    assert list(rho.up_to(1).interleaved()) == ["x", "a", "o", "y"]
    assert rho.last == "x"


def test_prefix_parse_rejects_ragged_input():
    with pytest.raises(DomainError):
        PrefixG.parse("x a o".split())


def test_action_matching_ignores_locations():
    rho = PrefixG.parse("x a o y".split())
    other = PrefixG.parse("y a o x".split())
    assert rho.action_matches(other)
    assert not rho.action_matches(PrefixG.parse("y b o x".split()))


def test_strategy_depth_guard():
    s = StrategyG1(depth=1, rule=lambda r: Distribution.dirac("a"))
    s.dist(PrefixG.parse(["x"]))
    with pytest.raises(DepthExceededError):
        s.dist(PrefixG.parse("x a o y".split()))


def test_strategy2_observed_thread_is_optional():
    beta = StrategyG2(variant="ordinary", depth=3, rule=lambda rho, si: Distribution.dirac("o"))
    assert beta.dist(PrefixG.parse(["x"]), "a")["o"] == 1


def test_validate_game_accepts_coin_flips(uniform_game):
    assert validate_game(uniform_game).violations == []


def test_validate_game_flags_bad_row():
    g = UncertaintyGame(
        locations=["x"],
        inputs=["a"],
        outputs=["o"],
        initial="x",
        delta={("x", "a", "o"): {"x": F(1, 2)}},
        un={"x": {"x": F(1)}},
    )
    report = validate_game(g)
    assert report.violations
    assert any("x" in v for v in report.violations)


def test_transition_rejects_foreign_letters(uniform_game):
    with pytest.raises(DomainError):
        uniform_game.transition_dist("x", "zz", "o")


def test_enum_budget_reads_environment(monkeypatch):
    assert enum_budget() == 1_000_000
    monkeypatch.setenv("UG_MAX_ENUM", "123")
    assert enum_budget() == 123


# Lasso evaluation underpins both the parity backend and the mutation
# checks, so its small cases are pinned here.


def test_reach_lasso():
    o = Objective.reach(["t"])
    assert eval_objective_on_lasso(o, ["s", "t"], ["s"])
    assert not eval_objective_on_lasso(o, ["s"], ["s"])


def test_safe_lasso():
    o = Objective.safe(["s"])
    assert eval_objective_on_lasso(o, ["s"], ["s"])
    assert not eval_objective_on_lasso(o, ["s"], ["s", "t"])


def test_buchi_lasso_only_counts_the_cycle():
    o = Objective.buchi(["t"])
    assert not eval_objective_on_lasso(o, ["t"], ["s"])
    assert eval_objective_on_lasso(o, ["s"], ["t", "s"])


def test_parity_lasso_uses_minimum_cycle_priority():
    o = Objective.parity({"s": 1, "t": 2})
    assert eval_objective_on_lasso(o, [], ["t"])
    assert not eval_objective_on_lasso(o, ["t"], ["s"])


def test_parity_form_for_buchi():
    assert parity_form(Objective.buchi(["t"]), ["s", "t"]) == {"s": 1, "t": 0}


def test_parity_form_refuses_reach():
    with pytest.raises(DomainError):
        parity_form(Objective.reach(["t"]), ["s", "t"])


def test_parity_form_lasso_tracks_a_history_flag():
    prios, stem, cycle = parity_form_lasso(Objective.reach(["t"]), ["s", "t"], ["s"])
    assert prios[("t", True)] == 0
    assert cycle == [("s", True)]


def test_objective_check_names_dangling_targets():
    o = Objective.reach(["t"])
    assert o.check(["s", "t"]) == []
    assert o.check(["s"]) == ["dangling location 't' in objective target"]
