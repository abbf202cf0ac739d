from fractions import Fraction as F

from hypothesis import given, settings, strategies as st

from noisygames.core import Distribution, PrefixG, StrategyG1
from noisygames.measure import (
    ConeMeasure,
    cone_prob,
    enumerate_act_mt,
    event_prob_at_depth,
    obs_seq,
)
from noisygames.simulate import random_game, random_strategy1, random_strategy2

from oracles import joint_cone_oracle


def rho(text: str) -> PrefixG:
    return PrefixG.parse(text.split())


# Frozen cone masses for the two-location coin-flip game with the input
# strategy keyed to the first report. Derived by hand: the initial report
# is x or y with mass 1/2, the skewed row then fixes the input weights,
# and every transition and later report contributes another 1/2.


def test_cone_one_round(uniform_game, alpha_first, beta_dirac):
    assert cone_prob(uniform_game, alpha_first, beta_dirac, rho("x a o x")) == F(1, 4)


def test_cone_two_rounds_same_input(uniform_game, alpha_first, beta_dirac):
    got = cone_prob(uniform_game, alpha_first, beta_dirac, rho("x a o x a o x"))
    assert got == F(41, 400)


def test_cone_two_rounds_mixed_inputs(uniform_game, alpha_first, beta_dirac):
    got = cone_prob(uniform_game, alpha_first, beta_dirac, rho("x a o y b o x"))
    assert got == F(9, 400)


def test_level_mass_is_conserved(uniform_game, alpha_first, beta_dirac):
    cm = ConeMeasure(uniform_game, alpha_first, beta_dirac)
    for depth in (1, 2, 3):
        level = cm.level_cones(depth)
        assert sum(level.values()) == 1


def test_cone_rejects_foreign_start(uniform_game, alpha_first, beta_dirac):
    import pytest

    from noisygames.core import DomainError

    with pytest.raises(DomainError):
        cone_prob(uniform_game, alpha_first, beta_dirac, rho("y a o x"))


def test_obs_seq_is_uniform_over_reports(uniform_game):
    base = rho("x a o x a o x")
    for other in enumerate_act_mt(uniform_game, base):
        assert obs_seq(uniform_game, base, other) == F(1, 8)


def test_obs_seq_sums_to_one(uniform_game):
    for base in (rho("x a o y"), rho("x b o x a o y")):
        total = sum(obs_seq(uniform_game, base, other) for other in enumerate_act_mt(uniform_game, base))
        assert total == 1


def test_obs_seq_identity_sensor_is_dirac(identity_game):
    base = rho("x a o y")
    weights = {other.locs: obs_seq(identity_game, base, other)
               for other in enumerate_act_mt(identity_game, base)}
    assert weights[("x", "y")] == 1
    assert sum(weights.values()) == 1


def test_threaded_conditional_diverges_from_report_weight(uniform_game, alpha_first, beta_dirac):
    """The joint measure remembers the first report; the report weight cannot.

    Conditioned on the true prefix (x a o x), the thread that also saw
    (x a o x) carries 9/10 of the input mass twice over, so its share is
    (1/80) / (1/4) = 1/20 while the plain report weight says 1/4.
    """
    cm = ConeMeasure(uniform_game, alpha_first, beta_dirac)
    base = rho("x a o x")
    joint = cm.thread_weights(base)
    denom = cm.cone_prob(base)
    assert denom == F(1, 4)
    assert joint[("y", "x")] / denom == F(1, 20)
    assert obs_seq(uniform_game, base, rho("y a o x")) == F(1, 4)


def test_event_prob_reach_by_two(chain_game, beta_dirac):
    alpha = StrategyG1(depth=9, rule=lambda r: Distribution.dirac("s"))
    got = event_prob_at_depth(chain_game, alpha, beta_dirac, lambda r: "c1" in r.locs, 2)
    assert got == F(5, 9)


def test_event_prob_true_predicate_is_total_mass(uniform_game, alpha_first, beta_dirac):
    assert event_prob_at_depth(uniform_game, alpha_first, beta_dirac, lambda r: True, 2) == 1


def test_event_prob_unreachable_target(chain_game, beta_dirac):
    alpha = StrategyG1(depth=9, rule=lambda r: Distribution.dirac("s"))
    assert event_prob_at_depth(chain_game, alpha, beta_dirac, lambda r: "zz" in r.locs, 2) == 0


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000), depth=st.integers(min_value=1, max_value=2))
def test_cone_matches_brute_force_enumeration(seed, depth):
    """Whole-thread enumeration agrees with the implementation exactly."""
    g = random_game(seed)
    alpha = random_strategy1(g, depth=7, seed=seed + 1)
    beta = random_strategy2(g, depth=7, seed=seed + 2)
    cm = ConeMeasure(g, alpha, beta)
    level = cm.level_cones(depth)
    checked = 0
    for prefix, mass in level.items():
        if mass == 0 and checked > 4:
            continue
        assert joint_cone_oracle(g, alpha, beta, prefix) == mass
        checked += 1
        if checked >= 12:
            break


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000))
def test_cone_level_mass_random_games(seed):
    g = random_game(seed)
    alpha = random_strategy1(g, depth=7, seed=seed ^ 9)
    beta = random_strategy2(g, depth=7, seed=seed ^ 5, variant="all-powerful")
    cm = ConeMeasure(g, alpha, beta)
    assert sum(cm.level_cones(2).values()) == 1
