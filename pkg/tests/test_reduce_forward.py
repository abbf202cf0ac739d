from fractions import Fraction as F

import pytest

from noisygames.core import DomainError, Objective, PrefixG
from noisygames.measure import ConeMeasure, enumerate_act_mt
from noisygames.pog import cone_prob_pog, validate_pog
from noisygames.reduce_forward import (
    map_strategies_g_to_h,
    map_strategies_h_to_g,
    pair_prefix,
    project_prefix,
    reduce_game,
)
from noisygames.simulate import random_pog_strategy


def test_reduction_is_a_valid_pog(uniform_game):
    for mode in ("standard", "all-powerful"):
        red = reduce_game(uniform_game, Objective.safe(["x"]), mode)
        assert validate_pog(red.pog).violations == []


def test_pairs_cover_the_square(uniform_game):
    red = reduce_game(uniform_game, None, "standard")
    pairs = {(red.first_component(s), red.second_component(s))
             for s in red.pog.states if s in red.pair_name.values()}
    assert pairs == {(a, b) for a in "xy" for b in "xy"}


def test_player1_blocks_group_by_observed_component(uniform_game):
    red = reduce_game(uniform_game, None, "standard")
    for block in red.pog.obs1:
        pair_states = [s for s in block if s in red.pair_name.values()]
        assert len({red.second_component(s) for s in pair_states}) <= 1


def test_initial_distribution_is_the_first_report(uniform_game):
    red = reduce_game(uniform_game, None, "standard")
    weights = {red.second_component(s): w for s, w in red.pog.initial.items()}
    assert weights == {"x": F(1, 2), "y": F(1, 2)}


def test_objective_reads_the_true_component(uniform_game):
    red = reduce_game(uniform_game, Objective.safe(["x"]), "standard")
    target = set(red.objective_h.target)
    for s in red.pair_name.values():
        assert (s in target) == (red.first_component(s) == "x")


def test_prefix_pairing_round_trip(uniform_game):
    red = reduce_game(uniform_game, None, "standard")
    rho1 = PrefixG.parse("x a o y b o x".split())
    rho2 = PrefixG.parse("y a o y b o y".split())
    rho_h = pair_prefix(red, rho1, rho2)
    assert project_prefix(red, rho_h, "first") == rho1
    assert project_prefix(red, rho_h, "second") == rho2


def test_variant_must_match_mode(uniform_game, alpha_first, beta_dirac):
    red = reduce_game(uniform_game, None, "all-powerful")
    with pytest.raises(DomainError):
        map_strategies_g_to_h(red, alpha_first, beta_dirac)


def test_mapped_cones_split_exactly_over_threads(uniform_game, alpha_first, beta_dirac):
    """Each (true, report) thread carries the same mass on both sides."""
    red = reduce_game(uniform_game, None, "standard")
    alpha_h, beta_h = map_strategies_g_to_h(red, alpha_first, beta_dirac)
    cm = ConeMeasure(uniform_game, alpha_first, beta_dirac)
    for text in ("x a o x", "x a o x a o x", "x b o y a o x"):
        rho = PrefixG.parse(text.split())
        threads = cm.thread_weights(rho)
        for rho2 in enumerate_act_mt(uniform_game, rho):
            mass_h = cone_prob_pog(red.pog, alpha_h, beta_h, pair_prefix(red, rho, rho2))
            assert mass_h == threads.get(rho2.locs, F(0))


def test_mapped_cones_all_powerful(uniform_game, alpha_first):
    from noisygames.core import Distribution, StrategyG2

    beta = StrategyG2(
        variant="all-powerful",
        depth=9,
        rule=lambda rho, si, observed=None: Distribution.dirac("o"),
    )
    red = reduce_game(uniform_game, None, "all-powerful")
    alpha_h, beta_h = map_strategies_g_to_h(red, alpha_first, beta)
    cm = ConeMeasure(uniform_game, alpha_first, beta)
    rho = PrefixG.parse("x a o x a o x".split())
    total = sum(
        cone_prob_pog(red.pog, alpha_h, beta_h, pair_prefix(red, rho, rho2))
        for rho2 in enumerate_act_mt(uniform_game, rho)
    )
    assert total == cm.cone_prob(rho) == F(41, 400)


def test_round_trip_from_observation_strategies(uniform_game):
    """Strategies born in the reduced game induce the same cones back in it."""
    red = reduce_game(uniform_game, None, "standard")
    alpha_h = random_pog_strategy(red.pog, 1, depth=8, seed=11)
    beta_h = random_pog_strategy(red.pog, 2, depth=8, seed=12)
    alpha_g, beta_g = map_strategies_h_to_g(red, alpha_h, beta_h)
    cm = ConeMeasure(uniform_game, alpha_g, beta_g)
    level = cm.level_cones(2)
    assert sum(level.values()) == 1
    for rho, mass in level.items():
        total = sum(
            cone_prob_pog(red.pog, alpha_h, beta_h, pair_prefix(red, rho, rho2))
            for rho2 in enumerate_act_mt(uniform_game, rho)
        )
        assert total == mass
