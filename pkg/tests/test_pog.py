from fractions import Fraction as F
from itertools import product

import pytest

from noisygames.core import Distribution, DomainError
from noisygames.pog import (
    ObsBasedStrategy,
    Pomdp,
    PrefixH,
    cone_prob_pomdp,
    observation_seq,
    validate_pog,
)


def test_observation_seq_blind(blind_pomdp):
    r = PrefixH(("x", "y", "x"), ("a", "b"))
    assert observation_seq(blind_pomdp, 1, r) == (0, "a", 0, "b", 0)


def test_observation_seq_keeps_actions_verbatim(retry_pomdp):
    r = PrefixH(("alive", "dead"), ("w",))
    assert observation_seq(retry_pomdp, 1, r) == (0, "w", 1)


def test_prefix_destutter_groups_rounds():
    r = PrefixH(("s", "s#mid", "t"), ("a1", "a2"))
    start, rounds = r.destutter()
    assert start == "s"
    assert rounds == (("a1", "a2", "t"),)


def test_obs_strategy_lookup_goes_through_blocks(blind_pomdp):
    alpha = ObsBasedStrategy(player=1, depth=5, rule=lambda key: Distribution.dirac("a"))
    assert alpha.dist(blind_pomdp, PrefixH(("y",)))["a"] == 1


def test_obs_strategy_rejects_inconsistent_table(blind_pomdp):
    rows = {PrefixH(("x",)): {"a": F(1)}, PrefixH(("y",)): {"b": F(1)}}
    with pytest.raises(DomainError) as err:
        ObsBasedStrategy.from_prefix_table(blind_pomdp, 1, rows, depth=3)
    assert "'x'" in str(err.value) and "'y'" in str(err.value)


def test_obs_strategy_accepts_consistent_table(retry_pomdp):
    rows = {
        PrefixH(("alive",)): {"w": F(1)},
        PrefixH(("dead",)): {"w": F(1)},
    }
    alpha = ObsBasedStrategy.from_prefix_table(retry_pomdp, 1, rows, depth=1)
    assert alpha.dist(retry_pomdp, PrefixH(("alive",)))["w"] == 1


def test_pomdp_cone_mass_conserved(blind_pomdp):
    alpha = ObsBasedStrategy(
        player=1,
        depth=5,
        rule=lambda key: Distribution({"a": F(2, 3), "b": F(1, 3)}),
    )
    for depth in (1, 2):
        total = F(0)
        for tail in product("xy", repeat=depth):
            for acts in product("ab", repeat=depth):
                r = PrefixH(("x",) + tail, acts)
                total += cone_prob_pomdp(blind_pomdp, alpha, r)
        assert total == 1


def test_pomdp_cone_frozen_value(blind_pomdp):
    alpha = ObsBasedStrategy(player=1, depth=5, rule=lambda key: Distribution.dirac("a"))
    assert cone_prob_pomdp(blind_pomdp, alpha, PrefixH(("x", "y"), ("a",))) == F(1, 2)
    assert cone_prob_pomdp(blind_pomdp, alpha, PrefixH(("x", "y"), ("b",))) == 0


def test_pomdp_as_pog_round_trip(blind_pomdp):
    h = blind_pomdp.as_pog()
    assert validate_pog(h).violations == []
    assert Pomdp.POMDP_ACTION2 in h.actions2


def test_pog_of_pomdp_ignores_player2(blind_pomdp):
    from noisygames.pog import cone_prob_pog

    h = blind_pomdp.as_pog()
    alpha = ObsBasedStrategy(player=1, depth=9, rule=lambda key: Distribution.dirac("a"))
    beta = ObsBasedStrategy(
        player=2, depth=9, rule=lambda key: Distribution.dirac(Pomdp.POMDP_ACTION2)
    )
    r = PrefixH(("x", blind_pomdp.mid_name("x", "a"), "y"), ("a", Pomdp.POMDP_ACTION2))
    assert cone_prob_pog(h, alpha, beta, r) == F(1, 2)
    assert cone_prob_pomdp(blind_pomdp, alpha, PrefixH(("x", "y"), ("a",))) == F(1, 2)
