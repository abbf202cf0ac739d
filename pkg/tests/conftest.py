"""Shared canned models.

The two-location uniform game is the workhorse: every transition and
every sensor report is a coin flip, so cone masses come out as short
fractions that were derived by hand before the implementation existed.
"""

from __future__ import annotations

from fractions import Fraction as F

import pytest

from noisygames.core import Distribution, StrategyG1, StrategyG2, UncertaintyGame
from noisygames.pog import Pomdp

HALF = F(1, 2)


def skewed_row(loc: str) -> Distribution:
    hi, lo = F(9, 10), F(1, 10)
    return Distribution({"a": hi, "b": lo} if loc == "x" else {"a": lo, "b": hi})


@pytest.fixture
def uniform_game() -> UncertaintyGame:
    uni = {"x": HALF, "y": HALF}
    return UncertaintyGame(
        locations=["x", "y"],
        inputs=["a", "b"],
        outputs=["o"],
        initial="x",
        delta={(l, i, "o"): dict(uni) for l in "xy" for i in "ab"},
        un={l: dict(uni) for l in "xy"},
    )


@pytest.fixture
def identity_game() -> UncertaintyGame:
    uni = {"x": HALF, "y": HALF}
    return UncertaintyGame(
        locations=["x", "y"],
        inputs=["a", "b"],
        outputs=["o"],
        initial="x",
        delta={(l, i, "o"): dict(uni) for l in "xy" for i in "ab"},
        un={"x": {"x": F(1)}, "y": {"y": F(1)}},
    )


@pytest.fixture
def alpha_first() -> StrategyG1:
    """Reads only the first reported location."""
    return StrategyG1(depth=9, rule=lambda rho2: skewed_row(rho2.locs[0]))


@pytest.fixture
def alpha_last() -> StrategyG1:
    """Reads the latest report, so it reacts to sensor noise every round."""
    return StrategyG1(depth=9, rule=lambda rho2: skewed_row(rho2.locs[-1]))


@pytest.fixture
def beta_dirac() -> StrategyG2:
    return StrategyG2(variant="ordinary", depth=9, rule=lambda rho, si: Distribution({"o": F(1)}))


@pytest.fixture
def blind_pomdp() -> Pomdp:
    """Two states behind a single observation class, all moves coin flips."""
    uni = {"x": HALF, "y": HALF}
    return Pomdp(
        states=["x", "y"],
        actions=["a", "b"],
        delta={(s, act): dict(uni) for s in "xy" for act in "ab"},
        obs=[["x", "y"]],
        initial="x",
    )


@pytest.fixture
def chain_game() -> UncertaintyGame:
    """Perfectly observed two-location chain, 1/3 chance of advancing."""
    return UncertaintyGame(
        locations=["c0", "c1"],
        inputs=["s"],
        outputs=["o"],
        initial="c0",
        delta={
            ("c0", "s", "o"): {"c1": F(1, 3), "c0": F(2, 3)},
            ("c1", "s", "o"): {"c1": F(1)},
        },
        un={"c0": {"c0": F(1)}, "c1": {"c1": F(1)}},
    )


@pytest.fixture
def retry_pomdp() -> Pomdp:
    """Survives each step with probability one half; never safe forever."""
    return Pomdp(
        states=["alive", "dead"],
        actions=["w"],
        delta={("alive", "w"): {"alive": HALF, "dead": HALF}, ("dead", "w"): {"dead": F(1)}},
        obs=[["alive"], ["dead"]],
        initial="alive",
    )
