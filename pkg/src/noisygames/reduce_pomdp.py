"""Embedding of a POMDP into a noisy-sensor game.

States become locations, actions become input letters, and Player 2 is
reduced to a mute carrier with the single output letter "⊥". The sensor
reproduces the POMDP's observation structure: it reports a state drawn
uniformly from the observation class of the true one, so seeing a report
tells Player 1 exactly which class was entered and nothing more.

Histories on the two sides differ only by the padding letter, so the
translation is a bijection that inserts or strips "⊥". Strategies travel
in both directions. Going into the POMDP averages the game strategy over
all reports the sensor could have produced for the observed classes;
coming back reads the game's reports as class representatives. The two
directions do not invert each other: a game strategy that distinguishes
reports within one class is flattened by the averaging, and only its
class-level behaviour survives the round trip.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .core import (
    Distribution,
    DomainError,
    Objective,
    PrefixG,
    StrategyG1,
    UncertaintyGame,
)
from .pog import POMDP_ACTION2, ObsBasedStrategy, Pomdp, PrefixH

__all__ = [
    "PomdpReduction",
    "reduce_pomdp",
    "prefix_g_to_pomdp",
    "prefix_pomdp_to_g",
    "strategy_g_to_pomdp",
    "strategy_pomdp_to_g",
]


class PomdpReduction:
    """The game built from a POMDP, with the translation maps."""

    def __init__(self, pomdp: Pomdp, game: UncertaintyGame, objective: Objective | None):
        self.pomdp = pomdp
        self.game = game
        self.objective = objective


def reduce_pomdp(m: Pomdp, objective: Objective | None = None) -> PomdpReduction:
    """Build the game; linear in the size of the POMDP.

    State names carry over unchanged, so ``objective`` needs no lifting.
    """
    if objective is not None:
        bad = objective.check(m.states)
        if bad:
            raise DomainError(f"objective mentions unknown states: {sorted(bad)}")
    delta = {}
    for s in m.states:
        for a in m.actions:
            delta[(s, a, POMDP_ACTION2)] = m.succ(s, a)
    un = {s: Distribution.uniform(m.obs[m.obs_block(1, s)]) for s in m.states}
    game = UncertaintyGame(
        locations=m.states,
        inputs=m.actions,
        outputs=(POMDP_ACTION2,),
        initial=m.initial,
        delta=delta,
        un=un,
    )
    return PomdpReduction(m, game, objective)


def prefix_g_to_pomdp(red: PomdpReduction, rho: PrefixG) -> PrefixH:
    """Strip the padding letter; rejects histories that use any other output."""
    for so in rho.outs:
        if so != POMDP_ACTION2:
            raise DomainError(f"output letter {so!r} does not belong to the embedded POMDP")
    return PrefixH(rho.locs, rho.ins)


def prefix_pomdp_to_g(red: PomdpReduction, rho: PrefixH) -> PrefixG:
    """Insert the padding letter after every action."""
    if len(rho.states) != len(rho.acts) + 1:
        raise DomainError("POMDP history must alternate states and actions")
    return PrefixG(rho.states, rho.acts, (POMDP_ACTION2,) * len(rho.acts))


def strategy_g_to_pomdp(red: PomdpReduction, alpha_g: StrategyG1) -> ObsBasedStrategy:
    """Average a game strategy over the sensor reports behind each class.

    For an observed class sequence the sensor could have emitted any
    member of each class, all equally likely, so the POMDP row is the
    uniform mixture of the game rows over that product. The result is
    observation-based by construction. The mixture has one term per
    combination of class members, so it is only meant for short histories.
    """
    m = red.pomdp

    def rule(key: tuple) -> Distribution:
        blocks = [m.obs[key[j]] for j in range(0, len(key), 2)]
        acts = tuple(key[j] for j in range(1, len(key), 2))
        pads = (POMDP_ACTION2,) * len(acts)
        weight = Fraction(1)
        for b in blocks:
            weight /= len(b)
        out: dict[str, Fraction] = {}
        for combo in itertools.product(*blocks):
            row = alpha_g.dist(PrefixG(combo, acts, pads))
            for a, w in row.items():
                if w != 0:
                    out[a] = out.get(a, Fraction(0)) + weight * w
        return Distribution(out)

    return ObsBasedStrategy(player=1, depth=alpha_g.depth, rule=rule)


def strategy_pomdp_to_g(red: PomdpReduction, alpha_m: ObsBasedStrategy) -> StrategyG1:
    """Read the game's sensor reports as class representatives.

    Composing with :func:`strategy_g_to_pomdp` in either order is not the
    identity; distinctions between reports inside one class cannot
    survive, because the POMDP never sees them.
    """
    m = red.pomdp

    def rule(rho2: PrefixG) -> Distribution:
        key: list = []
        for j, loc in enumerate(rho2.locs):
            key.append(m.obs_block(1, loc))
            if j < rho2.steps:
                if rho2.outs[j] != POMDP_ACTION2:
                    raise DomainError(
                        f"output letter {rho2.outs[j]!r} does not belong to the embedded POMDP"
                    )
                key.append(rho2.ins[j])
        return alpha_m.dist_for_key(tuple(key))

    return StrategyG1(depth=alpha_m.depth, rule=rule)
