"""Reduction from a noisy-sensor game to an alternating partial-observation game.

Product states pair the true location with the sensor's report. Player 1
states are pairs ``(l1, l2)``; picking an input letter moves (surely) to
the triple ``(l1, l2, input)``, where Player 2's output letter resolves
both the real transition and the next sensor draw in one stochastic step.
Player 1 observes only the second (reported) component; Player 2 observes
everything in all-powerful mode and only the first (true) component in
standard mode. Objectives read the first component, so winning is about
what really happened, not what was reported.

Both directions of strategy transport live here too: noisy-game
strategies become observation-based product strategies by reading the
appropriate projection, and observation-based product strategies pull
back through the observation keys themselves, so no sets of equivalent
histories are ever materialized.
"""

from __future__ import annotations

from typing import Mapping

from .core import (
    ALL_POWERFUL,
    ORDINARY,
    Distribution,
    DomainError,
    Objective,
    PrefixG,
    StrategyG1,
    StrategyG2,
    UncertaintyGame,
    validate_game,
)
from .pog import ObsBasedStrategy, PartialObsGame, PrefixH

__all__ = [
    "MODE_ALL_POWERFUL",
    "MODE_STANDARD",
    "ReducedGame",
    "reduce_game",
    "project_prefix",
    "pair_prefix",
    "map_strategies_g_to_h",
    "map_strategies_h_to_g",
]

MODE_ALL_POWERFUL = "all-powerful"
MODE_STANDARD = "standard"


class ReducedGame:
    """The product game plus the bookkeeping to move between the two worlds."""

    def __init__(
        self,
        game: UncertaintyGame,
        pog: PartialObsGame,
        mode: str,
        objective: Objective | None,
        objective_h: Objective | None,
        pair_name: Mapping[tuple[str, str], str],
        trip_name: Mapping[tuple[str, str, str], str],
    ):
        self.game = game
        self.pog = pog
        self.mode = mode
        self.objective = objective
        self.objective_h = objective_h
        self.pair_name = dict(pair_name)
        self.trip_name = dict(trip_name)
        self.provenance: dict[str, tuple] = {name: comp for comp, name in self.pair_name.items()}
        self.provenance.update({name: comp for comp, name in self.trip_name.items()})
        # Player 1's observation blocks are built in location order, so the
        # block index of a state is the index of its second component.
        self._loc_of_block = list(game.locations)
        self._block_of_loc = {loc: i for i, loc in enumerate(game.locations)}

    def first_component(self, state: str) -> str:
        return self.provenance[state][0]

    def second_component(self, state: str) -> str:
        return self.provenance[state][1]


def reduce_game(g: UncertaintyGame, objective: Objective | None, mode: str) -> ReducedGame:
    """Build the product game; polynomial in the size of ``g``.

    ``objective``, when given, is lifted through the first component and
    stored as ``objective_h``.
    """
    if mode not in (MODE_ALL_POWERFUL, MODE_STANDARD):
        raise DomainError(f"unknown Player 2 mode {mode!r}")
    report = validate_game(g)
    if not report.ok:
        raise DomainError(f"refusing to reduce a malformed game:\n{report}")

    pair_name = {(l1, l2): f"({l1},{l2})" for l1 in g.locations for l2 in g.locations}
    trip_name = {
        (l1, l2, si): f"({l1},{l2},{si})"
        for l1 in g.locations
        for l2 in g.locations
        for si in g.inputs
    }
    names = list(pair_name.values()) + list(trip_name.values())
    if len(set(names)) != len(names):
        raise DomainError("location names collide when forming product state names")

    owner = {n: 1 for n in pair_name.values()}
    owner.update({n: 2 for n in trip_name.values()})

    delta: dict[tuple[str, str], Distribution] = {}
    for (l1, l2), pname in pair_name.items():
        for si in g.inputs:
            delta[(pname, si)] = Distribution.dirac(trip_name[(l1, l2, si)])
    for (l1, l2, si), tname in trip_name.items():
        for so in g.outputs:
            row: dict[str, object] = {}
            for succ1, w1 in g.transition_dist(l1, si, so).items():
                if w1 == 0:
                    continue
                for succ2, w2 in g.un_dist(succ1).items():
                    if w2 == 0:
                        continue
                    row[pair_name[(succ1, succ2)]] = w1 * w2
            delta[(tname, so)] = Distribution(row)

    obs1 = []
    for l2 in g.locations:
        block = [pair_name[(l1, l2)] for l1 in g.locations]
        block += [trip_name[(l1, l2, si)] for l1 in g.locations for si in g.inputs]
        obs1.append(tuple(block))

    if mode == MODE_ALL_POWERFUL:
        obs2 = [(n,) for n in names]
    else:
        obs2 = []
        for l1 in g.locations:
            block = [pair_name[(l1, l2)] for l2 in g.locations]
            block += [trip_name[(l1, l2, si)] for l2 in g.locations for si in g.inputs]
            obs2.append(tuple(block))

    initial = Distribution(
        {pair_name[(g.initial, l2)]: w for l2, w in g.un_dist(g.initial).items() if w > 0}
    )

    pog = PartialObsGame(
        states=names,
        owner=owner,
        actions1=g.inputs,
        actions2=g.outputs,
        delta=delta,
        obs1=obs1,
        obs2=obs2,
        initial=initial,
    )

    objective_h = None
    if objective is not None:
        by_first: dict[str, list[str]] = {loc: [] for loc in g.locations}
        for name, comp in pair_name.items():
            by_first[name[0]].append(comp)
        for name, comp in trip_name.items():
            by_first[name[0]].append(comp)
        objective_h = objective.relabel(lambda loc: by_first[loc])

    return ReducedGame(g, pog, mode, objective, objective_h, pair_name, trip_name)


def project_prefix(reduced: ReducedGame, rho_h: PrefixH, which: str) -> PrefixG:
    """Componentwise projection of a product history ending in a Player 1 state."""
    if which not in ("first", "second"):
        raise DomainError(f"projection must be 'first' or 'second', got {which!r}")
    idx = 0 if which == "first" else 1
    start, rounds = rho_h.destutter()  # raises on prefixes ending mid-turn
    locs = [reduced.provenance[start][idx]]
    ins, outs = [], []
    for si, so, state in rounds:
        ins.append(si)
        outs.append(so)
        locs.append(reduced.provenance[state][idx])
    return PrefixG(tuple(locs), tuple(ins), tuple(outs))


def pair_prefix(reduced: ReducedGame, rho1: PrefixG, rho2: PrefixG) -> PrefixH:
    """Zip a true history and an observed history into one product history."""
    if not rho1.action_matches(rho2):
        raise DomainError("prefixes must have equal length and matching letters")
    states = [reduced.pair_name[(rho1.locs[0], rho2.locs[0])]]
    acts: list[str] = []
    for j in range(rho1.steps):
        si, so = rho1.ins[j], rho1.outs[j]
        acts.append(si)
        states.append(reduced.trip_name[(rho1.locs[j], rho2.locs[j], si)])
        acts.append(so)
        states.append(reduced.pair_name[(rho1.locs[j + 1], rho2.locs[j + 1])])
    return PrefixH(tuple(states), tuple(acts))


def _alpha_key_to_observed_prefix(reduced: ReducedGame, key: tuple) -> PrefixG:
    # Key shape: blk(l'_0) i_0 blk(l'_0) o_0 blk(l'_1) i_1 ... blk(l'_k),
    # four entries per finished round. The duplicated triple blocks carry
    # nothing new (the sensor report does not change mid-round).
    locs = tuple(reduced._loc_of_block[key[j]] for j in range(0, len(key), 4))
    ins = tuple(key[j] for j in range(1, len(key), 4))
    outs = tuple(key[j] for j in range(3, len(key), 4))
    return PrefixG(locs, ins, outs)


def _observed_prefix_to_alpha_key(reduced: ReducedGame, rho2: PrefixG) -> tuple:
    key: list = []
    for j, loc in enumerate(rho2.locs):
        b = reduced._block_of_loc[loc]
        if j < rho2.steps:
            key.extend((b, rho2.ins[j], b, rho2.outs[j]))
        else:
            key.append(b)
    return tuple(key)


def _beta_key_to_true_prefix(reduced: ReducedGame, key: tuple) -> tuple[PrefixG, str]:
    # Standard mode: blk(l_0) i_0 blk(l_0) o_0 ... blk(l_k) i_k blk(l_k);
    # the history ends at a triple, so the pending input letter rides along.
    locs = tuple(reduced._loc_of_block[key[j]] for j in range(0, len(key), 4))
    ins = tuple(key[j] for j in range(1, len(key), 4))
    outs = tuple(key[j] for j in range(3, len(key), 4))
    return PrefixG(locs, ins[:-1], outs), ins[-1]


def _true_prefix_to_beta_key(reduced: ReducedGame, rho1: PrefixG, pending: str) -> tuple:
    key: list = []
    for j, loc in enumerate(rho1.locs):
        b = reduced._block_of_loc[loc]
        if j < rho1.steps:
            key.extend((b, rho1.ins[j], b, rho1.outs[j]))
        else:
            key.extend((b, pending, b))
    return tuple(key)


def _ap_key_to_prefixes(reduced: ReducedGame, key: tuple) -> tuple[PrefixG, PrefixG, str]:
    # All-powerful mode has singleton Player 2 blocks, so the key is the raw
    # product history (as block indices) ending at a triple state.
    states = [reduced.pog.states[key[j]] for j in range(0, len(key), 2)]
    acts = [key[j] for j in range(1, len(key), 2)]
    trip = reduced.provenance[states[-1]]
    rho_h = PrefixH(tuple(states[:-1]), tuple(acts[:-1]))
    rho1 = project_prefix(reduced, rho_h, "first")
    rho2 = project_prefix(reduced, rho_h, "second")
    return rho1, rho2, trip[2]


def _prefixes_to_ap_key(reduced: ReducedGame, rho1: PrefixG, rho2: PrefixG, pending: str) -> tuple:
    rho_h = pair_prefix(reduced, rho1, rho2)
    trip = reduced.trip_name[(rho1.last, rho2.last, pending)]
    idx = reduced.pog.state_index
    key: list = []
    for j, s in enumerate(rho_h.states):
        key.append(idx[s])
        if j < len(rho_h.acts):
            key.append(rho_h.acts[j])
    key.extend((pending, idx[trip]))
    return tuple(key)


def map_strategies_g_to_h(
    reduced: ReducedGame, alpha_g: StrategyG1, beta_g: StrategyG2
) -> tuple[ObsBasedStrategy, ObsBasedStrategy]:
    """Transport noisy-game strategies onto the product game.

    Player 1's rows are read off the second-component projection, Player
    2's off the first (plus the observed side in all-powerful mode). The
    results are observation-based by construction: their rows are keyed by
    observation sequences, which the projections determine exactly.
    """
    if reduced.mode == MODE_ALL_POWERFUL and beta_g.variant != ALL_POWERFUL:
        raise DomainError("the all-powerful reduction transports all-powerful Player 2 strategies")
    if reduced.mode == MODE_STANDARD and beta_g.variant == ALL_POWERFUL:
        raise DomainError("the standard reduction transports ordinary Player 2 strategies")

    def alpha_rule(key: tuple) -> Distribution:
        return alpha_g.dist(_alpha_key_to_observed_prefix(reduced, key))

    alpha_h = ObsBasedStrategy(player=1, depth=2 * alpha_g.depth - 1, rule=alpha_rule)

    if reduced.mode == MODE_STANDARD:

        def beta_rule(key: tuple) -> Distribution:
            rho1, pending = _beta_key_to_true_prefix(reduced, key)
            return beta_g.dist(rho1, pending)

    else:

        def beta_rule(key: tuple) -> Distribution:
            rho1, rho2, pending = _ap_key_to_prefixes(reduced, key)
            return beta_g.dist(rho1, pending, rho2)

    beta_h = ObsBasedStrategy(player=2, depth=2 * beta_g.depth, rule=beta_rule)
    return alpha_h, beta_h


def map_strategies_h_to_g(
    reduced: ReducedGame,
    alpha_h: ObsBasedStrategy | Mapping[PrefixH, object],
    beta_h: ObsBasedStrategy | Mapping[PrefixH, object],
) -> tuple[StrategyG1, StrategyG2]:
    """Pull observation-based product strategies back to the noisy game.

    Because rows are keyed by observation sequences, the value on a
    product history depends only on its projection, so the pullback can
    evaluate the key directly; no representative of the (exponentially
    large) matching-history classes is ever enumerated. Prefix-keyed
    tables are accepted and converted first, which rejects
    observation-inconsistent input with a witness pair.
    """
    if not isinstance(alpha_h, ObsBasedStrategy):
        depth = max((len(p) for p in alpha_h), default=1)
        alpha_h = ObsBasedStrategy.from_prefix_table(reduced.pog, 1, alpha_h, depth)
    if not isinstance(beta_h, ObsBasedStrategy):
        depth = max((len(p) for p in beta_h), default=1)
        beta_h = ObsBasedStrategy.from_prefix_table(reduced.pog, 2, beta_h, depth)

    def alpha_rule(rho2: PrefixG) -> Distribution:
        return alpha_h.dist_for_key(_observed_prefix_to_alpha_key(reduced, rho2))

    alpha_g = StrategyG1(depth=(alpha_h.depth + 1) // 2, rule=alpha_rule)

    if reduced.mode == MODE_STANDARD:

        def beta_rule(rho1: PrefixG, pending: str) -> Distribution:
            return beta_h.dist_for_key(_true_prefix_to_beta_key(reduced, rho1, pending))

        beta_g = StrategyG2(ORDINARY, max(beta_h.depth // 2, 1), rule=beta_rule)
    else:

        def beta_rule(rho1: PrefixG, rho2: PrefixG, pending: str) -> Distribution:
            return beta_h.dist_for_key(_prefixes_to_ap_key(reduced, rho1, rho2, pending))

        beta_g = StrategyG2(ALL_POWERFUL, max(beta_h.depth // 2, 1), rule=beta_rule)
    return alpha_g, beta_g
