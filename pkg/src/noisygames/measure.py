"""Exact cone measure for games with a noisy sensor.

The probability of a finite true history must account for every observed
history Player 1 might have seen alongside it, because Player 1's strategy
reads only the observed side. The engine therefore sweeps level by level
over *threads*: pairs of (true prefix, observed prefix) carrying the joint
weight of "the game went here and the sensor reported that". Summing a
true prefix's threads gives its cone probability; the same sweep yields
level masses, event probabilities, and every quantity the verification
harness compares against.

Each step of a thread multiplies in, exactly in the order the play
unfolds: Player 1's input drawn from the observed prefix, Player 2's
output drawn from the true prefix (plus the observed one for all-powerful
adversaries), the successor location from ``delta``, and the sensor's
report on that successor from ``un``. This matches the sampler in
:mod:`noisygames.simulate` draw for draw, so Monte-Carlo frequencies
converge to these exact values.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from typing import Callable, Iterator

from .core import (
    ALL_POWERFUL,
    Distribution,
    DomainError,
    PrefixG,
    StrategyG1,
    StrategyG2,
    UncertaintyGame,
)

__all__ = [
    "obs_seq",
    "enumerate_act_mt",
    "cone_prob",
    "event_prob_at_depth",
    "ConeMeasure",
]

ZERO = Fraction(0)
ONE = Fraction(1)


def obs_seq(g: UncertaintyGame, rho: PrefixG, rho_prime: PrefixG) -> Fraction:
    """Probability that the sensor reports ``rho_prime`` when the truth is ``rho``.

    Zero whenever the two prefixes differ in length or in any action
    letter; otherwise the product of ``un(l_j)(l'_j)`` over all positions.
    """
    if rho.locs[0] != g.initial:
        raise DomainError(f"prefix must start at the initial location {g.initial!r}")
    if not rho.action_matches(rho_prime):
        return ZERO
    value = ONE
    for true_loc, obs_loc in zip(rho.locs, rho_prime.locs):
        w = g.un_dist(true_loc)[obs_loc]
        if w == 0:
            return ZERO
        value *= w
    return value


def enumerate_act_mt(g: UncertaintyGame, rho: PrefixG) -> Iterator[PrefixG]:
    """All ``|L| ** len(rho)`` prefixes sharing ``rho``'s letters, lazily."""
    for locs in product(g.locations, repeat=len(rho.locs)):
        yield PrefixG(locs, rho.ins, rho.outs)


class ConeMeasure:
    """Memoized measure context for one ``(game, alpha, beta)`` triple.

    Level ``n`` holds, for every positive-probability true prefix with
    ``n`` rounds played, a table of observed-location tuples to joint
    weights. Levels are extended on demand and kept, so repeated queries
    (conservation sweeps, event sums, lemma checks) share the work.
    """

    def __init__(self, g: UncertaintyGame, alpha: StrategyG1, beta: StrategyG2):
        self.game = g
        self.alpha = alpha
        self.beta = beta
        start = PrefixG.start(g.initial)
        threads = {
            (obs,): w for obs, w in g.un_dist(g.initial).items() if w > 0
        }
        self._levels: list[dict[PrefixG, dict[tuple, Fraction]]] = [{start: threads}]

    def _advance(self) -> None:
        g = self.game
        ap = self.beta.variant == ALL_POWERFUL
        nxt: dict[PrefixG, dict[tuple, Fraction]] = {}
        for true_prefix, threads in self._levels[-1].items():
            last = true_prefix.last
            beta_rows: dict[str, Distribution] = {}
            for obs_locs, weight in threads.items():
                observed = PrefixG(obs_locs, true_prefix.ins, true_prefix.outs)
                for si, a_w in self.alpha.dist(observed).items():
                    if a_w == 0:
                        continue
                    if ap:
                        beta_row = self.beta.dist(true_prefix, si, observed)
                    else:
                        beta_row = beta_rows.get(si)
                        if beta_row is None:
                            beta_row = self.beta.dist(true_prefix, si)
                            beta_rows[si] = beta_row
                    for so, b_w in beta_row.items():
                        if b_w == 0:
                            continue
                        step_w = weight * a_w * b_w
                        for succ, d_w in g.transition_dist(last, si, so).items():
                            if d_w == 0:
                                continue
                            new_true = true_prefix.extend(si, so, succ)
                            bucket = nxt.get(new_true)
                            if bucket is None:
                                bucket = nxt[new_true] = {}
                            base = step_w * d_w
                            for obs_succ, u_w in g.un_dist(succ).items():
                                if u_w == 0:
                                    continue
                                key = obs_locs + (obs_succ,)
                                bucket[key] = bucket.get(key, ZERO) + base * u_w
        self._levels.append(nxt)

    def _level(self, n_steps: int) -> dict[PrefixG, dict[tuple, Fraction]]:
        while len(self._levels) <= n_steps:
            self._advance()
        return self._levels[n_steps]

    def level_cones(self, n_steps: int) -> dict[PrefixG, Fraction]:
        """Cone probability of every positive prefix with ``n_steps`` rounds."""
        return {
            rho: sum(threads.values(), ZERO)
            for rho, threads in self._level(n_steps).items()
        }

    def thread_weights(self, rho: PrefixG) -> dict[tuple, Fraction]:
        """Joint weights of (``rho``, observed) pairs, keyed by observed locations."""
        self._check_prefix(rho)
        return dict(self._level(rho.steps).get(rho, {}))

    def cone_prob(self, rho: PrefixG) -> Fraction:
        self._check_prefix(rho)
        threads = self._level(rho.steps).get(rho)
        if not threads:
            return ZERO
        return sum(threads.values(), ZERO)

    def event_prob_at_depth(self, predicate: Callable[[PrefixG], bool], n_steps: int) -> Fraction:
        """Total mass of depth-``n_steps`` prefixes satisfying ``predicate``."""
        if n_steps < 0:
            raise DomainError("depth must be nonnegative")
        self._check_depth(n_steps + 1)
        total = ZERO
        for rho, threads in self._level(n_steps).items():
            if predicate(rho):
                total += sum(threads.values(), ZERO)
        return total

    def _check_prefix(self, rho: PrefixG) -> None:
        g = self.game
        if rho.locs[0] != g.initial:
            raise DomainError(f"prefix must start at the initial location {g.initial!r}")
        for name in rho.locs:
            if name not in g.loc_index:
                raise DomainError(f"unknown location {name!r} in prefix")
        for letter in rho.ins:
            if letter not in g.inputs:
                raise DomainError(f"letter {letter!r} not in the input alphabet")
        for letter in rho.outs:
            if letter not in g.outputs:
                raise DomainError(f"letter {letter!r} not in the output alphabet")
        self._check_depth(len(rho))

    def _check_depth(self, needed: int) -> None:
        if self.alpha.depth < needed:
            raise DomainError(
                f"Player 1 strategy depth {self.alpha.depth} is below the prefix length {needed}"
            )
        if self.beta.depth < needed:
            raise DomainError(
                f"Player 2 strategy depth {self.beta.depth} is below the prefix length {needed}"
            )


def cone_prob(g: UncertaintyGame, alpha: StrategyG1, beta: StrategyG2, rho: PrefixG) -> Fraction:
    """Probability of the cone of ``rho``.

    One-shot convenience wrapper; build a :class:`ConeMeasure` once when
    querying many prefixes of the same strategy pair.
    """
    return ConeMeasure(g, alpha, beta).cone_prob(rho)


def event_prob_at_depth(
    g: UncertaintyGame,
    alpha: StrategyG1,
    beta: StrategyG2,
    predicate: Callable[[PrefixG], bool],
    n_steps: int,
) -> Fraction:
    """Mass of the depth-``n_steps`` prefixes satisfying ``predicate``."""
    return ConeMeasure(g, alpha, beta).event_prob_at_depth(predicate, n_steps)
