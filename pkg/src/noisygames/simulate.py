"""Seeded random instances, play sampling and reduction mutations.

Everything here is deterministic in its seed. Child generators are
derived with a keyed hash rather than by drawing from the parent, so
adding one more draw somewhere does not reshuffle every instance after
it. Strategy rules get their own child generator per row key for the
same reason.
"""

from __future__ import annotations

import hashlib
import math
import random
import string
from dataclasses import dataclass
from fractions import Fraction

from .core import (
    ALL_POWERFUL,
    DomainError,
    Objective,
    ORDINARY,
    PrefixG,
    StrategyG1,
    StrategyG2,
    UncertaintyGame,
)
from .pog import ObsBasedStrategy, PartialObsGame, Pomdp
from .reduce_forward import MODE_ALL_POWERFUL, MODE_STANDARD, ReducedGame
from .reduce_pomdp import reduce_pomdp

__all__ = [
    "SampleTrace",
    "MonteCarloEstimate",
    "LemmaInstance",
    "MUTATIONS",
    "child_seed",
    "sample_play",
    "monte_carlo_cone",
    "random_game",
    "random_strategy1",
    "random_strategy2",
    "random_pomdp",
    "random_pog_strategy",
    "random_instance",
    "mutate_reduction",
]


def child_seed(seed: int, tag: str) -> int:
    digest = hashlib.blake2b(f"{seed}:{tag}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big")


# --------------------------------------------------------------------------
# Sampling plays of a noisy-sensor game


@dataclass(frozen=True)
class SampleTrace:
    """One sampled play: the true thread, the sensor thread, the letters."""

    seed: int
    true: PrefixG
    observed: PrefixG
    actions: tuple[tuple[str, str], ...]


def sample_play(
    g: UncertaintyGame,
    alpha: StrategyG1,
    beta: StrategyG2,
    rounds: int,
    seed: int,
) -> SampleTrace:
    """Draw one play of ``rounds`` rounds under the given strategies.

    Player 1 reads the sensor thread, which already garbles the initial
    location; the adversary reads the true thread (plus the sensor
    thread when all-powerful). Each successor is garbled independently.
    """
    rng = random.Random(seed)
    true = PrefixG.start(g.initial)
    observed = PrefixG.start(g.un_dist(g.initial).sample(rng))
    actions: list[tuple[str, str]] = []
    for _ in range(rounds):
        si = alpha.dist(observed).sample(rng)
        so = beta.dist(true, si, observed=observed).sample(rng)
        succ = g.transition_dist(true.last, si, so).sample(rng)
        seen = g.un_dist(succ).sample(rng)
        true = true.extend(si, so, succ)
        observed = observed.extend(si, so, seen)
        actions.append((si, so))
    return SampleTrace(seed=seed, true=true, observed=observed, actions=tuple(actions))


@dataclass(frozen=True)
class MonteCarloEstimate:
    mean: float
    stderr: float
    hits: int
    samples: int


def monte_carlo_cone(
    g: UncertaintyGame,
    alpha: StrategyG1,
    beta: StrategyG2,
    rho: PrefixG,
    samples: int,
    seed: int,
) -> MonteCarloEstimate:
    """Estimate the cone probability of ``rho`` by sampling whole plays.

    A sample counts as a hit when its true thread equals ``rho``, letters
    included. The standard error uses the plug-in binomial formula, so it
    degenerates to zero on all-hit or no-hit runs.
    """
    if rho.locs[0] != g.initial:
        raise DomainError(f"prefix starts at {rho.locs[0]!r}, the game at {g.initial!r}")
    if samples < 1:
        raise DomainError("need at least one sample")
    hits = 0
    for k in range(samples):
        trace = sample_play(g, alpha, beta, rho.steps, child_seed(seed, str(k)))
        if trace.true == rho:
            hits += 1
    mean = hits / samples
    stderr = math.sqrt(mean * (1.0 - mean) / samples)
    return MonteCarloEstimate(mean=mean, stderr=stderr, hits=hits, samples=samples)


# --------------------------------------------------------------------------
# Random instances


def _random_dist(rng: random.Random, points) -> dict[str, Fraction]:
    """A random rational distribution over a nonempty subset of ``points``."""
    points = list(points)
    k = rng.randint(1, len(points))
    support = rng.sample(points, k)
    if k == 1:
        return {support[0]: Fraction(1)}
    den = rng.randint(k, 8)
    cuts = sorted(rng.sample(range(1, den), k - 1))
    bounds = [0] + cuts + [den]
    return {
        point: Fraction(bounds[j + 1] - bounds[j], den)
        for j, point in enumerate(support)
    }


def _sized_dist(rng: random.Random, points, size: int) -> dict[str, Fraction]:
    points = list(points)
    support = rng.sample(points, min(size, len(points)))
    if len(support) == 1:
        return {support[0]: Fraction(1)}
    den = rng.randint(len(support), 8)
    cuts = sorted(rng.sample(range(1, den), len(support) - 1))
    bounds = [0] + cuts + [den]
    return {
        point: Fraction(bounds[j + 1] - bounds[j], den)
        for j, point in enumerate(support)
    }


def random_game(
    seed: int,
    n_locations: int = 3,
    n_inputs: int = 2,
    n_outputs: int = 2,
) -> UncertaintyGame:
    """A random game with exact rational transition and sensor rows.

    Sensor rows are biased toward small supports (40% singleton, 40%
    two locations, 20% three) so that sharp and blurry readings both
    show up across a batch.
    """
    rng = random.Random(seed)
    locations = tuple(f"l{i}" for i in range(n_locations))
    inputs = tuple(string.ascii_lowercase[:n_inputs])
    outputs = tuple(string.ascii_lowercase[20 : 20 + n_outputs])
    delta = {}
    for loc in locations:
        for si in inputs:
            for so in outputs:
                size = rng.randint(1, min(3, n_locations))
                delta[(loc, si, so)] = _sized_dist(rng, locations, size)
    un = {}
    for loc in locations:
        r = rng.random()
        size = 1 if r < 0.4 else 2 if r < 0.8 else 3
        un[loc] = _sized_dist(rng, locations, min(size, n_locations))
    return UncertaintyGame(
        locations=locations,
        inputs=inputs,
        outputs=outputs,
        initial=locations[0],
        delta=delta,
        un=un,
    )


def random_strategy1(g: UncertaintyGame, depth: int, seed: int) -> StrategyG1:
    def rule(prefix: PrefixG):
        rng = random.Random(child_seed(seed, f"1|{prefix}"))
        return _random_dist(rng, g.inputs)

    return StrategyG1(depth=depth, rule=rule)


def random_strategy2(
    g: UncertaintyGame, depth: int, seed: int, variant: str = ORDINARY
) -> StrategyG2:
    def rule(*key):
        tag = " / ".join(str(part) for part in key)
        rng = random.Random(child_seed(seed, f"2|{tag}"))
        return _random_dist(rng, g.outputs)

    return StrategyG2(variant, depth, rule=rule)


def random_pomdp(seed: int, n_states: int = 3, n_actions: int = 2) -> Pomdp:
    """A random decision process with a random observation partition."""
    rng = random.Random(seed)
    states = tuple(f"s{i}" for i in range(n_states))
    actions = tuple(string.ascii_lowercase[:n_actions])
    delta = {}
    for s in states:
        for a in actions:
            size = rng.randint(1, min(3, n_states))
            delta[(s, a)] = _sized_dist(rng, states, size)
    shuffled = list(states)
    rng.shuffle(shuffled)
    blocks = []
    while shuffled:
        size = min(len(shuffled), rng.choice((1, 1, 2, 2, 3)))
        block, shuffled = shuffled[:size], shuffled[size:]
        blocks.append(tuple(sorted(block, key=states.index)))
    blocks.sort(key=lambda b: states.index(b[0]))
    return Pomdp(
        states=states,
        actions=actions,
        delta=delta,
        obs=blocks,
        initial=rng.choice(states),
    )


def random_pog_strategy(model, player: int, depth: int, seed: int) -> ObsBasedStrategy:
    """A random observation-based strategy for a game state space or a POMDP."""
    if isinstance(model, Pomdp):
        acts = model.actions
    elif player == 1:
        acts = model.actions1
    else:
        acts = model.actions2

    def rule(key: tuple):
        rng = random.Random(child_seed(seed, f"{player}|{key}"))
        return _random_dist(rng, acts)

    return ObsBasedStrategy(player, depth, rule=rule)


@dataclass(frozen=True)
class LemmaInstance:
    """One seeded bundle: a game with strategies plus a POMDP with its own.

    The game strategies have depth 5 (four rounds) and the decision
    process strategy depth 9, enough for every shipped check at round
    depth up to three. ``alpha_pg`` lives on the game obtained by turning
    ``pomdp`` into a noisy-sensor game and is kept separate from
    ``alpha`` because the two games have different alphabets.
    """

    seed: int
    game: UncertaintyGame
    alpha: StrategyG1
    beta: StrategyG2
    mode: str
    pomdp: Pomdp
    alpha_pg: StrategyG1
    alpha_m: ObsBasedStrategy
    description: str


def random_instance(seed: int) -> LemmaInstance:
    rng = random.Random(seed)
    n_loc = rng.randint(2, 3)
    mode = rng.choice((MODE_STANDARD, MODE_ALL_POWERFUL))
    n_states = rng.randint(2, 4)
    game = random_game(child_seed(seed, "game"), n_locations=n_loc)
    alpha = random_strategy1(game, 5, child_seed(seed, "alpha"))
    beta = random_strategy2(
        game,
        5,
        child_seed(seed, "beta"),
        variant=ORDINARY if mode == MODE_STANDARD else ALL_POWERFUL,
    )
    pomdp = random_pomdp(child_seed(seed, "pomdp"), n_states=n_states)
    alpha_pg = random_strategy1(reduce_pomdp(pomdp).game, 5, child_seed(seed, "alpha_pg"))
    alpha_m = random_pog_strategy(pomdp, 1, 9, child_seed(seed, "alpha_m"))
    return LemmaInstance(
        seed=seed,
        game=game,
        alpha=alpha,
        beta=beta,
        mode=mode,
        pomdp=pomdp,
        alpha_pg=alpha_pg,
        alpha_m=alpha_m,
        description=(
            f"seed {seed}: {n_loc}-location game, {mode} adversary, "
            f"{n_states}-state decision process"
        ),
    )


# --------------------------------------------------------------------------
# Reduction mutations
#
# Deliberately broken variants of the forward construction, used to show
# the checks have teeth: each one is caught by some shipped checker at
# round depth two or less.

MUTATIONS = ("drop-un", "swap-obs", "break-priority")


def mutate_reduction(red: ReducedGame, kind: str) -> ReducedGame:
    """Return a copy of ``red`` broken in one specific way.

    drop-un Player 2 rows pretend the sensor reports the truth:
        each successor pair lands on the diagonal with the raw
        transition weight, as if the chosen location were observed
        exactly.
    swap-obs Player 1's observation classes group product states
        by their true component instead of the observed one, leaking
        the actual location.
    break-priority the objective is carried over through the observed
        component instead of the true one.
    """
    h = red.pog
    if kind == "drop-un":
        trip_key = {name: key for key, name in red.trip_name.items()}
        delta = {}
        for (s, act), row in h.delta.items():
            if s in trip_key:
                l1, _, si = trip_key[s]
                moved = red.game.transition_dist(l1, si, act)
                delta[(s, act)] = {
                    red.pair_name[(succ, succ)]: w for succ, w in moved.items()
                }
            else:
                delta[(s, act)] = row
        mutated = PartialObsGame(
            states=h.states,
            owner=h.owner,
            actions1=h.actions1,
            actions2=h.actions2,
            delta=delta,
            obs1=h.obs1,
            obs2=h.obs2,
            initial=h.initial,
        )
        return ReducedGame(
            game=red.game,
            pog=mutated,
            mode=red.mode,
            objective=red.objective,
            objective_h=red.objective_h,
            pair_name=red.pair_name,
            trip_name=red.trip_name,
        )
    if kind == "swap-obs":
        obs1 = []
        for l1 in red.game.locations:
            block = [
                name for (a, b), name in red.pair_name.items() if a == l1
            ] + [name for (a, b, si), name in red.trip_name.items() if a == l1]
            obs1.append(tuple(block))
        mutated = PartialObsGame(
            states=h.states,
            owner=h.owner,
            actions1=h.actions1,
            actions2=h.actions2,
            delta=h.delta,
            obs1=obs1,
            obs2=h.obs2,
            initial=h.initial,
        )
        return ReducedGame(
            game=red.game,
            pog=mutated,
            mode=red.mode,
            objective=red.objective,
            objective_h=red.objective_h,
            pair_name=red.pair_name,
            trip_name=red.trip_name,
        )
    if kind == "break-priority":
        if red.objective is None:
            raise DomainError("mutation 'break-priority' needs a reduction built with an objective")
        by_second: dict[str, list[str]] = {}
        for (a, b), name in red.pair_name.items():
            by_second.setdefault(b, []).append(name)
        for (a, b, si), name in red.trip_name.items():
            by_second.setdefault(b, []).append(name)
        twisted = red.objective.relabel(lambda loc: by_second.get(loc, ()))
        return ReducedGame(
            game=red.game,
            pog=h,
            mode=red.mode,
            objective=red.objective,
            objective_h=twisted,
            pair_name=red.pair_name,
            trip_name=red.trip_name,
        )
    raise DomainError(f"unknown mutation {kind!r}; pick one of {', '.join(MUTATIONS)}")
