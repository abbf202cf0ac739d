"""Alternating partial-observation stochastic games and POMDPs.

These are the classical models: states are split between the players,
transitions alternate, and each player sees states only through an
observation partition. The cone measure here is the ordinary product
measure. POMDPs are the one-player special case (Player 2's action set
is a singleton) and can be embedded as games via :meth:`Pomdp.as_pog`.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any, Callable, Iterable, Mapping, Sequence

from .core import Distribution, DomainError, ValidationReport

__all__ = [
    "POMDP_ACTION2",
    "PartialObsGame",
    "Pomdp",
    "PrefixH",
    "ObsBasedStrategy",
    "validate_pog",
    "cone_prob_pog",
    "cone_prob_pomdp",
    "observation_seq",
]

ZERO = Fraction(0)

# The single output letter of an embedded POMDP: Player 2 has nothing to say.
POMDP_ACTION2 = "⊥"


def _coerce_dist(value: Any) -> Distribution:
    return value if isinstance(value, Distribution) else Distribution(value)


def _block_map(partition: Sequence[Sequence[str]]) -> dict[str, int]:
    out: dict[str, int] = {}
    for i, block in enumerate(partition):
        for s in block:
            if s in out:
                # Recorded here so lookups stay usable; validate_pog reports it.
                continue
            out[s] = i
    return out


class PartialObsGame:
    """Two-player alternating stochastic game with observation partitions.

    ``owner`` assigns each state to the player who moves there. ``delta``
    maps ``(state, action)`` to a successor distribution; rows of Player 1
    states use ``actions1`` and land on Player 2 states, and vice versa.
    ``obs1``/``obs2`` partition the whole state space. ``initial`` is a
    distribution over Player 1 states (a single known start is a Dirac).
    """

    def __init__(
        self,
        states: Sequence[str],
        owner: Mapping[str, int],
        actions1: Sequence[str],
        actions2: Sequence[str],
        delta: Mapping[tuple[str, str], Any],
        obs1: Sequence[Sequence[str]],
        obs2: Sequence[Sequence[str]],
        initial: Any,
    ):
        self.states = tuple(states)
        self.owner = dict(owner)
        self.actions1 = tuple(actions1)
        self.actions2 = tuple(actions2)
        self.delta = {k: _coerce_dist(v) for k, v in delta.items()}
        self.obs1 = tuple(tuple(b) for b in obs1)
        self.obs2 = tuple(tuple(b) for b in obs2)
        self.initial = _coerce_dist(initial)
        self.state_index = {s: i for i, s in enumerate(self.states)}
        self._block1 = _block_map(self.obs1)
        self._block2 = _block_map(self.obs2)

    @property
    def states1(self) -> tuple[str, ...]:
        return tuple(s for s in self.states if self.owner.get(s) == 1)

    @property
    def states2(self) -> tuple[str, ...]:
        return tuple(s for s in self.states if self.owner.get(s) == 2)

    def actions_of(self, state: str) -> tuple[str, ...]:
        return self.actions1 if self.owner[state] == 1 else self.actions2

    def succ(self, state: str, action: str) -> Distribution:
        try:
            return self.delta[(state, action)]
        except KeyError:
            raise DomainError(f"no transition row for ({state!r}, {action!r})") from None

    def obs_block(self, player: int, state: str) -> int:
        blocks = self._block1 if player == 1 else self._block2
        try:
            return blocks[state]
        except KeyError:
            raise DomainError(f"state {state!r} not covered by Player {player}'s partition") from None

    def __repr__(self) -> str:
        return (
            f"PartialObsGame(|S1|={len(self.states1)}, |S2|={len(self.states2)}, "
            f"|A1|={len(self.actions1)}, |A2|={len(self.actions2)})"
        )


class Pomdp:
    """One-player partially observed process with a single known start."""

    def __init__(
        self,
        states: Sequence[str],
        actions: Sequence[str],
        delta: Mapping[tuple[str, str], Any],
        obs: Sequence[Sequence[str]],
        initial: str,
    ):
        self.states = tuple(states)
        self.actions = tuple(actions)
        self.delta = {k: _coerce_dist(v) for k, v in delta.items()}
        self.obs = tuple(tuple(b) for b in obs)
        self.initial = initial
        self.state_index = {s: i for i, s in enumerate(self.states)}
        self._block = _block_map(self.obs)
        self._pog: PartialObsGame | None = None

    POMDP_ACTION2 = POMDP_ACTION2

    def succ(self, state: str, action: str) -> Distribution:
        try:
            return self.delta[(state, action)]
        except KeyError:
            raise DomainError(f"no transition row for ({state!r}, {action!r})") from None

    def obs_block(self, player: int, state: str) -> int:
        if player != 1:
            raise DomainError("a POMDP only has Player 1 observations")
        try:
            return self._block[state]
        except KeyError:
            raise DomainError(f"state {state!r} not covered by the partition") from None

    def mid_name(self, state: str, action: str) -> str:
        return f"{state}·{action}"

    def as_pog(self) -> PartialObsGame:
        """The game view: Player 2 owns fresh intermediate states, one action.

        Intermediate observations are keyed by (source block, action), so
        Player 1 learns nothing it did not already know. The embedding is
        cached.
        """
        if self._pog is not None:
            return self._pog
        mids = [(s, a) for s in self.states for a in self.actions]
        mid_names = {pair: self.mid_name(*pair) for pair in mids}
        if len(set(mid_names.values())) != len(mids) or set(mid_names.values()) & set(self.states):
            raise DomainError("state/action names collide when building intermediate states")
        states = list(self.states) + [mid_names[p] for p in mids]
        owner = {s: 1 for s in self.states}
        owner.update({mid_names[p]: 2 for p in mids})
        delta: dict[tuple[str, str], Distribution] = {}
        for s, a in mids:
            delta[(s, a)] = Distribution.dirac(mid_names[(s, a)])
            delta[(mid_names[(s, a)], self.POMDP_ACTION2)] = self.succ(s, a)
        obs1 = [tuple(b) for b in self.obs]
        for bi, block in enumerate(self.obs):
            for a in self.actions:
                obs1.append(tuple(mid_names[(s, a)] for s in block))
        obs2 = [(s,) for s in states]
        self._pog = PartialObsGame(
            states,
            owner,
            actions1=self.actions,
            actions2=(self.POMDP_ACTION2,),
            delta=delta,
            obs1=obs1,
            obs2=obs2,
            initial=Distribution.dirac(self.initial),
        )
        return self._pog

    def __repr__(self) -> str:
        return f"Pomdp(|S|={len(self.states)}, |A|={len(self.actions)}, initial={self.initial!r})"


class PrefixH:
    """Alternating state/action history ``s0 a0 s1 a1 ... sn``."""

    __slots__ = ("states", "acts")

    def __init__(self, states: Sequence[str], acts: Sequence[str] = ()):
        self.states = tuple(states)
        self.acts = tuple(acts)
        if not self.states:
            raise DomainError("a prefix needs at least its starting state")
        if len(self.states) != len(self.acts) + 1:
            raise DomainError(
                f"malformed prefix: {len(self.states)} states vs {len(self.acts)} actions"
            )

    @classmethod
    def start(cls, state: str) -> "PrefixH":
        return cls((state,))

    @property
    def last(self) -> str:
        return self.states[-1]

    def __len__(self) -> int:
        return len(self.states)

    def extend(self, action: str, state: str) -> "PrefixH":
        return PrefixH(self.states + (state,), self.acts + (action,))

    def up_to(self, n_states: int) -> "PrefixH":
        if not 1 <= n_states <= len(self.states):
            raise DomainError(f"cannot take {n_states} states of a {len(self.states)}-state prefix")
        return PrefixH(self.states[:n_states], self.acts[: n_states - 1])

    def destutter(self) -> tuple[str, tuple[tuple[str, str, str], ...]]:
        """Collapse ``s0 a0 s1 a1 s2 ...`` to ``(s0, ((a0, a1, s2), ...))``.

        Dropping the intermediate Player 2 states does not affect parity
        (their priority merely repeats the round's) and aligns round
        counts with the noisy-game side.
        """
        if len(self.acts) % 2 != 0:
            raise DomainError("prefix ends mid-round; cannot de-stutter")
        rounds = tuple(
            (self.acts[2 * j], self.acts[2 * j + 1], self.states[2 * j + 2])
            for j in range(len(self.acts) // 2)
        )
        return self.states[0], rounds

    def __eq__(self, other: Any) -> bool:
        return (
            isinstance(other, PrefixH)
            and self.states == other.states
            and self.acts == other.acts
        )

    def __hash__(self) -> int:
        return hash((self.states, self.acts))

    def interleaved(self):
        for j, s in enumerate(self.states):
            yield s
            if j < len(self.acts):
                yield self.acts[j]

    def __str__(self) -> str:
        return " ".join(self.interleaved())

    def __repr__(self) -> str:
        return f"PrefixH({self})"


def observation_seq(model: PartialObsGame | Pomdp, player: int, rho: PrefixH) -> tuple:
    """Interleaved (block index, action, block index, ...) as seen by ``player``.

    Both players' sequences keep every played action verbatim; states are
    replaced by the index of their observation block.
    """
    out: list = []
    for j, s in enumerate(rho.states):
        out.append(model.obs_block(player, s))
        if j < len(rho.acts):
            out.append(rho.acts[j])
    return tuple(out)


class ObsBasedStrategy:
    """Strategy keyed by what its player can actually see.

    Rows are stored under observation-action sequences, never raw
    prefixes, so equal-looking histories cannot receive different rows by
    construction. A complete-observation strategy is the special case of
    a singleton-block partition. The optional ``rule`` fills rows lazily
    from the observation key and is memoized.
    """

    def __init__(
        self,
        player: int,
        depth: int,
        rows: Mapping[tuple, Distribution] | None = None,
        rule: Callable[[tuple], Distribution] | None = None,
    ):
        if player not in (1, 2):
            raise DomainError("player must be 1 or 2")
        if depth < 1:
            raise DomainError("strategy depth must be at least 1")
        self.player = player
        self.depth = depth
        self._rows: dict[tuple, Distribution] = dict(rows or {})
        self._rule = rule

    @classmethod
    def from_prefix_table(
        cls,
        model: PartialObsGame | Pomdp,
        player: int,
        rows: Mapping[PrefixH, Any],
        depth: int,
    ) -> "ObsBasedStrategy":
        """Convert prefix-keyed rows, rejecting observation-inconsistent input.

        Two prefixes with the same observation sequence must carry equal
        rows; otherwise the table is not a strategy of this kind, and the
        offending pair is named in the error.
        """
        by_key: dict[tuple, tuple[PrefixH, Distribution]] = {}
        for prefix, row in rows.items():
            row = _coerce_dist(row)
            key = observation_seq(model, player, prefix)
            seen = by_key.get(key)
            if seen is not None and seen[1] != row:
                raise DomainError(
                    "table is not observation-based: prefixes "
                    f"'{seen[0]}' and '{prefix}' share an observation sequence "
                    "but have different rows"
                )
            by_key[key] = (prefix, row)
        return cls(player, depth, {k: v for k, (_, v) in by_key.items()})

    def dist_for_key(self, key: tuple) -> Distribution:
        row = self._rows.get(key)
        if row is None:
            if self._rule is None:
                raise DomainError(f"no strategy row for observation sequence {key!r}")
            row = _coerce_dist(self._rule(key))
            self._rows[key] = row
        return row

    def dist(self, model: PartialObsGame | Pomdp, rho: PrefixH) -> Distribution:
        if len(rho) > self.depth:
            raise DomainError(f"prefix of length {len(rho)} exceeds strategy depth {self.depth}")
        return self.dist_for_key(observation_seq(model, self.player, rho))

    def known_rows(self) -> dict[tuple, Distribution]:
        return dict(self._rows)


def validate_pog(h: PartialObsGame) -> ValidationReport:
    """Structural checks; the report carries every violation found."""
    report = ValidationReport()
    states = set(h.states)
    if len(states) != len(h.states):
        report.add("duplicate state names")
    if not h.actions1:
        report.add("empty action set for Player 1")
    if not h.actions2:
        report.add("empty action set for Player 2")
    s1 = [s for s in h.states if h.owner.get(s) == 1]
    s2 = [s for s in h.states if h.owner.get(s) == 2]
    for s in h.states:
        if h.owner.get(s) not in (1, 2):
            report.add(f"state {s!r} has no owner")
    if set(s1) & set(s2):
        report.add("a state is owned by both players")

    for s in s1:
        for a in h.actions1:
            _check_row(report, h, s, a, expect_owner=2)
    for s in s2:
        for b in h.actions2:
            _check_row(report, h, s, b, expect_owner=1)
    for (s, a) in h.delta:
        if s not in states:
            report.add(f"transition row keyed by unknown state {s!r}")
        elif a not in h.actions_of(s):
            report.add(f"transition row ({s!r}, {a!r}) keyed by the wrong player's action")

    for name, partition in (("obs1", h.obs1), ("obs2", h.obs2)):
        covered: set[str] = set()
        for block in partition:
            for s in block:
                if s in covered:
                    report.add(f"{name} is not a partition: {s!r} appears in two blocks")
                covered.add(s)
                if s not in states:
                    report.add(f"{name} is not a partition of the states: unknown {s!r}")
        missing = states - covered
        for s in sorted(missing):
            report.add(f"{name} is not a partition: {s!r} is uncovered")

    total = h.initial.total()
    if total != 1:
        report.add(f"distribution sum ≠ 1 at initial: sums to {total}")
    for s, w in h.initial.items():
        if s not in states:
            report.add(f"dangling state {s!r} in initial")
        elif w > 0 and h.owner.get(s) != 1:
            report.add(f"initial mass on a non-Player-1 state {s!r}")
    return report


def _check_row(report: ValidationReport, h: PartialObsGame, s: str, a: str, expect_owner: int) -> None:
    row = h.delta.get((s, a))
    if row is None:
        report.add(f"missing transition row for ({s!r}, {a!r})")
        return
    total = row.total()
    if total != 1:
        report.add(f"distribution sum ≠ 1 at δ({s},{a}): sums to {total}")
    for t, w in row.items():
        if w < 0 or w > 1:
            report.add(f"probability out of range at δ({s},{a}): {t!r} -> {w}")
        if t not in h.state_index:
            report.add(f"dangling state {t!r} in δ({s},{a})")
        elif w > 0 and h.owner.get(t) != expect_owner:
            report.add(f"transition does not alternate: δ({s},{a}) reaches {t!r}")


def cone_prob_pog(
    h: PartialObsGame,
    alpha: ObsBasedStrategy,
    beta: ObsBasedStrategy | None,
    rho: PrefixH,
) -> Fraction:
    """Classical product measure of the cone of ``rho``, seeded by ``initial``.

    ``beta`` may be ``None`` only when Player 2 never acts along ``rho``
    (it does act in any alternating play of length > 2, so passing a real
    strategy is the norm).
    """
    first = rho.states[0]
    if h.owner.get(first) != 1:
        raise DomainError(f"prefix must start at a Player 1 state, got {first!r}")
    if len(rho) > alpha.depth or (beta is not None and len(rho) > beta.depth):
        raise DomainError(f"strategies are shallower than the prefix length {len(rho)}")
    value = h.initial[first]
    if value == 0:
        return ZERO
    for j, act in enumerate(rho.acts):
        here = rho.states[j]
        history = rho.up_to(j + 1)
        if h.owner[here] == 1:
            if act not in h.actions1:
                raise DomainError(f"{act!r} is not a Player 1 action")
            row = alpha.dist(h, history)
        else:
            if act not in h.actions2:
                raise DomainError(f"{act!r} is not a Player 2 action")
            if beta is None:
                raise DomainError("Player 2 acts on this prefix but no strategy was given")
            row = beta.dist(h, history)
        value *= row[act] * h.succ(here, act)[rho.states[j + 1]]
        if value == 0:
            return ZERO
    return value


def cone_prob_pomdp(m: Pomdp, alpha: ObsBasedStrategy, rho: PrefixH) -> Fraction:
    """Cone measure in a POMDP: like the game case but with one decider."""
    if rho.states[0] != m.initial:
        raise DomainError(f"prefix must start at the initial state {m.initial!r}")
    if len(rho) > alpha.depth:
        raise DomainError(f"strategy depth {alpha.depth} is below the prefix length {len(rho)}")
    value = Fraction(1)
    for j, act in enumerate(rho.acts):
        if act not in m.actions:
            raise DomainError(f"unknown action {act!r}")
        row = alpha.dist(m, rho.up_to(j + 1))
        value *= row[act] * m.succ(rho.states[j], act)[rho.states[j + 1]]
        if value == 0:
            return ZERO
    return value
