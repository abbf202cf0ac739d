"""Core types for two-player stochastic games with a noisy state sensor.

Player 1 steers the game through input letters but never sees the true
location: each step it receives a location drawn from a per-location noise
distribution ``un`` over the truth. Player 2 replies with output letters
and sees the true history (in the all-powerful variant, Player 1's
observed history as well). Probabilities are ``fractions.Fraction``
throughout; floating point is confined to the Monte-Carlo helpers in
:mod:`noisygames.simulate`.
"""

from __future__ import annotations

import itertools
import os
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Any, Callable, Iterable, Iterator, Mapping, Sequence

__all__ = [
    "DomainError",
    "DepthExceededError",
    "Distribution",
    "UncertaintyGame",
    "PrefixG",
    "StrategyG1",
    "StrategyG2",
    "ORDINARY",
    "ALL_POWERFUL",
    "Objective",
    "ValidationReport",
    "validate_game",
    "transition_dist",
    "eval_parity_on_lasso",
    "eval_objective_on_lasso",
    "parity_form",
    "parity_form_lasso",
    "enum_budget",
]

ORDINARY = "ordinary"
ALL_POWERFUL = "all-powerful"

DEFAULT_ENUM_BUDGET = 10**6


def enum_budget() -> int:
    """Cap on exhaustive enumerations, overridable via UG_MAX_ENUM."""
    raw = os.environ.get("UG_MAX_ENUM")
    if raw is None:
        return DEFAULT_ENUM_BUDGET
    try:
        value = int(raw)
    except ValueError as exc:
        raise DomainError(f"UG_MAX_ENUM must be an integer, got {raw!r}") from exc
    if value <= 0:
        raise DomainError(f"UG_MAX_ENUM must be positive, got {value}")
    return value


class DomainError(ValueError):
    """An operation was queried outside its declared domain."""


class DepthExceededError(DomainError):
    """A strategy table was consulted beyond its declared depth."""


def _as_fraction(value: Any) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"probability must be Fraction, int or 'num/den' string, got {value!r}")


class Distribution:
    """A finitely supported distribution with exact rational weights.

    The container itself is permissive: it stores whatever weights it is
    given, so that :func:`validate_game` can report bad rows instead of
    the constructor exploding. Well-formedness (weights in [0,1], total
    exactly 1) is the caller's contract, checked via :meth:`is_valid`.
    Treat instances as immutable after construction.
    """

    __slots__ = ("_entries", "_cum")

    def __init__(self, entries: Mapping[Any, Any] | Iterable[tuple[Any, Any]]):
        items = entries.items() if isinstance(entries, Mapping) else entries
        self._entries: dict[Any, Fraction] = {k: _as_fraction(v) for k, v in items}
        self._cum: tuple | None = None  # lazy sampling table

    @classmethod
    def dirac(cls, point: Any) -> "Distribution":
        return cls({point: Fraction(1)})

    @classmethod
    def uniform(cls, points: Iterable[Any]) -> "Distribution":
        pts = list(points)
        if not pts:
            raise DomainError("uniform distribution over an empty set")
        w = Fraction(1, len(pts))
        return cls({p: w for p in pts})

    def __getitem__(self, point: Any) -> Fraction:
        return self._entries.get(point, Fraction(0))

    def __contains__(self, point: Any) -> bool:
        return self._entries.get(point, Fraction(0)) > 0

    def items(self) -> Iterator[tuple[Any, Fraction]]:
        return iter(self._entries.items())

    @property
    def support(self) -> tuple:
        return tuple(k for k, v in self._entries.items() if v > 0)

    def total(self) -> Fraction:
        return sum(self._entries.values(), Fraction(0))

    def is_valid(self) -> bool:
        return self.total() == 1 and all(0 <= v <= 1 for v in self._entries.values())

    def map_keys(self, fn: Callable[[Any], Any]) -> "Distribution":
        out: dict[Any, Fraction] = {}
        for k, v in self._entries.items():
            nk = fn(k)
            out[nk] = out.get(nk, Fraction(0)) + v
        return Distribution(out)

    def sample(self, rng) -> Any:
        """Draw a point exactly: no floating point is involved."""
        if self._cum is None:
            pts = [k for k, v in self._entries.items() if v > 0]
            den = lcm(*(self._entries[p].denominator for p in pts)) if pts else 1
            cum, acc = [], 0
            for p in pts:
                acc += int(self._entries[p] * den)
                cum.append(acc)
            self._cum = (den, pts, cum)
        den, pts, cum = self._cum
        if not pts:
            raise DomainError("cannot sample from an empty distribution")
        r = rng.randrange(den)
        return pts[bisect_right(cum, r)]

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, Distribution):
            return NotImplemented
        mine = {k: v for k, v in self._entries.items() if v != 0}
        theirs = {k: v for k, v in other._entries.items() if v != 0}
        return mine == theirs

    def __hash__(self):  # pragma: no cover - dict-keyed use is a bug
        raise TypeError("Distribution is not hashable")

    def __repr__(self) -> str:
        inner = ", ".join(f"{k!r}: {v}" for k, v in self._entries.items())
        return f"Distribution({{{inner}}})"


def _coerce_dist(value: Any) -> Distribution:
    return value if isinstance(value, Distribution) else Distribution(value)


class UncertaintyGame:
    """Arena ``(L, inputs, outputs, delta, un, initial)``.

    ``delta`` maps ``(location, input, output)`` triples to successor
    distributions; ``un`` maps each location to the distribution of what
    Player 1's sensor reports when the game is really there. All keys and
    points are plain names (strings); dense integer views are built
    internally where the measure engine needs them.
    """

    def __init__(
        self,
        locations: Sequence[str],
        inputs: Sequence[str],
        outputs: Sequence[str],
        initial: str,
        delta: Mapping[tuple[str, str, str], Any],
        un: Mapping[str, Any],
    ):
        self.locations = tuple(locations)
        self.inputs = tuple(inputs)
        self.outputs = tuple(outputs)
        self.initial = initial
        self.delta = {k: _coerce_dist(v) for k, v in delta.items()}
        self.un = {k: _coerce_dist(v) for k, v in un.items()}
        self.loc_index = {name: i for i, name in enumerate(self.locations)}

    def transition_dist(self, loc: str, sigma_in: str, sigma_out: str) -> Distribution:
        if loc not in self.loc_index:
            raise DomainError(f"unknown location {loc!r}")
        if sigma_in not in self.inputs:
            raise DomainError(f"letter {sigma_in!r} not in the input alphabet")
        if sigma_out not in self.outputs:
            raise DomainError(f"letter {sigma_out!r} not in the output alphabet")
        try:
            return self.delta[(loc, sigma_in, sigma_out)]
        except KeyError:
            raise DomainError(f"no transition row for ({loc!r}, {sigma_in!r}, {sigma_out!r})") from None

    def un_dist(self, loc: str) -> Distribution:
        if loc not in self.loc_index:
            raise DomainError(f"unknown location {loc!r}")
        try:
            return self.un[loc]
        except KeyError:
            raise DomainError(f"no uncertainty row for {loc!r}") from None

    def __repr__(self) -> str:
        return (
            f"UncertaintyGame(|L|={len(self.locations)}, "
            f"inputs={list(self.inputs)}, outputs={list(self.outputs)}, initial={self.initial!r})"
        )


def transition_dist(g: UncertaintyGame, loc: str, sigma_in: str, sigma_out: str) -> Distribution:
    """Module-level alias for :meth:`UncertaintyGame.transition_dist`."""
    return g.transition_dist(loc, sigma_in, sigma_out)


@dataclass(frozen=True)
class PrefixG:
    """Alternating history ``l0 i0 o0 l1 i1 o1 ... ln``.

    ``len(p)`` counts locations, so a bare initial location has length 1
    and each played round adds one.
    """

    locs: tuple[str, ...]
    ins: tuple[str, ...] = ()
    outs: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.locs:
            raise DomainError("a prefix needs at least its starting location")
        if len(self.ins) != len(self.outs) or len(self.locs) != len(self.ins) + 1:
            raise DomainError(
                f"malformed prefix: {len(self.locs)} locations, "
                f"{len(self.ins)} inputs, {len(self.outs)} outputs"
            )

    @classmethod
    def start(cls, loc: str) -> "PrefixG":
        return cls((loc,))

    @classmethod
    def parse(cls, tokens: Sequence[str]) -> "PrefixG":
        """Build from an interleaved token list like ``["x", "a", "o", "y"]``."""
        if len(tokens) % 3 != 1:
            raise DomainError(f"interleaved prefix needs 3k+1 tokens, got {len(tokens)}")
        return cls(tuple(tokens[0::3]), tuple(tokens[1::3]), tuple(tokens[2::3]))

    @property
    def steps(self) -> int:
        return len(self.ins)

    @property
    def last(self) -> str:
        return self.locs[-1]

    def __len__(self) -> int:
        return len(self.locs)

    def extend(self, sigma_in: str, sigma_out: str, loc: str) -> "PrefixG":
        return PrefixG(self.locs + (loc,), self.ins + (sigma_in,), self.outs + (sigma_out,))

    def up_to(self, n_steps: int) -> "PrefixG":
        """The prefix after ``n_steps`` rounds (``n_steps + 1`` locations)."""
        return PrefixG(self.locs[: n_steps + 1], self.ins[:n_steps], self.outs[:n_steps])

    def action_matches(self, other: "PrefixG") -> bool:
        return self.ins == other.ins and self.outs == other.outs and len(self.locs) == len(other.locs)

    def interleaved(self) -> Iterator[str]:
        for j, loc in enumerate(self.locs):
            yield loc
            if j < len(self.ins):
                yield self.ins[j]
                yield self.outs[j]

    def __str__(self) -> str:
        return " ".join(self.interleaved())


class StrategyG1:
    """Player 1 strategy: observed prefix -> distribution over inputs.

    Rows live in a finite-depth table. A ``rule`` callback, when given,
    fills in rows on demand (and is memoized), which keeps seeded random
    strategies total on their domain without enumerating it up front.
    """

    def __init__(
        self,
        depth: int,
        rows: Mapping[PrefixG, Distribution] | None = None,
        rule: Callable[[PrefixG], Distribution] | None = None,
    ):
        if depth < 1:
            raise DomainError("strategy depth must be at least 1")
        self.depth = depth
        self._rows: dict[PrefixG, Distribution] = dict(rows or {})
        self._rule = rule

    def dist(self, prefix: PrefixG) -> Distribution:
        if len(prefix) > self.depth:
            raise DepthExceededError(f"prefix of length {len(prefix)} exceeds strategy depth {self.depth}")
        row = self._rows.get(prefix)
        if row is None:
            if self._rule is None:
                raise DomainError(f"no strategy row for prefix '{prefix}'")
            row = _coerce_dist(self._rule(prefix))
            self._rows[prefix] = row
        return row

    def known_rows(self) -> dict[PrefixG, Distribution]:
        """Rows materialized so far (all rows, for purely table-backed strategies)."""
        return dict(self._rows)


class StrategyG2:
    """Player 2 strategy, ordinary or all-powerful.

    Ordinary rows are keyed by the true prefix and Player 1's pending
    input letter. All-powerful rows additionally read Player 1's observed
    prefix, which must action-match the true one.
    """

    def __init__(
        self,
        variant: str,
        depth: int,
        rows: Mapping[tuple, Distribution] | None = None,
        rule: Callable[..., Distribution] | None = None,
    ):
        if variant not in (ORDINARY, ALL_POWERFUL):
            raise DomainError(f"unknown Player 2 variant {variant!r}")
        if depth < 1:
            raise DomainError("strategy depth must be at least 1")
        self.variant = variant
        self.depth = depth
        self._rows: dict[tuple, Distribution] = dict(rows or {})
        self._rule = rule

    def dist(self, true_prefix: PrefixG, sigma_in: str, observed: PrefixG | None = None) -> Distribution:
        if len(true_prefix) > self.depth:
            raise DepthExceededError(
                f"prefix of length {len(true_prefix)} exceeds strategy depth {self.depth}"
            )
        if self.variant == ORDINARY:
            key: tuple = (true_prefix, sigma_in)
        else:
            if observed is None:
                raise DomainError("all-powerful strategy needs the observed prefix")
            if not true_prefix.action_matches(observed):
                raise DomainError("observed prefix does not action-match the true prefix")
            key = (true_prefix, observed, sigma_in)
        row = self._rows.get(key)
        if row is None:
            if self._rule is None:
                raise DomainError(f"no strategy row for key {key!r}")
            row = _coerce_dist(self._rule(*key))
            self._rows[key] = row
        return row

    def known_rows(self) -> dict[tuple, Distribution]:
        return dict(self._rows)


@dataclass(frozen=True)
class Objective:
    """Winning condition over locations (or, after a reduction, states).

    ``kind`` is one of ``reach``, ``safe``, ``buchi``, ``cobuchi`` with a
    target set, or ``parity`` with a priority assignment. Parity wins when
    the minimum priority seen infinitely often is even.
    """

    kind: str
    target: frozenset = field(default_factory=frozenset)
    priorities: tuple[tuple[str, int], ...] = ()

    KINDS = ("reach", "safe", "buchi", "cobuchi", "parity")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise DomainError(f"unknown objective kind {self.kind!r}")

    @classmethod
    def reach(cls, target: Iterable[str]) -> "Objective":
        return cls("reach", frozenset(target))

    @classmethod
    def safe(cls, target: Iterable[str]) -> "Objective":
        return cls("safe", frozenset(target))

    @classmethod
    def buchi(cls, target: Iterable[str]) -> "Objective":
        return cls("buchi", frozenset(target))

    @classmethod
    def cobuchi(cls, target: Iterable[str]) -> "Objective":
        return cls("cobuchi", frozenset(target))

    @classmethod
    def parity(cls, priorities: Mapping[str, int]) -> "Objective":
        return cls("parity", frozenset(), tuple(sorted(priorities.items())))

    def priority_map(self) -> dict[str, int]:
        return dict(self.priorities)

    def check(self, names: Iterable[str]) -> list[str]:
        """Violations of this objective against a universe of state names."""
        universe = set(names)
        problems = []
        if self.kind == "parity":
            pm = self.priority_map()
            for name in universe - pm.keys():
                problems.append(f"priority function undefined at {name!r}")
            for name in pm.keys() - universe:
                problems.append(f"dangling location {name!r} in priorities")
            for name, p in pm.items():
                if p < 0:
                    problems.append(f"negative priority {p} at {name!r}")
        else:
            for name in self.target - universe:
                problems.append(f"dangling location {name!r} in objective target")
        return problems

    def relabel(self, fn: Callable[[str], Iterable[str]]) -> "Objective":
        """Lift through a state expansion: ``fn`` maps each old name to new names."""
        if self.kind == "parity":
            pm = {}
            for name, p in self.priorities:
                for new in fn(name):
                    pm[new] = p
            return Objective.parity(pm)
        return Objective(self.kind, frozenset(n for t in self.target for n in fn(t)))


@dataclass
class ValidationReport:
    """Accumulated invariant violations; empty means well-formed."""

    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, message: str) -> None:
        self.violations.append(message)

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        return "\n".join(self.violations)


def _check_distribution(report: ValidationReport, dist: Distribution, where: str, universe: set) -> None:
    total = dist.total()
    if total != 1:
        report.add(f"distribution sum ≠ 1 at {where}: sums to {total}")
    for point, value in dist.items():
        if value < 0 or value > 1:
            report.add(f"probability out of range at {where}: {point!r} -> {value}")
        if point not in universe:
            report.add(f"dangling location {point!r} in {where}")


def validate_game(g: UncertaintyGame) -> ValidationReport:
    """Check every structural invariant; the report carries all failures."""
    report = ValidationReport()
    locs = set(g.locations)
    if not g.locations:
        report.add("no locations")
    if len(locs) != len(g.locations):
        report.add("duplicate location names")
    if not g.inputs:
        report.add("empty input alphabet")
    if not g.outputs:
        report.add("empty output alphabet")
    if len(set(g.inputs)) != len(g.inputs) or len(set(g.outputs)) != len(g.outputs):
        report.add("duplicate letters in an alphabet")
    if g.initial not in locs:
        report.add(f"dangling location {g.initial!r} as initial")

    for loc, si, so in itertools.product(g.locations, g.inputs, g.outputs):
        row = g.delta.get((loc, si, so))
        if row is None:
            report.add(f"missing Δ row for ({loc!r}, {si!r}, {so!r})")
        else:
            _check_distribution(report, row, f"Δ({loc},{si},{so})", locs)
    for key in g.delta:
        loc, si, so = key
        if loc not in locs or si not in g.inputs or so not in g.outputs:
            report.add(f"Δ row keyed outside the game: {key!r}")

    for loc in g.locations:
        row = g.un.get(loc)
        if row is None:
            report.add(f"missing un row for {loc!r}")
        else:
            _check_distribution(report, row, f"un({loc})", locs)
    for key in g.un:
        if key not in locs:
            report.add(f"un row keyed outside the game: {key!r}")
    return report


def eval_parity_on_lasso(priorities: Mapping[str, int], stem: Sequence[str], cycle: Sequence[str]) -> bool:
    """Minimum priority on the cycle is even.

    The stem is accepted (and ignored) because parity is prefix
    independent; keeping it in the signature lets lasso evaluators share
    a calling convention with the prefix-sensitive objectives.
    """
    if not cycle:
        raise DomainError("lasso cycle must be nonempty")
    return min(priorities[x] for x in cycle) % 2 == 0


def eval_objective_on_lasso(obj: Objective, stem: Sequence[str], cycle: Sequence[str]) -> bool:
    """Directly evaluate an objective on the play ``stem . cycle^ω``."""
    if not cycle:
        raise DomainError("lasso cycle must be nonempty")
    seen = set(stem) | set(cycle)
    inf = set(cycle)
    if obj.kind == "reach":
        return bool(seen & obj.target)
    if obj.kind == "safe":
        return seen <= obj.target
    if obj.kind == "buchi":
        return bool(inf & obj.target)
    if obj.kind == "cobuchi":
        return inf <= obj.target
    return eval_parity_on_lasso(obj.priority_map(), stem, cycle)


def parity_form(obj: Objective, names: Iterable[str]) -> dict[str, int]:
    """Two-priority form for the prefix-independent kinds.

    Büchi targets get priority 0 (1 elsewhere); coBüchi targets get 2 (1
    elsewhere); parity returns its own map. Reach and safe are prefix
    sensitive, so they have no pointwise priority form: use
    :func:`parity_form_lasso` or the solver-level absorbing transforms.
    """
    universe = list(names)
    if obj.kind == "buchi":
        return {x: (0 if x in obj.target else 1) for x in universe}
    if obj.kind == "cobuchi":
        return {x: (2 if x in obj.target else 1) for x in universe}
    if obj.kind == "parity":
        return obj.priority_map()
    raise DomainError(f"{obj.kind} has no pointwise priority form; it needs a history flag")


def parity_form_lasso(
    obj: Objective, stem: Sequence[str], cycle: Sequence[str]
) -> tuple[dict, list, list]:
    """Compile any objective to parity *on this lasso*.

    Reach/safe carry one monotone bit of history ("target hit so far" /
    "target left so far"), so the lasso is rebuilt over (location, bit)
    pairs, unrolling the cycle once so the bit stabilizes. The other
    kinds pass through with their pointwise priorities.
    """
    if not cycle:
        raise DomainError("lasso cycle must be nonempty")
    if obj.kind not in ("reach", "safe"):
        pm = parity_form(obj, set(stem) | set(cycle))
        return pm, list(stem), list(cycle)

    if obj.kind == "reach":
        trigger = lambda x: x in obj.target  # noqa: E731 - tiny local predicate
        prios = {True: 0, False: 1}
    else:
        trigger = lambda x: x not in obj.target  # noqa: E731
        prios = {True: 1, False: 0}

    bit = False
    new_stem: list[tuple[str, bool]] = []
    for x in stem:
        bit = bit or trigger(x)
        new_stem.append((x, bit))
    first_pass: list[tuple[str, bool]] = []
    for x in cycle:
        bit = bit or trigger(x)
        first_pass.append((x, bit))
    second_pass: list[tuple[str, bool]] = []
    for x in cycle:
        bit = bit or trigger(x)  # bit is monotone, so this pass is stable
        second_pass.append((x, bit))
    priorities = {(x, b): prios[b] for x, b in new_stem + first_pass + second_pass}
    return priorities, new_stem + first_pass, second_pass
