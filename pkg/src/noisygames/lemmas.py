"""Exhaustive bounded checks of the correspondence claims.

Each checker walks every prefix pair up to a round depth and compares
two exact rationals that the claim says must be equal. A report either
says the claim held on every pair it looked at, or carries the first
counterexample found. Nothing here samples; the only randomness is in
the seeded instances handed in.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .core import (
    DomainError,
    Objective,
    PrefixG,
    StrategyG2,
    UncertaintyGame,
    eval_objective_on_lasso,
)
from .measure import ConeMeasure, enumerate_act_mt, obs_seq
from .pog import (
    ObsBasedStrategy,
    PartialObsGame,
    Pomdp,
    PrefixH,
    cone_prob_pog,
    cone_prob_pomdp,
    observation_seq,
)
from .reduce_forward import (
    ReducedGame,
    map_strategies_g_to_h,
    map_strategies_h_to_g,
    pair_prefix,
    reduce_game,
)
from .reduce_pomdp import (
    prefix_pomdp_to_g,
    reduce_pomdp,
    strategy_g_to_pomdp,
    strategy_pomdp_to_g,
)
from .simulate import LemmaInstance, child_seed, random_pog_strategy
from .solvers import enum_budget

__all__ = [
    "LEMMA_KINDS",
    "Counterexample",
    "LemmaReport",
    "check_lemma",
    "check_priority_lift",
    "check_reduction_cones",
]

LEMMA_KINDS = (
    "ObsSeqConditional",
    "ConeForwardG2H",
    "ConeForwardH2G",
    "PomdpObsSeqFormula",
    "ConePomdpH2G",
    "ConePomdpG2H",
    "ObsBasedMapping",
)


@dataclass(frozen=True)
class Counterexample:
    prefix_pair: tuple
    lhs: Fraction
    rhs: Fraction


@dataclass(frozen=True)
class LemmaReport:
    kind: str
    instance: str
    pairs_checked: int
    counterexample: Counterexample | None

    @property
    def verified(self) -> bool:
        return self.counterexample is None

    def __str__(self) -> str:
        if self.verified:
            return f"{self.kind}: verified on {self.pairs_checked} prefix pairs"
        ce = self.counterexample
        at = " | ".join(str(p) for p in ce.prefix_pair)
        return f"{self.kind}: FAILED at [{at}] lhs={ce.lhs} rhs={ce.rhs}"


# --------------------------------------------------------------------------
# Prefix enumeration


def _g_prefixes(g: UncertaintyGame, depth: int):
    """Every true-thread prefix from the initial location, 1..depth rounds."""
    layer = [PrefixG.start(g.initial)]
    for _ in range(depth):
        nxt = []
        for rho in layer:
            for si in g.inputs:
                for so in g.outputs:
                    for succ in g.locations:
                        nxt.append(rho.extend(si, so, succ))
        yield from nxt
        layer = nxt


def _m_prefixes(m: Pomdp, depth: int, supported: bool = True):
    """Paths of the decision process from its initial state, 1..depth steps."""
    layer = [PrefixH.start(m.initial)]
    for _ in range(depth):
        nxt = []
        for rho in layer:
            for a in m.actions:
                row = m.succ(rho.last, a)
                succs = (s for s, w in row.items() if w > 0) if supported else m.states
                for s in succs:
                    nxt.append(rho.extend(a, s))
        yield from nxt
        layer = nxt


def _guard(kind: str, estimate: int) -> None:
    budget = enum_budget()
    if estimate > budget:
        raise DomainError(
            f"{kind} would compare about {estimate} prefix pairs, over the "
            f"budget of {budget}; lower the depth or raise UG_MAX_ENUM"
        )


def _bounds(kind: str, instance: LemmaInstance, depth: int, max_locations: int, max_depth: int):
    if depth < 1:
        raise DomainError("depth must be at least 1")
    if depth > max_depth:
        raise DomainError(f"{kind} is capped at round depth {max_depth}, got {depth}")
    g = instance.game
    if len(g.locations) > max_locations:
        raise DomainError(
            f"{kind} is capped at {max_locations} locations, got {len(g.locations)}"
        )
    if len(instance.pomdp.states) > max_locations:
        raise DomainError(
            f"{kind} is capped at {max_locations} states, got {len(instance.pomdp.states)}"
        )
    branch_g = len(g.inputs) * len(g.outputs) * len(g.locations)
    threads = len(g.locations) ** (depth + 1)
    n_g = sum(branch_g**d for d in range(1, depth + 1))
    branch_m = len(instance.pomdp.actions) * len(instance.pomdp.states)
    n_m = sum(branch_m**d for d in range(1, depth + 1))
    threads_m = len(instance.pomdp.states) ** (depth + 1)
    if kind in ("ObsSeqConditional", "ConeForwardG2H", "ConeForwardH2G"):
        _guard(kind, n_g * threads)
    elif kind == "PomdpObsSeqFormula":
        _guard(kind, n_m * threads_m)
    else:
        _guard(kind, n_m)


# --------------------------------------------------------------------------
# The checkers


def _check_obs_seq_conditional(inst: LemmaInstance, depth: int) -> LemmaReport:
    g = inst.game
    cm = ConeMeasure(g, inst.alpha, inst.beta)
    pairs = 0
    for rho in _g_prefixes(g, depth):
        joint = cm.thread_weights(rho)
        denom = sum(joint.values(), Fraction(0))
        if denom == 0:
            continue
        for rho2 in enumerate_act_mt(g, rho):
            pairs += 1
            lhs = joint.get(rho2.locs, Fraction(0)) / denom
            rhs = obs_seq(g, rho, rho2)
            if lhs != rhs:
                return LemmaReport(
                    "ObsSeqConditional",
                    inst.description,
                    pairs,
                    Counterexample((str(rho), str(rho2)), lhs, rhs),
                )
    return LemmaReport("ObsSeqConditional", inst.description, pairs, None)


def _forward_cone_compare(
    kind: str,
    description: str,
    red: ReducedGame,
    alpha_g,
    beta_g,
    alpha_h,
    beta_h,
    depth: int,
) -> LemmaReport:
    g = red.game
    cm = ConeMeasure(g, alpha_g, beta_g)
    pairs = 0
    for rho in _g_prefixes(g, depth):
        pairs += 1
        lhs = cm.cone_prob(rho)
        rhs = Fraction(0)
        for rho2 in enumerate_act_mt(g, rho):
            rhs += cone_prob_pog(red.pog, alpha_h, beta_h, pair_prefix(red, rho, rho2))
        if lhs != rhs:
            return LemmaReport(
                kind, description, pairs, Counterexample((str(rho),), lhs, rhs)
            )
    return LemmaReport(kind, description, pairs, None)


def _check_cone_forward_g2h(inst: LemmaInstance, depth: int) -> LemmaReport:
    red = reduce_game(inst.game, None, inst.mode)
    alpha_h, beta_h = map_strategies_g_to_h(red, inst.alpha, inst.beta)
    return _forward_cone_compare(
        "ConeForwardG2H", inst.description, red, inst.alpha, inst.beta, alpha_h, beta_h, depth
    )


def _check_cone_forward_h2g(inst: LemmaInstance, depth: int) -> LemmaReport:
    red = reduce_game(inst.game, None, inst.mode)
    h_depth = 2 * depth + 2
    alpha_h = random_pog_strategy(red.pog, 1, h_depth, child_seed(inst.seed, "h2g|alpha"))
    beta_h = random_pog_strategy(red.pog, 2, h_depth, child_seed(inst.seed, "h2g|beta"))
    alpha_g, beta_g = map_strategies_h_to_g(red, alpha_h, beta_h)
    return _forward_cone_compare(
        "ConeForwardH2G", inst.description, red, alpha_g, beta_g, alpha_h, beta_h, depth
    )


def check_reduction_cones(
    red: ReducedGame, alpha_g, beta_g, depth: int = 2
) -> LemmaReport:
    """The forward cone comparison against a caller-supplied reduction.

    Same equation as ConeForwardG2H but the product game is taken as
    given instead of rebuilt, so a corrupted reduction (wrong rows,
    wrong observation classes) shows up as a concrete counterexample.
    """
    alpha_h, beta_h = map_strategies_g_to_h(red, alpha_g, beta_g)
    return _forward_cone_compare(
        "ConeForwardG2H",
        "caller-supplied reduction",
        red,
        alpha_g,
        beta_g,
        alpha_h,
        beta_h,
        depth,
    )


def _check_pomdp_obs_seq(inst: LemmaInstance, depth: int) -> LemmaReport:
    m = inst.pomdp
    red = reduce_pomdp(m)
    g2 = red.game
    pairs = 0
    for rho_m in _m_prefixes(m, depth, supported=False):
        rho = prefix_pomdp_to_g(red, rho_m)
        for states2 in product(m.states, repeat=len(rho_m.states)):
            pairs += 1
            rho2 = PrefixG(states2, rho.ins, rho.outs)
            lhs = obs_seq(g2, rho, rho2)
            expected = Fraction(1)
            for s, s2 in zip(rho_m.states, states2):
                if m.obs_block(1, s) != m.obs_block(1, s2):
                    expected = Fraction(0)
                    break
                expected /= len(m.obs[m.obs_block(1, s)])
            if lhs != expected:
                return LemmaReport(
                    "PomdpObsSeqFormula",
                    inst.description,
                    pairs,
                    Counterexample((str(rho), str(rho2)), lhs, expected),
                )
    return LemmaReport("PomdpObsSeqFormula", inst.description, pairs, None)


def _pad_beta(depth: int) -> StrategyG2:
    bottom = Pomdp.POMDP_ACTION2
    return StrategyG2("ordinary", depth, rule=lambda t, si: {bottom: Fraction(1)})


def _pomdp_cone_compare(kind: str, inst: LemmaInstance, alpha_m, alpha_g, depth: int) -> LemmaReport:
    m = inst.pomdp
    red = reduce_pomdp(m)
    cm = ConeMeasure(red.game, alpha_g, _pad_beta(depth + 2))
    pairs = 0
    for rho_m in _m_prefixes(m, depth, supported=False):
        pairs += 1
        lhs = cone_prob_pomdp(m, alpha_m, rho_m)
        rhs = cm.cone_prob(prefix_pomdp_to_g(red, rho_m))
        if lhs != rhs:
            return LemmaReport(
                kind, inst.description, pairs, Counterexample((str(rho_m),), lhs, rhs)
            )
    return LemmaReport(kind, inst.description, pairs, None)


def _check_cone_pomdp_h2g(inst: LemmaInstance, depth: int) -> LemmaReport:
    red = reduce_pomdp(inst.pomdp)
    alpha_g = strategy_pomdp_to_g(red, inst.alpha_m)
    return _pomdp_cone_compare("ConePomdpH2G", inst, inst.alpha_m, alpha_g, depth)


def _check_cone_pomdp_g2h(inst: LemmaInstance, depth: int) -> LemmaReport:
    red = reduce_pomdp(inst.pomdp)
    alpha_m = strategy_g_to_pomdp(red, inst.alpha_pg)
    return _pomdp_cone_compare("ConePomdpG2H", inst, alpha_m, inst.alpha_pg, depth)


def _check_obs_based_mapping(inst: LemmaInstance, depth: int) -> LemmaReport:
    m = inst.pomdp
    red = reduce_pomdp(m)
    alpha_m = strategy_g_to_pomdp(red, inst.alpha_pg)
    groups: dict[tuple, tuple[PrefixH, dict]] = {}
    pairs = 0
    for rho_m in _m_prefixes(m, depth):
        pairs += 1
        row = dict(alpha_m.dist(m, rho_m).items())
        total = sum(row.values(), Fraction(0))
        if total != 1:
            return LemmaReport(
                "ObsBasedMapping",
                inst.description,
                pairs,
                Counterexample((str(rho_m),), total, Fraction(1)),
            )
        key = observation_seq(m, 1, rho_m)
        seen = groups.get(key)
        if seen is None:
            groups[key] = (rho_m, row)
            continue
        first, prev = seen
        if prev != row:
            act = next(a for a in sorted(set(prev) | set(row)) if prev.get(a, 0) != row.get(a, 0))
            return LemmaReport(
                "ObsBasedMapping",
                inst.description,
                pairs,
                Counterexample(
                    (str(first), str(rho_m)),
                    Fraction(prev.get(act, 0)),
                    Fraction(row.get(act, 0)),
                ),
            )
    return LemmaReport("ObsBasedMapping", inst.description, pairs, None)


_CHECKERS = {
    "ObsSeqConditional": _check_obs_seq_conditional,
    "ConeForwardG2H": _check_cone_forward_g2h,
    "ConeForwardH2G": _check_cone_forward_h2g,
    "PomdpObsSeqFormula": _check_pomdp_obs_seq,
    "ConePomdpH2G": _check_cone_pomdp_h2g,
    "ConePomdpG2H": _check_cone_pomdp_g2h,
    "ObsBasedMapping": _check_obs_based_mapping,
}


def check_lemma(
    kind: str,
    instance: LemmaInstance,
    depth: int = 2,
    max_locations: int = 4,
    max_depth: int = 3,
) -> LemmaReport:
    """Run one named check on one instance at the given round depth.

    Refuses (with the cost estimate) rather than silently truncating when
    the instance or depth would blow the comparison count past the
    enumeration budget.
    """
    if kind not in _CHECKERS:
        raise DomainError(f"unknown check {kind!r}; pick one of {', '.join(LEMMA_KINDS)}")
    _bounds(kind, instance, depth, max_locations, max_depth)
    return _CHECKERS[kind](instance, depth)


# --------------------------------------------------------------------------
# Objective transfer on lassos


def _lassos(h: PartialObsGame, max_states: int):
    """All positive-probability lassos from initial states, bounded length.

    A path is closed off the first time it revisits a state; the segment
    between the two visits is the cycle, what precedes it the stem.
    """
    def successors(s: str):
        for act in h.actions_of(s):
            row = h.delta.get((s, act))
            if row is None:
                continue
            for t, w in row.items():
                if w > 0:
                    yield t

    limit = 2 * max_states + 2
    stack = [[s] for s, w in h.initial.items() if w > 0]
    while stack:
        path = stack.pop()
        for t in successors(path[-1]):
            if t in path:
                i = path.index(t)
                yield path[:i], path[i:]
            elif len(path) < limit:
                stack.append(path + [t])


def check_priority_lift(red: ReducedGame, max_states: int = 6) -> LemmaReport:
    """Objective transfer: an H lasso wins iff its true projection wins.

    Walks every bounded positive-probability lasso of the product game
    and compares the objective verdict there against the verdict of the
    original objective on the first components. Catches a reduction
    whose carried-over objective reads the wrong component.
    """
    if red.objective is None or red.objective_h is None:
        raise DomainError("the reduction carries no objective to compare")
    if len(red.game.locations) > max_states:
        raise DomainError(
            f"product game too large for lasso enumeration "
            f"({len(red.game.locations)} locations, cap {max_states})"
        )
    budget = enum_budget()
    pairs = 0
    for stem, cycle in _lassos(red.pog, max_states):
        pairs += 1
        if pairs > budget:
            raise DomainError(
                f"lasso enumeration passed the budget of {budget}; raise UG_MAX_ENUM"
            )
        lhs = eval_objective_on_lasso(red.objective_h, stem, cycle)
        rhs = eval_objective_on_lasso(
            red.objective,
            [red.first_component(s) for s in stem],
            [red.first_component(s) for s in cycle],
        )
        if lhs != rhs:
            return LemmaReport(
                "PriorityLift",
                "objective transfer on product lassos",
                pairs,
                Counterexample(
                    (" ".join(stem) or "(empty stem)", " ".join(cycle)),
                    Fraction(int(lhs)),
                    Fraction(int(rhs)),
                ),
            )
    return LemmaReport("PriorityLift", "objective transfer on product lassos", pairs, None)
