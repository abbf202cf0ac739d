"""Qualitative winners: sure, almost-sure and positive decision procedures.

Sure winning only ever looks at supports, so it runs on knowledge sets:
objective-specific bookkeeping (a miss set for reachability, a leak sink
for safety, an owing set for recurrence, homogeneous priorities for
parity) turns the knowledge dynamics into a finite parity game that the
recursive solver settles with memoryless witnesses.

Almost-sure reachability for POMDPs is the standard pair of nested
fixpoints on the belief-support MDP after making the target absorbing
and observable. Almost-sure recurrence, and the game versions of both,
are decided by enumerating belief-support strategies and model-checking
each candidate exactly on the joint (state, knowledge) dynamics; the
search is capped by UG_MAX_ENUM and refuses oversized inputs rather
than thrash.

Positive reachability needs no subset construction at all. Positive
safety follows survivor sets (states some safe consistent history could
occupy) until they meet a bundle that some strategy protects surely;
exact for POMDPs, and for games every reported win carries a sound
certificate while losses are relative to the searched plan class.

The dispatch at the bottom routes a query on an UncertaintyGame to the
right procedure through the product reduction, or reports the
combination as unsupported with its complexity classification.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .core import (
    Distribution,
    DomainError,
    Objective,
    enum_budget,
    parity_form,
)
from .knowledge import (
    as_one_sided,
    belief_support_mdp,
    knowledge_construction,
    post1,
    post2_union,
    split_by_block,
)
from .parity import ParityGame, solve_parity_raw
from .pog import PartialObsGame, Pomdp
from .reduce_forward import MODE_ALL_POWERFUL, MODE_STANDARD, reduce_game

__all__ = [
    "MODE_SURE",
    "MODE_ALMOST",
    "MODE_POSITIVE",
    "WinningRegion",
    "Unsupported",
    "FiniteMemoryWitness",
    "ActionWordWitness",
    "UniformWitness",
    "zielonka_solve",
    "sure_winning",
    "almost_sure_reach",
    "almost_sure_buchi",
    "almost_sure_safety",
    "positive_reach",
    "positive_safety",
    "solve_uncertainty_game",
]

MODE_SURE = "sure"
MODE_ALMOST = "almost"
MODE_POSITIVE = "positive"


@dataclass
class FiniteMemoryWitness:
    """Observation-based strategy whose memory is a knowledge or belief state.

    ``initial`` maps each starting observation class to a memory state;
    ``act`` maps memory to the input letter to play (or a Distribution
    over letters); ``step`` maps (memory, letter, observation tuple) to
    the next memory. Games observe a pair of classes per round, POMDPs a
    single class.
    """

    kind: str
    initial: dict
    act: dict
    step: dict
    note: str = ""


@dataclass
class ActionWordWitness:
    """Play these letters blindly; the whole word has positive probability."""

    word: tuple
    note: str = ""


@dataclass
class UniformWitness:
    """Randomize uniformly over the letters for at least the given horizon."""

    actions: tuple
    horizon: int
    note: str = ""


@dataclass
class WinningRegion:
    mode: str
    objective: Objective | None
    winning: frozenset
    initial_winning: bool
    witness: object | None = None
    detail: str = ""


@dataclass
class Unsupported:
    objective_kind: str
    requirement: str
    player2: str
    classification: str
    message: str


def zielonka_solve(pg: ParityGame) -> tuple[WinningRegion, WinningRegion]:
    """Solve a perfect-information parity game; the regions partition the nodes.

    ``initial_winning`` is reported relative to node 0. Witnesses are the
    memoryless successor choices inside each winner's region.
    """
    w1, w2, s1, s2 = solve_parity_raw(pg)
    r1 = WinningRegion(MODE_SURE, None, w1, 0 in w1, dict(s1))
    r2 = WinningRegion(MODE_SURE, None, w2, 0 in w2, dict(s2))
    return r1, r2


# --------------------------------------------------------------------------
# Sure winning via knowledge sets with objective bookkeeping


class _Arena:
    """Parity arena under construction, nodes keyed by payload.

    ``moves[(node, letter)]`` records, for Player-1 nodes, which successor
    the play reaches once the environment answers with an observation
    pair; witness extraction reads it back.
    """

    def __init__(self):
        self.keys: list = []
        self.index: dict = {}
        self.owner: list[int] = []
        self.prio: list[int] = []
        self.succ: list[list[int]] = []
        self.moves: dict = {}

    def node(self, key, owner: int, prio: int) -> int:
        i = self.index.get(key)
        if i is None:
            i = len(self.keys)
            self.keys.append(key)
            self.index[key] = i
            self.owner.append(owner)
            self.prio.append(prio)
            self.succ.append([])
        return i

    def edge(self, i: int, j: int) -> None:
        if j not in self.succ[i]:
            self.succ[i].append(j)

    def record(self, i: int, a, obs_pair, j: int) -> None:
        self.moves.setdefault((i, a), []).append((obs_pair, j))

    def game(self) -> ParityGame:
        return ParityGame(self.owner, self.prio, self.succ)


def _initial_cells(h: PartialObsGame):
    start = [s for s, w in h.initial.items() if w > 0]
    return split_by_block(h, 1, start)


def _branches(h: PartialObsGame, cell, a):
    """Knowledge updates of one round, one entry per observation pair."""
    out = []
    for o1, mid in split_by_block(h, 1, post1(h, cell, a)):
        landed = post2_union(h, mid)
        for o2, end in split_by_block(h, 1, landed):
            out.append((o1, mid, o2, end))
    return out


def _sure_reach_arena(h: PartialObsGame, target: frozenset, starts):
    # Nodes carry (cell, miss): the members whose consistent histories all
    # avoid the target so far. The objective is surely met exactly when
    # every adversarial observation resolution empties the miss set, which
    # is absorbing once empty; a forever-nonempty miss set yields an
    # infinite avoiding play by the usual finite-branching argument.
    ar = _Arena()
    initials = []
    for block, cell in starts:
        miss = tuple(s for s in cell if s not in target)
        initials.append(ar.node(("n", cell, miss), 1, 0 if not miss else 1))
    queue = list(dict.fromkeys(initials))
    seen = set(queue)
    while queue:
        i = queue.pop(0)
        _, cell, miss = ar.keys[i]
        for a in h.actions1:
            ci = ar.node(("c", cell, miss, a), 2, 1)
            ar.edge(i, ci)
            mid_live = frozenset(post1(h, miss, a)) - target
            for o1, mid, o2, end in _branches(h, cell, a):
                still = [c for c in mid if c in mid_live]
                landed = frozenset(post2_union(h, still)) - target
                miss2 = tuple(s for s in end if s in landed)
                j = ar.node(("n", end, miss2), 1, 0 if not miss2 else 1)
                ar.edge(ci, j)
                ar.record(i, a, (o1, o2), j)
                if j not in seen:
                    seen.add(j)
                    queue.append(j)
    return ar, initials


def _sure_safe_arena(h: PartialObsGame, target: frozenset, starts):
    # Any member stepping outside the target is a consistent violation, so
    # that observation branch falls into an absorbing losing sink.
    ar = _Arena()
    lose = ar.node(("lose",), 1, 1)
    ar.edge(lose, lose)
    initials = []
    queue = []
    for block, cell in starts:
        if all(s in target for s in cell):
            i = ar.node(("n", cell), 1, 0)
            if i not in queue:
                queue.append(i)
        else:
            i = lose
        initials.append(i)
    seen = set(queue)
    while queue:
        i = queue.pop(0)
        _, cell = ar.keys[i]
        for a in h.actions1:
            ci = ar.node(("c", cell, a), 2, 0)
            ar.edge(i, ci)
            for o1, mid, o2, end in _branches(h, cell, a):
                if any(c not in target for c in mid) or any(s not in target for s in end):
                    ar.edge(ci, lose)
                    continue
                j = ar.node(("n", end), 1, 0)
                ar.edge(ci, j)
                ar.record(i, a, (o1, o2), j)
                if j not in seen:
                    seen.add(j)
                    queue.append(j)
    return ar, initials


def _sure_buchi_arena(h: PartialObsGame, target: frozenset, starts):
    # Breakpoint bookkeeping: owe holds the members whose histories have
    # not visited the target since the last flash. A flash (empty owe,
    # priority 0) recurring forever is equivalent to every consistent play
    # visiting the target infinitely often: a member dodging the target
    # eventually gets owed at the next flash and then pins owe nonempty,
    # and if all plays recur then every owed chain is finite.
    ar = _Arena()
    initials = []
    for block, cell in starts:
        owe = tuple(s for s in cell if s not in target)
        initials.append(ar.node(("n", cell, owe), 1, 0 if not owe else 1))
    queue = list(dict.fromkeys(initials))
    seen = set(queue)
    while queue:
        i = queue.pop(0)
        _, cell, owe = ar.keys[i]
        base = owe if owe else tuple(s for s in cell if s not in target)
        for a in h.actions1:
            ci = ar.node(("c", cell, owe, a), 2, 1)
            ar.edge(i, ci)
            mid_owed = frozenset(post1(h, base, a)) - target
            for o1, mid, o2, end in _branches(h, cell, a):
                still = [c for c in mid if c in mid_owed]
                landed = frozenset(post2_union(h, still)) - target
                owe2 = tuple(s for s in end if s in landed)
                j = ar.node(("n", end, owe2), 1, 0 if not owe2 else 1)
                ar.edge(ci, j)
                ar.record(i, a, (o1, o2), j)
                if j not in seen:
                    seen.add(j)
                    queue.append(j)
    return ar, initials


def _common_priority(cell, prio_of) -> int:
    values = {prio_of[s] for s in cell}
    if len(values) != 1:
        raise DomainError(
            "parity needs the priority constant on every reachable knowledge "
            f"set; {sorted(cell)} mixes {sorted(values)}"
        )
    return next(iter(values))


def _sure_parity_arena(h: PartialObsGame, prio_of: dict, starts):
    # Three layers per round so intermediate-state priorities count once.
    # Requires priorities constant per reachable knowledge set, which
    # holds whenever the priority is an observable property; mixed sets
    # are rejected rather than approximated.
    neutral = max(prio_of.values())
    ar = _Arena()
    initials = []
    for block, cell in starts:
        initials.append(ar.node(("n", cell), 1, _common_priority(cell, prio_of)))
    queue = list(dict.fromkeys(initials))
    seen = set(queue)
    while queue:
        i = queue.pop(0)
        _, cell = ar.keys[i]
        for a in h.actions1:
            ci = ar.node(("c", cell, a), 2, neutral)
            ar.edge(i, ci)
            for o1, mid, o2, end in _branches(h, cell, a):
                mi = ar.node(("m", cell, a, o1), 2, _common_priority(mid, prio_of))
                ar.edge(ci, mi)
                j = ar.node(("n", end), 1, _common_priority(end, prio_of))
                ar.edge(mi, j)
                ar.record(i, a, (o1, o2), j)
                if j not in seen:
                    seen.add(j)
                    queue.append(j)
    return ar, initials


def _lift_pomdp_objective(m: Pomdp, objective: Objective) -> Objective:
    def widen(s: str):
        return [s] + [m.mid_name(s, a) for a in m.actions]

    return objective.relabel(widen)


def _check_target(states, target) -> frozenset:
    target = frozenset(target)
    unknown = target - set(states)
    if unknown:
        raise DomainError(f"target mentions unknown states: {sorted(unknown)}")
    return target


def _build_sure_arena(h: PartialObsGame, objective: Objective, starts):
    kind = objective.kind
    if kind == "reach":
        return _sure_reach_arena(h, objective.target, starts)
    if kind == "safe":
        return _sure_safe_arena(h, objective.target, starts)
    if kind == "buchi":
        return _sure_buchi_arena(h, objective.target, starts)
    prio_of = parity_form(objective, h.states)
    return _sure_parity_arena(h, prio_of, starts)


def _entry_key(objective: Objective, cell):
    """Arena node for starting fresh at this knowledge set."""
    if objective.kind in ("reach", "buchi"):
        return ("n", cell, tuple(s for s in cell if s not in objective.target))
    return ("n", cell)


def sure_winning(model: PartialObsGame | Pomdp, objective: Objective) -> WinningRegion:
    """Sure winner from the initial knowledge, with a knowledge witness.

    Player 2 must be perfectly informed (or absent, for a POMDP); other
    inputs are rejected. Reachability, safety and recurrence targets may
    be invisible to Player 1. Parity (and so coBuechi) additionally needs
    the priority to be constant on every reachable knowledge set, which
    always holds when observations separate priorities.
    """
    if isinstance(model, Pomdp):
        objective = _lift_pomdp_objective(model, objective)
    h = as_one_sided(model)
    problems = objective.check(h.states)
    if problems:
        raise DomainError("; ".join(problems))

    starts = _initial_cells(h)
    ar, initials = _build_sure_arena(h, objective, starts)
    w1, w2, s1, s2 = solve_parity_raw(ar.game())

    initial = {}
    act: dict = {}
    step: dict = {}
    for (block, cell), i in zip(starts, initials):
        initial[block] = ar.keys[i]
    for i in sorted(w1):
        key = ar.keys[i]
        if key[0] != "n" or i not in s1:
            continue
        chosen = ar.keys[s1[i]]
        if chosen[0] != "c":
            continue
        a = chosen[-1]
        act[key] = a
        for obs_pair, j in ar.moves.get((i, a), ()):
            step[(key, a, obs_pair)] = ar.keys[j]

    winning = frozenset(
        ar.keys[i][1]
        for i in w1
        if ar.keys[i][0] == "n" and ar.keys[i] == _entry_key(objective, ar.keys[i][1])
    )
    ok = all(i in w1 for i in initials)
    witness = FiniteMemoryWitness("knowledge", initial, act, step) if ok else None
    return WinningRegion(MODE_SURE, objective, winning, ok, witness)


def _protectable_cells(h: PartialObsGame, target: frozenset, cells) -> dict:
    """Which of these knowledge sets some strategy keeps surely safe.

    One arena serves all queries; each cell is planted as a start node
    and shares whatever downstream structure the others reach.
    """
    starts = []
    for cell in cells:
        if not cell:
            continue
        block = h.obs_block(1, cell[0])
        starts.append((block, cell))
    if not starts:
        return {}
    ar, initials = _sure_safe_arena(h, target, starts)
    w1, _, _, _ = solve_parity_raw(ar.game())
    return {cell: (i in w1) for (_, cell), i in zip(starts, initials)}


# --------------------------------------------------------------------------
# Almost-sure reachability for POMDPs: nested fixpoints on belief supports


def _reveal_absorb_pomdp(m: Pomdp, target: frozenset) -> Pomdp:
    """Make the target absorbing and observable; reaching it is unchanged."""
    delta = {}
    for s in m.states:
        for a in m.actions:
            delta[(s, a)] = Distribution.dirac(s) if s in target else m.succ(s, a)
    obs = []
    for block in m.obs:
        inside = tuple(s for s in block if s in target)
        outside = tuple(s for s in block if s not in target)
        if inside:
            obs.append(inside)
        if outside:
            obs.append(outside)
    return Pomdp(m.states, m.actions, delta, obs, m.initial)


def almost_sure_reach(model: Pomdp | PartialObsGame, target) -> WinningRegion:
    """Probability-one reachability.

    POMDPs get the exact nested fixpoint on the belief-support MDP of the
    target-absorbing, target-revealed model: keep the supports that can
    still reach a goal support using only actions that cannot leave the
    kept set. A game with a perfectly informed Player 2 goes through the
    belief-strategy search described in almost_sure_buchi, with the
    target made absorbing first.
    """
    if isinstance(model, Pomdp):
        return _as_reach_pomdp(model, _check_target(model.states, target))
    h = as_one_sided(model)
    tset = _check_target(h.states, target)
    h2, tset2 = _absorb_pog(h, tset)
    region = _enumerated_almost_sure(h2, tset2, want="reach")
    region.objective = Objective.reach(sorted(tset))
    return region


def _as_reach_pomdp(m: Pomdp, target: frozenset) -> WinningRegion:
    m2 = _reveal_absorb_pomdp(m, target)
    bsm = belief_support_mdp(m2)
    n = len(bsm.supports)
    goal = {i for i in range(n) if all(s in target for s in bsm.supports[i])}

    live = set(range(n))
    while True:
        allowed = {
            i: [a for a in m2.actions if all(j in live for _, j in bsm.trans[(i, a)])]
            for i in live
        }
        keep = goal & live
        changed = True
        while changed:
            changed = False
            for i in live - keep:
                if any(
                    any(j in keep for _, j in bsm.trans[(i, a)]) for a in allowed[i]
                ):
                    keep.add(i)
                    changed = True
        if keep == live:
            break
        live = keep
    ok = bsm.initial in live

    witness = None
    if ok:
        allowed = {
            i: [a for a in m2.actions if all(j in live for _, j in bsm.trans[(i, a)])]
            for i in live
        }
        dist = {i: 0 for i in goal & live}
        frontier = set(dist)
        while frontier:
            d = max(dist.values()) + 1
            frontier = set()
            for i in live - dist.keys():
                if any(
                    any(j in dist for _, j in bsm.trans[(i, a)]) for a in allowed[i]
                ):
                    frontier.add(i)
            for i in frontier:
                dist[i] = d
        act = {}
        step = {}
        for i in sorted(live):
            support = bsm.supports[i]
            if i in goal:
                choice = allowed[i][0]
            else:
                best = None
                for a in allowed[i]:
                    near = [dist[j] for _, j in bsm.trans[(i, a)] if j in dist]
                    if near and (best is None or min(near) < best[0]):
                        best = (min(near), a)
                choice = best[1]
            act[support] = choice
            for block, j in bsm.trans[(i, choice)]:
                step[(support, choice, (block,))] = bsm.supports[j]
        witness = FiniteMemoryWitness(
            "support",
            {m2.obs_block(1, m2.initial): bsm.supports[bsm.initial]},
            act,
            step,
            note="memory is the belief support of the target-absorbing model",
        )

    winning = frozenset(bsm.supports[i] for i in live)
    return WinningRegion(MODE_ALMOST, Objective.reach(sorted(target)), winning, ok, witness)


# --------------------------------------------------------------------------
# Almost-sure recurrence, and almost-sure reach for games


def _absorb_pog(h: PartialObsGame, target: frozenset):
    """Funnel the target into an absorbing observable two-cycle."""
    goal1, goal2 = "#goal", "#goal·"
    if goal1 in h.state_index or goal2 in h.state_index:
        raise DomainError("state names #goal and #goal· are reserved here")
    states = list(h.states) + [goal1, goal2]
    owner = {s: h.owner[s] for s in h.states}
    owner[goal1] = 1
    owner[goal2] = 2
    delta = {}
    for s in h.states:
        acts = h.actions1 if h.owner[s] == 1 else h.actions2
        landing = goal2 if h.owner[s] == 1 else goal1
        for x in acts:
            delta[(s, x)] = Distribution.dirac(landing) if s in target else h.succ(s, x)
    for a in h.actions1:
        delta[(goal1, a)] = Distribution.dirac(goal2)
    for b in h.actions2:
        delta[(goal2, b)] = Distribution.dirac(goal1)
    obs1 = []
    for block in h.obs1:
        inside = tuple(s for s in block if s in target)
        outside = tuple(s for s in block if s not in target)
        if inside:
            obs1.append(inside)
        if outside:
            obs1.append(outside)
    obs1.append((goal1, goal2))
    obs2 = [(s,) for s in states]
    h2 = PartialObsGame(
        states=states,
        owner=owner,
        actions1=h.actions1,
        actions2=h.actions2,
        delta=delta,
        obs1=obs1,
        obs2=obs2,
        initial=h.initial,
    )
    return h2, frozenset(target) | {goal1, goal2}


def _cell_update(h, block_of, memo, cell, a, o1, o2):
    key = (cell, a, o1, o2)
    hit = memo.get(key)
    if hit is not None:
        return hit
    idx = h.state_index
    mid = tuple(
        sorted((c for c in post1(h, cell, a) if block_of[c] == o1), key=idx.__getitem__)
    )
    end = tuple(
        sorted(
            (s for s in post2_union(h, mid) if block_of[s] == o2), key=idx.__getitem__
        )
    )
    memo[key] = end
    return end


def _enumerated_almost_sure(h: PartialObsGame, target: frozenset, want: str) -> WinningRegion:
    """Search strategies that map each knowledge set to a uniform letter mix.

    Each candidate is model-checked exactly: Player 2, who sees
    everything, defeats it iff some positive-probability target-free path
    leads into a region of the joint (state, knowledge) dynamics that
    Player 2 can keep target-free surely (for recurrence the path may
    start anywhere reachable, for reachability only at the start).
    Candidates agreeing on their reachable knowledge sets are checked
    once. The search is capped by UG_MAX_ENUM.
    """
    kg = knowledge_construction(h)
    budget = enum_budget()
    options = (1 << len(h.actions1)) - 1
    estimate = options ** len(kg.cells)
    if estimate > budget:
        raise DomainError(
            f"belief-strategy search would visit {estimate} candidates over "
            f"{len(kg.cells)} knowledge sets; raise UG_MAX_ENUM (now {budget}) to allow"
        )
    letters = list(h.actions1)
    subsets = [
        tuple(l for k, l in enumerate(letters) if mask >> k & 1)
        for mask in range(1, 1 << len(letters))
    ]
    block_of = {s: h.obs_block(1, s) for s in h.states}
    memo: dict = {}

    initial_nodes = []
    for i in kg.initial_cells:
        cell = kg.cells[i]
        for s in cell:
            if h.initial[s] > 0:
                initial_nodes.append((s, cell))

    seen_restrictions = set()
    for assignment in itertools.product(range(len(subsets)), repeat=len(kg.cells)):
        sigma = {kg.cells[i]: subsets[assignment[i]] for i in range(len(kg.cells))}
        reach_cells = _sigma_cells(h, kg, sigma)
        signature = tuple(sorted((c, sigma[c]) for c in reach_cells))
        if signature in seen_restrictions:
            continue
        seen_restrictions.add(signature)
        if _sigma_wins(h, block_of, memo, sigma, initial_nodes, target, want):
            act = {c: Distribution.uniform(sigma[c]) for c in sorted(reach_cells)}
            step = {}
            for c in sorted(reach_cells):
                for a in sigma[c]:
                    for o1, mid, o2, end in _branches(h, c, a):
                        step[(c, a, (o1, o2))] = end
            initial = {kg.cell_block[i]: kg.cells[i] for i in kg.initial_cells}
            witness = FiniteMemoryWitness(
                "support", initial, act, step, note="uniform over the listed letters"
            )
            return WinningRegion(MODE_ALMOST, None, frozenset(reach_cells), True, witness)
    return WinningRegion(MODE_ALMOST, None, frozenset(), False, None)


def _sigma_cells(h, kg, sigma):
    seen = {kg.cells[i] for i in kg.initial_cells}
    queue = list(seen)
    while queue:
        cell = queue.pop(0)
        for a in sigma[cell]:
            for o1, mid, o2, end in _branches(h, cell, a):
                if end not in seen:
                    seen.add(end)
                    queue.append(end)
    return seen


def _sigma_wins(h, block_of, memo, sigma, initial_nodes, target, want) -> bool:
    nodes = set(initial_nodes)
    queue = list(nodes)
    edges: dict = {}
    while queue:
        s, cell = queue.pop(0)
        outs = []
        for a in sigma[cell]:
            for c in h.succ(s, a).support:
                for b in h.actions2:
                    for s2 in h.succ(c, b).support:
                        end = _cell_update(
                            h, block_of, memo, cell, a, block_of[c], block_of[s2]
                        )
                        nxt = (s2, end)
                        outs.append((c, s2, nxt))
                        if nxt not in nodes:
                            nodes.add(nxt)
                            queue.append(nxt)
        edges[(s, cell)] = outs

    # Z: the joint nodes where Player 2 keeps the play target-free surely.
    z = {n for n in nodes if n[0] not in target}
    changed = True
    while changed:
        changed = False
        for n in sorted(z):
            s, cell = n
            ok = True
            for a in sigma[cell]:
                for c in h.succ(s, a).support:
                    if c in target:
                        ok = False
                        break
                    covered = False
                    for b in h.actions2:
                        fine = True
                        for s2 in h.succ(c, b).support:
                            if s2 in target:
                                fine = False
                                break
                            end = _cell_update(
                                h, block_of, memo, cell, a, block_of[c], block_of[s2]
                            )
                            if (s2, end) not in z:
                                fine = False
                                break
                        if fine:
                            covered = True
                            break
                    if not covered:
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                z.discard(n)
                changed = True
    if not z:
        return True

    # Nodes from which Player 2 can take a positive, target-free walk to Z.
    danger = set(z)
    changed = True
    while changed:
        changed = False
        for n in nodes - danger:
            if n[0] in target:
                continue
            for c, s2, nxt in edges[n]:
                if c not in target and s2 not in target and nxt in danger:
                    danger.add(n)
                    changed = True
                    break
    if want == "reach":
        return not any(n in danger for n in initial_nodes)
    return not any(n in danger for n in nodes)


def almost_sure_buchi(model: Pomdp | PartialObsGame, target) -> WinningRegion:
    """Probability-one recurrence by belief-strategy search.

    Exact over strategies that play a uniform mix per current knowledge
    set, the class the decidability results in scope are built from.
    Capped by UG_MAX_ENUM.
    """
    if isinstance(model, Pomdp):
        orig = _check_target(model.states, target)
        h = model.as_pog()
        tset = orig | {model.mid_name(s, a) for s in orig for a in model.actions}
    else:
        h = as_one_sided(model)
        orig = tset = _check_target(h.states, target)
    region = _enumerated_almost_sure(h, tset, want="buchi")
    region.objective = Objective.buchi(sorted(orig))
    return region


def almost_sure_safety(model: Pomdp | PartialObsGame, target) -> WinningRegion:
    """Probability-one safety coincides with sure safety.

    A violation is witnessed by some finite prefix, and every consistent
    finite prefix has positive probability, so staying safe with
    probability one already forces every consistent play to stay safe.
    """
    states = model.states
    tset = _check_target(states, target)
    region = sure_winning(model, Objective.safe(sorted(tset)))
    region.mode = MODE_ALMOST
    region.detail = (
        "almost-sure safety equals sure safety: any violating play has a "
        "finite prefix of positive probability"
    )
    return region


# --------------------------------------------------------------------------
# Positive reachability and positive safety


def positive_reach(model: Pomdp | PartialObsGame, target) -> WinningRegion:
    """Positive-probability reachability, in polynomial time.

    For a POMDP any state-graph path can be followed blindly with
    positive probability, so this is plain graph search and the witness
    is an action word. For a game the fixpoint alternates: a Player-1
    state needs some letter with some chance branch in, a Player-2 state
    needs every letter to leave a chance branch in; randomizing uniformly
    long enough then realizes the fixpoint rank.
    """
    if isinstance(model, Pomdp):
        m = model
        tset = _check_target(m.states, target)
        win = set(tset)
        changed = True
        while changed:
            changed = False
            for s in m.states:
                if s in win:
                    continue
                if any(
                    any(s2 in win for s2 in m.succ(s, a).support) for a in m.actions
                ):
                    win.add(s)
                    changed = True
        ok = m.initial in win
        witness = None
        if ok:
            parent: dict = {m.initial: None}
            order = [m.initial]
            qi = 0
            hit = m.initial if m.initial in tset else None
            while qi < len(order) and hit is None:
                s = order[qi]
                qi += 1
                for a in m.actions:
                    for s2 in sorted(m.succ(s, a).support, key=m.state_index.__getitem__):
                        if s2 not in parent:
                            parent[s2] = (s, a)
                            order.append(s2)
                            if s2 in tset and hit is None:
                                hit = s2
            word = []
            cur = hit
            while parent[cur] is not None:
                prev, a = parent[cur]
                word.append(a)
                cur = prev
            witness = ActionWordWitness(tuple(reversed(word)))
        return WinningRegion(
            MODE_POSITIVE, Objective.reach(sorted(tset)), frozenset(win), ok, witness
        )

    h = as_one_sided(model)
    tset = _check_target(h.states, target)
    pos = set(tset)
    changed = True
    while changed:
        changed = False
        for s in h.states:
            if s in pos:
                continue
            if h.owner[s] == 1:
                hit = any(
                    any(s2 in pos for s2 in h.succ(s, a).support) for a in h.actions1
                )
            else:
                hit = all(
                    any(s2 in pos for s2 in h.succ(s, b).support) for b in h.actions2
                )
            if hit:
                pos.add(s)
                changed = True
    start = [s for s, w in h.initial.items() if w > 0]
    ok = any(s in pos for s in start)
    witness = UniformWitness(h.actions1, len(pos)) if ok else None
    return WinningRegion(
        MODE_POSITIVE, Objective.reach(sorted(tset)), frozenset(pos), ok, witness
    )


def positive_safety(model: Pomdp | PartialObsGame, target) -> WinningRegion:
    """Positive-probability safety via survivor sets and protected bundles.

    A survivor set collects the states that some safe consistent history
    sharing one observation record could occupy. Safety keeps positive
    mass exactly when, along some observation branch, the survivors
    eventually include a bundle that some strategy protects surely: a
    strategy with positive safe mass must, by a conditional-convergence
    argument on finite state spaces, pass a point where the remaining
    risk on some branch is exactly zero rather than merely shrinking.

    For a POMDP this search is exact. With a real adversary the reported
    wins are still sound certificates (a branch plan covering every
    adversary resolution, each covering branch keeping a live thread),
    while a loss only means no such plan exists over full survivor
    tracking. Enumeration of adversary resolutions and branch plans is
    capped by UG_MAX_ENUM.
    """
    if isinstance(model, Pomdp):
        orig = _check_target(model.states, target)
        h = model.as_pog()
        tset = orig | {model.mid_name(s, a) for s in orig for a in model.actions}
    else:
        h = as_one_sided(model)
        orig = tset = _check_target(h.states, target)
    idx = h.state_index
    block_of = {s: h.obs_block(1, s) for s in h.states}
    budget = enum_budget()

    def survivors(pairs, o2):
        got = {
            s2
            for c, b in pairs
            for s2 in h.succ(c, b).support
            if s2 in tset and block_of[s2] == o2
        }
        return tuple(sorted(got, key=idx.__getitem__))

    # The reachable survivor sets under full (union) tracking.
    start_sets = []
    start = [s for s, w in h.initial.items() if w > 0]
    for block, members in split_by_block(h, 1, start):
        s0 = tuple(s for s in members if s in tset)
        if s0:
            start_sets.append(s0)
    nodes: list[tuple] = []
    node_index: dict[tuple, int] = {}
    steps: dict[tuple, list] = {}

    def intern(cell) -> int:
        i = node_index.get(cell)
        if i is None:
            i = len(nodes)
            nodes.append(cell)
            node_index[cell] = i
        return i

    queue = [intern(c) for c in start_sets]
    seen = set(queue)
    while queue:
        i = queue.pop(0)
        if len(nodes) > budget:
            raise DomainError(
                f"positive safety exceeded {budget} survivor sets; "
                "raise UG_MAX_ENUM to allow"
            )
        cell = nodes[i]
        for a in h.actions1:
            mids = sorted(
                (c for c in post1(h, cell, a) if c in tset), key=idx.__getitem__
            )
            if not mids:
                continue
            branches = []
            for o1, midc in split_by_block(h, 1, mids):
                full = [(c, b) for c in midc for b in h.actions2]
                landed = {s2 for c, b in full for s2 in h.succ(c, b).support}
                for o2 in sorted({block_of[s] for s in landed}):
                    union_end = survivors(full, o2)
                    if union_end:
                        branches.append((o1, midc, o2, union_end))
                        j = intern(union_end)
                        if j not in seen:
                            seen.add(j)
                            queue.append(j)
            if branches:
                steps[(i, a)] = branches

    # Which candidate bundles some strategy keeps surely safe, in one pass.
    candidates = set()
    for cell in nodes:
        if (1 << len(cell)) - 1 > budget:
            raise DomainError(
                f"positive safety needs {(1 << len(cell)) - 1} bundle queries "
                f"for one survivor set; raise UG_MAX_ENUM (now {budget}) to allow"
            )
        for mask in range(1, 1 << len(cell)):
            candidates.add(tuple(c for k, c in enumerate(cell) if mask >> k & 1))
    protectable = _protectable_cells(h, tset, sorted(candidates))
    anchors = frozenset(
        s for (s,) in (c for c in candidates if len(c) == 1) if protectable[(s,)]
    )

    def maximal_protected(cell):
        good = [p for p in candidates if set(p) <= set(cell) and protectable[p]]
        return [p for p in good if not any(set(p) < set(q) for q in good)]

    # Least fixpoint over survivor sets: winnable means some letter and
    # some per-branch plan (continue into a winnable set, or switch to a
    # protected bundle) covers every adversary resolution with a branch
    # whose actual survivors stay live. Requiring liveness per resolution
    # is what rules out betting on threads the adversary can starve, and
    # taking the least fixpoint rules out postponing the switch forever.
    winnable: set[int] = set()
    changed = True
    while changed:
        changed = False
        for i in range(len(nodes)):
            if i in winnable:
                continue
            if _survivor_step_wins(
                h, steps, node_index, winnable, maximal_protected, i, budget, survivors,
            ):
                winnable.add(i)
                changed = True

    ok = False
    for s0 in start_sets:
        if set(s0) & anchors or node_index[s0] in winnable:
            ok = True
            break
    won = frozenset(
        nodes[i] for i in range(len(nodes)) if i in winnable or set(nodes[i]) & anchors
    )
    detail = (
        "winning holds the reachable survivor sets from which safety keeps "
        "positive mass"
        if isinstance(model, Pomdp)
        else "wins are certified branch plans; losses are relative to full "
        "survivor tracking"
    )
    return WinningRegion(
        MODE_POSITIVE, Objective.safe(sorted(orig)), won, ok, None, detail
    )


def _survivor_step_wins(
    h, steps, node_index, winnable, maximal_protected, i, budget, survivors
):
    idx = h.state_index
    for a in h.actions1:
        got = steps.get((i, a))
        if not got:
            continue
        mids_all = sorted(
            {c for o1, midc, o2, u in got for c in midc}, key=idx.__getitem__
        )
        n_res = len(h.actions2) ** len(mids_all)
        if n_res > budget:
            raise DomainError(
                f"positive safety needs {n_res} adversary resolutions at one "
                f"step; raise UG_MAX_ENUM (now {budget}) to allow"
            )
        options = []
        for o1, midc, o2, union_end in got:
            opts = [("dead", None)]
            if node_index[union_end] in winnable:
                opts.append(("continue", None))
            for p in maximal_protected(union_end):
                opts.append(("switch", p))
            options.append(opts)
        n_plans = 1
        for opts in options:
            n_plans *= len(opts)
        if n_plans * n_res > budget:
            raise DomainError(
                f"positive safety needs {n_plans} branch plans against {n_res} "
                f"resolutions; raise UG_MAX_ENUM (now {budget}) to allow"
            )
        resolutions = list(itertools.product(h.actions2, repeat=len(mids_all)))
        branch_surv = []
        for o1, midc, o2, union_end in got:
            per_theta = []
            for combo in resolutions:
                theta = dict(zip(mids_all, combo))
                per_theta.append(set(survivors([(c, theta[c]) for c in midc], o2)))
            branch_surv.append(per_theta)
        for plan in itertools.product(*options):
            if all(kind == "dead" for kind, _ in plan):
                continue
            good = True
            for t in range(len(resolutions)):
                covered = False
                for bi, (kind, payload) in enumerate(plan):
                    surv = branch_surv[bi][t]
                    if not surv:
                        continue
                    if kind == "continue" or (
                        kind == "switch" and surv & set(payload)
                    ):
                        covered = True
                        break
                if not covered:
                    good = False
                    break
            if good:
                return True
    return False


# --------------------------------------------------------------------------
# Dispatch


_UNDECIDABLE = {
    ("buchi", MODE_POSITIVE),
    ("cobuchi", MODE_ALMOST),
    ("parity", MODE_ALMOST),
    ("parity", MODE_POSITIVE),
}


def _unsupported(kind, mode, player2, classification, extra="") -> Unsupported:
    msg = f"Unsupported: {classification} (Table 1)"
    if extra:
        msg = f"{msg}; {extra}"
    return Unsupported(kind, mode, player2, classification, msg)


def solve_uncertainty_game(
    g,
    objective: Objective,
    mode: str = MODE_SURE,
    player2: str = MODE_ALL_POWERFUL,
) -> WinningRegion | Unsupported:
    """Route a query on a noisy-sensor game to the right procedure.

    Sure winning goes through the product with the all-powerful adversary
    for both adversary variants: sure winners depend only on which plays
    are possible, and both variants allow exactly the same play set.
    Almost-sure and positive questions run where one-sided procedures
    exist; the remaining combinations come back as Unsupported carrying
    their classification, either undecidable or a complexity class whose
    general algorithms live outside this package.
    """
    if mode not in (MODE_SURE, MODE_ALMOST, MODE_POSITIVE):
        raise DomainError(f"unknown winning mode {mode!r}")
    if player2 not in (MODE_ALL_POWERFUL, MODE_STANDARD):
        raise DomainError(f"unknown Player 2 variant {player2!r}")
    problems = objective.check(g.locations)
    if problems:
        raise DomainError("; ".join(problems))
    kind = objective.kind
    if (kind, mode) in _UNDECIDABLE:
        return _unsupported(kind, mode, player2, "undecidable")

    if mode == MODE_SURE:
        red = reduce_game(g, objective, MODE_ALL_POWERFUL)
        region = sure_winning(red.pog, red.objective_h)
        if player2 == MODE_STANDARD:
            region.detail = (
                "decided on the all-powerful product: sure winners agree for "
                "both adversary variants"
            )
        return region

    if mode == MODE_ALMOST:
        if kind == "safe":
            red = reduce_game(g, objective, MODE_ALL_POWERFUL)
            return almost_sure_safety(red.pog, red.objective_h.target)
        if player2 == MODE_STANDARD:
            return _unsupported(kind, mode, player2, "2EXPTIME")
        red = reduce_game(g, objective, MODE_ALL_POWERFUL)
        if kind == "reach":
            return almost_sure_reach(red.pog, red.objective_h.target)
        return almost_sure_buchi(red.pog, red.objective_h.target)

    if kind == "reach":
        red = reduce_game(g, objective, MODE_ALL_POWERFUL)
        region = positive_reach(red.pog, red.objective_h.target)
        if player2 == MODE_STANDARD:
            region.detail = (
                "decided on the all-powerful product: the adversary's extra "
                "information cannot change positive reachability"
            )
        return region
    if player2 == MODE_STANDARD:
        return _unsupported(kind, mode, player2, "2EXPTIME")
    if kind == "safe":
        red = reduce_game(g, objective, MODE_ALL_POWERFUL)
        return positive_safety(red.pog, red.objective_h.target)
    return _unsupported(
        kind, mode, player2, "EXPTIME", "positive coBuechi procedure not provided"
    )
