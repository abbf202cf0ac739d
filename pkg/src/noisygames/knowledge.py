"""Subset constructions over partial-observation models.

Player 1 never sees the true state, only an observation class, so the
strongest statement it can maintain is a knowledge set: the exact set of
states consistent with what has been observed and played. This module
builds two graphs over such sets.

The knowledge game serves sure winning. Player 2's action is invisible
to Player 1, so a knowledge update folds all of Player 2's choices into
one union before intersecting with the next observation; the adversary
of the abstract game resolves only which observations come back. States
are stored as tuples sorted by state id and discovered lazily from the
initial supports, so the exponential space is only paid where reachable.

The belief-support MDP is the same idea for POMDPs under probability:
supports of the posterior evolve by union-of-supports intersected with
the observed class. Qualitative almost-sure analysis lives on it.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import DomainError
from .pog import PartialObsGame, Pomdp

__all__ = [
    "Branch",
    "KnowledgeGame",
    "knowledge_construction",
    "BeliefSupportMdp",
    "belief_support_mdp",
    "as_one_sided",
    "post1",
    "post2_union",
    "split_by_block",
]


def as_one_sided(model: PartialObsGame | Pomdp) -> PartialObsGame:
    """Return the model as a game where Player 2 is perfectly informed."""
    if isinstance(model, Pomdp):
        return model.as_pog()
    for block in model.obs2:
        if len(block) > 1:
            raise DomainError(
                "this construction needs a perfectly informed Player 2 "
                "(singleton observation classes); got a class of size "
                f"{len(block)}"
            )
    return model


def post1(h: PartialObsGame, cell, action: str) -> frozenset:
    """All states reachable by one Player-1 move from any member."""
    out = set()
    for s in cell:
        out.update(h.succ(s, action).support)
    return frozenset(out)


def post2_union(h: PartialObsGame, mid_cell) -> frozenset:
    """All states reachable from the members under every Player-2 choice.

    Player 1 does not observe which letter Player 2 picked, so the set of
    possible positions is the union over the whole action alphabet.
    """
    out = set()
    for c in mid_cell:
        for b in h.actions2:
            out.update(h.succ(c, b).support)
    return frozenset(out)


def split_by_block(h: PartialObsGame, player: int, states):
    """Partition states by observation class; cells sorted by state id."""
    groups: dict[int, list[str]] = {}
    for s in states:
        groups.setdefault(h.obs_block(player, s), []).append(s)
    idx = h.state_index
    return [(block, tuple(sorted(members, key=idx.__getitem__))) for block, members in sorted(groups.items())]


@dataclass(frozen=True)
class Branch:
    """One adversarial resolution of the two observations in a round."""

    mid_block: int
    mid_cell: tuple
    end_block: int
    end_cell: tuple


class KnowledgeGame:
    """Perfect-information view of what Player 1 can know.

    ``cells`` lists the reachable knowledge sets; ``cell_block[i]`` is the
    observation class every member of cell i shares. ``moves[(i, a)]``
    holds one Branch per observation pair the environment can answer
    with; the branch's end cell is exactly the set of states possible
    given (cell, a, both observations).
    """

    def __init__(self, pog: PartialObsGame):
        self.pog = pog
        self.cells: list[tuple] = []
        self.cell_index: dict[tuple, int] = {}
        self.cell_block: list[int] = []
        self.initial_cells: list[int] = []
        self.moves: dict[tuple, tuple] = {}

    def intern(self, block: int, cell: tuple) -> int:
        i = self.cell_index.get(cell)
        if i is None:
            i = len(self.cells)
            self.cells.append(cell)
            self.cell_index[cell] = i
            self.cell_block.append(block)
        return i


def knowledge_construction(model: PartialObsGame | Pomdp) -> KnowledgeGame:
    """Lazily build the knowledge game from the initial supports."""
    h = as_one_sided(model)
    kg = KnowledgeGame(h)
    start = [s for s, w in h.initial.items() if w > 0]
    queue = []
    for block, cell in split_by_block(h, 1, start):
        i = kg.intern(block, cell)
        kg.initial_cells.append(i)
        queue.append(i)
    seen = set(queue)
    while queue:
        i = queue.pop(0)
        cell = kg.cells[i]
        for a in h.actions1:
            mid = post1(h, cell, a)
            branches = []
            for mid_block, mid_cell in split_by_block(h, 1, mid):
                landed = post2_union(h, mid_cell)
                for end_block, end_cell in split_by_block(h, 1, landed):
                    j = kg.intern(end_block, end_cell)
                    branches.append(Branch(mid_block, mid_cell, end_block, end_cell))
                    if j not in seen:
                        seen.add(j)
                        queue.append(j)
            kg.moves[(i, a)] = tuple(branches)
    return kg


class BeliefSupportMdp:
    """Action-labeled support transitions of a POMDP.

    ``trans[(i, a)]`` maps to one (block, support index) pair per
    observation class the step can land in; the successor support is the
    union of transition supports intersected with that class.
    """

    def __init__(self, pomdp: Pomdp):
        self.pomdp = pomdp
        self.supports: list[tuple] = []
        self.support_index: dict[tuple, int] = {}
        self.initial: int = 0
        self.trans: dict[tuple, tuple] = {}

    def intern(self, support: tuple) -> int:
        i = self.support_index.get(support)
        if i is None:
            i = len(self.supports)
            self.supports.append(support)
            self.support_index[support] = i
        return i


def belief_support_mdp(m: Pomdp) -> BeliefSupportMdp:
    """Reachable belief supports of ``m``, starting from the known initial state."""
    bsm = BeliefSupportMdp(m)
    idx = m.state_index
    bsm.initial = bsm.intern((m.initial,))
    queue = [bsm.initial]
    seen = {bsm.initial}
    while queue:
        i = queue.pop(0)
        support = bsm.supports[i]
        for a in m.actions:
            landed = set()
            for s in support:
                landed.update(m.succ(s, a).support)
            groups: dict[int, list[str]] = {}
            for s in landed:
                groups.setdefault(m.obs_block(1, s), []).append(s)
            out = []
            for block, members in sorted(groups.items()):
                support2 = tuple(sorted(members, key=idx.__getitem__))
                j = bsm.intern(support2)
                out.append((block, j))
                if j not in seen:
                    seen.add(j)
                    queue.append(j)
            bsm.trans[(i, a)] = tuple(out)
    return bsm
