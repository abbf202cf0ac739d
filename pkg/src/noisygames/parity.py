"""Finite perfect-information parity games and a recursive solver.

Plays are infinite; the winner is decided by the minimum priority seen
infinitely often, even for Player 1 and odd for Player 2. The solver is
the classical recursive (Zielonka) procedure with attractor witnesses,
kept deliberately small so it can be validated exhaustively against
brute-force strategy enumeration on little games.

Everything here is integer-indexed and deterministic: successor lists
are sorted once, attractors are peeled in layers, and witness choices
always take the lowest-numbered successor, so repeated runs and
different platforms produce identical strategies.
"""

from __future__ import annotations

import sys

from .core import DomainError

__all__ = ["ParityGame", "solve_parity_raw"]


class ParityGame:
    """owner[i] in {1, 2}; priority[i] >= 0; succ[i] a nonempty list of nodes."""

    __slots__ = ("owner", "priority", "succ", "n")

    def __init__(self, owner, priority, succ):
        self.owner = list(owner)
        self.priority = list(priority)
        self.succ = [sorted(set(ws)) for ws in succ]
        self.n = len(self.owner)
        if not (len(self.priority) == len(self.succ) == self.n):
            raise DomainError("owner, priority and successor lists must have equal length")
        for i in range(self.n):
            if self.owner[i] not in (1, 2):
                raise DomainError(f"node {i}: owner must be 1 or 2")
            if self.priority[i] < 0:
                raise DomainError(f"node {i}: negative priority")
            if not self.succ[i]:
                raise DomainError(f"node {i}: no successors")
            for w in self.succ[i]:
                if not 0 <= w < self.n:
                    raise DomainError(f"node {i}: successor {w} out of range")


def _attractor(pg: ParityGame, base, player: int, region, pred):
    """Layered attractor of ``base`` for ``player`` inside ``region``.

    Returns the attracted set and, for the player's nodes pulled in, the
    lowest-numbered successor that was already attracted one layer
    earlier. Layering makes the witness independent of set iteration
    order.
    """
    attr = set(base)
    strat: dict[int, int] = {}
    frontier = sorted(attr)
    while frontier:
        cand = set()
        for v in frontier:
            cand.update(pred[v])
        newly = []
        for u in sorted(cand):
            if u not in region or u in attr:
                continue
            if pg.owner[u] == player:
                pick = None
                for w in pg.succ[u]:
                    if w in attr:
                        pick = w
                        break
                if pick is not None:
                    attr.add(u)
                    strat[u] = pick
                    newly.append(u)
            else:
                if all(w not in region or w in attr for w in pg.succ[u]):
                    attr.add(u)
                    newly.append(u)
        frontier = newly
    return attr, strat


def solve_parity_raw(pg: ParityGame):
    """Solve; returns (win1, win2, strategy1, strategy2).

    The two sets partition the nodes; each strategy is a memoryless
    successor choice covering the winner's nodes inside their region.
    """
    pred = [set() for _ in range(pg.n)]
    for u in range(pg.n):
        for w in pg.succ[u]:
            pred[w].add(u)

    limit = sys.getrecursionlimit()
    want = 4 * pg.n + 1000
    if want > limit:
        sys.setrecursionlimit(want)

    def rec(region: frozenset):
        if not region:
            return frozenset(), frozenset(), {}, {}
        d = min(pg.priority[v] for v in region)
        pl = 1 if d % 2 == 0 else 2
        top = {v for v in region if pg.priority[v] == d}
        attr, s_attr = _attractor(pg, top, pl, region, pred)
        w1, w2, s1, s2 = rec(region - attr)
        w_op, s_op = (w2, s2) if pl == 1 else (w1, s1)
        if not w_op:
            strat = dict(s1 if pl == 1 else s2)
            strat.update(s_attr)
            for v in sorted(top):
                if pg.owner[v] == pl and v not in strat:
                    strat[v] = next(w for w in pg.succ[v] if w in region)
            if pl == 1:
                return frozenset(region), frozenset(), strat, {}
            return frozenset(), frozenset(region), {}, strat
        trap, s_trap = _attractor(pg, w_op, 3 - pl, region, pred)
        w1b, w2b, s1b, s2b = rec(region - trap)
        if pl == 1:
            strat2 = dict(s2b)
            strat2.update(s_trap)
            strat2.update(s_op)
            return frozenset(w1b), frozenset(w2b | trap), dict(s1b), strat2
        strat1 = dict(s1b)
        strat1.update(s_trap)
        strat1.update(s_op)
        return frozenset(w1b | trap), frozenset(w2b), strat1, dict(s2b)

    return rec(frozenset(range(pg.n)))
