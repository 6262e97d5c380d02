"""Stratified weak simulation between two explored LTSs.

``sim_k(lq, lp, 0)`` is the full product of the state sets; stratum
``k + 1`` keeps the pairs (q, p) where every move of q is weakly matched
by p into stratum ``k``. On finite LTSs the strata shrink until they
reach the limit relation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from .labels import Label, Step, format_label, is_visible
from .lts import ExplorationBounds, Lts, explore, weak_reach
from .pi_semantics import input_universe
from .terms import CalculusProfile, Term, alpha_canonical

logger = logging.getLogger(__name__)

Pair = Tuple[int, int]


class IncompleteLtsError(RuntimeError):
    """Simulation needs fully explored state spaces."""

    def __init__(self, side: str, lts: Lts) -> None:
        self.side = side
        self.bounds_hit = sorted(lts.bounds_hit)
        self.bounds = lts.bounds_used.to_dict()
        super().__init__(
            f"LTS of {side} is incomplete (bounds hit: {', '.join(self.bounds_hit)})"
        )


@dataclass(frozen=True)
class SimRelation:
    pairs: FrozenSet[Pair]
    # None marks the limit relation
    k: Optional[int]
    converged_at: Optional[int] = None

    def __contains__(self, pair: Pair) -> bool:
        return pair in self.pairs

    def holds_at_roots(self, lq: Lts, lp: Lts) -> bool:
        return (lq.root, lp.root) in self.pairs

    def to_dict(self) -> Dict[str, Any]:
        return {
            "k": "omega" if self.k is None else self.k,
            "converged_at": self.converged_at,
            "pairs": [list(pair) for pair in sorted(self.pairs)],
        }


class _WeakMoves:
    """Precomputed weak transitions of one LTS."""

    def __init__(self, lts: Lts) -> None:
        self.lts = lts
        self.closure: Dict[int, Set[int]] = {s: weak_reach(lts, s) for s in range(len(lts.states))}
        self._moves: Dict[int, Dict[Label, Set[int]]] = {}

    def after(self, state: int, label: Label) -> Set[int]:
        """States reached by tau* label tau*; the empty move for invisible labels."""
        if not is_visible(label):
            return self.closure[state]
        table = self._moves.get(state)
        if table is None:
            table = {}
            for mid in self.closure[state]:
                for _, edge_label, target in self.lts.out_edges(mid):
                    if is_visible(edge_label):
                        table.setdefault(edge_label, set()).update(self.closure[target])
            self._moves[state] = table
        return table.get(label, set())


def _require_complete(lq: Lts, lp: Lts) -> None:
    if not lq.complete:
        raise IncompleteLtsError("Q", lq)
    if not lp.complete:
        raise IncompleteLtsError("P", lp)


def _transfer(q: int, p: int, lq: Lts, moves: _WeakMoves, relation: Set[Pair]) -> bool:
    for _, label, q_next in lq.out_edges(q):
        if not any((q_next, p_next) in relation for p_next in moves.after(p, label)):
            return False
    return True


def _strata(lq: Lts, lp: Lts):
    """Yield stratum 0, 1, 2, ... until two consecutive strata coincide."""
    _require_complete(lq, lp)
    moves = _WeakMoves(lp)
    current = {(q, p) for q in range(len(lq.states)) for p in range(len(lp.states))}
    k = 0
    yield k, current
    while True:
        refined = {(q, p) for q, p in current if _transfer(q, p, lq, moves, current)}
        k += 1
        yield k, refined
        if refined == current:
            return
        current = refined


def sim_k(lq: Lts, lp: Lts, k: int) -> SimRelation:
    if k < 0:
        raise ValueError("k must be a natural number")
    last: Set[Pair] = set()
    for level, relation in _strata(lq, lp):
        last = relation
        if level == k:
            break
    return SimRelation(frozenset(last), k)


def sim_omega(lq: Lts, lp: Lts) -> SimRelation:
    previous: Optional[Set[Pair]] = None
    converged = 0
    for level, relation in _strata(lq, lp):
        if previous is not None and relation == previous:
            converged = level - 1
        previous = relation
    logger.debug("stratification converged at k=%d", converged)
    return SimRelation(frozenset(previous or set()), None, converged)


def weak_simulation_gfp(lq: Lts, lp: Lts) -> SimRelation:
    """Greatest weak simulation by repeated removal of failing pairs."""
    _require_complete(lq, lp)
    moves = _WeakMoves(lp)
    relation = {(q, p) for q in range(len(lq.states)) for p in range(len(lp.states))}
    changed = True
    while changed:
        changed = False
        for pair in sorted(relation):
            if not _transfer(pair[0], pair[1], lq, moves, relation):
                relation.discard(pair)
                changed = True
    return SimRelation(frozenset(relation), None)


def distinguishing_depth(lq: Lts, lp: Lts) -> Optional[int]:
    root = (lq.root, lp.root)
    for level, relation in _strata(lq, lp):
        if root not in relation:
            return level
    return None


def distinguishing_moves(lq: Lts, lp: Lts) -> List[Step]:
    """A sequence of Q moves that P cannot follow, shortest first move first."""
    depth = distinguishing_depth(lq, lp)
    if depth is None:
        return []
    strata: List[Set[Pair]] = []
    for level, relation in _strata(lq, lp):
        strata.append(relation)
        if level == depth:
            break
    moves = _WeakMoves(lp)
    q, p = lq.root, lp.root
    found: List[Step] = []
    for level in range(depth, 0, -1):
        below = strata[level - 1]
        chosen = None
        for _, label, q_next in lq.out_edges(q):
            matches = sorted(moves.after(p, label))
            if not any((q_next, p_next) in below for p_next in matches):
                chosen = (label, q_next, matches)
                break
        if chosen is None:
            break
        label, q_next, matches = chosen
        found.append(Step(label, lq.states[q_next]))
        if not matches:
            break
        q, p = q_next, matches[0]
    return found


def explore_pair(
    q: Term,
    p: Term,
    profile: CalculusProfile,
    bounds: Optional[ExplorationBounds] = None,
) -> Tuple[Lts, Lts]:
    """Explore both processes over one shared input universe."""
    universe = None
    if not profile.ccs_family:
        universe = input_universe([alpha_canonical(q), alpha_canonical(p)])
    return explore(q, profile, bounds, universe), explore(p, profile, bounds, universe)


def format_moves(steps: Sequence[Step]) -> List[str]:
    return [format_label(step.label) for step in steps]
