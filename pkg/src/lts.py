"""Bounded state-space exploration and the visibility predicates."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, Set, Tuple

import networkx as nx

from .labels import Label, LabelPattern, Step, format_label, label_sort_key
from .labels import is_visible as label_is_visible
from .pi_semantics import input_universe
from .sos import successors
from .syntax import pretty
from .utils import int_env
from .terms import (
    CalculusProfile,
    Name,
    Term,
    TermError,
    bang_copies,
    canonical_state,
    ensure_profile,
    is_process,
)

logger = logging.getLogger(__name__)

DEFAULT_MAX_STATES = 10000
DEFAULT_MAX_DEPTH = 64
DEFAULT_MAX_BANG_UNFOLD = 3


@dataclass(frozen=True)
class ExplorationBounds:
    max_states: int = DEFAULT_MAX_STATES
    max_depth: int = DEFAULT_MAX_DEPTH
    max_bang_unfold: int = DEFAULT_MAX_BANG_UNFOLD

    def __post_init__(self) -> None:
        for key in ("max_states", "max_depth", "max_bang_unfold"):
            if getattr(self, key) < 1:
                raise ValueError(f"{key} must be at least 1")

    @classmethod
    def from_env(cls) -> "ExplorationBounds":
        return cls(
            max_states=int_env("REPFREE_MAX_STATES", DEFAULT_MAX_STATES),
            max_depth=int_env("REPFREE_MAX_DEPTH", DEFAULT_MAX_DEPTH),
            max_bang_unfold=int_env("REPFREE_MAX_BANG_UNFOLD", DEFAULT_MAX_BANG_UNFOLD),
        )

    def override(self, **values: Optional[int]) -> "ExplorationBounds":
        current = self.to_dict()
        current.update({k: v for k, v in values.items() if v is not None})
        return ExplorationBounds(**current)

    def scaled(self, factor: int) -> "ExplorationBounds":
        return ExplorationBounds(
            self.max_states * factor, self.max_depth * factor, self.max_bang_unfold * factor
        )

    def to_dict(self) -> Dict[str, int]:
        return {
            "max_states": self.max_states,
            "max_depth": self.max_depth,
            "max_bang_unfold": self.max_bang_unfold,
        }


Edge = Tuple[int, Label, int]


@dataclass
class Lts:
    states: List[Term]
    edges: List[Edge]
    complete: bool
    bounds_used: ExplorationBounds
    profile: CalculusProfile
    universe: Tuple[Name, ...] = ()
    expanded: Set[int] = field(default_factory=set)
    bounds_hit: Set[str] = field(default_factory=set)
    root: int = 0

    def __post_init__(self) -> None:
        self._out: Dict[int, List[Edge]] = {i: [] for i in range(len(self.states))}
        for edge in self.edges:
            self._out[edge[0]].append(edge)

    def out_edges(self, state: int) -> List[Edge]:
        return self._out.get(state, [])

    def describe_bounds(self) -> str:
        return ", ".join(sorted(self.bounds_hit)) or "none"


def explore(
    t: Term,
    p: CalculusProfile,
    b: Optional[ExplorationBounds] = None,
    universe: Optional[Tuple[Name, ...]] = None,
) -> Lts:
    """Breadth-first closure of ``t`` under the transition relation, within bounds."""
    if not is_process(t):
        raise TermError("context not a process")
    ensure_profile(t, p)
    bounds = b or ExplorationBounds.from_env()
    root = canonical_state(t, p)
    if universe is None and not p.ccs_family:
        universe = input_universe([root])

    states: List[Term] = [root]
    index: Dict[Term, int] = {root: 0}
    depth: List[int] = [0]
    edges: List[Edge] = []
    expanded: Set[int] = set()
    hit: Set[str] = set()

    i = 0
    while i < len(states):
        source = states[i]
        if depth[i] >= bounds.max_depth:
            hit.add("max_depth")
            i += 1
            continue
        full = True
        steps = sorted(
            successors(source, p, universe),
            key=lambda s: (label_sort_key(s.label), pretty(s.target)),
        )
        for step in steps:
            if bang_copies(step.target) > bounds.max_bang_unfold:
                hit.add("max_bang_unfold")
                full = False
                continue
            j = index.get(step.target)
            if j is None:
                if len(states) >= bounds.max_states:
                    hit.add("max_states")
                    full = False
                    continue
                j = len(states)
                states.append(step.target)
                index[step.target] = j
                depth.append(depth[i] + 1)
            edges.append((i, step.label, j))
        if full:
            expanded.add(i)
        i += 1

    if hit:
        logger.info("exploration stopped at bound(s): %s", ", ".join(sorted(hit)))
    logger.debug("explored %d state(s), %d edge(s)", len(states), len(edges))
    return Lts(
        states=states,
        edges=edges,
        complete=not hit,
        bounds_used=bounds,
        profile=p,
        universe=tuple(universe or ()),
        expanded=expanded,
        bounds_hit=hit,
    )


def weak_reach(l: Lts, s: int) -> Set[int]:
    """States reachable from ``s`` through invisible edges only, ``s`` included."""
    seen = {s}
    frontier = [s]
    while frontier:
        current = frontier.pop()
        for _, label, target in l.out_edges(current):
            if not label_is_visible(label) and target not in seen:
                seen.add(target)
                frontier.append(target)
    return seen


HOLDS = "holds"
FAILS = "fails"
UNKNOWN = "unknown"


@dataclass
class Verdict:
    status: str
    trace: List[Step] = field(default_factory=list)
    reason: Optional[str] = None

    @property
    def holds(self) -> bool:
        return self.status == HOLDS

    @property
    def fails(self) -> bool:
        return self.status == FAILS

    @property
    def unknown(self) -> bool:
        return self.status == UNKNOWN

    def printed_trace(self) -> List[str]:
        return [format_label(step.label) for step in self.trace]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "status": self.status,
            "trace": [
                {"label": format_label(step.label), "target": pretty(step.target)}
                for step in self.trace
            ],
            "reason": self.reason,
        }


def search_visible(
    l: Lts,
    wanted: Callable[[Label], bool],
    start: Optional[int] = None,
) -> Verdict:
    """Look for a weak path ending in a visible edge accepted by ``wanted``."""
    origin = l.root if start is None else start
    parent: Dict[int, Optional[Tuple[int, Label]]] = {origin: None}
    order = [origin]
    k = 0
    while k < len(order):
        current = order[k]
        k += 1
        for _, label, target in l.out_edges(current):
            if label_is_visible(label):
                if wanted(label):
                    return Verdict(HOLDS, _trace(l, parent, current) + [Step(label, l.states[target])])
            elif target not in parent:
                parent[target] = (current, label)
                order.append(target)
    unexpanded = [state for state in order if state not in l.expanded]
    if unexpanded:
        return Verdict(UNKNOWN, reason=l.describe_bounds())
    return Verdict(FAILS)


def _trace(l: Lts, parent, state: int) -> List[Step]:
    steps: List[Step] = []
    while parent[state] is not None:
        previous, label = parent[state]
        steps.append(Step(label, l.states[state]))
        state = previous
    return list(reversed(steps))


def visible_in(l: Lts, state: Optional[int] = None) -> Verdict:
    return search_visible(l, lambda label: True, state)


def invisible_in(l: Lts, state: Optional[int] = None) -> Verdict:
    return negate(visible_in(l, state))


def negate(verdict: Verdict) -> Verdict:
    if verdict.holds:
        return Verdict(FAILS, trace=verdict.trace)
    if verdict.fails:
        return Verdict(HOLDS)
    return verdict


def can_perform(
    t: Term,
    p: CalculusProfile,
    b: Optional[ExplorationBounds],
    alpha: LabelPattern,
) -> Verdict:
    return search_visible(explore(t, p, b), alpha.matches)


def is_visible(t: Term, p: CalculusProfile, b: Optional[ExplorationBounds] = None) -> Verdict:
    return visible_in(explore(t, p, b))


def is_invisible(t: Term, p: CalculusProfile, b: Optional[ExplorationBounds] = None) -> Verdict:
    return negate(is_visible(t, p, b))


# --- export ---------------------------------------------------------------


def to_graph(l: Lts) -> nx.MultiDiGraph:
    graph = nx.MultiDiGraph(complete=l.complete)
    for i, state in enumerate(l.states):
        graph.add_node(i, label=pretty(state), root=(i == l.root))
    for source, label, target in l.edges:
        graph.add_edge(source, target, label=format_label(label), visible=label_is_visible(label))
    return graph


def _dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(l: Lts) -> str:
    graph = nx.MultiDiGraph()
    graph.graph["graph"] = {"label": _dot_quote(f"complete={str(l.complete).lower()}")}
    for i, state in enumerate(l.states):
        attrs = {"label": _dot_quote(pretty(state))}
        if i == l.root:
            attrs["shape"] = "doublecircle"
        graph.add_node(i, **attrs)
    for source, label, target in l.edges:
        graph.add_edge(source, target, label=_dot_quote(format_label(label)))
    return nx.nx_pydot.to_pydot(graph).to_string()


def to_json_dict(l: Lts) -> Dict[str, Any]:
    return {
        "root": l.root,
        "complete": l.complete,
        "bounds": l.bounds_used.to_dict(),
        "bounds_hit": sorted(l.bounds_hit),
        "states": [pretty(state) for state in l.states],
        "edges": [
            {"src": source, "label": format_label(label), "dst": target}
            for source, label, target in l.edges
        ],
    }


def reachable_states(l: Lts, start: Optional[int] = None) -> Set[int]:
    origin = l.root if start is None else start
    return {origin} | nx.descendants(to_graph(l), origin)


def labels_of(l: Lts) -> Iterable[Label]:
    return {label for _, label, _ in l.edges}
