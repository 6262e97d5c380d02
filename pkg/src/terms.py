"""Names, the unified process AST, substitution, alpha-canonical forms,
contexts and calculus profiles shared by every calculus of the workbench."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field, fields, replace
from typing import (
    Dict,
    FrozenSet,
    Iterable,
    Iterator,
    List,
    Mapping,
    Optional,
    Set,
    Tuple,
    Union,
)

IDENT_RE = re.compile(r"^[a-zA-Z][a-zA-Z0-9_]*$")

# Texts reserved for machine-generated names.
CANONICAL = "#"
EXTRUDED = "~"
FRESH = "fresh"


class TermError(ValueError):
    """Raised for ill-formed terms, contexts and definitions."""


class OrderError(ValueError):
    """Raised when a priority order is not an irreflexive partial order."""


class ProfileError(ValueError):
    """Raised when a term uses constructs its calculus does not admit."""

    def __init__(self, violations: List["Violation"]) -> None:
        self.violations = list(violations)
        summary = "; ".join(str(item) for item in self.violations[:5])
        super().__init__(summary or "profile violation")


@dataclass(frozen=True)
class Name:
    text: str
    fresh_index: Optional[int] = None

    def __post_init__(self) -> None:
        if not self.text:
            raise TermError("names must be nonempty")

    def __str__(self) -> str:
        if self.fresh_index is None:
            return self.text
        if self.text in (CANONICAL, EXTRUDED):
            return f"{self.text}{self.fresh_index}"
        return f"{self.text}#{self.fresh_index}"


@dataclass(frozen=True)
class KillerLabel:
    text: str
    fresh_index: Optional[int] = None

    def __str__(self) -> str:
        if self.fresh_index is None:
            return self.text
        if self.text == CANONICAL:
            return f"{self.text}{self.fresh_index}"
        return f"{self.text}#{self.fresh_index}"


def name_key(name: Name) -> Tuple[str, int]:
    """Total order on names, used wherever output must be deterministic."""
    return (name.text, -1 if name.fresh_index is None else name.fresh_index)


def sorted_names(names: Iterable[Name]) -> List[Name]:
    return sorted(names, key=name_key)


def fresh_name(base: Name, avoid: Iterable[Name]) -> Name:
    """Smallest indexed variant of ``base`` outside ``avoid``."""
    taken = set(avoid)
    index = 0
    while True:
        candidate = Name(base.text, index)
        if candidate not in taken:
            return candidate
        index += 1


class Level(enum.IntEnum):
    ORDINARY = 0
    PRIORITIZED = 1


LEVELS = (Level.ORDINARY, Level.PRIORITIZED)


class Polarity(str, enum.Enum):
    IN = "in"
    OUT = "out"

    def flip(self) -> "Polarity":
        return Polarity.OUT if self is Polarity.IN else Polarity.IN


# --- prefix actions -------------------------------------------------------


@dataclass(frozen=True)
class Tau:
    guard: FrozenSet[Name] = frozenset()


@dataclass(frozen=True)
class CcsAct:
    name: Name
    polarity: Polarity = Polarity.IN
    level: Level = Level.ORDINARY
    guard: FrozenSet[Name] = frozenset()


@dataclass(frozen=True)
class PiOut:
    subject: Tuple[Name, ...]
    payload: Tuple[Name, ...]

    def __post_init__(self) -> None:
        if not self.subject or not self.payload:
            raise TermError("output subject and payload must be nonempty tuples")


@dataclass(frozen=True)
class Placeholder:
    name: Name


@dataclass(frozen=True)
class Protected:
    name: Name


PatternItem = Union[Placeholder, Protected]


@dataclass(frozen=True)
class PiIn:
    subject: Tuple[Name, ...]
    pattern: Tuple[PatternItem, ...]

    def __post_init__(self) -> None:
        if not self.subject or not self.pattern:
            raise TermError("input subject and pattern must be nonempty tuples")

    @property
    def placeholders(self) -> Tuple[Name, ...]:
        return tuple(item.name for item in self.pattern if isinstance(item, Placeholder))


PrefixAction = Union[Tau, CcsAct, PiOut, PiIn]


# --- terms ----------------------------------------------------------------


class Term:
    """Base class of every AST node."""

    __slots__ = ()


@dataclass(frozen=True)
class Nil(Term):
    pass


NIL = Nil()


@dataclass(frozen=True)
class Prefix(Term):
    action: PrefixAction
    cont: Term = NIL


@dataclass(frozen=True)
class Sum(Term):
    branches: Tuple[Term, ...]

    def __post_init__(self) -> None:
        if len(self.branches) < 2:
            raise TermError("a sum needs at least two branches")


@dataclass(frozen=True)
class Par(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Nu(Term):
    name: Name
    body: Term


@dataclass(frozen=True)
class RestrictSet(Term):
    labels: FrozenSet[Tuple[Name, Level]]
    body: Term


@dataclass(frozen=True)
class Bang(Term):
    body: Term
    # replicated copies already materialized on this path
    copies: int = 0


@dataclass(frozen=True)
class Match(Term):
    lhs: Name
    rhs: Name
    cont: Term


@dataclass(frozen=True)
class Relabel(Term):
    body: Term
    # (old, new) pairs, sorted by old name
    mapping: Tuple[Tuple[Name, Name], ...]

    def as_dict(self) -> Dict[Name, Name]:
        return dict(self.mapping)


@dataclass(frozen=True)
class DefCall(Term):
    name: str
    args: Tuple[Name, ...] = ()


@dataclass(frozen=True)
class Theta(Term):
    body: Term


@dataclass(frozen=True)
class Prioritize(Term):
    body: Term
    action: Name


@dataclass(frozen=True)
class Deprioritize(Term):
    body: Term
    action: Name


@dataclass(frozen=True)
class Kill(Term):
    label: KillerLabel


@dataclass(frozen=True)
class Delimit(Term):
    label: KillerLabel
    body: Term


@dataclass(frozen=True)
class Hole(Term):
    index: int

    def __post_init__(self) -> None:
        if self.index < 1:
            raise TermError("hole indices start at 1")


def make_relabel(body: Term, mapping: Mapping[Name, Name]) -> Relabel:
    pairs = tuple(sorted(mapping.items(), key=lambda item: name_key(item[0])))
    return Relabel(body, pairs)


# --- generic traversal ----------------------------------------------------


def subterms(t: Term) -> Iterator[Tuple[str, Term]]:
    """Direct sub-terms of ``t`` with their path segment."""
    for item in fields(t):
        value = getattr(t, item.name)
        if isinstance(value, Term):
            yield item.name, value
        elif item.name == "branches":
            for index, branch in enumerate(value):
                yield f"branches[{index}]", branch


def map_subterms(t: Term, fn) -> Term:
    changes = {}
    for item in fields(t):
        value = getattr(t, item.name)
        if isinstance(value, Term):
            changes[item.name] = fn(value)
        elif item.name == "branches":
            changes[item.name] = tuple(fn(branch) for branch in value)
    return replace(t, **changes) if changes else t


def walk(t: Term) -> Iterator[Term]:
    yield t
    for _, child in subterms(t):
        yield from walk(child)


def holes(t: Term) -> Set[int]:
    return {node.index for node in walk(t) if isinstance(node, Hole)}


def is_process(t: Term) -> bool:
    return not holes(t)


def bang_copies(t: Term) -> int:
    """Largest replication counter in ``t``."""
    return max((node.copies for node in walk(t) if isinstance(node, Bang)), default=0)


def _require_process(t: Term) -> None:
    if not is_process(t):
        raise TermError("context not a process")


# --- free names -----------------------------------------------------------

Occurrence = Tuple[Name, Level]


def _both_levels(name: Name) -> Set[Occurrence]:
    return {(name, level) for level in LEVELS}


def _action_occurrences(action: PrefixAction) -> Set[Occurrence]:
    found: Set[Occurrence] = set()
    if isinstance(action, Tau):
        found.update((n, Level.ORDINARY) for n in action.guard)
    elif isinstance(action, CcsAct):
        found.add((action.name, action.level))
        found.update((n, Level.ORDINARY) for n in action.guard)
    elif isinstance(action, PiOut):
        found.update((n, Level.ORDINARY) for n in action.subject + action.payload)
    elif isinstance(action, PiIn):
        found.update((n, Level.ORDINARY) for n in action.subject)
        found.update(
            (item.name, Level.ORDINARY) for item in action.pattern if isinstance(item, Protected)
        )
    return found


def free_occurrences(t: Term) -> Set[Occurrence]:
    """Free (name, level) occurrences; levels only matter for CCS actions."""
    if isinstance(t, (Nil, Kill, Hole)):
        return set()
    if isinstance(t, Prefix):
        found = _action_occurrences(t.action)
        inner = free_occurrences(t.cont)
        if isinstance(t.action, PiIn):
            bound = set(t.action.placeholders)
            inner = {occ for occ in inner if occ[0] not in bound}
        return found | inner
    if isinstance(t, Nu):
        return {occ for occ in free_occurrences(t.body) if occ[0] != t.name}
    if isinstance(t, RestrictSet):
        return free_occurrences(t.body) - set(t.labels)
    if isinstance(t, Match):
        return {(t.lhs, Level.ORDINARY), (t.rhs, Level.ORDINARY)} | free_occurrences(t.cont)
    if isinstance(t, Relabel):
        mapping = t.as_dict()
        return {(mapping.get(n, n), lvl) for n, lvl in free_occurrences(t.body)}
    if isinstance(t, DefCall):
        return {(n, Level.ORDINARY) for n in t.args}
    if isinstance(t, Prioritize):
        return free_occurrences(t.body) | {(t.action, Level.ORDINARY)}
    if isinstance(t, Deprioritize):
        return free_occurrences(t.body) | {(t.action, Level.PRIORITIZED)}
    found = set()
    for _, child in subterms(t):
        found |= free_occurrences(child)
    return found


def free_names(t: Term) -> Set[Name]:
    _require_process(t)
    return {name for name, _ in free_occurrences(t)}


def is_closed(t: Term) -> bool:
    return not free_names(t)


def independent(p: Term, q: Term) -> bool:
    return not (free_names(p) & free_names(q))


def erase_holes(t: Term) -> Term:
    """Replace every hole by ``0``; used to inspect the names of a context."""
    if isinstance(t, Hole):
        return NIL
    return map_subterms(t, erase_holes)


# --- substitution ---------------------------------------------------------

Substitution = Dict[Name, Name]


class _Renaming:
    """A name map that leaves alone occurrences at blocked (name, level) pairs."""

    def __init__(self, mapping: Mapping[Name, Name], blocked: FrozenSet[Occurrence] = frozenset()):
        self.mapping = dict(mapping)
        self.blocked = blocked

    def __call__(self, name: Name, level: Level = Level.ORDINARY) -> Name:
        if (name, level) in self.blocked:
            return name
        return self.mapping.get(name, name)

    def block(self, pairs: Iterable[Occurrence]) -> "_Renaming":
        return _Renaming(self.mapping, self.blocked | frozenset(pairs))

    def is_identity_on(self, occurrences: Iterable[Occurrence]) -> bool:
        return all(self(name, level) == name for name, level in occurrences)


def _rename_action(action: PrefixAction, ren: _Renaming) -> PrefixAction:
    ordinary = Level.ORDINARY
    if isinstance(action, Tau):
        return Tau(frozenset(ren(n, ordinary) for n in action.guard))
    if isinstance(action, CcsAct):
        return CcsAct(
            ren(action.name, action.level),
            action.polarity,
            action.level,
            frozenset(ren(n, ordinary) for n in action.guard),
        )
    if isinstance(action, PiOut):
        return PiOut(
            tuple(ren(n, ordinary) for n in action.subject),
            tuple(ren(n, ordinary) for n in action.payload),
        )
    pattern = tuple(
        Protected(ren(item.name, ordinary)) if isinstance(item, Protected) else item
        for item in action.pattern
    )
    return PiIn(tuple(ren(n, ordinary) for n in action.subject), pattern)


def _captures(body: Term, bound: Set[Occurrence], ren: _Renaming) -> Set[Name]:
    """Bound names that the renaming would capture inside ``body``."""
    hit: Set[Name] = set()
    for name, level in free_occurrences(body):
        if (name, level) in bound:
            continue
        target = ren(name, level)
        if (target, level) in bound:
            hit.add(target)
    return hit


def _avoid_set(body: Term, ren: _Renaming) -> Set[Name]:
    occurrences = free_occurrences(body)
    return {name for name, _ in occurrences} | {ren(n, lvl) for n, lvl in occurrences}


def _rename(t: Term, ren: _Renaming) -> Term:
    if isinstance(t, (Nil, Kill, Hole)):
        return t
    if isinstance(t, Prefix):
        action = _rename_action(t.action, ren)
        if not isinstance(t.action, PiIn) or not t.action.placeholders:
            return Prefix(action, _rename(t.cont, ren))
        cont = t.cont
        placeholders = list(t.action.placeholders)
        bound = set().union(*(_both_levels(n) for n in placeholders))
        inner = ren.block(bound)
        captured = _captures(cont, bound, inner)
        if captured:
            avoid = _avoid_set(cont, inner) | set(placeholders)
            swap: Dict[Name, Name] = {}
            for name in placeholders:
                if name in captured:
                    swap[name] = fresh_name(name, avoid | set(swap.values()))
            cont = _rename(cont, _Renaming(swap))
            placeholders = [swap.get(n, n) for n in placeholders]
            action = _rename_action(
                PiIn(
                    t.action.subject,
                    tuple(
                        Placeholder(swap.get(item.name, item.name))
                        if isinstance(item, Placeholder)
                        else item
                        for item in t.action.pattern
                    ),
                ),
                ren,
            )
            bound = set().union(*(_both_levels(n) for n in placeholders))
            inner = ren.block(bound)
        return Prefix(action, _rename(cont, inner))
    if isinstance(t, Nu):
        name, body = t.name, t.body
        bound = _both_levels(name)
        inner = ren.block(bound)
        if _captures(body, bound, inner):
            new = fresh_name(name, _avoid_set(body, inner) | {name})
            body = _rename(body, _Renaming({name: new}))
            name, bound = new, _both_levels(new)
            inner = ren.block(bound)
        return Nu(name, _rename(body, inner))
    if isinstance(t, RestrictSet):
        labels, body = set(t.labels), t.body
        inner = ren.block(labels)
        captured = _captures(body, labels, inner)
        if captured:
            avoid = _avoid_set(body, inner) | {n for n, _ in labels}
            for name in sorted_names(captured):
                new = fresh_name(name, avoid)
                avoid.add(new)
                levels = {lvl for n, lvl in labels if n == name}
                keep = frozenset((name, lvl) for lvl in LEVELS if lvl not in levels)
                body = _rename(body, _Renaming({name: new}, keep))
                labels = {(new if n == name else n, lvl) for n, lvl in labels}
            inner = ren.block(labels)
        return RestrictSet(frozenset(labels), _rename(body, inner))
    if isinstance(t, Match):
        return Match(ren(t.lhs), ren(t.rhs), _rename(t.cont, ren))
    if isinstance(t, Relabel):
        # relabelled names are local to the body
        mapping, body = t.as_dict(), t.body
        bound = set().union(*(_both_levels(n) for n in mapping))
        inner = ren.block(bound)
        captured = _captures(body, bound, inner)
        if captured:
            avoid = _avoid_set(body, inner) | set(mapping)
            swap: Dict[Name, Name] = {}
            for name in sorted_names(captured):
                swap[name] = fresh_name(name, avoid)
                avoid.add(swap[name])
            body = _rename(body, _Renaming(swap))
            mapping = {swap.get(old, old): new for old, new in mapping.items()}
            inner = ren.block(set().union(*(_both_levels(n) for n in mapping)))
        return make_relabel(_rename(body, inner), {old: ren(new) for old, new in mapping.items()})
    if isinstance(t, DefCall):
        return DefCall(t.name, tuple(ren(n) for n in t.args))
    if isinstance(t, Prioritize):
        return Prioritize(_rename(t.body, ren), ren(t.action, Level.ORDINARY))
    if isinstance(t, Deprioritize):
        return Deprioritize(_rename(t.body, ren), ren(t.action, Level.PRIORITIZED))
    return map_subterms(t, lambda child: _rename(child, ren))


def apply_subst(t: Term, s: Mapping[Name, Name]) -> Term:
    """Capture-avoiding substitution of free names."""
    _require_process(t)
    mapping = {k: v for k, v in s.items() if k != v}
    if not mapping:
        return t
    ren = _Renaming(mapping)
    if ren.is_identity_on(free_occurrences(t)):
        return t
    return _rename(t, ren)


# --- contexts -------------------------------------------------------------


def plug(c: Term, fillers: List[Term]) -> Term:
    """Literal hole replacement; binders above a hole may capture filler names."""
    indices = holes(c)
    k = len(fillers)
    if indices != set(range(1, k + 1)):
        raise TermError(
            f"context has holes {sorted(indices)} but {k} filler(s) were given"
        )
    for filler in fillers:
        if not is_process(filler):
            raise TermError("fillers must not contain holes")

    def fill(t: Term) -> Term:
        if isinstance(t, Hole):
            return fillers[t.index - 1]
        return map_subterms(t, fill)

    return fill(c)


# --- alpha-canonical forms -----------------------------------------------


class _OccurrenceRenaming(_Renaming):
    """A renaming keyed by (name, level) occurrences."""

    def __call__(self, name: Name, level: Level = Level.ORDINARY) -> Name:
        if (name, level) in self.blocked:
            return name
        return self.mapping.get((name, level), name)

    def block(self, pairs: Iterable[Occurrence]) -> "_OccurrenceRenaming":
        return _OccurrenceRenaming(self.mapping, self.blocked | frozenset(pairs))


def alpha_canonical(t: Term, restrictions: bool = True) -> Term:
    """Rename restriction, placeholder and delimitation binders to ``#N``.

    Indices follow a pre-order traversal and skip any ``#N`` already free
    in the term or relabelled inside it. A restricted CCS name is renamed at the levels its
    restriction binds; with ``restrictions=False`` restriction sets keep
    their names. Relabelled names stay as written inside the relabelled body.
    """
    local = {old for node in walk(t) if isinstance(node, Relabel) for old, _ in node.mapping}
    taken = {n.fresh_index for n in free_names(t) | local if n.text == CANONICAL}
    counter = [0]

    def next_index() -> int:
        while counter[0] in taken:
            counter[0] += 1
        value = counter[0]
        counter[0] += 1
        return value

    def bind(names: Dict[Occurrence, Name], old: Name, new: Name, levels=LEVELS) -> Dict[Occurrence, Name]:
        inner = dict(names)
        for level in levels:
            inner[(old, level)] = new
        return inner

    def canon(node: Term, names: Dict[Occurrence, Name], labels: Dict[KillerLabel, KillerLabel]) -> Term:
        ren = _OccurrenceRenaming(names)
        if isinstance(node, Prefix) and isinstance(node.action, PiIn):
            action = _rename_action(node.action, ren)
            inner = dict(names)
            pattern = []
            for item in action.pattern:
                if isinstance(item, Placeholder):
                    new = Name(CANONICAL, next_index())
                    inner = bind(inner, item.name, new)
                    pattern.append(Placeholder(new))
                else:
                    pattern.append(item)
            return Prefix(PiIn(action.subject, tuple(pattern)), canon(node.cont, inner, labels))
        if isinstance(node, Prefix):
            return Prefix(_rename_action(node.action, ren), canon(node.cont, names, labels))
        if isinstance(node, Nu):
            new = Name(CANONICAL, next_index())
            return Nu(new, canon(node.body, bind(names, node.name, new), labels))
        if isinstance(node, Delimit):
            new_label = KillerLabel(CANONICAL, next_index())
            inner_labels = dict(labels)
            inner_labels[node.label] = new_label
            return Delimit(new_label, canon(node.body, names, inner_labels))
        if isinstance(node, Kill):
            return Kill(labels.get(node.label, node.label))
        if isinstance(node, RestrictSet):
            inner = dict(names)
            restricted = []
            for name in sorted_names({n for n, _ in node.labels}):
                levels = [lvl for lvl in LEVELS if (name, lvl) in node.labels]
                new = Name(CANONICAL, next_index()) if restrictions else name
                inner = bind(inner, name, new, levels)
                restricted.extend((new, lvl) for lvl in levels)
            return RestrictSet(frozenset(restricted), canon(node.body, inner, labels))
        if isinstance(node, Relabel):
            local = {(old, lvl) for old, _ in node.mapping for lvl in LEVELS}
            inner = {k: v for k, v in names.items() if k not in local}
            mapping = {old: ren(new) for old, new in node.mapping}
            return make_relabel(canon(node.body, inner, labels), mapping)
        if isinstance(node, (Match, DefCall, Prioritize, Deprioritize)):
            head = _rename(_strip_children(node), ren)
            return _restore_children(head, node, lambda child: canon(child, names, labels))
        return map_subterms(node, lambda child: canon(child, names, labels))

    return canon(t, {}, {})


def _strip_children(t: Term) -> Term:
    return map_subterms(t, lambda _child: NIL)


def _restore_children(head: Term, original: Term, fn) -> Term:
    changes = {}
    for item in fields(original):
        value = getattr(original, item.name)
        if isinstance(value, Term):
            changes[item.name] = fn(value)
    return replace(head, **changes) if changes else head


def alpha_equivalent(p: Term, q: Term) -> bool:
    return alpha_canonical(p) == alpha_canonical(q)


def canonical_state(t: Term, p: CalculusProfile) -> Term:
    """Canonical form used for states: restrictions keep their names where
    labels or priority orders read them."""
    return alpha_canonical(t, restrictions=p.canonical_restrictions)


# --- priority orders and definitions -------------------------------------


def action_key(name: Optional[Name], polarity: Optional[Polarity] = None) -> str:
    """Key used by priority orders: ``tau``, ``a`` or ``'a``."""
    if name is None:
        return "tau"
    return f"'{name}" if polarity is Polarity.OUT else str(name)


@dataclass(frozen=True)
class PriorityOrder:
    pairs: FrozenSet[Tuple[str, str]] = frozenset()

    @classmethod
    def from_pairs(cls, pairs: Iterable[Iterable[str]]) -> "PriorityOrder":
        closure: Set[Tuple[str, str]] = set()
        for pair in pairs:
            items = tuple(pair)
            if len(items) != 2:
                raise OrderError(f"order entries are pairs, got {list(items)}")
            closure.add((str(items[0]), str(items[1])))
        changed = True
        while changed:
            changed = False
            for low, mid in list(closure):
                for mid2, high in list(closure):
                    if mid == mid2 and (low, high) not in closure:
                        closure.add((low, high))
                        changed = True
        reflexive = sorted(low for low, high in closure if low == high)
        if reflexive:
            raise OrderError(f"priority order is not irreflexive at {reflexive[0]}")
        return cls(frozenset(closure))

    def preempted(self, low: str, present: Iterable[str]) -> bool:
        return any((low, high) in self.pairs for high in present)


EMPTY_ORDER = PriorityOrder()


@dataclass(frozen=True)
class Definition:
    params: Tuple[Name, ...]
    body: Term


@dataclass(frozen=True)
class DefinitionEnv:
    entries: Tuple[Tuple[str, Definition], ...] = ()

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, Definition]) -> "DefinitionEnv":
        env = cls(tuple(sorted(mapping.items())))
        env.validate()
        return env

    def lookup(self, name: str) -> Definition:
        for key, definition in self.entries:
            if key == name:
                return definition
        raise TermError(f"undefined process identifier {name}")

    def names(self) -> List[str]:
        return [key for key, _ in self.entries]

    def validate(self) -> None:
        for key, definition in self.entries:
            if len(set(definition.params)) != len(definition.params):
                raise TermError(f"definition {key} repeats a parameter")
            if not is_process(definition.body):
                raise TermError(f"definition {key} contains a hole")
            unbound = free_names(definition.body) - set(definition.params)
            if unbound:
                listed = ", ".join(str(n) for n in sorted_names(unbound))
                raise TermError(f"definition {key} has unbound free names: {listed}")
            for node in walk(definition.body):
                if isinstance(node, DefCall):
                    self.check_call(node)

    def check_call(self, call: DefCall) -> Definition:
        definition = self.lookup(call.name)
        if len(call.args) != len(definition.params):
            raise TermError(
                f"{call.name} expects {len(definition.params)} argument(s), got {len(call.args)}"
            )
        return definition

    def unfold(self, call: DefCall) -> Term:
        definition = self.check_call(call)
        return apply_subst(definition.body, dict(zip(definition.params, call.args)))


EMPTY_ENV = DefinitionEnv()


# --- calculus profiles ----------------------------------------------------


class Calculus(str, enum.Enum):
    CCS = "ccs"
    PI = "pi"
    PIMPM = "pimpm"
    BCCSP_THETA = "bccsp-theta"
    CPG = "cpg"
    CCS_SG = "ccs-sg"
    CCS_PRIO = "ccs-prio"
    COWS = "cows"


CCS_FAMILY = {Calculus.CCS, Calculus.BCCSP_THETA, Calculus.CPG, Calculus.CCS_SG, Calculus.CCS_PRIO}
PI_FAMILY = {Calculus.PI, Calculus.PIMPM, Calculus.COWS}

_ADMITTED = {
    Calculus.CCS: {Nil, Prefix, Sum, Par, RestrictSet, Relabel, DefCall, Bang, Hole},
    Calculus.BCCSP_THETA: {Nil, Prefix, Sum, Theta, Hole},
    Calculus.CPG: {Nil, Prefix, Sum, Par, RestrictSet, Relabel, DefCall, Hole},
    Calculus.CCS_SG: {Nil, Prefix, Sum, Par, RestrictSet, Relabel, DefCall, Bang, Hole},
    Calculus.CCS_PRIO: {
        Nil, Prefix, Sum, Par, RestrictSet, Relabel, DefCall, Bang, Hole, Prioritize, Deprioritize,
    },
    Calculus.PI: {Nil, Prefix, Sum, Par, Nu, Bang, Match, Hole},
    Calculus.PIMPM: {Nil, Prefix, Sum, Par, Nu, Bang, Match, Hole},
    Calculus.COWS: {Nil, Prefix, Par, Kill, Delimit, Hole},
}


@dataclass(frozen=True)
class CalculusProfile:
    calculus: Calculus
    order: PriorityOrder = EMPTY_ORDER
    definitions: DefinitionEnv = field(default=EMPTY_ENV)

    @property
    def name(self) -> str:
        return self.calculus.value

    @property
    def ccs_family(self) -> bool:
        return self.calculus in CCS_FAMILY

    @property
    def canonical_restrictions(self) -> bool:
        return self.calculus not in (Calculus.BCCSP_THETA, Calculus.CPG)


def profile_for(
    calculus: Union[str, Calculus],
    order: Optional[PriorityOrder] = None,
    definitions: Optional[DefinitionEnv] = None,
) -> CalculusProfile:
    try:
        kind = Calculus(calculus)
    except ValueError as exc:
        choices = ", ".join(item.value for item in Calculus)
        raise TermError(f"unknown calculus {calculus!r} (choose from {choices})") from exc
    profile = CalculusProfile(kind, order or EMPTY_ORDER, definitions or EMPTY_ENV)
    violations: List[Violation] = []
    for key, definition in profile.definitions.entries:
        for item in validate_profile(definition.body, profile):
            violations.append(Violation((f"definition {key}",) + item.path, item.node, item.message))
    if violations:
        raise ProfileError(violations)
    return profile


@dataclass(frozen=True)
class Violation:
    path: Tuple[str, ...]
    node: Term = field(compare=False, repr=False)
    message: str = ""

    def where(self) -> str:
        return "/".join(self.path) if self.path else "root"

    def __str__(self) -> str:
        return f"{self.where()}: {self.message}"


def _action_violations(action: PrefixAction, cont: Term, kind: Calculus) -> List[str]:
    problems: List[str] = []
    ccs_like = kind in CCS_FAMILY
    if isinstance(action, (Tau, CcsAct)) and action.guard and kind is not Calculus.CPG:
        problems.append("priority guards are only admitted in cpg")
    if isinstance(action, Tau) and kind is Calculus.COWS:
        problems.append("tau prefixes are not part of the cows fragment")
    if isinstance(action, CcsAct):
        if not ccs_like:
            problems.append(f"CCS-style action {action.name} needs a CCS-family calculus")
        elif action.level is Level.PRIORITIZED and kind not in (Calculus.CCS_SG, Calculus.CCS_PRIO):
            problems.append("prioritized actions are only admitted in ccs-sg and ccs-prio")
    if isinstance(action, (PiOut, PiIn)):
        if ccs_like:
            problems.append("name-passing prefixes need a pi-family calculus")
        elif kind is Calculus.PI:
            if len(action.subject) > 1:
                problems.append("polyadic subject (pi admits single-name subjects)")
            arity = len(action.payload) if isinstance(action, PiOut) else len(action.pattern)
            if arity != 1:
                problems.append("pi admits unary payloads and patterns only")
        if isinstance(action, PiIn):
            if kind in (Calculus.PI, Calculus.COWS) and any(
                isinstance(item, Protected) for item in action.pattern
            ):
                problems.append(f"protected pattern names are not admitted in {kind.value}")
            placeholders = action.placeholders
            if len(set(placeholders)) != len(placeholders):
                problems.append("pattern placeholders must be pairwise distinct")
        if isinstance(action, PiOut) and kind is Calculus.COWS and not isinstance(cont, Nil):
            problems.append("cows invokes have no continuation")
    return problems


def validate_profile(t: Term, p: CalculusProfile) -> List[Violation]:
    """Every construct of ``t`` that ``p`` does not admit; empty means ok."""
    admitted = _ADMITTED[p.calculus]
    found: List[Violation] = []

    def visit(node: Term, path: Tuple[str, ...]) -> None:
        if type(node) not in admitted:
            found.append(
                Violation(path, node, f"{type(node).__name__} is not admitted in {p.name}")
            )
        if isinstance(node, Prefix):
            for message in _action_violations(node.action, node.cont, p.calculus):
                found.append(Violation(path, node, message))
        if isinstance(node, RestrictSet):
            prioritized = any(level is Level.PRIORITIZED for _, level in node.labels)
            if prioritized and p.calculus not in (Calculus.CCS_SG, Calculus.CCS_PRIO):
                found.append(Violation(path, node, "prioritized restriction outside ccs-sg/ccs-prio"))
        if isinstance(node, DefCall) and p.calculus in CCS_FAMILY:
            try:
                p.definitions.check_call(node)
            except TermError as exc:
                found.append(Violation(path, node, str(exc)))
        for segment, child in subterms(node):
            visit(child, path + (segment,))

    visit(t, ())
    return found


def ensure_profile(t: Term, p: CalculusProfile) -> Term:
    violations = validate_profile(t, p)
    if violations:
        raise ProfileError(violations)
    return t
