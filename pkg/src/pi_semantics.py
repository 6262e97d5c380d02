"""Transition rules for the name-passing calculi: pi with match, pi-MPM and the COWS fragment.

Inputs are early: a visible input is instantiated over a finite universe
of names fixed per exploration, while internal synchronization feeds the
output payload straight into the receiver.
"""

from __future__ import annotations

import itertools
import logging
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from .labels import KillL, PiInL, PiOutL, Step, TauL
from .terms import (
    EXTRUDED,
    FRESH,
    NIL,
    Bang,
    Calculus,
    CalculusProfile,
    Delimit,
    Kill,
    KillerLabel,
    Match,
    Name,
    Nil,
    Nu,
    Par,
    PatternItem,
    PiIn,
    PiOut,
    Prefix,
    Protected,
    Sum,
    Tau,
    Term,
    TermError,
    apply_subst,
    free_names,
    fresh_name,
    profile_for,
    sorted_names,
    walk,
)

logger = logging.getLogger(__name__)


def match_pattern(pattern: Sequence[PatternItem], tup: Sequence[Name]) -> Optional[Dict[Name, Name]]:
    """Least substitution making ``pattern`` equal to ``tup``, or None."""
    if len(pattern) != len(tup):
        return None
    sigma: Dict[Name, Name] = {}
    for item, name in zip(pattern, tup):
        if isinstance(item, Protected):
            if item.name != name:
                return None
        else:
            sigma[item.name] = name
    return sigma


def pattern_width(t: Term) -> int:
    return max(
        (len(node.action.pattern) for node in walk(t)
         if isinstance(node, Prefix) and isinstance(node.action, PiIn)),
        default=0,
    )


def input_universe(terms: Iterable[Term], extra: Iterable[Name] = ()) -> Tuple[Name, ...]:
    """Free names of ``terms`` and ``extra`` plus one fresh name per pattern position."""
    items = list(terms)
    known: Set[Name] = set(extra)
    width = 0
    for t in items:
        known |= free_names(t)
        width = max(width, pattern_width(t))
    fresh: List[Name] = []
    for _ in range(width):
        fresh.append(fresh_name(Name(FRESH), known | set(fresh)))
    return tuple(sorted_names(known)) + tuple(fresh)


def halt(t: Term) -> Term:
    """Terminate everything but the parallel and delimitation structure."""
    if isinstance(t, Par):
        left, right = halt(t.left), halt(t.right)
        if left == NIL:
            return right
        if right == NIL:
            return left
        return Par(left, right)
    if isinstance(t, Delimit):
        return Delimit(t.label, halt(t.body))
    return NIL


def _close(extruded: FrozenSet[Name], t: Term) -> Term:
    for name in reversed(sorted_names(extruded)):
        t = Nu(name, t)
    return t


def _separate(step: Step, other: Term) -> Step:
    """Rename extruded names of a bound output that clash with ``other``."""
    label = step.label
    if not isinstance(label, PiOutL) or not label.extruded:
        return step
    other_names = free_names(other)
    clash = label.extruded & other_names
    if not clash:
        return step
    avoid = other_names | free_names(step.target) | set(label.payload) | set(label.subject)
    mapping: Dict[Name, Name] = {}
    for name in sorted_names(clash):
        new = fresh_name(name, avoid)
        avoid.add(new)
        mapping[name] = new
    renamed = PiOutL(
        label.subject,
        tuple(mapping.get(n, n) for n in label.payload),
        frozenset(mapping.get(n, n) for n in label.extruded),
    )
    return Step(renamed, apply_subst(step.target, mapping))


class _PiEngine:
    def __init__(self, calculus: Calculus, universe: Tuple[Name, ...]) -> None:
        self.calculus = calculus
        self.universe = universe

    # internal steps and outputs

    def act(self, t: Term) -> Set[Step]:
        if isinstance(t, Nil):
            return set()
        if isinstance(t, Kill):
            return {Step(KillL(t.label), NIL)}
        if isinstance(t, Prefix):
            action = t.action
            if isinstance(action, Tau):
                return {Step(TauL(), t.cont)}
            if isinstance(action, PiOut):
                return {Step(PiOutL(action.subject, action.payload), t.cont)}
            if isinstance(action, PiIn):
                return set()
            raise TermError("CCS-style prefix in a name-passing term")
        if isinstance(t, Sum):
            found: Set[Step] = set()
            for branch in t.branches:
                found |= self.act(branch)
            return found
        if isinstance(t, Par):
            return self._par(t)
        if isinstance(t, Nu):
            return self._nu(t)
        if isinstance(t, Bang):
            return self._bang(t)
        if isinstance(t, Match):
            return self.act(t.cont) if t.lhs == t.rhs else set()
        if isinstance(t, Delimit):
            return self._delimit(t)
        raise TermError(f"{type(t).__name__} has no name-passing semantics")

    def _pending_kill(self, label: KillerLabel, body_steps: Set[Step]) -> List[Step]:
        return [s for s in body_steps if isinstance(s.label, KillL) and s.label.label == label]

    def _delimit(self, t: Delimit) -> Set[Step]:
        inner = self.act(t.body)
        kills = self._pending_kill(t.label, inner)
        if kills:
            return {Step(TauL(), Delimit(t.label, s.target)) for s in kills}
        return {Step(s.label, Delimit(t.label, s.target)) for s in inner}

    def _nu(self, t: Nu) -> Set[Step]:
        found: Set[Step] = set()
        for s in self.act(t.body):
            label = s.label
            if isinstance(label, PiOutL):
                if t.name in label.subject:
                    continue
                if t.name in label.payload and t.name not in label.extruded:
                    opened = PiOutL(label.subject, label.payload, label.extruded | {t.name})
                    found.add(Step(opened, s.target))
                    continue
            found.add(Step(label, Nu(t.name, s.target)))
        return found

    def _syncs(self, outputs: Iterable[Step], receiver: Term, build) -> Set[Step]:
        found: Set[Step] = set()
        for s in outputs:
            label = s.label
            if not isinstance(label, PiOutL):
                continue
            s = _separate(s, receiver)
            label = s.label
            for received in self.receive(receiver, label.subject, label.payload):
                found.add(Step(TauL(), _close(label.extruded, build(s.target, received))))
        return found

    def _par(self, t: Par) -> Set[Step]:
        left = self.act(t.left)
        right = self.act(t.right)
        found: Set[Step] = set()
        for s in left:
            if isinstance(s.label, KillL):
                found.add(Step(s.label, Par(s.target, halt(t.right))))
            else:
                s = _separate(s, t.right)
                found.add(Step(s.label, Par(s.target, t.right)))
        for s in right:
            if isinstance(s.label, KillL):
                found.add(Step(s.label, Par(halt(t.left), s.target)))
            else:
                s = _separate(s, t.left)
                found.add(Step(s.label, Par(t.left, s.target)))
        found |= self._syncs(left, t.right, lambda out, rec: Par(out, rec))
        found |= self._syncs(right, t.left, lambda out, rec: Par(rec, out))
        return found

    def _bang(self, t: Bang) -> Set[Step]:
        inner = self.act(t.body)
        once = Bang(t.body, t.copies + 1)
        twice = Bang(t.body, t.copies + 2)
        found = {Step(s.label, Par(s.target, once)) for s in inner}
        found |= self._syncs(inner, t.body, lambda out, rec: Par(Par(out, rec), twice))
        return found

    # inputs

    def receive(self, t: Term, subject: Tuple[Name, ...], received: Tuple[Name, ...]) -> List[Term]:
        """Every continuation of ``t`` after receiving ``received`` on ``subject``."""
        if isinstance(t, Prefix):
            action = t.action
            if isinstance(action, PiIn) and action.subject == subject:
                sigma = match_pattern(action.pattern, received)
                if sigma is not None:
                    return [apply_subst(t.cont, sigma)]
            return []
        if isinstance(t, Sum):
            return [r for branch in t.branches for r in self.receive(branch, subject, received)]
        if isinstance(t, Par):
            found = [Par(r, t.right) for r in self.receive(t.left, subject, received)]
            found += [Par(t.left, r) for r in self.receive(t.right, subject, received)]
            return found
        if isinstance(t, Nu):
            if t.name in subject:
                return []
            name, body = t.name, t.body
            if name in received:
                name = fresh_name(name, free_names(body) | set(received) | set(subject) | {name})
                body = apply_subst(body, {t.name: name})
            return [Nu(name, r) for r in self.receive(body, subject, received)]
        if isinstance(t, Bang):
            once = Bang(t.body, t.copies + 1)
            return [Par(r, once) for r in self.receive(t.body, subject, received)]
        if isinstance(t, Match):
            return self.receive(t.cont, subject, received) if t.lhs == t.rhs else []
        if isinstance(t, Delimit):
            if self._pending_kill(t.label, self.act(t.body)):
                return []
            return [Delimit(t.label, r) for r in self.receive(t.body, subject, received)]
        return []

    def input_offers(self, t: Term, blocked: FrozenSet[Name] = frozenset()) -> Set[Tuple[Tuple[Name, ...], Tuple[PatternItem, ...]]]:
        if isinstance(t, Prefix):
            action = t.action
            if isinstance(action, PiIn) and not (set(action.subject) & blocked):
                return {(action.subject, action.pattern)}
            return set()
        if isinstance(t, Nu):
            return self.input_offers(t.body, blocked | {t.name})
        if isinstance(t, Match) and t.lhs != t.rhs:
            return set()
        found = set()
        for child in _children(t):
            found |= self.input_offers(child, blocked)
        return found

    def instantiations(self, pattern: Tuple[PatternItem, ...]) -> Iterable[Tuple[Name, ...]]:
        choices = [
            (item.name,) if isinstance(item, Protected) else self.universe
            for item in pattern
        ]
        for combo in itertools.product(*choices):
            if match_pattern(pattern, combo) is not None:
                yield tuple(combo)

    def inputs(self, t: Term) -> Set[Step]:
        found: Set[Step] = set()
        for subject, pattern in self.input_offers(t):
            for received in self.instantiations(pattern):
                for target in self.receive(t, subject, received):
                    found.add(Step(PiInL(subject, received), target))
        return found


def _children(t: Term) -> List[Term]:
    if isinstance(t, Sum):
        return list(t.branches)
    if isinstance(t, Par):
        return [t.left, t.right]
    if isinstance(t, (Bang, Delimit)):
        return [t.body]
    if isinstance(t, Match):
        return [t.cont]
    return []


def _name_extrusions(t: Term, steps: Set[Step]) -> Set[Step]:
    """Give names extruded at the top level the smallest unused ``~N`` names."""
    source_names = free_names(t)
    found: Set[Step] = set()
    for s in steps:
        label = s.label
        if not isinstance(label, PiOutL) or not label.extruded:
            found.add(s)
            continue
        mapping: Dict[Name, Name] = {}
        index = 0
        for name in label.payload:
            if name in label.extruded and name not in mapping:
                while Name(EXTRUDED, index) in source_names:
                    index += 1
                mapping[name] = Name(EXTRUDED, index)
                index += 1
        renamed = PiOutL(
            label.subject,
            tuple(mapping.get(n, n) for n in label.payload),
            frozenset(mapping.values()),
        )
        found.add(Step(renamed, apply_subst(s.target, mapping)))
    return found


def pi_family_steps(t: Term, profile: CalculusProfile, universe: Optional[Tuple[Name, ...]] = None) -> Set[Step]:
    if universe is None:
        universe = input_universe([t])
    engine = _PiEngine(profile.calculus, universe)
    return _name_extrusions(t, engine.act(t) | engine.inputs(t))


def transitions_pimpm(t: Term, universe: Optional[Tuple[Name, ...]] = None) -> Set[Step]:
    return pi_family_steps(t, profile_for("pimpm"), universe)


def transitions_cows(t: Term, universe: Optional[Tuple[Name, ...]] = None) -> Set[Step]:
    return pi_family_steps(t, profile_for("cows"), universe)
