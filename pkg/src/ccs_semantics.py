"""Transition rules for the CCS family: CCS, BCCSP with Theta, CPG, CCS^sg and CCS^prio.

One recursive rule engine serves every member; the calculus of the profile
switches on Theta filtering, guard checks against sibling offers and
level-based preemption.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import FrozenSet, Set, Tuple

from .labels import Label, Step, TauL, VisAct
from .terms import (
    Bang,
    Calculus,
    CalculusProfile,
    CcsAct,
    DefCall,
    DefinitionEnv,
    Deprioritize,
    Level,
    Name,
    Nil,
    Par,
    Polarity,
    Prefix,
    PriorityOrder,
    Prioritize,
    Relabel,
    RestrictSet,
    Sum,
    Tau,
    Term,
    TermError,
    Theta,
    action_key,
    profile_for,
)

logger = logging.getLogger(__name__)

Offer = Tuple[Name, Polarity]


@dataclass(frozen=True)
class _Rules:
    calculus: Calculus
    order: PriorityOrder
    env: DefinitionEnv
    check_guards: bool = True

    @property
    def preemptive(self) -> bool:
        return self.calculus in (Calculus.CCS_SG, Calculus.CCS_PRIO)

    @property
    def guarded(self) -> bool:
        return self.calculus is Calculus.CPG and self.check_guards

    def raw(self) -> "_Rules":
        return _Rules(self.calculus, self.order, self.env, check_guards=False)


def _label_level(label: Label) -> Level:
    return label.level if isinstance(label, (TauL, VisAct)) else Level.ORDINARY


def _prune(steps: Set[Step]) -> Set[Step]:
    """Drop ordinary-level steps when a prioritized internal step exists."""
    if any(isinstance(s.label, TauL) and s.label.level is Level.PRIORITIZED for s in steps):
        return {s for s in steps if _label_level(s.label) is Level.PRIORITIZED}
    return steps


def _relabel(label: Label, mapping) -> Label:
    if isinstance(label, TauL):
        return TauL(label.level, frozenset(mapping.get(n, n) for n in label.guard))
    return VisAct(
        mapping.get(label.name, label.name),
        label.polarity,
        label.level,
        frozenset(mapping.get(n, n) for n in label.guard),
    )


def _theta_key(label: Label) -> str:
    if isinstance(label, TauL):
        return action_key(None)
    return action_key(label.name, label.polarity)


def _blocked(guard: FrozenSet[Name], offers: Set[Offer]) -> bool:
    """A guard S is blocked when the environment offers the co-action of a name in S."""
    return any((name, Polarity.OUT) in offers for name in guard)


def _sync(left: Label, right: Label) -> bool:
    return (
        isinstance(left, VisAct)
        and isinstance(right, VisAct)
        and left.name == right.name
        and left.level is right.level
        and left.polarity is not right.polarity
    )


class _Engine:
    def __init__(self, rules: _Rules) -> None:
        self.rules = rules

    def steps(self, t: Term, unfolding: FrozenSet[DefCall] = frozenset()) -> Set[Step]:
        rules = self.rules
        if isinstance(t, Nil):
            return set()
        if isinstance(t, Prefix):
            action = t.action
            if isinstance(action, Tau):
                return {Step(TauL(Level.ORDINARY, action.guard), t.cont)}
            if isinstance(action, CcsAct):
                label = VisAct(action.name, action.polarity, action.level, action.guard)
                return {Step(label, t.cont)}
            raise TermError("name-passing prefix in a CCS-family term")
        if isinstance(t, Sum):
            found: Set[Step] = set()
            for branch in t.branches:
                found |= self.steps(branch, unfolding)
            return _prune(found) if rules.preemptive else found
        if isinstance(t, Par):
            return self._par(t, unfolding)
        if isinstance(t, RestrictSet):
            return {
                Step(s.label, RestrictSet(t.labels, s.target))
                for s in self.steps(t.body, unfolding)
                if isinstance(s.label, TauL) or (s.label.name, s.label.level) not in t.labels
            }
        if isinstance(t, Relabel):
            mapping = t.as_dict()
            return {
                Step(_relabel(s.label, mapping), Relabel(s.target, t.mapping))
                for s in self.steps(t.body, unfolding)
            }
        if isinstance(t, DefCall):
            if t in unfolding:
                raise TermError(f"unguarded recursion through {t.name}")
            body = rules.env.unfold(t)
            return self.steps(body, unfolding | {t})
        if isinstance(t, Bang):
            return self._bang(t, unfolding)
        if isinstance(t, Theta):
            inner = self.steps(t.body, unfolding)
            present = {_theta_key(s.label) for s in inner}
            return {
                Step(s.label, Theta(s.target))
                for s in inner
                if not rules.order.preempted(_theta_key(s.label), present)
            }
        if isinstance(t, Prioritize):
            return {
                Step(self._shift(s.label, t.action, Level.ORDINARY, Level.PRIORITIZED), Prioritize(s.target, t.action))
                for s in self.steps(t.body, unfolding)
            }
        if isinstance(t, Deprioritize):
            return {
                Step(self._shift(s.label, t.action, Level.PRIORITIZED, Level.ORDINARY), Deprioritize(s.target, t.action))
                for s in self.steps(t.body, unfolding)
            }
        raise TermError(f"{type(t).__name__} has no CCS-family semantics")

    @staticmethod
    def _shift(label: Label, name: Name, source: Level, target: Level) -> Label:
        if isinstance(label, VisAct) and label.name == name and label.level is source:
            return VisAct(label.name, label.polarity, target, label.guard)
        return label

    def offers(self, t: Term) -> Set[Offer]:
        engine = self if not self.rules.check_guards else _Engine(self.rules.raw())
        return {
            (s.label.name, s.label.polarity)
            for s in engine.steps(t)
            if isinstance(s.label, VisAct)
        }

    def _par(self, t: Par, unfolding: FrozenSet[DefCall]) -> Set[Step]:
        left_steps = self.steps(t.left, unfolding)
        right_steps = self.steps(t.right, unfolding)
        if self.rules.guarded:
            left_env = self.offers(t.right)
            right_env = self.offers(t.left)
            left_steps = {s for s in left_steps if not _blocked(s.label.guard, left_env)}
            right_steps = {s for s in right_steps if not _blocked(s.label.guard, right_env)}
        found = {Step(s.label, Par(s.target, t.right)) for s in left_steps}
        found |= {Step(s.label, Par(t.left, s.target)) for s in right_steps}
        for ls in left_steps:
            for rs in right_steps:
                if _sync(ls.label, rs.label):
                    label = TauL(ls.label.level, ls.label.guard | rs.label.guard)
                    found.add(Step(label, Par(ls.target, rs.target)))
        return _prune(found) if self.rules.preemptive else found

    def _bang(self, t: Bang, unfolding: FrozenSet[DefCall]) -> Set[Step]:
        inner = self.steps(t.body, unfolding)
        found = {Step(s.label, Par(s.target, Bang(t.body, t.copies + 1))) for s in inner}
        for first in inner:
            for second in inner:
                if _sync(first.label, second.label):
                    label = TauL(first.label.level, first.label.guard | second.label.guard)
                    found.add(Step(label, Par(Par(first.target, second.target), Bang(t.body, t.copies + 2))))
        return found


def _rules_for(profile: CalculusProfile) -> _Rules:
    return _Rules(profile.calculus, profile.order, profile.definitions)


def ccs_family_steps(t: Term, profile: CalculusProfile) -> Set[Step]:
    """Steps of ``t`` under any CCS-family profile, with root-level preemption."""
    rules = _rules_for(profile)
    found = _Engine(rules).steps(t)
    return _prune(found) if rules.preemptive else found


def transitions_ccs(t: Term, env: DefinitionEnv) -> Set[Step]:
    return ccs_family_steps(t, profile_for("ccs", definitions=env))


def transitions_bccsp(t: Term, order: PriorityOrder) -> Set[Step]:
    return ccs_family_steps(t, profile_for("bccsp-theta", order=order))


def transitions_cpg(t: Term, env: DefinitionEnv) -> Set[Step]:
    return ccs_family_steps(t, profile_for("cpg", definitions=env))


def transitions_ccs_priority(t: Term, env: DefinitionEnv, variant: str = "sg") -> Set[Step]:
    if variant not in ("sg", "prio"):
        raise ValueError(f"variant must be 'sg' or 'prio', got {variant!r}")
    return ccs_family_steps(t, profile_for(f"ccs-{variant}", definitions=env))


def cpg_offers(t: Term, env: DefinitionEnv = DefinitionEnv()) -> Set[Offer]:
    """Visible actions ``t`` offers, ignoring guard side-conditions."""
    return _Engine(_Rules(Calculus.CPG, PriorityOrder(), env, check_guards=False)).offers(t)
