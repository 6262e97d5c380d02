"""One-step transitions for any calculus profile."""

from __future__ import annotations

from typing import FrozenSet, Optional, Tuple

from .ccs_semantics import (
    ccs_family_steps,
    cpg_offers,
    transitions_bccsp,
    transitions_ccs,
    transitions_ccs_priority,
    transitions_cpg,
)
from .labels import Label, Step, is_visible
from .pi_semantics import (
    halt,
    input_universe,
    match_pattern,
    pi_family_steps,
    transitions_cows,
    transitions_pimpm,
)
from .terms import (
    CalculusProfile,
    Name,
    Term,
    TermError,
    canonical_state,
    ensure_profile,
    is_process,
)

__all__ = [
    "Label",
    "Step",
    "cpg_offers",
    "halt",
    "input_universe",
    "is_visible",
    "match_pattern",
    "successors",
    "transitions",
    "transitions_bccsp",
    "transitions_ccs",
    "transitions_ccs_priority",
    "transitions_cows",
    "transitions_cpg",
    "transitions_pimpm",
]


def successors(
    t: Term,
    profile: CalculusProfile,
    universe: Optional[Tuple[Name, ...]] = None,
) -> FrozenSet[Step]:
    """Steps of an already validated, alpha-canonical process."""
    if profile.ccs_family:
        steps = ccs_family_steps(t, profile)
    else:
        steps = pi_family_steps(t, profile, universe)
    return frozenset(Step(s.label, canonical_state(s.target, profile)) for s in steps)


def transitions(
    t: Term,
    profile: CalculusProfile,
    universe: Optional[Tuple[Name, ...]] = None,
) -> FrozenSet[Step]:
    if not is_process(t):
        raise TermError("context not a process")
    ensure_profile(t, profile)
    return successors(canonical_state(t, profile), profile, universe)
