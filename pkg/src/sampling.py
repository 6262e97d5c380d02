"""Random (context, invisible, process) triples and the freeness checks run on them."""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

from .lts import ExplorationBounds, explore, invisible_in, visible_in
from .simulation import explore_pair, sim_omega
from .syntax import pretty
from .terms import (
    NIL,
    CalculusProfile,
    CcsAct,
    Hole,
    Level,
    Match,
    Name,
    Nu,
    Par,
    PiIn,
    PiOut,
    Placeholder,
    Polarity,
    Prefix,
    Protected,
    RestrictSet,
    Sum,
    Tau,
    Term,
    free_names,
    is_closed,
    plug,
    profile_for,
    sorted_names,
)

logger = logging.getLogger(__name__)

NAMES = tuple(Name(text) for text in ("a", "b", "c"))
# restriction binders never appear as payloads, so no name is ever extruded
BINDERS = tuple(Name(text) for text in ("r", "s"))
VARIABLES = tuple(Name(text) for text in ("u", "v"))

SAMPLING_BOUNDS = ExplorationBounds(max_states=500, max_depth=32, max_bang_unfold=1)
SAMPLED_CALCULI = ("ccs", "pi", "pimpm")


# --- CCS ------------------------------------------------------------------


def _ccs_prefix(rng: random.Random) -> CcsAct:
    polarity = Polarity.OUT if rng.random() < 0.5 else Polarity.IN
    return CcsAct(rng.choice(NAMES), polarity)


def random_ccs_process(rng: random.Random, depth: int = 3) -> Term:
    if depth <= 0 or rng.random() < 0.15:
        return NIL
    kind = rng.choice(("prefix", "prefix", "tau", "sum", "par", "restrict"))
    if kind == "prefix":
        return Prefix(_ccs_prefix(rng), random_ccs_process(rng, depth - 1))
    if kind == "tau":
        return Prefix(Tau(), random_ccs_process(rng, depth - 1))
    if kind == "sum":
        return Sum((random_ccs_process(rng, depth - 1), random_ccs_process(rng, depth - 1)))
    if kind == "par":
        return Par(random_ccs_process(rng, depth - 1), random_ccs_process(rng, depth - 1))
    return RestrictSet(frozenset({(rng.choice(NAMES), Level.ORDINARY)}), random_ccs_process(rng, depth - 1))


def random_ccs_context(rng: random.Random, depth: int = 3) -> Term:
    if depth <= 0 or rng.random() < 0.2:
        return Hole(1)
    kind = rng.choice(("prefix", "sum", "par", "par", "restrict"))
    inner = random_ccs_context(rng, depth - 1)
    other = random_ccs_process(rng, depth - 1)
    if kind == "prefix":
        return Prefix(_ccs_prefix(rng), inner)
    if kind == "sum":
        return Sum((inner, other) if rng.random() < 0.5 else (other, inner))
    if kind == "par":
        return Par(inner, other) if rng.random() < 0.5 else Par(other, inner)
    return RestrictSet(frozenset({(rng.choice(NAMES), Level.ORDINARY)}), inner)


def _restrict_ccs(t: Term, names) -> Term:
    if not names:
        return t
    return RestrictSet(frozenset((n, Level.ORDINARY) for n in names), t)


def random_ccs_invisible(rng: random.Random, depth: int = 3, closed: bool = False) -> Term:
    """An invisible process, open unless ``closed`` is set; certified by exploration."""
    profile = profile_for("ccs")
    body = random_ccs_process(rng, depth)
    names = sorted_names(free_names(body))
    if not closed and names:
        for _ in range(4):
            subset = [n for n in names if rng.random() < 0.7]
            candidate = _restrict_ccs(body, subset)
            if invisible_in(explore(candidate, profile, SAMPLING_BOUNDS)).holds:
                return candidate
    return _restrict_ccs(body, names)


# --- pi and pi-MPM ------------------------------------------------------


def _pi_subject(rng: random.Random, scope: Tuple[Name, ...], polyadic: bool) -> Tuple[Name, ...]:
    pool = NAMES + scope
    if polyadic and rng.random() < 0.4:
        return (rng.choice(pool), rng.choice(NAMES))
    return (rng.choice(pool),)


def random_pi_process(
    rng: random.Random,
    depth: int = 3,
    mpm: bool = False,
    scope: Tuple[Name, ...] = (),
) -> Term:
    if depth <= 0 or rng.random() < 0.15:
        return NIL
    kinds = ["out", "out", "in", "in", "tau", "sum", "par", "new"]
    if mpm:
        kinds.append("match")
    kind = rng.choice(kinds)
    below = depth - 1
    if kind == "out":
        width = 2 if mpm and rng.random() < 0.3 else 1
        payload = tuple(rng.choice(NAMES) for _ in range(width))
        cont = random_pi_process(rng, below, mpm, scope)
        return Prefix(PiOut(_pi_subject(rng, scope, mpm), payload), cont)
    if kind == "in":
        width = 2 if mpm and rng.random() < 0.3 else 1
        pattern: List = []
        for i in range(width):
            if mpm and rng.random() < 0.3:
                pattern.append(Protected(rng.choice(NAMES)))
            else:
                pattern.append(Placeholder(VARIABLES[i]))
        bound = tuple(item.name for item in pattern if isinstance(item, Placeholder))
        cont = random_pi_process(rng, below, mpm, scope + bound)
        return Prefix(PiIn(_pi_subject(rng, scope, mpm), tuple(pattern)), cont)
    if kind == "tau":
        return Prefix(Tau(), random_pi_process(rng, below, mpm, scope))
    if kind == "sum":
        return Sum((random_pi_process(rng, below, mpm, scope), random_pi_process(rng, below, mpm, scope)))
    if kind == "par":
        return Par(random_pi_process(rng, below, mpm, scope), random_pi_process(rng, below, mpm, scope))
    if kind == "match":
        pool = NAMES + scope
        return Match(rng.choice(pool), rng.choice(pool), random_pi_process(rng, below, mpm, scope))
    binder = rng.choice(BINDERS)
    return Nu(binder, random_pi_process(rng, below, mpm, scope + (binder,)))


def random_pi_context(rng: random.Random, depth: int = 3, mpm: bool = False) -> Term:
    if depth <= 0 or rng.random() < 0.2:
        return Hole(1)
    kind = rng.choice(("out", "in", "sum", "par", "par", "new"))
    inner = random_pi_context(rng, depth - 1, mpm)
    other = random_pi_process(rng, depth - 1, mpm)
    if kind == "out":
        return Prefix(PiOut((rng.choice(NAMES),), (rng.choice(NAMES),)), inner)
    if kind == "in":
        # the placeholder is a plain name so plugging may capture it
        return Prefix(PiIn((rng.choice(NAMES),), (Placeholder(rng.choice(NAMES)),)), inner)
    if kind == "sum":
        return Sum((inner, other) if rng.random() < 0.5 else (other, inner))
    if kind == "par":
        return Par(inner, other) if rng.random() < 0.5 else Par(other, inner)
    return Nu(rng.choice(BINDERS), inner)


def _close_pi(t: Term, names) -> Term:
    for name in reversed(list(names)):
        t = Nu(name, t)
    return t


def random_pi_invisible(
    rng: random.Random,
    depth: int = 3,
    mpm: bool = False,
    closed: bool = False,
) -> Term:
    profile = profile_for("pimpm" if mpm else "pi")
    body = random_pi_process(rng, depth, mpm)
    names = sorted_names(free_names(body))
    if not closed and names:
        for _ in range(4):
            subset = [n for n in names if rng.random() < 0.7]
            candidate = _close_pi(body, subset)
            if invisible_in(explore(candidate, profile, SAMPLING_BOUNDS)).holds:
                return candidate
    return _close_pi(body, names)


# --- checks ---------------------------------------------------------------


@dataclass
class Triple:
    context: Term
    invisible: Term
    process: Term

    def to_dict(self) -> Dict[str, str]:
        return {
            "context": pretty(self.context),
            "invisible": pretty(self.invisible),
            "process": pretty(self.process),
        }


def random_triple(rng: random.Random, calculus: str, closed: bool = False, depth: int = 3) -> Triple:
    if calculus == "ccs":
        return Triple(
            random_ccs_context(rng, depth),
            random_ccs_invisible(rng, depth, closed),
            random_ccs_process(rng, depth),
        )
    if calculus in ("pi", "pimpm"):
        mpm = calculus == "pimpm"
        return Triple(
            random_pi_context(rng, depth, mpm),
            random_pi_invisible(rng, depth, mpm, closed),
            random_pi_process(rng, depth, mpm),
        )
    raise ValueError(f"sampling supports {', '.join(SAMPLED_CALCULI)}, not {calculus!r}")


@dataclass
class TripleCheck:
    triple: Triple
    invisible_ok: bool
    transfer_ok: Optional[bool]
    simulation_ok: Optional[bool]

    @property
    def counterexample(self) -> bool:
        return self.invisible_ok and (self.transfer_ok is False or self.simulation_ok is False)


def check_triple(
    triple: Triple,
    profile: CalculusProfile,
    bounds: ExplorationBounds = SAMPLING_BOUNDS,
) -> TripleCheck:
    """Visibility transfer from C[I] to C[P] and the root pair of their omega-simulation."""
    invisible = invisible_in(explore(triple.invisible, profile, bounds))
    if not invisible.holds:
        return TripleCheck(triple, False, None, None)
    ci = plug(triple.context, [triple.invisible])
    cp = plug(triple.context, [triple.process])
    lq, lp = explore_pair(ci, cp, profile, bounds)
    ci_visible = visible_in(lq)
    cp_visible = visible_in(lp)
    transfer: Optional[bool] = None
    if ci_visible.fails or cp_visible.holds:
        transfer = True
    elif ci_visible.holds and cp_visible.fails:
        transfer = False
    simulation: Optional[bool] = None
    if lq.complete and lp.complete:
        simulation = sim_omega(lq, lp).holds_at_roots(lq, lp)
    return TripleCheck(triple, True, transfer, simulation)


@dataclass
class SampleSummary:
    calculus: str
    seed: Optional[int]
    closed: bool
    checked: int = 0
    skipped: int = 0
    counterexamples: List[Dict[str, Any]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "calculus": self.calculus,
            "seed": self.seed,
            "closed": self.closed,
            "checked": self.checked,
            "skipped": self.skipped,
            "counterexamples": self.counterexamples,
        }


def sample(
    calculus: str,
    count: int,
    seed: Optional[int] = None,
    closed: bool = False,
    progress: Optional[Callable[[int], None]] = None,
) -> SampleSummary:
    rng = random.Random(seed)
    profile = profile_for(calculus)
    summary = SampleSummary(calculus, seed, closed)
    for index in range(count):
        triple = random_triple(rng, calculus, closed)
        if closed and not is_closed(triple.invisible):
            summary.skipped += 1
            continue
        result = check_triple(triple, profile)
        if not result.invisible_ok or result.transfer_ok is None:
            summary.skipped += 1
        else:
            summary.checked += 1
        if result.counterexample:
            entry = triple.to_dict()
            entry["transfer_ok"] = result.transfer_ok
            entry["simulation_ok"] = result.simulation_ok
            summary.counterexamples.append(entry)
            logger.warning("counterexample: %s", entry)
        if progress:
            progress(index + 1)
    return summary
