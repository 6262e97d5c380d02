"""Replacement-freeness witness files, their verification and the corpus runner."""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

try:
    from typing import Literal
except ImportError:  # pragma: no cover
    from typing_extensions import Literal

from .labels import parse_name
from .lts import ExplorationBounds, Verdict, explore, negate, visible_in
from .syntax import ParseError, parse_context, parse_raw, parse_term
from .terms import (
    Calculus,
    CalculusProfile,
    Definition,
    DefinitionEnv,
    OrderError,
    Term,
    TermError,
    erase_holes,
    is_closed,
    plug,
    PriorityOrder,
    ProfileError,
    profile_for,
    validate_profile,
)

logger = logging.getLogger(__name__)

CONFIRMED = "violation-confirmed"
REFUTED = "violation-refuted"
INCONCLUSIVE = "inconclusive"


class WitnessFileError(ValueError):
    """Raised for unreadable or malformed witness files."""

    def __init__(self, source: str, messages: List[str]) -> None:
        self.source = source
        self.messages = list(messages)
        super().__init__(f"{source}: " + "; ".join(self.messages))


class BoundsModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    max_states: int = Field(default=10000, ge=1)
    max_depth: int = Field(default=64, ge=1)
    max_bang_unfold: int = Field(default=3, ge=1)


class DefinitionModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    params: List[str] = Field(default_factory=list)
    body: str


class WitnessFile(BaseModel):
    """On-disk witness format, version 1."""

    model_config = ConfigDict(extra="forbid")

    version: Literal[1]
    id: str = Field(..., min_length=1)
    calculus: Calculus
    mode: Literal["strong", "weak"]
    order: List[Tuple[str, str]] = Field(default_factory=list)
    definitions: Dict[str, DefinitionModel] = Field(default_factory=dict)
    context: str
    invisible: str
    process: str
    expect: Literal["violation", "no-violation"]
    bounds: Optional[BoundsModel] = None
    locus: Optional[str] = None


@dataclass
class WitnessCase:
    id: str
    profile: CalculusProfile
    mode: str
    context: Term
    invisible: Term
    process: Term
    expect: str
    bounds: ExplorationBounds
    locus: Optional[str] = None
    source: Optional[str] = None


def _parse_field(label: str, src: str, profile: CalculusProfile, source: str, context: bool = False) -> Term:
    try:
        if context:
            return parse_context(src, profile, arity=1)
        return parse_term(src, profile)
    except ParseError as exc:
        raise WitnessFileError(source, [f"{label}: {d}" for d in exc.diagnostics]) from exc


def _definitions(model: WitnessFile, source: str) -> DefinitionEnv:
    return definitions_from_models(model.definitions, source)


def definitions_from_dict(data: Any, source: str = "<definitions>") -> DefinitionEnv:
    """Read ``{"A": {"params": [...], "body": "..."}}`` into a definition environment."""
    if not isinstance(data, dict):
        raise WitnessFileError(source, ["definitions must be a JSON object"])
    models: Dict[str, DefinitionModel] = {}
    for key, item in data.items():
        try:
            models[key] = DefinitionModel.model_validate(item)
        except ValidationError as exc:
            raise WitnessFileError(source, [f"definition {key}: {err['msg']}" for err in exc.errors()]) from exc
    return definitions_from_models(models, source)


def definitions_from_models(definitions: Dict[str, DefinitionModel], source: str) -> DefinitionEnv:
    if not definitions:
        return DefinitionEnv()
    parsed: Dict[str, Definition] = {}
    for key, item in definitions.items():
        try:
            body, _ = parse_raw(item.body)
        except ParseError as exc:
            raise WitnessFileError(source, [f"definition {key}: {d}" for d in exc.diagnostics]) from exc
        params = tuple(parse_name(p.strip()) for p in item.params)
        parsed[key] = Definition(params, body)
    try:
        return DefinitionEnv.from_mapping(parsed)
    except TermError as exc:
        raise WitnessFileError(source, [str(exc)]) from exc


def parse_order(pairs) -> PriorityOrder:
    return PriorityOrder.from_pairs(pairs)


def witness_from_dict(data: Dict[str, Any], source: str = "<witness>") -> WitnessCase:
    try:
        model = WitnessFile.model_validate(data)
    except ValidationError as exc:
        messages = [
            f"{'.'.join(str(p) for p in err['loc']) or 'root'}: {err['msg']}" for err in exc.errors()
        ]
        raise WitnessFileError(source, messages) from exc
    try:
        order = parse_order(model.order)
    except OrderError as exc:
        raise WitnessFileError(source, [str(exc)]) from exc
    try:
        profile = profile_for(model.calculus, order=order, definitions=_definitions(model, source))
    except ProfileError as exc:
        raise WitnessFileError(source, [str(v) for v in exc.violations]) from exc

    context = _parse_field("context", model.context, profile, source, context=True)
    invisible = _parse_field("invisible", model.invisible, profile, source)
    process = _parse_field("process", model.process, profile, source)
    if model.mode == "weak" and not is_closed(invisible):
        logger.debug("%s: weak-mode invisible process is open", model.id)

    bounds = ExplorationBounds(**model.bounds.model_dump()) if model.bounds else ExplorationBounds.from_env()
    return WitnessCase(
        id=model.id,
        profile=profile,
        mode=model.mode,
        context=context,
        invisible=invisible,
        process=process,
        expect=model.expect,
        bounds=bounds,
        locus=model.locus,
        source=source,
    )


def load_witness(path: Union[str, Path]) -> WitnessCase:
    source = str(path)
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as exc:
        raise WitnessFileError(source, [f"cannot read file: {exc.strerror or exc}"]) from exc
    except json.JSONDecodeError as exc:
        raise WitnessFileError(source, [f"invalid JSON at line {exc.lineno}: {exc.msg}"]) from exc
    if not isinstance(data, dict):
        raise WitnessFileError(source, ["witness file must hold a JSON object"])
    return witness_from_dict(data, source)


@dataclass
class WitnessReport:
    case_id: str
    calculus: str
    mode: str
    expect: str
    invisible_check: Verdict
    closed_check: Optional[bool]
    ci_visible: Verdict
    cp_visible: Verdict
    overall: str
    strong_rerun: Optional[str] = None
    locus: Optional[str] = None
    source: Optional[str] = None

    @property
    def matched(self) -> bool:
        wanted = CONFIRMED if self.expect == "violation" else REFUTED
        return self.overall == wanted

    def to_dict(self) -> Dict[str, Any]:
        return {
            "id": self.case_id,
            "calculus": self.calculus,
            "mode": self.mode,
            "expect": self.expect,
            "locus": self.locus,
            "invisible_check": self.invisible_check.to_dict(),
            "closed_check": self.closed_check,
            "ci_visible": self.ci_visible.to_dict(),
            "cp_visible": self.cp_visible.to_dict(),
            "overall": self.overall,
            "strong_rerun": self.strong_rerun,
            "matched": self.matched,
        }


def _overall(invisible: Verdict, closed: Optional[bool], ci: Verdict, cp: Verdict) -> str:
    if any(v.unknown for v in (invisible, ci, cp)):
        return INCONCLUSIVE
    if invisible.holds and closed is not False and ci.holds and cp.fails:
        return CONFIRMED
    return REFUTED


def verify_witness(w: WitnessCase, bounds: Optional[ExplorationBounds] = None) -> WitnessReport:
    """Check I is invisible (and closed in weak mode), C[I] visible and C[P] invisible."""
    used = bounds or w.bounds
    profile = w.profile
    violations = validate_profile(erase_holes(w.context), profile)
    if violations:
        raise WitnessFileError(w.source or w.id, [str(v) for v in violations])

    invisible_check = negate(visible_in(explore(w.invisible, profile, used)))
    closed_check = is_closed(w.invisible) if w.mode == "weak" else None
    ci_visible = visible_in(explore(plug(w.context, [w.invisible]), profile, used))
    cp_visible = visible_in(explore(plug(w.context, [w.process]), profile, used))

    overall = _overall(invisible_check, closed_check, ci_visible, cp_visible)
    strong_rerun = None
    if w.mode == "weak":
        strong_rerun = _overall(invisible_check, None, ci_visible, cp_visible)
    logger.info("%s: %s (expected %s)", w.id, overall, w.expect)
    return WitnessReport(
        case_id=w.id,
        calculus=profile.name,
        mode=w.mode,
        expect=w.expect,
        invisible_check=invisible_check,
        closed_check=closed_check,
        ci_visible=ci_visible,
        cp_visible=cp_visible,
        overall=overall,
        strong_rerun=strong_rerun,
        locus=w.locus,
        source=w.source,
    )


@dataclass
class CorpusSummary:
    reports: List[WitnessReport] = field(default_factory=list)
    errors: List[WitnessFileError] = field(default_factory=list)

    @property
    def mismatches(self) -> List[WitnessReport]:
        return [r for r in self.reports if not r.matched and r.overall != INCONCLUSIVE]

    @property
    def inconclusive(self) -> List[WitnessReport]:
        return [r for r in self.reports if r.overall == INCONCLUSIVE]

    @property
    def exit_code(self) -> int:
        if self.errors:
            return 2
        if self.mismatches:
            return 1
        if self.inconclusive:
            return 3
        return 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "total": len(self.reports),
            "matched": sum(1 for r in self.reports if r.matched),
            "mismatches": [r.case_id for r in self.mismatches],
            "inconclusive": [r.case_id for r in self.inconclusive],
            "errors": [{"file": e.source, "messages": e.messages} for e in self.errors],
            "cases": [r.to_dict() for r in self.reports],
            "exit_code": self.exit_code,
        }


def _run_file(path: Path, bounds: Optional[ExplorationBounds]) -> Union[WitnessReport, WitnessFileError]:
    try:
        case = load_witness(path)
        return verify_witness(case, bounds)
    except WitnessFileError as exc:
        logger.warning("skipping %s: %s", path, "; ".join(exc.messages))
        return exc
    except (TermError, ValueError) as exc:
        logger.warning("skipping %s: %s", path, exc)
        return WitnessFileError(str(path), [str(exc)])


def run_corpus(
    directory: Union[str, Path],
    overrides: Optional[ExplorationBounds] = None,
    jobs: int = 1,
) -> CorpusSummary:
    """Verify every ``*.json`` witness in ``directory``; reports come back in id order."""
    base = Path(directory)
    if not base.is_dir():
        return CorpusSummary(errors=[WitnessFileError(str(base), ["not a directory"])])
    files = sorted(base.glob("*.json"))
    if jobs > 1 and len(files) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda f: _run_file(f, overrides), files))
    else:
        results = [_run_file(f, overrides) for f in files]
    summary = CorpusSummary()
    for item in results:
        if isinstance(item, WitnessFileError):
            summary.errors.append(item)
        else:
            summary.reports.append(item)
    summary.reports.sort(key=lambda r: r.case_id)
    summary.errors.sort(key=lambda e: e.source)
    return summary


def _status_word(verdict: Verdict) -> str:
    return {"holds": "visible", "fails": "invisible"}.get(verdict.status, "unknown")


def format_report(report: WitnessReport) -> str:
    lines = [
        "",
        "=" * 60,
        f"WITNESS {report.case_id} ({report.calculus}, {report.mode})",
        "=" * 60,
        f"Locus: {report.locus or 'N/A'}",
        f"I invisible: {report.invisible_check.status}",
    ]
    if report.closed_check is not None:
        lines.append(f"I closed: {'yes' if report.closed_check else 'no'}")
    ci_trace = ", ".join(report.ci_visible.printed_trace()) or "-"
    lines.append(f"C[I]: {_status_word(report.ci_visible)} [{ci_trace}]")
    lines.append(f"C[P]: {_status_word(report.cp_visible)}")
    lines.append(f"Overall: {report.overall} (expected {report.expect})")
    if report.strong_rerun:
        lines.append(f"Strong re-run: {report.strong_rerun}")
    lines.append("=" * 60)
    return "\n".join(lines) + "\n"


def format_summary(summary: CorpusSummary) -> str:
    lines = ["", f"{'id':<24} {'overall':<22} {'expected':<13} match", "-" * 66]
    for report in summary.reports:
        lines.append(
            f"{report.case_id:<24} {report.overall:<22} {report.expect:<13} "
            f"{'yes' if report.matched else 'NO'}"
        )
    for error in summary.errors:
        lines.append(f"error: {error}")
    matched = sum(1 for r in summary.reports if r.matched)
    lines.append("-" * 66)
    lines.append(f"{matched}/{len(summary.reports)} matched, {len(summary.errors)} file error(s)")
    return "\n".join(lines) + "\n"
