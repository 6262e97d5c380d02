#!/usr/bin/env python3
"""Package entry point for the replacement-freeness workbench."""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Callable, Dict, List, Optional

from .labels import LabelPatternError, format_label, parse_label_pattern
from .lts import (
    ExplorationBounds,
    Lts,
    Verdict,
    can_perform,
    explore,
    is_visible,
    to_dot,
    to_json_dict,
)
from .sampling import SAMPLED_CALCULI, sample
from .simulation import (
    IncompleteLtsError,
    distinguishing_depth,
    distinguishing_moves,
    explore_pair,
    format_moves,
    sim_k,
    sim_omega,
    weak_simulation_gfp,
)
from .syntax import ParseError, parse_term, pretty
from .terms import (
    Calculus,
    CalculusProfile,
    DefinitionEnv,
    OrderError,
    PriorityOrder,
    ProfileError,
    Term,
    TermError,
    free_names,
    holes,
    independent,
    is_closed,
    profile_for,
    sorted_names,
)
from .utils import configure_logging, mostrar_ajuda, read_source, resolve_report_path, write_report
from .witness import (
    INCONCLUSIVE,
    WitnessFileError,
    definitions_from_dict,
    format_report,
    format_summary,
    load_witness,
    run_corpus,
    verify_witness,
)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2
EXIT_UNKNOWN = 3


class CliInputError(Exception):
    """Input problem reported to the user with exit code 2."""

    def __init__(self, messages: List[str]) -> None:
        self.messages = list(messages)
        super().__init__("; ".join(self.messages))


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--calc",
        default="ccs",
        choices=[item.value for item in Calculus],
        help="Calculus profile",
    )
    common.add_argument("--order", help="Priority order for bccsp-theta, e.g. \"a<tau,b<'c\"")
    common.add_argument("--defs", help="JSON file with process definitions")
    common.add_argument("--max-states", type=int, help="Exploration state bound")
    common.add_argument("--max-depth", type=int, help="Exploration depth bound")
    common.add_argument("--max-bang-unfold", type=int, help="Replicated copies per path")
    common.add_argument(
        "-o",
        "--format",
        default="human",
        choices=["human", "json", "dot"],
        help="Output format",
    )
    common.add_argument("-j", "--json", action="store_true", help="Shortcut for --format json")
    common.add_argument("-r", "--report", help="Output file, or directory for corpus runs")
    common.add_argument("-v", "--verbose", action="count", default=0, help="Log to stderr")
    common.add_argument("-h", "--help", action="store_true", help="Show help")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="repfree", add_help=False)
    parser.add_argument("-h", "--help", action="store_true", help="Show help")
    common = _common_options()
    commands = parser.add_subparsers(dest="command")

    cmd = commands.add_parser("parse", parents=[common], add_help=False)
    cmd.add_argument("file", help="Term file")

    cmd = commands.add_parser("lts", parents=[common], add_help=False)
    cmd.add_argument("file", help="Term file")

    cmd = commands.add_parser("visible", parents=[common], add_help=False)
    cmd.add_argument("file", help="Term file")

    cmd = commands.add_parser("can", parents=[common], add_help=False)
    cmd.add_argument("file", help="Term file")
    cmd.add_argument("--label", required=True, help="Visible label pattern, e.g. y!<c> or 'a")

    cmd = commands.add_parser("names", parents=[common], add_help=False)
    cmd.add_argument("file", help="Term file")
    cmd.add_argument("other", nargs="?", help="Second term file for the independence check")

    cmd = commands.add_parser("sim", parents=[common], add_help=False)
    cmd.add_argument("file_q", help="Simulated process Q")
    cmd.add_argument("file_p", help="Simulating process P")
    depth = cmd.add_mutually_exclusive_group()
    depth.add_argument("--k", type=int, help="Stratum to check")
    depth.add_argument("--fix", action="store_true", help="Check the limit relation")
    cmd.add_argument("--gfp", action="store_true", help="Cross-check with the greatest fixpoint")

    cmd = commands.add_parser("witness", parents=[common], add_help=False)
    cmd.add_argument("file", help="Witness JSON file")

    cmd = commands.add_parser("corpus", parents=[common], add_help=False)
    cmd.add_argument("directory", help="Directory of witness JSON files")
    cmd.add_argument("--jobs", type=int, default=1, help="Cases verified concurrently")

    cmd = commands.add_parser("sample", parents=[common], add_help=False)
    cmd.add_argument("--count", type=int, default=100, help="Triples to draw")
    cmd.add_argument("--seed", type=int, help="Random seed")
    cmd.add_argument("--closed", action="store_true", help="Only closed invisible processes")
    return parser


# --- input helpers ----------------------------------------------------------


def _read(path: str) -> str:
    try:
        return read_source(path)
    except OSError as exc:
        raise CliInputError([f"{path}: cannot read file: {exc.strerror or exc}"]) from exc


def _parse_order(text: Optional[str]) -> PriorityOrder:
    if not text:
        return PriorityOrder()
    pairs = []
    for item in text.split(","):
        parts = [part.strip() for part in item.split("<")]
        if len(parts) != 2 or not all(parts):
            raise CliInputError([f"cannot read order entry {item.strip()!r} (expected low<high)"])
        pairs.append(parts)
    try:
        return PriorityOrder.from_pairs(pairs)
    except OrderError as exc:
        raise CliInputError([str(exc)]) from exc


def _load_definitions(path: Optional[str]) -> DefinitionEnv:
    if not path:
        return DefinitionEnv()
    try:
        data = json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise CliInputError([f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}"]) from exc
    try:
        return definitions_from_dict(data, path)
    except WitnessFileError as exc:
        raise CliInputError([str(exc)]) from exc


def _profile(args: argparse.Namespace) -> CalculusProfile:
    return profile_for(args.calc, _parse_order(args.order), _load_definitions(args.defs))


def _bound_flags(args: argparse.Namespace) -> Dict[str, Optional[int]]:
    return {
        "max_states": args.max_states,
        "max_depth": args.max_depth,
        "max_bang_unfold": args.max_bang_unfold,
    }


def _bounds(args: argparse.Namespace, base: Optional[ExplorationBounds] = None) -> ExplorationBounds:
    try:
        return (base or ExplorationBounds.from_env()).override(**_bound_flags(args))
    except ValueError as exc:
        raise CliInputError([str(exc)]) from exc


def _load_term(path: str, profile: CalculusProfile) -> Term:
    src = _read(path)
    try:
        return parse_term(src, profile)
    except ParseError as exc:
        raise CliInputError([f"{path}:{d}" for d in exc.diagnostics]) from exc


def _output_format(args: argparse.Namespace) -> str:
    return "json" if args.json else args.format


def _emit(args: argparse.Namespace, source: str, rendered: str, single_mode: bool = True) -> None:
    print(rendered, end="" if rendered.endswith("\n") else "\n")
    report_file = resolve_report_path(args.report, source, _output_format(args), single_mode)
    write_report(report_file, rendered)


def _dump(payload: Any) -> str:
    return json.dumps(payload, indent=2, ensure_ascii=False)


def _verdict_word(verdict: Verdict) -> str:
    return {"holds": "Visible", "fails": "Invisible"}.get(verdict.status, "Unknown")


def _verdict_exit(verdict: Verdict) -> int:
    if verdict.holds:
        return EXIT_OK
    if verdict.fails:
        return EXIT_NEGATIVE
    return EXIT_UNKNOWN


# --- commands -----------------------------------------------------------------


def cmd_parse(args: argparse.Namespace) -> int:
    profile = _profile(args)
    term = _load_term(args.file, profile)
    if _output_format(args) == "json":
        rendered = _dump(
            {
                "calculus": profile.name,
                "pretty": pretty(term),
                "free_names": [str(n) for n in sorted_names(free_names(term))]
                if not holes(term)
                else None,
            }
        )
    else:
        rendered = pretty(term)
    _emit(args, args.file, rendered)
    return EXIT_OK


def _format_lts(lts: Lts) -> str:
    lines = [
        f"States: {len(lts.states)}  Edges: {len(lts.edges)}  "
        f"Complete: {'yes' if lts.complete else 'no'}",
        f"Bounds hit: {lts.describe_bounds()}",
    ]
    for i, state in enumerate(lts.states):
        lines.append(f"[{i}] {pretty(state)}")
        for _, label, target in lts.out_edges(i):
            lines.append(f"    --{format_label(label)}--> [{target}]")
    return "\n".join(lines)


def cmd_lts(args: argparse.Namespace) -> int:
    profile = _profile(args)
    term = _load_term(args.file, profile)
    lts = explore(term, profile, _bounds(args))
    fmt = _output_format(args)
    if fmt == "json":
        rendered = _dump(to_json_dict(lts))
    elif fmt == "dot":
        rendered = to_dot(lts)
        print(f"complete: {'yes' if lts.complete else 'no'}", file=sys.stderr)
    else:
        rendered = _format_lts(lts)
    _emit(args, args.file, rendered)
    return EXIT_OK


def _render_verdict(args: argparse.Namespace, verdict: Verdict, extra: Dict[str, Any]) -> str:
    if _output_format(args) == "json":
        payload = dict(extra)
        payload.update(verdict.to_dict())
        return _dump(payload)
    line = _verdict_word(verdict)
    if verdict.trace:
        line += "  [" + ", ".join(verdict.printed_trace()) + "]"
    if verdict.unknown:
        line += f"  (bounds hit: {verdict.reason})"
    return line


def cmd_visible(args: argparse.Namespace) -> int:
    profile = _profile(args)
    term = _load_term(args.file, profile)
    verdict = is_visible(term, profile, _bounds(args))
    _emit(args, args.file, _render_verdict(args, verdict, {"calculus": profile.name}))
    return _verdict_exit(verdict)


def cmd_can(args: argparse.Namespace) -> int:
    profile = _profile(args)
    term = _load_term(args.file, profile)
    try:
        pattern = parse_label_pattern(args.label)
    except LabelPatternError as exc:
        raise CliInputError([str(exc)]) from exc
    verdict = can_perform(term, profile, _bounds(args), pattern)
    extra = {"calculus": profile.name, "label": args.label}
    _emit(args, args.file, _render_verdict(args, verdict, extra))
    return _verdict_exit(verdict)


def cmd_names(args: argparse.Namespace) -> int:
    profile = _profile(args)
    term = _load_term(args.file, profile)
    payload: Dict[str, Any] = {
        "free_names": [str(n) for n in sorted_names(free_names(term))],
        "closed": is_closed(term),
    }
    if args.other:
        other = _load_term(args.other, profile)
        payload["other_free_names"] = [str(n) for n in sorted_names(free_names(other))]
        payload["independent"] = independent(term, other)
    if _output_format(args) == "json":
        rendered = _dump(payload)
    else:
        lines = [
            f"fn: {{{', '.join(payload['free_names'])}}}",
            f"closed: {'yes' if payload['closed'] else 'no'}",
        ]
        if args.other:
            lines.append(f"fn(other): {{{', '.join(payload['other_free_names'])}}}")
            lines.append(f"independent: {'yes' if payload['independent'] else 'no'}")
        rendered = "\n".join(lines)
    _emit(args, args.file, rendered)
    return EXIT_OK


def cmd_sim(args: argparse.Namespace) -> int:
    if args.k is None and not args.fix:
        raise CliInputError(["sim needs --k N or --fix"])
    if args.k is not None and args.k < 0:
        raise CliInputError(["--k must be a natural number"])
    profile = _profile(args)
    q = _load_term(args.file_q, profile)
    p = _load_term(args.file_p, profile)
    lq, lp = explore_pair(q, p, profile, _bounds(args))
    relation = sim_omega(lq, lp) if args.fix else sim_k(lq, lp, args.k)
    holds = relation.holds_at_roots(lq, lp)
    payload: Dict[str, Any] = {
        "k": "omega" if args.fix else args.k,
        "holds": holds,
        "converged_at": relation.converged_at,
    }
    if not holds:
        payload["distinguishing_depth"] = distinguishing_depth(lq, lp)
        payload["distinguishing_moves"] = format_moves(distinguishing_moves(lq, lp))
    if args.gfp:
        payload["gfp_agrees"] = weak_simulation_gfp(lq, lp).pairs == (relation if args.fix else sim_omega(lq, lp)).pairs

    if _output_format(args) == "json":
        rendered = _dump(payload)
    else:
        where = "omega" if args.fix else f"k={args.k}"
        lines = [f"Q <= P at {where}: {'holds' if holds else 'fails'}"]
        if args.fix:
            lines.append(f"Converged at k={relation.converged_at}")
        if not holds:
            lines.append(f"Distinguishing depth: {payload['distinguishing_depth']}")
            lines.append(f"Distinguishing moves: {', '.join(payload['distinguishing_moves']) or '-'}")
        if args.gfp:
            lines.append(f"Greatest fixpoint agrees: {'yes' if payload['gfp_agrees'] else 'NO'}")
        rendered = "\n".join(lines)
    _emit(args, args.file_q, rendered)
    return EXIT_OK if holds else EXIT_NEGATIVE


def cmd_witness(args: argparse.Namespace) -> int:
    case = load_witness(args.file)
    flags = _bound_flags(args)
    bounds = _bounds(args, case.bounds) if any(v is not None for v in flags.values()) else None
    report = verify_witness(case, bounds)
    rendered = _dump(report.to_dict()) if _output_format(args) == "json" else format_report(report)
    _emit(args, args.file, rendered)
    if report.overall == INCONCLUSIVE:
        return EXIT_UNKNOWN
    return EXIT_OK if report.matched else EXIT_NEGATIVE


def cmd_corpus(args: argparse.Namespace) -> int:
    flags = _bound_flags(args)
    overrides = _bounds(args) if any(v is not None for v in flags.values()) else None
    summary = run_corpus(args.directory, overrides, jobs=max(1, args.jobs))
    if _output_format(args) == "json":
        rendered = _dump(summary.to_dict())
    else:
        rendered = "".join(format_report(r) for r in summary.reports) + format_summary(summary)
    _emit(args, args.directory, rendered, single_mode=False)
    return summary.exit_code


def cmd_sample(args: argparse.Namespace) -> int:
    if args.calc not in SAMPLED_CALCULI:
        raise CliInputError([f"sample supports {', '.join(SAMPLED_CALCULI)}"])
    if args.count < 1:
        raise CliInputError(["--count must be at least 1"])
    summary = sample(args.calc, args.count, seed=args.seed, closed=args.closed)
    if _output_format(args) == "json":
        rendered = _dump(summary.to_dict())
    else:
        lines = [
            f"Calculus: {summary.calculus}  Seed: {summary.seed}  Closed I: {'yes' if summary.closed else 'no'}",
            f"Checked: {summary.checked}  Skipped: {summary.skipped}  "
            f"Counterexamples: {len(summary.counterexamples)}",
        ]
        for entry in summary.counterexamples:
            lines.append(f"  C = {entry['context']}")
            lines.append(f"  I = {entry['invisible']}")
            lines.append(f"  P = {entry['process']}")
        rendered = "\n".join(lines)
    _emit(args, f"sample-{args.calc}", rendered)
    return EXIT_NEGATIVE if summary.counterexamples else EXIT_OK


_HANDLERS: Dict[str, Callable[[argparse.Namespace], int]] = {
    "parse": cmd_parse,
    "lts": cmd_lts,
    "visible": cmd_visible,
    "can": cmd_can,
    "names": cmd_names,
    "sim": cmd_sim,
    "witness": cmd_witness,
    "corpus": cmd_corpus,
    "sample": cmd_sample,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.help or not args.command:
        mostrar_ajuda()
        return EXIT_OK if args.help else EXIT_INPUT

    if _output_format(args) == "dot" and args.command != "lts":
        print("Error: --format dot is only available for lts")
        return EXIT_INPUT

    configure_logging(args.verbose)
    try:
        return _HANDLERS[args.command](args)
    except CliInputError as exc:
        for message in exc.messages:
            print(f"Error: {message}")
        return EXIT_INPUT
    except WitnessFileError as exc:
        for message in exc.messages:
            print(f"Error: {exc.source}: {message}")
        return EXIT_INPUT
    except IncompleteLtsError as exc:
        print(f"Inconclusive: {exc}")
        return EXIT_UNKNOWN
    except (TermError, ProfileError, ValueError) as exc:
        print(f"Error: {exc}")
        return EXIT_INPUT


def main_witness(argv: Optional[List[str]] = None) -> int:
    """Shortcut entry point for verifying one witness file.

    Usage:
      rfw corpus/pi-match.json
      rfw caso.json --json -r ./reports
    """
    args = list(sys.argv[1:] if argv is None else argv)
    if not args:
        print("Usage: rfw <arquivo_testemunha> [opcoes]")
        return 1
    return main(["witness", *args])


def main_corpus(argv: Optional[List[str]] = None) -> int:
    """Shortcut entry point for running a witness directory.

    Usage:
      rfc corpus/
      rfc corpus/ --jobs 4 --json -r ./reports
    """
    args = list(sys.argv[1:] if argv is None else argv)
    if not args:
        print("Usage: rfc <diretorio_corpus> [opcoes]")
        return 1
    return main(["corpus", *args])


if __name__ == "__main__":
    raise SystemExit(main())
