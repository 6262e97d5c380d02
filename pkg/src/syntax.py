"""Surface syntax: lark grammar, parser with spanned diagnostics, pretty-printer.

The same grammar is used for witness files, command-line input and the
HTTP service. Precedence, loosest first: ``+``, ``|``, postfix
restriction/relabelling, then prefixes and the other unary forms.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, VisitError

from .labels import parse_name
from .terms import (
    NIL,
    Bang,
    CalculusProfile,
    CcsAct,
    DefCall,
    Delimit,
    Deprioritize,
    Hole,
    Kill,
    KillerLabel,
    Level,
    Match,
    Name,
    Nil,
    Nu,
    Par,
    PiIn,
    PiOut,
    Placeholder,
    Polarity,
    Prefix,
    Prioritize,
    Protected,
    Relabel,
    RestrictSet,
    Sum,
    Tau,
    Term,
    TermError,
    Theta,
    make_relabel,
    sorted_names,
    validate_profile,
)

logger = logging.getLogger(__name__)

GRAMMAR = r"""
?start: sum_level

?sum_level: par_level
          | par_level ("+" par_level)+            -> sum

?par_level: restr_level
          | par_level "|" restr_level             -> parallel

?restr_level: unary
            | restr_level "\\{" labs "}"          -> restrict
            | restr_level "[" relabels "]"        -> relabel

?unary: "0"                                       -> nil
      | prefix "." unary                          -> prefixed
      | send                                      -> bare_send
      | "'" IDENT "<" names ">"                   -> co_send
      | "(" "new" new_names ")" unary             -> new
      | "!" unary                                 -> bang
      | "[" name "=" name "]" unary               -> match
      | "theta" "(" sum_level ")"                 -> theta
      | "up" "(" sum_level "," name ")"           -> up
      | "down" "(" sum_level "," name ")"         -> down
      | "kill" "(" klabel ")"                     -> kill
      | "[" klabel "]" unary                      -> delimit
      | IDENT "<" names? ">"                      -> call
      | HOLE                                      -> hole
      | "(" sum_level ")"

prefix: guard? simple_prefix
guard: "{" names? "}" ":"

?simple_prefix: "tau"                             -> tau
              | lab                               -> act_in
              | "'" lab                           -> act_out
              | send
              | receive

send: subject "!" "<" names ">"
receive: subject "?" "(" patitem ("," patitem)* ")"
subject: name (":" name)*

patitem: name                                     -> placeholder
       | "@" name                                 -> protected

lab: IDENT | PLAB | MACHINE_NAME
labs: lab ("," lab)*
relabels: relabel_pair ("," relabel_pair)*
relabel_pair: name "/" name
names: name ("," name)*
new_names: name (","? name)*
name: IDENT | MACHINE_NAME
klabel: IDENT | MACHINE_NAME

HOLE.3: /\[_\d+\]/
MACHINE_NAME.2: /[a-zA-Z][a-zA-Z0-9_]*#\d+|[#~]\d+/
PLAB: /_(?:[a-zA-Z][a-zA-Z0-9_]*(?:#\d+)?|[#~]\d+)/
IDENT: /[a-zA-Z][a-zA-Z0-9_]*/
COMMENT: /#(?![0-9])[^\n]*/

%import common.WS
%ignore WS
%ignore COMMENT
"""

_parser = Lark(GRAMMAR, parser="lalr", propagate_positions=True, maybe_placeholders=False)


@dataclass(frozen=True)
class SourceSpan:
    start: int
    end: int

    def to_dict(self) -> Dict[str, int]:
        return {"start": self.start, "end": self.end}


@dataclass(frozen=True)
class Diagnostic:
    message: str
    span: SourceSpan

    def __str__(self) -> str:
        return f"{self.span.start}-{self.span.end}: {self.message}"

    def to_dict(self) -> Dict[str, object]:
        return {"message": self.message, "span": self.span.to_dict()}


class ParseError(ValueError):
    """Raised with every diagnostic collected for one input."""

    def __init__(self, diagnostics: List[Diagnostic]) -> None:
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


def _byte_offset(src: str, index: int) -> int:
    index = max(0, min(index, len(src)))
    return len(src[:index].encode("utf-8"))


def _span(src: str, start: int, end: int) -> SourceSpan:
    start_b = _byte_offset(src, start)
    end_b = max(start_b, _byte_offset(src, end))
    return SourceSpan(start_b, end_b)


class _Located(Exception):
    def __init__(self, message: str, start: int, end: int) -> None:
        super().__init__(message)
        self.message = message
        self.start = start
        self.end = end


@v_args(meta=True)
class _TermBuilder(Transformer):
    """Turns the parse tree into AST nodes and remembers their source spans."""

    def __init__(self) -> None:
        super().__init__()
        self.spans: Dict[int, Tuple[int, int]] = {}
        self._keep: List[Term] = []

    def _mark(self, node, meta):
        if isinstance(node, Term) and not getattr(meta, "empty", True):
            self.spans[id(node)] = (meta.start_pos, meta.end_pos)
            self._keep.append(node)
        return node

    # names and labels

    def name(self, meta, children):
        return parse_name(str(children[0]))

    def klabel(self, meta, children):
        name = parse_name(str(children[0]))
        return KillerLabel(name.text, name.fresh_index)

    def names(self, meta, children):
        return tuple(children)

    def new_names(self, meta, children):
        return tuple(children)

    def lab(self, meta, children):
        token: Token = children[0]
        if token.type == "PLAB":
            return (parse_name(str(token)[1:]), Level.PRIORITIZED)
        return (parse_name(str(token)), Level.ORDINARY)

    def labs(self, meta, children):
        return frozenset(children)

    def relabel_pair(self, meta, children):
        new, old = children
        return (old, new)

    def relabels(self, meta, children):
        mapping: Dict[Name, Name] = {}
        for old, new in children:
            if old in mapping and mapping[old] != new:
                raise _Located(f"{old} is relabelled twice", meta.start_pos, meta.end_pos)
            mapping[old] = new
        return mapping

    def guard(self, meta, children):
        return frozenset(children[0]) if children else frozenset()

    def subject(self, meta, children):
        return tuple(children)

    def placeholder(self, meta, children):
        return Placeholder(children[0])

    def protected(self, meta, children):
        return Protected(children[0])

    # prefixes

    def tau(self, meta, children):
        return Tau()

    def act_in(self, meta, children):
        name, level = children[0]
        return CcsAct(name, Polarity.IN, level)

    def act_out(self, meta, children):
        name, level = children[0]
        return CcsAct(name, Polarity.OUT, level)

    def send(self, meta, children):
        subject, payload = children
        return PiOut(subject, payload)

    def receive(self, meta, children):
        subject, *pattern = children
        return PiIn(subject, tuple(pattern))

    def prefix(self, meta, children):
        if len(children) == 1:
            return children[0]
        guard, action = children
        if isinstance(action, Tau):
            return Tau(guard)
        if isinstance(action, CcsAct):
            return CcsAct(action.name, action.polarity, action.level, guard)
        raise _Located("guards apply to CCS-style prefixes only", meta.start_pos, meta.end_pos)

    # terms

    def nil(self, meta, children):
        return NIL

    def prefixed(self, meta, children):
        action, cont = children
        return self._mark(Prefix(action, cont), meta)

    def bare_send(self, meta, children):
        return self._mark(Prefix(children[0], NIL), meta)

    def co_send(self, meta, children):
        subject, payload = children
        return self._mark(Prefix(PiOut((Name(str(subject)),), payload), NIL), meta)

    def new(self, meta, children):
        binders, body = children
        for binder in reversed(binders):
            body = self._mark(Nu(binder, body), meta)
        return body

    def bang(self, meta, children):
        return self._mark(Bang(children[0]), meta)

    def match(self, meta, children):
        lhs, rhs, cont = children
        return self._mark(Match(lhs, rhs, cont), meta)

    def theta(self, meta, children):
        return self._mark(Theta(children[0]), meta)

    def up(self, meta, children):
        body, action = children
        return self._mark(Prioritize(body, action), meta)

    def down(self, meta, children):
        body, action = children
        return self._mark(Deprioritize(body, action), meta)

    def kill(self, meta, children):
        return self._mark(Kill(children[0]), meta)

    def delimit(self, meta, children):
        label, body = children
        return self._mark(Delimit(label, body), meta)

    def call(self, meta, children):
        ident = str(children[0])
        args = children[1] if len(children) > 1 else ()
        return self._mark(DefCall(ident, tuple(args)), meta)

    def hole(self, meta, children):
        return self._mark(Hole(int(str(children[0])[2:-1])), meta)

    def sum(self, meta, children):
        return self._mark(Sum(tuple(children)), meta)

    def parallel(self, meta, children):
        left, right = children
        return self._mark(Par(left, right), meta)

    def restrict(self, meta, children):
        body, labels = children
        return self._mark(RestrictSet(labels, body), meta)

    def relabel(self, meta, children):
        body, mapping = children
        return self._mark(make_relabel(body, mapping), meta)


def _syntax_diagnostic(src: str, exc: UnexpectedInput) -> Diagnostic:
    pos = getattr(exc, "pos_in_stream", None)
    token = getattr(exc, "token", None)
    if pos is None or pos < 0 or getattr(token, "type", None) == "$END":
        pos = len(src)
    before = src[:pos].rstrip()
    if before.endswith(".") and not before.endswith(".."):
        message = "expected term after prefix dot"
    elif isinstance(exc, UnexpectedEOF) or pos >= len(src):
        message = "unexpected end of input"
    elif isinstance(exc, UnexpectedCharacters):
        message = f"unexpected character {src[pos]!r}"
    else:
        token = getattr(exc, "token", None)
        message = f"unexpected token {str(token)!r}" if token else "syntax error"
    end = pos + 1 if pos < len(src) else pos
    return Diagnostic(message, _span(src, pos, end))


def parse_raw(src: str) -> Tuple[Term, Dict[int, Tuple[int, int]]]:
    """Parse without profile checks; returns the term and its node spans."""
    if not src.strip():
        raise ParseError([Diagnostic("empty input", _span(src, 0, len(src)))])
    try:
        tree = _parser.parse(src)
    except UnexpectedInput as exc:
        raise ParseError([_syntax_diagnostic(src, exc)]) from None
    builder = _TermBuilder()
    try:
        term = builder.transform(tree)
    except VisitError as exc:
        orig = exc.orig_exc
        if isinstance(orig, _Located):
            raise ParseError([Diagnostic(orig.message, _span(src, orig.start, orig.end))]) from None
        if isinstance(orig, TermError):
            raise ParseError([Diagnostic(str(orig), _span(src, 0, len(src)))]) from None
        raise
    return term, builder.spans


def parse_term(src: str, profile: CalculusProfile) -> Term:
    """Parse and validate ``src`` against ``profile``."""
    term, spans = parse_raw(src)
    violations = validate_profile(term, profile)
    if violations:
        diagnostics = []
        for violation in violations:
            start, end = spans.get(id(violation.node), (0, len(src)))
            diagnostics.append(Diagnostic(violation.message, _span(src, start, end)))
        logger.debug("profile %s rejected %d construct(s)", profile.name, len(diagnostics))
        raise ParseError(diagnostics)
    return term


# --- pretty-printing -------------------------------------------------------

_SUM, _PAR, _RESTR, _UNARY = range(4)


def _names(names) -> str:
    return ",".join(str(n) for n in names)


def _subject(subject) -> str:
    return ":".join(str(n) for n in subject)


def _action(action) -> str:
    if isinstance(action, Tau):
        guard = "{" + _names(sorted_names(action.guard)) + "}:" if action.guard else ""
        return guard + "tau"
    if isinstance(action, CcsAct):
        guard = "{" + _names(sorted_names(action.guard)) + "}:" if action.guard else ""
        quote = "'" if action.polarity is Polarity.OUT else ""
        level = "_" if action.level is Level.PRIORITIZED else ""
        return f"{guard}{quote}{level}{action.name}"
    if isinstance(action, PiOut):
        return f"{_subject(action.subject)}!<{_names(action.payload)}>"
    items = [f"@{item.name}" if isinstance(item, Protected) else str(item.name) for item in action.pattern]
    return f"{_subject(action.subject)}?({','.join(items)})"


def _lab(pair) -> str:
    name, level = pair
    return ("_" if level is Level.PRIORITIZED else "") + str(name)


def _prec(t: Term) -> int:
    if isinstance(t, Sum):
        return _SUM
    if isinstance(t, Par):
        return _PAR
    if isinstance(t, (RestrictSet, Relabel)):
        return _RESTR
    return _UNARY


def _at(t: Term, minimum: int) -> str:
    text = pretty(t)
    return f"({text})" if _prec(t) < minimum else text


def pretty(t: Term) -> str:
    """Minimally parenthesized surface form of a term or context."""
    if isinstance(t, Nil):
        return "0"
    if isinstance(t, Prefix):
        head = _action(t.action)
        if isinstance(t.action, PiOut) and isinstance(t.cont, Nil):
            return head
        return f"{head}.{_at(t.cont, _UNARY)}"
    if isinstance(t, Sum):
        return " + ".join(_at(branch, _PAR) for branch in t.branches)
    if isinstance(t, Par):
        return f"{_at(t.left, _PAR)} | {_at(t.right, _RESTR)}"
    if isinstance(t, Nu):
        body = _at(t.body, _UNARY)
        sep = "" if body.startswith("(") else " "
        return f"(new {t.name}){sep}{body}"
    if isinstance(t, RestrictSet):
        labels = sorted(t.labels, key=lambda pair: (pair[0].text, pair[0].fresh_index or -1, int(pair[1])))
        return f"{_at(t.body, _RESTR)}\\{{{','.join(_lab(p) for p in labels)}}}"
    if isinstance(t, Relabel):
        pairs = ",".join(f"{new}/{old}" for old, new in t.mapping)
        return f"{_at(t.body, _RESTR)}[{pairs}]"
    if isinstance(t, Bang):
        return f"!{_at(t.body, _UNARY)}"
    if isinstance(t, Match):
        return f"[{t.lhs}={t.rhs}] {_at(t.cont, _UNARY)}"
    if isinstance(t, DefCall):
        return f"{t.name}<{_names(t.args)}>"
    if isinstance(t, Theta):
        return f"theta({pretty(t.body)})"
    if isinstance(t, Prioritize):
        return f"up({pretty(t.body)}, {t.action})"
    if isinstance(t, Deprioritize):
        return f"down({pretty(t.body)}, {t.action})"
    if isinstance(t, Kill):
        return f"kill({t.label})"
    if isinstance(t, Delimit):
        return f"[{t.label}] {_at(t.body, _UNARY)}"
    if isinstance(t, Hole):
        return f"[_{t.index}]"
    raise TermError(f"cannot print {type(t).__name__}")


def parse_context(src: str, profile: CalculusProfile, arity: Optional[int] = None) -> Term:
    """Parse a context and check its holes are numbered 1..arity."""
    from .terms import holes

    term = parse_term(src, profile)
    found = holes(term)
    expected = set(range(1, (arity if arity is not None else len(found)) + 1))
    if found != expected:
        raise ParseError(
            [Diagnostic(f"context holes {sorted(found)} do not match {sorted(expected)}", _span(src, 0, len(src)))]
        )
    return term
