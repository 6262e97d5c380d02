"""Transition labels, steps and label patterns."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import FrozenSet, Optional, Tuple, Union

from .terms import (
    KillerLabel,
    Level,
    Name,
    Polarity,
    Term,
    sorted_names,
)


@dataclass(frozen=True)
class TauL:
    level: Level = Level.ORDINARY
    guard: FrozenSet[Name] = frozenset()


@dataclass(frozen=True)
class VisAct:
    name: Name
    polarity: Polarity = Polarity.IN
    level: Level = Level.ORDINARY
    guard: FrozenSet[Name] = frozenset()


@dataclass(frozen=True)
class PiOutL:
    subject: Tuple[Name, ...]
    payload: Tuple[Name, ...]
    extruded: FrozenSet[Name] = frozenset()


@dataclass(frozen=True)
class PiInL:
    subject: Tuple[Name, ...]
    received: Tuple[Name, ...]


@dataclass(frozen=True)
class KillL:
    label: KillerLabel


Label = Union[TauL, VisAct, PiOutL, PiInL, KillL]


def is_visible(label: Label) -> bool:
    """Only the action part decides; guards and levels never do."""
    return isinstance(label, (VisAct, PiOutL, PiInL))


@dataclass(frozen=True)
class Step:
    label: Label
    target: Term


def _guard_prefix(guard: FrozenSet[Name]) -> str:
    if not guard:
        return ""
    return "{" + ",".join(str(n) for n in sorted_names(guard)) + "}:"


def _subject(subject: Tuple[Name, ...]) -> str:
    return ":".join(str(n) for n in subject)


def format_label(label: Label) -> str:
    if isinstance(label, TauL):
        core = "_tau" if label.level is Level.PRIORITIZED else "tau"
        return _guard_prefix(label.guard) + core
    if isinstance(label, VisAct):
        core = ("_" if label.level is Level.PRIORITIZED else "") + str(label.name)
        if label.polarity is Polarity.OUT:
            core = "'" + core
        return _guard_prefix(label.guard) + core
    if isinstance(label, PiOutL):
        text = f"{_subject(label.subject)}!<{','.join(str(n) for n in label.payload)}>"
        if label.extruded:
            binders = " ".join(str(n) for n in sorted_names(label.extruded))
            text = f"(new {binders}){text}"
        return text
    if isinstance(label, PiInL):
        return f"{_subject(label.subject)}?({','.join(str(n) for n in label.received)})"
    return f"kill({label.label})"


def label_sort_key(label: Label) -> Tuple[int, str]:
    order = (TauL, KillL, VisAct, PiOutL, PiInL)
    return (order.index(type(label)), format_label(label))


class LabelPatternError(ValueError):
    """Raised for label patterns that cannot describe a visible action."""


@dataclass(frozen=True)
class LabelPattern:
    """A visible action to look for; ``payload=None`` matches any payload."""

    kind: str  # "ccs", "out" or "in"
    subject: Tuple[Name, ...]
    polarity: Polarity = Polarity.IN
    level: Optional[Level] = None
    payload: Optional[Tuple[Name, ...]] = None

    def matches(self, label: Label) -> bool:
        if self.kind == "ccs":
            if not isinstance(label, VisAct):
                return False
            if (label.name,) != self.subject or label.polarity is not self.polarity:
                return False
            return self.level is None or label.level is self.level
        if self.kind == "out":
            if not isinstance(label, PiOutL) or label.subject != self.subject:
                return False
            return self.payload is None or label.payload == self.payload
        if not isinstance(label, PiInL) or label.subject != self.subject:
            return False
        return self.payload is None or label.received == self.payload


_NAME = r"[a-zA-Z][a-zA-Z0-9_]*(?:#\d+)?|[#~]\d+"
_CCS_RE = re.compile(rf"^('?)(_?)({_NAME})$")
_PI_RE = re.compile(rf"^((?:{_NAME})(?::(?:{_NAME}))*)\s*(!<|\?\()\s*(.*?)\s*(>|\))$")
_GUARD_RE = re.compile(r"^\{[^}]*\}:")
_MACHINE_RE = re.compile(r"^(?:([#~])(\d+)|(.+)#(\d+))$")


def parse_name(text: str) -> Name:
    """Read a printed name, including machine-generated ones."""
    found = _MACHINE_RE.match(text)
    if not found:
        return Name(text)
    if found.group(1):
        return Name(found.group(1), int(found.group(2)))
    return Name(found.group(3), int(found.group(4)))


def parse_label_pattern(src: str) -> LabelPattern:
    text = src.strip()
    core = _GUARD_RE.sub("", text)
    if core in ("tau", "_tau") or core.startswith("kill("):
        raise LabelPatternError(f"{src!r} is not a visible action")
    if core != text:
        raise LabelPatternError(f"guards are not part of label patterns: {src!r}")
    ccs = _CCS_RE.match(text)
    if ccs:
        polarity = Polarity.OUT if ccs.group(1) else Polarity.IN
        level = Level.PRIORITIZED if ccs.group(2) else Level.ORDINARY
        return LabelPattern("ccs", (parse_name(ccs.group(3)),), polarity, level)
    pi = _PI_RE.match(text)
    if pi and ((pi.group(2) == "!<") == (pi.group(4) == ">")):
        subject = tuple(parse_name(part) for part in pi.group(1).split(":"))
        kind = "out" if pi.group(2) == "!<" else "in"
        body = pi.group(3)
        if body == "*":
            payload = None
        else:
            parts = [part.strip() for part in body.split(",")]
            if not all(parts):
                raise LabelPatternError(f"empty payload item in {src!r}")
            payload = tuple(parse_name(part) for part in parts)
        return LabelPattern(kind, subject, payload=payload)
    raise LabelPatternError(f"cannot read label pattern {src!r}")
