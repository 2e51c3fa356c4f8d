"""Line-oriented scenario files.

Each non-blank line reads ``<YYYY-MM-DD> <command> <arg>...``; ``#`` starts a
comment.  Arguments are whitespace separated; ``key=value`` arguments are
options.  Amounts are integers in minor units.
"""

from __future__ import annotations

import datetime as dt
import re
from dataclasses import dataclass, field

from ..errors import ScenarioParseError

_COMMAND = re.compile(r"^[a-z_]+$")
_DATE = re.compile(r"^\d{4}-\d{2}-\d{2}$")
_OPTION = re.compile(r"^([a-z_]+)=(.*)$")


@dataclass(frozen=True)
class Event:
    line: int
    date: dt.date
    command: str
    args: tuple[str, ...]
    options: dict = field(default_factory=dict, hash=False)
    opening: bool = False


@dataclass
class Scenario:
    name: str
    source: str
    events: list[Event]
    regime: tuple[str, ...] = ("fiat",)


def _column(raw: str, token_index: int) -> int:
    """1-based column of the n-th whitespace-separated token."""
    for i, m in enumerate(re.finditer(r"\S+", raw)):
        if i == token_index:
            return m.start() + 1
    return len(raw) + 1


def parse(text: str, name: str = "scenario") -> Scenario:
    events: list[Event] = []
    regime: tuple[str, ...] = ("fiat",)
    last: dt.date | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        tokens = body.split()
        if not tokens:
            continue
        if not _DATE.match(tokens[0]):
            raise ScenarioParseError(f"expected a YYYY-MM-DD date, got {tokens[0]!r}", lineno, _column(body, 0))
        try:
            date = dt.date.fromisoformat(tokens[0])
        except ValueError:
            raise ScenarioParseError(f"invalid date {tokens[0]!r}", lineno, _column(body, 0)) from None
        if last is not None and date < last:
            raise ScenarioParseError(f"date {date} goes back before {last}", lineno, 1)
        last = date
        if len(tokens) < 2:
            raise ScenarioParseError("missing command", lineno, len(body.rstrip()) + 1)
        rest = tokens[1:]
        opening = rest[0] == "opening"
        if opening:
            rest = rest[1:]
            if not rest:
                raise ScenarioParseError("missing command after 'opening'", lineno, len(body.rstrip()) + 1)
        offset = len(tokens) - len(rest)
        command = rest[0]
        if not _COMMAND.match(command):
            raise ScenarioParseError(f"bad command {command!r}", lineno, _column(body, offset))
        args, options = [], {}
        for i, tok in enumerate(rest[1:], start=offset + 1):
            m = _OPTION.match(tok)
            if m:
                if m.group(1) in options:
                    raise ScenarioParseError(f"option {m.group(1)!r} given twice", lineno, _column(body, i))
                options[m.group(1)] = m.group(2)
            elif options:
                raise ScenarioParseError(f"positional argument {tok!r} after options", lineno, _column(body, i))
            else:
                args.append(tok)
        if command == "scenario":
            name = args[0] if args else name
        if command == "regime":
            regime = tuple(args)
        events.append(Event(lineno, date, command, tuple(args), options, opening))
    return Scenario(name, text, events, regime)
