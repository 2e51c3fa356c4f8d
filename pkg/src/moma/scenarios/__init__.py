"""Scenario files, built-in replays and the analyses run over them."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from ..errors import UnknownScenario, UsageError
from .parser import Event, Scenario, parse
from .runner import Runner, RunReport, run

BUILTINS = (
    "vortex",
    "vortex_interest",
    "boe_purchase",
    "gold_issue",
    "fiat_issue",
    "dynamic_discounting",
    "kruschwitz",
    "supply_chain",
)


def builtin_text(name: str) -> str:
    if name not in BUILTINS:
        raise UnknownScenario(f"unknown built-in scenario {name!r}; choose from {', '.join(BUILTINS)}")
    return resources.files(__package__).joinpath("data", f"{name}.moma").read_text(encoding="utf-8")


def builtin(name: str) -> Scenario:
    return parse(builtin_text(name), name)


def load(ref: str) -> Scenario:
    """``builtin:NAME`` or a path to a scenario file."""
    if ref.startswith("builtin:"):
        return builtin(ref.split(":", 1)[1])
    path = Path(ref)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise UsageError(f"{ref}: no such file") from None
    except OSError as exc:
        raise UsageError(f"{ref}: {exc.strerror}") from None
    return parse(text, path.stem)


__all__ = ["BUILTINS", "Event", "RunReport", "Runner", "Scenario", "builtin", "builtin_text", "load", "parse", "run"]
