"""``moma`` command line: run scenarios, re-check journals, render report views.

Exit codes: 0 success, 1 usage/IO/parse error, 2 invariance or assertion failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__, export
from .errors import MomaError, UsageError
from .scenarios import load, run

EXIT_OK, EXIT_USAGE, EXIT_FAILED = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _diag(message: str) -> None:
    if os.environ.get("MOMA_COLOR", "0") == "1":
        message = f"\x1b[31m{message}\x1b[0m"
    print(message, file=sys.stderr)


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    except OSError as exc:
        raise UsageError(f"{out}: {exc.strerror}") from None


def cmd_run(args) -> int:
    report = run(load(args.scenario), check_every_step=args.check_every_step, regime=args.regime)
    if args.journal:
        _emit(export.journal_csv(report.system), args.journal)
    data = export.report(report)
    text = export.dumps(data) if args.format == "json" else export.text_report(data)
    _emit(text, args.out)
    return EXIT_OK if not data["invariances"]["final"]["violations"] else EXIT_FAILED


def cmd_check(args) -> int:
    try:
        text = Path(args.journal).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise UsageError(f"{args.journal}: no such file") from None
    except OSError as exc:
        raise UsageError(f"{args.journal}: {exc.strerror}") from None
    try:
        result = export.check_journal(text)
    except ValueError as exc:
        raise UsageError(f"{args.journal}: {exc}") from None
    if not result.ok:
        where = ("row " if len(result.rows) == 1 else "rows ") + ", ".join(map(str, result.rows))
        where += (f" (macro booking {result.macro_ref})" if result.macro_ref else "")
        _diag(f"{args.journal}: {where}: {result.problem}")
        return EXIT_FAILED
    rec = result.record
    print(f"ok: receivables {rec['total_receivables']} = liabilities {rec['total_liabilities']}, "
          f"expenditures {rec['total_expenditures']} = revenues {rec['total_revenues']}")
    return EXIT_OK


def cmd_report(args) -> int:
    try:
        data = json.loads(Path(args.artifact).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise UsageError(f"{args.artifact}: no such file") from None
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"{args.artifact}: not a run report ({exc})") from None
    if not isinstance(data, dict) or "balances" not in data:
        raise UsageError(f"{args.artifact}: not a run report")
    _emit(export.render_view(data, args.view, args.format), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="moma", description="Macro-ledger scenario runner.")
    p.add_argument("--version", action="version", version=f"moma {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="replay a scenario and print its report")
    r.add_argument("scenario", help="scenario file or builtin:NAME")
    r.add_argument("--check-every-step", action=argparse.BooleanOptionalAction, default=True,
                   help="full invariance scan after every macro booking (default: on)")
    r.add_argument("--regime", choices=("fiat", "gold"), help="override the scenario's monetary regime")
    r.add_argument("--out", help="write the report here instead of standard output")
    r.add_argument("--format", choices=("json", "text"), default="json")
    r.add_argument("--seedless", action="store_true",
                   help="accepted for explicitness; runs never use randomness")
    r.add_argument("--journal", help="also write the journal CSV to this path")
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("check", help="re-verify an exported journal CSV from scratch")
    c.add_argument("journal")
    c.set_defaults(func=cmd_check)

    v = sub.add_parser("report", help="render one view of a JSON run report")
    v.add_argument("artifact", help="JSON report written by 'moma run'")
    v.add_argument("--view", required=True, help=", ".join(export.VIEWS))
    v.add_argument("--format", choices=("csv", "json", "dot"), default="json")
    v.add_argument("--out")
    v.set_defaults(func=cmd_report)
    return p


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        _diag(f"error: {exc}")
        return EXIT_USAGE
    except MomaError as exc:
        _diag(f"failed: {exc}")
        return EXIT_FAILED
    except SystemExit as exc:
        # --help and --version
        return EXIT_OK if not exc.code else EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
