"""Serialising run results: journal CSV, reports, registers, depository and graphs.

Machine formats carry minor-unit integers only; the text report prints
``major.minor CUR``.  Every output is a pure function of the run, so two
runs of the same scenario give byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
from collections import defaultdict

from . import contracts
from .boe import export_bill
from .errors import UnknownView, UsageError
from .ledger import AccountKind, account_id, normal_balance, parse_account_id
from .macro import claim_key, format_key
from .money import format_minor
from .scenarios.lifecycle import DebtLifecycle, to_dot, vortex_graph

JOURNAL_HEADER = ("entry_id", "date", "agent", "debit_account", "credit_account", "amount_minor", "currency",
                  "memo", "contract_ref", "macro_ref")
REGISTER_HEADER = ("date", "event", "amount_minor", "total_issued", "total_destroyed")
BALANCES_HEADER = ("agent", "account", "kind", "balance_minor", "currency")


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


# journal


def journal_rows(system) -> list[tuple]:
    rows = []
    for e in system.journal():
        ledger = system.ledgers[e.owner]
        rows.append((e.id, e.date.isoformat(), e.owner, account_id(ledger.accounts[e.debit]),
                     account_id(ledger.accounts[e.credit]), e.amount.amount, e.amount.currency, e.memo,
                     e.contract_ref or "", e.macro_ref or ""))
    return rows


def journal_csv(system) -> str:
    return _csv(JOURNAL_HEADER, journal_rows(system))


# snapshots of state


def balances(system) -> list[dict]:
    """Every opened account with its balance on the normal side."""
    out = []
    for agent in sorted(system.ledgers):
        ledger = system.ledgers[agent]
        for name in sorted(ledger.accounts):
            acc = ledger.accounts[name]
            out.append({"agent": agent, "account": account_id(acc), "kind": acc.kind.value,
                        "balance": normal_balance(acc, ledger.balances[name])})
    return out


def balance_sheets(system) -> dict:
    out = {}
    for agent in sorted(system.ledgers):
        a, li, eq = system.balance_sheet(agent).as_tuple()
        out[agent] = {"assets": a, "liabilities": li, "equity": eq}
    return out


def register_rows(system) -> list[dict]:
    return [{"date": ev.date.isoformat(), "event": ev.event, "amount": ev.amount,
             "total_issued": ev.total_issued, "total_destroyed": ev.total_destroyed}
            for ev in system.register.events]


def bookings(system) -> list[dict]:
    return [{"id": b.id, "label": b.label, "date": b.date.isoformat(), "kind": b.kind.value, "phase": b.phase,
             "legs": [leg.agent for leg in b.legs],
             "intermediary": b.intermediary.agent if b.intermediary else None,
             "contract_ref": b.contract_ref, "boe_ref": b.boe_ref}
            for b in system.bookings]


def contracts_json(system) -> list[dict]:
    return [contracts.export_contract(system, cid) for cid in sorted(system.contracts)]


def depository(system) -> list[dict]:
    return [export_bill(system.bills[bid]) for bid in sorted(system.bills)]


def schedules_json(schedules: dict) -> dict:
    out = {}
    for name in sorted(schedules):
        s = schedules[name]
        out[name] = {
            "investor": s.investor, "producer": s.producer, "contract": s.contract,
            "payout": {"date": s.payout[0].isoformat(), "amount": s.payout[1]},
            "expected": [{"date": d.isoformat(), "amount": a} for d, a in s.expected],
            "actual": [{"date": d.isoformat(), "amount": a, "paid": p} for d, a, p in s.actual],
        }
    return out


def report(rr) -> dict:
    """The complete, deterministic run artifact."""
    s = rr.system
    return {
        "scenario": rr.scenario,
        "currency": s.currency,
        "regime": {"kind": s.regime.kind, "gold_price": s.regime.gold_price},
        "final_date": rr.end_date.isoformat() if rr.end_date else None,
        "assertions": rr.assertions,
        "balance_sheets": balance_sheets(s),
        "balances": balances(s),
        "bookings": bookings(s),
        "invariances": {"final": rr.final, "trail": rr.trail},
        "lifecycles": [life.as_dict() for life in rr.lifecycles],
        "register": register_rows(s),
        "contracts": contracts_json(s),
        "depository": depository(s),
        "schedules": schedules_json(rr.schedules),
    }


# text


def _table(rows: list[tuple], right: set[int]) -> list[str]:
    if not rows:
        return []
    widths = [max(len(str(r[i])) for r in rows) for i in range(len(rows[0]))]
    out = []
    for r in rows:
        cells = [str(c).rjust(w) if i in right else str(c).ljust(w) for i, (c, w) in enumerate(zip(r, widths))]
        out.append("  ".join(cells).rstrip())
    return out


def text_report(data: dict) -> str:
    cur = data["currency"]
    lines = [f"scenario {data['scenario']} ({data['regime']['kind']}), final date {data['final_date']}", ""]
    lines.append("balance sheets")
    rows = [("agent", "assets", "liabilities", "equity")]
    for agent, sh in data["balance_sheets"].items():
        rows.append((agent, format_minor(sh["assets"], cur), format_minor(sh["liabilities"], cur),
                     format_minor(sh["equity"], cur)))
    lines += ["  " + x for x in _table(rows, {1, 2, 3})]
    lines += ["", "accounts"]
    rows = [(b["agent"], b["account"].split("/")[-1], format_minor(b["balance"], cur))
            for b in data["balances"] if b["balance"]]
    lines += ["  " + x for x in _table(rows, {2})]
    inv = data["invariances"]["final"]
    lines += ["", "invariances",
              f"  receivables {format_minor(inv['total_receivables'], cur)}"
              f" = liabilities {format_minor(inv['total_liabilities'], cur)}",
              f"  expenditures {format_minor(inv['total_expenditures'], cur)}"
              f" = revenues {format_minor(inv['total_revenues'], cur)}",
              f"  violations {len(inv['violations'])}, checked after {len(data['invariances']['trail'])} bookings"]
    lines += ["", "bookings"]
    rows = [(b["label"], b["date"], b["kind"], " -> ".join(b["legs"])) for b in data["bookings"]
            if b["phase"] == "event"]
    lines += ["  " + x for x in _table(rows, set())]
    if data["lifecycles"]:
        lines += ["", "debt lifecycles"]
        rows = [(x["id"], x["category"], f"{x['debtor']} -> {x['origin']}", x["created"], x["settled"] or "open",
                 format_minor(x["amount"], cur)) for x in data["lifecycles"]]
        lines += ["  " + x for x in _table(rows, {5})]
    if data["register"]:
        last = data["register"][-1]
        lines += ["", f"register: issued {format_minor(last['total_issued'], cur)},"
                      f" destroyed {format_minor(last['total_destroyed'], cur)}"]
    return "\n".join(lines) + "\n"


# views over a stored artifact

VIEWS = {
    "balances": ("csv", "json"),
    "invariances": ("csv", "json"),
    "lifecycles": ("csv", "json", "dot"),
    "register": ("csv", "json"),
    "contracts": ("json",),
    "depository": ("json",),
}


def render_view(data: dict, view: str, fmt: str) -> str:
    if view not in VIEWS:
        raise UnknownView(f"unknown view {view!r}; choose from {', '.join(VIEWS)}")
    if fmt not in VIEWS[view]:
        raise UsageError(f"view {view} has no {fmt} format; choose from {', '.join(VIEWS[view])}")
    cur = data["currency"]
    if view == "balances":
        if fmt == "json":
            return dumps(data["balances"])
        return _csv(BALANCES_HEADER, [(b["agent"], b["account"], b["kind"], b["balance"], cur)
                                      for b in data["balances"]])
    if view == "invariances":
        inv = data["invariances"]
        if fmt == "json":
            return dumps(inv)
        keys = ("booking", "date", "total_receivables", "total_liabilities", "total_expenditures",
                "total_revenues")
        rows = [tuple(r.get(k, "") for k in keys) + (len(r["violations"]),) for r in inv["trail"]]
        final = inv["final"]
        rows.append(("final",) + tuple(final[k] for k in keys[1:]) + (len(final["violations"]),))
        return _csv(keys + ("violations",), rows)
    if view == "lifecycles":
        if fmt == "json":
            return dumps(data["lifecycles"])
        if fmt == "dot":
            lives = [DebtLifecycle.from_dict(x) for x in data["lifecycles"]]
            return to_dot(vortex_graph(lives), data["scenario"])
        keys = ("id", "category", "creditor", "origin", "debtor", "created", "amount", "settled", "open_amount")
        rows = [tuple("" if x[k] is None else x[k] for k in keys) + (len(x["transformations"]),)
                for x in data["lifecycles"]]
        return _csv(keys + ("transformations",), rows)
    if view == "register":
        if fmt == "json":
            return dumps(data["register"])
        return _csv(REGISTER_HEADER, [(r["date"], r["event"], r["amount"], r["total_issued"], r["total_destroyed"])
                                      for r in data["register"]])
    if view == "contracts":
        return dumps(data["contracts"])
    return "".join(json.dumps(b, sort_keys=True, ensure_ascii=False) + "\n" for b in data["depository"])


# independent journal verification


class JournalCheck:
    """Result of re-summing an exported journal from scratch."""

    def __init__(self):
        self.ok = True
        self.problem = ""
        self.row = None
        self.rows: list[int] = []
        self.macro_ref = None
        self.record: dict = {}


def check_journal(text: str) -> JournalCheck:
    """Re-fold a journal CSV and re-check both invariances after every macro booking.

    Uses only the account ids in the file: no state from the engine that
    produced it.  Physical money held must also equal the central bank's
    record of money outstanding after every group.  Issue and destroy
    bookings are recognised as single-agent groups touching the money
    register and are exempt from the flow check.
    """
    result = JournalCheck()
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None:
        result.record = _totals(0, 0, None)
        return result
    if tuple(header) != JOURNAL_HEADER:
        raise ValueError(f"unexpected journal header {','.join(header)}")

    balances: dict[str, int] = defaultdict(int)
    accounts: dict[str, object] = {}
    groups: list[tuple[str, list[tuple[int, list[str]]]]] = []
    last_date = None
    for rowno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(JOURNAL_HEADER):
            raise ValueError(f"row {rowno}: expected {len(JOURNAL_HEADER)} fields, got {len(row)}")
        for acc_id in (row[3], row[4]):
            if acc_id not in accounts:
                accounts[acc_id] = parse_account_id(acc_id)
        amount = int(row[5])
        if amount <= 0:
            return _fail(result, rowno, row[9] or None, f"non-positive amount {amount}")
        if last_date is not None and row[1] < last_date:
            return _fail(result, rowno, row[9] or None, f"date {row[1]} goes back before {last_date}")
        last_date = row[1]
        ref = row[9]
        if ref and groups and groups[-1][0] == ref:
            groups[-1][1].append((rowno, row))
        else:
            groups.append((ref, [(rowno, row)]))

    claims: dict[tuple, list[int]] = defaultdict(lambda: [0, 0])
    exp_total = rev_total = 0
    # physical money held vs the central bank's record of it
    held = outstanding = 0
    for ref, rows in groups:
        touched: dict[tuple, list[int]] = defaultdict(list)
        deltas: dict[str, int] = defaultdict(int)
        register = False
        for rowno, row in rows:
            amount = int(row[5])
            for acc_id, sign in ((row[3], 1), (row[4], -1)):
                acc = accounts[acc_id]
                if acc.owner != row[2]:
                    return _fail(result, rowno, ref or None, f"account {acc_id} does not belong to {row[2]}")
                balances[acc_id] += sign * amount
                if acc.category == "register":
                    register = True
                if acc.category == "cash":
                    held += sign * amount
                if acc.category in ("register", "banknote"):
                    outstanding -= sign * amount
                if acc.is_medium:
                    deltas[row[2]] += sign * amount
                key = claim_key(acc)
                if key is not None:
                    if not ref:
                        return _fail(result, rowno, None, f"claim account {acc_id} moved outside a macro booking")
                    if acc.kind is AccountKind.ASSET:
                        claims[key][0] += sign * amount
                    else:
                        claims[key][1] -= sign * amount
                    touched[key].append(rowno)
            if not ref and deltas:
                return _fail(result, rowno, None, "money moved outside a macro booking")
        if held != outstanding:
            return _fail(result, [n for n, _ in rows], ref or None,
                         f"money held {held} differs from money outstanding {outstanding}")
        if not ref:
            continue
        for key, rownos in sorted(touched.items(), key=lambda kv: kv[1]):
            lhs, rhs = claims[key]
            if lhs != rhs:
                return _fail(result, sorted(set(rownos)), ref,
                             f"claims {format_key(key)} out of balance: {lhs} != {rhs}")
        agents = {row[2] for _, row in rows}
        if len(agents) == 1 and register:
            continue
        exp = sum(-d for d in deltas.values() if d < 0)
        rev = sum(d for d in deltas.values() if d > 0)
        if exp != rev:
            return _fail(result, [n for n, _ in rows], ref, f"payments out of balance: paid {exp}, received {rev}")
        exp_total += exp
        rev_total += rev

    recv = sum(lhs for lhs, _ in claims.values())
    liab = sum(rhs for _, rhs in claims.values())
    result.record = _totals(recv, liab, last_date, exp_total, rev_total)
    return result


def _totals(recv: int, liab: int, date, exp: int = 0, rev: int = 0) -> dict:
    return {"date": date, "total_receivables": recv, "total_liabilities": liab,
            "total_expenditures": exp, "total_revenues": rev, "violations": []}


def _fail(result: JournalCheck, rows: int | list[int], ref, message: str) -> JournalCheck:
    result.ok = False
    result.rows = [rows] if isinstance(rows, int) else rows
    result.row = result.rows[0]
    result.macro_ref = ref
    result.problem = message
    return result
