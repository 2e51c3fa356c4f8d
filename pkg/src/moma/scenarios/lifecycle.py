"""Debt lifecycles: where each claim came from, how it changed hands, when it ended.

The journal is replayed booking by booking.  Every claim relation gets a
reference (the contract, bill, deposit pair, ...); a bill accepted for a
trade claim continues that trade claim's lifecycle.
"""

from __future__ import annotations

import datetime as dt
from collections import defaultdict
from dataclasses import dataclass, field

import networkx as nx

from ..ledger import AccountKind
from ..macro import BookingKind, claim_key

TRANSFORMING = {
    BookingKind.BOE_CREATION: "BoECreation",
    BookingKind.BOE_DISCOUNT: "Discount",
}


@dataclass
class DebtLifecycle:
    id: str
    ref: str
    category: str
    creditor: str
    debtor: str
    created: dt.date
    amount: int
    transformations: list[tuple[dt.date, str, str]] = field(default_factory=list)
    settled: dt.date | None = None
    open_amount: int = 0
    origin: str = ""

    def __post_init__(self):
        self.origin = self.origin or self.creditor

    @classmethod
    def from_dict(cls, d: dict) -> DebtLifecycle:
        return cls(d["id"], d["ref"], d["category"], d["creditor"], d["debtor"], dt.date.fromisoformat(d["created"]),
                   d["amount"], [(dt.date.fromisoformat(t["date"]), t["kind"], t["creditor"])
                                 for t in d["transformations"]],
                   dt.date.fromisoformat(d["settled"]) if d["settled"] else None, d["open_amount"], d["origin"])

    def as_dict(self) -> dict:
        return {
            "id": self.id,
            "ref": self.ref,
            "category": self.category,
            "creditor": self.creditor,
            "origin": self.origin,
            "debtor": self.debtor,
            "created": self.created.isoformat(),
            "amount": self.amount,
            "transformations": [
                {"date": d.isoformat(), "kind": k, "creditor": c} for d, k, c in self.transformations
            ],
            "settled": self.settled.isoformat() if self.settled else None,
            "open_amount": self.open_amount,
        }


def _ref(acc, aliases: dict[str, str]) -> tuple[str, str]:
    """(reference, category) of a claim asset account."""
    cat = acc.category
    tail = acc.name.split(":", 1)[1] if ":" in acc.name else acc.name
    if acc.instrument is not None:
        if acc.instrument == "banknotes":
            return f"banknotes@{acc.counterparty}", "banknote"
        ref = aliases.get(acc.instrument, acc.instrument)
        return ref, "trade" if ref != acc.instrument else "bill"
    if cat == "contract":
        return tail, "trade"
    if cat in ("loan", "restitution"):
        return tail, cat
    return f"{cat}:{acc.owner}->{acc.counterparty}", cat


def _transfer_kind(booking) -> str | None:
    if booking.kind in TRANSFORMING:
        return TRANSFORMING[booking.kind]
    if booking.kind is BookingKind.BOE_TRANSFER:
        memo = booking.legs[0].entries[0].memo if booking.legs[0].entries else ""
        if memo.startswith("transfer"):
            return "InterbankTransfer"
        return "Recourse" if memo.startswith("recourse") else "Endorse"
    return None


def debt_lifecycles(system, start: dt.date | None = None, end: dt.date | None = None) -> list[DebtLifecycle]:
    aliases: dict[str, str] = {}
    amounts: dict[str, int] = defaultdict(int)
    current: dict[str, DebtLifecycle] = {}
    done: list[DebtLifecycle] = []
    counts: dict[str, int] = defaultdict(int)
    for b in system.bookings:
        if b.kind is BookingKind.BOE_CREATION and b.contract_ref and b.boe_ref:
            aliases[b.boe_ref] = b.contract_ref
        before = dict(amounts)
        touched: dict[str, tuple[str, str, str]] = {}
        gained: dict[str, str] = {}
        for leg in b.all_legs():
            ledger = system.ledgers[leg.agent]
            for e in leg.entries:
                for name, sign in ((e.debit, 1), (e.credit, -1)):
                    acc = ledger.accounts[name]
                    key = claim_key(acc)
                    if key is None or acc.kind is not AccountKind.ASSET:
                        continue
                    ref, cat = _ref(acc, aliases)
                    amounts[ref] += sign * e.amount.amount
                    debtor = key[2]
                    touched[ref] = (cat, acc.owner, debtor)
                    if sign > 0:
                        gained[ref] = acc.owner
        kind = _transfer_kind(b)
        for ref in sorted(touched):
            cat, creditor, debtor = touched[ref]
            was, now = before.get(ref, 0), amounts[ref]
            life = current.get(ref)
            if life is None and now > 0:
                counts[ref] += 1
                lid = ref if counts[ref] == 1 else f"{ref}#{counts[ref]}"
                life = DebtLifecycle(lid, ref, cat, gained.get(ref, creditor), debtor, b.date, now)
                current[ref] = life
            elif life is not None and kind and ref in gained and was > 0:
                life.transformations.append((b.date, kind, gained[ref]))
                life.creditor = gained[ref]
            if life is not None:
                life.open_amount = now
                if now == 0:
                    life.settled = b.date
                    done.append(current.pop(ref))
    out = sorted(done + list(current.values()), key=lambda x: (x.created, x.id))
    return [x for x in out if (end is None or x.created <= end) and (start is None or x.settled is None
                                                                      or x.settled >= start)]


def node(agent: str, date: dt.date) -> str:
    return f"{agent}@{date.isoformat()}"


def vortex_graph(lifecycles: list[DebtLifecycle]) -> nx.MultiDiGraph:
    """Nodes are (agent, date); edges follow each debt from creation to settlement,
    plus dotted timeline edges joining an agent's consecutive dates."""
    g = nx.MultiDiGraph()
    for life in lifecycles:
        creditor = life.origin
        g.add_edge(node(life.debtor, life.created), node(creditor, life.created),
                   label=f"{life.id}: open {life.amount}", kind="open")
        for date, kind, new in life.transformations:
            g.add_edge(node(creditor, date), node(new, date), label=f"{life.id}: {kind}", kind=kind)
            creditor = new
        if life.settled:
            g.add_edge(node(life.debtor, life.settled), node(creditor, life.settled),
                       label=f"{life.id}: settled", kind="settled")
    by_agent = defaultdict(set)
    for n in g.nodes:
        agent, date = n.rsplit("@", 1)
        by_agent[agent].add(date)
    for agent, dates in by_agent.items():
        ds = sorted(dates)
        for a, b in zip(ds, ds[1:]):
            g.add_edge(f"{agent}@{a}", f"{agent}@{b}", label="", kind="timeline")
    return g


def to_dot(g: nx.MultiDiGraph, name: str = "vortex") -> str:
    """Deterministic DOT text for a vortex graph."""
    lines = [f'digraph "{name}" {{', "  rankdir=LR;", "  node [shape=box];"]
    for n in sorted(g.nodes):
        lines.append(f'  "{n}";')
    edges = sorted((u, v, d["kind"], d["label"]) for u, v, d in g.edges(data=True))
    for u, v, kind, label in edges:
        style = ' style=dotted' if kind == "timeline" else ""
        lines.append(f'  "{u}" -> "{v}" [label="{label}"{style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def components(g: nx.MultiDiGraph) -> int:
    return nx.number_weakly_connected_components(g) if g.number_of_nodes() else 0
