"""Netted daily loan networks.

Edges point lender -> borrower, so a bank's out-degree counts the distinct
counterparts it is a net lender to and its in-degree the counterparts it is a
net borrower from. Cascade shocks travel against edge direction (from a
defaulted borrower up to its lenders).

All money is held internally as integer euros (one millionth of the external
unit, EUR millions). Netting mutual gross positions is then exact, which makes
"both directions cancel" a well-defined event instead of a float coincidence.
"""

from __future__ import annotations

import datetime as dt
from collections import deque
from typing import Iterable, Iterator, Mapping

from .errors import RecordError

#: integer euros per EUR million (the external money unit)
MICROS = 1_000_000

#: placeholder date for networks built outside a calendar context
UNDATED = dt.date(1970, 1, 1)


def to_millions(micros: int) -> float:
    """Convert integer euros to float EUR millions (single rounding step)."""
    return micros / MICROS


class DailyNetwork:
    """Immutable directed weighted graph of one day's netted exposures.

    Invariants enforced at construction: positive integer weights, no
    self-loops, at most one edge per ordered pair, and never both i->j and
    j->i (the netted-network class). Nodes carrying no edge are allowed only
    when passed explicitly via ``nodes`` (null models preserve the day's node
    set even if randomization isolates a bank); ``net_edges`` never produces
    them.
    """

    __slots__ = ("date", "_out", "_in", "_nodes", "_n_edges", "_total")

    def __init__(
        self,
        date: dt.date,
        edges: Iterable[tuple[int, int, int]],
        nodes: Iterable[int] = (),
    ):
        out: dict[int, dict[int, int]] = {}
        inc: dict[int, dict[int, int]] = {}
        n_edges = 0
        total = 0
        for u, v, w in edges:
            if not isinstance(w, int) or isinstance(w, bool):
                raise RecordError(f"edge weight must be an integer euro amount, got {w!r}")
            if w <= 0:
                raise RecordError(f"non-positive edge weight {w} on {u}->{v}")
            if u == v:
                raise RecordError(f"self-loop on bank {u}")
            if v in out.get(u, ()):
                raise RecordError(f"duplicate edge {u}->{v}")
            if u in out.get(v, ()):
                raise RecordError(f"reciprocal edges between {u} and {v} violate netting")
            out.setdefault(u, {})[v] = w
            inc.setdefault(v, {})[u] = w
            out.setdefault(v, {})
            inc.setdefault(u, {})
            n_edges += 1
            total += w
        node_set = set(out)
        node_set.update(nodes)
        for b in node_set:
            out.setdefault(b, {})
            inc.setdefault(b, {})
        self.date = date
        self._out = out
        self._in = inc
        self._nodes = tuple(sorted(node_set))
        self._n_edges = n_edges
        self._total = total

    # -- topology access ---------------------------------------------------

    @property
    def nodes(self) -> tuple[int, ...]:
        return self._nodes

    @property
    def n_nodes(self) -> int:
        return len(self._nodes)

    @property
    def n_edges(self) -> int:
        return self._n_edges

    @property
    def total_weight(self) -> int:
        """Total net lending of this day, in integer euros."""
        return self._total

    def edges(self) -> Iterator[tuple[int, int, int]]:
        """All edges as (lender, borrower, weight), in canonical sorted order."""
        for u in self._nodes:
            row = self._out[u]
            for v in sorted(row):
                yield u, v, row[v]

    def has_edge(self, lender: int, borrower: int) -> bool:
        return borrower in self._out.get(lender, ())

    def weight(self, lender: int, borrower: int) -> int:
        return self._out[lender][borrower]

    def lenders_of(self, bank: int) -> Mapping[int, int]:
        """Banks that are net lenders to ``bank``, mapped to the loaned amount."""
        return self._in[bank]

    def borrowers_of(self, bank: int) -> Mapping[int, int]:
        """Banks that ``bank`` is a net lender to, mapped to the loaned amount."""
        return self._out[bank]

    def in_degree(self, bank: int) -> int:
        return len(self._in[bank])

    def out_degree(self, bank: int) -> int:
        return len(self._out[bank])

    def in_strength(self, bank: int) -> int:
        """Total borrowing of ``bank`` in integer euros."""
        return sum(self._in[bank].values())

    def out_strength(self, bank: int) -> int:
        """Total lending of ``bank`` in integer euros."""
        return sum(self._out[bank].values())

    # -- misc --------------------------------------------------------------

    def __contains__(self, bank: int) -> bool:
        return bank in self._out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DailyNetwork):
            return NotImplemented
        return (
            self.date == other.date
            and self._nodes == other._nodes
            and self._out == other._out
        )

    def __hash__(self):  # pragma: no cover - identity hashing is fine
        return id(self)

    def __repr__(self) -> str:
        return f"DailyNetwork({self.date.isoformat()}, nodes={self.n_nodes}, edges={self.n_edges})"


def net_edges(
    gross: Iterable[tuple[int, int, int]],
    date: dt.date = UNDATED,
) -> DailyNetwork:
    """Aggregate and net a gross loan list into a DailyNetwork.

    For every unordered bank pair the two gross flow totals are offset; the
    surplus direction survives as a single edge, an exact tie cancels the pair
    entirely, and banks left without any edge are dropped from the node set.

    Amounts are integer euros and must be positive; a bad record raises
    RecordError carrying its 0-based row index.
    """
    flows: dict[tuple[int, int], int] = {}
    for row, (lender, borrower, amount) in enumerate(gross):
        if lender == borrower:
            raise RecordError("self-loop: lender equals borrower", line=row)
        if not isinstance(amount, int) or isinstance(amount, bool):
            raise RecordError(f"amount must be an integer euro value, got {amount!r}", line=row)
        if amount <= 0:
            raise RecordError(f"non-positive amount {amount}", line=row)
        key = (lender, borrower)
        flows[key] = flows.get(key, 0) + amount
    edges = []
    for (u, v), w_uv in flows.items():
        if u > v:
            continue  # handled from the (v, u) entry
        w_vu = flows.get((v, u), 0)
        if w_uv > w_vu:
            edges.append((u, v, w_uv - w_vu))
        elif w_vu > w_uv:
            edges.append((v, u, w_vu - w_uv))
        # exact tie: no net exposure, pair dropped
    for (u, v), w_uv in flows.items():
        if u > v and (v, u) not in flows:
            edges.append((u, v, w_uv))
    return DailyNetwork(date, edges)


def degrees(net: DailyNetwork) -> dict[int, tuple[int, int]]:
    """Per-bank (in_degree, out_degree); in sums borrowing links, out lending."""
    return {b: (net.in_degree(b), net.out_degree(b)) for b in net.nodes}


def weak_components(net: DailyNetwork) -> list[set[int]]:
    """Weakly connected components, largest first (ties by smallest member)."""
    seen: set[int] = set()
    comps: list[set[int]] = []
    for start in net.nodes:
        if start in seen:
            continue
        comp = {start}
        queue = deque([start])
        seen.add(start)
        while queue:
            b = queue.popleft()
            for nb in (*net.lenders_of(b), *net.borrowers_of(b)):
                if nb not in seen:
                    seen.add(nb)
                    comp.add(nb)
                    queue.append(nb)
        comps.append(comp)
    comps.sort(key=lambda c: (-len(c), min(c)))
    return comps
