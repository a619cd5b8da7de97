"""Transaction file parsing, daily grouping, and rolling activity volumes.

Input format (normative, see README): UTF-8 delimiter-separated text with a
header row naming at least the columns
``date,time,lender,borrower,amount,rate,aggressor``. ``date`` is ISO-8601,
``amount`` is a decimal in EUR millions, ``aggressor`` is one of ``L`` (lender
initiated), ``B`` (borrower initiated), ``U`` (unknown). Amounts finer than
one euro are rounded half-even to the nearest euro.
"""

from __future__ import annotations

import csv
import datetime as dt
import decimal
from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterable, TextIO

from .errors import DataError, RecordError, UndefinedHistoryError
from .network import MICROS, DailyNetwork, net_edges

REQUIRED_COLUMNS = ("date", "time", "lender", "borrower", "amount", "rate", "aggressor")
AGGRESSOR_VALUES = frozenset({"L", "B", "U"})


@dataclass(frozen=True)
class RecordFormat:
    """Describes the physical layout of a transaction file."""

    delimiter: str = ","


@dataclass(frozen=True)
class LoanTransaction:
    """One raw overnight loan trade.

    ``amount`` is integer euros; ``rate`` (percent) and ``aggressor`` are
    carried through unused.
    """

    date: dt.date
    time: dt.time
    lender: int
    borrower: int
    amount: int
    rate: float
    aggressor: str

    @property
    def amount_millions(self) -> float:
        return self.amount / MICROS


def parse_amount(text: str) -> int:
    """Decimal EUR millions -> integer euros, half-even at the euro."""
    value = decimal.Decimal(text) * MICROS
    return int(value.to_integral_value(rounding=decimal.ROUND_HALF_EVEN))


def parse_transactions(
    stream: TextIO | Iterable[str],
    fmt: RecordFormat = RecordFormat(),
) -> list[LoanTransaction]:
    """Parse a transaction stream, preserving row order.

    Every malformed row raises RecordError with its line number and, where
    identifiable, the offending field. An empty stream yields an empty list.
    """
    reader = csv.reader(stream, delimiter=fmt.delimiter)
    try:
        header = next(reader)
    except StopIteration:
        return []
    columns = {name.strip().lower(): i for i, name in enumerate(header)}
    for name in REQUIRED_COLUMNS:
        if name not in columns:
            raise RecordError(f"missing column {name!r} in header", line=1, field=name)
    txs: list[LoanTransaction] = []
    for row in reader:
        line = reader.line_num
        if not row or (len(row) == 1 and not row[0].strip()):
            continue  # blank line
        if len(row) < len(header):
            raise RecordError(f"expected {len(header)} fields, got {len(row)}", line=line)

        def field(name: str) -> str:
            return row[columns[name]].strip()

        try:
            date = dt.date.fromisoformat(field("date"))
        except ValueError as exc:
            raise RecordError(str(exc), line=line, field="date") from exc
        try:
            time = dt.time.fromisoformat(field("time"))
        except ValueError as exc:
            raise RecordError(str(exc), line=line, field="time") from exc
        try:
            lender = int(field("lender"))
        except ValueError as exc:
            raise RecordError(f"bank id {field('lender')!r} is not an integer", line=line, field="lender") from exc
        try:
            borrower = int(field("borrower"))
        except ValueError as exc:
            raise RecordError(f"bank id {field('borrower')!r} is not an integer", line=line, field="borrower") from exc
        if lender == borrower:
            raise RecordError("lender equals borrower", line=line, field="borrower")
        try:
            amount = parse_amount(field("amount"))
        except decimal.DecimalException as exc:
            raise RecordError(f"amount {field('amount')!r} is not a decimal", line=line, field="amount") from exc
        if amount <= 0:
            raise RecordError(f"amount must be positive, got {field('amount')!r}", line=line, field="amount")
        try:
            rate = float(field("rate"))
        except ValueError as exc:
            raise RecordError(f"rate {field('rate')!r} is not a number", line=line, field="rate") from exc
        aggressor = field("aggressor")
        if aggressor not in AGGRESSOR_VALUES:
            raise RecordError(f"aggressor must be one of L/B/U, got {aggressor!r}", line=line, field="aggressor")
        txs.append(LoanTransaction(date, time, lender, borrower, amount, rate, aggressor))
    return txs


def build_daily_networks(txs: Iterable[LoanTransaction]) -> list[DailyNetwork]:
    """Net each calendar day's trades into one DailyNetwork, in date order.

    Days whose trades net out completely are retained as empty networks so
    day-indexed statistics stay aligned with the trading calendar.
    """
    by_day: dict[dt.date, list[tuple[int, int, int]]] = {}
    for tx in txs:
        by_day.setdefault(tx.date, []).append((tx.lender, tx.borrower, tx.amount))
    return [net_edges(by_day[d], date=d) for d in sorted(by_day)]


class ActivityHistory:
    """Per-bank gross daily trading volume (lending + borrowing), date ordered.

    Volumes are gross, taken from raw trades before netting.
    """

    #: window length for the rolling mean
    WINDOW = 10

    def __init__(self, volumes: dict[int, list[tuple[dt.date, int]]]):
        for bank, entries in volumes.items():
            dates = [d for d, _ in entries]
            if dates != sorted(set(dates)):
                raise DataError(f"bank {bank}: activity entries must be strictly increasing in date")
            if any(tv <= 0 for _, tv in entries):
                raise DataError(f"bank {bank}: non-positive daily volume")
        self._volumes = volumes
        self._dates = {bank: [d for d, _ in entries] for bank, entries in volumes.items()}

    @classmethod
    def from_transactions(cls, txs: Iterable[LoanTransaction]) -> "ActivityHistory":
        acc: dict[int, dict[dt.date, int]] = {}
        for tx in txs:
            for bank in (tx.lender, tx.borrower):
                day_map = acc.setdefault(bank, {})
                day_map[tx.date] = day_map.get(tx.date, 0) + tx.amount
        volumes = {
            bank: [(d, day_map[d]) for d in sorted(day_map)] for bank, day_map in sorted(acc.items())
        }
        return cls(volumes)

    @property
    def banks(self) -> tuple[int, ...]:
        return tuple(sorted(self._volumes))

    def entries(self, bank: int) -> list[tuple[dt.date, int]]:
        return list(self._volumes.get(bank, ()))

    def rolling_volume(self, bank: int, as_of: dt.date) -> float:
        """Mean gross volume over the last <= 10 active days up to ``as_of``.

        Returned in EUR millions. Fewer than 10 prior active days shrink the
        window rather than erroring; a bank with no activity up to ``as_of``
        raises UndefinedHistoryError.
        """
        dates = self._dates.get(bank)
        if not dates:
            raise UndefinedHistoryError(f"bank {bank} was never active")
        hi = bisect_right(dates, as_of)
        if hi == 0:
            raise UndefinedHistoryError(f"bank {bank} has no activity on or before {as_of.isoformat()}")
        lo = max(0, hi - self.WINDOW)
        window = self._volumes[bank][lo:hi]
        total = sum(tv for _, tv in window)
        return total / (len(window) * MICROS)


def rolling_volume(history: ActivityHistory, bank: int, as_of: dt.date) -> float:
    """Functional alias for :meth:`ActivityHistory.rolling_volume`."""
    return history.rolling_volume(bank, as_of)


def format_amount(micros: int) -> str:
    """Integer euros -> decimal EUR millions without float detours."""
    sign = "-" if micros < 0 else ""
    micros = abs(micros)
    whole, frac = divmod(micros, MICROS)
    if frac == 0:
        return f"{sign}{whole}"
    return f"{sign}{whole}.{frac:06d}".rstrip("0")


def write_transactions(
    path: str,
    txs: Iterable[LoanTransaction],
    fmt: RecordFormat = RecordFormat(),
) -> None:
    """Write transactions in the normative input format (see module docs)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, delimiter=fmt.delimiter)
        writer.writerow(REQUIRED_COLUMNS)
        for tx in txs:
            writer.writerow([
                tx.date.isoformat(),
                tx.time.isoformat(),
                str(tx.lender),
                str(tx.borrower),
                format_amount(tx.amount),
                repr(tx.rate),
                tx.aggressor,
            ])
