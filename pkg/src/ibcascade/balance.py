"""Stylized balance sheets and the post-shock solvency rule.

Every active bank-day gets a sheet scaled off its recent trading volume:
total assets are the rolling volume divided by twice the interbank-lending
share ``theta``, capital is the fraction ``gamma`` of total assets, and the
remaining items close the identity  A + L = C + D + B = TA.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import BalanceSheetError, ConfigError


@dataclass(frozen=True)
class Params:
    """Market-wide balance-sheet ratios.

    ``theta`` is interbank lending over total assets, ``gamma`` capital over
    total assets; both strictly inside (0, 1).
    """

    theta: float = 0.2
    gamma: float = 0.05

    def __post_init__(self):
        if not (0.0 < self.theta < 1.0):
            raise ConfigError(f"theta must lie in (0, 1), got {self.theta}")
        if not (0.0 < self.gamma < 1.0):
            raise ConfigError(f"gamma must lie in (0, 1), got {self.gamma}")


@dataclass(frozen=True)
class BalanceSheet:
    """One bank's stylized sheet, all amounts in EUR millions."""

    bank: int
    total_assets: float
    external_assets: float
    lending: float
    borrowing: float
    capital: float
    deposits: float

    def identity_gap(self) -> float:
        """Relative gap of the asset side versus the liability side."""
        assets = self.external_assets + self.lending
        liabilities = self.capital + self.deposits + self.borrowing
        return abs(assets - liabilities) / self.total_assets


def make_balance_sheet(
    bank: int,
    lending: float,
    borrowing: float,
    tv_mean: float,
    params: Params,
    *,
    clamp: bool = False,
) -> BalanceSheet:
    """Derive a sheet from net positions and the rolling trading volume.

    With ``clamp=False`` a sheet whose external assets or deposits would turn
    negative raises BalanceSheetError. With ``clamp=True`` (used when
    rebuilding sheets for randomized networks, where reshuffled links can
    concentrate borrowing) total assets are raised to the smallest value that
    keeps external assets >= 0 and deposits >= 0.
    """
    if tv_mean <= 0.0:
        raise BalanceSheetError(bank, f"rolling volume must be positive, got {tv_mean}")
    if lending < 0.0 or borrowing < 0.0:
        raise BalanceSheetError(bank, "net positions cannot be negative")
    total_assets = tv_mean / (2 * params.theta)
    if clamp:
        floor = borrowing / (1.0 - params.gamma)
        # the division may round a hair low; deposits must not go negative
        while (1.0 - params.gamma) * floor < borrowing:
            floor = math.nextafter(floor, math.inf)
        if total_assets < floor:
            total_assets = floor
        if total_assets < lending:
            total_assets = lending
    external = total_assets - lending
    if external < 0.0:
        raise BalanceSheetError(
            bank, f"lending {lending} exceeds total assets {total_assets}"
        )
    capital = params.gamma * total_assets
    deposits = (1.0 - params.gamma) * total_assets - borrowing
    if deposits < 0.0:
        raise BalanceSheetError(
            bank, f"borrowing {borrowing} exceeds non-capital liabilities of {total_assets}"
        )
    return BalanceSheet(bank, total_assets, external, lending, borrowing, capital, deposits)


def is_solvent(sheet: BalanceSheet, lending_loss: float) -> bool:
    """Whether the bank survives writing off ``lending_loss`` of its loans.

    A bank survives while the loss stays strictly below its capital. The
    check deliberately uses this reduced capital form; the equivalent
    long-form test on the full sheet cancels large items and loses precision.
    """
    if lending_loss < 0.0 or lending_loss > sheet.lending:
        raise ValueError(
            f"lending loss {lending_loss} outside [0, {sheet.lending}] for bank {sheet.bank}"
        )
    return lending_loss < sheet.capital
