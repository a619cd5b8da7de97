"""Synthetic transaction datasets with realistic market structure.

The proprietary trade data cannot ship, so experiments run on generated
markets that match the published per-day statistics of the two reference
years: bank counts, link counts, mean degree, and daily lending volume.

Structure comes from three persistent bank traits drawn once per dataset:

* a heavy-tailed latent size (bounded Pareto), so the same hubs dominate
  every day and loan sizes span orders of magnitude;
* an activity propensity increasing in size, so large banks trade almost
  daily while small ones drop in and out;
* a lending bias with most mass near 0 or 1, so banks are predominantly
  active on one side of the market on any given day.

Links attach by size-proportional fitness sampling, which yields heavier
degree tails than a same-density uniform random graph. No reciprocal pairs
are emitted, so gross and netted totals coincide and the drawn daily volume
survives netting.
"""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError
from .ingest import LoanTransaction, build_daily_networks
from .network import MICROS

# generator shape knobs (dataset-wide)
SIZE_CAP_RATIO = 1000.0  # truncation of the latent-size tail
ACTIVITY_POWER = 0.4  # size exponent for daily activity weighting
FITNESS_POWER = 0.7  # size exponent for link attachment propensity
BIAS_CONCENTRATION = 0.8  # Beta spread; < 1 pushes banks to one market side
BIAS_LEAN_FLOOR = 0.25  # lending propensity of the smallest banks
BIAS_LEAN_SLOPE = 0.5  # size-rank tilt: the largest banks lean to lending
WEIGHT_SIZE_POWER = 0.3  # loan size sensitivity to the counterparties' sizes
WEIGHT_SIGMA = 1.5  # log-normal spread of loan sizes around the fitness level
MAX_TRADES_PER_LINK = 3
DEGREE_SD = 0.5  # published spread of the mean-degree statistic


@dataclass(frozen=True)
class MarketPreset:
    """Per-day target statistics of a generated market."""

    name: str
    n_banks_mean: float
    n_banks_sd: float
    n_links_mean: float
    n_links_sd: float
    mean_degree: float
    daily_volume_mean: float
    daily_volume_sd: float
    n_days: int = 257
    size_tail_exponent: float = 2.3
    seed: int = 0


PRESETS: dict[str, MarketPreset] = {
    "2006-like": MarketPreset(
        name="2006-like",
        n_banks_mean=128.0,
        n_banks_sd=9.0,
        n_links_mean=355.0,
        n_links_sd=48.0,
        mean_degree=5.5,
        daily_volume_mean=20_953.0,
        daily_volume_sd=4_240.0,
        seed=2006,
    ),
    "2011-like": MarketPreset(
        name="2011-like",
        n_banks_mean=70.0,
        n_banks_sd=8.0,
        n_links_mean=161.0,
        n_links_sd=29.0,
        mean_degree=4.5,
        daily_volume_mean=4_261.0,
        daily_volume_sd=1_001.0,
        seed=2011,
    ),
}

_START_DATES = {"2006-like": dt.date(2006, 1, 2), "2011-like": dt.date(2011, 1, 3)}
_DEFAULT_START = dt.date(2011, 1, 3)


def get_preset(name: str, **overrides) -> MarketPreset:
    try:
        preset = PRESETS[name]
    except KeyError:
        raise ConfigError(
            f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}"
        ) from None
    return replace(preset, **overrides) if overrides else preset


def _trading_calendar(name: str, n_days: int) -> list[dt.date]:
    day = _START_DATES.get(name, _DEFAULT_START)
    calendar = []
    while len(calendar) < n_days:
        if day.weekday() < 5:
            calendar.append(day)
        day += dt.timedelta(days=1)
    return calendar


def _bounded_pareto(rng: np.random.Generator, shape: float, cap: float, size: int) -> np.ndarray:
    u = rng.random(size)
    return (1.0 - u * (1.0 - cap ** -shape)) ** (-1.0 / shape)


def _clipped_normal(rng: np.random.Generator, mean: float, sd: float, lo: float, hi: float) -> float:
    return float(np.clip(rng.normal(mean, sd), lo, hi))


def _weighted_index(rng: np.random.Generator, cum_weights: np.ndarray) -> int:
    return int(np.searchsorted(cum_weights, rng.random() * cum_weights[-1], side="right"))


def generate_market(preset: MarketPreset) -> list[LoanTransaction]:
    """Generate one dataset of gross loan trades for ``preset``.

    Deterministic under the preset's seed. Raises ConfigError for presets
    that cannot fit their link target into the available bank pairs.
    """
    if preset.n_banks_mean < 2 or preset.n_days < 1:
        raise ConfigError("preset needs at least 2 banks and 1 day")
    if preset.n_links_mean > preset.n_banks_mean * (preset.n_banks_mean - 1):
        raise ConfigError(
            f"preset {preset.name!r} asks for {preset.n_links_mean} links but "
            f"{preset.n_banks_mean} banks support at most "
            f"{preset.n_banks_mean * (preset.n_banks_mean - 1)}"
        )
    if preset.size_tail_exponent <= 1.0:
        raise ConfigError("size_tail_exponent must exceed 1")

    rng = np.random.default_rng(preset.seed)
    pool = max(4, int(math.ceil(preset.n_banks_mean * 1.6)))
    sizes = _bounded_pareto(rng, preset.size_tail_exponent - 1.0, SIZE_CAP_RATIO, pool)
    # one-sided banks with a size tilt: small banks mostly borrow, the
    # biggest mostly lend, which widens the lending-side degree tail
    rank = sizes.argsort().argsort() / max(pool - 1, 1)
    lean = BIAS_LEAN_FLOOR + BIAS_LEAN_SLOPE * rank
    lend_bias = rng.beta(BIAS_CONCENTRATION * lean, BIAS_CONCENTRATION * (1.0 - lean))
    activity = sizes**ACTIVITY_POWER
    activity /= activity.sum()
    calendar = _trading_calendar(preset.name, preset.n_days)

    txs: list[LoanTransaction] = []
    for date in calendar:
        n_active = int(round(_clipped_normal(
            rng, preset.n_banks_mean, preset.n_banks_sd,
            max(2.0, 0.5 * preset.n_banks_mean), min(float(pool), 1.5 * preset.n_banks_mean),
        )))
        n_links = int(round(_clipped_normal(
            rng, preset.n_links_mean, preset.n_links_sd,
            max(1.0, 0.5 * preset.n_links_mean), 1.5 * preset.n_links_mean,
        )))
        n_links = min(n_links, n_active * (n_active - 1) // 2)
        active = np.sort(rng.choice(pool, size=n_active, replace=False, p=activity))
        links = _draw_links(rng, active, sizes, lend_bias, n_links)
        # clip a hair inside three sigma so per-trade rounding cannot push a
        # day's total past the published three-sd band
        volume = _clipped_normal(
            rng, preset.daily_volume_mean, preset.daily_volume_sd,
            max(0.1 * preset.daily_volume_mean,
                preset.daily_volume_mean - 2.999 * preset.daily_volume_sd),
            preset.daily_volume_mean + 2.999 * preset.daily_volume_sd,
        )
        txs.extend(_emit_trades(rng, date, links, sizes, volume))
    return txs


def _draw_links(
    rng: np.random.Generator,
    active: np.ndarray,
    sizes: np.ndarray,
    lend_bias: np.ndarray,
    n_links: int,
) -> list[tuple[int, int]]:
    """Directed links for one day: coverage first, then fitness attachment."""
    fitness = sizes[active] ** FITNESS_POWER
    cum_fitness = np.cumsum(fitness)
    n = len(active)
    used: set[tuple[int, int]] = set()
    links: list[tuple[int, int]] = []  # local indices (lender, borrower)
    covered = np.zeros(n, dtype=bool)

    def orient(i: int, j: int) -> tuple[int, int]:
        bi = lend_bias[active[i]]
        bj = lend_bias[active[j]]
        p_i_lends = bi * (1.0 - bj)
        p_j_lends = bj * (1.0 - bi)
        total = p_i_lends + p_j_lends
        chance = 0.5 if total == 0.0 else p_i_lends / total
        return (i, j) if rng.random() < chance else (j, i)

    def place(i: int, j: int) -> bool:
        key = (i, j) if i < j else (j, i)
        if i == j or key in used:
            return False
        used.add(key)
        links.append(orient(i, j))
        covered[i] = covered[j] = True
        return True

    # every active bank gets at least one link while the budget allows
    for i in rng.permutation(n):
        if covered[i] or len(links) >= n_links:
            continue
        for _ in range(64):
            j = _weighted_index(rng, cum_fitness)
            if place(int(i), j):
                break

    while len(links) < n_links:
        lender = _weighted_index(rng, cum_fitness)
        borrower = _weighted_index(rng, cum_fitness)
        key = (lender, borrower) if lender < borrower else (borrower, lender)
        if lender == borrower or key in used:
            continue
        used.add(key)
        links.append(orient(lender, borrower))

    return [(int(active[i]), int(active[j])) for i, j in links]


def _emit_trades(
    rng: np.random.Generator,
    date: dt.date,
    links: Sequence[tuple[int, int]],
    sizes: np.ndarray,
    volume_target: float,
) -> list[LoanTransaction]:
    """Loan amounts around the counterparties' joint size, rescaled to the
    day's volume, optionally split into 1-3 same-direction trades."""
    if not links:
        return []
    raw = np.array([
        (sizes[u] * sizes[v]) ** WEIGHT_SIZE_POWER for u, v in links
    ]) * np.exp(rng.normal(0.0, WEIGHT_SIGMA, len(links)))
    scale = volume_target / raw.sum()
    trades: list[LoanTransaction] = []
    tick = 0
    for (lender, borrower), amount in zip(links, raw * scale):
        micros = max(1, int(round(amount * MICROS)))
        parts = _split_amount(rng, micros)
        for part in parts:
            seconds = 8 * 3600 + (tick * 11) % (9 * 3600)
            trades.append(LoanTransaction(
                date=date,
                time=dt.time(seconds // 3600, seconds % 3600 // 60, seconds % 60),
                lender=int(lender),
                borrower=int(borrower),
                amount=part,
                rate=1.0,  # placeholder; carried but unused downstream
                aggressor="U",
            ))
            tick += 1
    return trades


def _split_amount(rng: np.random.Generator, micros: int) -> list[int]:
    n_parts = int(rng.integers(1, MAX_TRADES_PER_LINK + 1))
    if n_parts == 1 or micros < n_parts:
        return [micros]
    cuts = np.sort(rng.choice(micros - 1, size=n_parts - 1, replace=False) + 1)
    bounds = [0, *cuts.tolist(), micros]
    return [bounds[i + 1] - bounds[i] for i in range(n_parts)]


# -- validation ------------------------------------------------------------


@dataclass(frozen=True)
class ValidationCheck:
    statistic: str
    target: float
    tolerance: float  # two target standard deviations
    observed: float

    @property
    def passed(self) -> bool:
        return abs(self.observed - self.target) <= self.tolerance


@dataclass(frozen=True)
class ValidationReport:
    preset: str
    checks: tuple[ValidationCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def validate_against_preset(
    txs: Iterable[LoanTransaction], preset: MarketPreset
) -> ValidationReport:
    """Check dataset-level means of nodes, links, degree, and volume against
    the preset targets within two target standard deviations each."""
    nets = build_daily_networks(txs)
    if nets:
        n_days = len(nets)
        nodes = sum(n.n_nodes for n in nets) / n_days
        links = sum(n.n_edges for n in nets) / n_days
        degree = sum(2 * n.n_edges / n.n_nodes for n in nets if n.n_nodes) / n_days
        volume = sum(n.total_weight for n in nets) / n_days / MICROS
    else:
        nodes = links = degree = volume = 0.0
    checks = (
        ValidationCheck("nodes", preset.n_banks_mean, 2 * preset.n_banks_sd, nodes),
        ValidationCheck("links", preset.n_links_mean, 2 * preset.n_links_sd, links),
        ValidationCheck("degree", preset.mean_degree, 2 * DEGREE_SD, degree),
        ValidationCheck("volume", preset.daily_volume_mean, 2 * preset.daily_volume_sd, volume),
    )
    return ValidationReport(preset.name, checks)
