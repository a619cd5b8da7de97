"""Structural node measures and binned cascade statistics.

Closeness and core numbers are computed on the undirected, unweighted
projection of the day's network. Closeness uses component scaling so that
values stay comparable on days where the market splits into several pieces:
within a component of size c in a network of n nodes it is
(c - 1)^2 / (sum of distances * (n - 1)), and an isolated node scores 0.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Union

from .cascade import CascadeResult
from .errors import DataError
from .network import DailyNetwork


@dataclass(frozen=True)
class CentralityProfile:
    bank: int
    in_degree: int
    out_degree: int
    closeness: float
    core_number: int


def _undirected(net: DailyNetwork) -> dict[int, list[int]]:
    adj: dict[int, list[int]] = {b: [] for b in net.nodes}
    for u, v, _ in net.edges():
        adj[u].append(v)
        adj[v].append(u)
    return adj


def _closeness_from(adj: dict[int, list[int]], source: int, n: int) -> float:
    dist = {source: 0}
    queue = deque([source])
    total = 0
    while queue:
        node = queue.popleft()
        d = dist[node] + 1
        for nb in adj[node]:
            if nb not in dist:
                dist[nb] = d
                total += d
                queue.append(nb)
    reached = len(dist) - 1
    if reached == 0 or n <= 1:
        return 0.0
    return reached * reached / (total * (n - 1))


def closeness(net: DailyNetwork, bank: int) -> float:
    """Component-scaled closeness of ``bank``; 0 for an isolated node."""
    if bank not in net:
        raise DataError(f"bank {bank} is not active in this network")
    return _closeness_from(_undirected(net), bank, net.n_nodes)


def closeness_all(net: DailyNetwork) -> dict[int, float]:
    adj = _undirected(net)
    n = net.n_nodes
    return {b: _closeness_from(adj, b, n) for b in net.nodes}


def core_number(net: DailyNetwork, bank: int) -> int:
    if bank not in net:
        raise DataError(f"bank {bank} is not active in this network")
    return core_numbers(net)[bank]


def core_numbers(net: DailyNetwork) -> dict[int, int]:
    """k-core number of every node, by iterative lowest-degree peeling."""
    adj = _undirected(net)
    degree = {b: len(nb) for b, nb in adj.items()}
    # peel in nondecreasing current-degree order using degree buckets
    max_deg = max(degree.values(), default=0)
    buckets: list[set[int]] = [set() for _ in range(max_deg + 1)]
    for b, d in degree.items():
        buckets[d].add(b)
    core: dict[int, int] = {}
    removed: set[int] = set()
    current = 0
    for _ in range(len(adj)):
        d = 0
        while not buckets[d]:
            d += 1
        node = min(buckets[d])  # deterministic tie-break
        buckets[d].remove(node)
        current = max(current, d)
        core[node] = current
        removed.add(node)
        for nb in adj[node]:
            if nb not in removed:
                buckets[degree[nb]].remove(nb)
                degree[nb] -= 1
                buckets[degree[nb]].add(nb)
    return core


def centrality_profiles(net: DailyNetwork) -> dict[int, CentralityProfile]:
    close = closeness_all(net)
    cores = core_numbers(net)
    return {
        b: CentralityProfile(b, net.in_degree(b), net.out_degree(b), close[b], cores[b])
        for b in net.nodes
    }


# -- binned statistics ---------------------------------------------------

#: default bin width for closeness values in [0, 1]
CLOSENESS_BIN_WIDTH = 0.02
#: default width of logarithmic shock-size bins, in decades
SHOCK_BIN_DECADES = 0.25

Outcome = Union[CascadeResult, bool, int, float]


@dataclass(frozen=True)
class Cell:
    count: int
    total: float
    total_sq: float

    @property
    def mean(self) -> float:
        return self.total / self.count

    @property
    def se(self) -> float:
        """Standard error of the mean; 0 for a single observation."""
        if self.count < 2:
            return 0.0
        var = (self.total_sq - self.total * self.total / self.count) / (self.count - 1)
        if var < 0.0:  # float cancellation on near-constant cells
            var = 0.0
        return math.sqrt(var / self.count)


class BinnedStatistic:
    """Mean / standard error / count of a value over binned axes.

    Keys are bin labels per axis: the plain integer for count-like axes, the
    lower bin edge for continuous ones.
    """

    def __init__(self, axes: tuple[str, ...]):
        self.axes = axes
        self._cells: dict[tuple, list] = {}

    def add(self, key: tuple, value: float) -> None:
        cell = self._cells.get(key)
        if cell is None:
            self._cells[key] = [1, value, value * value]
        else:
            cell[0] += 1
            cell[1] += value
            cell[2] += value * value

    def merge(self, other: "BinnedStatistic") -> None:
        if other.axes != self.axes:
            raise ValueError("cannot merge statistics over different axes")
        for key in sorted(other._cells):
            count, total, total_sq = other._cells[key]
            cell = self._cells.get(key)
            if cell is None:
                self._cells[key] = [count, total, total_sq]
            else:
                cell[0] += count
                cell[1] += total
                cell[2] += total_sq

    def cell(self, key: tuple) -> Cell:
        return Cell(*self._cells[key])

    def cells(self) -> list[tuple[tuple, Cell]]:
        return [(key, Cell(*self._cells[key])) for key in sorted(self._cells)]

    @property
    def sample_size(self) -> int:
        return sum(c[0] for c in self._cells.values())


def _axis_bin(axis: str, profile: CentralityProfile, outcome: Outcome):
    if axis == "in_degree":
        return profile.in_degree
    if axis == "out_degree":
        return profile.out_degree
    if axis == "core_number":
        return profile.core_number
    if axis == "closeness":
        return round(math.floor(profile.closeness / CLOSENESS_BIN_WIDTH) * CLOSENESS_BIN_WIDTH, 10)
    if axis == "shock":
        if not isinstance(outcome, CascadeResult):
            raise DataError("shock axis requires cascade results as outcomes")
        if outcome.initial_shock <= 0.0:
            raise DataError("shock axis requires positive initial shocks")
        exponent = math.floor(math.log10(outcome.initial_shock) / SHOCK_BIN_DECADES)
        return round(exponent * SHOCK_BIN_DECADES, 10)
    raise DataError(f"unknown binning axis {axis!r}")


def _outcome_value(outcome: Outcome, measure: str) -> float:
    if isinstance(outcome, CascadeResult):
        return outcome.node_fraction if measure == "nodes" else outcome.loss_fraction
    if isinstance(outcome, bool):
        return 1.0 if outcome else 0.0
    return float(outcome)


def bin_cascades(
    results: Iterable[tuple[CentralityProfile, Outcome]],
    axes: tuple[str, ...],
    measure: str = "nodes",
) -> BinnedStatistic:
    """Aggregate (profile, outcome) pairs into per-bin mean, SE, and count.

    Outcomes may be cascade results (binned by the chosen size measure),
    default indicators, or plain numbers. Axes name profile fields, or
    ``shock`` for the seeding bank's initial shock on a log scale.
    """
    if measure not in ("nodes", "lending"):
        raise DataError(f"unknown cascade measure {measure!r}")
    stat = BinnedStatistic(axes)
    for profile, outcome in results:
        key = tuple(_axis_bin(axis, profile, outcome) for axis in axes)
        stat.add(key, _outcome_value(outcome, measure))
    if not stat._cells:
        raise DataError("no results to bin")
    return stat
