"""Randomized reference networks preserving stated empirical properties.

Four generators, each with an exact preservation contract that is re-checked
after every generation:

* rewired          -- node set, per-node in/out degrees, weight multiset
* random           -- node set, edge count, weight multiset
* fixed-weight     -- node set, full topology, total lending
* random-fixed     -- node set, edge count, total lending

All outputs stay inside the netted-network class (no self-loops, no
reciprocal pairs) so cascade semantics carry over unchanged. Generators are
pure functions of (input network, seed).
"""

from __future__ import annotations

import dataclasses
import enum
import warnings
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .balance import BalanceSheet, Params, make_balance_sheet
from .errors import ConfigError, DataError
from .network import MICROS, DailyNetwork


class NullModelKind(enum.Enum):
    EMPIRICAL = "empirical"
    REWIRED = "rewired"
    RANDOM = "random"
    FIXED_WEIGHT = "fixed-weight"
    RANDOM_FIXED_WEIGHT = "random-fixed-weight"

    @classmethod
    def from_label(cls, label: str) -> "NullModelKind":
        for kind in cls:
            if kind.value == label:
                return kind
        raise ConfigError(f"unknown null model {label!r}; choose from "
                          f"{', '.join(k.value for k in cls)}")


@dataclass(frozen=True)
class RewireConfig:
    """Knobs of the weight-matched double-edge-swap randomizer.

    ``weight_tolerance`` is the maximum relative weight difference for two
    links to count as similar; it doubles automatically whenever fewer than
    1% of sampled pairings qualify, so heavy-tailed weights cannot stall the
    walk. The target is ``swaps_per_edge`` successful swaps per edge within a
    budget of ``max_attempts_factor`` attempts per target swap.
    """

    weight_tolerance: float = 0.10
    swaps_per_edge: int = 10
    max_attempts_factor: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.weight_tolerance < 0:
            raise ConfigError("weight_tolerance must be >= 0")
        if self.swaps_per_edge < 1:
            raise ConfigError("swaps_per_edge must be >= 1")
        if self.max_attempts_factor < 1:
            raise ConfigError("max_attempts_factor must be >= 1")


class PartialRewireWarning(UserWarning):
    """Attempt budget ran out before the target swap count was reached."""

    def __init__(self, achieved: int, target: int):
        self.achieved = achieved
        self.target = target
        super().__init__(f"rewiring achieved {achieved} of {target} swaps before "
                         f"exhausting its attempt budget")


_SAMPLE_CHUNK = 4096
_RATE_WINDOW = 4096


def _swap_pass(
    src: np.ndarray,
    dst: np.ndarray,
    weights: np.ndarray,
    pairs: set[tuple[int, int]],
    cfg: RewireConfig,
    target: int,
    rng: np.random.Generator,
) -> int:
    """Run the swap walk in place; returns the number of successful swaps."""
    m = len(src)
    budget = cfg.max_attempts_factor * target
    tolerance = cfg.weight_tolerance
    swaps = attempts = 0
    window_n = window_ok = 0
    while swaps < target and attempts < budget:
        k = min(_SAMPLE_CHUNK, budget - attempts)
        first = rng.integers(0, m, size=k)
        second = rng.integers(0, m, size=k)
        w1 = weights[first]
        w2 = weights[second]
        similar = (first != second) & (
            np.abs(w1 - w2) <= tolerance * np.maximum(w1, w2)
        )
        attempts += k
        window_n += k
        window_ok += int(similar.sum())
        for idx in np.nonzero(similar)[0]:
            if swaps >= target:
                break
            e1 = int(first[idx])
            e2 = int(second[idx])
            a, b = int(src[e1]), int(dst[e1])
            c, d = int(src[e2]), int(dst[e2])
            if a == c or a == d or b == c or b == d:
                continue
            if (a, d) in pairs or (d, a) in pairs or (c, b) in pairs or (b, c) in pairs:
                continue
            pairs.remove((a, b))
            pairs.remove((c, d))
            pairs.add((a, d))
            pairs.add((c, b))
            dst[e1] = d
            dst[e2] = b
            swaps += 1
        if window_n >= _RATE_WINDOW:
            if window_ok < 0.01 * window_n:
                tolerance *= 2
            window_n = window_ok = 0
    return swaps


def rewire(net: DailyNetwork, cfg: RewireConfig) -> DailyNetwork:
    """Degree- and weight-preserving randomization by similar-weight swaps.

    Repeatedly picks two links of similar size and exchanges their borrower
    ends, rejecting any swap that would create an existing link, a self-loop,
    or the reciprocal of an existing link. Warns (without failing) when the
    attempt budget runs out first, e.g. on fully constrained networks.
    """
    edges = list(net.edges())
    m = len(edges)
    if m < 2:
        raise DataError("rewiring needs at least two edges")
    src = np.array([e[0] for e in edges], dtype=np.int64)
    dst = np.array([e[1] for e in edges], dtype=np.int64)
    weights = np.array([e[2] for e in edges], dtype=np.int64)
    pairs = {(e[0], e[1]) for e in edges}
    target = cfg.swaps_per_edge * m
    rng = np.random.default_rng(cfg.seed)
    swaps = _swap_pass(src, dst, weights, pairs, cfg, target, rng)
    if swaps < target:
        warnings.warn(PartialRewireWarning(swaps, target), stacklevel=2)
    out = DailyNetwork(
        net.date,
        [(int(src[i]), int(dst[i]), int(weights[i])) for i in range(m)],
        nodes=net.nodes,
    )
    _check_preserved(net, out, NullModelKind.REWIRED)
    return out


class _PairSampler:
    """Buffered uniform sampler of node indices (keeps RNG calls batched)."""

    def __init__(self, n: int, rng: np.random.Generator):
        self._n = n
        self._rng = rng
        self._buf = np.empty(0, dtype=np.int64)
        self._pos = 0

    def next_index(self) -> int:
        if self._pos >= len(self._buf):
            self._buf = self._rng.integers(0, self._n, size=256)
            self._pos = 0
        value = int(self._buf[self._pos])
        self._pos += 1
        return value


def randomize(net: DailyNetwork, seed: int) -> DailyNetwork:
    """Reassign the day's loan weights to uniformly random ordered pairs.

    Keeps the node set, edge count, and weight multiset; destroys topology.
    Pairs are drawn without replacement, rejecting self-loops and any pair
    whose unordered counterpart is already used (which covers reciprocals).
    """
    nodes = net.nodes
    n = len(nodes)
    if n < 2:
        raise DataError("randomization needs at least two nodes")
    rng = np.random.default_rng(seed)
    sampler = _PairSampler(n, rng)
    used: set[tuple[int, int]] = set()
    out_edges: list[tuple[int, int, int]] = []
    retry_cap = 50 * n * n
    for _, _, w in net.edges():
        placed = False
        for _ in range(retry_cap):
            i = sampler.next_index()
            j = sampler.next_index()
            if i == j:
                continue
            key = (i, j) if i < j else (j, i)
            if key in used:
                continue
            used.add(key)
            out_edges.append((nodes[i], nodes[j], w))
            placed = True
            break
        if not placed:
            # near-complete graph: enumerate the free slots instead
            free = [
                (i, j)
                for i in range(n)
                for j in range(i + 1, n)
                if (i, j) not in used
            ]
            i, j = free[int(rng.integers(0, len(free)))]
            if int(rng.integers(0, 2)):
                i, j = j, i
            used.add((i, j) if i < j else (j, i))
            out_edges.append((nodes[i], nodes[j], w))
    out = DailyNetwork(net.date, out_edges, nodes=nodes)
    _check_preserved(net, out, NullModelKind.RANDOM)
    return out


def fix_weights(net: DailyNetwork) -> DailyNetwork:
    """Same topology, every weight set to the day's mean loan size.

    Total lending is preserved exactly in integer euros: each edge gets the
    integer mean and the remainder is spread one euro at a time over the
    first edges in canonical order.
    """
    m = net.n_edges
    if m < 1:
        raise DataError("weight fixing needs at least one edge")
    mean, remainder = divmod(net.total_weight, m)
    out_edges = [
        (u, v, mean + 1 if i < remainder else mean)
        for i, (u, v, _) in enumerate(net.edges())
    ]
    out = DailyNetwork(net.date, out_edges, nodes=net.nodes)
    _check_preserved(net, out, NullModelKind.FIXED_WEIGHT)
    return out


def randomize_fixed(net: DailyNetwork, seed: int) -> DailyNetwork:
    """Uniform weights on uniformly random topology (compose the two models)."""
    out = randomize(fix_weights(net), seed)
    _check_preserved(net, out, NullModelKind.RANDOM_FIXED_WEIGHT)
    return out


def generate(
    net: DailyNetwork,
    kind: NullModelKind,
    seed: int,
    rewire_cfg: RewireConfig | None = None,
) -> DailyNetwork:
    """Dispatch to the generator for ``kind`` (EMPIRICAL returns the input)."""
    if kind is NullModelKind.EMPIRICAL:
        return net
    if kind is NullModelKind.REWIRED:
        cfg = rewire_cfg or RewireConfig()
        if cfg.seed != seed:
            cfg = dataclasses.replace(cfg, seed=seed)
        return rewire(net, cfg)
    if kind is NullModelKind.RANDOM:
        return randomize(net, seed)
    if kind is NullModelKind.FIXED_WEIGHT:
        return fix_weights(net)
    if kind is NullModelKind.RANDOM_FIXED_WEIGHT:
        return randomize_fixed(net, seed)
    raise ConfigError(f"unknown null model kind {kind!r}")


def _check_preserved(src: DailyNetwork, out: DailyNetwork, kind: NullModelKind) -> None:
    """Re-assert the per-kind preservation contract after generation."""
    if out.nodes != src.nodes:
        raise RuntimeError(f"{kind.value}: node set not preserved")
    if out.n_edges != src.n_edges:
        raise RuntimeError(f"{kind.value}: edge count not preserved")
    if kind is NullModelKind.REWIRED:
        for b in src.nodes:
            if (src.in_degree(b), src.out_degree(b)) != (out.in_degree(b), out.out_degree(b)):
                raise RuntimeError(f"{kind.value}: degree of bank {b} not preserved")
    if kind in (NullModelKind.REWIRED, NullModelKind.RANDOM):
        if sorted(w for _, _, w in src.edges()) != sorted(w for _, _, w in out.edges()):
            raise RuntimeError(f"{kind.value}: weight multiset not preserved")
    if kind is NullModelKind.FIXED_WEIGHT:
        if [(u, v) for u, v, _ in src.edges()] != [(u, v) for u, v, _ in out.edges()]:
            raise RuntimeError(f"{kind.value}: topology not preserved")
    if kind in (NullModelKind.FIXED_WEIGHT, NullModelKind.RANDOM_FIXED_WEIGHT):
        if src.total_weight != out.total_weight:
            raise RuntimeError(f"{kind.value}: total lending not preserved")


def activity_sheets(net: DailyNetwork, params: Params) -> dict[int, BalanceSheet]:
    """Sheets scaled off the network's own same-day activity (L + B per bank).

    Banks isolated by randomization carry no activity and get no sheet; they
    cannot lend, borrow, or default.
    """
    sheets: dict[int, BalanceSheet] = {}
    for bank in net.nodes:
        lending = net.out_strength(bank)
        borrowing = net.in_strength(bank)
        activity = lending + borrowing
        if activity == 0:
            continue
        sheets[bank] = make_balance_sheet(
            bank,
            lending / MICROS,
            borrowing / MICROS,
            activity / MICROS,
            params,
            clamp=True,
        )
    return sheets


def rebuild_sheets(
    net: DailyNetwork,
    params: Params,
    kind: NullModelKind,
    rolling_tv: Mapping[int, float] | None = None,
    *,
    clamp: bool = True,
) -> dict[int, BalanceSheet]:
    """Balance sheets consistent with a (possibly randomized) network.

    Empirical and rewired networks keep each bank's rolling trading volume,
    so bank sizes barely move under rewiring. The fully randomized kinds
    rescale every bank off the null network's own same-day activity, which
    randomizes (or, for fixed weights, degree-ties) bank size and capital.
    """
    if kind in (NullModelKind.EMPIRICAL, NullModelKind.REWIRED):
        if rolling_tv is None:
            raise DataError(f"{kind.value} sheets need the rolling volume per bank")
        return {
            bank: make_balance_sheet(
                bank,
                net.out_strength(bank) / MICROS,
                net.in_strength(bank) / MICROS,
                rolling_tv[bank],
                params,
                clamp=clamp,
            )
            for bank in net.nodes
        }
    return activity_sheets(net, params)
