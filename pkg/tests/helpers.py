"""Shared construction helpers for the test suite."""

from __future__ import annotations

import datetime as dt

import numpy as np

from ibcascade.network import MICROS, DailyNetwork

A_DAY = dt.date(2011, 1, 3)


def m(value) -> int:
    """EUR millions -> internal integer euros."""
    return int(round(value * MICROS))


def mnet(edges, nodes=()) -> DailyNetwork:
    """Build a network from (lender, borrower, weight-in-millions) triples."""
    return DailyNetwork(A_DAY, [(u, v, m(w)) for u, v, w in edges], nodes=nodes)


def micronet(edges, nodes=()) -> DailyNetwork:
    """Build a network from integer-euro edges (e.g. random_netted_edges)."""
    return DailyNetwork(A_DAY, edges, nodes=nodes)


def gross(edges):
    """Gross rows in millions -> integer-euro rows for net_edges."""
    return [(u, v, m(w)) for u, v, w in edges]


def random_netted_edges(
    rng: np.random.Generator,
    n_nodes: int,
    weights_millions=(1, 2, 4),
    p_edge: float = 0.35,
) -> list[tuple[int, int, int]]:
    """Random member of the netted-digraph class on nodes 0..n-1.

    Every unordered pair independently carries no edge or one edge in a
    random direction with a random weight, so no reciprocal pairs exist.
    """
    edges = []
    for u in range(n_nodes):
        for v in range(u + 1, n_nodes):
            if rng.random() >= p_edge:
                continue
            w = m(weights_millions[int(rng.integers(len(weights_millions)))])
            if int(rng.integers(2)):
                edges.append((u, v, w))
            else:
                edges.append((v, u, w))
    return edges


def netted_code_count(n_nodes: int, weights_millions=(1, 2, 4)) -> int:
    """Size of the netted-digraph family on labelled nodes: every unordered
    pair takes one of 1 + 2 * len(weights) states."""
    pairs = n_nodes * (n_nodes - 1) // 2
    return (1 + 2 * len(weights_millions)) ** pairs


def netted_edges_from_code(n_nodes: int, code: int, weights_millions=(1, 2, 4)):
    """Decode one member of the netted-digraph family (mixed-radix code)."""
    states_per_pair = 1 + 2 * len(weights_millions)
    edges = []
    rest = code
    for u in range(n_nodes):
        for v in range(u + 1, n_nodes):
            state = rest % states_per_pair
            rest //= states_per_pair
            if state == 0:
                continue
            direction, w_idx = divmod(state - 1, len(weights_millions))
            w = m(weights_millions[w_idx])
            edges.append((u, v, w) if direction == 0 else (v, u, w))
    return edges
