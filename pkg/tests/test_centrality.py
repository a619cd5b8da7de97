import numpy as np
import pytest

from helpers import micronet, mnet, random_netted_edges
from oracles import oracle_closeness, oracle_core_numbers

from ibcascade.cascade import CascadeResult
from ibcascade.centrality import (
    CentralityProfile,
    bin_cascades,
    centrality_profiles,
    closeness,
    closeness_all,
    core_number,
    core_numbers,
)
from ibcascade.errors import DataError

A, B, C, D, E, F = 1, 2, 3, 4, 5, 6


class TestCloseness:
    def test_star_center_is_one(self):
        net = mnet([(9, leaf, 1) for leaf in range(5)])
        assert closeness(net, 9) == 1.0

    def test_path_endpoint(self):
        net = mnet([(A, B, 1), (B, C, 1)])
        assert closeness(net, A) == pytest.approx(2 / 3)
        assert closeness(net, B) == 1.0

    def test_isolated_node_scores_zero(self):
        net = mnet([(A, B, 1)], nodes=[C])
        assert closeness(net, C) == 0.0

    def test_component_scaling_discounts_small_components(self):
        # two disjoint dyads: within-component distance is 1, but each
        # component holds 2 of 4 nodes
        net = mnet([(A, B, 1), (C, D, 1)])
        assert closeness(net, A) == pytest.approx(1 / 3)

    def test_inactive_bank_raises(self):
        with pytest.raises(DataError):
            closeness(mnet([(A, B, 1)]), 42)

    def test_matches_bfs_oracle_on_random_networks(self):
        rng = np.random.default_rng(3)
        for _ in range(40):
            edges = random_netted_edges(rng, 15, p_edge=0.12)
            net = micronet(edges, nodes=range(15))
            expected = oracle_closeness([(u, v) for u, v, _ in edges], list(range(15)))
            assert closeness_all(net) == expected  # exact float agreement

    def test_invariant_under_relabeling(self):
        edges = [(A, B, 1), (B, C, 2), (C, D, 1), (A, D, 3)]
        shift = 100
        relabeled = [(u + shift, v + shift, w) for u, v, w in edges]
        orig = closeness_all(mnet(edges))
        new = closeness_all(mnet(relabeled))
        assert {b + shift: c for b, c in orig.items()} == new


class TestCoreNumber:
    def test_triangle_is_two_core(self):
        net = mnet([(A, B, 1), (B, C, 1), (C, A, 1)])
        assert core_numbers(net) == {A: 2, B: 2, C: 2}

    def test_pendant_peels_at_one(self):
        net = mnet([(A, B, 1), (B, C, 1), (C, A, 1), (C, D, 1)])
        assert core_number(net, D) == 1
        assert core_number(net, C) == 2

    def test_isolated_node_is_zero_core(self):
        net = mnet([(A, B, 1)], nodes=[C])
        assert core_number(net, C) == 0

    def test_matches_pruning_oracle_on_random_networks(self):
        rng = np.random.default_rng(17)
        for _ in range(40):
            edges = random_netted_edges(rng, 20, p_edge=0.15)
            net = micronet(edges, nodes=range(20))
            expected = oracle_core_numbers([(u, v) for u, v, _ in edges], list(range(20)))
            assert core_numbers(net) == expected

    def test_removing_a_node_never_raises_others(self):
        rng = np.random.default_rng(29)
        edges = random_netted_edges(rng, 12, p_edge=0.3)
        net = micronet(edges, nodes=range(12))
        full = core_numbers(net)
        victim = 5
        remaining = [(u, v, w) for u, v, w in edges if victim not in (u, v)]
        sub = micronet(remaining, nodes=[b for b in range(12) if b != victim])
        for bank, core in core_numbers(sub).items():
            assert core <= full[bank]


class TestProfiles:
    def test_profile_fields(self):
        net = mnet([(A, B, 5), (B, C, 1), (C, A, 1)])
        profile = centrality_profiles(net)[B]
        assert profile.in_degree == 1
        assert profile.out_degree == 1
        assert profile.core_number == 2
        assert profile.closeness == 1.0


def prof(in_deg=1, out_deg=1, close=0.5, core=1, bank=1):
    return CentralityProfile(bank, in_deg, out_deg, close, core)


def res(node_fraction, shock=10.0):
    return CascadeResult(1, shock, 0, node_fraction, 0.0, 0.0, 0, ())


class TestBinCascades:
    def test_identical_values_have_zero_se(self):
        stat = bin_cascades([(prof(), res(0.25))] * 5, ("in_degree",))
        [(key, cell)] = stat.cells()
        assert key == (1,)
        assert cell.count == 5
        assert cell.mean == 0.25
        assert cell.se == 0.0

    def test_two_values_average(self):
        stat = bin_cascades([(prof(), res(0.2)), (prof(), res(0.4))], ("in_degree",))
        [(_, cell)] = stat.cells()
        assert cell.mean == pytest.approx(0.3)

    def test_default_indicators_as_probabilities(self):
        samples = [(prof(), True), (prof(), False), (prof(), False), (prof(), True)]
        stat = bin_cascades(samples, ("core_number",))
        [(key, cell)] = stat.cells()
        assert key == (1,)
        assert cell.mean == 0.5

    def test_counts_partition_sample_size(self):
        samples = [
            (prof(in_deg=1), res(0.1)),
            (prof(in_deg=2), res(0.2)),
            (prof(in_deg=2), res(0.3)),
        ]
        stat = bin_cascades(samples, ("in_degree",))
        assert stat.sample_size == 3
        assert [cell.count for _, cell in stat.cells()] == [1, 2]

    def test_two_dimensional_keys(self):
        samples = [(prof(in_deg=2, out_deg=3), res(0.1, shock=99.0))]
        stat = bin_cascades(samples, ("in_degree", "shock"))
        [(key, _)] = stat.cells()
        assert key[0] == 2
        assert key[1] == pytest.approx(1.75)  # log10(99) in quarter decades

    def test_closeness_binning(self):
        samples = [(prof(close=0.267), True)]
        stat = bin_cascades(samples, ("closeness",))
        [(key, _)] = stat.cells()
        assert key == (0.26,)

    def test_means_invariant_to_input_ordering(self):
        rng = np.random.default_rng(4)
        samples = [
            (prof(in_deg=int(rng.integers(1, 4))), res(float(rng.random())))
            for _ in range(200)
        ]
        shuffled = list(samples)
        rng.shuffle(shuffled)
        s1 = bin_cascades(samples, ("in_degree",))
        s2 = bin_cascades(shuffled, ("in_degree",))
        for (k1, c1), (k2, c2) in zip(s1.cells(), s2.cells()):
            assert k1 == k2
            assert c1.count == c2.count
            assert c1.mean == pytest.approx(c2.mean, rel=1e-12)

    def test_lending_measure(self):
        sample = CascadeResult(1, 10.0, 0, 0.5, 0.0, 0.125, 0, ())
        stat = bin_cascades([(prof(), sample)], ("in_degree",), measure="lending")
        [(_, cell)] = stat.cells()
        assert cell.mean == 0.125

    def test_empty_input_is_error(self):
        with pytest.raises(DataError):
            bin_cascades([], ("in_degree",))

    def test_merge_accumulates(self):
        s1 = bin_cascades([(prof(), res(0.2))], ("in_degree",))
        s2 = bin_cascades([(prof(), res(0.4))], ("in_degree",))
        s1.merge(s2)
        [(_, cell)] = s1.cells()
        assert cell.count == 2
        assert cell.mean == pytest.approx(0.3)
