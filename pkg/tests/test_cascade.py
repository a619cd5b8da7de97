import numpy as np
import pytest

from helpers import m, micronet, mnet, random_netted_edges
from oracles import oracle_cascade

from ibcascade.balance import Params
from ibcascade.cascade import (
    CascadeState,
    classify_cascade,
    distribute_residual,
    run_cascade,
    seed_default,
)
from ibcascade.errors import InvalidSeedError
from ibcascade.nullmodel import activity_sheets

BASELINE = Params(theta=0.2, gamma=0.05)
A, B, C, D, E = 1, 2, 3, 4, 5


def sheets_for(net, params=BASELINE):
    return activity_sheets(net, params)


class TestSeedDefault:
    def test_each_lender_takes_its_full_loan(self):
        net = mnet([(10, 99, 30), (11, 99, 70)])
        state = CascadeState(net, sheets_for(net))
        seed_default(state, 99)
        assert state.received_shock[10] == 30.0
        assert state.received_shock[11] == 70.0
        assert state.defaulted == {99: 0}

    def test_single_lender(self):
        net = mnet([(7, 8, 5)])
        state = seed_default(CascadeState(net, sheets_for(net)), 8)
        assert state.received_shock[7] == 5.0

    def test_pure_lender_is_invalid_seed(self):
        net = mnet([(A, B, 5)])
        with pytest.raises(InvalidSeedError):
            seed_default(CascadeState(net, sheets_for(net)), A)

    def test_inactive_bank_is_invalid_seed(self):
        net = mnet([(A, B, 5)])
        with pytest.raises(InvalidSeedError):
            seed_default(CascadeState(net, sheets_for(net)), 42)


class TestDistributeResidual:
    def state_with_shock(self, net, bank, shock):
        state = CascadeState(net, sheets_for(net))
        state.received_shock[bank] = float(shock)
        state.defaulted[bank] = 1
        return state

    def test_proportional_split_of_residual(self):
        # borrower i: capital 2, borrowing 20 from loans 15 and 5, shock 10
        net = mnet([(A, C, 15), (B, C, 5), (C, D, 20.0)])
        sheets = {C: _sheet_with_capital(C, net, 2.0)}
        state = CascadeState(net, sheets)
        state.received_shock[C] = 10.0
        state.defaulted[C] = 1
        payouts = distribute_residual(state, C)
        assert payouts == [(A, 6.0), (B, 2.0)]

    def test_full_loss_when_residual_exceeds_borrowing(self):
        net = mnet([(A, C, 15), (B, C, 5), (C, D, 20.0)])
        sheets = {C: _sheet_with_capital(C, net, 2.0)}
        state = CascadeState(net, sheets)
        state.received_shock[C] = 30.0
        state.defaulted[C] = 1
        assert distribute_residual(state, C) == [(A, 15.0), (B, 5.0)]

    def test_shock_equal_to_capital_passes_nothing(self):
        net = mnet([(A, C, 15), (B, C, 5), (C, D, 20.0)])
        sheets = {C: _sheet_with_capital(C, net, 2.0)}
        state = CascadeState(net, sheets)
        state.received_shock[C] = 2.0
        state.defaulted[C] = 1
        assert distribute_residual(state, C) == [(A, 0.0), (B, 0.0)]

    def test_no_borrowing_absorbs_everything(self):
        net = mnet([(C, D, 20.0)])
        sheets = {C: _sheet_with_capital(C, net, 2.0)}
        state = self.state_with_shock(net, C, 10.0)
        assert distribute_residual(state, C) == []


def _sheet_with_capital(bank, net, capital):
    from ibcascade.balance import BalanceSheet
    from ibcascade.network import MICROS

    lending = net.out_strength(bank) / MICROS
    borrowing = net.in_strength(bank) / MICROS
    total = capital / 0.05
    return BalanceSheet(bank, total, total - lending, lending, borrowing, capital, 0.0)


class TestRunCascade:
    def test_chain_propagates_with_recovery(self):
        # A lends 100 to B, B lends 100 to C; tiny capital everywhere
        net = mnet([(A, B, 100), (B, C, 100)])
        params = Params(theta=0.2, gamma=0.01)
        sheets = sheets_for(net, params)
        result = run_cascade(net, sheets, C, params)
        # B is shocked 100, defaults (capital 5), passes 100 - C_B capped at
        # its borrowing 100; A receives that residual and defaults too
        assert result.defaulted_banks == (A, B)
        assert result.defaulted_count == 2
        assert result.rounds == 2
        assert result.node_fraction == 1.0
        expected_loss = 100.0 + (100.0 - sheets[B].capital)
        assert result.lending_loss == pytest.approx(expected_loss)

    def test_capitalised_lenders_stop_the_cascade(self):
        net = mnet([(A, B, 1), (A, C, 200), (B, C, 1)])
        sheets = sheets_for(net)  # A's capital covers the loan to B
        result = run_cascade(net, sheets, B, BASELINE)
        assert result.defaulted_count == 0
        assert result.node_fraction == 0.0
        assert result.rounds == 0
        assert result.lending_loss == 1.0  # just the seed's unpaid borrowing

    def test_multiple_defaulters_accumulate_on_one_lender(self):
        # D lends small amounts to B and C; each alone is absorbable, the sum
        # is not once both default
        net = mnet([(D, B, 6), (D, C, 6), (A, B, 100), (A, C, 100), (B, E, 60), (C, E, 60)])
        params = Params(theta=0.2, gamma=0.05)
        sheets = sheets_for(net, params)
        assert sheets[D].capital == pytest.approx(1.5)
        result = run_cascade(net, sheets, E, params)
        assert B in result.defaulted_banks and C in result.defaulted_banks
        assert D in result.defaulted_banks

    def test_termination_bound(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            edges = random_netted_edges(rng, 8, p_edge=0.4)
            if not edges:
                continue
            net = micronet(edges)
            sheets = sheets_for(net, Params(theta=0.2, gamma=0.02))
            for seed in net.nodes:
                if net.in_degree(seed) == 0:
                    continue
                result = run_cascade(net, sheets, seed)
                assert result.rounds <= net.n_nodes

    def test_deposits_never_touched(self):
        net = mnet([(A, B, 100), (B, C, 100)])
        sheets = sheets_for(net, Params(theta=0.2, gamma=0.01))
        before = {b: s.deposits for b, s in sheets.items()}
        run_cascade(net, sheets, C)
        assert {b: s.deposits for b, s in sheets.items()} == before

    def test_result_independent_of_edge_insertion_order(self):
        edges = [(A, B, 10), (C, B, 4), (B, D, 9), (D, E, 3), (E, A, 2)]
        net1 = mnet(edges)
        net2 = mnet(list(reversed(edges)))
        params = Params(theta=0.2, gamma=0.02)
        r1 = run_cascade(net1, sheets_for(net1, params), B, params)
        r2 = run_cascade(net2, sheets_for(net2, params), B, params)
        assert r1 == r2

    def test_monotone_damage_in_gamma(self):
        rng = np.random.default_rng(23)
        for _ in range(120):
            edges = random_netted_edges(rng, 7, p_edge=0.45)
            if not edges:
                continue
            net = micronet(edges)
            for seed in net.nodes:
                if net.in_degree(seed) == 0:
                    continue
                low = run_cascade(net, sheets_for(net, Params(0.2, 0.02)), seed)
                high = run_cascade(net, sheets_for(net, Params(0.2, 0.05)), seed)
                assert set(high.defaulted_banks) <= set(low.defaulted_banks)
                assert high.lending_loss <= low.lending_loss + 1e-12

    def test_shock_bounds_per_lender_and_total(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            edges = random_netted_edges(rng, 7, p_edge=0.5)
            if not edges:
                continue
            net = micronet(edges)
            sheets = sheets_for(net, Params(theta=0.2, gamma=0.02))
            borrowers = [b for b in net.nodes if net.in_degree(b) >= 1]
            for seed in borrowers:
                state = CascadeState(net, sheets)
                seed_default(state, seed)
                while True:
                    newly = state._collect_insolvent()
                    if not newly:
                        break
                    state.round += 1
                    for b in newly:
                        state.defaulted[b] = state.round
                        state._dirty.add(b)
                    state._stabilise()
                for bank, outflow in state._outflow.items():
                    cap = state.borrowing_of(bank)
                    assert outflow <= cap + 1e-12
                    if bank != seed:
                        residual = state.received_shock.get(bank, 0.0) - sheets[bank].capital
                        assert outflow <= max(residual, 0.0) + 1e-12
                for lender in state.received_shock:
                    for borrower in net.borrowers_of(lender):
                        if borrower in state.defaulted:
                            loan = net.weight(lender, borrower) / 1_000_000
                            assert state._edge_loss(lender, borrower) <= loan + 1e-15


class TestOracleAgreement:
    def run_both(self, edges, seed, gamma):
        net = micronet(edges)
        params = Params(theta=0.2, gamma=gamma)
        engine = run_cascade(net, activity_sheets(net, params), seed, params)
        defaulted, rounds, loss, shock = oracle_cascade(edges, seed, gamma, 0.2)
        assert set(engine.defaulted_banks) | {seed} == set(defaulted)
        assert engine.rounds == rounds
        assert engine.lending_loss == loss
        assert engine.initial_shock == shock

    def test_on_random_small_instances(self):
        rng = np.random.default_rng(99)
        for _ in range(150):
            edges = random_netted_edges(rng, 6, p_edge=0.5)
            borrowers = sorted({v for _, v, _ in edges})
            for seed in borrowers:
                for gamma in (0.02, 0.05):
                    self.run_both(edges, seed, gamma)

    def test_cycle_passes_shock_through_defaulted_banks(self):
        # directed 3-cycle with a heavy external shock: every bank defaults
        # and the loop keeps passing residuals until the caps bind
        edges = [(A, B, m(10)), (B, C, m(10)), (C, A, m(10)), (A, D, m(50))]
        self.run_both(edges, D, 0.02)
        self.run_both(edges, D, 0.05)


class TestClassify:
    def result(self, node_fraction=0.0, loss_fraction=0.0):
        from ibcascade.cascade import CascadeResult

        return CascadeResult(1, 1.0, 0, node_fraction, 0.0, loss_fraction, 0, ())

    def test_strictly_above_threshold(self):
        assert classify_cascade(self.result(node_fraction=0.051), 0.05)

    def test_exactly_at_threshold_is_not_a_cascade(self):
        assert not classify_cascade(self.result(node_fraction=0.05), 0.05)

    def test_lending_measure(self):
        assert classify_cascade(self.result(loss_fraction=0.2), 0.05, by="lending")
        assert not classify_cascade(self.result(loss_fraction=0.01), 0.05, by="lending")

    def test_threshold_domain(self):
        with pytest.raises(ValueError):
            classify_cascade(self.result(), 0.0)
        with pytest.raises(ValueError):
            classify_cascade(self.result(), 1.0)
