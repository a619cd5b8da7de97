"""Default-cascade propagation with capital-absorbing partial recovery.

One seed bank is removed and repays none of its borrowing, so each of its net
lenders loses the full loan. Propagation then runs in synchronous rounds:
every bank whose cumulative loss has reached its capital defaults together,
and each defaulted bank passes the loss exceeding its capital on to its own
lenders, pro-rata to their exposures and capped at the loaned amounts. A bank
that is already in default absorbs nothing further: any additional loss it
receives (possible on directed cycles) flows straight through to its lenders
under the same caps. Deposits are never drawn down.

The whole shock field is a pure function of who has defaulted: each defaulted
bank's upstream outflow is ``min(max(shock - capital, 0), borrowing)`` (the
seed's is its full borrowing), each loan's loss is the borrower's outflow
share of that loan, and each bank's shock is the sum of losses on its loans,
accumulated in sorted borrower order. Within a round this field is
re-evaluated in repeated full passes (values frozen per pass) until nothing
changes; monotone, bounded float updates make that a finite process. The
canonical evaluation order exists so that results are reproducible and
independent of how callers happen to iterate nodes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .balance import BalanceSheet, Params
from .errors import InvalidSeedError
from .network import MICROS, DailyNetwork


@dataclass(frozen=True)
class CascadeResult:
    """Outcome of one seeded simulation.

    ``defaulted_count`` and ``defaulted_banks`` exclude the seed;
    ``node_fraction`` is relative to the other active banks of the day;
    ``lending_loss`` sums every lender's unrecovered amount over the whole
    cascade, including the seed's unpaid borrowing.
    """

    seed: int
    initial_shock: float
    defaulted_count: int
    node_fraction: float
    lending_loss: float
    loss_fraction: float
    rounds: int
    defaulted_banks: tuple[int, ...]


def _loan_loss(loan: float, outflow: float, total_borrowing: float) -> float:
    """Loss on one loan given the borrower's cumulative upstream outflow.

    The loan takes its pro-rata share of the outflow, never more than the
    loan itself; a borrower passing on its entire borrowing loses every loan
    in full.
    """
    if outflow == 0.0:
        return 0.0
    if outflow == total_borrowing:
        return loan
    loss = outflow * loan / total_borrowing
    return loss if loss < loan else loan


@dataclass
class CascadeState:
    """Mutable state of one running cascade; private to its run."""

    network: DailyNetwork
    sheets: Mapping[int, BalanceSheet]
    received_shock: dict[int, float] = field(default_factory=dict)
    defaulted: dict[int, int] = field(default_factory=dict)  # bank -> round index
    round: int = 0
    seed: int | None = None
    # cumulative amount each defaulted bank has passed upstream
    _outflow: dict[int, float] = field(default_factory=dict)
    # defaulted banks whose shock changed since their outflow was evaluated
    _dirty: set[int] = field(default_factory=set)
    _borrowing: dict[int, float] = field(default_factory=dict)

    def borrowing_of(self, bank: int) -> float:
        """Total borrowing of ``bank`` in EUR millions (cached)."""
        try:
            return self._borrowing[bank]
        except KeyError:
            value = self.network.in_strength(bank) / MICROS
            self._borrowing[bank] = value
            return value

    # -- shock-field evaluation (canonical arithmetic) ----------------------

    def _target_outflow(self, bank: int) -> float:
        """Cumulative amount ``bank`` should have passed to its lenders."""
        total_borrowing = self.borrowing_of(bank)
        if bank == self.seed:
            return total_borrowing  # the seed repays nothing
        residual = self.received_shock.get(bank, 0.0) - self.sheets[bank].capital
        if residual <= 0.0:
            return 0.0
        if residual >= total_borrowing:
            return total_borrowing
        return residual

    def _edge_loss(self, lender: int, borrower: int) -> float:
        """Unrecovered part of the loan lender->borrower, given current outflow."""
        outflow = self._outflow.get(borrower, 0.0)
        loan = self.network.weight(lender, borrower) / MICROS
        return _loan_loss(loan, outflow, self.borrowing_of(borrower))

    def _resum_shock(self, bank: int) -> float:
        total = 0.0
        borrowers = self.network.borrowers_of(bank)
        for counterpart in sorted(borrowers):
            if counterpart in self.defaulted:
                total += self._edge_loss(bank, counterpart)
        return total

    def _stabilise(self) -> None:
        """Re-evaluate the shock field until a full pass changes nothing."""
        while self._dirty:
            changed: list[int] = []
            for bank in sorted(self._dirty):
                target = self._target_outflow(bank)
                if target != self._outflow.get(bank, 0.0):
                    self._outflow[bank] = target
                    changed.append(bank)
            self._dirty.clear()
            touched: set[int] = set()
            for bank in changed:
                touched.update(self.network.lenders_of(bank))
            for lender in sorted(touched):
                shock = self._resum_shock(lender)
                if shock != self.received_shock.get(lender, 0.0):
                    self.received_shock[lender] = shock
                    if lender in self.defaulted:
                        self._dirty.add(lender)

    def _collect_insolvent(self) -> list[int]:
        return [
            bank
            for bank in sorted(self.received_shock)
            if bank not in self.defaulted
            and self.received_shock[bank] >= self.sheets[bank].capital
        ]


def seed_default(state: CascadeState, seed: int) -> CascadeState:
    """Mark ``seed`` defaulted at round 0 and shock each of its lenders fully.

    The seed must be an active net borrower; a bank that only lends cannot
    start a cascade.
    """
    if seed not in state.network:
        raise InvalidSeedError(f"bank {seed} is not active in this network")
    if state.network.in_degree(seed) == 0:
        raise InvalidSeedError(f"bank {seed} is not a net borrower")
    if state.defaulted:
        raise InvalidSeedError("cascade already seeded")
    state.seed = seed
    state.defaulted[seed] = 0
    state._dirty.add(seed)
    state._stabilise()
    return state


def distribute_residual(state: CascadeState, bank: int) -> list[tuple[int, float]]:
    """Per-lender shocks that ``bank`` passes upstream, beyond those already sent.

    For a bank that just defaulted this is the full payout rule: everything
    above its capital, pro-rata to its lenders' loans, or the full loans when
    the residual exceeds its borrowing. A bank with no borrowing absorbs the
    shock entirely and the list is empty.
    """
    if bank not in state.defaulted:
        raise InvalidSeedError(f"bank {bank} has not defaulted")
    total_borrowing = state.borrowing_of(bank)
    if total_borrowing == 0.0:
        return []
    previous = state._outflow.get(bank, 0.0)
    target = state._target_outflow(bank)
    payouts = []
    for lender, loan_micros in sorted(state.network.lenders_of(bank).items()):
        loan = loan_micros / MICROS
        sent = _loan_loss(loan, previous, total_borrowing)
        due = _loan_loss(loan, target, total_borrowing)
        payouts.append((lender, due - sent))
    return payouts


def run_cascade(
    network: DailyNetwork,
    sheets: Mapping[int, BalanceSheet],
    seed: int,
    params: Params | None = None,
) -> CascadeResult:
    """Run one full cascade from ``seed`` to its fixed point.

    ``sheets`` must describe every bank carrying an edge and be consistent
    with the network; ``params`` only documents how they were built.
    """
    del params  # sheets already embody the ratios; kept for call-site clarity
    state = CascadeState(network, sheets)
    seed_default(state, seed)
    while True:
        newly = state._collect_insolvent()
        if not newly:
            break
        state.round += 1
        for bank in newly:
            state.defaulted[bank] = state.round
            state._dirty.add(bank)
        state._stabilise()

    knocked_on = tuple(b for b in sorted(state.defaulted) if b != seed)
    lending_loss = 0.0
    for bank in sorted(state.defaulted):
        lending_loss += state._outflow.get(bank, 0.0)
    n = network.n_nodes
    total_lending = network.total_weight / MICROS
    return CascadeResult(
        seed=seed,
        initial_shock=state.borrowing_of(seed),
        defaulted_count=len(knocked_on),
        node_fraction=len(knocked_on) / (n - 1) if n > 1 else 0.0,
        lending_loss=lending_loss,
        loss_fraction=lending_loss / total_lending if total_lending > 0.0 else 0.0,
        rounds=state.round,
        defaulted_banks=knocked_on,
    )


def classify_cascade(result: CascadeResult, threshold: float, by: str = "nodes") -> bool:
    """Whether the cascade exceeds ``threshold`` strictly, by the chosen measure."""
    if not (0.0 < threshold < 1.0):
        raise ValueError(f"threshold must lie in (0, 1), got {threshold}")
    if by == "nodes":
        return result.node_fraction > threshold
    if by == "lending":
        return result.loss_fraction > threshold
    raise ValueError(f"unknown cascade measure {by!r}")
