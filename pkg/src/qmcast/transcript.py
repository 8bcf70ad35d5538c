"""Run bookkeeping: edge usage, measurement outcomes, ebit accounting."""

from __future__ import annotations

import math

from .errors import InsufficientEbits


class EbitLedger:
    """Per party-pair entanglement balance.

    Credits are granted at setup (the protocol's declared budget); debits
    happen when a resource is consumed (teleportation, shared-state
    distribution).  Debiting past the budget raises InsufficientEbits.
    """

    def __init__(self, budget: float | None = None):
        self.budget = budget
        self.entries: list[tuple[tuple[str, str], float, str]] = []

    @staticmethod
    def _pair(a: str, b: str) -> tuple[str, str]:
        return (a, b) if a <= b else (b, a)

    def debit(self, party_a: str, party_b: str, amount: float, note: str = "") -> None:
        if amount < 0:
            raise ValueError("debit amount must be nonnegative")
        if self.budget is not None and self.total + amount > self.budget + 1e-9:
            raise InsufficientEbits(
                f"debit of {amount} ebits ({note}) exceeds budget {self.budget}")
        self.entries.append((self._pair(party_a, party_b), float(amount), note))

    @property
    def total(self) -> float:
        return sum(amount for _, amount, _ in self.entries)

    def per_pair(self) -> dict:
        out: dict[tuple[str, str], float] = {}
        for pair, amount, _ in self.entries:
            out[pair] = out.get(pair, 0.0) + amount
        return out

    def raw_pair_count(self) -> int:
        return len(self.entries)

    def clone(self) -> "EbitLedger":
        c = EbitLedger(self.budget)
        c.entries = list(self.entries)
        return c


def entanglement_entropy(weights) -> float:
    """Entropy (bits) of a Schmidt-probability list; charges a non-maximal
    entangled pure resource at its actual ebit content."""
    h = 0.0
    for w in weights:
        if w > 1e-300:
            h -= w * math.log2(w)
    return h


class RunTranscript:
    """Outcome and resource record of one protocol session."""

    def __init__(self, ebit_budget: float | None = None):
        self.edge_uses: dict[int, int] = {}
        self.fourier_outcomes: dict[str, int] = {}
        self.ebit_ledger = EbitLedger(ebit_budget)
        self.branch_log: list = []

    def use_edge(self, e: int) -> None:
        self.edge_uses[e] = self.edge_uses.get(e, 0) + 1

    def record_outcome(self, register: str, outcome) -> None:
        self.fourier_outcomes[register] = outcome

    def clone(self) -> "RunTranscript":
        c = RunTranscript()
        c.edge_uses = dict(self.edge_uses)
        c.fourier_outcomes = dict(self.fourier_outcomes)
        c.ebit_ledger = self.ebit_ledger.clone()
        c.branch_log = list(self.branch_log)
        return c
