"""Population entropy over patient-room-day assignment counts."""
from __future__ import annotations

import math
from typing import Iterable, Sequence


class StateCorruptionError(RuntimeError):
    """Entropy counters disagree with the population they describe."""


def h(x: int, mu: int, log_base: float = 2.0) -> float:
    """Entropy contribution -(x/mu) log(x/mu) of one count; zero for x = 0."""
    if x > mu or x < 0:
        raise StateCorruptionError(f"count {x} outside [0, {mu}]")
    if x == 0 or x == mu:
        return 0.0
    q = x / mu
    return -q * math.log(q) / math.log(log_base)


def max_entropy(W: int, num_rooms: int, mu: int, log_base: float = 2.0) -> float:
    """Upper bound on H when every patient-day spreads mu solutions evenly over rooms."""
    q, rem = divmod(mu, num_rooms)
    per_day = (num_rooms - rem) * h(q, mu, log_base)
    if rem:
        per_day += rem * h(q + 1, mu, log_base)
    return W * per_day


class EntropyState:
    """Counts n_prt for a population plus the cached entropy.

    ``counts[p][i]`` maps room -> number of solutions that put patient p in
    that room on the i-th day of her stay. Keys with a zero count are dropped.
    """

    def __init__(self, num_patients: int, mu: int, log_base: float = 2.0):
        if mu < 1:
            raise ValueError("mu must be >= 1")
        if log_base <= 1:
            raise ValueError("log_base must be > 1")
        self.mu = mu
        self.log_base = log_base
        self.table = [h(x, mu, log_base) for x in range(mu + 1)]
        self.counts: list[list[dict[int, int]]] = [[] for _ in range(num_patients)]
        self.cached_H = 0.0

    @classmethod
    def from_solutions(cls, solutions: Sequence, log_base: float = 2.0) -> "EntropyState":
        rows0 = solutions[0].assignment
        state = cls(len(rows0), len(solutions), log_base)
        for p in range(len(rows0)):
            days: list[dict[int, int]] = [dict() for _ in rows0[p]]
            for s in solutions:
                for i, r in enumerate(s.assignment[p]):
                    days[i][r] = days[i].get(r, 0) + 1
            state.counts[p] = days
        state.cached_H = state.entropy()
        return state

    def entropy(self) -> float:
        """Recompute H from the counts, independent of ``cached_H``."""
        table = self.table
        return math.fsum(table[c] for days in self.counts for d in days for c in d.values())

    def frequency(self, p: int, row: Iterable[int]) -> int:
        """Sum over p's stay of the count of the room ``row`` uses that day."""
        total = 0
        for d, r in zip(self.counts[p], row):
            total += d.get(r, 0)
        return total

    def _diffs(self, parent, offspring):
        pa, oa = parent.assignment, offspring.assignment
        for p in range(len(pa)):
            a, b = pa[p], oa[p]
            if a is b or a == b:
                continue
            days = self.counts[p]
            for i in range(len(a)):
                if a[i] != b[i]:
                    yield days[i], a[i], b[i]

    def replace_delta(self, parent, offspring) -> float:
        """Entropy of the population with ``parent`` swapped for ``offspring``.

        Only patient-days where the two differ are visited; the state is not
        modified.
        """
        table = self.table
        mu = self.mu
        delta = 0.0
        for d, old, new in self._diffs(parent, offspring):
            c0 = d.get(old, 0)
            if c0 == 0:
                raise StateCorruptionError(f"parent room {old} has zero count")
            c1 = d.get(new, 0)
            if c1 >= mu:
                raise StateCorruptionError(f"room {new} count would exceed mu")
            delta += table[c0 - 1] - table[c0] + table[c1 + 1] - table[c1]
        return self.cached_H + delta

    def commit(self, parent, offspring, new_H: float | None = None) -> None:
        """Apply the parent -> offspring swap to counts and cached entropy."""
        if new_H is None:
            new_H = self.replace_delta(parent, offspring)
        for d, old, new in list(self._diffs(parent, offspring)):
            c0 = d[old]
            if c0 == 1:
                del d[old]
            else:
                d[old] = c0 - 1
            d[new] = d.get(new, 0) + 1
        self.cached_H = new_H

    def check(self, solutions: Sequence) -> None:
        """Raise if counts differ from a recount of ``solutions``."""
        fresh = EntropyState.from_solutions(solutions, self.log_base)
        if fresh.counts != self.counts:
            raise StateCorruptionError("entropy counters differ from population recount")
