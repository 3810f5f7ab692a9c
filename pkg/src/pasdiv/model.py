"""Instances, solutions and the PAS objective.

A solution stores, for every patient, a tuple of room ids (one per stay day).
Rows are never mutated in place, so offspring share the rows of patients they
did not touch. Each solution also carries per room-day occupancy and female
counts so operators can test capacity and gender penalties in O(LoS).
"""
from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

GENDERS = ("F", "M")
POLICIES = ("F", "M", "D", "N")

# O2 counting rules for D-policy rooms
GENDER_MINORITY = "minority"
GENDER_ROOM_DAY = "room_day"


class StructuralError(ValueError):
    """A solution does not fit the shape of its instance."""


class ConfigError(ValueError):
    """An invalid parameter was supplied."""


@dataclass(frozen=True)
class Room:
    id: int
    capacity: int
    gender_policy: str = "N"

    def __post_init__(self):
        if self.capacity < 1:
            raise ConfigError(f"room {self.id}: capacity must be >= 1")
        if self.gender_policy not in POLICIES:
            raise ConfigError(f"room {self.id}: unknown gender policy {self.gender_policy!r}")


@dataclass(frozen=True)
class Patient:
    id: int
    gender: str
    admission: int
    discharge: int

    def __post_init__(self):
        if self.gender not in GENDERS:
            raise ConfigError(f"patient {self.id}: unknown gender {self.gender!r}")
        if not 0 <= self.admission < self.discharge:
            raise ConfigError(f"patient {self.id}: bad stay [{self.admission}, {self.discharge})")

    @property
    def los(self) -> int:
        return self.discharge - self.admission


@dataclass
class Instance:
    """A PAS instance with the merged per patient-room cost matrix ``cv``.

    ``cv_per_day`` charges ``cv[p][r]`` for each day patient p spends in room
    r; when false it is charged once per contiguous stint in the room.
    ``gender_rule`` selects how mixed D-room days are penalised.
    """

    name: str
    horizon: int
    rooms: list[Room]
    patients: list[Patient]
    cv: list[list[int]]
    cg2: int = 0
    ct: int = 0
    seed_solution: Optional[list[list[int]]] = None
    seed_objective: Optional[int] = None
    cost_breakdown: Optional[dict] = None
    cv_per_day: bool = True
    gender_rule: str = GENDER_MINORITY

    def __post_init__(self):
        if self.gender_rule not in (GENDER_MINORITY, GENDER_ROOM_DAY):
            raise ConfigError(f"unknown gender rule {self.gender_rule!r}")
        self.refresh()

    def refresh(self) -> None:
        """Rebuild the flat lookup tables used by the hot loops."""
        self.capacity = [r.capacity for r in self.rooms]
        self.is_d_room = [r.gender_policy == "D" for r in self.rooms]
        self.admission = [p.admission for p in self.patients]
        self.discharge = [p.discharge for p in self.patients]
        self.is_female = [p.gender == "F" for p in self.patients]

    @property
    def num_patients(self) -> int:
        return len(self.patients)

    @property
    def num_rooms(self) -> int:
        return len(self.rooms)

    @property
    def total_presence(self) -> int:
        """Total patient-days W."""
        return sum(p.los for p in self.patients)

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        keys = ("name", "horizon", "rooms", "patients", "cv", "cg2", "ct",
                "cv_per_day", "gender_rule", "seed_solution", "seed_objective", "cost_breakdown")
        return all(getattr(self, k) == getattr(other, k) for k in keys)


class Objective(NamedTuple):
    total: int
    cv: int
    gender: int
    transfer: int


class Feasibility(NamedTuple):
    ok: bool
    violations: list  # (room, day, load, capacity)


def _gender_penalty(instance: Instance, nf: int, nm: int) -> int:
    if instance.gender_rule == GENDER_MINORITY:
        return instance.cg2 * (nf if nf < nm else nm)
    return instance.cg2 if nf and nm else 0


def _check_shape(instance: Instance, assignment: Sequence[Sequence[int]]) -> None:
    if len(assignment) != instance.num_patients:
        raise StructuralError(
            f"assignment has {len(assignment)} rows, instance has {instance.num_patients} patients")
    nr = instance.num_rooms
    for p, row in enumerate(assignment):
        pat = instance.patients[p]
        if len(row) != pat.los:
            raise StructuralError(f"patient {p}: {len(row)} stay days assigned, LoS is {pat.los}")
        for r in row:
            if not 0 <= r < nr:
                raise StructuralError(f"patient {p}: invalid room id {r}")


def occupancy(instance: Instance, assignment) -> tuple[list[list[int]], list[list[int]]]:
    """Per room-day total and female counts."""
    occ = [[0] * instance.horizon for _ in range(instance.num_rooms)]
    fem = [[0] * instance.horizon for _ in range(instance.num_rooms)]
    for p, row in enumerate(assignment):
        t = instance.admission[p]
        female = instance.is_female[p]
        for r in row:
            occ[r][t] += 1
            if female:
                fem[r][t] += 1
            t += 1
    return occ, fem


def check_feasibility(instance: Instance, solution) -> Feasibility:
    """Capacity check for every room-day. Shape errors raise StructuralError."""
    assignment = solution.assignment if isinstance(solution, Solution) else solution
    _check_shape(instance, assignment)
    occ, _ = occupancy(instance, assignment)
    violations = []
    for r, row in enumerate(occ):
        cap = instance.capacity[r]
        for t, load in enumerate(row):
            if load > cap:
                violations.append((r, t, load, cap))
    return Feasibility(not violations, violations)


def _stints(row) -> int:
    n = 0
    prev = None
    for r in row:
        if r != prev:
            n += 1
            prev = r
    return n


def evaluate_objective(instance: Instance, solution) -> Objective:
    """Full evaluation of O = O1 + O2 + O3 for an assignment."""
    assignment = solution.assignment if isinstance(solution, Solution) else solution
    _check_shape(instance, assignment)
    cv = instance.cv
    o1 = 0
    o3 = 0
    for p, row in enumerate(assignment):
        costs = cv[p]
        if instance.cv_per_day:
            o1 += sum(costs[r] for r in row)
        else:
            prev = None
            for r in row:
                if r != prev:
                    o1 += costs[r]
                prev = r
        o3 += _stints(row) - 1 if row else 0
    o3 *= instance.ct
    o2 = 0
    if instance.cg2 and any(instance.is_d_room):
        occ, fem = occupancy(instance, assignment)
        for r, is_d in enumerate(instance.is_d_room):
            if not is_d:
                continue
            for load, nf in zip(occ[r], fem[r]):
                if load:
                    o2 += _gender_penalty(instance, nf, load - nf)
    return Objective(o1 + o2 + o3, o1, o2, o3)


def quality_threshold(seed_objective: int, alpha: float) -> int:
    """c_max = floor((1 + alpha) * O*)."""
    if alpha < 0:
        raise ConfigError(f"alpha must be non-negative, got {alpha}")
    if seed_objective < 0:
        raise ConfigError(f"seed objective must be non-negative, got {seed_objective}")
    # exact decimal arithmetic: 1.16 * 100 is 115.99999999999999 in binary floats
    return math.floor((1 + Fraction(str(alpha))) * seed_objective)


@dataclass
class Solution:
    """An assignment plus its cached objective and room-day counters.

    Treat instances of this class as immutable; use :class:`Editor` to derive
    a modified copy.
    """

    assignment: list[tuple[int, ...]]
    objective: int
    occ: list[list[int]] = field(repr=False, compare=False)
    fem: list[list[int]] = field(repr=False, compare=False)

    @classmethod
    def from_assignment(cls, instance: Instance, assignment) -> "Solution":
        rows = [tuple(int(r) for r in row) for row in assignment]
        obj = evaluate_objective(instance, rows).total
        occ, fem = occupancy(instance, rows)
        return cls(rows, obj, occ, fem)

    def rooms_of(self, p: int) -> tuple[int, ...]:
        return self.assignment[p]

    def to_lists(self) -> list[list[int]]:
        return [list(row) for row in self.assignment]


def _join_delta(rule: str, own: int, other: int) -> int:
    """Change in penalised units when one more patient of gender ``own`` joins."""
    if rule == GENDER_MINORITY:
        return 1 if own < other else 0
    return 1 if own == 0 and other > 0 else 0


def _leave_delta(rule: str, own: int, other: int) -> int:
    """Change in penalised units when one patient of gender ``own`` leaves."""
    if rule == GENDER_MINORITY:
        return -1 if own <= other else 0
    return -1 if own == 1 and other > 0 else 0


class Editor:
    """Copy-on-write builder that keeps objective and counters in sync.

    Removing a patient subtracts its O1/O3 share and the change in O2 on the
    days it leaves; placing it adds them back for the new row.
    """

    def __init__(self, instance: Instance, parent: Solution):
        self.instance = instance
        self.assignment = list(parent.assignment)
        self.objective = parent.objective
        self.occ = [row[:] for row in parent.occ]
        self.fem = [row[:] for row in parent.fem]

    def _row_cost(self, p: int, row) -> int:
        inst = self.instance
        costs = inst.cv[p]
        o1 = 0
        if inst.cv_per_day:
            for r in row:
                o1 += costs[r]
        else:
            prev = None
            for r in row:
                if r != prev:
                    o1 += costs[r]
                prev = r
        return o1 + inst.ct * (_stints(row) - 1)

    def _move(self, p: int, row, sign: int) -> None:
        inst = self.instance
        t = inst.admission[p]
        female = inst.is_female[p]
        track_gender = inst.cg2 != 0
        rule = inst.gender_rule
        is_d = inst.is_d_room
        units = 0
        for r in row:
            occ_r = self.occ[r]
            fem_r = self.fem[r]
            if track_gender and is_d[r]:
                nf = fem_r[t]
                nm = occ_r[t] - nf
                own, other = (nf, nm) if female else (nm, nf)
                if sign > 0:
                    units += _join_delta(rule, own, other)
                else:
                    units += _leave_delta(rule, own, other)
            occ_r[t] += sign
            if female:
                fem_r[t] += sign
            t += 1
        self.objective += sign * self._row_cost(p, row) + inst.cg2 * units

    def remove(self, p: int) -> None:
        row = self.assignment[p]
        if row is None:
            return
        self._move(p, row, -1)
        self.assignment[p] = None

    def place(self, p: int, row: tuple[int, ...]) -> None:
        self._move(p, row, 1)
        self.assignment[p] = row

    def room_is_free(self, p: int, r: int) -> bool:
        """True if room r has a spare bed on every day of p's stay."""
        inst = self.instance
        return max(self.occ[r][inst.admission[p]:inst.discharge[p]]) < inst.capacity[r]

    def place_cost(self, p: int, r: int) -> int:
        """Marginal objective of placing p in room r for the whole stay."""
        inst = self.instance
        a, d = inst.admission[p], inst.discharge[p]
        cost = inst.cv[p][r] * (d - a) if inst.cv_per_day else inst.cv[p][r]
        if inst.cg2 and inst.is_d_room[r]:
            occ_r = self.occ[r]
            fem_r = self.fem[r]
            female = inst.is_female[p]
            rule = inst.gender_rule
            units = 0
            for t in range(a, d):
                nf = fem_r[t]
                nm = occ_r[t] - nf
                units += _join_delta(rule, nf, nm) if female else _join_delta(rule, nm, nf)
            cost += inst.cg2 * units
        return cost

    def over_capacity(self, rooms) -> bool:
        cap = self.instance.capacity
        for r in rooms:
            if max(self.occ[r]) > cap[r]:
                return True
        return False

    def build(self) -> Solution:
        if any(row is None for row in self.assignment):
            raise StructuralError("editor still has unplaced patients")
        return Solution(self.assignment, self.objective, self.occ, self.fem)
