"""Mutation operators: standard swap and the change-mutation family.

All operators take an explicit ``random.Random`` and return either a new
:class:`~pasdiv.model.Solution` or ``None`` when the move is rejected.
"""
from __future__ import annotations

import heapq
import logging
import math
import random
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

from .diversity import EntropyState
from .model import ConfigError, Editor, Instance, Solution

log = logging.getLogger(__name__)

VARIANTS = ("swap", "fixed", "adaptive", "biased")


@dataclass
class OperatorConfig:
    """Hyper-parameters for one operator variant.

    ``x`` is kept as a float so that the failure decay F**(-1/k) accumulates
    between intervals; it is rounded to the nearest integer when used.
    """

    variant: str = "adaptive"
    gamma: float = 50.0
    x: float = 15.0
    x_min: float = 2.0
    x_max: float = 15.0
    F: float = 2.0
    k: float = 8.0
    u: int = 200
    y: int = 10

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.variant not in VARIANTS:
            raise ConfigError(f"unknown variant {self.variant!r}; expected one of {VARIANTS}")
        if self.gamma < 0:
            raise ConfigError("gamma must be non-negative")
        if self.adaptive:
            if not self.x_min <= self.x <= self.x_max:
                raise ConfigError(f"x={self.x} outside [{self.x_min}, {self.x_max}]")
            if self.F <= 1:
                raise ConfigError("F must be > 1")
            if self.k <= 0:
                raise ConfigError("k must be > 0")
        if self.u < 1:
            raise ConfigError("u must be >= 1")
        if self.y < 1:
            raise ConfigError("y must be >= 1")

    @property
    def adaptive(self) -> bool:
        return self.variant in ("adaptive", "biased")

    @classmethod
    def for_variant(cls, variant: str, **overrides) -> "OperatorConfig":
        """Tuned elite configuration for ``variant``, with optional overrides."""
        base = dict(ELITE_CONFIGS[variant])
        base.update({k: v for k, v in overrides.items() if v is not None})
        if variant in ("adaptive", "biased") and "x" not in base:
            # adaptive runs start at the top of the step-size range
            base["x"] = base["x_max"]
        return cls(variant=variant, **base)

    def to_dict(self) -> dict:
        return asdict(self)


# Elite configurations from the tuning campaign; F fixed to 2.
ELITE_CONFIGS = {
    "swap": {},
    "fixed": {"gamma": 50.0, "x": 14.0, "x_max": 14.0},
    "adaptive": {"gamma": 50.0, "x_max": 15.0, "k": 8.0, "u": 200},
    "biased": {"gamma": 47.0, "x_max": 14.0, "k": 1.0, "u": 200},
}


def candidate_rooms(instance: Instance, y: int) -> list[list[int]]:
    """The y cheapest rooms by CV for every patient, ties broken by room id."""
    n = min(y, instance.num_rooms)
    out = []
    for costs in instance.cv:
        order = sorted(range(instance.num_rooms), key=lambda r: (costs[r], r))
        out.append(order[:n])
    return out


def _stay_room(row: Sequence[int], start: int, t: int) -> int:
    i = t - start
    if i < 0:
        i = 0
    elif i >= len(row):
        i = len(row) - 1
    return row[i]


def standard_swap(instance: Instance, solution: Solution, rng: random.Random) -> Optional[Solution]:
    """Exchange the rooms of two random patients over their stays.

    On days both are present they swap day by day. On days only one is
    present it takes the other's room from the nearest day of the other's
    stay. Returns ``None`` if the result breaks a room capacity.
    """
    P = instance.num_patients
    if P < 2:
        return None
    p, q = rng.sample(range(P), 2)
    ap, aq = instance.admission[p], instance.admission[q]
    rp, rq = solution.assignment[p], solution.assignment[q]
    new_p = tuple(_stay_room(rq, aq, t) for t in range(ap, ap + len(rp)))
    new_q = tuple(_stay_room(rp, ap, t) for t in range(aq, aq + len(rq)))
    ed = Editor(instance, solution)
    ed.remove(p)
    ed.remove(q)
    ed.place(p, new_p)
    ed.place(q, new_q)
    if ed.over_capacity(set(new_p) | set(new_q)):
        return None
    return ed.build()


def select_patients_uniform(num_patients: int, x: int, rng: random.Random) -> list[int]:
    if x > num_patients:
        log.debug("clamping x=%d to %d patients", x, num_patients)
        x = num_patients
    return rng.sample(range(num_patients), x)


def select_patients_biased(solution: Solution, counts: EntropyState, x: int,
                           rng: random.Random) -> list[int]:
    """Draw x patients without replacement, weighted by how common their rows are.

    A patient's weight is the sum over her stay of n_prt for the room the
    parent uses that day. Successive weighted draws are realised with
    exponential keys u**(1/w).
    """
    P = len(solution.assignment)
    if x > P:
        log.debug("clamping x=%d to %d patients", x, P)
        x = P
    weights = [counts.frequency(p, row) for p, row in enumerate(solution.assignment)]
    if not any(weights):
        return select_patients_uniform(P, x, rng)
    keys = []
    for p, w in enumerate(weights):
        u = rng.random()
        # zero-weight patients rank below every positive-weight one
        keys.append((u ** (1.0 / w) if w > 0 else -1.0 - u, p))
    return [p for _, p in heapq.nlargest(x, keys)]


def room_weights(costs: Sequence[float], gamma: float) -> list[float]:
    """Selection weights (1 + c - c_min) ** -gamma; cheaper rooms weigh more."""
    cmin = min(costs)
    return [(1.0 + c - cmin) ** -gamma for c in costs]


def reinsert(editor: Editor, p: int, candidates: Sequence[int], gamma: float,
             rng: random.Random) -> Optional[int]:
    """Place unassigned patient p in one eligible candidate room for her whole stay.

    Returns the room, or ``None`` if no candidate has a free bed on every day.
    """
    inst = editor.instance
    a, d = inst.admission[p], inst.discharge[p]
    occ, cap = editor.occ, inst.capacity
    eligible = [r for r in candidates if max(occ[r][a:d]) < cap[r]]
    if not eligible:
        return None
    if len(eligible) == 1:
        r = eligible[0]
    else:
        costs = [editor.place_cost(p, r) for r in eligible]
        r = rng.choices(eligible, weights=room_weights(costs, gamma))[0]
    editor.place(p, (r,) * (d - a))
    return r


def step_size(config: OperatorConfig, num_patients: int) -> int:
    n = int(math.floor(config.x + 0.5))
    return max(0, min(n, num_patients))


def change_mutation(instance: Instance, solution: Solution, config: OperatorConfig,
                    counts: Optional[EntropyState], rng: random.Random,
                    candidates: Sequence[Sequence[int]]) -> Optional[Solution]:
    """Remove round(x) patients and reinsert each one room at a time.

    Returns ``None`` if some patient cannot be reinserted.
    """
    if config.variant == "swap":
        raise ConfigError("change_mutation needs a change variant")
    n = step_size(config, instance.num_patients)
    if n == 0:
        return solution
    if config.variant == "biased":
        chosen = select_patients_biased(solution, counts, n, rng)
    else:
        chosen = select_patients_uniform(instance.num_patients, n, rng)
    ed = Editor(instance, solution)
    for p in chosen:
        ed.remove(p)
    for p in chosen:
        if reinsert(ed, p, candidates[p], config.gamma, rng) is None:
            return None
    return ed.build()


def adapt_x(config: OperatorConfig, interval_succeeded: bool) -> float:
    """Grow x by F after a successful interval, shrink by F**(-1/k) otherwise."""
    if interval_succeeded:
        return min(config.x * config.F, config.x_max)
    return max(config.x * config.F ** (-1.0 / config.k), config.x_min)


class Mutator:
    """Binds an instance and config to a single ``mutate(solution, counts, rng)`` call."""

    def __init__(self, instance: Instance, config: OperatorConfig):
        self.instance = instance
        self.config = config
        self.candidates = candidate_rooms(instance, config.y)

    def __call__(self, solution: Solution, counts: Optional[EntropyState],
                 rng: random.Random) -> Optional[Solution]:
        if self.config.variant == "swap":
            return standard_swap(self.instance, solution, rng)
        return change_mutation(self.instance, solution, self.config, counts, rng, self.candidates)
