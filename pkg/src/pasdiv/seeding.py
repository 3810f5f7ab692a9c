"""Greedy construction and hill climbing for a near-optimal seed solution."""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

from .model import Editor, Instance, Solution, check_feasibility, occupancy
from .operators import standard_swap


class ConstructionError(ValueError):
    def __init__(self, patient: int, message: str):
        super().__init__(message)
        self.patient = patient


@dataclass
class SeedConfig:
    construction: str = "los_desc"
    improvement_budget: int = 20_000
    seed: int = 0

    def __post_init__(self):
        if self.improvement_budget < 0:
            raise ValueError("improvement_budget must be >= 0")
        if self.construction != "los_desc":
            raise ValueError(f"unknown construction rule {self.construction!r}")


def _empty(instance: Instance) -> Solution:
    occ, fem = occupancy(instance, [])
    return Solution([None] * instance.num_patients, 0, occ, fem)


def greedy_construct(instance: Instance, rng: random.Random) -> Solution:
    """Longest stays first; each patient takes the cheapest room free for her whole stay."""
    order = list(range(instance.num_patients))
    rng.shuffle(order)
    order.sort(key=lambda p: -instance.patients[p].los)  # stable: shuffle breaks ties
    ed = Editor(instance, _empty(instance))
    for p in order:
        best_cost, best = None, []
        for r in range(instance.num_rooms):
            if not ed.room_is_free(p, r):
                continue
            c = ed.place_cost(p, r)
            if best_cost is None or c < best_cost:
                best_cost, best = c, [r]
            elif c == best_cost:
                best.append(r)
        if not best:
            raise ConstructionError(p, f"patient {p}: no room has a free bed for the whole stay")
        r = best[0] if len(best) == 1 else rng.choice(best)
        ed.place(p, (r,) * instance.patients[p].los)
    return ed.build()


def _move_one(instance: Instance, sol: Solution, rng: random.Random) -> Optional[Solution]:
    """Reassign one random patient to a different room free for her whole stay."""
    p = rng.randrange(instance.num_patients)
    ed = Editor(instance, sol)
    ed.remove(p)
    current = set(sol.assignment[p])
    rooms = [r for r in range(instance.num_rooms)
             if not (len(current) == 1 and r in current) and ed.room_is_free(p, r)]
    if not rooms:
        return None
    ed.place(p, (rng.choice(rooms),) * instance.patients[p].los)
    return ed.build()


def local_search(instance: Instance, start: Solution, budget: int,
                 rng: random.Random) -> Solution:
    """First-improvement hill climbing over single-patient moves and swaps."""
    best = start
    if instance.num_patients == 0:
        return best
    for _ in range(budget):
        if instance.num_patients >= 2 and rng.random() < 0.5:
            cand = standard_swap(instance, best, rng)
        else:
            cand = _move_one(instance, best, rng)
        if cand is not None and cand.objective < best.objective:
            best = cand
    return best


def solve(instance: Instance, config: SeedConfig = SeedConfig()) -> Solution:
    rng = random.Random(config.seed)
    sol = greedy_construct(instance, rng)
    sol = local_search(instance, sol, config.improvement_budget, rng)
    assert check_feasibility(instance, sol).ok
    return sol


def attach_seed(instance: Instance, solution: Solution) -> Instance:
    """Store ``solution`` and its objective as the instance's seed."""
    instance.seed_solution = solution.to_lists()
    instance.seed_objective = solution.objective
    return instance
