"""Diversity-maximising EA: keep mu solutions under c_max, maximise entropy."""
from __future__ import annotations

import copy
import random
import time
from dataclasses import dataclass, field
from typing import Optional

from .diversity import EntropyState, max_entropy
from .model import ConfigError, Instance, Solution, check_feasibility, quality_threshold
from .operators import Mutator, OperatorConfig, adapt_x

# entropy gains below this are treated as float noise, not improvement
MIN_GAIN = 1e-12


class MissingSeedError(ValueError):
    """The instance has no seed solution; run the seed solver first."""


@dataclass
class Population:
    instance: Instance
    solutions: list[Solution]
    entropy_state: EntropyState
    c_max: int
    evaluations_used: int = 0

    @property
    def mu(self) -> int:
        return len(self.solutions)

    @property
    def entropy(self) -> float:
        return self.entropy_state.cached_H


@dataclass
class RunRecord:
    config: dict
    seed: int
    mu: int
    alpha: float
    c_max: int
    budget: int
    h_max: float
    trajectory: list[tuple[int, float, float]] = field(default_factory=list)  # (evals, H, x)
    population: Optional[Population] = None
    wall_time: float = 0.0

    @property
    def final_entropy(self) -> float:
        return self.trajectory[-1][1]


def initialize(instance: Instance, mu: int, alpha: float, log_base: float = 2.0) -> Population:
    """mu copies of the instance's seed solution; H(S) = 0."""
    if instance.seed_solution is None:
        raise MissingSeedError(
            f"instance {instance.name!r} has no seed solution; run `pasdiv seed-solve` first")
    if mu < 1:
        raise ConfigError("mu must be >= 1")
    seed = Solution.from_assignment(instance, instance.seed_solution)
    report = check_feasibility(instance, seed)
    if not report.ok:
        raise ValueError(f"seed solution violates capacity at {report.violations[:5]}")
    o_star = instance.seed_objective if instance.seed_objective is not None else seed.objective
    c_max = quality_threshold(o_star, alpha)
    if seed.objective > c_max:
        raise ValueError(f"seed objective {seed.objective} exceeds c_max {c_max}")
    # solutions are immutable, so sharing one object is equivalent to deep copies
    solutions = [seed] * mu
    return Population(instance, solutions, EntropyState.from_solutions(solutions, log_base), c_max)


def step(population: Population, mutate: Mutator, rng: random.Random) -> bool:
    """One parent draw, one offspring, accept on quality and strict entropy gain."""
    i = rng.randrange(population.mu)
    parent = population.solutions[i]
    offspring = mutate(parent, population.entropy_state, rng)
    population.evaluations_used += 1
    if offspring is None or offspring.objective > population.c_max:
        return False
    state = population.entropy_state
    new_H = state.replace_delta(parent, offspring)
    if new_H <= state.cached_H + MIN_GAIN:
        return False
    state.commit(parent, offspring, new_H)
    population.solutions[i] = offspring
    return True


def run(instance: Instance, config: OperatorConfig, mu: int = 50, alpha: float = 0.02,
        budget: int = 1_000_000, rng_seed: int = 0, log_base: float = 2.0,
        stride: int = 1000, on_sample=None) -> RunRecord:
    """Run the EA for ``budget`` evaluations and return its record.

    Adaptive variants update x after every block of ``config.u`` evaluations.
    The trajectory holds (evaluations, H, x) at every ``stride`` evaluations
    plus the first and last. ``on_sample`` is called with each sample.
    """
    if budget < 0:
        raise ConfigError("budget must be >= 0")
    config = copy.deepcopy(config)
    config.validate()
    rng = random.Random(rng_seed)
    start = time.perf_counter()
    pop = initialize(instance, mu, alpha, log_base)
    mutate = Mutator(instance, config)
    record = RunRecord(
        config=config.to_dict(), seed=rng_seed, mu=mu, alpha=alpha, c_max=pop.c_max,
        budget=budget, h_max=max_entropy(instance.total_presence, instance.num_rooms, mu, log_base),
    )

    def sample():
        item = (pop.evaluations_used, pop.entropy, config.x)
        record.trajectory.append(item)
        if on_sample is not None:
            on_sample(pop, item)

    sample()
    last_checked = pop.entropy
    while pop.evaluations_used < budget:
        step(pop, mutate, rng)
        n = pop.evaluations_used
        if config.adaptive and n % config.u == 0:
            config.x = adapt_x(config, pop.entropy > last_checked)
            last_checked = pop.entropy
        if n % stride == 0 or n == budget:
            sample()
    record.population = pop
    record.wall_time = time.perf_counter() - start
    return record
