"""Evolve diverse sets of high-quality patient admission schedules."""
from .diversity import EntropyState, h, max_entropy
from .ea import Population, RunRecord, initialize, run, step
from .instances import GeneratorSpec, generate, read_instance, validate, write_instance
from .model import (Instance, Patient, Room, Solution, check_feasibility, evaluate_objective,
                    quality_threshold)
from .operators import OperatorConfig, adapt_x, change_mutation, standard_swap

__all__ = [
    "EntropyState", "GeneratorSpec", "Instance", "OperatorConfig", "Patient", "Population",
    "Room", "RunRecord", "Solution", "adapt_x", "change_mutation", "check_feasibility",
    "evaluate_objective", "generate", "h", "initialize", "max_entropy", "quality_threshold",
    "read_instance", "run", "standard_swap", "step", "validate", "write_instance",
]
