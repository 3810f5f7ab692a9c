"""Instance and population JSON files, validation, and a synthetic generator.

Instance document::

    {"name": str, "horizon": int,
     "rooms": [{"id", "capacity", "gender_policy"}],
     "patients": [{"id", "gender", "admission", "discharge"}],
     "cost": {"cv": [[int]] (patients x rooms), "cg2": int, "ct": int},
     "seed_solution": [[room per stay day]] | null,
     "seed_objective": int | null,
     "cost_breakdown": {...} | null}

Days are 0-based and ``discharge`` is exclusive.
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Literal, NamedTuple, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .model import (Instance, Patient, Room, StructuralError, check_feasibility,
                    evaluate_objective)


class InstanceFormatError(ValueError):
    """A file could not be parsed into an instance."""


class GenerationError(ValueError):
    """A generator spec cannot produce a feasible instance."""


# -- file schema -------------------------------------------------------------

class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", strict=True)


class RoomModel(_Strict):
    id: int
    capacity: int = Field(ge=1)
    gender_policy: Literal["F", "M", "D", "N"]


class PatientModel(_Strict):
    id: int
    gender: Literal["F", "M"]
    admission: int = Field(ge=0)
    discharge: int = Field(ge=1)

    @model_validator(mode="after")
    def _stay(self):
        if self.discharge <= self.admission:
            raise ValueError("discharge must be after admission")
        return self


class CostModel(_Strict):
    cv: list[list[int]]
    cg2: int = Field(ge=0)
    ct: int = Field(ge=0)
    cv_per_day: bool = True
    gender_rule: Literal["minority", "room_day"] = "minority"


class InstanceModel(_Strict):
    name: str
    horizon: int = Field(ge=1)
    rooms: list[RoomModel]
    patients: list[PatientModel]
    cost: CostModel
    seed_solution: Optional[list[list[int]]] = None
    seed_objective: Optional[int] = None
    cost_breakdown: Optional[dict] = None


class SolutionModel(_Strict):
    assignment: list[list[int]]
    objective: int


class PopulationModel(_Strict):
    instance_name: str
    c_max: int
    mu: int = Field(ge=1)
    solutions: list[SolutionModel]
    entropy: float
    log_base: float = Field(gt=1)


def _format_errors(err: ValidationError) -> str:
    lines = []
    for e in err.errors():
        loc = ".".join(str(x) for x in e["loc"])
        lines.append(f"{loc}: {e['msg']}")
    return "; ".join(lines)


def _parse(text: str, model, source: str):
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceFormatError(f"{source}: line {e.lineno} column {e.colno}: {e.msg}") from None
    try:
        return model.model_validate(raw)
    except ValidationError as e:
        raise InstanceFormatError(f"{source}: {_format_errors(e)}") from None


def instance_from_dict(doc: dict) -> Instance:
    m = InstanceModel.model_validate(doc)
    return _to_instance(m)


def _to_instance(m: InstanceModel) -> Instance:
    return Instance(
        name=m.name,
        horizon=m.horizon,
        rooms=[Room(r.id, r.capacity, r.gender_policy) for r in m.rooms],
        patients=[Patient(p.id, p.gender, p.admission, p.discharge) for p in m.patients],
        cv=[list(row) for row in m.cost.cv],
        cg2=m.cost.cg2,
        ct=m.cost.ct,
        cv_per_day=m.cost.cv_per_day,
        gender_rule=m.cost.gender_rule,
        seed_solution=m.seed_solution,
        seed_objective=m.seed_objective,
        cost_breakdown=m.cost_breakdown,
    )


def instance_to_dict(instance: Instance) -> dict:
    return {
        "name": instance.name,
        "horizon": instance.horizon,
        "rooms": [{"id": r.id, "capacity": r.capacity, "gender_policy": r.gender_policy}
                  for r in instance.rooms],
        "patients": [{"id": p.id, "gender": p.gender, "admission": p.admission,
                      "discharge": p.discharge} for p in instance.patients],
        "cost": {"cv": instance.cv, "cg2": instance.cg2, "ct": instance.ct,
                 "cv_per_day": instance.cv_per_day, "gender_rule": instance.gender_rule},
        "seed_solution": instance.seed_solution,
        "seed_objective": instance.seed_objective,
        "cost_breakdown": instance.cost_breakdown,
    }


_NUM_LIST = re.compile(r"\[\s+([-\d.eE+,\s]*?)\s+\]")


def dumps(doc) -> str:
    """Indented JSON with numeric arrays kept on one line."""
    text = json.dumps(doc, indent=2)
    text = _NUM_LIST.sub(lambda m: "[" + re.sub(r",\s+", ", ", m.group(1)) + "]", text)
    return text + "\n"


def read_instance(path) -> Instance:
    path = Path(path)
    return _to_instance(_parse(path.read_text(), InstanceModel, str(path)))


def write_instance(instance: Instance, path) -> None:
    Path(path).write_text(dumps(instance_to_dict(instance)))


def population_to_dict(population) -> dict:
    return {
        "instance_name": population.instance.name,
        "c_max": population.c_max,
        "mu": population.mu,
        "solutions": [{"assignment": s.to_lists(), "objective": s.objective}
                      for s in population.solutions],
        "entropy": population.entropy,
        "log_base": population.entropy_state.log_base,
    }


def write_population(population, path) -> None:
    Path(path).write_text(dumps(population_to_dict(population)))


def read_population(path, instance: Instance):
    """Load a population file against its instance; counters are rebuilt."""
    from .diversity import EntropyState
    from .ea import Population
    from .model import Solution

    path = Path(path)
    m = _parse(path.read_text(), PopulationModel, str(path))
    if m.instance_name != instance.name:
        raise InstanceFormatError(
            f"{path}: population is for {m.instance_name!r}, not {instance.name!r}")
    if len(m.solutions) != m.mu:
        raise InstanceFormatError(f"{path}: mu={m.mu} but {len(m.solutions)} solutions")
    sols = [Solution.from_assignment(instance, s.assignment) for s in m.solutions]
    state = EntropyState.from_solutions(sols, m.log_base)
    return Population(instance, sols, state, m.c_max)


# -- validation --------------------------------------------------------------

class Violation(NamedTuple):
    location: str
    message: str

    def __str__(self):
        return f"{self.location}: {self.message}"


def validate(instance: Instance) -> list[Violation]:
    """Structural checks plus seed feasibility/objective checks. Empty list means valid."""
    out: list[Violation] = []
    P, R = instance.num_patients, instance.num_rooms
    if instance.horizon < 1:
        out.append(Violation("horizon", "must be >= 1"))
    for i, r in enumerate(instance.rooms):
        if r.id != i:
            out.append(Violation(f"rooms.{i}.id", f"expected {i}, got {r.id}"))
    for i, p in enumerate(instance.patients):
        if p.id != i:
            out.append(Violation(f"patients.{i}.id", f"expected {i}, got {p.id}"))
        if p.discharge > instance.horizon:
            out.append(Violation(f"patients.{i}.discharge",
                                 f"{p.discharge} beyond horizon {instance.horizon}"))
    if len(instance.cv) != P:
        out.append(Violation("cost.cv", f"patients axis has {len(instance.cv)} rows, expected {P}"))
    for i, row in enumerate(instance.cv):
        if len(row) != R:
            out.append(Violation(f"cost.cv.{i}", f"rooms axis has {len(row)} entries, expected {R}"))
        if any(c < 0 for c in row):
            out.append(Violation(f"cost.cv.{i}", "negative cost"))
    for key in ("cg2", "ct"):
        if getattr(instance, key) < 0:
            out.append(Violation(f"cost.{key}", "must be non-negative"))
    if out:
        return out

    if instance.seed_solution is None:
        if instance.seed_objective is not None:
            out.append(Violation("seed_objective", "given without seed_solution"))
        return out
    try:
        report = check_feasibility(instance, instance.seed_solution)
    except StructuralError as e:
        out.append(Violation("seed_solution", str(e)))
        return out
    for r, t, load, cap in report.violations:
        out.append(Violation("seed_solution", f"room {r} day {t}: {load} patients, capacity {cap}"))
    actual = evaluate_objective(instance, instance.seed_solution).total
    if instance.seed_objective is not None and instance.seed_objective != actual:
        out.append(Violation("seed_objective",
                             f"stored {instance.seed_objective}, recomputed {actual}"))
    return out


# -- generator ---------------------------------------------------------------

# Penalty magnitudes are invented defaults, not the benchmark's values.
DEFAULT_COST_WEIGHTS = {
    "age": 10,            # department age policy violated
    "department": 20,     # department does not treat the patient's specialty
    "room": 10,           # per missing level of room specialty equipment
    "features_required": 20,
    "features_desired": 5,
    "capacity": 10,       # room larger than preferred
    "gender": 50,         # F/M room holding the other gender
}

DEFAULT_POLICY_MIX = {"F": 0.15, "M": 0.15, "D": 0.4, "N": 0.3}


@dataclass
class GeneratorSpec:
    """Targets for a synthetic instance.

    ``occupancy_target`` caps the fraction of beds in use on any single day;
    admissions that would exceed it are redrawn.
    """

    patients: int = 60
    rooms: int = 10
    total_beds: int = 40
    days: int = 7
    mean_los: float = 3.0
    occupancy_target: float = 0.9
    gender_mix: float = 0.5
    policy_mix: dict = field(default_factory=lambda: dict(DEFAULT_POLICY_MIX))
    cost_weights: dict = field(default_factory=lambda: dict(DEFAULT_COST_WEIGHTS))
    cg2: int = 5
    ct: int = 11
    seed: int = 0
    name: str = ""
    departments: int = 0  # 0 -> about one per 8 rooms
    specialties: int = 6
    features: int = 4
    breakdown: bool = False

    def check(self) -> None:
        if self.patients < 0:
            raise GenerationError("patients must be >= 0")
        if self.rooms < 1:
            raise GenerationError("rooms must be >= 1")
        if self.total_beds < self.rooms:
            raise GenerationError("total_beds must be >= rooms")
        if self.days < 1 or not 1 <= self.mean_los <= self.days:
            raise GenerationError("need 1 <= mean_los <= days")
        if not 0 < self.occupancy_target <= 1:
            raise GenerationError("occupancy_target must be in (0, 1]")
        unknown = set(self.cost_weights) - set(DEFAULT_COST_WEIGHTS)
        if unknown:
            raise GenerationError(f"unknown cost weights {sorted(unknown)}")
        if set(self.policy_mix) - {"F", "M", "D", "N"} or sum(self.policy_mix.values()) <= 0:
            raise GenerationError("policy_mix must weight the tokens F, M, D, N")


PRESETS = {
    "desk": dict(patients=60, rooms=10, total_beds=40, days=7, mean_los=3.0),
    # size and length-of-stay statistics of the six benchmark instances
    "inst1": dict(patients=652, rooms=98, total_beds=286, days=14, mean_los=3.66),
    "inst2": dict(patients=755, rooms=151, total_beds=465, days=14, mean_los=5.17),
    "inst3": dict(patients=708, rooms=131, total_beds=395, days=14, mean_los=4.46),
    "inst4": dict(patients=746, rooms=155, total_beds=471, days=14, mean_los=4.79),
    "inst5": dict(patients=587, rooms=102, total_beds=325, days=14, mean_los=3.82),
    "inst6": dict(patients=685, rooms=104, total_beds=313, days=14, mean_los=4.12),
}


def preset(preset_name: str, **overrides) -> GeneratorSpec:
    kw = dict(PRESETS[preset_name])
    kw["name"] = f"{preset_name}-{overrides.get('seed') or 0}"
    kw.update({k: v for k, v in overrides.items() if v is not None})
    return GeneratorSpec(**kw)


def _room_capacities(rng, rooms: int, beds: int) -> list[int]:
    caps = np.ones(rooms, dtype=int)
    extra = beds - rooms
    if extra:
        caps += rng.multinomial(extra, np.full(rooms, 1.0 / rooms))
    return [int(c) for c in caps]


def generate(spec: GeneratorSpec) -> Instance:
    """Draw a random instance. Pure function of ``spec`` (including its seed)."""
    spec.check()
    rng = np.random.default_rng(spec.seed)
    R, P, D = spec.rooms, spec.patients, spec.days
    expected_load = P * spec.mean_los
    limit = math.floor(spec.occupancy_target * spec.total_beds)
    if expected_load > limit * D:
        raise GenerationError(
            f"{P} patients x {spec.mean_los} days exceeds {limit} usable beds x {D} days")

    caps = _room_capacities(rng, R, spec.total_beds)
    tokens = sorted(spec.policy_mix)
    probs = np.array([spec.policy_mix[t] for t in tokens], dtype=float)
    policies = [tokens[i] for i in rng.choice(len(tokens), size=R, p=probs / probs.sum())]
    rooms = [Room(r, caps[r], policies[r]) for r in range(R)]

    load = [0] * D
    stays = [int(min(D, 1 + rng.poisson(spec.mean_los - 1))) for _ in range(P)]
    genders = ["F" if u < spec.gender_mix else "M" for u in rng.random(P)]
    admissions = [0] * P
    # longest stays are placed first so that short ones fill the gaps
    for p in sorted(range(P), key=lambda i: (-stays[i], i)):
        los = stays[p]
        starts = [a for a in range(D - los + 1)
                  if all(load[t] < limit for t in range(a, a + los))]
        if not starts:
            raise GenerationError(f"patient {p}: no admission day keeps occupancy under {limit} beds")
        adm = starts[int(rng.integers(0, len(starts)))]
        for t in range(adm, adm + los):
            load[t] += 1
        admissions[p] = adm
    patients = [Patient(p, genders[p], admissions[p], admissions[p] + stays[p]) for p in range(P)]

    parts = _component_costs(rng, spec, rooms, patients)
    cv = [[int(sum(parts[k][p][r] for k in parts)) for r in range(R)] for p in range(P)]
    name = spec.name or f"synthetic-{spec.seed}"
    return Instance(name=name, horizon=D, rooms=rooms, patients=patients, cv=cv,
                    cg2=spec.cg2, ct=spec.ct,
                    cost_breakdown=parts if spec.breakdown else None)


def _component_costs(rng, spec: GeneratorSpec, rooms, patients) -> dict:
    """Per patient-room penalty matrices for the soft constraints folded into CV."""
    R, P = len(rooms), len(patients)
    w = {**DEFAULT_COST_WEIGHTS, **spec.cost_weights}
    n_dept = spec.departments or max(1, round(R / 8))
    dept_of = [int(d) for d in rng.integers(0, n_dept, size=R)]
    # age policy per department: 0 none, 1 children only, 2 elderly only
    age_policy = [int(a) for a in rng.choice(3, size=n_dept, p=[0.6, 0.2, 0.2])]
    treats = [set(int(s) for s in rng.choice(spec.specialties, size=min(3, spec.specialties),
                                             replace=False)) for _ in range(n_dept)]
    room_level = [int(v) for v in rng.integers(0, 3, size=R)]
    room_feat = rng.random((R, spec.features)) < 0.5

    names = ("age", "department", "room", "features", "capacity", "gender")
    parts = {k: [[0] * R for _ in range(P)] for k in names}
    for p, pat in enumerate(patients):
        age = int(rng.integers(0, 100))
        spec_needed = int(rng.integers(0, spec.specialties))
        level = int(rng.choice(3, p=[0.6, 0.3, 0.1]))
        req = rng.random(spec.features) < 0.1
        des = (rng.random(spec.features) < 0.15) & ~req
        pref = int(rng.choice([1, 2, 4, 99]))
        for r, room in enumerate(rooms):
            d = dept_of[r]
            pol = age_policy[d]
            if (pol == 1 and age > 16) or (pol == 2 and age < 65):
                parts["age"][p][r] = w["age"]
            if spec_needed not in treats[d]:
                parts["department"][p][r] = w["department"]
            parts["room"][p][r] = w["room"] * max(0, level - room_level[r])
            missing_req = int(np.sum(req & ~room_feat[r]))
            missing_des = int(np.sum(des & ~room_feat[r]))
            parts["features"][p][r] = (w["features_required"] * missing_req
                                       + w["features_desired"] * missing_des)
            if room.capacity > pref:
                parts["capacity"][p][r] = w["capacity"]
            if room.gender_policy in ("F", "M") and room.gender_policy != pat.gender:
                parts["gender"][p][r] = w["gender"]
    return parts


def spec_to_dict(spec: GeneratorSpec) -> dict:
    return asdict(spec)
