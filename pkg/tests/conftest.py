import random

import pytest

from pasdiv.instances import generate, preset
from pasdiv.model import Instance, Patient, Room
from pasdiv.seeding import SeedConfig, attach_seed, solve


def make_instance(rooms, patients, cv=None, cg2=0, ct=0, horizon=None, **kw):
    """rooms: [(capacity, policy)], patients: [(gender, admission, discharge)]."""
    rooms = [Room(i, c, g) for i, (c, g) in enumerate(rooms)]
    patients = [Patient(i, g, a, d) for i, (g, a, d) in enumerate(patients)]
    if cv is None:
        cv = [[0] * len(rooms) for _ in patients]
    if horizon is None:
        horizon = max([p.discharge for p in patients], default=1)
    return Instance("fixture", horizon, rooms, patients, cv, cg2, ct, **kw)


def random_micro(rng: random.Random, max_patients=4, max_rooms=3, max_days=4, d_rooms=True):
    R = rng.randint(1, max_rooms)
    D = rng.randint(1, max_days)
    P = rng.randint(1, max_patients)
    policies = "FMDN" if d_rooms else "FMN"
    rooms = [(rng.randint(1, 2), rng.choice(policies)) for _ in range(R)]
    patients = []
    for _ in range(P):
        a = rng.randrange(D)
        patients.append((rng.choice("FM"), a, rng.randint(a + 1, D)))
    cv = [[rng.randint(0, 9) for _ in range(R)] for _ in range(P)]
    return make_instance(rooms, patients, cv, cg2=rng.randint(0, 5), ct=rng.randint(0, 11),
                         horizon=D)


def random_assignment(inst, rng):
    return [[rng.randrange(inst.num_rooms) for _ in range(p.los)] for p in inst.patients]


@pytest.fixture
def make():
    return make_instance


@pytest.fixture(scope="session")
def desk_instance():
    """Desk-scale instance (60 patients, 10 rooms, 7 days) with a seed solution."""
    inst = generate(preset("desk", seed=0))
    attach_seed(inst, solve(inst, SeedConfig(seed=0)))
    return inst


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import VERDICTS
    except ImportError:
        return
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in VERDICTS:
            terminalreporter.write_line(line)
