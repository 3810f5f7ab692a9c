import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import make_instance, random_assignment, random_micro
from pasdiv.model import (ConfigError, Editor, GENDER_ROOM_DAY, Solution, StructuralError,
                          check_feasibility, evaluate_objective, quality_threshold)


def brute_objective(inst, assignment):
    """Recount every term day by day, independent of evaluate_objective's loops."""
    o1 = 0
    for t in range(inst.horizon):
        for p, pat in enumerate(inst.patients):
            if pat.admission <= t < pat.discharge:
                o1 += inst.cv[p][assignment[p][t - pat.admission]]
    o2 = 0
    for r, room in enumerate(inst.rooms):
        if room.gender_policy != "D":
            continue
        for t in range(inst.horizon):
            genders = [pat.gender for p, pat in enumerate(inst.patients)
                       if pat.admission <= t < pat.discharge
                       and assignment[p][t - pat.admission] == r]
            f, m = genders.count("F"), genders.count("M")
            o2 += inst.cg2 * min(f, m)
    o3 = sum(inst.ct for row in assignment for a, b in zip(row, row[1:]) if a != b)
    return o1 + o2 + o3, o1, o2, o3


def brute_violations(inst, assignment):
    out = []
    for r, room in enumerate(inst.rooms):
        for t in range(inst.horizon):
            load = sum(1 for p, pat in enumerate(inst.patients)
                       if pat.admission <= t < pat.discharge
                       and assignment[p][t - pat.admission] == r)
            if load > room.capacity:
                out.append((r, t, load, room.capacity))
    return out


def test_empty_instance_is_feasible():
    inst = make_instance([(1, "N")], [])
    assert check_feasibility(inst, []).ok
    assert evaluate_objective(inst, []) == (0, 0, 0, 0)


def test_overlap_in_single_bed_room_is_violation():
    inst = make_instance([(1, "N")], [("F", 0, 2), ("M", 1, 3)])
    rep = check_feasibility(inst, [[0, 0], [0, 0]])
    assert not rep.ok
    assert rep.violations == [(0, 1, 2, 1)]


def test_staggered_stays_match_bruteforce_count():
    inst = make_instance([(2, "N"), (1, "N")], [("F", 0, 2), ("M", 1, 3), ("F", 1, 2)])
    for a in ([[0, 0], [0, 1], [0]], [[1, 1], [1, 0], [0]], [[0, 0], [0, 0], [0]]):
        rep = check_feasibility(inst, a)
        assert rep.violations == brute_violations(inst, a)
        assert rep.ok == (not brute_violations(inst, a))


def test_dimension_mismatch_is_structural():
    inst = make_instance([(1, "N")], [("F", 0, 2)])
    with pytest.raises(StructuralError):
        check_feasibility(inst, [[0]])
    with pytest.raises(StructuralError):
        check_feasibility(inst, [])
    with pytest.raises(StructuralError):
        evaluate_objective(inst, [[0, 5]])


def test_zero_costs_give_zero_objective():
    inst = make_instance([(2, "N"), (2, "F")], [("F", 0, 3), ("M", 1, 2)], ct=11, cg2=5)
    assert evaluate_objective(inst, [[1, 1, 1], [0]]).total == 0


def test_mixed_d_room_charges_minority():
    inst = make_instance([(3, "D")], [("F", 0, 1), ("F", 0, 1), ("M", 0, 1)], cg2=5)
    assert evaluate_objective(inst, [[0], [0], [0]]).gender == 5


def test_mixed_d_room_per_room_day_rule():
    inst = make_instance([(4, "D")], [("F", 0, 1), ("F", 0, 1), ("M", 0, 1), ("M", 0, 1)],
                         cg2=5, gender_rule=GENDER_ROOM_DAY)
    assert evaluate_objective(inst, [[0]] * 4).gender == 5


def test_one_transfer_costs_ct():
    inst = make_instance([(1, "N"), (1, "N")], [("M", 0, 4)], ct=11)
    o = evaluate_objective(inst, [[0, 0, 1, 1]])
    assert o.transfer == 11 and o.total == 11


def test_cv_charged_per_day_or_per_stint():
    inst = make_instance([(1, "N"), (1, "N")], [("M", 0, 4)], cv=[[3, 7]], ct=0)
    assert evaluate_objective(inst, [[0, 0, 1, 1]]).cv == 3 + 3 + 7 + 7
    inst.cv_per_day = False
    assert evaluate_objective(inst, [[0, 0, 1, 1]]).cv == 3 + 7


@pytest.mark.parametrize("o_star,alpha,expected", [
    (100, 0.02, 102), (100, 0.16, 116), (57, 0.04, 59), (100, 0.0, 100), (0, 0.16, 0),
])
def test_quality_threshold(o_star, alpha, expected):
    assert quality_threshold(o_star, alpha) == expected


def test_quality_threshold_rejects_negative_alpha():
    with pytest.raises(ConfigError):
        quality_threshold(100, -0.1)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**6))
def test_objective_matches_bruteforce(seed):
    rng = random.Random(seed)
    inst = random_micro(rng, max_patients=6, max_rooms=4, max_days=5)
    a = random_assignment(inst, rng)
    o = evaluate_objective(inst, a)
    assert tuple(o) == brute_objective(inst, a)
    assert all(isinstance(v, int) and v >= 0 for v in o)
    assert evaluate_objective(inst, a) == o
    assert check_feasibility(inst, a).violations == brute_violations(inst, a)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_no_d_rooms_or_single_gender_means_no_gender_cost(seed):
    rng = random.Random(seed)
    inst = random_micro(rng, d_rooms=False)
    assert evaluate_objective(inst, random_assignment(inst, rng)).gender == 0
    inst = random_micro(rng)
    for i, p in enumerate(inst.patients):
        inst.patients[i] = type(p)(p.id, "F", p.admission, p.discharge)
    inst.refresh()
    assert evaluate_objective(inst, random_assignment(inst, rng)).gender == 0


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_single_room_stays_have_no_transfers(seed):
    rng = random.Random(seed)
    inst = random_micro(rng)
    a = [[rng.randrange(inst.num_rooms)] * p.los for p in inst.patients]
    assert evaluate_objective(inst, a).transfer == 0


@pytest.mark.parametrize("rule", ["minority", "room_day"])
@pytest.mark.parametrize("per_day", [True, False])
def test_editor_tracks_full_evaluation(rule, per_day):
    rng = random.Random(7)
    for _ in range(200):
        inst = random_micro(rng, max_patients=6, max_rooms=3, max_days=5)
        inst.gender_rule = rule
        inst.cv_per_day = per_day
        sol = Solution.from_assignment(inst, random_assignment(inst, rng))
        for _ in range(5):
            ed = Editor(inst, sol)
            moved = rng.sample(range(inst.num_patients), rng.randint(1, inst.num_patients))
            for p in moved:
                ed.remove(p)
            for p in moved:
                if rng.random() < 0.5:
                    r = rng.randrange(inst.num_rooms)
                    expected = ed.objective + ed.place_cost(p, r)
                    ed.place(p, (r,) * inst.patients[p].los)
                    assert ed.objective == expected
                else:
                    ed.place(p, tuple(rng.randrange(inst.num_rooms)
                                      for _ in range(inst.patients[p].los)))
            new = ed.build()
            assert new.objective == evaluate_objective(inst, new).total
            fresh = Solution.from_assignment(inst, new.assignment)
            assert (new.occ, new.fem) == (fresh.occ, fresh.fem)
            sol = new
