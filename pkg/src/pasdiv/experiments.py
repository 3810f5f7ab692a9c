"""Operator comparison runs, robustness simulation, and figure data exports."""
from __future__ import annotations

import csv
import io
import random
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .ea import RunRecord, run
from .instances import write_population
from .model import Instance, Solution
from .operators import OperatorConfig


def fmt(v) -> str:
    """Floats with 6 significant digits; everything else via str()."""
    return format(v, ".6g") if isinstance(v, float) else str(v)


@dataclass
class RobustnessSpec:
    b: int = 1
    repetitions: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.b < 1 or self.repetitions < 1:
            raise ValueError("b and repetitions must be >= 1")


@dataclass
class RobustnessResult:
    ratio: float  # % of repetitions with at least one separating solution
    alt: float    # mean number of separating solutions


class PairShortageError(ValueError):
    pass


def _common_days(instance: Instance, p: int, q: int) -> range:
    return range(max(instance.admission[p], instance.admission[q]),
                 min(instance.discharge[p], instance.discharge[q]))


def _room_on(instance: Instance, sol: Solution, p: int, t: int) -> int:
    return sol.assignment[p][t - instance.admission[p]]


def colocated_pairs(instance: Instance, initial: Solution) -> list[tuple[int, int]]:
    """Patient pairs sharing a room on at least one common day of ``initial``."""
    by_room_day: dict[tuple[int, int], list[int]] = {}
    for p, row in enumerate(initial.assignment):
        for i, r in enumerate(row):
            by_room_day.setdefault((r, instance.admission[p] + i), []).append(p)
    pairs = set()
    for members in by_room_day.values():
        for i in range(len(members)):
            for j in range(i + 1, len(members)):
                pairs.add((members[i], members[j]))
    return sorted(pairs)


def separates(instance: Instance, sol: Solution, pairs) -> bool:
    """True if every pair occupies different rooms on every common day."""
    for p, q in pairs:
        for t in _common_days(instance, p, q):
            if _room_on(instance, sol, p, t) == _room_on(instance, sol, q, t):
                return False
    return True


def robustness_sim(population, initial: Solution, spec: RobustnessSpec) -> RobustnessResult:
    """Draw b co-located pairs per repetition and count members that split all of them."""
    instance = population.instance
    pairs = colocated_pairs(instance, initial)
    if len(pairs) < spec.b:
        raise PairShortageError(
            f"only {len(pairs)} co-located patient pairs in the initial solution, need {spec.b}")
    rng = random.Random(spec.seed)
    hits = 0
    total = 0
    for _ in range(spec.repetitions):
        drawn = rng.sample(pairs, spec.b)
        n = sum(separates(instance, s, drawn) for s in population.solutions)
        hits += n > 0
        total += n
    return RobustnessResult(100.0 * hits / spec.repetitions, total / spec.repetitions)


def room_usage(population) -> list[int]:
    """Distinct rooms each patient occupies across all members and stay days."""
    P = population.instance.num_patients
    used = [set() for _ in range(P)]
    for s in population.solutions:
        for p, row in enumerate(s.assignment):
            used[p].update(row)
    return [len(u) for u in used]


def heatmap_rows(population) -> list[tuple[int, int, float]]:
    R = population.instance.num_rooms
    return [(p, n, n / R) for p, n in enumerate(room_usage(population))]


def heatmap_export(population, path) -> None:
    if not population.solutions:
        raise ValueError("empty population")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["patient", "rooms_used", "fraction_of_rooms"])
        for p, n, frac in heatmap_rows(population):
            w.writerow([p, n, fmt(frac)])


def write_trajectory(record: RunRecord, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["evaluations", "entropy", "x"])
        for n, H, x in record.trajectory:
            w.writerow([n, fmt(float(H)), fmt(float(x))])


def _one_run(args) -> RunRecord:
    instance, config, runs_kw = args
    rec = run(instance, config, **runs_kw)
    return rec


REPORT_COLUMNS = ["variant", "run", "seed", "final_entropy", "h_max", "evaluations", "final_x"]


def compare_operators(instance: Instance, variants: Sequence[str], runs: int, budget: int,
                      mu: int = 50, alpha: float = 0.02, base_seed: int = 0,
                      out_dir=None, log_base: float = 2.0, workers: int = 1,
                      configs: Optional[dict] = None) -> tuple[str, list[RunRecord]]:
    """Run every variant ``runs`` times with seeds base_seed + i.

    Returns the CSV report text (one row per run, then one ``median`` row per
    variant) and the run records in report order. When ``out_dir`` is given,
    the report, trajectories and final populations are written there.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    configs = configs or {}
    jobs = []
    for v in variants:
        cfg = configs.get(v) or OperatorConfig.for_variant(v)
        for i in range(runs):
            jobs.append((v, i, (instance, cfg, dict(mu=mu, alpha=alpha, budget=budget,
                                                    rng_seed=base_seed + i, log_base=log_base))))
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            records = list(pool.map(_one_run, [j[2] for j in jobs]))
    else:
        records = [_one_run(j[2]) for j in jobs]

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    finals: dict[str, list[float]] = {v: [] for v in variants}
    for (v, i, _), rec in zip(jobs, records):
        finals[v].append(rec.final_entropy)
        w.writerow([v, i, rec.seed, fmt(rec.final_entropy), fmt(rec.h_max),
                    rec.trajectory[-1][0], fmt(float(rec.trajectory[-1][2]))])
    for v in variants:
        w.writerow([v, "median", "", fmt(float(statistics.median(finals[v]))),
                    fmt(records[0].h_max), "", ""])
    report = buf.getvalue()

    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.csv").write_text(report)
        for (v, i, _), rec in zip(jobs, records):
            write_trajectory(rec, out / f"trajectory_{v}_{i}.csv")
            write_population(rec.population, out / f"population_{v}_{i}.json")
    return report, records


def median_final(records: Sequence[RunRecord], variant: str) -> float:
    return statistics.median(r.final_entropy for r in records if r.config["variant"] == variant)
