import logging
import sys

import click

from . import experiments, instances, seeding
from .ea import run
from .model import evaluate_objective
from .operators import VARIANTS, OperatorConfig


@click.group()
@click.option("-v", "--verbose", is_flag=True)
def cli(verbose):
    """Diverse high-quality solution sets for patient admission scheduling."""
    logging.basicConfig(level=logging.DEBUG if verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")


@cli.command()
@click.option("--preset", "preset_name", type=click.Choice(sorted(instances.PRESETS)),
              default="desk", show_default=True)
@click.option("--patients", type=int)
@click.option("--rooms", type=int)
@click.option("--beds", "total_beds", type=int)
@click.option("--days", type=int)
@click.option("--mean-los", type=float)
@click.option("--occupancy", "occupancy_target", type=float)
@click.option("--cg2", type=int)
@click.option("--ct", type=int)
@click.option("--name", type=str)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--breakdown", is_flag=True, help="Also store the per-component cost matrices.")
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def generate(preset_name, seed, breakdown, out, **overrides):
    """Generate a synthetic instance file."""
    spec = instances.preset(preset_name, seed=seed, breakdown=breakdown, **overrides)
    try:
        inst = instances.generate(spec)
    except instances.GenerationError as e:
        raise click.ClickException(str(e))
    instances.write_instance(inst, out)
    click.echo(f"{inst.name}: {inst.num_patients} patients, {inst.num_rooms} rooms, "
               f"{inst.horizon} days, W={inst.total_presence}")


def _load(path):
    try:
        return instances.read_instance(path)
    except instances.InstanceFormatError as e:
        raise click.ClickException(str(e))


@cli.command()
@click.argument("instance", type=click.Path(exists=True, dir_okay=False))
def validate(instance):
    """Check an instance file; exits non-zero on any violation."""
    inst = _load(instance)
    problems = instances.validate(inst)
    for v in problems:
        click.echo(str(v))
    if problems:
        sys.exit(1)
    click.echo("ok")


@cli.command("seed-solve")
@click.argument("instance", type=click.Path(exists=True, dir_okay=False))
@click.option("--budget", type=int, default=20_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), help="Defaults to rewriting INSTANCE.")
def seed_solve(instance, budget, seed, out):
    """Compute a near-optimal seed solution and store it in the instance."""
    inst = _load(instance)
    try:
        sol = seeding.solve(inst, seeding.SeedConfig(improvement_budget=budget, seed=seed))
    except seeding.ConstructionError as e:
        raise click.ClickException(str(e))
    seeding.attach_seed(inst, sol)
    instances.write_instance(inst, out or instance)
    o = evaluate_objective(inst, sol)
    click.echo(f"O*={o.total} (cv={o.cv} gender={o.gender} transfer={o.transfer})")


def _operator_options(f):
    for opt in reversed([
        click.option("--gamma", type=float),
        click.option("--x", "x", type=float),
        click.option("--x-min", type=float),
        click.option("--x-max", type=float),
        click.option("--F", "F", type=float),
        click.option("--k", type=float),
        click.option("--u", type=int),
        click.option("--y", type=int),
    ]):
        f = opt(f)
    return f


@cli.command()
@click.argument("instance", type=click.Path(exists=True, dir_okay=False))
@click.option("--operator", type=click.Choice(VARIANTS), default="adaptive", show_default=True)
@click.option("--mu", type=int, default=50, show_default=True)
@click.option("--alpha", type=float, default=0.02, show_default=True)
@click.option("--evals", type=int, default=1_000_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--stride", type=int, default=1000, show_default=True)
@click.option("--log-base", type=float, default=2.0, show_default=True)
@click.option("--trajectory", type=click.Path(dir_okay=False))
@click.option("--out", type=click.Path(dir_okay=False), help="Population JSON output.")
@_operator_options
def evolve(instance, operator, mu, alpha, evals, seed, stride, log_base, trajectory, out, **params):
    """Run the diversity-maximising EA on INSTANCE."""
    inst = _load(instance)
    try:
        config = OperatorConfig.for_variant(operator, **params)
        rec = run(inst, config, mu=mu, alpha=alpha, budget=evals, rng_seed=seed,
                  log_base=log_base, stride=stride)
    except ValueError as e:  # missing seed, bad config
        raise click.ClickException(str(e))
    if trajectory:
        experiments.write_trajectory(rec, trajectory)
    if out:
        instances.write_population(rec.population, out)
    click.echo(f"H={experiments.fmt(rec.final_entropy)} H_max={experiments.fmt(rec.h_max)} "
               f"c_max={rec.c_max} evals={rec.trajectory[-1][0]} time={rec.wall_time:.1f}s")


@cli.command()
@click.argument("instance", type=click.Path(exists=True, dir_okay=False))
@click.argument("population", type=click.Path(exists=True, dir_okay=False))
@click.option("--pairs", "b", type=int, default=1, show_default=True)
@click.option("--reps", type=int, default=100, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def robustness(instance, population, b, reps, seed):
    """Pair-separation robustness of a population against the instance's seed solution."""
    from .model import Solution
    inst = _load(instance)
    pop = instances.read_population(population, inst)
    if inst.seed_solution is None:
        raise click.ClickException("instance has no seed solution")
    initial = Solution.from_assignment(inst, inst.seed_solution)
    try:
        res = experiments.robustness_sim(pop, initial, experiments.RobustnessSpec(b, reps, seed))
    except experiments.PairShortageError as e:
        raise click.ClickException(str(e))
    click.echo("b,reps,ratio,alt")
    click.echo(f"{b},{reps},{experiments.fmt(res.ratio)},{experiments.fmt(res.alt)}")


@cli.command()
@click.argument("instance", type=click.Path(exists=True, dir_okay=False))
@click.argument("population", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def heatmap(instance, population, out):
    """Per-patient count of distinct rooms used across the population."""
    inst = _load(instance)
    experiments.heatmap_export(instances.read_population(population, inst), out)


@cli.command()
@click.argument("instance", type=click.Path(exists=True, dir_okay=False))
@click.option("--runs", type=int, default=10, show_default=True)
@click.option("--variants", default=",".join(VARIANTS), show_default=True)
@click.option("--mu", type=int, default=50, show_default=True)
@click.option("--alpha", type=float, default=0.02, show_default=True)
@click.option("--evals", type=int, default=1_000_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--out-dir", type=click.Path(file_okay=False))
def compare(instance, runs, variants, mu, alpha, evals, seed, workers, out_dir):
    """Run every operator variant RUNS times and print a CSV report."""
    inst = _load(instance)
    names = [v.strip() for v in variants.split(",") if v.strip()]
    bad = [v for v in names if v not in VARIANTS]
    if bad:
        raise click.BadParameter(f"unknown variants {bad}", param_hint="--variants")
    report, _ = experiments.compare_operators(inst, names, runs, evals, mu=mu, alpha=alpha,
                                              base_seed=seed, out_dir=out_dir, workers=workers)
    click.echo(report, nl=False)


def main():
    cli()


if __name__ == "__main__":
    main()
