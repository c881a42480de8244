"""Command-line harness: solve instances, run solver benchmarks, validate
schedule files, render Gantt charts.

Exit codes: 0 ok, 1 solver or validation failure, 2 usage error.
"""

from __future__ import annotations

import csv
import io
import sys
import time
from pathlib import Path

import click

from .baselines import NodeBudgetExceeded
from .instance import Instance, InstanceError, load_instance, parse_instance
from .schedule import (
    parse_schedule,
    render_gantt,
    schedule_to_json,
    validate_schedule,
    write_schedule,
)
from .solvers import SOLVERS, make_solver

SOLVER_ORDER = ["rl", "rl-plain", "rl-divided", "rs", "fifo", "mwkr", "ga", "oracle"]


def _read_config(path: str | None) -> dict:
    """Key-value defaults file: one `key = value` per line, '#' comments."""
    if path is None:
        return {}
    values = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise click.UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def _coerce(value, like):
    if isinstance(like, bool):
        return value in ("1", "true", "yes", "on", True)
    if like is None or isinstance(like, float):
        return float(value)
    if isinstance(like, int):
        return int(value)
    return value


def _solver_overrides(cfg_file: dict, **flags) -> dict:
    """Config-file values overridden by explicit command-line flags."""
    merged = dict(flags)
    for key, value in cfg_file.items():
        if key in merged and merged[key] is None:
            merged[key] = _coerce(value, _FLAG_TYPES.get(key))
    return merged


_FLAG_TYPES = {
    "episodes": 0, "alpha": 0.0, "epsilon_start": 0.0, "epsilon_min": 0.0,
    "epsilon_decay": 0.0, "seed": 0, "prepopulate": True,
    "include_immediate_reward": True, "parts": 0, "time_budget": 0.0,
    "population": 0, "generations": 0, "node_budget": 0,
}


def _load(path: str) -> Instance:
    if path == "-":
        return parse_instance(sys.stdin.read(), name="stdin")
    try:
        return load_instance(path)
    except OSError as exc:
        raise click.ClickException(f"cannot read instance {path}: {exc}")
    except InstanceError as exc:
        raise click.ClickException(f"{path}: {exc}")


def _run_cell(inst: Instance, solver_name: str, overrides: dict):
    """Fit one solver on one instance; returns (schedule, cpu_seconds)."""
    solver = make_solver(solver_name, **overrides)
    cpu0 = time.process_time()
    solver.fit(inst)
    return solver.best_schedule_, time.process_time() - cpu0


solver_option = click.option(
    "--solver", "solvers", multiple=True, required=True,
    type=click.Choice(SOLVER_ORDER), help="Solver(s) to run."
)
instance_option = click.option(
    "--instance", "instances", multiple=True, required=True,
    help="Instance file path ('-' for stdin)."
)


def common_solver_flags(f):
    for deco in reversed([
        click.option("--seed", type=int, default=None),
        click.option("--episodes", type=int, default=None),
        click.option("--alpha", type=float, default=None),
        click.option("--epsilon-start", type=float, default=None),
        click.option("--epsilon-min", type=float, default=None),
        click.option("--epsilon-decay", type=float, default=None),
        click.option("--prepopulate/--no-prepopulate", default=None),
        click.option("--include-immediate-reward", is_flag=True, default=None),
        click.option("--divide", "parts", type=int, default=None,
                     help="Sub-instance count for rl-divided."),
        click.option("--divide-strategy", "strategy",
                     type=click.Choice(["ops", "duration"]), default=None),
        click.option("--budget-seconds", "time_budget", type=float, default=None),
        click.option("--population", type=int, default=None),
        click.option("--generations", type=int, default=None),
        click.option("--node-budget", type=int, default=None),
        click.option("--config", "config_path", type=click.Path(exists=True),
                     default=None, help="Key-value defaults file."),
    ]):
        f = deco(f)
    return f


@click.group()
def main():
    """Flexible job-shop scheduling toolkit."""


@main.command()
@instance_option
@solver_option
@common_solver_flags
@click.option("--out", type=click.Path(), default=".", help="Output directory.")
@click.option("--gantt", is_flag=True, help="Also write an SVG Gantt chart.")
@click.option("--json", "json_out", is_flag=True, help="Also write JSON export.")
def solve(instances, solvers, out, gantt, json_out, config_path, **flags):
    """Run solvers on instances and write schedule files."""
    overrides = _solver_overrides(_read_config(config_path), **flags)
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    failed = False
    for path in instances:
        inst = _load(path)
        for name in solvers:
            stem = f"{inst.name}__{name}"
            try:
                schedule, cpu = _run_cell(inst, name, overrides)
            except NodeBudgetExceeded as exc:
                click.echo(f"{stem}: budget exceeded: {exc}", err=True)
                failed = True
                continue
            violations = validate_schedule(inst, schedule)
            if violations:
                click.echo(f"{stem}: INVALID schedule: {violations}", err=True)
                failed = True
                continue
            (out_dir / f"{stem}.sched").write_text(write_schedule(schedule))
            if gantt:
                (out_dir / f"{stem}.svg").write_text(
                    render_gantt(schedule, inst.machine_count, title=stem)
                )
            if json_out:
                (out_dir / f"{stem}.json").write_text(
                    schedule_to_json(schedule, inst.name)
                )
            log = (
                f"instance {inst.name}\nsolver {name}\n"
                f"seed {overrides.get('seed')}\n"
                f"makespan {schedule.makespan}\ncpu_seconds {cpu:.3f}\n"
            )
            (out_dir / f"{stem}.log").write_text(log)
            click.echo(f"{stem}: makespan {schedule.makespan}")
    sys.exit(1 if failed else 0)


@main.command()
@instance_option
@solver_option
@common_solver_flags
@click.option("--out", type=click.Path(), default=None,
              help="Directory for table.txt / table.csv.")
def bench(instances, solvers, out, config_path, **flags):
    """Comparison table of makespan and CPU seconds per solver."""
    overrides = _solver_overrides(_read_config(config_path), **flags)
    solvers = [s for s in SOLVER_ORDER if s in solvers]
    rows = []
    for path in instances:
        inst = _load(path)
        size = f"{inst.job_count}x{inst.machine_count}"
        cells = {}
        for name in solvers:
            try:
                schedule, cpu = _run_cell(inst, name, overrides)
                if validate_schedule(inst, schedule):
                    cells[name] = (None, None)
                else:
                    cells[name] = (schedule.makespan, cpu)
            except NodeBudgetExceeded:
                cells[name] = (None, None)
        rows.append((inst.name, size, cells))

    text = io.StringIO()
    header = ["instance", "size"]
    for name in solvers:
        header += [name, f"{name}:cpu"]
    widths = [max(10, len(h)) for h in header]
    text.write("  ".join(h.ljust(w) for h, w in zip(header, widths)) + "\n")
    for name_, size, cells in rows:
        fields = [name_, size]
        for s in solvers:
            ms, cpu = cells[s]
            fields.append("NA" if ms is None else str(ms))
            fields.append("NA" if cpu is None else str(round(cpu)))
        text.write(
            "  ".join(f.ljust(w) for f, w in zip(fields, widths)) + "\n"
        )
    table = text.getvalue()
    click.echo(table, nl=False)

    if out is not None:
        out_dir = Path(out)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "table.txt").write_text(table)
        with (out_dir / "table.csv").open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for name_, size, cells in rows:
                row = [name_, size]
                for s in solvers:
                    ms, cpu = cells[s]
                    row += ["NA" if ms is None else ms,
                            "NA" if cpu is None else repr(cpu)]
                writer.writerow(row)
    failed = any(ms is None for _, _, cells in rows for ms, _ in cells.values())
    sys.exit(1 if failed else 0)


@main.command()
@click.argument("instance_path")
@click.argument("schedule_path")
def validate(instance_path, schedule_path):
    """Validate a schedule file against an instance file."""
    inst = _load(instance_path)
    try:
        schedule = parse_schedule(Path(schedule_path).read_text())
    except (OSError, ValueError) as exc:
        raise click.ClickException(f"{schedule_path}: {exc}")
    violations = validate_schedule(inst, schedule)
    if not violations:
        click.echo(f"ok: makespan {schedule.makespan}")
        sys.exit(0)
    for v in violations:
        click.echo(f"{v.kind}: {v.message}")
    sys.exit(1)


if __name__ == "__main__":
    main()
