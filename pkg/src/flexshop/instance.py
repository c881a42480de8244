"""Flexible job-shop instance model and the standard text format.

The text format is the usual flexible job-shop convention: a header line
``<jobs> <machines> [<avg machines per op>]`` followed by one line per job,

    <#ops> { <#alternatives> { <machine> <duration> }^#alternatives }^#ops

Machine ids are 1-based in files and 0-based internally.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path


class InstanceError(ValueError):
    """Raised for malformed instance text or inconsistent instance data."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class OperationSpec:
    """One operation: the machines able to run it and their durations."""

    alternatives: dict[int, int]

    def __post_init__(self):
        if not self.alternatives:
            raise InstanceError("operation has no machine alternatives")
        for machine, duration in self.alternatives.items():
            if machine < 0:
                raise InstanceError(f"negative machine id {machine}")
            if duration < 1:
                raise InstanceError(
                    f"duration {duration} on machine {machine} must be >= 1"
                )

    def machines(self) -> list[int]:
        return sorted(self.alternatives)

    def min_duration(self) -> int:
        return min(self.alternatives.values())

    def mean_duration(self) -> Fraction:
        values = list(self.alternatives.values())
        return Fraction(sum(values), len(values))

    def max_duration(self) -> int:
        return max(self.alternatives.values())


@dataclass(frozen=True)
class JobSpec:
    """An ordered chain of operations; list order is the precedence order.

    Jobs parsed from files always have at least one operation.  Zero-operation
    jobs are permitted in memory so that instance division can keep job ids
    stable across sub-instances.
    """

    operations: tuple[OperationSpec, ...]

    def __len__(self) -> int:
        return len(self.operations)


@dataclass(frozen=True)
class Instance:
    machine_count: int
    jobs: tuple[JobSpec, ...]
    name: str = "instance"

    def __post_init__(self):
        if self.machine_count < 1:
            raise InstanceError("machine_count must be >= 1")
        if not self.jobs:
            raise InstanceError("instance has no jobs")
        for j, job in enumerate(self.jobs):
            for o, op in enumerate(job.operations):
                for machine in op.alternatives:
                    if machine >= self.machine_count:
                        raise InstanceError(
                            f"job {j} op {o}: machine {machine} out of range "
                            f"(machine_count={self.machine_count})"
                        )

    @property
    def job_count(self) -> int:
        return len(self.jobs)

    @property
    def total_operations(self) -> int:
        return sum(len(job) for job in self.jobs)

    def operation(self, job: int, op: int) -> OperationSpec:
        return self.jobs[job].operations[op]


def _ints(line: str, lineno: int) -> list[int]:
    out = []
    for token in line.split():
        try:
            out.append(int(token))
        except ValueError:
            raise InstanceError(f"non-integer token {token!r}", lineno) from None
    return out


def parse_instance(text: str, name: str = "instance") -> Instance:
    """Parse instance text into an :class:`Instance`.

    Raises :class:`InstanceError` (with the offending line number) on any
    malformed input; never raises anything else for arbitrary text.
    """
    lines = text.splitlines()
    numbered = [(i + 1, ln) for i, ln in enumerate(lines) if ln.strip()]
    if not numbered:
        raise InstanceError("empty instance file")

    lineno, header = numbered[0]
    head = _ints(header, lineno)
    if len(head) not in (2, 3):
        raise InstanceError(
            f"header must hold 2 or 3 integers, got {len(head)}", lineno
        )
    job_count, machine_count = head[0], head[1]  # optional third int ignored
    if job_count < 1 or machine_count < 1:
        raise InstanceError("job and machine counts must be >= 1", lineno)
    if len(numbered) - 1 > job_count:
        extra_lineno = numbered[job_count + 1][0]
        raise InstanceError(
            f"expected {job_count} job lines, found more", extra_lineno
        )
    if len(numbered) - 1 < job_count:
        raise InstanceError(
            f"expected {job_count} job lines, found {len(numbered) - 1}"
        )

    jobs = []
    for lineno, line in numbered[1:]:
        tokens = _ints(line, lineno)
        pos = 0

        def take(what: str) -> int:
            nonlocal pos
            if pos >= len(tokens):
                raise InstanceError(f"unexpected end of line reading {what}", lineno)
            value = tokens[pos]
            pos += 1
            return value

        op_count = take("operation count")
        if op_count < 1:
            raise InstanceError(f"job must have >= 1 operations, got {op_count}", lineno)
        ops = []
        for _ in range(op_count):
            alt_count = take("alternative count")
            if alt_count < 1:
                raise InstanceError(
                    f"operation must have >= 1 alternatives, got {alt_count}", lineno
                )
            alternatives: dict[int, int] = {}
            for _ in range(alt_count):
                machine = take("machine id")
                duration = take("duration")
                if not 1 <= machine <= machine_count:
                    raise InstanceError(
                        f"machine id {machine} out of range 1..{machine_count}", lineno
                    )
                if duration < 1:
                    raise InstanceError(f"duration {duration} must be >= 1", lineno)
                if machine - 1 in alternatives:
                    raise InstanceError(f"duplicate machine id {machine}", lineno)
                alternatives[machine - 1] = duration
            ops.append(OperationSpec(alternatives))
        if pos != len(tokens):
            raise InstanceError(
                f"{len(tokens) - pos} trailing tokens after last operation", lineno
            )
        jobs.append(JobSpec(tuple(ops)))

    return Instance(machine_count=machine_count, jobs=tuple(jobs), name=name)


def load_instance(path: str | Path) -> Instance:
    path = Path(path)
    return parse_instance(path.read_text(), name=path.stem)


def write_instance(inst: Instance) -> str:
    """Emit the text form (1-based machine ids); inverse of parse_instance."""
    out = [f"{inst.job_count} {inst.machine_count}"]
    for job in inst.jobs:
        fields = [len(job)]
        for op in job.operations:
            fields.append(len(op.alternatives))
            for machine in op.machines():
                fields.append(machine + 1)
                fields.append(op.alternatives[machine])
        out.append(" ".join(str(x) for x in fields))
    return "\n".join(out) + "\n"


def mean_durations(inst: Instance) -> list[list[Fraction]]:
    """Per-job list of per-operation mean duration over machine alternatives."""
    return [[op.mean_duration() for op in job.operations] for job in inst.jobs]
