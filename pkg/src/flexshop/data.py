"""Bundled benchmark instances.

- ``toy2x3``: 2 jobs x 3 machines with genuine machine flexibility.  This is
  a reconstruction of a small textbook-style example: only partial numeric
  data for it is public, so the missing durations were filled in consistently
  with the known per-operation mean durations (12.5/15 and 22.5/21.5/20).
- ``ft06``: the Fisher-Thompson 6x6 job shop (optimum 55), encoded as a
  degenerate flexible instance with one machine per operation.
- ``flex06``: ft06 with added flexibility -- every operation may also run on
  the next machine (index +1 mod 6) at the same duration.  Optimum 47,
  provable via the longest-job lower bound.
- ``la05``: a 10x5 reconstruction in the style of the Lawrence benchmarks,
  built from published summary statistics rather than the original data
  tables.  Its machine-load lower bound and best-known makespan are both 572.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .instance import Instance, parse_instance

BUNDLED = ("toy2x3", "ft06", "flex06", "la05")


def bundled_path(name: str) -> Path:
    """Filesystem path of a bundled instance file."""
    if name not in BUNDLED:
        raise KeyError(f"unknown bundled instance {name!r}; have {BUNDLED}")
    return Path(str(resources.files("flexshop").joinpath(f"instances/{name}.fjs")))


def load_bundled(name: str) -> Instance:
    return parse_instance(bundled_path(name).read_text(), name=name)
