"""Python front end for the placement planner core."""
import json

from ._core import (
    AlreadyPlacedError,
    InvalidInputError,
    NotFoundError,
    PlaceplanError,
    decode_grid,
    default_config,
    kde,
    simulate,
    sweep,
)
from ._core import Planner as _NativePlanner

__all__ = [
    "AlreadyPlacedError",
    "InvalidInputError",
    "NotFoundError",
    "PlaceplanError",
    "Planner",
    "decode_grid",
    "default_config",
    "kde",
    "load_scenario",
    "simulate",
    "sweep",
]


def _text(doc):
    return doc if isinstance(doc, str) else json.dumps(doc)


def load_scenario(path):
    with open(path, encoding="utf-8") as f:
        return f.read()


class Planner:
    """Plans placements; documents may be JSON strings or dicts."""

    def __init__(self, config=None, store_dir=None):
        self._native = _NativePlanner(None if config is None else _text(config), store_dir)

    @property
    def config(self):
        return json.loads(self._native.config())

    def plan(self, scenario, task=None, seed=None):
        return json.loads(self._native.plan(_text(scenario), task, seed))

    def select(self, run_id, rank=1):
        return json.loads(self._native.select(run_id, rank))

    def density(self, run_id, format="binary"):
        return self._native.density(run_id, format)

    def record(self, run_id):
        return json.loads(self._native.record(run_id))

    def bench(self, suite_dir, repetitions=None, with_timing=True):
        reps = self.config["repetitions"] if repetitions is None else repetitions
        return json.loads(self._native.bench(str(suite_dir), reps, with_timing))
