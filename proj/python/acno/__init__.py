"""Tabular ACNO-MDP agents, environments and exact planner."""

import json

from ._acno import (
    AcnoMdp,
    DirichletModel,
    ExactPlanner,
    analytic_measuring_return,
    frozen_lake,
    generate_random_map,
    heuristic_failure_env,
    measuring_value_env,
    standard_map,
    verify,
)
from ._acno import _run

__all__ = [
    "AcnoMdp",
    "DirichletModel",
    "ExactPlanner",
    "analytic_measuring_return",
    "frozen_lake",
    "generate_random_map",
    "heuristic_failure_env",
    "measuring_value_env",
    "run",
    "standard_map",
    "verify",
]


def run(config):
    """Train per `config` (same keys as the CLI's JSON config).

    Returns a dict with the resolved config, the summary and per-episode records.
    """
    out = _run(json.dumps(config))
    out["config"] = json.loads(out["config"])
    return out
