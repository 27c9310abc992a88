"""Run configured experiments and persist their results.

``run_experiment`` performs one coupled run and every enabled check.
Results serialize to JSON (shortest round-trip float rendering, so every
64-bit value is reproduced exactly) and the trajectory to CSV.

The wall-clock duration is kept on the in-memory result only; leaving it out
of the JSON keeps repeated runs byte-identical.
"""

from __future__ import annotations

import csv
import json
import logging
import time
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import geometry as geo
from . import maps as mp
from . import rates
from .errors import AltIterError
from .iterate import Constant, CoupledTrajectory, iterate_coupled, verify_coupling

log = logging.getLogger(__name__)


class RunError(AltIterError, RuntimeError):
    """An engine error raised while running a configured experiment."""


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


@dataclass(eq=True)
class ExperimentResult:
    """Outcome of :func:`run_experiment`.

    ``verdict`` is True iff every enabled check passed. ``trajectory`` and
    ``duration`` are not serialized and do not take part in equality.
    """

    config: dict
    summary: dict
    checks: dict
    verdict: bool
    duration: Optional[float] = field(default=None, compare=False)
    trajectory: Optional[CoupledTrajectory] = field(default=None, compare=False, repr=False)

    def as_dict(self):
        return {"config": self.config, "summary": self.summary, "checks": self.checks,
                "verdict": "pass" if self.verdict else "fail"}


def _witness(config):
    w = mp.fixed_point_oracle(config.iteration.mapping)
    if w is None or geo.validate_point(config.iteration.space, w.point) is not None:
        return None
    return w


def run_experiment(config):
    """Run the coupled iteration and all enabled checks.

    Deterministic given the configuration (including its seed).

    Raises
    ------
    RunError
        If the engine fails, e.g. because an iterate leaves the domain.
    """
    it = config.iteration
    space = it.space
    if config.checks["convergence"] and isinstance(it.schedule, Constant) and it.schedule.c > 0:
        warnings.warn(
            f"convergence check with constant lambda = {it.schedule.c}: the anchored "
            "iteration need not approach a fixed point",
            stacklevel=2,
        )
    t0 = time.perf_counter()
    try:
        traj = iterate_coupled(it)
    except AltIterError as exc:
        raise RunError(f"run over {space} with {it.mapping.kind} / {it.schedule}: {exc}") from exc

    witness = _witness(config)
    tol = config.tolerance
    checks = {}
    if config.checks["coupling"]:
        checks["coupling"] = verify_coupling(traj, tol).as_dict()
    if config.checks["domination"]:
        checks["domination"] = rates.check_domination(
            traj, witness, config.domination_pairs, config.seed, tol).as_dict()
    if config.checks["rate_transfer"]:
        checks["rate_transfer"] = rates.check_rate_transfer(traj, config.epsilon_grid, tol).as_dict()
    if config.checks["nonexpansive"]:
        checks["nonexpansive"] = mp.check_nonexpansive(
            it.mapping, space, config.nonexpansive_samples, config.seed,
            config.tolerances["nonexpansive"]).as_dict()
    if config.checks["convergence"] and witness is not None:
        checks["convergence"] = rates.check_convergence_transfer(
            traj, witness.point, config.delta, tol).as_dict()

    summary = {
        "horizon": traj.horizon,
        "final_x": traj.xs[-1],
        "final_y": traj.ys[-1],
        "final_x_step": traj.x_steps[-1],
        "final_y_step": traj.y_steps[-1] if len(traj.y_steps) else None,
        "fixed_point": None if witness is None else witness.point,
    }
    if witness is not None:
        summary["final_x_distance_to_p"] = geo.distance(space, traj.xs[-1], witness.point)
        summary["final_y_distance_to_p"] = geo.distance(space, traj.ys[-1], witness.point)
    checks = _plain(checks)
    verdict = all(c["passed"] for c in checks.values())
    duration = time.perf_counter() - t0
    log.info("run finished in %.3fs, verdict %s", duration, "pass" if verdict else "fail")
    return ExperimentResult(_plain(config.document), _plain(summary), checks, verdict, duration, traj)


# ---------------------------------------------------------------------------
# persistence


def dumps_result(result):
    return json.dumps(result.as_dict(), indent=2) + "\n"


def loads_result(text):
    d = json.loads(text)
    return ExperimentResult(d["config"], d["summary"], d["checks"], d["verdict"] == "pass")


def emit_json(result, path):
    """Write ``result`` as JSON. Parent directories are not created."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_result(result))
    return path


def load_result(path):
    with open(path, encoding="utf-8") as fh:
        return loads_result(fh.read())


def csv_header(dimension, with_fixed_point):
    cols = ["n"] + [f"x[{i}]" for i in range(dimension)] + [f"y[{i}]" for i in range(dimension)]
    cols += ["x_step", "y_step"]
    if with_fixed_point:
        cols += ["x_dist_p", "y_dist_p"]
    return cols


def _cell(v):
    return repr(float(v))


def emit_csv(result, path):
    """Write the trajectory series of ``result`` as CSV.

    One row per ``n = 0 .. N``: the coordinates of ``x_n`` and ``y_n``,
    ``d(x_n, x_{n+1})``, ``d(y_n, y_{n+1})`` and, when the map has a known
    fixed point ``p``, ``d(x_n, p)`` and ``d(y_n, p)``. Cells without a value
    (``y_0``, steps past the horizon) are empty.
    """
    traj = result.trajectory
    if traj is None:
        raise ValueError("result carries no trajectory (results loaded from JSON cannot be re-exported)")
    space = traj.space
    fp = result.summary.get("fixed_point")
    N, d = traj.horizon, space.dimension
    if fp is not None:
        dxp = rates.distance_to_fixed_point_series(traj.xs, space, fp)
        dyp = rates.distance_to_fixed_point_series(traj.ys, space, fp)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(csv_header(d, fp is not None))
        for n in range(N + 1):
            row = [n] + [_cell(v) for v in traj.xs[n]]
            row += [_cell(v) for v in traj.ys[n - 1]] if n >= 1 else [""] * d
            row.append(_cell(traj.x_steps[n]) if n < N else "")
            row.append(_cell(traj.y_steps[n - 1]) if 1 <= n < N else "")
            if fp is not None:
                row.append(_cell(dxp[n]))
                row.append(_cell(dyp[n - 1]) if n >= 1 else "")
            w.writerow(row)
    return path
