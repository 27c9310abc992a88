"""Asymptotic regularity: step distances, empirical rates and transfer checks.

A sequence ``(z_n)`` is asymptotically regular if ``d(z_n, z_{n+1}) -> 0``.
A map ``phi`` from ``eps > 0`` to indices is a rate of asymptotic regularity
if ``d(z_n, z_{n+1}) < eps`` for every ``n >= phi(eps)``.

All checks here look at a finite horizon only. A passing report witnesses the
property on the observed indices; it proves nothing beyond them.

Index conventions: step arrays carry an absolute ``start`` index, so that
``steps[k]`` is ``d(z_{start+k}, z_{start+k+1})``. Both sequences of a coupled
run are compared from ``n = 1`` on, where ``x_n = T y_n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import geometry as geo
from .errors import ParameterError
from .iterate import default_tolerance

DEFAULT_EPSILONS = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6)


@dataclass(frozen=True)
class EpsilonGrid:
    """Strictly decreasing positive tolerances ``eps``."""

    values: tuple = DEFAULT_EPSILONS

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise ParameterError("epsilon grid is empty")
        if any(not (v > 0 and math.isfinite(v)) for v in vals):
            raise ParameterError("epsilon values must be positive and finite")
        if any(a <= b for a, b in zip(vals, vals[1:])):
            raise ParameterError("epsilon values must be strictly decreasing")
        object.__setattr__(self, "values", vals)

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)


# ---------------------------------------------------------------------------
# rate functions


@dataclass(frozen=True)
class RateTable:
    """A rate given by finitely many ``(eps, N)`` pairs.

    For an ``eps`` between tabulated values the entry of the largest
    tabulated ``eps' <= eps`` is used (valid because ``d < eps' <= eps``);
    below the smallest tabulated value the rate is undefined (None).
    """

    entries: tuple

    def __post_init__(self):
        rows = sorted(((float(e), int(n)) for e, n in self.entries), key=lambda r: -r[0])
        if not rows:
            raise ParameterError("rate table is empty")
        for e, n in rows:
            if not e > 0 or n < 0:
                raise ParameterError(f"bad rate table entry ({e}, {n})")
        for (e1, n1), (e2, n2) in zip(rows, rows[1:]):
            if e1 == e2:
                raise ParameterError(f"duplicate epsilon {e1} in rate table")
            if n2 < n1:
                raise ParameterError(f"rate table is not monotone: phi({e2}) = {n2} < phi({e1}) = {n1}")
        object.__setattr__(self, "entries", tuple(rows))

    def __call__(self, eps):
        for e, n in self.entries:
            if e <= eps:
                return n
        return None

    def as_dict(self):
        return {"kind": "table", "entries": [list(r) for r in self.entries]}


def _phi_constant(eps, n):
    return int(n)


def _phi_power(eps, c, k):
    # ceil(c / eps^k)
    return max(0, math.ceil(c * eps ** (-k)))


def _phi_log(eps, c):
    return max(0, math.ceil(c * math.log(1.0 / eps)))


RATE_FAMILIES = {
    "constant": (_phi_constant, ("n",)),
    "power": (_phi_power, ("c", "k")),
    "log": (_phi_log, ("c",)),
}


@dataclass(frozen=True)
class ClosedFormRate:
    """A named parametric rate.

    Families: ``constant(n)``, ``power(c, k) = ceil(c / eps^k)`` and
    ``log(c) = ceil(c * ln(1/eps))``; all parameters nonnegative.
    """

    family: str
    params: tuple

    def __post_init__(self):
        if self.family not in RATE_FAMILIES:
            raise ParameterError(f"unknown rate family {self.family!r}; known: {sorted(RATE_FAMILIES)}")
        params = dict(self.params)
        names = RATE_FAMILIES[self.family][1]
        if set(params) != set(names):
            raise ParameterError(f"rate family {self.family!r} takes parameters {names}")
        if any(not (float(v) >= 0) for v in params.values()):
            raise ParameterError("rate parameters must be nonnegative")
        object.__setattr__(self, "params", tuple(sorted((k, float(v)) for k, v in params.items())))

    @classmethod
    def of(cls, family, **params):
        return cls(family, tuple(params.items()))

    def __call__(self, eps):
        fn = RATE_FAMILIES[self.family][0]
        return fn(eps, **dict(self.params))

    def as_dict(self):
        return {"kind": "closed_form", "family": self.family, "params": dict(self.params)}


def tabulate_rate(phi, grid):
    """Freeze any rate into a :class:`RateTable` on ``grid``."""
    return RateTable(tuple((e, phi(e)) for e in grid))


# ---------------------------------------------------------------------------
# step distances and empirical rates


def step_distances(points, space):
    """Consecutive distances ``d(z_n, z_{n+1})`` of a sequence of points."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or len(pts) < 2:
        raise ParameterError("step distances need at least two points")
    return geo.distances(space, pts[:-1], pts[1:])


def empirical_rate(steps, epsilon, start=0):
    """Smallest index from which every observed step is below ``epsilon``.

    ``steps[k]`` is taken to be the step at index ``start + k``. Returns None
    (not attained) if the last observed step is ``>= epsilon``. Ties count as
    violations. The result is a witness over the observed horizon, not a
    certified rate.
    """
    if not epsilon > 0:
        raise ParameterError("epsilon must be positive")
    steps = np.asarray(steps, dtype=np.float64)
    bad = np.flatnonzero(~(steps < epsilon))
    if len(bad) == 0:
        return start
    last = int(bad[-1])
    if last == len(steps) - 1:
        return None
    return start + last + 1


@dataclass(frozen=True)
class RateEntry:
    epsilon: float
    phi: Optional[int]
    status: str
    first_violation: Optional[int] = None

    def as_dict(self):
        return {"epsilon": self.epsilon, "phi": self.phi, "status": self.status,
                "first_violation": self.first_violation}


@dataclass(frozen=True)
class RateReport:
    """Per-epsilon outcome of :func:`check_rate`; ``horizon`` is one past the last observed index."""

    entries: tuple
    horizon: int

    @property
    def passed(self):
        return all(e.status != "fail" for e in self.entries)

    def as_dict(self):
        return {"passed": self.passed, "horizon": self.horizon,
                "entries": [e.as_dict() for e in self.entries]}


def check_rate(steps, phi, grid=None, start=0, tol=0.0):
    """Test a candidate rate ``phi`` against observed steps.

    For each ``eps`` of ``grid``: ``pass`` if every observed step at index
    ``>= phi(eps)`` is ``< eps`` (after subtracting ``tol``), ``fail`` with
    the first offending index otherwise, ``unchecked`` if ``phi(eps)`` is
    undefined or beyond the horizon.
    """
    grid = EpsilonGrid() if grid is None else grid
    steps = np.asarray(steps, dtype=np.float64)
    horizon = start + len(steps)
    entries = []
    for eps in grid:
        n = phi(eps)
        if n is None or n >= horizon:
            entries.append(RateEntry(eps, n, "unchecked"))
            continue
        k0 = max(0, n - start)
        bad = np.flatnonzero(~(steps[k0:] - tol < eps))
        if len(bad):
            entries.append(RateEntry(eps, n, "fail", start + k0 + int(bad[0])))
        else:
            entries.append(RateEntry(eps, n, "pass"))
    return RateReport(tuple(entries), horizon)


# ---------------------------------------------------------------------------
# transfer from (y_n) to (x_n)


@dataclass(frozen=True)
class TransferEntry:
    epsilon: float
    rate_x: Optional[int]
    rate_y: Optional[int]
    ok: bool

    def as_dict(self):
        return {"epsilon": self.epsilon, "rate_x": self.rate_x, "rate_y": self.rate_y, "ok": self.ok}


@dataclass(frozen=True)
class TransferReport:
    """Outcome of :func:`check_rate_transfer`.

    ``max_excess`` is ``max_n d(x_n,x_{n+1}) - d(y_n,y_{n+1})`` over
    ``n >= 1`` (at ``worst_index``); ``entries`` compares empirical rates.
    """

    max_excess: float
    worst_index: Optional[int]
    violations: int
    entries: tuple
    tol: float
    horizon: int

    @property
    def pointwise_passed(self):
        return self.violations == 0

    @property
    def rates_passed(self):
        return all(e.ok for e in self.entries)

    @property
    def passed(self):
        return self.pointwise_passed and self.rates_passed

    def as_dict(self):
        return {"passed": self.passed, "max_excess": self.max_excess, "worst_index": self.worst_index,
                "violations": self.violations, "tol": self.tol, "horizon": self.horizon,
                "entries": [e.as_dict() for e in self.entries]}


def check_rate_transfer(traj, grid=None, tol=None):
    """Check that ``(x_n)`` inherits the asymptotic regularity of ``(y_n)``.

    Verifies (a) ``d(x_n, x_{n+1}) <= d(y_n, y_{n+1}) + tol`` for
    ``n = 1 .. N-1`` and (b) for each ``eps`` with an attained empirical rate
    for ``y``, the empirical rate of ``x`` (steps from ``n = 1``, reduced by
    ``tol``) is not larger.
    """
    if traj.horizon < 3:
        raise ParameterError("rate transfer needs a horizon of at least 3")
    grid = EpsilonGrid() if grid is None else grid
    tol = default_tolerance(traj.space) if tol is None else float(tol)
    xs_steps = np.asarray(traj.x_steps[1:])
    ys_steps = np.asarray(traj.y_steps)
    excess = xs_steps - ys_steps
    worst = int(np.argmax(excess))
    violations = int(np.count_nonzero(excess > tol))
    entries = []
    for eps in grid:
        ry = empirical_rate(ys_steps, eps, start=1)
        rx = empirical_rate(xs_steps - tol, eps, start=1)
        ok = ry is None or (rx is not None and rx <= ry)
        entries.append(TransferEntry(eps, rx, ry, ok))
    return TransferReport(float(excess[worst]), worst + 1, violations, tuple(entries), tol, traj.horizon)


# ---------------------------------------------------------------------------
# domination d(x_m, x_n) <= d(y_m, y_n) and d(x_n, p) <= d(y_n, p)


@dataclass(frozen=True)
class DominationReport:
    """Outcome of :func:`check_domination`.

    Excesses are ``d(x..) - d(y..)``; negative values mean slack.
    """

    pairs_checked: int
    pair_max_excess: float
    worst_pair: Optional[tuple]
    pair_violations: int
    fixed_point_max_excess: Optional[float]
    fixed_point_worst_index: Optional[int]
    fixed_point_violations: int
    tol: float

    @property
    def passed(self):
        return self.pair_violations == 0 and self.fixed_point_violations == 0

    def as_dict(self):
        return {
            "passed": self.passed, "tol": self.tol,
            "pairs_checked": self.pairs_checked, "pair_max_excess": self.pair_max_excess,
            "worst_pair": None if self.worst_pair is None else list(self.worst_pair),
            "pair_violations": self.pair_violations,
            "fixed_point_max_excess": self.fixed_point_max_excess,
            "fixed_point_worst_index": self.fixed_point_worst_index,
            "fixed_point_violations": self.fixed_point_violations,
        }


def sample_index_pairs(horizon, count, seed=0):
    """``count`` uniformly random pairs ``(m, n)`` with ``1 <= m, n <= horizon``."""
    rng = np.random.default_rng(seed)
    return rng.integers(1, horizon + 1, size=(int(count), 2))


def check_domination(traj, witness=None, pairs=1000, seed=0, tol=None):
    """Compare pair distances of ``(x_n)`` and ``(y_n)`` for indices ``>= 1``.

    Parameters
    ----------
    traj : CoupledTrajectory
    witness : FixedPointWitness, optional
        If given, ``d(x_n, p) <= d(y_n, p) + tol`` is checked for all ``n >= 1``.
    pairs : int or sequence of (m, n)
        Explicit index pairs, or the number of random pairs to draw with ``seed``.
    tol : float, optional
        Defaults to :func:`~altiter.iterate.default_tolerance`.

    Raises
    ------
    ParameterError
        If a pair contains index 0 or an index beyond the horizon.
    """
    space = traj.space
    tol = default_tolerance(space) if tol is None else float(tol)
    N = traj.horizon
    if isinstance(pairs, (int, np.integer)):
        idx = sample_index_pairs(N, pairs, seed)
    else:
        idx = np.asarray(list(pairs), dtype=np.int64).reshape(-1, 2)
    if len(idx) and (idx.min() < 1 or idx.max() > N):
        raise ParameterError(f"index pairs must lie in 1..{N}; the inequalities are stated for m, n >= 1")

    if len(idx):
        m, n = idx[:, 0], idx[:, 1]
        dx = geo.distances(space, traj.xs[m], traj.xs[n])
        dy = geo.distances(space, traj.ys[m - 1], traj.ys[n - 1])
        excess = dx - dy
        w = int(np.argmax(excess))
        pair_max, worst_pair = float(excess[w]), (int(m[w]), int(n[w]))
        pair_viol = int(np.count_nonzero(excess > tol))
    else:
        pair_max, worst_pair, pair_viol = 0.0, None, 0

    fp_max = fp_idx = None
    fp_viol = 0
    if witness is not None:
        p = geo.check_point(space, witness.point, "fixed point")
        ex = (distance_to_fixed_point_series(traj.xs[1:], space, p)
              - distance_to_fixed_point_series(traj.ys, space, p))
        w = int(np.argmax(ex))
        fp_max, fp_idx = float(ex[w]), w + 1
        fp_viol = int(np.count_nonzero(ex > tol))
    return DominationReport(len(idx), pair_max, worst_pair, pair_viol, fp_max, fp_idx, fp_viol, tol)


def distance_to_fixed_point_series(points, space, p):
    """``d(z_n, p)`` for every point of a sequence."""
    pts = np.asarray(points, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    return geo.distances(space, pts, np.broadcast_to(p, pts.shape))


# ---------------------------------------------------------------------------
# strong convergence transfer at finite horizon


@dataclass(frozen=True)
class ConvergenceReport:
    """Whether ``(x_n)`` settles below ``delta`` whenever ``(y_n)`` does.

    ``x_settle``/``y_settle`` are the first indices ``>= 1`` from which
    ``d(., p) < delta`` on the whole observed horizon (None if never).
    """

    delta: float
    x_settle: Optional[int]
    y_settle: Optional[int]
    final_x: float
    final_y: float
    tol: float

    @property
    def passed(self):
        return self.y_settle is None or (self.x_settle is not None and self.x_settle <= self.y_settle)

    def as_dict(self):
        return {"passed": self.passed, "delta": self.delta, "x_settle": self.x_settle,
                "y_settle": self.y_settle, "final_x": self.final_x, "final_y": self.final_y,
                "tol": self.tol}


def check_convergence_transfer(traj, p, delta, tol=None):
    """Finite-horizon form of: if ``y_n -> p`` then ``x_n -> p``."""
    if not delta > 0:
        raise ParameterError("delta must be positive")
    space = traj.space
    tol = default_tolerance(space) if tol is None else float(tol)
    p = geo.check_point(space, p, "limit point")
    dx = distance_to_fixed_point_series(traj.xs[1:], space, p)
    dy = distance_to_fixed_point_series(traj.ys, space, p)
    return ConvergenceReport(
        float(delta),
        empirical_rate(dx - tol, delta, start=1),
        empirical_rate(dy, delta, start=1),
        float(dx[-1]),
        float(dy[-1]),
        tol,
    )
