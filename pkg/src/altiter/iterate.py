"""Alternative, Halpern and coupled iteration engines.

With anchor ``u``, start ``x0`` and coefficients ``lam_1, lam_2, ...``:

* alternative iteration: ``x[n+1] = T(lam[n+1] u + (1 - lam[n+1]) x[n])``, n >= 0;
* Halpern iteration:     ``y[n+1] = lam[n+1] u + (1 - lam[n+1]) T(y[n])``, n >= 1;
* coupling:              ``y[n+1] = lam[n+1] u + (1 - lam[n+1]) x[n]``, so that
  ``x[n] = T(y[n])`` for n >= 1 and ``(y[n])`` is a Halpern sequence.

Convex combinations are geodesic (see :func:`altiter.geometry.combine`).
Step ``n -> n+1`` always consumes ``lam[n+1]``; schedules are indexed from 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import geometry as geo
from .errors import DomainError, ParameterError, ScheduleExhausted
from .maps import ensure_compatible

#: default cap on stored trajectory length
HORIZON_CAP = 100_000


# ---------------------------------------------------------------------------
# lambda schedules


class LambdaSchedule:
    """A sequence ``lam_1, lam_2, ...`` in ``[0, 1]``."""

    #: number of available coefficients, None if unbounded
    length: Optional[int] = None

    def value(self, n):
        raise NotImplementedError

    def take(self, count):
        """Return ``lam_1 .. lam_count`` as an array."""
        count = int(count)
        if self.length is not None and count > self.length:
            raise ScheduleExhausted(
                f"schedule provides {self.length} coefficients, {count} requested"
            )
        return np.array([self.value(n) for n in range(1, count + 1)], dtype=np.float64)


def _unit_interval(value, what):
    v = float(value)
    if not 0.0 <= v <= 1.0:
        raise ParameterError(f"{what} must lie in [0, 1] (lambda bound), got {value!r}")
    return v


@dataclass(frozen=True)
class Harmonic(LambdaSchedule):
    """``lam_n = 1 / (n + 1)``."""

    def value(self, n):
        return 1.0 / (n + 1)

    def __str__(self):
        return "harmonic"

    def as_dict(self):
        return {"kind": "harmonic"}


@dataclass(frozen=True)
class Power(LambdaSchedule):
    """``lam_n = 1 / (n + 1) ** a`` for ``a > 0``."""

    a: float

    def __post_init__(self):
        a = float(self.a)
        if not a > 0 or not np.isfinite(a):
            raise ParameterError(f"power exponent must be positive, got {self.a!r}")
        object.__setattr__(self, "a", a)

    def value(self, n):
        return 1.0 / (n + 1) ** self.a

    def __str__(self):
        return f"power:{self.a!r}"

    def as_dict(self):
        return {"kind": "power", "a": self.a}


@dataclass(frozen=True)
class Constant(LambdaSchedule):
    """``lam_n = c`` for every ``n``."""

    c: float

    def __post_init__(self):
        object.__setattr__(self, "c", _unit_interval(self.c, "constant lambda"))

    def value(self, n):
        return self.c

    def __str__(self):
        return f"constant:{self.c!r}"

    def as_dict(self):
        return {"kind": "constant", "c": self.c}


@dataclass(frozen=True)
class Explicit(LambdaSchedule):
    """A finite list; ``values[0]`` is ``lam_1``."""

    values: tuple

    def __post_init__(self):
        vals = tuple(_unit_interval(v, f"explicit lambda #{i + 1}") for i, v in enumerate(self.values))
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "length", len(vals))

    def value(self, n):
        if not 1 <= n <= len(self.values):
            raise ScheduleExhausted(f"explicit schedule has no coefficient lambda_{n}")
        return self.values[n - 1]

    def __str__(self):
        return f"explicit[{len(self.values)}]"

    def as_dict(self):
        return {"kind": "explicit", "values": list(self.values)}


def parse_schedule(text):
    """Parse ``harmonic``, ``power:A``, ``constant:C`` or ``explicit:v1;v2;...``."""
    name, _, arg = text.strip().partition(":")
    name = name.lower()
    try:
        if name == "harmonic" and not arg:
            return Harmonic()
        if name == "power":
            return Power(float(arg))
        if name == "constant":
            return Constant(float(arg))
        if name == "explicit":
            return Explicit(tuple(float(v) for v in arg.split(";") if v))
    except ValueError as exc:
        if isinstance(exc, ParameterError):
            raise
        raise ParameterError(f"bad schedule parameter in {text!r}") from exc
    raise ParameterError(f"unknown schedule {text!r}")


# ---------------------------------------------------------------------------
# configuration and trajectories


@dataclass(frozen=True, eq=False)
class IterationConfig:
    """Everything that determines a run.

    ``anchor`` is ``u`` and ``start`` is ``x0``; both must be valid points of
    ``space``. ``horizon`` is the number of steps ``N``.
    """

    space: geo.Space
    mapping: object
    anchor: np.ndarray
    start: np.ndarray
    schedule: LambdaSchedule
    horizon: int
    horizon_cap: int = HORIZON_CAP

    def __post_init__(self):
        ensure_compatible(self.mapping, self.space)
        object.__setattr__(self, "anchor", _frozen(geo.check_point(self.space, self.anchor, "anchor u")))
        object.__setattr__(self, "start", _frozen(geo.check_point(self.space, self.start, "start x0")))
        n = self.horizon
        if int(n) != n or n < 1:
            raise ParameterError(f"horizon must be a positive integer, got {n!r}")
        object.__setattr__(self, "horizon", int(n))
        if self.horizon > self.horizon_cap:
            raise ParameterError(f"horizon {self.horizon} exceeds the cap {self.horizon_cap}")
        if self.schedule.length is not None and self.schedule.length < self.horizon:
            raise ScheduleExhausted(
                f"schedule provides {self.schedule.length} coefficients, horizon needs {self.horizon}"
            )


def _frozen(a):
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class CoupledTrajectory:
    """The paired sequences of a coupled run.

    Attributes
    ----------
    xs : ndarray, shape (N+1, d)
        ``x_0 .. x_N``.
    ys : ndarray, shape (N, d)
        ``y_1 .. y_N``; ``ys[n - 1]`` is ``y_n``.
    lambdas : ndarray, shape (N,)
        ``lam_1 .. lam_N``.
    x_steps : ndarray, shape (N,)
        ``d(x_n, x_{n+1})`` for ``n = 0 .. N-1``.
    y_steps : ndarray, shape (N-1,)
        ``d(y_n, y_{n+1})`` for ``n = 1 .. N-1``.
    config : IterationConfig
    """

    xs: np.ndarray
    ys: np.ndarray
    lambdas: np.ndarray
    x_steps: np.ndarray
    y_steps: np.ndarray
    config: IterationConfig

    @classmethod
    def from_arrays(cls, config, xs, ys):
        """Assemble a trajectory from externally produced sequences."""
        xs = np.array(xs, dtype=np.float64)
        ys = np.array(ys, dtype=np.float64)
        if xs.ndim != 2 or ys.ndim != 2 or len(ys) != len(xs) - 1:
            raise ParameterError("need x_0..x_N and y_1..y_N with matching dimensions")
        if len(ys) != config.horizon:
            raise ParameterError(f"trajectory length {len(ys)} does not match horizon {config.horizon}")
        space = config.space
        x_steps = geo.distances(space, xs[:-1], xs[1:])
        y_steps = geo.distances(space, ys[:-1], ys[1:])
        lambdas = config.schedule.take(config.horizon)
        return cls(*(_frozen(a) for a in (xs, ys, lambdas, x_steps, y_steps)), config)

    @property
    def horizon(self):
        return len(self.ys)

    @property
    def space(self):
        return self.config.space

    def x(self, n):
        return self.xs[n]

    def y(self, n):
        if n < 1:
            raise ParameterError("y_n is defined for n >= 1 only")
        return self.ys[n - 1]


# ---------------------------------------------------------------------------
# engines


def _checked(space, p, label, n):
    v = geo.validate_point(space, p)
    if v is not None:
        raise DomainError(f"{label}_{n} left the domain ({v}); is the map a self-map of C?")
    return p


def iterate_alternative(config):
    """Run ``x[n+1] = T(combine(lam[n+1], u, x[n]))`` for ``n = 0 .. N-1``.

    Returns
    -------
    ndarray, shape (N+1, d)
        ``x_0 .. x_N``.

    Raises
    ------
    ScheduleExhausted
        If the schedule is shorter than the horizon.
    DomainError
        If an iterate leaves the domain.
    """
    space, T, u = config.space, config.mapping, config.anchor
    lambdas = config.schedule.take(config.horizon)
    xs = np.empty((config.horizon + 1, space.dimension))
    xs[0] = config.start
    for n in range(config.horizon):
        z = geo._combine_unchecked(space, lambdas[n], u, xs[n])
        xs[n + 1] = _checked(space, T._apply(space, _checked(space, z, "combination", n + 1)), "x", n + 1)
    return xs


def iterate_halpern(space, mapping, anchor, y1, schedule, horizon):
    """Run the Halpern iteration ``y[n+1] = combine(lam[n+1], u, T(y[n]))``.

    The seed is ``y_1``; steps ``n = 1 .. N-1`` consume ``lam_2 .. lam_N`` of
    ``schedule``, so passing the same schedule as the coupled run reproduces
    its ``y`` sequence.

    Returns
    -------
    ndarray, shape (N, d)
        ``y_1 .. y_N``.
    """
    ensure_compatible(mapping, space)
    u = geo.check_point(space, anchor, "anchor u")
    y1 = geo.check_point(space, y1, "seed y1")
    horizon = int(horizon)
    if horizon < 1:
        raise ParameterError("horizon must be positive")
    lambdas = schedule.take(horizon)
    ys = np.empty((horizon, space.dimension))
    ys[0] = y1
    for i in range(1, horizon):
        ty = _checked(space, mapping._apply(space, ys[i - 1]), "Ty", i)
        ys[i] = _checked(space, geo._combine_unchecked(space, lambdas[i], u, ty), "y", i + 1)
    return ys


def iterate_coupled(config):
    """Produce both sequences from one run.

    For ``n = 0 .. N-1``: ``y[n+1] = combine(lam[n+1], u, x[n])`` and
    ``x[n+1] = T(y[n+1])``. Each stored ``x_n`` is the very array returned by
    the map on ``y_n``.

    Returns
    -------
    CoupledTrajectory
    """
    space, T, u = config.space, config.mapping, config.anchor
    N = config.horizon
    lambdas = config.schedule.take(N)
    xs = np.empty((N + 1, space.dimension))
    ys = np.empty((N, space.dimension))
    xs[0] = config.start
    for n in range(N):
        ys[n] = _checked(space, geo._combine_unchecked(space, lambdas[n], u, xs[n]), "y", n + 1)
        xs[n + 1] = _checked(space, T._apply(space, ys[n]), "x", n + 1)
    x_steps = geo.distances(space, xs[:-1], xs[1:])
    y_steps = geo.distances(space, ys[:-1], ys[1:])
    return CoupledTrajectory(*(_frozen(a) for a in (xs, ys, lambdas, x_steps, y_steps)), config)


# ---------------------------------------------------------------------------
# verification of the coupling


def default_tolerance(space):
    """1e-12 in Euclidean spaces, 1e-10 in the disk."""
    return 1e-10 if space.is_hyperbolic else 1e-12


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    max_deviation: float
    worst_index: Optional[int]
    tol: float

    def as_dict(self):
        return {"name": self.name, "passed": self.passed, "max_deviation": self.max_deviation,
                "worst_index": self.worst_index, "tol": self.tol}


@dataclass(frozen=True)
class CouplingReport:
    """Outcome of :func:`verify_coupling`.

    ``mapping_identity`` is check (a), ``x_n = T y_n``;
    ``halpern_recurrence`` is check (b), ``y_{n+1} = combine(lam_{n+1}, u, T y_n)``;
    ``independent_halpern`` is check (c), a fresh Halpern run from ``y_1``.
    Indices are the ``n`` of the compared ``x_n`` or ``y_n``.
    """

    mapping_identity: CheckResult
    halpern_recurrence: CheckResult
    independent_halpern: CheckResult
    bitwise: bool = field(default=False)

    @property
    def checks(self):
        return (self.mapping_identity, self.halpern_recurrence, self.independent_halpern)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def as_dict(self):
        d = {c.name: c.as_dict() for c in self.checks}
        d["bitwise"] = self.bitwise
        d["passed"] = self.passed
        return d


def _deviation_check(name, space, expected, actual, tol, first_index):
    if len(expected) == 0:
        return CheckResult(name, True, 0.0, None, tol)
    dev = geo.distances(space, np.asarray(expected), np.asarray(actual))
    worst = int(np.argmax(dev))
    max_dev = float(dev[worst])
    return CheckResult(name, bool(max_dev <= tol), max_dev, worst + first_index, tol)


def verify_coupling(traj, tol=None):
    """Check the coupling identity and the Halpern recurrence on a trajectory.

    Parameters
    ----------
    traj : CoupledTrajectory
    tol : float, optional
        Allowed deviation, measured in the metric of the space. Defaults to
        :func:`default_tolerance`.

    Returns
    -------
    CouplingReport
    """
    cfg = traj.config
    space, T, u = cfg.space, cfg.mapping, cfg.anchor
    tol = default_tolerance(space) if tol is None else float(tol)
    N = traj.horizon
    lambdas = cfg.schedule.take(N)

    tys = np.array([T._apply(space, y) for y in traj.ys])
    a = _deviation_check("mapping_identity", space, tys, traj.xs[1:], tol, 1)
    bitwise = bool(np.array_equal(tys, traj.xs[1:]))

    rec = np.array([geo._combine_unchecked(space, lambdas[i], u, tys[i - 1]) for i in range(1, N)])
    rec = rec.reshape(N - 1, space.dimension)
    b = _deviation_check("halpern_recurrence", space, rec, traj.ys[1:], tol, 2)

    fresh = iterate_halpern(space, T, u, traj.ys[0], cfg.schedule, N)
    c = _deviation_check("independent_halpern", space, fresh, traj.ys, tol, 1)
    return CouplingReport(a, b, c, bitwise)
