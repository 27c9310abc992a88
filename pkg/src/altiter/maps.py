"""Catalog of nonexpansive self-maps and an empirical nonexpansiveness check.

Every map is an immutable description; :func:`apply` evaluates it on a
point of a :class:`~altiter.geometry.Space`. Maps with an obvious fixed point
expose it through :func:`fixed_point_oracle` so that distances to the fixed
point can be tracked without solving for it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import geometry as geo
from .errors import ParameterError

#: spectral norm slack accepted for affine maps
NORM_SLACK = 1e-12
#: maximal residual d(Tp, p) of a numerically certified fixed point
WITNESS_RESIDUAL = 1e-10
#: pairs closer than this are skipped by :func:`check_nonexpansive`
COINCIDENT = 1e-12


class Mapping:
    """Base class of the catalog entries."""

    kind = "mapping"

    def space_error(self, space):
        """Return a message if the map cannot act on ``space``, else None."""
        return None

    def _apply(self, space, x):
        raise NotImplementedError

    def fixed_point(self):
        return None

    def as_dict(self):
        raise NotImplementedError

    def __call__(self, space, x):
        return apply(self, space, x)


def _center_error(space, center, name):
    if len(center) != space.dimension:
        return f"{name} center has {len(center)} coordinates, space has dimension {space.dimension}"
    return None


def _needs_euclidean(space, kind):
    if space.is_hyperbolic:
        return f"{kind} acts on Euclidean spaces only"
    return None


def _coords(value):
    return tuple(geo.as_point(value).tolist())


@dataclass(frozen=True)
class EuclideanAffine(Mapping):
    """``x -> matrix @ x + offset`` with spectral norm at most one.

    ``validate=False`` skips the norm check; it exists only to build
    deliberately expansive maps for failure-path tests.
    """

    matrix: tuple
    offset: tuple
    validate: bool = field(default=True, compare=False)

    kind = "affine"

    def __post_init__(self):
        a = np.array(self.matrix, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ParameterError(f"affine matrix must be square, got shape {a.shape}")
        b = geo.as_point(self.offset)
        if b.shape[0] != a.shape[0]:
            raise ParameterError("affine offset length does not match matrix size")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ParameterError("affine coefficients must be finite")
        object.__setattr__(self, "matrix", tuple(map(tuple, a.tolist())))
        object.__setattr__(self, "offset", tuple(b.tolist()))
        object.__setattr__(self, "_a", a)
        object.__setattr__(self, "_b", b)
        if self.validate:
            norm = spectral_norm(a)
            if norm > 1.0 + NORM_SLACK:
                raise ParameterError(f"affine map is not nonexpansive: spectral norm {norm:.6g} > 1")

    def space_error(self, space):
        return _needs_euclidean(space, "affine") or (
            None if space.dimension == len(self.offset)
            else f"affine map of size {len(self.offset)} on space of dimension {space.dimension}"
        )

    def _apply(self, space, x):
        return self._a @ x + self._b

    def as_dict(self):
        return {"kind": self.kind, "matrix": [list(r) for r in self.matrix], "offset": list(self.offset)}


@dataclass(frozen=True)
class EuclideanScaling(Mapping):
    """Homothety ``x -> center + factor * (x - center)`` with ``0 <= factor <= 1``."""

    factor: float
    center: tuple

    kind = "scaling"

    def __post_init__(self):
        f = float(self.factor)
        if not 0.0 <= f <= 1.0:
            raise ParameterError(f"scaling factor must lie in [0, 1], got {self.factor!r}")
        object.__setattr__(self, "factor", f)
        object.__setattr__(self, "center", _coords(self.center))
        object.__setattr__(self, "_c", np.asarray(self.center))

    def space_error(self, space):
        return _needs_euclidean(space, self.kind) or _center_error(space, self.center, self.kind)

    def _apply(self, space, x):
        return self._c + self.factor * (x - self._c)

    def fixed_point(self):
        return FixedPointWitness(np.array(self.center))

    def as_dict(self):
        return {"kind": self.kind, "factor": self.factor, "center": list(self.center)}


@dataclass(frozen=True)
class EuclideanRotation(Mapping):
    """Rotation of the plane by ``angle`` radians about ``center``."""

    angle: float
    center: tuple = (0.0, 0.0)

    kind = "rotation"

    def __post_init__(self):
        object.__setattr__(self, "angle", float(self.angle))
        object.__setattr__(self, "center", _coords(self.center))
        if len(self.center) != 2:
            raise ParameterError("rotations act on the plane; center needs two coordinates")
        c, s = math.cos(self.angle), math.sin(self.angle)
        object.__setattr__(self, "_r", np.array([[c, -s], [s, c]]))
        object.__setattr__(self, "_c", np.asarray(self.center))

    def space_error(self, space):
        return _needs_euclidean(space, self.kind) or _center_error(space, self.center, self.kind)

    def _apply(self, space, x):
        return self._c + self._r @ (x - self._c)

    def fixed_point(self):
        return FixedPointWitness(np.array(self.center))

    def as_dict(self):
        return {"kind": self.kind, "angle": self.angle, "center": list(self.center)}


@dataclass(frozen=True)
class ProjectionOntoDomain(Mapping):
    """Metric projection onto a closed Euclidean ball or box."""

    target: geo.ConvexDomain

    kind = "projection"

    def __post_init__(self):
        if not isinstance(self.target, (geo.Ball, geo.Box)):
            raise ParameterError("projection target must be a Ball or a Box")

    def space_error(self, space):
        return _needs_euclidean(space, self.kind) or (
            None if self.target.dimension == space.dimension
            else f"projection target of dimension {self.target.dimension} on space of dimension {space.dimension}"
        )

    def _apply(self, space, x):
        return self.target.project(x)

    def fixed_point(self):
        return FixedPointWitness(self.target.midpoint())

    def as_dict(self):
        return {"kind": self.kind, "target": self.target.as_dict()}


@dataclass(frozen=True)
class HyperbolicRotation(Mapping):
    """Elliptic isometry of the disk rotating by ``angle`` about ``center``."""

    center: tuple
    angle: float

    kind = "hyperbolic_rotation"

    def __post_init__(self):
        object.__setattr__(self, "center", _coords(self.center))
        object.__setattr__(self, "angle", float(self.angle))
        if len(self.center) != 2 or not math.hypot(*self.center) < geo.DISK_LIMIT:
            raise ParameterError(f"rotation center {self.center} is not a point of the disk")
        object.__setattr__(self, "_c", complex(*self.center))
        object.__setattr__(self, "_rot", complex(math.cos(self.angle), math.sin(self.angle)))

    def space_error(self, space):
        if not space.is_hyperbolic:
            return "hyperbolic rotations act on the disk only"
        return None

    def _apply(self, space, x):
        c = self._c
        w = geo._mobius_to_origin(c, complex(x[0], x[1]))
        z = geo._mobius_from_origin(c, self._rot * w)
        return np.array([z.real, z.imag])

    def fixed_point(self):
        return FixedPointWitness(np.array(self.center))

    def as_dict(self):
        return {"kind": self.kind, "center": list(self.center), "angle": self.angle}


@dataclass(frozen=True)
class Compose(Mapping):
    """Composition, applied right to left: ``Compose([f, g])(x) = f(g(x))``."""

    maps: tuple

    kind = "compose"

    def __post_init__(self):
        maps = tuple(self.maps)
        if not maps:
            raise ParameterError("compose needs at least one map")
        if not all(isinstance(m, Mapping) for m in maps):
            raise ParameterError("compose operands must be mappings")
        object.__setattr__(self, "maps", maps)

    def space_error(self, space):
        for m in self.maps:
            err = m.space_error(space)
            if err:
                return f"compose operand: {err}"
        return None

    def _apply(self, space, x):
        for m in reversed(self.maps):
            x = m._apply(space, x)
        return x

    def as_dict(self):
        return {"kind": self.kind, "maps": [m.as_dict() for m in self.maps]}


@dataclass(frozen=True)
class Average(Mapping):
    """Geodesic average ``weight * first(x) + (1 - weight) * second(x)``."""

    weight: float
    first: Mapping
    second: Mapping

    kind = "average"

    def __post_init__(self):
        w = float(self.weight)
        if not 0.0 <= w <= 1.0:
            raise ParameterError(f"average weight must lie in [0, 1], got {self.weight!r}")
        object.__setattr__(self, "weight", w)
        if not (isinstance(self.first, Mapping) and isinstance(self.second, Mapping)):
            raise ParameterError("average operands must be mappings")

    def space_error(self, space):
        for m in (self.first, self.second):
            err = m.space_error(space)
            if err:
                return f"average operand: {err}"
        return None

    def _apply(self, space, x):
        return geo._combine_unchecked(space, self.weight, self.first._apply(space, x), self.second._apply(space, x))

    def as_dict(self):
        return {"kind": self.kind, "weight": self.weight,
                "first": self.first.as_dict(), "second": self.second.as_dict()}


def spectral_norm(matrix):
    """Largest singular value of ``matrix``."""
    return float(np.linalg.norm(np.asarray(matrix, dtype=np.float64), 2))


def ensure_compatible(mapping, space):
    err = mapping.space_error(space)
    if err:
        raise ParameterError(f"{mapping.kind} cannot act on {space}: {err}")


def apply(mapping, space, x):
    """Evaluate ``mapping`` at ``x``.

    Raises
    ------
    ParameterError
        If the map does not act on ``space``.
    DomainError
        If ``x`` is not a point of the space's domain.
    """
    ensure_compatible(mapping, space)
    x = geo.check_point(space, x)
    return mapping._apply(space, x)


# ---------------------------------------------------------------------------
# fixed points


@dataclass(frozen=True, eq=False)
class FixedPointWitness:
    """A fixed point ``p`` of a map.

    ``source`` is ``"analytic"`` for catalog formulas and
    ``"certified-numerically"`` when ``residual = d(Tp, p)`` was measured.
    """

    point: np.ndarray
    source: str = "analytic"
    residual: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "point", geo.as_point(self.point))
        if self.source not in ("analytic", "certified-numerically"):
            raise ParameterError(f"unknown witness source {self.source!r}")
        if self.source == "certified-numerically":
            if self.residual is None or not self.residual <= WITNESS_RESIDUAL:
                raise ParameterError(f"residual {self.residual!r} exceeds {WITNESS_RESIDUAL}")


def fixed_point_oracle(mapping):
    """Analytic fixed point of a catalog map, or None.

    Scalings and rotations return their center, projections the ball center
    or box midpoint. Affine maps, compositions and averages return None.
    """
    return mapping.fixed_point()


def certify_fixed_point(mapping, space, p):
    """Measure ``d(Tp, p)`` and wrap ``p`` as a certified witness.

    Raises ParameterError if the residual exceeds ``WITNESS_RESIDUAL``.
    """
    p = geo.check_point(space, p, "fixed point candidate")
    residual = geo.distance(space, apply(mapping, space, p), p)
    return FixedPointWitness(p, "certified-numerically", residual)


# ---------------------------------------------------------------------------
# nonexpansiveness


@dataclass(frozen=True)
class NonexpansiveReport:
    passed: bool
    max_ratio: float
    tol: float
    pairs_checked: int
    pairs_skipped: int
    violating_pair: Optional[tuple] = None

    def as_dict(self):
        d = {
            "passed": self.passed,
            "max_ratio": self.max_ratio,
            "tol": self.tol,
            "pairs_checked": self.pairs_checked,
            "pairs_skipped": self.pairs_skipped,
        }
        if self.violating_pair is not None:
            d["violating_pair"] = [list(map(float, p)) for p in self.violating_pair]
        return d


def check_nonexpansive(mapping, space, sample_count, seed=0, tol=1e-9, extent=2.0):
    """Estimate the Lipschitz constant of ``mapping`` on random pairs.

    Parameters
    ----------
    mapping : Mapping
    space : Space
    sample_count : int
        Number of point pairs, drawn with :func:`geometry.sample_points`.
    seed : int
        Seed of the numpy generator; the check is deterministic given it.
    tol : float
        The check passes iff ``max d(Tx,Ty)/d(x,y) <= 1 + tol``.
    extent : float
        Half width of the sampling cube for unrestricted Euclidean spaces.

    Returns
    -------
    NonexpansiveReport
        ``violating_pair`` holds the worst pair when the check fails.
    """
    if int(sample_count) < 1:
        raise ParameterError("sample_count must be at least 1")
    ensure_compatible(mapping, space)
    rng = np.random.default_rng(seed)
    xs = geo.sample_points(space, sample_count, rng, extent)
    ys = geo.sample_points(space, sample_count, rng, extent)
    txs = np.array([mapping._apply(space, x) for x in xs])
    tys = np.array([mapping._apply(space, y) for y in ys])
    before = geo.distances(space, xs, ys)
    after = geo.distances(space, txs, tys)
    keep = before >= COINCIDENT
    skipped = int(np.count_nonzero(~keep))
    if not np.any(keep):
        return NonexpansiveReport(True, 0.0, tol, 0, skipped)
    ratios = np.where(keep, after / np.where(keep, before, 1.0), -np.inf)
    worst = int(np.argmax(ratios))
    max_ratio = float(ratios[worst])
    passed = bool(max_ratio <= 1.0 + tol)
    pair = None if passed else (xs[worst].copy(), ys[worst].copy())
    return NonexpansiveReport(passed, max_ratio, tol, int(sample_count) - skipped, skipped, pair)


def check_isometry(mapping, space, sample_count, seed=0, tol=1e-9, extent=2.0):
    """Largest ``|d(Tx,Ty) - d(x,y)|`` over sampled pairs."""
    rng = np.random.default_rng(seed)
    xs = geo.sample_points(space, sample_count, rng, extent)
    ys = geo.sample_points(space, sample_count, rng, extent)
    txs = np.array([mapping._apply(space, x) for x in xs])
    tys = np.array([mapping._apply(space, y) for y in ys])
    return float(np.max(np.abs(geo.distances(space, txs, tys) - geo.distances(space, xs, ys))))


__all__ = [
    "Mapping", "EuclideanAffine", "EuclideanScaling", "EuclideanRotation", "ProjectionOntoDomain",
    "HyperbolicRotation", "Compose", "Average", "FixedPointWitness", "NonexpansiveReport",
    "apply", "fixed_point_oracle", "certify_fixed_point", "check_nonexpansive", "check_isometry",
    "spectral_norm", "ensure_compatible",
]
