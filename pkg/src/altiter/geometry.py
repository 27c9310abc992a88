"""Geodesic spaces with computable convex combinations.

Two uniquely geodesic spaces are supported:

* ``euclidean(d)``: R^d with the l2 metric, optionally restricted to a
  convex ``Ball`` or ``Box``;
* ``hyperbolic_disk()``: the Poincare disk model of the hyperbolic plane.

Points are plain float64 numpy arrays. ``combine(space, lam, u, x)`` is the
point at parameter ``lam`` on the geodesic from ``x`` toward ``u``, so that in
the Euclidean case it reduces to ``lam * u + (1 - lam) * x``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import DomainError, ParameterError

EUCLIDEAN = "euclidean"
HYPERBOLIC = "hyperbolic"

#: points of the disk must satisfy ``|p| < DISK_LIMIT``
DISK_LIMIT = 1.0 - 1e-12
#: absolute slack for domain membership (rounding in projections)
DOMAIN_ATOL = 1e-12
#: sampled metric properties (triangle inequality, geodesic parameterization)
METRIC_TOL = 1e-9
#: closed-form checks
CLOSED_FORM_TOL = 1e-12


def as_point(coords) -> np.ndarray:
    """Return ``coords`` as a fresh 1-D float64 array."""
    p = np.array(coords, dtype=np.float64)
    if p.ndim == 0:
        p = p.reshape(1)
    if p.ndim != 1:
        raise ParameterError(f"a point must be a flat coordinate sequence, got shape {p.shape}")
    return p


# ---------------------------------------------------------------------------
# convex domains


@dataclass(frozen=True)
class WholeSpace:
    """The whole space ``X``."""

    def contains(self, p, atol=DOMAIN_ATOL):
        return True

    def project(self, p):
        return np.array(p, dtype=np.float64)

    def as_dict(self):
        return {"kind": "whole"}


@dataclass(frozen=True)
class Ball:
    """Closed Euclidean ball ``{x : |x - center| <= radius}``."""

    center: tuple
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in as_point(self.center)))
        r = float(self.radius)
        if not math.isfinite(r) or r < 0:
            raise ParameterError(f"ball radius must be a finite nonnegative number, got {self.radius!r}")
        object.__setattr__(self, "radius", r)

    @property
    def dimension(self):
        return len(self.center)

    def contains(self, p, atol=DOMAIN_ATOL):
        c = np.asarray(self.center)
        return bool(np.linalg.norm(np.asarray(p) - c) <= self.radius + atol * max(1.0, self.radius))

    def project(self, p):
        c = np.asarray(self.center)
        v = np.asarray(p, dtype=np.float64) - c
        r = math.sqrt(float(np.dot(v, v)))
        if r <= self.radius:
            return np.array(p, dtype=np.float64)
        return c + (self.radius / r) * v

    def midpoint(self):
        return np.asarray(self.center, dtype=np.float64)

    def as_dict(self):
        return {"kind": "ball", "center": list(self.center), "radius": self.radius}


@dataclass(frozen=True)
class Box:
    """Closed axis-aligned box ``{x : lower <= x <= upper}``."""

    lower: tuple
    upper: tuple

    def __post_init__(self):
        lo = as_point(self.lower)
        hi = as_point(self.upper)
        if lo.shape != hi.shape:
            raise ParameterError("box bounds must have the same dimension")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise ParameterError("box bounds must be finite")
        if np.any(lo > hi):
            raise ParameterError("box lower bound exceeds upper bound")
        object.__setattr__(self, "lower", tuple(lo.tolist()))
        object.__setattr__(self, "upper", tuple(hi.tolist()))

    @property
    def dimension(self):
        return len(self.lower)

    def contains(self, p, atol=DOMAIN_ATOL):
        p = np.asarray(p)
        return bool(np.all(p >= np.asarray(self.lower) - atol) and np.all(p <= np.asarray(self.upper) + atol))

    def project(self, p):
        return np.clip(np.asarray(p, dtype=np.float64), self.lower, self.upper)

    def midpoint(self):
        return 0.5 * (np.asarray(self.lower) + np.asarray(self.upper))

    def as_dict(self):
        return {"kind": "box", "lower": list(self.lower), "upper": list(self.upper)}


ConvexDomain = Union[WholeSpace, Ball, Box]


# ---------------------------------------------------------------------------
# spaces


@dataclass(frozen=True)
class Space:
    """A geodesic space ``X`` together with a convex subset ``C``.

    Use :func:`euclidean` or :func:`hyperbolic_disk` rather than calling the
    constructor directly.
    """

    kind: str
    dimension: int
    domain: ConvexDomain = field(default_factory=WholeSpace)

    def __post_init__(self):
        if self.kind not in (EUCLIDEAN, HYPERBOLIC):
            raise ParameterError(f"unknown space kind {self.kind!r}")
        if int(self.dimension) != self.dimension or self.dimension < 1:
            raise ParameterError(f"dimension must be a positive integer, got {self.dimension!r}")
        if self.kind == HYPERBOLIC:
            if self.dimension != 2:
                raise ParameterError("the hyperbolic disk is two dimensional")
            if not isinstance(self.domain, WholeSpace):
                raise ParameterError("Ball/Box domains are only available in Euclidean spaces")
        elif not isinstance(self.domain, WholeSpace) and self.domain.dimension != self.dimension:
            raise ParameterError(
                f"domain dimension {self.domain.dimension} does not match space dimension {self.dimension}"
            )

    @property
    def is_hyperbolic(self):
        return self.kind == HYPERBOLIC

    def __str__(self):
        if self.is_hyperbolic:
            return "HyperbolicDisk"
        if isinstance(self.domain, WholeSpace):
            return f"Euclidean({self.dimension})"
        return f"Euclidean({self.dimension}) on {type(self.domain).__name__}"

    def as_dict(self):
        if self.is_hyperbolic:
            return {"kind": "hyperbolic_disk"}
        d = {"kind": "euclidean", "dimension": self.dimension}
        if not isinstance(self.domain, WholeSpace):
            d["domain"] = self.domain.as_dict()
        return d


def euclidean(dimension, domain=None):
    """Euclidean space ``R^dimension``, restricted to ``domain`` if given."""
    return Space(EUCLIDEAN, int(dimension), domain if domain is not None else WholeSpace())


def hyperbolic_disk():
    """The Poincare disk model of the hyperbolic plane."""
    return Space(HYPERBOLIC, 2)


# ---------------------------------------------------------------------------
# point validation


@dataclass(frozen=True)
class Violation:
    """Why a point is not a valid element of a space.

    ``constraint`` is one of ``"shape"``, ``"finite"``, ``"disk-norm"`` or
    ``"domain"``.
    """

    constraint: str
    message: str

    def __str__(self):
        return f"{self.constraint}: {self.message}"


def validate_point(space, p):
    """Check that ``p`` is a valid point of ``space``.

    Returns
    -------
    Violation or None
        ``None`` if the point is valid, otherwise the first violated
        constraint.
    """
    try:
        p = np.asarray(p, dtype=np.float64)
    except (TypeError, ValueError):
        return Violation("shape", "coordinates are not numeric")
    if p.shape != (space.dimension,):
        return Violation("shape", f"expected {space.dimension} coordinates, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        return Violation("finite", f"non-finite coordinate in {p.tolist()}")
    if space.is_hyperbolic:
        norm = math.hypot(p[0], p[1])
        if not norm < DISK_LIMIT:
            return Violation("disk-norm", f"|p| = {norm!r} is not below {DISK_LIMIT!r}")
    elif not space.domain.contains(p):
        return Violation("domain", f"{p.tolist()} lies outside {space.domain.as_dict()}")
    return None


def check_point(space, p, what="point"):
    """Validate ``p`` and return it as an array; raise DomainError otherwise."""
    p = as_point(p)
    v = validate_point(space, p)
    if v is not None:
        raise DomainError(f"{what} is not a valid point of {space}: {v}")
    return p


# ---------------------------------------------------------------------------
# metric


def _disk_distance(a, b):
    # arcosh(1 + 2 s^2) == 2 asinh(s), the latter keeps precision for short segments
    diff = a - b
    num = np.sum(diff * diff, axis=-1)
    den = (1.0 - np.sum(a * a, axis=-1)) * (1.0 - np.sum(b * b, axis=-1))
    return 2.0 * np.arcsinh(np.sqrt(num / den))


def _euclidean_distance(a, b):
    diff = a - b
    return np.sqrt(np.sum(diff * diff, axis=-1))


def distances(space, a, b):
    """Row-wise distances between two stacks of points of equal shape."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if space.is_hyperbolic:
        return _disk_distance(a, b)
    return _euclidean_distance(a, b)


def distance(space, a, b):
    """Geodesic distance between two points of ``space``.

    Parameters
    ----------
    space : Space
    a, b : array_like
        Valid points of ``space``.

    Returns
    -------
    float
        ``|a - b|`` in Euclidean space; in the disk,
        ``arcosh(1 + 2|a-b|^2 / ((1-|a|^2)(1-|b|^2)))``.

    Raises
    ------
    DomainError
        If either argument is not a valid point.
    """
    a = check_point(space, a, "first argument")
    b = check_point(space, b, "second argument")
    return float(distances(space, a, b))


# ---------------------------------------------------------------------------
# geodesic convex combination


def _mobius_to_origin(x, z):
    # disk automorphism sending x to 0
    return (z - x) / (1.0 - x.conjugate() * z)


def _mobius_from_origin(x, w):
    return (w + x) / (1.0 + x.conjugate() * w)


def _disk_combine(lam, u, x):
    zx = complex(x[0], x[1])
    w = _mobius_to_origin(zx, complex(u[0], u[1]))
    r = abs(w)
    if r == 0.0:
        return np.array(x, dtype=np.float64)
    # radial geodesic from 0: hyperbolic length 2*artanh(r), keep the fraction lam
    s = math.tanh(lam * math.atanh(r))
    z = _mobius_from_origin(zx, w * (s / r))
    return np.array([z.real, z.imag])


def combine(space, lam, u, x):
    """Geodesic convex combination ``lam * u + (1 - lam) * x``.

    Returns the point ``z`` on the geodesic segment from ``x`` to ``u`` with
    ``d(x, z) = lam * d(x, u)`` and ``d(z, u) = (1 - lam) * d(x, u)``.

    In the disk, ``x`` is moved to the origin by a Mobius automorphism, the
    image of ``u`` is shrunk radially to the right hyperbolic length and the
    result is moved back.

    Raises
    ------
    ParameterError
        If ``lam`` is not in ``[0, 1]``.
    DomainError
        If ``u`` or ``x`` is not a valid point of ``space``.
    """
    lam = float(lam)
    if not 0.0 <= lam <= 1.0:
        raise ParameterError(f"lambda must lie in [0, 1], got {lam!r}")
    u = check_point(space, u, "anchor")
    x = check_point(space, x, "point")
    return _combine_unchecked(space, lam, u, x)


def _combine_unchecked(space, lam, u, x):
    if space.is_hyperbolic:
        if lam == 0.0:
            return x.copy()
        if lam == 1.0:
            return u.copy()
        return _disk_combine(lam, u, x)
    return lam * u + (1.0 - lam) * x


def radial_disk_point(distance_from_origin, direction):
    """Point of the disk at hyperbolic distance ``distance_from_origin`` from 0.

    ``direction`` is an angle in radians. This is the closed form
    ``tanh(d / 2) * e^{i direction}`` used to cross-check :func:`combine`.
    """
    z = math.tanh(0.5 * distance_from_origin) * cmath.exp(1j * direction)
    return np.array([z.real, z.imag])


# ---------------------------------------------------------------------------
# sampling


def sample_points(space, count, rng, extent=2.0):
    """Draw ``count`` points of the space's domain.

    Euclidean ``WholeSpace`` is sampled uniformly in the cube
    ``[-extent, extent]^d``; ``Ball`` and ``Box`` domains uniformly inside
    themselves. The disk is sampled uniformly in squared radius and angle
    within ``|p| <= 0.99``.

    Returns
    -------
    ndarray, shape (count, dimension)
    """
    d = space.dimension
    if space.is_hyperbolic:
        r = 0.99 * np.sqrt(rng.uniform(0.0, 1.0, count))
        theta = rng.uniform(0.0, 2.0 * math.pi, count)
        return np.column_stack([r * np.cos(theta), r * np.sin(theta)])
    dom = space.domain
    if isinstance(dom, Ball):
        g = rng.standard_normal((count, d))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        radii = dom.radius * rng.uniform(0.0, 1.0, count) ** (1.0 / d)
        return np.asarray(dom.center) + g * radii[:, None]
    if isinstance(dom, Box):
        return rng.uniform(np.asarray(dom.lower), np.asarray(dom.upper), (count, d))
    return rng.uniform(-extent, extent, (count, d))
