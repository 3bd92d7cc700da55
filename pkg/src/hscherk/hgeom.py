"""Poincare-ball model of hyperbolic space H^n.

Points are Euclidean vectors with |x| < 1, the metric carries the conformal
factor 2/(1-|x|^2).  Totally geodesic walls come in two flavours: hyperplanes
through the origin and Euclidean spheres orthogonal to the ideal boundary
(|center|^2 = radius^2 + 1).  Signed distances use the closed formula
sinh d = 2<x,nu>/(1-|x|^2) for hyperplanes and its orthosphere analogue
sinh d = (rho^2 - |x-c|^2)/(rho (1-|x|^2)); both are validated against a
brute-force minimization oracle in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, ValidationError

# Points this close to the ideal boundary are rejected outright: the
# conformal factor blowup makes silent clamping corrupt distances.
BOUNDARY_GUARD = 1e-12

_UNIT_TOL = 1e-12
_ORTHO_TOL = 1e-10


def _as_vector(x) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise ValidationError(f"expected a 1-d coordinate vector, got shape {v.shape}")
    return v


@dataclass(frozen=True)
class BallPoint:
    """Interior point of the Poincare ball."""

    x: np.ndarray

    def __init__(self, x):
        v = _as_vector(x)
        if v.size < 2:
            raise ValidationError("dimension must be >= 2")
        if not np.all(np.isfinite(v)):
            raise ValidationError("point coordinates must be finite")
        if float(np.linalg.norm(v)) > 1.0 - BOUNDARY_GUARD:
            raise ValidationError("point must lie strictly inside the unit ball")
        object.__setattr__(self, "x", v)

    @property
    def n(self) -> int:
        return self.x.size

    def to_json(self) -> list:
        return [float(c) for c in self.x]


@dataclass(frozen=True)
class BoundaryPoint:
    """Ideal point: a unit direction on the sphere at infinity."""

    direction: np.ndarray

    def __init__(self, direction):
        v = _as_vector(direction)
        if v.size < 2:
            raise ValidationError("dimension must be >= 2")
        if abs(float(np.linalg.norm(v)) - 1.0) > _UNIT_TOL:
            raise ValidationError("boundary direction must be a unit vector")
        object.__setattr__(self, "direction", v)

    @property
    def n(self) -> int:
        return self.direction.size

    def to_json(self) -> list:
        return [float(c) for c in self.direction]


@dataclass(frozen=True)
class GeodesicWall:
    """Totally geodesic hypersphere with an oriented positive side.

    kind == "hyperplane": the wall is {x : <x, normal> = 0}; with side = +1
    the positive component is {<x, normal> > 0}.

    kind == "orthosphere": the wall is {x : |x - center| = radius} with
    |center|^2 = radius^2 + 1; with side = +1 the positive component is the
    inside of the Euclidean sphere.
    """

    kind: str
    side: int = 1
    normal: np.ndarray | None = None
    center: np.ndarray | None = None
    radius: float | None = None

    def __post_init__(self):
        if self.side not in (-1, 1):
            raise ConfigurationError("side must be +1 or -1")
        if self.kind == "hyperplane":
            if self.normal is None:
                raise ConfigurationError("hyperplane wall needs a normal")
            v = _as_vector(self.normal)
            if abs(float(np.linalg.norm(v)) - 1.0) > _UNIT_TOL:
                raise ConfigurationError("hyperplane normal must be a unit vector")
            object.__setattr__(self, "normal", v)
        elif self.kind == "orthosphere":
            if self.center is None or self.radius is None:
                raise ConfigurationError("orthosphere wall needs center and radius")
            c = _as_vector(self.center)
            rho = float(self.radius)
            if rho <= 0.0:
                raise ConfigurationError("orthosphere radius must be positive")
            if abs(float(c @ c) - rho * rho - 1.0) > _ORTHO_TOL:
                raise ConfigurationError(
                    "orthosphere must satisfy |center|^2 = radius^2 + 1"
                )
            object.__setattr__(self, "center", c)
            object.__setattr__(self, "radius", rho)
        else:
            raise ConfigurationError(f"unknown wall kind {self.kind!r}")

    @property
    def n(self) -> int:
        return self.normal.size if self.kind == "hyperplane" else self.center.size

    def to_json(self) -> dict:
        if self.kind == "hyperplane":
            return {
                "type": "hyperplane",
                "normal": [float(c) for c in self.normal],
                "side": self.side,
            }
        return {
            "type": "orthosphere",
            "center": [float(c) for c in self.center],
            "radius": float(self.radius),
            "side": self.side,
        }

    @staticmethod
    def from_json(obj: dict) -> "GeodesicWall":
        kind = obj.get("type")
        if kind == "hyperplane":
            return GeodesicWall("hyperplane", side=int(obj.get("side", 1)),
                                normal=obj["normal"])
        if kind == "orthosphere":
            return GeodesicWall("orthosphere", side=int(obj.get("side", 1)),
                                center=obj["center"], radius=obj["radius"])
        raise ConfigurationError(f"unknown wall type {kind!r}")


def origin(n: int) -> BallPoint:
    return BallPoint(np.zeros(n))


def geodesic_distance(a: BallPoint, b: BallPoint) -> float:
    """Hyperbolic distance arcosh(1 + 2|a-b|^2 / ((1-|a|^2)(1-|b|^2)))."""
    if a.n != b.n:
        raise ValidationError("points live in different dimensions")
    diff = a.x - b.x
    na = 1.0 - float(a.x @ a.x)
    nb = 1.0 - float(b.x @ b.x)
    arg = 1.0 + 2.0 * float(diff @ diff) / (na * nb)
    return math.acosh(max(arg, 1.0))


def signed_wall_distance(x: BallPoint, wall: GeodesicWall) -> float:
    """Signed hyperbolic distance to the wall, positive on the chosen side."""
    if x.n != wall.n:
        raise ValidationError("point and wall live in different dimensions")
    conf = 1.0 - float(x.x @ x.x)
    if wall.kind == "hyperplane":
        s = 2.0 * float(x.x @ wall.normal) / conf
    else:
        diff = x.x - wall.center
        s = (wall.radius ** 2 - float(diff @ diff)) / (wall.radius * conf)
    return wall.side * math.asinh(s)


def ray_point(p: BoundaryPoint, t: float) -> BallPoint:
    """Point at arclength t >= 0 on the geodesic ray from the origin to p."""
    if t < 0.0:
        raise ValidationError("ray parameter must be nonnegative")
    return BallPoint(math.tanh(0.5 * t) * p.direction)


def wall_concentric_at(p: BoundaryPoint, t: float) -> GeodesicWall:
    """Geodesic wall orthogonal to the ray toward p at arclength t > 0.

    The positive side is the component whose ideal boundary contains p;
    the origin sits at signed distance -t.
    """
    if t <= 0.0:
        raise ValidationError("wall offset must be positive")
    q = math.tanh(0.5 * t)
    lam = (1.0 + q * q) / (2.0 * q)
    rho = (1.0 - q * q) / (2.0 * q)
    return GeodesicWall("orthosphere", side=1, center=lam * p.direction, radius=rho)


def sample_wall_points(wall: GeodesicWall, k: int, rng: np.random.Generator) -> list[BallPoint]:
    """Random interior points lying exactly on the wall (for oracles/sampling)."""
    pts: list[BallPoint] = []
    n = wall.n
    if wall.kind == "hyperplane":
        # Orthonormal basis of the hyperplane.
        basis = _orthocomplement(wall.normal)
        while len(pts) < k:
            u = rng.standard_normal(n - 1)
            u /= np.linalg.norm(u)
            r = rng.uniform(0.0, 1.0 - 1e-9) ** (1.0 / (n - 1))
            v = r * (basis.T @ u)
            if np.linalg.norm(v) < 1.0 - 1e-9:
                pts.append(BallPoint(v))
    else:
        c, rho = wall.center, wall.radius
        while len(pts) < k:
            u = rng.standard_normal(n)
            u /= np.linalg.norm(u)
            v = c + rho * u
            if np.linalg.norm(v) < 1.0 - 1e-9:
                pts.append(BallPoint(v))
    return pts


def brute_force_wall_distance(x: BallPoint, wall: GeodesicWall, samples: int,
                              rng: np.random.Generator) -> float:
    """Unsigned wall distance by staged random minimization over wall points.

    Independent oracle for signed_wall_distance: draws `samples` candidate
    points on the wall in three refinement stages and returns the minimal
    geodesic distance.
    """
    per_stage = max(samples // 3, 1)
    best = math.inf
    best_pt = None
    for pt in sample_wall_points(wall, per_stage, rng):
        d = geodesic_distance(x, pt)
        if d < best:
            best, best_pt = d, pt
    for spread in (0.05, 0.005):
        for _ in range(per_stage):
            cand = _perturb_on_wall(best_pt, wall, spread, rng)
            if cand is None:
                continue
            d = geodesic_distance(x, cand)
            if d < best:
                best, best_pt = d, cand
    return best


def _perturb_on_wall(pt: BallPoint, wall: GeodesicWall, spread: float,
                     rng: np.random.Generator) -> BallPoint | None:
    v = pt.x + spread * rng.standard_normal(pt.n)
    if wall.kind == "hyperplane":
        v = v - (v @ wall.normal) * wall.normal
    else:
        u = v - wall.center
        nu = np.linalg.norm(u)
        if nu == 0.0:
            return None
        v = wall.center + wall.radius * u / nu
    if np.linalg.norm(v) >= 1.0 - 1e-9:
        return None
    return BallPoint(v)


def _orthocomplement(normal: np.ndarray) -> np.ndarray:
    """Rows form an orthonormal basis of the hyperplane orthogonal to normal."""
    n = normal.size
    mat = np.column_stack([normal, np.eye(n)])
    q, _ = np.linalg.qr(mat)
    return q[:, 1:n].T
