"""Scherk-type wall barriers, radial barriers, and envelope combinations.

A supersolution barrier attached to a geodesic wall is the critical shooting
profile whose asymptotic height equals the prescribed boundary constant c;
it diverges at the wall and is truncated below d_min, where the profile is
treated as +infinity.  A subsolution is the sign reflection of the
supersolution of the mirrored problem.  Radial barriers solve the separable
equation Q(v o r) = phi(r) in closed integral form.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import PchipInterpolator

from scipy.interpolate import CubicHermiteSpline, CubicSpline

from .envelope import DecaySpec, HeightSpec, PsiEnvelope, \
    check_coth_global_bound, psi_eval
from .errors import ConfigurationError, CothBoundViolated, NonIntegrableTail, \
    TooCloseToWall, ValidationError
from .hgeom import BallPoint, GeodesicWall, origin, sample_wall_points, \
    signed_wall_distance
from .shooting import ShootingConfig, choose_d0, ell, find_gamma0, \
    full_profile, solve_height


@dataclass(frozen=True)
class SolverOptions:
    """Tunables threaded through barrier construction."""

    rk_tol: float = 1e-10
    eps_g: float = 1e-9
    d_max: float = 30.0
    bisect_tol: float = 1e-12
    margin: float = 0.01
    #: recorded-sample cap; small enough that the Hermite reconstruction of
    #: the profile keeps the scalar equation residual under 1e-5
    record_hmax: float = 0.005

    def config(self, n: int, d0: float) -> ShootingConfig:
        return ShootingConfig(n=n, d0=d0, rk_tol=self.rk_tol, eps_g=self.eps_g,
                              d_max=self.d_max, bisect_tol=self.bisect_tol,
                              record_hmax=self.record_hmax)


@dataclass(frozen=True)
class ScherkBarrier:
    """Computed super/subsolution profile attached to a geodesic wall."""

    wall: GeodesicWall
    c: float
    kind: str  # "Super" | "Sub"
    d_samples: np.ndarray
    w_samples: np.ndarray
    g_samples: np.ndarray
    d_min: float
    d_max: float
    d0: float
    h_c: float
    gamma0: float
    tail: float
    n: int
    env: PsiEnvelope

    def __post_init__(self):
        if self.kind not in ("Super", "Sub"):
            raise ValidationError("barrier kind must be Super or Sub")
        # Hermite reconstruction from the exact slope w' = g / sqrt(1 - g^2)
        w1 = self.g_samples / np.sqrt((1.0 - self.g_samples)
                                      * (1.0 + self.g_samples))
        object.__setattr__(self, "_interp",
                           CubicHermiteSpline(self.d_samples, self.w_samples, w1))
        object.__setattr__(self, "_w1", w1)

    def profile(self, d):
        """Interpolated profile on [d_min, d_max]; clamped beyond d_max."""
        return self._interp(np.minimum(d, self.d_max))

    def interp_error_bound(self, d) -> float:
        """Per-segment bound local spacing x max |w'| at the query distance."""
        d = float(np.clip(d, self.d_min, self.d_max))
        k = int(np.searchsorted(self.d_samples, d, side="right")) - 1
        k = min(max(k, 0), self.d_samples.size - 2)
        spacing = float(self.d_samples[k + 1] - self.d_samples[k])
        return spacing * float(max(abs(self._w1[k]), abs(self._w1[k + 1])))

    def to_manifest(self) -> dict:
        return {
            "format_version": 1,
            "wall": self.wall.to_json(),
            "kind": self.kind,
            "c": self.c,
            "n": self.n,
            "d0": self.d0,
            "h_c": self.h_c,
            "gamma0": self.gamma0,
            "d_min": self.d_min,
            "tail": self.tail,
            "samples": int(self.d_samples.size),
        }

    def dump_profile_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["d", "w"])
            for d, w in zip(self.d_samples, self.w_samples):
                writer.writerow([repr(float(d)), repr(float(w))])


@dataclass(frozen=True)
class RadialBarrier:
    """Upper barrier v(r) with Q(v o r) = phi(r), v' (0) = 0, v(inf) = M."""

    n: int
    phi: DecaySpec
    M: float
    r_samples: np.ndarray
    rho_samples: np.ndarray
    v_samples: np.ndarray
    sup_rho: float
    tail: float

    def __post_init__(self):
        object.__setattr__(self, "_rho", PchipInterpolator(self.r_samples,
                                                           self.rho_samples))
        object.__setattr__(self, "_v", PchipInterpolator(self.r_samples,
                                                         self.v_samples))

    def rho_tilde(self, r):
        return self._rho(np.minimum(r, self.r_samples[-1]))

    def v(self, r):
        r = np.asarray(r, dtype=float)
        out = np.where(r >= self.r_samples[-1], self.M + self.tail,
                       self._v(np.minimum(r, self.r_samples[-1])))
        return float(out) if out.ndim == 0 else out

    def dump_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["r", "rho_tilde", "v"])
            for r, rho, v in zip(self.r_samples, self.rho_samples, self.v_samples):
                writer.writerow([repr(float(r)), repr(float(rho)), repr(float(v))])


def explicit_scherk(n: int, d0: float, h: float):
    """The slope solution G and height profile W of the source-free system.

    G(d) = -cosh^(1-n)(d) exactly; W(d) = h - int_{d0}^d (cosh^(2n-2) - 1)^(-1/2),
    which diverges logarithmically as d -> 0+.
    """
    if d0 <= 0.0:
        raise ValidationError("anchor d0 must be positive")

    def G(d):
        return -np.cosh(d) ** (1 - n)

    def _w_scalar(d: float) -> float:
        if d <= 0.0:
            raise ValidationError("W is defined for d > 0 only")
        if n == 2:
            return h + math.log(math.tanh(0.5 * d0)) - math.log(math.tanh(0.5 * d))
        # remove the 1/t endpoint behavior by integrating in u = log tanh(t/2):
        # dt = sinh(t) du, integrand dt/sqrt(cosh^(2n-2) t - 1)
        u0, u1 = math.log(math.tanh(0.5 * d0)), math.log(math.tanh(0.5 * d))

        def integrand(u):
            t = 2.0 * math.atanh(math.exp(u))
            return math.sinh(t) / math.sqrt(math.cosh(t) ** (2 * n - 2) - 1.0)

        val, _ = quad(integrand, u0, u1, limit=200)
        return h - val

    def W(d):
        if np.ndim(d) == 0:
            return _w_scalar(float(d))
        return np.array([_w_scalar(float(x)) for x in np.asarray(d)])

    return G, W


def _reflect_height(h: HeightSpec) -> HeightSpec:
    # admitted height families are even, so t -> -t is the identity on them
    return h


def build_super(phi: DecaySpec, h_spec: HeightSpec, wall: GeodesicWall, c: float,
                n: int, opts: SolverOptions = SolverOptions()) -> ScherkBarrier:
    """Supersolution over the positive side of the wall with limit c at infinity.

    Chain: offset the envelope by the wall-to-origin distance, pick the anchor
    d0, solve ell(h_c) = c, then sample the critical profile at the bracket
    top down to the truncation distance d_min.
    """
    delta = signed_wall_distance(origin(n), wall)
    env = PsiEnvelope(phi=phi, h=h_spec, offset=delta, n=n)
    d0 = choose_d0(env, n, opts.margin)
    cfg = opts.config(n, d0)
    h_c, _ = solve_height(env, cfg, c)
    res = find_gamma0(env, cfg, h_c)
    _, tail_ell = ell(env, cfg, h_c, gamma0_result=res)
    prof = full_profile(env, cfg, h_c, res)
    d_s, w_s, g_s = prof.d, prof.w, prof.g
    resid = abs(float(w_s[-1]) - c)
    return ScherkBarrier(wall=wall, c=c, kind="Super", d_samples=d_s,
                         w_samples=w_s, g_samples=g_s,
                         d_min=float(d_s[0]), d_max=float(d_s[-1]),
                         d0=d0, h_c=h_c, gamma0=res.gamma0,
                         tail=tail_ell + resid, n=n, env=env)


def build_sub(phi: DecaySpec, h_spec: HeightSpec, wall: GeodesicWall, c: float,
              n: int, opts: SolverOptions = SolverOptions()) -> ScherkBarrier:
    """Subsolution: negated supersolution of the mirrored problem (-c, h(-t))."""
    sup = build_super(phi, _reflect_height(h_spec), wall, -c, n, opts)
    return ScherkBarrier(wall=wall, c=c, kind="Sub", d_samples=sup.d_samples,
                         w_samples=-sup.w_samples, g_samples=-sup.g_samples,
                         d_min=sup.d_min, d_max=sup.d_max, d0=sup.d0,
                         h_c=-sup.h_c, gamma0=sup.gamma0, tail=sup.tail, n=n,
                         env=sup.env)


def eval_barrier(b: ScherkBarrier, x: BallPoint) -> float:
    """Barrier value at an interior point via its signed wall distance."""
    d = signed_wall_distance(x, b.wall)
    if d < b.d_min:
        raise TooCloseToWall(
            f"signed distance {d:.6g} below truncation {b.d_min:.6g}; "
            "the barrier is +/-infinite there")
    return float(b.profile(d))


def _eval_extended(b: ScherkBarrier, x: BallPoint) -> float:
    try:
        return eval_barrier(b, x)
    except TooCloseToWall:
        return math.inf if b.kind == "Super" else -math.inf


def _check_arrangement(b1: ScherkBarrier, b2: ScherkBarrier) -> None:
    # S1 must lie in the positive side of S2 and vice versa (sampled check)
    rng = np.random.default_rng(20260823)
    for wa, wb in ((b1.wall, b2.wall), (b2.wall, b1.wall)):
        for pt in sample_wall_points(wa, 64, rng):
            if signed_wall_distance(pt, wb) <= 0.0:
                raise ConfigurationError(
                    "wall arrangement violated: each wall must lie in the "
                    "positive side of the other")


def envelope_barrier(b1: ScherkBarrier, b2: ScherkBarrier, x: BallPoint) -> float:
    """Piecewise combination: min of supers / max of subs on the overlap."""
    if b1.kind != b2.kind:
        raise ConfigurationError("cannot combine a Super with a Sub barrier")
    _check_arrangement(b1, b2)
    d1 = signed_wall_distance(x, b1.wall)
    d2 = signed_wall_distance(x, b2.wall)
    if d1 <= 0.0 and d2 <= 0.0:
        raise ValidationError("point lies outside both positive sides")
    if d2 <= 0.0:
        return _eval_extended(b1, x)
    if d1 <= 0.0:
        return _eval_extended(b2, x)
    pick = min if b1.kind == "Super" else max
    return pick(_eval_extended(b1, x), _eval_extended(b2, x))


def _lsinh(x: float) -> float:
    return x + math.log1p(-math.exp(-2.0 * x)) - math.log(2.0)


def rho_tilde_eval(n: int, phi: DecaySpec, r: float) -> float:
    """rho~(r) = int_0^r phi(s) sinh^(n-1)(s) ds / sinh^(n-1)(r).

    Evaluated in log-ratio form; series value phi(0) r / n near zero.
    """
    if r < 0.0:
        raise ValidationError("radius must be nonnegative")
    if phi.family == "zero":
        return 0.0
    if r < 1e-6:
        return float(phi(0.0)) * r / n
    lr = _lsinh(r)
    n1 = n - 1

    def integrand(s):
        if s < 1e-300:
            return 0.0
        return float(phi(s)) * math.exp(n1 * (_lsinh(s) - lr))

    val, _ = quad(integrand, 0.0, r, limit=200)
    return val


def radial_barrier(n: int, phi: DecaySpec, M: float,
                   r_max: float = 40.0) -> RadialBarrier:
    """Closed-form radial upper barrier; requires phi <= (n-1) coth globally."""
    if not check_coth_global_bound(phi, n):
        raise CothBoundViolated(
            "decay profile exceeds (n-1) coth(r); no radial barrier exists")
    grid = np.concatenate([
        np.geomspace(1e-6, 0.1, 40),
        np.arange(0.15, r_max + 0.05, 0.05),
    ])
    n1 = n - 1
    rho = np.empty(grid.size)
    rho[0] = float(phi(0.0)) * grid[0] / n
    # segment recurrence keeps every weight a bounded sinh ratio
    for k in range(1, grid.size):
        a, b = float(grid[k - 1]), float(grid[k])
        lb = _lsinh(b)
        seg, _ = quad(lambda s: float(phi(s)) * math.exp(n1 * (_lsinh(s) - lb)),
                      a, b, limit=100)
        rho[k] = rho[k - 1] * math.exp(n1 * (_lsinh(a) - lb)) + seg
    sup_rho = float(np.max(np.abs(rho)))
    if sup_rho >= 1.0 - 1e-9:
        raise NonIntegrableTail("sup |rho~| reached 1; the barrier integral diverges")
    # v(r) = M + int_r^inf rho~ / sqrt(1 - rho~^2); certified tail beyond r_max
    tail = (2.0 ** n1 / n1) * (rho[-1] + phi.integral_tail(r_max)) \
        / math.sqrt(1.0 - sup_rho * sup_rho)
    integrand = rho / np.sqrt(1.0 - rho * rho)
    prim = PchipInterpolator(grid, integrand).antiderivative()(grid)
    v = M + tail + (prim[-1] - prim)
    return RadialBarrier(n=n, phi=phi, M=M, r_samples=grid, rho_samples=rho,
                         v_samples=v, sup_rho=sup_rho, tail=tail)


def c0_threshold(phi: DecaySpec, h_spec: HeightSpec, n: int) -> float:
    """Smallest t >= 0 with psi(0, t) <= 2^-(n+1) for the centered envelope."""
    env = PsiEnvelope(phi=phi, h=h_spec, offset=0.0, n=n)
    thr = 2.0 ** (-(n + 1))

    def val(t):
        return psi_eval(env, 0.0, t)

    if val(0.0) <= thr:
        return 0.0
    hi = 1.0
    while val(hi) > thr:
        hi *= 2.0
        if hi > 1e6:
            raise ValidationError("height profile does not decay below threshold")
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if val(mid) > thr:
            lo = mid
        else:
            hi = mid
    return hi


def uniform_bound_experiment(phi: DecaySpec, h_spec: HeightSpec, n: int, c: float,
                             offsets, d1: float,
                             opts: SolverOptions = SolverOptions()):
    """Per-offset sup of the wall profile on d >= d1 plus the global bound.

    Each offset is a wall-to-origin distance; profiles are decreasing, so the
    sup over d >= d1 is the profile value at d1.  Returns
    (M_observed, {offset: sup}).
    """
    c0 = c0_threshold(phi, h_spec, n)
    if c < c0:
        raise ValidationError(f"boundary constant {c} below threshold c0 = {c0:.6g}")
    per_offset: dict[float, float] = {}
    for delta in offsets:
        env = PsiEnvelope(phi=phi, h=h_spec, offset=float(delta), n=n)
        d0 = choose_d0(env, n, opts.margin)
        cfg = opts.config(n, d0)
        h_c, _ = solve_height(env, cfg, c)
        res = find_gamma0(env, cfg, h_c)
        prof = full_profile(env, cfg, h_c, res)
        if d1 <= prof.d[0]:
            raise ValidationError("d1 lies below the profile truncation")
        per_offset[float(delta)] = float(PchipInterpolator(prof.d, prof.w)(d1))
    return max(per_offset.values()), per_offset


def profile_equation_residual(b: ScherkBarrier, d_lo: float, d_hi: float,
                              samples: int = 400) -> float:
    """Sup-norm residual of the scalar curvature equation on [d_lo, d_hi].

    w''/(1+w'^2)^(3/2) + (n-1) tanh(d) w'/sqrt(1+w'^2) = -psi(d, w) for a
    Super profile (+psi for Sub), evaluated with the interpolant derivatives.
    """
    d = np.linspace(max(d_lo, b.d_min), min(d_hi, b.d_max), samples)
    w = b._interp(d)
    # w' and w'' from a C2 spline through the exact slope samples; the
    # Hermite profile spline is only C1 in its second derivative
    slope = CubicSpline(b.d_samples, b._w1)
    w1 = slope(d)
    w2 = slope(d, 1)
    lhs = w2 / (1.0 + w1 * w1) ** 1.5 \
        + (b.n - 1) * np.tanh(d) * w1 / np.sqrt(1.0 + w1 * w1)
    sign = -1.0 if b.kind == "Super" else 1.0
    rhs = sign * np.array([psi_eval(b.env, float(x), float(t))
                           for x, t in zip(d, w)])
    return float(np.max(np.abs(lhs - rhs)))


def save_manifest(b: ScherkBarrier, path) -> None:
    with open(path, "w") as fh:
        json.dump(b.to_manifest(), fh, indent=2, sort_keys=True)
        fh.write("\n")
