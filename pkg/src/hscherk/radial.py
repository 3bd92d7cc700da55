"""Rotationally symmetric Dirichlet problems on geodesic balls.

For radial graphs the curvature operator reduces to the first integral
(sinh^(n-1)(r) g)' = -f(r, w) sinh^(n-1)(r) with w' = g / sqrt(1 - g^2),
g(0) = 0.  The center is a regular singular point handled by a series start;
|g| -> 1 before the ball radius is the gradient blowup obstruction behind the
hemisphere nonexistence phenomenon for constant sources.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from . import _kernels as K
from .envelope import DecaySpec, HeightSpec, H_GAUSS, H_SECH, H_ZERO, \
    PHI_INVPOWER, PHI_SECH, PHI_ZERO
from .errors import NoBracket, NumericalError, StepUnderflow, ValidationError

R_EPS = 1e-6

_PHI_CODES = {"zero": PHI_ZERO, "sech": PHI_SECH, "invpower": PHI_INVPOWER}
_H_CODES = {"zero": H_ZERO, "sech": H_SECH, "gauss": H_GAUSS}


@dataclass(frozen=True)
class FSpec:
    """Closed right-side family with nonpositive t-derivative.

    kind "zero":         f == 0
    kind "constant":     f == H
    kind "radial_decay": f(r, t) = sign * phi(r)
    kind "separable":    f(r, t) = sign * phi(r) * h(t-clamped); the height
                         factor is frozen on the half-line where it would
                         make f increasing in t, so f_t <= 0 by construction.
    """

    kind: str
    H: float = 0.0
    phi: DecaySpec | None = None
    h: HeightSpec | None = None
    sign: int = 1

    def __post_init__(self):
        if self.kind == "zero":
            return
        if self.kind == "constant":
            if not math.isfinite(self.H):
                raise ValidationError("constant source needs a finite H")
            return
        if self.kind not in ("radial_decay", "separable"):
            raise ValidationError(f"unknown source kind {self.kind!r}")
        if self.sign not in (-1, 1):
            raise ValidationError("sign must be +1 or -1")
        if self.phi is None:
            raise ValidationError(f"{self.kind} source needs a decay profile")
        if self.kind == "separable" and self.h is None:
            raise ValidationError("separable source needs a height profile")

    def __call__(self, r: float, t: float) -> float:
        if self.kind == "zero":
            return 0.0
        if self.kind == "constant":
            return self.H
        phi = float(self.phi(abs(r)))
        if self.kind == "radial_decay":
            return self.sign * phi
        t_eff = max(t, 0.0) if self.sign > 0 else min(t, 0.0)
        return self.sign * phi * float(self.h(t_eff))

    def kernel_params(self) -> tuple[float, ...]:
        if self.kind == "zero":
            return (K.SRC_ZERO,)
        if self.kind == "constant":
            return (K.SRC_CONSTANT, self.H)
        pc = float(_PHI_CODES[self.phi.family])
        p2 = self.phi.b if self.phi.family == "sech" else self.phi.p
        if self.kind == "radial_decay":
            return (K.SRC_RADIAL_DECAY, pc, self.phi.a, p2, float(self.sign))
        h = self.h
        hc = float(_H_CODES[h.family])
        return (K.SRC_SEPARABLE, pc, self.phi.a, p2, hc, h.c0, h.b,
                float(self.sign))

    def to_json(self) -> dict:
        out = {"kind": self.kind}
        if self.kind == "constant":
            out["H"] = self.H
        elif self.kind != "zero":
            out["phi"] = self.phi.to_json()
            out["sign"] = self.sign
            if self.kind == "separable":
                out["h"] = self.h.to_json()
        return out

    @staticmethod
    def from_json(obj: dict) -> "FSpec":
        kind = obj.get("kind")
        if kind == "zero":
            return FSpec("zero")
        if kind == "constant":
            return FSpec("constant", H=float(obj["H"]))
        if kind == "radial_decay":
            return FSpec("radial_decay", phi=DecaySpec.from_json(obj["phi"]),
                         sign=int(obj.get("sign", 1)))
        if kind == "separable":
            return FSpec("separable", phi=DecaySpec.from_json(obj["phi"]),
                         h=HeightSpec.from_json(obj["h"]),
                         sign=int(obj.get("sign", 1)))
        raise ValidationError(f"unknown source kind {kind!r}")


@dataclass(frozen=True)
class RadialProblem:
    n: int
    R: float
    c: float
    f: FSpec
    rk_tol: float = 1e-10
    eps_g: float = 1e-9
    record_hmax: float = 0.005

    def __post_init__(self):
        if self.n < 2:
            raise ValidationError("dimension must be >= 2")
        if self.R <= 0.0:
            raise ValidationError("ball radius must be positive")
        if not math.isfinite(self.c):
            raise ValidationError("boundary value must be finite")


@dataclass(frozen=True)
class RadialSolution:
    r: np.ndarray
    w: np.ndarray
    g: np.ndarray
    center_value: float
    outcome: str  # "Solved" | "GradientBlowup"
    r_star: float | None = None

    def to_json(self) -> dict:
        out = {
            "format_version": 1,
            "outcome": self.outcome,
            "center_value": self.center_value,
            "samples": int(self.r.size),
        }
        if self.r_star is not None:
            out["r_star"] = self.r_star
        return out

    def dump_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["r", "w", "g"])
            for r, w, g in zip(self.r, self.w, self.g):
                writer.writerow([repr(float(r)), repr(float(w)), repr(float(g))])


def integrate_radial(p: RadialProblem, w0: float,
                     record: bool = True) -> RadialSolution:
    """March from the center with the series start; candidate for the solve.

    Outcome Solved means the march reached R (the boundary value is whatever
    w(R) came out as); GradientBlowup carries the radius where |g| hit
    1 - eps_g.
    """
    if not math.isfinite(w0):
        raise ValidationError("center value must be finite")
    f0 = p.f(0.0, w0)
    # series: w(r) = w0 - f0 r^2/(2n) + O(r^4), g(r) = -f0 r/n + O(r^3)
    g_start = -f0 * R_EPS / p.n
    w_start = w0 - f0 * R_EPS * R_EPS / (2.0 * p.n)
    status, x, w, g, samples, _ = K.run_integration(
        K.MODE_RADIAL, R_EPS, w_start, g_start, p.R, p.n, p.rk_tol, p.eps_g,
        p.f.kernel_params(), record=record, hmax=p.record_hmax if record else 1e18)
    if status == K.STATUS_STEP_UNDERFLOW:
        raise StepUnderflow("adaptive step underflow in the radial march")
    if record:
        r_arr = np.concatenate([[0.0], samples[:, 0]])
        w_arr = np.concatenate([[w0], samples[:, 1]])
        g_arr = np.concatenate([[0.0], samples[:, 2]])
    else:
        r_arr = np.array([0.0, x])
        w_arr = np.array([w0, w])
        g_arr = np.array([0.0, g])
    if status == K.STATUS_REACHED_END:
        return RadialSolution(r_arr, w_arr, g_arr, w0, "Solved")
    return RadialSolution(r_arr, w_arr, g_arr, w0, "GradientBlowup", r_star=x)


def constant_blowup_radius(H: float) -> float:
    """n = 2 closed form: (sinh r g)' = -H sinh r gives g = -H tanh(r/2)."""
    if H <= 1.0:
        return math.inf
    return 2.0 * math.atanh(1.0 / H)


_SWEEP = (0.0, 1.0, -1.0, 2.0, -2.0, 4.0, -4.0, 8.0, -8.0, 16.0, -16.0,
          32.0, -32.0)


def solve_radial_dirichlet(p: RadialProblem) -> RadialSolution:
    """Shoot on the center value until w(R) = c within 1e-9.

    The map w0 -> w(R) is nondecreasing because f_t <= 0; for t-independent
    sources it is an exact translation, so the first secant step lands.  If
    every sweep value blows up before R the obstruction is reported as a
    GradientBlowup outcome.
    """
    evals: list[tuple[float, float]] = []
    blowups: list[RadialSolution] = []

    def shoot(w0: float) -> RadialSolution:
        cand = integrate_radial(p, w0, record=False)
        if cand.outcome == "Solved":
            evals.append((w0, float(cand.w[-1])))
        else:
            blowups.append(cand)
        return cand

    lo_pair = hi_pair = None
    for off in _SWEEP:
        cand = shoot(p.c + off)
        if cand.outcome != "Solved":
            continue
        wr = float(cand.w[-1])
        if wr <= p.c and (lo_pair is None or wr > lo_pair[1]):
            lo_pair = (p.c + off, wr)
        if wr >= p.c and (hi_pair is None or wr < hi_pair[1]):
            hi_pair = (p.c + off, wr)
        if lo_pair is not None and hi_pair is not None:
            break
    if not evals:
        # every center value blew up: the nonexistence obstruction
        star = min(b.r_star for b in blowups)
        full = integrate_radial(p, p.c, record=True)
        return RadialSolution(full.r, full.w, full.g, p.c, "GradientBlowup",
                              r_star=star if full.r_star is None else full.r_star)
    if lo_pair is None or hi_pair is None:
        raise NoBracket("center-value sweep could not bracket the boundary value")

    (a, fa), (b, fb) = lo_pair, hi_pair
    w0 = a if fa == p.c else (b if fb == p.c else None)
    if w0 is None:
        w0 = a + (p.c - fa) * (b - a) / (fb - fa) if fb != fa else 0.5 * (a + b)
        for _ in range(80):
            cand = shoot(w0)
            if cand.outcome != "Solved":
                # blowup inside the bracket: retreat toward the surviving side
                w0 = 0.5 * (a + b)
                continue
            wr = float(cand.w[-1])
            if abs(wr - p.c) <= 1e-9:
                break
            if wr < p.c:
                a, fa = w0, wr
            else:
                b, fb = w0, wr
            w0 = a + (p.c - fa) * (b - a) / (fb - fa) if fb != fa else 0.5 * (a + b)
            if not a <= w0 <= b:
                w0 = 0.5 * (a + b)
        else:
            raise NoBracket("center-value iteration failed to reach the boundary value")

    pairs = sorted(evals)
    if any(pairs[i + 1][1] < pairs[i][1] - 1e-9 for i in range(len(pairs) - 1)):
        warnings.warn("shooting map w0 -> w(R) not monotone within tolerance",
                      RuntimeWarning, stacklevel=2)
    final = integrate_radial(p, w0, record=True)
    if final.outcome != "Solved" or abs(float(final.w[-1]) - p.c) > 1e-8:
        raise NumericalError("recorded radial solve drifted from the boundary value")
    return final


def flux_residual(p: RadialProblem, sol: RadialSolution) -> float:
    """Flux identity residual max |sinh^(n-1)(r) g + int_0^r f sinh^(n-1)|.

    Normalized by the flux scale (max 1) so the figure stays meaningful when
    sinh^(n-1) makes the raw terms large.
    """
    n1 = p.n - 1
    sh = np.sinh(sol.r) ** n1
    src = np.array([p.f(float(r), float(w)) for r, w in zip(sol.r, sol.w)]) * sh
    integral = PchipInterpolator(sol.r, src).antiderivative()(sol.r) \
        if sol.r.size > 1 else np.zeros(1)
    scale = max(1.0, float(np.max(np.abs(integral))),
                float(np.max(np.abs(sh * sol.g))))
    return float(np.max(np.abs(sh * sol.g + integral)) / scale)


def compare_with_radial_barrier(p: RadialProblem, M: float,
                                profile_scale: float = 1.0) -> dict:
    """Comparison test: the Dirichlet solution stays below the radial barrier.

    Requires a radial_decay source (so |f| <= phi pointwise) and M >= c.
    profile_scale is a test hook: scaling the computed solution breaks the
    comparison and must be detected.
    """
    from .barriers import radial_barrier

    if p.f.kind not in ("zero", "radial_decay"):
        raise ValidationError("comparison needs a radial majorant source")
    if M < p.c:
        raise ValidationError("barrier asymptote M must dominate the boundary value")
    phi = p.f.phi if p.f.kind == "radial_decay" else DecaySpec("zero")
    rb = radial_barrier(p.n, phi, M)
    sol = solve_radial_dirichlet(p)
    vals = profile_scale * sol.w
    bar = rb.v(sol.r)
    gap = bar - vals
    worst = float(np.min(gap))
    if worst < -1e-9:
        k = int(np.argmin(gap))
        raise NumericalError(
            f"comparison violated: solution {vals[k]:.6g} above barrier "
            f"{bar[k]:.6g} at r = {sol.r[k]:.6g}")
    return {
        "format_version": 1,
        "passed": True,
        "min_gap": worst,
        "center_value": sol.center_value,
        "samples": int(sol.r.size),
    }


def save_outcome(sol: RadialSolution, path) -> None:
    with open(path, "w") as fh:
        json.dump(sol.to_json(), fh, indent=2, sort_keys=True)
        fh.write("\n")
