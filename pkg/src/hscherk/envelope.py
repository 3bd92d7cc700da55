"""Closed-form data families for the right-hand side majorant.

The decay profile phi(r) bounds |f| radially and must have an integrable
square root; the height profile h(t) bounds |f| in the graph variable and
vanishes at +/-infinity.  Their geometric mean

    psi(d, t) = sqrt(phi(|d - offset|) * h(max(t, 0)))

is the separable envelope that drives the shooting system.  Only closed-form
families are admitted: the improper integrals and limits the envelope must
certify are evaluated analytically per family, never sampled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import ValidationError

_GRID = np.linspace(0.0, 50.0, 1000)

# family codes shared with the compiled kernels
PHI_ZERO, PHI_SECH, PHI_INVPOWER = 0, 1, 2
H_ZERO, H_SECH, H_GAUSS = 0, 1, 2


@dataclass(frozen=True)
class DecaySpec:
    """Radial decay profile phi(r), nonincreasing with integrable sqrt.

    family "sech":     phi(r) = a * sech(b r)
    family "invpower": phi(r) = a * (1 + r^2)^(-p/2), p > 2
    family "zero":     phi == 0
    """

    family: str
    a: float = 0.0
    b: float = 0.0
    p: float = 0.0

    def __post_init__(self):
        if self.family == "zero":
            return
        if self.family == "sech":
            if self.a <= 0.0 or self.b <= 0.0:
                raise ValidationError("sech decay needs a > 0 and b > 0")
        elif self.family == "invpower":
            if self.a <= 0.0:
                raise ValidationError("invpower decay needs a > 0")
            if self.p <= 2.0:
                raise ValidationError("invpower decay needs p > 2 for sqrt-integrability")
        else:
            raise ValidationError(f"unknown decay family {self.family!r}")
        vals = self(_GRID)
        if np.any(np.diff(vals) > 1e-12):
            raise ValidationError("decay profile must be nonincreasing")

    def __call__(self, r):
        r = np.abs(r)
        if self.family == "zero":
            return np.zeros_like(np.asarray(r, dtype=float))
        if self.family == "sech":
            return self.a / np.cosh(self.b * r)
        return self.a * (1.0 + r * r) ** (-0.5 * self.p)

    def deriv(self, r):
        """d phi / dr for r >= 0 (vanishes at r = 0 for every family)."""
        r = np.asarray(r, dtype=float)
        if self.family == "zero":
            return np.zeros_like(r)
        if self.family == "sech":
            br = self.b * r
            return -self.a * self.b * np.tanh(br) / np.cosh(br)
        return -self.a * self.p * r * (1.0 + r * r) ** (-0.5 * self.p - 1.0)

    def integral_tail(self, r0: float) -> float:
        """Closed-form upper bound on int_{r0}^inf phi(r) dr."""
        if self.family == "zero":
            return 0.0
        if self.family == "sech":
            # sech(x) <= 2 exp(-x)
            return self.a * (2.0 / self.b) * math.exp(-self.b * r0)
        r0 = max(r0, 1.0)
        return self.a * r0 ** (1.0 - self.p) / (self.p - 1.0)

    def sqrt_tail(self, r0: float) -> float:
        """Closed-form upper bound on int_{r0}^inf sqrt(phi(r)) dr."""
        if self.family == "zero":
            return 0.0
        if self.family == "sech":
            # sech(x) <= 2 exp(-x)
            return math.sqrt(2.0 * self.a) * (2.0 / self.b) * math.exp(-0.5 * self.b * r0)
        r0 = max(r0, 1.0)
        # (1+r^2)^(-p/4) <= r^(-p/2)
        return math.sqrt(self.a) * r0 ** (1.0 - 0.5 * self.p) / (0.5 * self.p - 1.0)

    def to_json(self) -> dict:
        out = {"family": self.family}
        if self.family == "sech":
            out.update(a=self.a, b=self.b)
        elif self.family == "invpower":
            out.update(a=self.a, p=self.p)
        return out

    @staticmethod
    def from_json(obj: dict) -> "DecaySpec":
        fam = obj.get("family")
        if fam == "zero":
            return DecaySpec("zero")
        if fam == "sech":
            return DecaySpec("sech", a=float(obj["a"]), b=float(obj["b"]))
        if fam == "invpower":
            return DecaySpec("invpower", a=float(obj["a"]), p=float(obj["p"]))
        raise ValidationError(f"unknown decay family {fam!r}")


@dataclass(frozen=True)
class HeightSpec:
    """Even, decreasing-on-[0,inf) height profile h(t) with h(+-inf) = 0.

    family "sech":  h(t) = c0 * sech(b t)
    family "gauss": h(t) = c0 * exp(-b t^2)
    family "zero":  h == 0
    """

    family: str
    c0: float = 0.0
    b: float = 0.0

    def __post_init__(self):
        if self.family == "zero":
            return
        if self.family not in ("sech", "gauss"):
            raise ValidationError(f"unknown height family {self.family!r}")
        if self.c0 <= 0.0 or self.b <= 0.0:
            raise ValidationError(f"{self.family} height needs c0 > 0 and b > 0")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.family == "zero":
            return np.zeros_like(t)
        if self.family == "sech":
            return self.c0 / np.cosh(self.b * t)
        return self.c0 * np.exp(-self.b * t * t)

    def deriv(self, t):
        t = np.asarray(t, dtype=float)
        if self.family == "zero":
            return np.zeros_like(t)
        if self.family == "sech":
            bt = self.b * t
            return -self.c0 * self.b * np.tanh(bt) / np.cosh(bt)
        return -2.0 * self.b * t * self.c0 * np.exp(-self.b * t * t)

    def to_json(self) -> dict:
        out = {"family": self.family}
        if self.family != "zero":
            out.update(c0=self.c0, b=self.b)
        return out

    @staticmethod
    def from_json(obj: dict) -> "HeightSpec":
        fam = obj.get("family")
        if fam == "zero":
            return HeightSpec("zero")
        if fam in ("sech", "gauss"):
            return HeightSpec(fam, c0=float(obj["c0"]), b=float(obj["b"]))
        raise ValidationError(f"unknown height family {fam!r}")


@dataclass(frozen=True)
class PsiEnvelope:
    """Separable majorant psi(d,t) attached to a wall at signed offset d(o)."""

    phi: DecaySpec
    h: HeightSpec
    offset: float = 0.0
    n: int = 2

    def __post_init__(self):
        if self.n < 2:
            raise ValidationError("dimension must be >= 2")
        if not math.isfinite(self.offset):
            raise ValidationError("offset must be finite")

    @property
    def is_zero(self) -> bool:
        return self.phi.family == "zero" or self.h.family == "zero"

    def to_json(self) -> dict:
        return {
            "phi": self.phi.to_json(),
            "h": self.h.to_json(),
            "offset": self.offset,
            "n": self.n,
        }

    @staticmethod
    def from_json(obj: dict) -> "PsiEnvelope":
        return PsiEnvelope(
            phi=DecaySpec.from_json(obj["phi"]),
            h=HeightSpec.from_json(obj["h"]),
            offset=float(obj.get("offset", 0.0)),
            n=int(obj.get("n", 2)),
        )


def psi_eval(env: PsiEnvelope, d, t):
    """Pointwise envelope value sqrt(phi(|d - offset|) h(max(t,0)))."""
    if env.is_zero:
        return np.zeros_like(np.asarray(d, dtype=float)) if np.ndim(d) else 0.0
    t_eff = np.maximum(np.asarray(t, dtype=float), 0.0)
    val = np.sqrt(env.phi(np.abs(np.asarray(d, dtype=float) - env.offset)) * env.h(t_eff))
    return float(val) if np.ndim(val) == 0 else val


def psi_partials(env: PsiEnvelope, d: float, t: float) -> tuple[float, float]:
    """Closed-form (d psi/dd, d psi/dt); both vanish wherever psi does."""
    if env.is_zero:
        return 0.0, 0.0
    u = abs(d - env.offset)
    t_eff = max(t, 0.0)
    phi_v = float(env.phi(u))
    h_v = float(env.h(t_eff))
    val = math.sqrt(phi_v * h_v)
    if val == 0.0:
        return 0.0, 0.0
    dd = math.copysign(1.0, d - env.offset) * float(env.phi.deriv(u)) * h_v / (2.0 * val) \
        if d != env.offset else 0.0
    dt = phi_v * float(env.h.deriv(t)) / (2.0 * val) if t > 0.0 else 0.0
    return dd, dt


def psi_sup(env: PsiEnvelope) -> float:
    """sup psi = psi(offset, 0) = sqrt(phi(0) h(0))."""
    if env.is_zero:
        return 0.0
    return math.sqrt(float(env.phi(0.0)) * float(env.h(0.0)))


def d_tilde(env: PsiEnvelope) -> float:
    """Crest of the d-profile: psi increases below it and decreases above."""
    return env.offset


def psi_tail_integral(env: PsiEnvelope, d1: float, t: float) -> float:
    """Upper bound on int_{d1}^inf psi(s, t) ds, finite for validated envelopes.

    Quadrature up to a cutoff plus the family's analytic sqrt-phi tail; the
    result dominates any converged quadrature of the true integral.
    """
    if env.is_zero:
        return 0.0
    hfac = math.sqrt(float(env.h(max(t, 0.0))))
    u1 = d1 - env.offset
    total = 0.0
    if u1 < 0.0:
        part, _ = quad(lambda u: math.sqrt(float(env.phi(u))), 0.0, -u1, limit=200)
        total += part
        u1 = 0.0
    cutoff = u1 + 40.0
    part, _ = quad(lambda u: math.sqrt(float(env.phi(u))), u1, cutoff, limit=200)
    total += part + env.phi.sqrt_tail(cutoff)
    return hfac * total * (1.0 + 1e-9) + 1e-300


def check_coth_global_bound(spec: DecaySpec, n: int) -> bool:
    """True iff phi(r) <= (n-1) coth(r) for all r > 0.

    Grid scan on (0, 50] plus the monotone tail comparison: phi decreases to
    its value at 50 while coth decreases to 1, so phi(50) <= n-1 settles the
    tail.
    """
    if spec.family == "zero":
        return True
    r = np.linspace(1e-4, 50.0, 20000)
    if np.any(spec(r) > (n - 1) / np.tanh(r)):
        return False
    return float(spec(50.0)) <= n - 1


def kernel_params(env: PsiEnvelope) -> tuple[float, ...]:
    """Flat float encoding of the envelope for the compiled integrator."""
    codes = {"zero": PHI_ZERO, "sech": PHI_SECH, "invpower": PHI_INVPOWER}
    hcodes = {"zero": H_ZERO, "sech": H_SECH, "gauss": H_GAUSS}
    if env.is_zero:
        return (float(PHI_ZERO), 0.0, 0.0, float(H_ZERO), 0.0, 0.0, env.offset)
    pc = codes[env.phi.family]
    p2 = env.phi.b if env.phi.family == "sech" else env.phi.p
    return (
        float(pc), env.phi.a, p2,
        float(hcodes[env.h.family]), env.h.c0, env.h.b,
        env.offset,
    )
