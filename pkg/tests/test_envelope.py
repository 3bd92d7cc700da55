import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from hscherk.envelope import DecaySpec, HeightSpec, PsiEnvelope, \
    check_coth_global_bound, d_tilde, psi_eval, psi_partials, psi_sup, \
    psi_tail_integral
from hscherk.errors import ValidationError


def sech_env(offset=0.0, n=2):
    return PsiEnvelope(phi=DecaySpec("sech", a=1.0, b=1.0),
                       h=HeightSpec("sech", c0=1.0, b=1.0),
                       offset=offset, n=n)


class TestSpecs:
    def test_decay_validation(self):
        with pytest.raises(ValidationError):
            DecaySpec("sech", a=-1.0, b=1.0)
        with pytest.raises(ValidationError):
            DecaySpec("invpower", a=1.0, p=2.0)  # needs p > 2
        with pytest.raises(ValidationError):
            DecaySpec("weird")

    def test_height_validation(self):
        with pytest.raises(ValidationError):
            HeightSpec("gauss", c0=0.0, b=1.0)
        with pytest.raises(ValidationError):
            HeightSpec("weird")

    def test_envelope_validation(self):
        with pytest.raises(ValidationError):
            sech_env(n=1)
        with pytest.raises(ValidationError):
            sech_env(offset=math.inf)

    def test_json_round_trip(self):
        env = PsiEnvelope(phi=DecaySpec("invpower", a=0.7, p=3.0),
                          h=HeightSpec("gauss", c0=0.5, b=0.8),
                          offset=-1.25, n=4)
        back = PsiEnvelope.from_json(env.to_json())
        assert back == env

    def test_zero_envelope(self):
        env = PsiEnvelope(phi=DecaySpec("zero"), h=HeightSpec("zero"))
        assert env.is_zero
        assert psi_eval(env, 1.0, 1.0) == 0.0
        assert psi_sup(env) == 0.0
        assert psi_tail_integral(env, 0.0, 0.0) == 0.0


class TestPsiEval:
    def test_separable_value(self):
        env = sech_env(offset=0.5)
        want = math.sqrt((1 / math.cosh(0.7)) * (1 / math.cosh(0.3)))
        assert psi_eval(env, 1.2, 0.3) == pytest.approx(want, rel=1e-14)

    def test_negative_t_clamped(self):
        env = sech_env()
        assert psi_eval(env, 1.0, -2.0) == psi_eval(env, 1.0, 0.0)

    @given(st.floats(-3.0, 3.0), st.floats(0.0, 4.0), st.floats(0.1, 4.0))
    @settings(max_examples=60, deadline=None)
    def test_symmetric_about_offset(self, offset, u, t):
        env = sech_env(offset=offset)
        assert psi_eval(env, offset + u, t) == pytest.approx(
            psi_eval(env, offset - u, t), rel=1e-12)

    @given(st.floats(-2.0, 2.0), st.floats(0.0, 5.0))
    @settings(max_examples=60, deadline=None)
    def test_sup_dominates(self, d, t):
        env = sech_env()
        assert psi_eval(env, d, t) <= psi_sup(env) + 1e-15

    def test_sup_attained_at_crest(self):
        env = sech_env(offset=1.5)
        assert psi_eval(env, d_tilde(env), 0.0) == pytest.approx(
            psi_sup(env), rel=1e-14)

    @given(st.floats(0.0, 4.0), st.floats(0.0, 4.0))
    @settings(max_examples=60, deadline=None)
    def test_monotone_in_t(self, t1, t2):
        lo, hi = sorted((t1, t2))
        env = sech_env()
        assert psi_eval(env, 0.7, hi) <= psi_eval(env, 0.7, lo) + 1e-15


class TestPartials:
    def test_match_finite_differences(self):
        env = PsiEnvelope(phi=DecaySpec("invpower", a=0.8, p=3.5),
                          h=HeightSpec("gauss", c0=1.2, b=0.6), offset=0.4)
        d, t, eps = 1.3, 0.9, 1e-6
        dd, dt = psi_partials(env, d, t)
        fd_d = (psi_eval(env, d + eps, t) - psi_eval(env, d - eps, t)) / (2 * eps)
        fd_t = (psi_eval(env, d, t + eps) - psi_eval(env, d, t - eps)) / (2 * eps)
        assert dd == pytest.approx(fd_d, abs=1e-8)
        assert dt == pytest.approx(fd_t, abs=1e-8)

    def test_vanish_at_crest_and_origin(self):
        env = sech_env(offset=0.5)
        dd, dt = psi_partials(env, 0.5, 0.0)
        assert dd == 0.0 and dt == 0.0


class TestTailIntegral:
    def test_dominates_quadrature(self):
        env = sech_env()
        for d1 in (0.0, 1.0, 4.0):
            ref, _ = quad(lambda s: psi_eval(env, s, 0.7), d1, 60.0)
            assert psi_tail_integral(env, d1, 0.7) >= ref

    def test_decreasing_in_d1(self):
        env = sech_env()
        vals = [psi_tail_integral(env, d1, 0.0) for d1 in (0.0, 2.0, 5.0)]
        assert vals[0] > vals[1] > vals[2] > 0.0


class TestCothBound:
    def test_modest_sech_passes(self):
        assert check_coth_global_bound(DecaySpec("sech", a=1.0, b=1.0), 2)

    def test_oversized_profile_fails(self):
        assert not check_coth_global_bound(DecaySpec("sech", a=5.0, b=0.01), 2)

    def test_higher_dimension_more_room(self):
        spec = DecaySpec("sech", a=2.5, b=0.01)
        assert not check_coth_global_bound(spec, 2)
        assert check_coth_global_bound(spec, 5)
