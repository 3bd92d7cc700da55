import csv
import math

import numpy as np
import pytest

from hscherk.envelope import DecaySpec, HeightSpec, PsiEnvelope
from hscherk.errors import ValidationError
from hscherk.shooting import ShootingConfig, blowup_witness, choose_d0, \
    classify_gamma, ell, find_gamma0, full_profile, integrate, \
    residual_integral_forms, rho_eval, sigma_bound, solve_height, \
    trajectory_to_csv

ZERO2 = PsiEnvelope(phi=DecaySpec("zero"), h=HeightSpec("zero"), n=2)
SECH2 = PsiEnvelope(phi=DecaySpec("sech", a=1.0, b=1.0),
                    h=HeightSpec("sech", c0=1.0, b=1.0), n=2)


def cfg_for(env, d0=1.0, **kw):
    return ShootingConfig(n=env.n, d0=d0, **kw)


@pytest.fixture(scope="module")
def res_zero():
    return find_gamma0(ZERO2, cfg_for(ZERO2), 0.0)


@pytest.fixture(scope="module")
def res_sech():
    d0 = choose_d0(SECH2, 2, 0.25)
    cfg = cfg_for(SECH2, d0)
    return cfg, find_gamma0(SECH2, cfg, 0.0)


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValidationError):
            ShootingConfig(n=1, d0=1.0)
        with pytest.raises(ValidationError):
            ShootingConfig(n=2, d0=-1.0)
        with pytest.raises(ValidationError):
            ShootingConfig(n=2, d0=1.0, eps_g=0.0)

    def test_choose_d0_needs_positive_margin(self):
        with pytest.raises(ValidationError):
            choose_d0(SECH2, 2, 0.0)

    def test_choose_d0_clears_crest(self):
        env = PsiEnvelope(phi=SECH2.phi, h=SECH2.h, offset=1.3, n=2)
        d0 = choose_d0(env, 2, 0.01)
        assert d0 > 1.3


class TestIntegrate:
    def test_rejects_bad_gamma(self):
        with pytest.raises(ValidationError):
            integrate(ZERO2, cfg_for(ZERO2), 0.0, 1.5, "backward_to_0")

    def test_rejects_bad_direction(self):
        with pytest.raises(ValidationError):
            integrate(ZERO2, cfg_for(ZERO2), 0.0, -0.5, "sideways")

    def test_zero_psi_flux_conservation(self):
        # with psi == 0, cosh^(n-1)(d) g(d) is exactly conserved
        tr = integrate(ZERO2, cfg_for(ZERO2), 0.0, -0.3, "forward_to_horizon")
        flux = np.cosh(tr.d) * tr.g
        assert np.max(np.abs(flux - flux[0])) < 1e-8

    def test_starts_at_anchor(self):
        tr = integrate(SECH2, cfg_for(SECH2, 2.0), 0.5, -0.4, "backward_to_0")
        assert tr.d[0] == 2.0 and tr.w[0] == 0.5 and tr.g[0] == -0.4


class TestClassify:
    def test_split_around_gamma0(self):
        g0 = -1.0 / math.cosh(1.0)
        cfg = cfg_for(ZERO2)
        assert classify_gamma(ZERO2, cfg, 0.0, g0 + 1e-3) == "InA"
        assert classify_gamma(ZERO2, cfg, 0.0, g0 - 1e-3) == "NotInA"

    def test_rejects_out_of_range(self):
        with pytest.raises(ValidationError):
            classify_gamma(ZERO2, cfg_for(ZERO2), 0.0, -1.0)


class TestFindGamma0:
    def test_zero_psi_oracle(self, res_zero):
        assert res_zero.gamma0 == pytest.approx(-1.0 / math.cosh(1.0),
                                                rel=1e-8)

    def test_bracket_invariants(self, res_zero):
        r = res_zero
        assert r.gamma_lo < r.gamma0 < r.gamma_hi < 0.0
        assert r.bracket_width == pytest.approx(r.gamma_hi - r.gamma_lo)
        assert r.delta_est == pytest.approx(1.0 + r.gamma0)

    def test_witness_classifications(self, res_sech):
        _, res = res_sech
        assert res.trajectory_below.classification == "HitsMinusOne"
        assert res.trajectory_above.classification != "HitsMinusOne"

    def test_endpoints_classify_consistently(self, res_sech):
        cfg, res = res_sech
        assert classify_gamma(SECH2, cfg, 0.0, res.gamma_lo) == "NotInA"
        assert classify_gamma(SECH2, cfg, 0.0, res.gamma_hi) == "InA"

    def test_warm_bracket_matches_cold(self, res_sech):
        cfg, res = res_sech
        warm = find_gamma0(SECH2, cfg, 0.0, record_witnesses=False,
                           bracket=(res.gamma0 - 1e-4, res.gamma0 + 1e-4))
        assert warm.gamma0 == pytest.approx(res.gamma0, abs=5e-12)

    def test_bad_warm_bracket_recovers(self, res_sech):
        cfg, res = res_sech
        warm = find_gamma0(SECH2, cfg, 0.0, record_witnesses=False,
                           bracket=(-0.1, -0.05))
        assert warm.gamma0 == pytest.approx(res.gamma0, abs=5e-12)


class TestHeightMap:
    def test_ell_zero_psi_closed_form(self, res_zero):
        value, tail = ell(ZERO2, cfg_for(ZERO2), 0.0, gamma0_result=res_zero)
        assert value == pytest.approx(math.log(math.tanh(0.5)), abs=1e-8)
        assert 0.0 <= tail < 1e-9

    def test_sigma_bounds_shift(self, res_sech):
        cfg, res = res_sech
        sigma = sigma_bound(SECH2, cfg, gamma0=res.gamma0)
        value, tail = ell(SECH2, cfg, 0.0, gamma0_result=res)
        assert abs(value - 0.0) <= sigma + tail

    def test_solve_height_hits_target(self, res_sech):
        cfg, _ = res_sech
        for c in (-1.0, 0.0, 2.0):
            h_c, gamma0 = solve_height(SECH2, cfg, c)
            res = find_gamma0(SECH2, cfg, h_c, record_witnesses=False)
            value, _ = ell(SECH2, cfg, h_c, gamma0_result=res)
            assert abs(value - c) <= 1e-6
            assert gamma0 == pytest.approx(res.gamma0, abs=1e-10)

    def test_rho_eval_zero_psi(self):
        assert rho_eval(ZERO2, cfg_for(ZERO2), 3.0) == 0.0


class TestProfiles:
    def test_blowup_witness_hits_event(self, res_sech):
        cfg, res = res_sech
        wit = blowup_witness(SECH2, cfg, 0.0, res)
        assert wit.classification == "HitsMinusOne"
        assert wit.d_stop is not None and wit.d_stop > 0.0
        assert 1.0 + wit.g[-1] < 10 * cfg.eps_g

    def test_full_profile_shape(self, res_sech):
        cfg, res = res_sech
        prof = full_profile(SECH2, cfg, 0.0, res)
        assert np.all(np.diff(prof.d) > 0.0)
        assert prof.d[0] == prof.d_stop
        assert prof.d[-1] == pytest.approx(cfg.d_max)
        assert np.all(np.diff(prof.w) < 0.0)

    def test_integral_residuals_small(self, res_sech):
        # forward branch only: g/sqrt(1-g^2) is singular near the wall
        cfg, res = res_sech
        fwd = integrate(SECH2, cfg, 0.0, res.gamma_hi, "forward_to_horizon")
        res_w, res_g = residual_integral_forms(SECH2, cfg, fwd)
        assert res_w < 1e-6 and res_g < 1e-6

    def test_csv_round_trip(self, res_sech, tmp_path):
        cfg, res = res_sech
        prof = full_profile(SECH2, cfg, 0.0, res)
        path = tmp_path / "prof.csv"
        trajectory_to_csv(SECH2, cfg, prof, path)
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0][:3] == ["d", "w", "g"]
        back = np.array([[float(v) for v in row[:3]] for row in rows[1:]])
        assert np.array_equal(back[:, 0], prof.d)
        assert np.array_equal(back[:, 1], prof.w)
        assert np.array_equal(back[:, 2], prof.g)
