import json
import math

import numpy as np
import pytest

from hscherk.barriers import RadialBarrier, ScherkBarrier, SolverOptions, \
    build_sub, build_super, c0_threshold, envelope_barrier, eval_barrier, \
    explicit_scherk, profile_equation_residual, radial_barrier, \
    rho_tilde_eval, save_manifest, uniform_bound_experiment
from hscherk.envelope import DecaySpec, HeightSpec
from hscherk.errors import ConfigurationError, CothBoundViolated, \
    TooCloseToWall, ValidationError
from hscherk.hgeom import BallPoint, BoundaryPoint, GeodesicWall, origin, \
    ray_point, wall_concentric_at

OPTS = SolverOptions(rk_tol=1e-9, eps_g=1e-7, bisect_tol=1e-9, d_max=20.0,
                     record_hmax=0.02)
PHI = DecaySpec("sech", a=1.0, b=1.0)
H = HeightSpec("sech", c0=1.0, b=1.0)


def wall_e1(n=2):
    normal = np.zeros(n)
    normal[0] = 1.0
    return GeodesicWall("hyperplane", normal=normal)


@pytest.fixture(scope="module")
def sup2():
    return build_super(PHI, H, wall_e1(), 0.0, 2, OPTS)


@pytest.fixture(scope="module")
def sub2():
    return build_sub(PHI, H, wall_e1(), 0.0, 2, OPTS)


class TestExplicit:
    def test_G_closed_form(self):
        G, _ = explicit_scherk(3, 1.0, 0.0)
        assert G(2.0) == pytest.approx(-math.cosh(2.0) ** -2, rel=1e-14)

    def test_W_n2_log_tanh(self):
        _, W = explicit_scherk(2, 1.0, 0.5)
        want = 0.5 + math.log(math.tanh(0.5)) - math.log(math.tanh(1.5))
        assert W(3.0) == pytest.approx(want, abs=1e-12)

    def test_W_quadrature_matches_n2_form(self):
        # the n > 2 quadrature path must agree with the closed form when the
        # integrand is written for n = 2 values
        _, W2 = explicit_scherk(2, 1.0, 0.0)
        _, W3 = explicit_scherk(3, 1.0, 0.0)
        assert W3(2.0) != W2(2.0)  # sanity: different n differ
        assert W3(1.0) == pytest.approx(0.0, abs=1e-12)

    def test_W_diverges_at_wall(self):
        _, W = explicit_scherk(2, 1.0, 0.0)
        assert W(1e-8) > 15.0
        with pytest.raises(ValidationError):
            W(0.0)


class TestBuildSuper:
    def test_zero_envelope_matches_explicit(self):
        sup = build_super(DecaySpec("zero"), HeightSpec("zero"), wall_e1(),
                          0.0, 2, SolverOptions(margin=0.25, d_max=20.0))
        _, W = explicit_scherk(2, sup.d0, sup.h_c)
        d = np.linspace(max(sup.d_min, 0.05), 20.0, 200)
        assert np.max(np.abs(sup.profile(d) - W(d))) < 1e-6

    def test_profile_decreasing_to_c(self, sup2):
        d = np.linspace(sup2.d_min, sup2.d_max, 300)
        w = sup2.profile(d)
        assert np.all(np.diff(w) < 0.0)
        assert w[-1] == pytest.approx(sup2.c, abs=1e-5)
        # strict domination holds up to the height-solve tolerance at d_max
        assert np.all(w > sup2.c - 1e-6)

    def test_sub_mirrors_super(self, sup2, sub2):
        d = np.linspace(sup2.d_min + 0.01, 10.0, 50)
        assert np.allclose(sub2.profile(d), -sup2.profile(d), atol=1e-12)
        assert np.all(sub2.profile(d) < sup2.profile(d))

    def test_equation_residual(self, sup2):
        assert profile_equation_residual(sup2, 0.2, 15.0) < 1e-5

    def test_manifest_and_csv_round_trip(self, sup2, tmp_path):
        mpath = tmp_path / "m.json"
        save_manifest(sup2, mpath)
        m = json.loads(mpath.read_text())
        assert m["format_version"] == 1
        assert m["kind"] == "Super" and m["n"] == 2
        assert m["h_c"] == sup2.h_c and m["gamma0"] == sup2.gamma0
        cpath = tmp_path / "p.csv"
        sup2.dump_profile_csv(cpath)
        rows = cpath.read_text().strip().splitlines()
        assert rows[0] == "d,w"
        d0_back, w0_back = (float(v) for v in rows[1].split(","))
        assert d0_back == float(sup2.d_samples[0])
        assert w0_back == float(sup2.w_samples[0])


class TestEvalBarrier:
    def test_value_along_ray(self, sup2):
        x = BallPoint(np.array([math.tanh(1.0), 0.0]))
        d = 2.0 * math.atanh(math.tanh(1.0))  # distance 2 artanh|x| from origin
        assert eval_barrier(sup2, x) == pytest.approx(float(sup2.profile(d)),
                                                      abs=1e-12)

    def test_too_close_to_wall(self, sup2):
        x = BallPoint(np.array([1e-9, 0.0]))
        with pytest.raises(TooCloseToWall):
            eval_barrier(sup2, x)

    def test_envelope_requires_same_kind(self, sup2, sub2):
        with pytest.raises(ConfigurationError):
            envelope_barrier(sup2, sub2, origin(2))

    def test_envelope_min_of_supers(self):
        # flipped concentric walls: each positive side is the large component
        # containing the other wall, so the arrangement precondition holds
        def away_wall(p, t):
            w = wall_concentric_at(p, t)
            return GeodesicWall("orthosphere", side=-1, center=w.center,
                                radius=w.radius)

        p = BoundaryPoint(np.array([1.0, 0.0]))
        q = BoundaryPoint(np.array([-1.0, 0.0]))
        s1 = build_super(PHI, H, away_wall(p, 1.0), 0.0, 2, OPTS)
        s2 = build_super(PHI, H, away_wall(q, 1.0), 0.0, 2, OPTS)
        x = origin(2)
        want = min(eval_barrier(s1, x), eval_barrier(s2, x))
        assert envelope_barrier(s1, s2, x) == want

    def test_envelope_rejects_bad_arrangement(self):
        s1 = build_super(PHI, H, wall_e1(), 0.0, 2, OPTS)
        flipped = GeodesicWall("hyperplane", side=-1,
                               normal=np.array([1.0, 0.0]))
        s2 = build_super(PHI, H, flipped, 0.0, 2, OPTS)
        with pytest.raises(ConfigurationError):
            envelope_barrier(s1, s2, BallPoint(np.array([0.0, 0.3])))


class TestRadialBarrier:
    def test_rho_tilde_sech_oracle(self):
        # n = 2, phi = sech: rho~(1) = log(cosh 1)/sinh 1
        got = rho_tilde_eval(2, PHI, 1.0)
        assert got == pytest.approx(math.log(math.cosh(1.0)) / math.sinh(1.0),
                                    abs=1e-10)

    def test_rho_tilde_small_r_series(self):
        assert rho_tilde_eval(2, PHI, 1e-8) == pytest.approx(0.5e-8, rel=1e-6)

    def test_barrier_shape(self):
        rb = radial_barrier(2, PHI, 3.0)
        assert rb.sup_rho < 1.0
        assert np.all(np.diff(rb.v_samples) <= 0.0)
        assert rb.v(0.0) > 3.0
        assert abs(rb.v(39.0) - 3.0) < 1e-6

    def test_coth_violation_raises(self):
        with pytest.raises(CothBoundViolated):
            radial_barrier(2, DecaySpec("sech", a=5.0, b=0.01), 1.0)

    def test_csv_dump(self, tmp_path):
        rb = radial_barrier(2, PHI, 1.0)
        path = tmp_path / "rb.csv"
        rb.dump_csv(path)
        rows = path.read_text().strip().splitlines()
        assert rows[0] == "r,rho_tilde,v"
        assert len(rows) == rb.r_samples.size + 1


class TestUniformBound:
    def test_c0_threshold_zero_when_small(self):
        assert c0_threshold(DecaySpec("sech", a=0.01, b=1.0),
                            HeightSpec("sech", c0=0.01, b=1.0), 2) == 0.0

    def test_rejects_c_below_threshold(self):
        c0 = c0_threshold(PHI, H, 2)
        assert c0 > 0.0
        with pytest.raises(ValidationError):
            uniform_bound_experiment(PHI, H, 2, 0.5 * c0, [0.0], 4.0, OPTS)

    def test_bound_dominated_by_near_offsets(self):
        c0 = c0_threshold(PHI, H, 2)
        M, per = uniform_bound_experiment(PHI, H, 2, c0, [-2.0, 0.0, 2.0],
                                          4.0, OPTS)
        assert M == max(per.values())
        assert per[2.0] > per[-2.0]  # crest closer to the evaluation band
