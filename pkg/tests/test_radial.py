import json
import math

import numpy as np
import pytest

from hscherk.envelope import DecaySpec, HeightSpec
from hscherk.errors import NumericalError, ValidationError
from hscherk.radial import FSpec, RadialProblem, RadialSolution, \
    compare_with_radial_barrier, constant_blowup_radius, flux_residual, \
    integrate_radial, save_outcome, solve_radial_dirichlet

SECH = DecaySpec("sech", a=1.0, b=1.0)


class TestFSpec:
    def test_validation(self):
        with pytest.raises(ValidationError):
            FSpec("constant", H=math.inf)
        with pytest.raises(ValidationError):
            FSpec("radial_decay")  # missing phi
        with pytest.raises(ValidationError):
            FSpec("separable", phi=SECH)  # missing h
        with pytest.raises(ValidationError):
            FSpec("radial_decay", phi=SECH, sign=2)
        with pytest.raises(ValidationError):
            FSpec("mystery")

    def test_values(self):
        assert FSpec("zero")(1.0, 5.0) == 0.0
        assert FSpec("constant", H=2.5)(3.0, -1.0) == 2.5
        f = FSpec("radial_decay", phi=SECH, sign=-1)
        assert f(1.0, 0.0) == pytest.approx(-1.0 / math.cosh(1.0), rel=1e-14)

    def test_separable_monotone_in_t(self):
        f = FSpec("separable", phi=SECH, h=HeightSpec("sech", c0=1.0, b=1.0))
        ts = np.linspace(-3.0, 3.0, 41)
        vals = [f(0.5, float(t)) for t in ts]
        assert all(b <= a + 1e-15 for a, b in zip(vals, vals[1:]))

    def test_json_round_trip(self):
        for f in (FSpec("zero"), FSpec("constant", H=1.5),
                  FSpec("radial_decay", phi=SECH, sign=-1),
                  FSpec("separable", phi=SECH,
                        h=HeightSpec("gauss", c0=0.7, b=1.2))):
            assert FSpec.from_json(f.to_json()) == f

    def test_problem_validation(self):
        with pytest.raises(ValidationError):
            RadialProblem(1, 1.0, 0.0, FSpec("zero"))
        with pytest.raises(ValidationError):
            RadialProblem(2, -1.0, 0.0, FSpec("zero"))


class TestIntegrateRadial:
    def test_zero_source_is_constant(self):
        p = RadialProblem(3, 2.0, 0.0, FSpec("zero"))
        sol = integrate_radial(p, 1.25)
        assert sol.outcome == "Solved"
        assert np.max(np.abs(sol.w - 1.25)) < 1e-12
        assert np.max(np.abs(sol.g)) < 1e-12

    def test_constant_blowup_radius_closed_form(self):
        assert constant_blowup_radius(0.5) == math.inf
        assert constant_blowup_radius(2.0) == pytest.approx(
            2.0 * math.atanh(0.5), rel=1e-14)

    def test_blowup_matches_closed_form(self):
        H = 2.0
        p = RadialProblem(2, 3.0, 0.0, FSpec("constant", H=H))
        sol = integrate_radial(p, 0.0)
        assert sol.outcome == "GradientBlowup"
        assert sol.r_star == pytest.approx(constant_blowup_radius(H), abs=1e-6)

    def test_rejects_nonfinite_center(self):
        p = RadialProblem(2, 1.0, 0.0, FSpec("zero"))
        with pytest.raises(ValidationError):
            integrate_radial(p, math.nan)


class TestDirichletSolve:
    def test_zero_source_exact(self):
        p = RadialProblem(2, 1.5, 0.75, FSpec("zero"))
        sol = solve_radial_dirichlet(p)
        assert sol.outcome == "Solved"
        assert sol.center_value == pytest.approx(0.75, abs=1e-9)

    def test_radial_decay_hits_boundary_value(self):
        p = RadialProblem(2, 2.0, -0.5, FSpec("radial_decay", phi=SECH))
        sol = solve_radial_dirichlet(p)
        assert sol.outcome == "Solved"
        assert float(sol.w[-1]) == pytest.approx(-0.5, abs=1e-8)
        assert sol.center_value > -0.5  # positive source pushes w down outward

    def test_supercritical_constant_blows_up(self):
        p = RadialProblem(2, 3.0, 0.0, FSpec("constant", H=1.5))
        sol = solve_radial_dirichlet(p)
        assert sol.outcome == "GradientBlowup"
        assert sol.r_star == pytest.approx(2.0 * math.atanh(1.0 / 1.5),
                                           abs=1e-6)

    def test_flux_residual_small(self):
        p = RadialProblem(3, 2.0, 0.0, FSpec("radial_decay", phi=SECH))
        sol = solve_radial_dirichlet(p)
        assert flux_residual(p, sol) < 1e-6


class TestBarrierComparison:
    def test_solution_below_barrier(self):
        p = RadialProblem(2, 2.0, 0.0, FSpec("radial_decay", phi=SECH, sign=-1))
        out = compare_with_radial_barrier(p, 2.0)
        assert out["passed"] and out["min_gap"] > 0.0

    def test_scaled_profile_detected(self):
        # c = M leaves only the tail as slack, so the scaled profile crosses
        p = RadialProblem(2, 2.0, 2.0, FSpec("radial_decay", phi=SECH, sign=-1))
        with pytest.raises(NumericalError):
            compare_with_radial_barrier(p, 2.0, profile_scale=1.5)

    def test_rejects_t_dependent_source(self):
        p = RadialProblem(2, 1.0, 0.0,
                          FSpec("separable", phi=SECH,
                                h=HeightSpec("sech", c0=1.0, b=1.0)))
        with pytest.raises(ValidationError):
            compare_with_radial_barrier(p, 1.0)


class TestSerialization:
    def test_save_outcome(self, tmp_path):
        p = RadialProblem(2, 3.0, 0.0, FSpec("constant", H=2.0))
        sol = solve_radial_dirichlet(p)
        path = tmp_path / "out.json"
        save_outcome(sol, path)
        obj = json.loads(path.read_text())
        assert obj["format_version"] == 1
        assert obj["outcome"] == "GradientBlowup"
        assert "r_star" in obj

    def test_dump_csv(self, tmp_path):
        p = RadialProblem(2, 1.0, 0.5, FSpec("zero"))
        sol = solve_radial_dirichlet(p)
        path = tmp_path / "sol.csv"
        sol.dump_csv(path)
        rows = path.read_text().strip().splitlines()
        assert rows[0] == "r,w,g"
        assert len(rows) == sol.r.size + 1
