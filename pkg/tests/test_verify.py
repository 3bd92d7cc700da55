import json

import pytest

from hscherk.errors import ValidationError
from hscherk.verify import PROPERTIES, REQUIRED_PROPERTIES, VerificationPlan, \
    report_json, run_plan

TINY = VerificationPlan(seed=7, trials=2, dims=(2,))


@pytest.fixture(scope="module")
def tiny_report():
    return run_plan(TINY)


class TestRegistry:
    def test_ids_unique_and_required(self):
        ids = [p.id for p in PROPERTIES]
        assert len(ids) == len(set(ids))
        assert REQUIRED_PROPERTIES == set(ids)

    def test_every_property_has_anchor(self):
        for p in PROPERTIES:
            assert p.anchor and p.tol >= 0.0


class TestPlan:
    def test_validation(self):
        with pytest.raises(ValidationError):
            VerificationPlan(trials=0)
        with pytest.raises(ValidationError):
            VerificationPlan(dims=(1, 2))
        with pytest.raises(ValidationError):
            VerificationPlan(tolerances=(("no-such-property", 1.0),))

    def test_tolerance_override(self):
        plan = VerificationPlan(tolerances=(("radial-flux", 1e-3),))
        assert plan.tolerance("radial-flux") == 1e-3
        assert plan.tolerance("psi-monotone-t") == 1e-12

    def test_json(self):
        obj = TINY.to_json()
        assert obj == {"seed": 7, "trials": 2, "dims": [2], "tolerances": {}}


class TestRunPlan:
    def test_tiny_plan_passes(self, tiny_report):
        assert tiny_report["overall_pass"] is True
        assert all(not e["failures"] for e in tiny_report["properties"])

    def test_one_entry_per_property_and_dim(self, tiny_report):
        keys = [(e["id"], e["n"]) for e in tiny_report["properties"]]
        assert len(keys) == len(set(keys))
        assert {k[0] for k in keys} == REQUIRED_PROPERTIES
        assert {k[1] for k in keys} == {2}

    def test_entry_shape(self, tiny_report):
        for e in tiny_report["properties"]:
            assert set(e) == {"id", "anchor", "n", "trials", "tolerance",
                              "failures", "worst_margin"}
            assert e["trials"] >= 1

    def test_report_serializes(self, tiny_report):
        text = report_json(tiny_report)
        assert json.loads(text) == tiny_report

    def test_byte_identical_reruns(self, tiny_report):
        again = run_plan(TINY)
        assert report_json(again) == report_json(tiny_report)

    def test_forced_failure_carries_replay(self):
        plan = VerificationPlan(seed=7, trials=1, dims=(2,),
                                tolerances=(("flux-monotone", -1.0),))
        report = run_plan(plan)
        assert report["overall_pass"] is False
        bad = [e for e in report["properties"]
               if e["id"] == "flux-monotone" and e["failures"]]
        assert bad
        fail = bad[0]["failures"][0]
        assert "replay" in fail and "margin" in fail
        replay = fail["replay"]
        assert replay["seed"] == 7 and replay["n"] == 2
