"""Tests for the constraint feasibility checkers."""

from __future__ import annotations

import numpy as np
import pytest

from fairexposure.constraints import disparate_treatment
from fairexposure.core import Item, PositionBias, RankingProblem, position_bias_vector
from fairexposure.feasibility import (
    check_dt_feasibility,
    check_feasibility,
    dt_exposure_ratio_range,
    probe_feasibility,
)
from fairexposure.lp import solve_problem

from .test_core import make_problem

# Frozen oracle values under the natural-log bias.
RANGE_3V3_N6 = (0.5508095940041025, 1.8155094081250733)
MAX_2V3_N6 = 2.0842791555921623
MIN_2V3_N6 = 0.5230533712553324
JOBSEEKER_REQUIRED = 1.0384615384615385

# 3 vs 3 with mean utilities 0.9 and 0.45: required ratio 2.0 sits outside
# the N=6 range above but inside the N=12 range (max 2.5421).
ADVERSARIAL_UTILITIES = (0.9, 0.9, 0.9, 0.45, 0.45, 0.45)


def padded_adversarial_problem(fillers: int) -> RankingProblem:
    items = [
        Item(id=f"item{i}", group=g, utility=u)
        for i, (u, g) in enumerate(zip(ADVERSARIAL_UTILITIES, ("M",) * 3 + ("F",) * 3))
    ]
    items += [
        Item(id=f"pad{k}", group="other", utility=0.5) for k in range(fillers)
    ]
    bias = PositionBias.log_discount(len(items))
    return RankingProblem(items=tuple(items), position_bias=bias)


class TestExposureRatioRange:
    def test_three_vs_three_oracle(self):
        v = position_bias_vector(6)
        lo, hi = dt_exposure_ratio_range(3, 3, v)
        assert hi == pytest.approx(1.81552, abs=1e-4)
        assert (lo, hi) == pytest.approx(RANGE_3V3_N6, abs=1e-9)

    def test_flat_bias_pins_ratio_to_one(self):
        assert dt_exposure_ratio_range(1, 1, np.array([1.0, 1.0])) == (1.0, 1.0)

    def test_equal_sizes_are_reciprocal(self):
        v = position_bias_vector(9)
        for size in (1, 2, 4):
            lo, hi = dt_exposure_ratio_range(size, size, v)
            assert lo == pytest.approx(1.0 / hi, abs=1e-12)

    def test_unequal_sizes(self):
        v = position_bias_vector(6)
        lo, hi = dt_exposure_ratio_range(2, 3, v)
        assert hi == pytest.approx(MAX_2V3_N6, abs=1e-9)
        assert lo == pytest.approx(MIN_2V3_N6, abs=1e-9)

    def test_zero_tail_gives_unbounded_maximum(self):
        v = np.array([1.0, 0.6, 0.0, 0.0])
        lo, hi = dt_exposure_ratio_range(2, 2, v)
        assert hi == np.inf
        assert lo == 0.0

    def test_range_always_brackets_one(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            n = int(rng.integers(2, 12))
            s0 = int(rng.integers(1, n))
            s1 = int(rng.integers(1, n - s0 + 1))
            lo, hi = dt_exposure_ratio_range(s0, s1, position_bias_vector(n))
            assert lo <= 1.0 + 1e-12 and hi >= 1.0 - 1e-12

    def test_widening_tail_never_shrinks_range(self):
        previous = RANGE_3V3_N6
        for n in (8, 10, 12):
            lo, hi = dt_exposure_ratio_range(3, 3, position_bias_vector(n))
            assert hi >= previous[1] - 1e-12
            assert lo <= previous[0] + 1e-12
            previous = (lo, hi)

    def test_rejects_bad_inputs(self):
        v = position_bias_vector(4)
        with pytest.raises(ValueError, match="do not fit"):
            dt_exposure_ratio_range(3, 2, v)
        with pytest.raises(ValueError, match="at least 1"):
            dt_exposure_ratio_range(0, 2, v)
        with pytest.raises(ValueError, match="non-increasing"):
            dt_exposure_ratio_range(1, 1, np.array([0.2, 0.8]))
        with pytest.raises(ValueError, match="entirely zero"):
            dt_exposure_ratio_range(1, 1, np.zeros(3))


class TestCheckDtFeasibility:
    def test_jobseeker_feasible(self):
        verdict = check_dt_feasibility(make_problem(), "M", "F")
        assert verdict.feasible
        assert verdict.method == "closed-form"
        assert verdict.required_ratio == pytest.approx(JOBSEEKER_REQUIRED, abs=1e-12)
        assert verdict.attainable_range == pytest.approx(RANGE_3V3_N6, abs=1e-9)
        assert verdict.note == ""

    def test_adversarial_infeasible_with_remedy_note(self):
        problem = make_problem(utilities=ADVERSARIAL_UTILITIES)
        verdict = check_dt_feasibility(problem, "M", "F")
        assert not verdict.feasible
        assert verdict.required_ratio == pytest.approx(2.0, abs=1e-12)
        assert "neither group" in verdict.note

    def test_extreme_ratio_infeasible(self):
        problem = make_problem(utilities=(0.99, 0.99, 0.99, 0.01, 0.01, 0.01))
        verdict = check_dt_feasibility(problem, "M", "F")
        assert not verdict.feasible
        assert verdict.required_ratio == pytest.approx(99.0, abs=1e-9)

    def test_fillers_restore_feasibility(self):
        assert not check_dt_feasibility(padded_adversarial_problem(0), "M", "F").feasible
        verdict = check_dt_feasibility(padded_adversarial_problem(6), "M", "F")
        assert verdict.feasible
        assert verdict.attainable_range[1] == pytest.approx(2.5421295665968042, abs=1e-9)

    def test_equal_means_always_feasible(self):
        problem = make_problem(utilities=(0.3, 0.5, 0.7, 0.7, 0.5, 0.3))
        assert check_dt_feasibility(problem, "M", "F").feasible

    def test_zero_mean_utility_rejected(self):
        problem = make_problem(utilities=(0.5, 0.5, 0.5, 0.0, 0.0, 0.0))
        with pytest.raises(ValueError, match="zero mean utility"):
            check_dt_feasibility(problem, "M", "F")

    def test_verdict_serializes(self):
        verdict = check_dt_feasibility(make_problem(), "M", "F")
        payload = verdict.to_dict()
        assert payload["feasible"] is True
        assert payload["attainable_range"] == pytest.approx(list(RANGE_3V3_N6))


class TestCheckFeasibility:
    def test_parity_is_witnessed(self):
        verdict = check_feasibility(make_problem(), "demographic-parity", "M", "F")
        assert verdict.feasible and verdict.method == "witness"

    def test_impact_uses_lp_probe(self):
        verdict = check_feasibility(make_problem(), "disparate-impact", "M", "F")
        assert verdict.feasible and verdict.method == "lp-probe"

    def test_treatment_dispatches_to_closed_form(self):
        verdict = check_feasibility(make_problem(), "disparate-treatment", "M", "F")
        assert verdict.method == "closed-form"

    def test_unknown_notion_rejected(self):
        with pytest.raises(ValueError, match="notion"):
            check_feasibility(make_problem(), "equal-opportunity", "M", "F")

    def test_probe_detects_infeasibility(self):
        problem = make_problem(utilities=ADVERSARIAL_UTILITIES)
        constraint = disparate_treatment(problem, "M", "F")
        verdict = probe_feasibility(
            problem, [constraint], "disparate-treatment", ("M", "F")
        )
        assert not verdict.feasible
        assert verdict.method == "lp-probe"
        assert "neither group" in verdict.note


class TestOracleEquivalence:
    def test_verdict_matches_lp_status(self):
        rng = np.random.default_rng(12)
        checked = solved_feasible = 0
        for _ in range(30):
            n = int(rng.integers(4, 11))
            split = int(rng.integers(1, n))
            groups = ("M",) * split + ("F",) * (n - split)
            utilities = tuple(rng.uniform(0.05, 1.0, size=n).round(4))
            problem = make_problem(utilities=utilities, groups=groups)
            verdict = check_dt_feasibility(problem, "M", "F")
            report = solve_problem(problem, [disparate_treatment(problem, "M", "F")])
            assert verdict.feasible == (report.status == "optimal")
            checked += 1
            solved_feasible += report.status == "optimal"
        assert checked == 30
        # the instance mix must exercise both outcomes to mean anything
        assert 0 < solved_feasible < 30
