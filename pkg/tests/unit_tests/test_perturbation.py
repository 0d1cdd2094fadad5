"""
Perturbációs korlát tesztek
"""
import json
import math

import numpy as np
import pytest

from analysis.perturbation import (
    PerturbationAnalyzer,
    PerturbationInputs,
    check_admissible,
    condition_estimate,
    first_order_bounds,
    gap_norm,
    perturbation_bound,
    perturbation_inputs,
    random_perturbation,
    remark_diagnostics,
    stability_matrix,
    structured_perturbation,
    subtractive_bound,
)
from config.experiment_config import ExperimentConfig
from core.exceptions import BoundInadmissibleError, PerturbationTooLargeError
from core.linalg_kernel import apply_bilinear, inf_norm, inf_norm_inverse, kron_vec, ones

FAMILY_P = ExperimentConfig.PERTURBATION_P_VALUES
XSTAR = np.array([0.25])


def scalar_inputs(delta: float) -> PerturbationInputs:
    """A skalár példa bemenetei dB = [delta] mellett"""
    return PerturbationInputs(
        delta=delta,
        ell=1.0 / 0.6,
        b_tilde=0.8 + delta,
        gap_norm=0.9375,
        xstar_norm=0.25,
        comp_norm=0.75,
    )


class TestStabilityMatrix:
    def test_scalar(self, scalar_qve):
        assert stability_matrix(scalar_qve, XSTAR)[0, 0] == pytest.approx(0.6)

    def test_zero_vector_gives_identity(self, two_phase_qve):
        assert np.array_equal(stability_matrix(two_phase_qve, np.zeros(2)), np.eye(2))

    @pytest.mark.parametrize('p', FAMILY_P)
    def test_family_ell(self, family_case, p):
        case = family_case(p)
        expected = ExperimentConfig.REFERENCE_STATICS[p]['ell']
        assert inf_norm_inverse(stability_matrix(case.q, case.xstar)) == pytest.approx(expected, rel=0.01)


class TestPerturbationInputs:
    def test_scalar(self, scalar_qve):
        inputs = perturbation_inputs(scalar_qve, XSTAR, [[1e-4]])
        assert inputs.delta == pytest.approx(1e-4)
        assert inputs.ell == pytest.approx(1.0 / 0.6, rel=1e-12)
        assert inputs.b_tilde == pytest.approx(0.8001)
        assert inputs.gap_norm == pytest.approx(0.9375)
        assert inputs.xstar_norm == 0.25
        assert inputs.comp_norm == 0.75

    def test_zero_perturbation(self, scalar_qve):
        inputs = perturbation_inputs(scalar_qve, XSTAR, [[0.0]])
        assert inputs.delta == 0.0
        assert inputs.b_tilde == pytest.approx(0.8)

    @pytest.mark.parametrize('p', FAMILY_P)
    def test_family_gap_norm(self, family_case, p):
        case = family_case(p)
        expected = ExperimentConfig.REFERENCE_STATICS[p]['gap_norm']
        assert case.gap_norm == pytest.approx(expected, rel=0.01)

    @pytest.mark.parametrize('p', FAMILY_P)
    def test_gap_norm_closed_form(self, family_case, p):
        x = family_case(p).xstar
        explicit = inf_norm(kron_vec(x, x) - kron_vec(ones(9), ones(9)))
        assert abs(gap_norm(x) - explicit) <= 1e-14

    def test_perturbed_b_outside_unit_interval(self, scalar_qve):
        with pytest.raises(PerturbationTooLargeError):
            perturbation_inputs(scalar_qve, XSTAR, [[0.5]])


class TestAdmissibility:
    def test_small_delta(self):
        assert check_admissible(scalar_inputs(1e-4)) == (True, True)

    def test_zero_delta(self):
        assert check_admissible(scalar_inputs(0.0)) == (True, True)

    def test_huge_delta(self):
        assert check_admissible(scalar_inputs(1.0)) == (False, False)

    def test_condition_values(self):
        inp = scalar_inputs(1e-4)
        lhs1 = inp.xstar_norm * inp.delta + math.sqrt(inp.b_tilde * inp.gap_norm * inp.delta)
        assert lhs1 == pytest.approx(8.686e-3, rel=1e-3)
        assert lhs1 <= 0.3


class TestPerturbationBound:
    def test_scalar_value(self):
        assert perturbation_bound(scalar_inputs(1e-4)) == pytest.approx(1.5630e-4, abs=1e-7)

    def test_zero_delta_is_exactly_zero(self):
        assert perturbation_bound(scalar_inputs(0.0)) == 0.0

    def test_inadmissible(self):
        with pytest.raises(BoundInadmissibleError):
            perturbation_bound(scalar_inputs(1.0))

    def test_agrees_with_subtractive_form(self):
        inp = scalar_inputs(1e-4)
        assert subtractive_bound(inp) == pytest.approx(perturbation_bound(inp), rel=1e-8)

    def test_is_smaller_root(self):
        for delta in (1e-8, 1e-6, 1e-4, 1e-3):
            inp = scalar_inputs(delta)
            xi = perturbation_bound(inp)
            value = (inp.ell * inp.b_tilde * xi ** 2
                     + (2 * inp.ell * inp.delta * inp.xstar_norm - 1) * xi
                     + inp.ell * inp.gap_norm * inp.delta)
            assert abs(value) <= 1e-12 * inp.ell * inp.gap_norm * inp.delta

    def test_monotone_in_delta(self):
        deltas = np.logspace(-10, -2.5, 40)
        bounds = [perturbation_bound(scalar_inputs(d)) for d in deltas]
        assert all(b2 >= b1 for b1, b2 in zip(bounds, bounds[1:]))


class TestFirstOrder:
    def test_zero_delta(self):
        assert first_order_bounds(scalar_inputs(0.0), 0.8) == (0.0, 0.0)

    def test_scalar_absolute(self):
        absolute, relative = first_order_bounds(scalar_inputs(1e-4), 0.8)
        assert absolute == pytest.approx(1.5625e-4, rel=1e-12)
        assert relative == pytest.approx(1.5625e-4 / 0.25, rel=1e-12)

    def test_ratio_tends_to_one(self):
        for delta in (1e-8, 1e-6):
            inp = scalar_inputs(delta)
            ratio = first_order_bounds(inp, 0.8)[0] / perturbation_bound(inp)
            assert abs(ratio - 1) <= 10 * inp.ell ** 2 * inp.b_tilde * inp.delta
        assert first_order_bounds(scalar_inputs(1e-8), 0.8)[0] / perturbation_bound(scalar_inputs(1e-8)) \
            == pytest.approx(1.0, rel=0.01)

    def test_relative_undefined_at_zero_solution(self):
        inp = PerturbationInputs(1e-4, 1.0, 0.5, 1.0, 0.0, 1.0)
        absolute, relative = first_order_bounds(inp, 0.5)
        assert absolute == pytest.approx(1e-4)
        assert relative is None


class TestConditionEstimate:
    def test_scalar(self, scalar_qve):
        assert condition_estimate(scalar_qve, XSTAR) == pytest.approx(5.0, rel=1e-12)

    @pytest.mark.parametrize('p', FAMILY_P)
    def test_family(self, family_case, p):
        expected = ExperimentConfig.REFERENCE_STATICS[p]['kappa_tilde']
        assert family_case(p).kappa_tilde == pytest.approx(expected, rel=0.01)


class TestPerronDiagnostics:
    def test_scalar_equality_case(self, scalar_qve):
        rho_two, rho_R, rho_IL = remark_diagnostics(scalar_qve, XSTAR)
        assert rho_two == pytest.approx(2.0, abs=1e-14)
        assert rho_R == pytest.approx(1.6, abs=1e-14)
        assert rho_IL == pytest.approx(0.4, abs=1e-14)
        assert rho_R + rho_IL == pytest.approx(2.0, abs=1e-14)

    @pytest.mark.parametrize('p', FAMILY_P)
    def test_family_identity(self, family_case, p):
        case = family_case(p)
        rho_two, rho_R, rho_IL = remark_diagnostics(case.q, case.xstar)
        assert rho_two == pytest.approx(2.0, abs=1e-8)
        assert rho_R + rho_IL >= 2.0 - 1e-10

    def test_near_critical_stability_radius(self, family_case):
        case = family_case(0.9)
        _, _, rho_IL = remark_diagnostics(case.q, case.xstar)
        assert 1.0 - 1e-3 < rho_IL < 1.0


class TestGenerators:
    def test_structured_zero(self, scalar_qve):
        dB, da = structured_perturbation(scalar_qve, 0.0)
        assert not dB.any() and not da.any()

    def test_structured_scalar(self, scalar_qve):
        dB, da = structured_perturbation(scalar_qve, 1.25e-4)
        assert dB[0, 0] == pytest.approx(1e-4)
        assert da[0] == pytest.approx(-1e-4)

    def test_structured_too_large(self, scalar_qve):
        with pytest.raises(PerturbationTooLargeError):
            structured_perturbation(scalar_qve, 0.5)

    def test_random_zero(self, scalar_qve):
        dB, da = random_perturbation(scalar_qve, 0.0, seed=1)
        assert not dB.any() and not da.any()

    def test_random_is_deterministic(self, two_phase_qve):
        first, _ = random_perturbation(two_phase_qve, 1e-6, seed=42)
        second, _ = random_perturbation(two_phase_qve, 1e-6, seed=42)
        other, _ = random_perturbation(two_phase_qve, 1e-6, seed=43)
        assert np.array_equal(first, second)
        assert not np.array_equal(first, other)

    def test_random_scale(self, two_phase_qve):
        dB, _ = random_perturbation(two_phase_qve, 1e-6, seed=7)
        assert inf_norm(dB) == pytest.approx(1e-6 * inf_norm(two_phase_qve.B), rel=1e-12)
        assert np.all(dB > 0)

    @pytest.mark.parametrize('p', [2.0, 20.0])
    def test_consistency_after_either_generator(self, family_case, p):
        q = family_case(p).q
        e = ones(q.n)
        for dB, da in (structured_perturbation(q, 1e-8), random_perturbation(q, 1e-8, seed=3)):
            perturbed = q.perturbed(da, dB)
            assert inf_norm(perturbed.a + apply_bilinear(perturbed.B, e, e) - e) <= 1e-13


class TestAnalyzer:
    def test_scalar_shift_is_bounded(self, scalar_qve):
        dB, da = structured_perturbation(scalar_qve, 1.25e-4)
        report = PerturbationAnalyzer().analyze(scalar_qve, XSTAR, dB, da, eta=1.25e-4)
        assert report.cond1_ok and report.cond2_ok
        assert report.xi_star == pytest.approx(1.5630e-4, abs=1e-7)
        assert report.actual_shift == pytest.approx(1.5623e-4, abs=1e-8)
        assert report.bound_holds

    def test_measure_shift_matches_closed_form(self, scalar_qve):
        dB, da = structured_perturbation(scalar_qve, 1.25e-4)
        x_tilde, shift = PerturbationAnalyzer().measure_shift(scalar_qve, XSTAR, dB, da)
        assert x_tilde[0] == pytest.approx(0.1999 / 0.8001, abs=1e-12)

    def test_inadmissible_report_has_no_bound(self, scalar_qve, mocker):
        mocker.patch('analysis.perturbation.check_admissible', return_value=(False, False))
        report = PerturbationAnalyzer().analyze(scalar_qve, XSTAR, [[1e-4]])
        assert report.xi_star is None
        assert report.bound_holds is None

    def test_random_bound_validity(self, family_case):
        case = family_case(5.0)
        analyzer = PerturbationAnalyzer()
        for seed in range(10):
            dB, da = random_perturbation(case.q, 1e-8, seed)
            report = analyzer.analyze(case.q, case.xstar, dB, da, eta=1e-8, seed=seed)
            assert report.cond1_ok
            assert report.actual_shift <= report.xi_star
            assert report.generator == 'PCG64'

    def test_report_serializes(self, scalar_qve):
        dB, da = structured_perturbation(scalar_qve, 1.25e-4)
        report = PerturbationAnalyzer().analyze(scalar_qve, XSTAR, dB, da, eta=1.25e-4, seed=None)
        data = json.loads(report.to_json())
        assert data['inputs']['gap_norm'] == pytest.approx(0.9375)
        assert data['bound_holds'] is True
