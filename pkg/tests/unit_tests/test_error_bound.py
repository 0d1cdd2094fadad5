"""
A posteriori hibakorlát tesztek
"""
import json

import numpy as np
import pytest

from analysis.error_bound import certify_trace, error_bound, error_estimate, omega_star
from config.experiment_config import ExperimentConfig


class TestErrorBound:
    def test_scalar_example(self, scalar_qve):
        report = error_bound(scalar_qve, [0.24])
        assert report.gamma == pytest.approx(0.00608, abs=1e-15)
        assert report.ell_hat == pytest.approx(1.0 / 0.616, rel=1e-12)
        assert report.con1_ok and report.con21_ok and report.con22_ok
        assert report.omega_star == pytest.approx(0.01, abs=1e-7)
        assert report.estimate == pytest.approx(0.009870, abs=1e-6)
        assert report.certified

    def test_bound_covers_true_error(self, scalar_qve):
        for xhat in (0.2, 0.24, 0.249):
            report = error_bound(scalar_qve, [xhat])
            assert report.certified
            assert abs(xhat - 0.25) <= report.omega_star * (1 + 1e-12)

    def test_exact_solution(self, scalar_qve):
        report = error_bound(scalar_qve, [0.25])
        assert report.gamma == 0.0
        assert report.omega_star == 0.0

    def test_zero_residual(self, scalar_qve, mocker):
        mocker.patch('analysis.error_bound.residual', return_value=np.zeros(1))
        report = error_bound(scalar_qve, [0.2])
        assert report.gamma == 0.0
        assert report.omega_star == 0.0

    def test_overshoot_fails_con1(self, scalar_qve):
        report = error_bound(scalar_qve, [1.2])
        assert not report.con1_ok
        assert report.omega_star is None
        assert not report.certified

    def test_negative_iterate_fails_con1(self, scalar_qve):
        report = error_bound(scalar_qve, [-0.1])
        assert not report.con1_ok
        assert report.omega_star is None

    def test_unstable_iterate_fails_con1(self, scalar_qve):
        # 1.6 * 0.7 > 1
        assert not error_bound(scalar_qve, [0.7]).con1_ok

    def test_estimate_matches_report(self, two_phase_qve):
        xhat = np.array([0.1, 0.2])
        assert error_estimate(two_phase_qve, xhat) == pytest.approx(error_bound(two_phase_qve, xhat).estimate)

    def test_report_serializes(self, scalar_qve):
        data = json.loads(error_bound(scalar_qve, [0.24]).to_json())
        assert data['certified'] is True
        assert data['true_error'] is None


class TestOmegaStar:
    def test_zero_residual(self):
        assert omega_star(0.0, 5.0, 0.8) == 0.0

    def test_negative_discriminant(self):
        assert omega_star(1.0, 10.0, 1.0) is None

    def test_bracket(self):
        for gamma in np.logspace(-12, -6, 20):
            omega = omega_star(gamma, 100.0, 0.9)
            assert 100.0 * gamma <= omega <= 2.0 * 100.0 * gamma

    def test_monotone_in_gamma(self):
        gammas = np.logspace(-12, -5.5, 30)
        values = [omega_star(g, 200.0, 0.95) for g in gammas]
        assert all(v2 > v1 for v1, v2 in zip(values, values[1:]))

    def test_is_smaller_root(self):
        ell, b = 150.0, 0.9
        for gamma in (1e-10, 1e-8, 1e-6):
            omega = omega_star(gamma, ell, b)
            value = ell * b * omega ** 2 - omega + ell * gamma
            assert abs(value) <= 1e-12 * ell * gamma


class TestCertifyTrace:
    def test_scalar_trace(self, scalar_qve):
        from core.solvers import newton_iteration

        report = newton_iteration(scalar_qve)
        bounds = certify_trace(scalar_qve, report, [0.25])
        assert [b.iteration for b in bounds] == list(range(len(report.iterates)))
        # x0 = 0 esetén ||e - x|| = 1, így con22 nem teljesülhet
        assert bounds[0].con1_ok and not bounds[0].certified
        for b in bounds[1:]:
            assert b.certified
            assert b.true_error <= b.omega_star * (1 + 1e-12) + 1e-15

    @pytest.mark.parametrize('p', ExperimentConfig.ERROR_BOUND_P_VALUES)
    def test_family_trace_ratio(self, family_case, p):
        case = family_case(p)
        bounds = certify_trace(case.q, case.solution, case.xstar)
        assert all(b.con1_ok for b in bounds)
        final = len(bounds) - 1
        checked = 0
        for b in bounds:
            if b.certified and b.iteration != final and 1e-10 <= b.gamma <= 1e-4:
                assert 1.0 <= b.omega_star / b.true_error <= 10.0
                checked += 1
        assert checked > 0

    @pytest.mark.parametrize('p', ExperimentConfig.ERROR_BOUND_P_VALUES)
    def test_family_certified_iterates_cover_error(self, family_case, p):
        case = family_case(p)
        for b in certify_trace(case.q, case.solution, case.xstar):
            if b.certified and b.gamma > 1e-12:
                assert b.true_error <= b.omega_star

    def test_depth_trace_satisfies_con1(self, scalar_qve, two_phase_qve):
        from core.solvers import depth_iteration

        for q in (scalar_qve, two_phase_qve):
            bounds = certify_trace(q, depth_iteration(q))
            assert len(bounds) > 2
            assert all(b.con1_ok for b in bounds)

    def test_family_depth_iterates_satisfy_con1(self, family_case):
        from core.solvers import depth_iteration

        case = family_case(20.0)
        iterates = depth_iteration(case.q, tol=1e-10).iterates
        for x in iterates[::max(1, len(iterates) // 50)] + [iterates[-1]]:
            assert error_bound(case.q, x).con1_ok

    def test_without_reference(self, scalar_qve):
        from core.solvers import depth_iteration

        bounds = certify_trace(scalar_qve, depth_iteration(scalar_qve, maxit=1000))
        assert all(b.true_error is None for b in bounds)
