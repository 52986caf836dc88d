import numpy as np
import pytest

from conftest import separated_support, separated_support_2d
from superres.certificate import (
    SeparationError,
    build_certificate,
    build_certificate_2d,
    build_interpolation_system,
    certificate_fourier_coeffs,
    eval_certificate,
    verify_certificate,
    verify_certificate_2d,
)
from superres.kernel import KernelSpec, kernel_eval

SPEC = KernelSpec(128)
LC = SPEC.lambda_c

ALPHA_BOUND = 1 + 8.824e-3
BETA_BOUND = 3.294e-2 * LC


class TestBuild1D:
    def test_single_spike_identity(self):
        cert = build_certificate([0.5], [1.0], SPEC)
        assert cert.alpha[0] == pytest.approx(1.0, abs=1e-14)
        assert abs(cert.beta[0]) < 1e-16

    def test_interpolation_constraints(self, rng):
        T = separated_support(rng, 9, 2 * LC)
        v = np.exp(2j * np.pi * rng.random(9))
        cert = build_certificate(T, v, SPEC)
        q = eval_certificate(cert, T, 0)
        q1 = eval_certificate(cert, T, 1)
        assert np.abs(q - v).max() <= 1e-9
        assert np.abs(q1).max() <= 1e-9 * SPEC.fc

    def test_coefficient_bounds(self, rng):
        for _ in range(3):
            m = int(rng.integers(4, 14))
            T = separated_support(rng, m, 2 * LC)
            v = np.exp(2j * np.pi * rng.random(m))
            cert = build_certificate(T, v, SPEC)
            assert np.abs(cert.alpha).max() <= ALPHA_BOUND
            assert np.abs(cert.beta).max() <= BETA_BOUND

    def test_leading_coefficient_near_pattern(self, rng):
        T = separated_support(rng, 10, 2 * LC)
        v = np.exp(2j * np.pi * rng.random(10))
        v[0] = 1.0
        cert = build_certificate(T, v, SPEC)
        assert cert.alpha[0].real >= 1 - 8.824e-3
        assert abs(cert.alpha[0].imag) <= 8.824e-3

    def test_scale_consistency(self, rng):
        T = separated_support(rng, 6, 2 * LC)
        v = np.exp(2j * np.pi * rng.random(6))
        theta = np.exp(0.731j)
        a1 = build_certificate(T, v, SPEC).alpha
        a2 = build_certificate(T, theta * v, SPEC).alpha
        assert np.abs(a2 - theta * a1).max() < 1e-12

    def test_pattern_validation(self):
        with pytest.raises(ValueError, match="unit modulus"):
            build_certificate([0.1, 0.5], [1.0, 0.5], SPEC)


class TestInterpolationSystem:
    def test_block_symmetries(self, rng):
        T = separated_support(rng, 7, 2 * LC)
        system = build_interpolation_system(T, SPEC)
        D0, D1, D2 = system.blocks["D0"], system.blocks["D1"], system.blocks["D2"]
        assert np.abs(D0 - D0.T).max() < 1e-12
        assert np.abs(D2 - D2.T).max() < 1e-12 * SPEC.fc**2
        assert np.abs(D1 + D1.T).max() < 1e-12 * SPEC.fc
        # full matrix equals its transpose after negating the off-diagonal blocks
        A = system.matrix
        m = len(T)
        flipped = A.T.copy()
        flipped[:m, m:] *= -1
        flipped[m:, :m] *= -1
        assert np.abs(A - flipped).max() < 1e-12 * SPEC.fc**2

    def test_diagnostics_within_reference_bounds(self, rng):
        # row-sum diagnostics stay below the published intermediate bounds
        for _ in range(3):
            T = separated_support(rng, int(rng.integers(5, 16)), 1.98 * LC)
            system = build_interpolation_system(T, SPEC)
            assert system.diagnostics["id_minus_D0"] <= 6.253e-3
            assert system.diagnostics["D1_norm"] <= 7.639e-2 * SPEC.fc
            assert system.diagnostics["id_minus_D2"] <= 1.053 * SPEC.fc**2


class TestEval1D:
    def test_midpoint_below_one(self):
        T = [0.3, 0.3 + 2 * LC]
        cert = build_certificate(T, [1.0, 1.0], SPEC)
        mid = 0.3 + LC
        assert abs(eval_certificate(cert, mid, 0)) < 1.0

    def test_second_derivative_by_finite_differences(self, rng):
        T = separated_support(rng, 5, 2 * LC)
        v = np.exp(2j * np.pi * rng.random(5))
        cert = build_certificate(T, v, SPEC)
        t0, h = 0.47, 1e-6 / SPEC.fc
        fd = (
            eval_certificate(cert, t0 + h, 0)
            - 2 * eval_certificate(cert, t0, 0)
            + eval_certificate(cert, t0 - h, 0)
        ) / h**2
        assert eval_certificate(cert, t0, 2) == pytest.approx(fd, rel=1e-3)


class TestFourierCoeffs:
    def test_single_spike_real_even(self):
        cert = build_certificate([0.0], [1.0], SPEC)
        ck = certificate_fourier_coeffs(cert)
        assert np.abs(ck.imag).max() < 1e-14
        assert np.abs(ck - ck[::-1]).max() < 1e-14

    def test_sum_equals_value_at_zero(self, rng):
        T = separated_support(rng, 6, 2 * LC)
        v = np.exp(2j * np.pi * rng.random(6))
        cert = build_certificate(T, v, SPEC)
        ck = certificate_fourier_coeffs(cert)
        assert ck.sum() == pytest.approx(eval_certificate(cert, 0.0, 0), abs=1e-10)

    def test_roundtrip_against_direct_evaluation(self, rng):
        T = separated_support(rng, 8, 2 * LC)
        v = np.exp(2j * np.pi * rng.random(8))
        cert = build_certificate(T, v, SPEC)
        ck = certificate_fourier_coeffs(cert)
        k = np.arange(-SPEC.fc, SPEC.fc + 1)
        ts = rng.random(16)
        series = np.exp(2j * np.pi * np.outer(ts, k)) @ ck
        direct = eval_certificate(cert, ts, 0)
        assert np.abs(series - direct).max() < 1e-8

    def test_parseval_against_grid_quadrature(self, rng):
        T = separated_support(rng, 5, 2 * LC)
        v = np.exp(2j * np.pi * rng.random(5))
        cert = build_certificate(T, v, SPEC)
        ck = certificate_fourier_coeffs(cert)
        M = 4096
        grid = np.arange(M) / M
        energy_grid = np.mean(np.abs(eval_certificate(cert, grid, 0)) ** 2)
        assert np.sum(np.abs(ck) ** 2) == pytest.approx(energy_grid, abs=1e-8)


class TestVerify1D:
    def test_feasible_at_two_lambda(self, rng):
        T = separated_support(rng, 8, 2 * LC)
        v = np.exp(2j * np.pi * rng.random(8))
        report = verify_certificate(build_certificate(T, v, SPEC), 64)
        assert report.feasible
        assert report.max_offgrid_modulus < 1.0

    def test_quadratic_envelope_at_2p5(self, rng):
        T = separated_support(rng, 8, 2.5 * LC)
        v = np.exp(2j * np.pi * rng.random(8))
        cert = build_certificate(T, v, SPEC)
        offsets = rng.uniform(-0.1649 * LC, 0.1649 * LC, 100)
        for tj in T[:3]:
            q = np.abs(eval_certificate(cert, tj + offsets, 0))
            envelope = 1 - 0.3353 * SPEC.fc**2 * offsets**2
            assert np.all(q <= envelope + 1e-9)

    def test_close_pair_is_infeasible(self):
        cert = build_certificate([0.3, 0.3 + 0.2 * LC], [1.0, -1.0], SPEC)
        assert not verify_certificate(cert, 64).feasible

    def test_real_pattern_at_1p87(self, rng):
        T = separated_support(rng, 10, 1.87 * LC)
        v = rng.choice([-1.0, 1.0], 10)
        report = verify_certificate(build_certificate(T, v, SPEC), 64)
        assert report.feasible

    def test_grid_validation(self, rng):
        cert = build_certificate([0.5], [1.0], SPEC)
        with pytest.raises(ValueError):
            verify_certificate(cert, 32)


class Test2D:
    def test_single_spike_identity(self):
        spec = KernelSpec(512)
        cert = build_certificate_2d([[0.25, 0.75]], [1.0], spec)
        assert cert.alpha[0] == pytest.approx(1.0, abs=1e-14)
        assert np.abs(cert.beta).max() < 1e-16

    def test_coefficient_bounds_and_feasibility(self, rng):
        spec = KernelSpec(512)
        lc = spec.lambda_c
        T = separated_support_2d(rng, 5, 2.38 * lc)
        v = rng.choice([-1.0, 1.0], 5)
        v[0] = 1.0
        cert = build_certificate_2d(T, v, spec)
        assert np.abs(cert.alpha).max() <= 1 + 5.577e-2
        assert np.abs(cert.beta).max() <= 2.930e-2 * lc
        assert cert.alpha[0].real >= 1 - 5.577e-2
        report = verify_certificate_2d(cert, 64)
        assert report.feasible

    def test_small_cutoff_warns(self):
        spec = KernelSpec(256)
        with pytest.warns(UserWarning, match="below 512"):
            build_certificate_2d([[0.5, 0.5]], [1.0], spec)

    def test_close_pair_infeasible(self, rng):
        spec = KernelSpec(512)
        lc = spec.lambda_c
        T = np.array([[0.4, 0.4], [0.4 + 0.5 * lc, 0.4]])
        cert = build_certificate_2d(T, [1.0, -1.0], spec)
        report = verify_certificate_2d(cert, 64)
        assert not report.feasible

    def test_gradient_vanishes_at_nodes(self, rng):
        spec = KernelSpec(512)
        lc = spec.lambda_c
        T = separated_support_2d(rng, 4, 2.38 * lc)
        v = rng.choice([-1.0, 1.0], 4)
        cert = build_certificate_2d(T, v, spec)
        assert cert.interp_residual <= 1e-9
        assert cert.stationarity_residual <= 1e-9 * spec.fc
