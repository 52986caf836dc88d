import numpy as np
import pytest

from conftest import separated_support
from superres.model import AtomicMeasure, SampleVector, sample_spikes, tv_norm
from superres.sdp import (
    DegenerateError,
    SolverError,
    SolverOptions,
    dual_polynomial_values,
    fit_amplitudes,
    locate_support,
    match_supports,
    solve_dual,
    tv_superresolve,
    vanishing_polynomial,
)

TIGHT = SolverOptions(tol=1e-9, max_iter=100_000)


class TestSolveDual:
    def test_single_spike_objective(self):
        y = sample_spikes(AtomicMeasure(1, [0.5], [1.0]), 4)
        sol = solve_dual(y, TIGHT)
        assert sol.objective == pytest.approx(1.0, abs=1e-6)

    def test_trace_conditions_and_psd(self):
        y = sample_spikes(AtomicMeasure(1, [0.3, 0.7], [1.0, -2.0j]), 6)
        sol = solve_dual(y, TIGHT)
        n = sol.n
        for j in range(n):
            diag_sum = np.trace(sol.Q, offset=j)
            target = 1.0 if j == 0 else 0.0
            assert abs(diag_sum - target) <= 1e-8
        bordered = np.zeros((n + 1, n + 1), dtype=complex)
        bordered[:n, :n] = sol.Q
        bordered[:n, n] = sol.c
        bordered[n, :n] = np.conj(sol.c)
        bordered[n, n] = 1.0
        assert np.linalg.eigvalsh(bordered).min() >= -1e-8

    def test_bounded_polynomial_on_grid(self):
        y = sample_spikes(AtomicMeasure(1, [0.2, 0.5, 0.8], [1.0, 1.0, 1.0j]), 8)
        sol = solve_dual(y, TIGHT)
        vals = np.abs(dual_polynomial_values(sol.c, 64 * sol.n))
        assert vals.max() <= 1 + 1e-6

    def test_weak_duality(self, rng):
        fc = 16
        T = separated_support(rng, 4, 2.0 / fc)
        a = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        x = AtomicMeasure(1, T, a)
        sol = solve_dual(sample_spikes(x, fc), TIGHT)
        assert sol.objective <= tv_norm(x) + 1e-6

    def test_sign_interpolation(self, rng):
        fc = 16
        T = separated_support(rng, 3, 2.0 / fc)
        a = np.exp(2j * np.pi * rng.random(3))
        sol = solve_dual(sample_spikes(AtomicMeasure(1, T, a), fc), TIGHT)
        k = np.arange(-fc, fc + 1)
        q = np.exp(2j * np.pi * np.outer(T, k)) @ sol.c
        assert np.abs(q - a).max() <= 1e-4

    def test_nonconvergence_raises_with_residuals(self):
        y = sample_spikes(AtomicMeasure(1, [0.3, 0.6], [1.0, 1.0]), 8)
        with pytest.raises(SolverError) as err:
            solve_dual(y, SolverOptions(tol=1e-12, max_iter=30))
        assert np.isfinite(err.value.primal_residual)
        assert err.value.iterations == 30

    def test_zero_data(self):
        sol = solve_dual(SampleVector(1, 3, np.zeros(7, complex)), TIGHT)
        assert sol.objective == 0.0
        assert sol.degenerate


class TestVanishingPolynomial:
    def test_single_unit_coefficient_gives_zero(self):
        c = np.zeros(9, complex)
        c[1] = 1.0  # |single exponential| = 1 everywhere
        p = vanishing_polynomial(c)
        assert np.abs(p).max() < 1e-15

    def test_zero_coefficients_give_constant_one(self):
        p = vanishing_polynomial(np.zeros(9, complex))
        assert p[8] == pytest.approx(1.0)
        assert np.abs(np.delete(p, 8)).max() == 0.0

    def test_matches_direct_evaluation(self, rng):
        c = rng.standard_normal(11) + 1j * rng.standard_normal(11)
        p = vanishing_polynomial(c)
        fc = 5
        k2 = np.arange(-2 * fc, 2 * fc + 1)
        k = np.arange(-fc, fc + 1)
        for t in rng.random(128):
            direct = 1 - abs(np.dot(c, np.exp(2j * np.pi * k * t))) ** 2
            series = np.real(np.dot(p, np.exp(2j * np.pi * k2 * t)))
            assert series == pytest.approx(direct, abs=1e-12)

    def test_hermitian_symmetry(self, rng):
        c = rng.standard_normal(15) + 1j * rng.standard_normal(15)
        p = vanishing_polynomial(c)
        assert np.abs(p - np.conj(p[::-1])).max() < 1e-14


class TestLocateSupport:
    def test_single_spike(self):
        y = sample_spikes(AtomicMeasure(1, [0.5], [1.0]), 4)
        sol = solve_dual(y, TIGHT)
        T = locate_support(sol.c, TIGHT)
        assert T.size == 1
        assert abs(T[0] - 0.5) <= 1e-6

    def test_symmetric_pair(self):
        y = sample_spikes(AtomicMeasure(1, [0.25, 0.75], [1.0, 1.0]), 8)
        sol = solve_dual(y, TIGHT)
        T = locate_support(sol.c, TIGHT)
        assert T.size == 2
        # instance symmetry forces minimizers symmetric about 1/2
        assert abs((T[0] + T[1]) / 2 - 0.5) <= 1e-8
        # cross-check against a dense scan of the vanishing polynomial
        M = 10**6
        g = np.real(1 - np.abs(dual_polynomial_values(sol.c, M)) ** 2)
        idx = np.nonzero((g < np.roll(g, 1)) & (g <= np.roll(g, -1)) & (g < 1e-6))[0]
        assert idx.size == 2
        assert np.abs(np.sort(idx / M) - T).max() <= 2.0 / M

    def test_companion_and_grid_paths_agree(self, rng):
        fc = 10
        n = 2 * fc + 1
        rngl = np.random.default_rng(11)
        y = SampleVector(1, fc, rngl.standard_normal(n) + 1j * rngl.standard_normal(n))
        sol = solve_dual(y, TIGHT)
        p = vanishing_polynomial(sol.c)
        roots = np.roots(p[::-1])
        on_circle = roots[np.abs(np.abs(roots) - 1.0) <= 1e-4]
        angles = np.sort(np.mod(np.angle(on_circle) / (2 * np.pi), 1.0))
        # circle roots are double; collapse each split pair to its mean
        companion = []
        i = 0
        while i < angles.size:
            if i + 1 < angles.size and angles[i + 1] - angles[i] <= 1e-4 / fc:
                companion.append(0.5 * (angles[i] + angles[i + 1]))
                i += 2
            else:
                companion.append(angles[i])
                i += 1
        companion = np.array(companion)
        # conjugate-reciprocal pairing of off-circle roots
        off = roots[np.abs(np.abs(roots) - 1.0) > 1e-4]
        for z in off:
            partner = np.min(np.abs(off - 1.0 / np.conj(z)))
            assert partner <= 1e-6 * max(1.0, abs(z))
        T = locate_support(sol.c, TIGHT)
        assert T.size <= n - 1
        match = match_supports(T, companion)
        assert match["unmatched_truth"] == 0
        assert match["max"] <= 1e-6

    def test_nonnegative_polynomial_on_grid(self):
        rngl = np.random.default_rng(2)
        y = SampleVector(1, 10, rngl.standard_normal(21) + 1j * rngl.standard_normal(21))
        sol = solve_dual(y, TIGHT)
        g = np.real(1 - np.abs(dual_polynomial_values(sol.c, 64 * 21)) ** 2)
        assert g.min() >= -1e-8
        T = locate_support(sol.c, TIGHT)
        assert T.size <= 20

    def test_degenerate_coefficients_raise(self):
        c = np.zeros(9, complex)
        c[1] = 1.0
        with pytest.raises(DegenerateError):
            locate_support(c, TIGHT)


class TestFitAmplitudes:
    def test_exactly_determined(self):
        y = sample_spikes(AtomicMeasure(1, [0.5], [2.0 + 1.0j]), 4)
        T, a = fit_amplitudes([0.5], y)
        assert a[0] == pytest.approx(2.0 + 1.0j, abs=1e-10)

    def test_exact_on_true_support(self, rng):
        fc = 16
        T0 = separated_support(rng, 4, 2.0 / fc)
        amps = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        y = sample_spikes(AtomicMeasure(1, T0, amps), fc)
        T, a = fit_amplitudes(T0, y)
        assert np.abs(a - amps).max() <= 1e-8 * np.abs(amps).max()

    def test_spurious_spike_pruned(self, rng):
        fc = 16
        T0 = separated_support(rng, 3, 2.5 / fc)
        amps = np.ones(3)
        y = sample_spikes(AtomicMeasure(1, T0, amps), fc)
        far = np.mod(T0[0] + 0.5, 1.0)
        T, a = fit_amplitudes(np.append(T0, far), y)
        assert T.size == 3
        assert np.abs(np.sort(T) - np.sort(T0)).max() < 1e-12

    def test_coalesced_support_raises(self):
        y = sample_spikes(AtomicMeasure(1, [0.5], [1.0]), 8)
        with pytest.raises(ValueError, match="dedup"):
            fit_amplitudes([0.5, 0.5 + 1e-17], y)

    def test_oversized_support_rejected(self):
        y = sample_spikes(AtomicMeasure(1, [0.5], [1.0]), 2)
        with pytest.raises(ValueError):
            fit_amplitudes(np.linspace(0, 0.9, 6), y)


class TestPipeline:
    def test_exact_recovery_small(self, rng):
        fc = 20
        T = separated_support(rng, 5, 2.0 / fc)
        a = np.exp(2j * np.pi * rng.random(5))
        x = AtomicMeasure(1, T, a)
        res = tv_superresolve(sample_spikes(x, fc), SolverOptions(tol=1e-8, max_iter=100_000), truth=x)
        assert res.support_errors["unmatched_truth"] == 0
        assert res.support_errors["max"] <= 1e-6
        assert res.duality_gap <= 1e-6
        assert res.residual <= 1e-6

    def test_zero_samples_give_empty_measure(self):
        res = tv_superresolve(SampleVector(1, 4, np.zeros(9, complex)))
        assert len(res.measure) == 0
        assert res.duality_gap == 0.0

    def test_match_supports_cardinality_mismatch(self):
        out = match_supports([0.1, 0.5], [0.1])
        assert out["unmatched_estimate"] == 1
        assert out["distances"].size == 1
