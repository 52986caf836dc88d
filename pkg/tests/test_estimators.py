import numpy as np
import pytest
from sklearn.base import clone

from conftest import separated_support
from superres.estimators import GridBasisPursuit, TVSuperResolver
from superres.discrete import partial_dft
from superres.model import AtomicMeasure, sample_spikes
from superres.sdp import SolverOptions, match_supports, tv_superresolve


class TestTVSuperResolver:
    def test_params_roundtrip_and_clone(self):
        est = TVSuperResolver(tol=1e-7, max_iter=1234)
        params = est.get_params()
        assert params["tol"] == 1e-7 and params["max_iter"] == 1234
        twin = clone(est)
        assert twin.get_params() == params
        est.set_params(tol=1e-8)
        assert est.get_params()["tol"] == 1e-8

    def test_fit_matches_functional_pipeline(self, rng):
        fc = 16
        T = separated_support(rng, 4, 2.0 / fc)
        x = AtomicMeasure(1, T, np.exp(2j * np.pi * rng.random(4)))
        y = sample_spikes(x, fc)
        est = TVSuperResolver(tol=1e-8, max_iter=100_000).fit(y)
        ref = tv_superresolve(y, SolverOptions(tol=1e-8, max_iter=100_000))
        assert np.abs(np.sort(est.locations_) - np.sort(ref.measure.locations)).max() <= 1e-12
        assert est.duality_gap_ == pytest.approx(ref.duality_gap, abs=1e-12)
        match = match_supports(est.locations_, T)
        assert match["max"] <= 1e-6

    def test_fit_accepts_plain_array(self, rng):
        fc = 8
        x = AtomicMeasure(1, [0.5], [1.0])
        y = np.asarray(sample_spikes(x, fc).coeffs)
        est = TVSuperResolver(tol=1e-8).fit(y)
        assert est.fc_ == fc
        assert abs(est.locations_[0] - 0.5) <= 1e-6

    def test_predict_reproduces_lowpass_curve(self, rng):
        fc = 8
        x = AtomicMeasure(1, [0.25, 0.75], [1.0, 1.0])
        est = TVSuperResolver(tol=1e-8).fit(sample_spikes(x, fc))
        t = np.linspace(0, 1, 33, endpoint=False)
        from superres.model import lowpass_project

        _, expected = lowpass_project(x, fc, 33)
        assert np.abs(est.predict(t) - expected).max() <= 1e-4

    def test_unfitted_predict_raises(self):
        with pytest.raises(RuntimeError, match="not fitted"):
            TVSuperResolver().predict([0.1])

    def test_invalid_input_rejected(self):
        with pytest.raises(ValueError):
            TVSuperResolver().fit(np.ones(4, dtype=complex))  # even length
        with pytest.raises(ValueError):
            TVSuperResolver().fit(np.array([1.0, np.nan, 1.0], dtype=complex))


class TestGridBasisPursuit:
    def test_exact_recovery(self):
        x0 = np.zeros(64, complex)
        x0[10] = 1.0
        x0[30] = -2.0j
        est = GridBasisPursuit(N=64, fc=8, tol=1e-12).fit(partial_dft(x0, 8))
        assert np.abs(est.x_ - x0).max() <= 1e-8
        assert set(est.support_) == {10, 30}
        assert np.abs(est.predict() - est.x_).max() == 0.0

    def test_noisy_variant_runs(self):
        x0 = np.zeros(32, complex)
        x0[5] = 1.0
        y = partial_dft(x0, 4)
        est = GridBasisPursuit(N=32, fc=4, delta=1e-3, tol=1e-10).fit(y)
        assert np.abs(est.x_[5]) >= 0.9

    def test_clone_preserves_params(self):
        est = GridBasisPursuit(N=128, fc=16, delta=0.1)
        assert clone(est).get_params()["N"] == 128
