import numpy as np
import pytest
import scipy.linalg

from oracles import edf_trace, solve_dense
from srmks.errors import InvalidInputError, SingularSystemError
from srmks.kernels import SDOFKernel, SEKernel, gram, kernel_eval
from srmks.oscillator import OscillatorParams, TrainingSet
from srmks.smoother import effective_dof, fit, predict


def _random_instance(rng, n_max=8):
    """Small random training set plus a random kernel of either family."""
    n = int(rng.integers(2, n_max + 1))
    t = np.sort(rng.uniform(0.0, 0.3, size=n))
    while np.any(np.diff(t) <= 0):
        t = np.sort(rng.uniform(0.0, 0.3, size=n))
    y = rng.normal(0.0, 1.0, size=n)
    sigma_n = float(rng.uniform(0.05, 0.5))
    if rng.integers(2) == 0:
        kernel = SEKernel(
            sigma_f=float(rng.uniform(0.3, 3.0)),
            length_scale=float(rng.uniform(0.005, 0.2)),
        )
    else:
        kernel = SDOFKernel(
            sigma_f=float(rng.uniform(100.0, 5000.0)),
            params=OscillatorParams(m=1.0, c=20.0, k=1e6),
        )
    data = TrainingSet(t=t, y=y, sigma_n=sigma_n, true_h=np.zeros(n), seed=0)
    return kernel, data, sigma_n


def _make_data(t, y, sigma_n=0.1):
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    return TrainingSet(t=t, y=y, sigma_n=sigma_n, true_h=np.zeros_like(y), seed=0)


class TestAgainstDenseOracle:
    def test_weights_and_predictions_match_gaussian_elimination(self):
        rng = np.random.default_rng(77)
        for _ in range(50):
            kernel, data, sigma_n = _random_instance(rng)
            model = fit(kernel, data, sigma_n)
            K = gram(kernel, data.t).values
            A = (K + sigma_n**2 * np.eye(data.n)).tolist()
            ref_w = np.array(solve_dense(A, data.y.tolist()))
            scale = float(np.max(np.abs(ref_w))) or 1.0
            assert np.max(np.abs(model.weights - ref_w)) / scale < 1e-8

            # predictions recomputed pointwise with the oracle weights
            t_query = np.linspace(-0.05, 0.35, 9)
            pred = np.asarray(predict(model, t_query))
            pred_scale = float(np.max(np.abs(pred))) or 1.0
            for tq, p in zip(t_query, pred):
                cross = np.array(
                    [kernel_eval(kernel, float(ti), float(tq)) for ti in data.t]
                )
                ref_p = float(cross @ ref_w)
                assert abs(p - ref_p) / pred_scale < 1e-8

    def test_edf_matches_trace_identity(self):
        rng = np.random.default_rng(78)
        for _ in range(50):
            kernel, data, sigma_n = _random_instance(rng)
            model = fit(kernel, data, sigma_n)
            ref = edf_trace(gram(kernel, data.t).values.tolist(), sigma_n)
            assert abs(model.edf - ref) < 1e-8


class TestEdfBehaviour:
    def test_edf_within_bounds(self):
        rng = np.random.default_rng(79)
        for _ in range(20):
            kernel, data, sigma_n = _random_instance(rng)
            model = fit(kernel, data, sigma_n)
            assert 0.0 <= model.edf <= data.n + 1e-12

    def test_edf_decreases_with_noise(self):
        t = np.linspace(0.0, 0.3, 25)
        y = np.sin(40 * t)
        kernel = SEKernel(sigma_f=1.0, length_scale=0.02)
        sigmas = [1e-4, 1e-3, 1e-2, 1e-1, 1.0]
        edfs = [fit(kernel, _make_data(t, y, s), s).edf for s in sigmas]
        assert all(a > b for a, b in zip(edfs, edfs[1:]))

    def test_edf_grows_as_length_scale_shrinks(self):
        t = np.linspace(0.0, 0.3, 25)
        y = np.sin(40 * t)
        sigma_n = 0.05
        lengths = [0.3, 0.1, 0.03, 0.01, 0.003]
        edfs = [
            fit(SEKernel(sigma_f=1.0, length_scale=l), _make_data(t, y, sigma_n), sigma_n).edf
            for l in lengths
        ]
        assert all(a <= b + 1e-12 for a, b in zip(edfs, edfs[1:]))

    def test_zero_noise_full_rank_edf_is_n(self):
        t = np.linspace(0.0, 0.3, 6)
        y = np.sin(40 * t)
        kernel = SEKernel(sigma_f=1.0, length_scale=0.01)
        model = fit(kernel, _make_data(t, y, 0.0), 0.0)
        assert model.edf == pytest.approx(6.0, abs=1e-9)

    def test_effective_dof_accessor(self):
        t = np.linspace(0.0, 0.3, 10)
        model = fit(SEKernel(1.0, 0.05), _make_data(t, np.sin(t), 0.1), 0.1)
        assert effective_dof(model) == model.edf


class TestPredictionBehaviour:
    def test_scalar_and_array_queries_agree(self):
        t = np.linspace(0.0, 0.3, 12)
        model = fit(SEKernel(1.0, 0.05), _make_data(t, np.sin(30 * t), 0.1), 0.1)
        queries = np.array([0.0, 0.11, 0.29])
        batch = predict(model, queries)
        for q, b in zip(queries, batch):
            assert predict(model, float(q)) == pytest.approx(b, rel=1e-14)

    def test_linearity_in_targets(self):
        t = np.linspace(0.0, 0.3, 15)
        y = np.sin(30 * t)
        kernel = SEKernel(1.0, 0.05)
        a = fit(kernel, _make_data(t, y, 0.1), 0.1)
        b = fit(kernel, _make_data(t, 3.0 * y, 0.1), 0.1)
        q = np.linspace(0.0, 0.3, 7)
        assert np.allclose(predict(b, q), 3.0 * np.asarray(predict(a, q)), rtol=1e-10)

    def test_near_interpolation_at_zero_noise(self):
        t = np.linspace(0.0, 0.3, 8)
        y = np.cos(20 * t)
        model = fit(SEKernel(1.0, 0.03), _make_data(t, y, 0.0), 0.0)
        pred = np.asarray(predict(model, t))
        assert np.max(np.abs(pred - y)) < 1e-6


class TestRobustness:
    def test_rejects_negative_noise(self):
        t = np.linspace(0.0, 0.3, 5)
        with pytest.raises(InvalidInputError):
            fit(SEKernel(1.0, 0.05), _make_data(t, np.sin(t)), -0.1)

    def test_jitter_retry_recovers(self, monkeypatch):
        # first two factorisation attempts fail, the third succeeds
        t = np.linspace(0.0, 0.3, 10)
        data = _make_data(t, np.sin(30 * t), 0.1)
        real = scipy.linalg.cho_factor
        calls = {"count": 0}

        def flaky(a, **kw):
            calls["count"] += 1
            if calls["count"] <= 2:
                raise np.linalg.LinAlgError("synthetic failure")
            return real(a, **kw)

        monkeypatch.setattr(scipy.linalg, "cho_factor", flaky)
        model = fit(SEKernel(1.0, 0.05), data, 0.1)
        assert calls["count"] == 3
        assert np.all(np.isfinite(model.weights))

        # the escalated jitter is tiny relative to sigma_n^2, so the
        # recovered weights match an honest solve closely
        monkeypatch.setattr(scipy.linalg, "cho_factor", real)
        clean = fit(SEKernel(1.0, 0.05), data, 0.1)
        assert np.allclose(model.weights, clean.weights, rtol=1e-6)

    def test_exhausted_retries_raise(self, monkeypatch):
        t = np.linspace(0.0, 0.3, 10)
        data = _make_data(t, np.sin(30 * t), 0.1)
        calls = {"count": 0}

        def broken(a, **kw):
            calls["count"] += 1
            raise np.linalg.LinAlgError("synthetic failure")

        monkeypatch.setattr(scipy.linalg, "cho_factor", broken)
        with pytest.raises(SingularSystemError):
            fit(SEKernel(1.0, 0.05), data, 0.1)
        assert calls["count"] == 4  # clean attempt + 3 jitter retries
