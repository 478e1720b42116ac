"""Backend twins of the coordinate-descent sweep kernel."""

import numpy as np
import pytest

from irsofdm.kernels import (
    ENV_VAR,
    HAVE_NUMBA,
    SweepResult,
    available_backends,
    coordinate_descent_sweeps,
    default_backend,
)

needs_numba = pytest.mark.skipif(not HAVE_NUMBA, reason="numba not importable")


def random_instance(seed, n_el, n_sc, n_cb, scale=1e-6):
    rng = np.random.default_rng(seed)
    v = scale * (rng.standard_normal((n_el, n_sc)) + 1j * rng.standard_normal((n_el, n_sc)))
    h_d = scale * (rng.standard_normal(n_sc) + 1j * rng.standard_normal(n_sc))
    phi = np.exp(1j * rng.uniform(-np.pi, np.pi, (n_cb, n_sc))) * rng.uniform(0.5, 1.0, (n_cb, n_sc))
    p = rng.uniform(0.0, 2.0, n_sc)
    init = rng.integers(0, n_cb, n_el)
    sigma2 = scale ** 2
    return v, h_d, phi, p, sigma2, init


class TestNumpyKernel:
    def test_rates_monotone_within_noise(self):
        args = random_instance(3, 10, 8, 8)
        res = coordinate_descent_sweeps(*args, backend="numpy")
        assert isinstance(res, SweepResult)
        assert np.all(np.diff(res.update_rates) >= -1e-12)
        assert np.all(np.diff(res.sweep_rates) >= -1e-12)

    def test_fixed_point_on_rerun(self):
        v, h_d, phi, p, sigma2, init = random_instance(4, 6, 5, 4)
        res = coordinate_descent_sweeps(v, h_d, phi, p, sigma2, init, backend="numpy")
        assert res.converged
        again = coordinate_descent_sweeps(v, h_d, phi, p, sigma2, res.indices, backend="numpy")
        assert again.converged
        assert again.sweep_rates.size == 1
        assert np.array_equal(again.indices, res.indices)

    def test_no_elements_degenerates_to_direct_link(self):
        v, h_d, phi, p, sigma2, _ = random_instance(5, 0, 6, 8)
        res = coordinate_descent_sweeps(v, h_d, phi, p, sigma2, np.zeros(0, dtype=int),
                                        backend="numpy")
        assert res.converged
        assert res.update_rates.size == 0
        expect = np.mean(np.log2(1.0 + p * np.abs(h_d) ** 2 / sigma2))
        np.testing.assert_allclose(res.sweep_rates, [expect], rtol=1e-12)

    def test_zero_cascade_breaks_ties_to_lowest_index(self):
        # with v = 0 every codebook entry scores the same
        h_d = np.array([1.0 + 0.0j, 0.5j])
        v = np.zeros((1, 2), dtype=complex)
        phi = np.exp(1j * np.linspace(-np.pi, np.pi, 4, endpoint=False))[:, None] * np.ones(2)
        res = coordinate_descent_sweeps(v, h_d, phi, np.ones(2), 1.0, [3], backend="numpy")
        assert res.indices[0] == 0

    def test_input_validation(self):
        v, h_d, phi, p, sigma2, init = random_instance(6, 3, 4, 4)
        with pytest.raises(ValueError):
            coordinate_descent_sweeps(v, h_d[:-1], phi, p, sigma2, init)
        with pytest.raises(ValueError):
            coordinate_descent_sweeps(v, h_d, phi, -p, sigma2, init)
        with pytest.raises(ValueError):
            coordinate_descent_sweeps(v, h_d, phi, p, 0.0, init)
        with pytest.raises(ValueError):
            coordinate_descent_sweeps(v, h_d, phi, p, sigma2, init + 4)
        with pytest.raises(ValueError):
            coordinate_descent_sweeps(v, h_d, phi, p, sigma2, init, max_sweeps=0)

    def test_does_not_mutate_init(self):
        v, h_d, phi, p, sigma2, init = random_instance(7, 5, 4, 8)
        before = init.copy()
        coordinate_descent_sweeps(v, h_d, phi, p, sigma2, init, backend="numpy")
        assert np.array_equal(init, before)


@needs_numba
class TestBackendAgreement:
    @pytest.mark.parametrize("seed,n_el,n_sc,n_cb", [
        (0, 5, 4, 8),
        (1, 12, 16, 4),
        (2, 1, 1, 2),
        (3, 0, 3, 8),
        (4, 24, 8, 8),
    ])
    def test_twins_agree(self, seed, n_el, n_sc, n_cb):
        args = random_instance(seed, n_el, n_sc, n_cb)
        a = coordinate_descent_sweeps(*args, backend="numba")
        b = coordinate_descent_sweeps(*args, backend="numpy")
        assert np.array_equal(a.indices, b.indices)
        assert a.converged == b.converged
        np.testing.assert_allclose(a.update_rates, b.update_rates, rtol=1e-9, atol=1e-12)
        np.testing.assert_allclose(a.sweep_rates, b.sweep_rates, rtol=1e-9, atol=1e-12)

    def test_numba_deterministic(self):
        args = random_instance(9, 8, 8, 8)
        a = coordinate_descent_sweeps(*args, backend="numba")
        b = coordinate_descent_sweeps(*args, backend="numba")
        assert np.array_equal(a.indices, b.indices)
        assert np.array_equal(a.update_rates, b.update_rates)


class TestBackendSelection:
    def test_env_override_to_numpy(self, monkeypatch):
        monkeypatch.setenv(ENV_VAR, "numpy")
        assert default_backend() == "numpy"

    def test_auto_prefers_numba_when_present(self, monkeypatch):
        monkeypatch.delenv(ENV_VAR, raising=False)
        expected = "numba" if HAVE_NUMBA else "numpy"
        assert default_backend() == expected

    def test_invalid_env_value_rejected(self, monkeypatch):
        monkeypatch.setenv(ENV_VAR, "cuda")
        with pytest.raises(ValueError):
            default_backend()

    def test_unknown_backend_argument_rejected(self):
        args = random_instance(10, 2, 2, 2)
        with pytest.raises(ValueError):
            coordinate_descent_sweeps(*args, backend="fortran")

    def test_available_backends_lists_numpy(self):
        assert "numpy" in available_backends()
