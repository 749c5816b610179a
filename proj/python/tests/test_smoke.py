import numpy as np
import pytest

import phaseless as pl


def test_ambiguous_pair_has_equal_measurements():
    s3 = np.sqrt(3.0)
    x1 = np.array([1, 0, -2, 0, -2], dtype=complex)
    x2 = np.array([1 - s3, 0, 1, 0, 1 + s3], dtype=complex)
    y1 = pl.measure_classical(x1).y
    y2 = pl.measure_classical(x2).y
    assert np.max(np.abs(y1 - y2)) < 1e-10


def test_enumeration_contains_truth():
    x = pl.random_signal(5, "complex", seed=3)
    sols = pl.enumerate_solutions(pl.measure_classical(x))
    assert min(pl.dist_up_to(x, z, reflection=True, shift=True) for z in sols) < 1e-6


def test_measurements_match_numpy_fft():
    x = pl.random_signal(6, "complex", seed=1)
    y = pl.measure_classical(x)
    expected = np.abs(np.fft.fft(x, 11)) ** 2
    assert y.shape == (1, 11)
    assert np.allclose(y.y[0], expected, rtol=1e-12, atol=1e-12)


def test_kolmogorov_recovers_minimum_phase_signal():
    x = pl.augment_min_phase(pl.random_signal(8, "complex", seed=2))
    assert pl.is_minimum_phase(x)
    z = pl.kolmogorov_recover(pl.measure_classical(x))
    assert pl.relative_error(x, z) < 1e-6


def test_stft_least_squares_is_exact():
    x = pl.random_signal(23, "complex", seed=4)
    y = pl.measure_stft(x, width=12, hop=1)
    assert pl.relative_error(x, pl.stft_ls_recover(y)) < 1e-8


def test_sdp_masked_recovery():
    x = pl.random_signal(6, "complex", seed=5)
    y = pl.measure_masked(x, pl.masks_fixed(6))
    z, quality = pl.sdp_recover(y)
    assert quality < 1e-3
    assert pl.relative_error(x, z) < 1e-3


def test_griffin_lim_error_is_monotone():
    x = pl.random_signal(16, "complex", seed=6)
    y = pl.measure_stft(x, width=8, hop=1)
    _, errors = pl.griffin_lim(y, pl.random_signal(16, "complex", seed=7), max_iter=200)
    assert np.all(np.diff(errors) <= 1e-12 * errors[0])


def test_gradient_matches_finite_differences():
    x = pl.random_signal(5, "complex", seed=8)
    y = pl.measure_classical(x)
    z = pl.random_signal(5, "complex", seed=9)
    g = pl.gradient(y, z)
    h = 1e-6
    d = np.zeros(5, dtype=complex)
    d[2] = 1.0
    dre = (pl.loss(y, z + h * d) - pl.loss(y, z - h * d)) / (2 * h)
    dim = (pl.loss(y, z + 1j * h * d) - pl.loss(y, z - 1j * h * d)) / (2 * h)
    assert abs(g[2] - (dre + 1j * dim)) < 1e-5 * max(1.0, abs(g[2]))


def test_gespar_recovers_sparse_signal():
    x = pl.random_signal(32, "sparse", seed=10, sparsity=3)
    y = pl.measure_classical(x, ntilde=63, k=63)
    z, ok = pl.gespar(y, 3, restarts=50, seed=1)
    assert ok
    assert pl.dist_up_to(x, z, reflection=True, shift=True) < 1e-6 * np.linalg.norm(x)


def test_invalid_window_raises():
    with pytest.raises(ValueError):
        pl.measure_stft(pl.random_signal(5), width=7)
