import numpy as np
import pytest

from onebit.channel import RngStream, draw_channel, draw_noise, perturb_csi

N_SAMPLES = 100_000


def test_channel_moments():
    H = draw_channel(100, 1000, RngStream(7))
    assert H.shape == (100, 1000)
    # |h|^2 ~ Exp(1): 3 sigma of the mean over 1e5 samples is ~0.0095
    assert abs(np.mean(np.abs(H) ** 2) - 1.0) < 0.02
    assert abs(np.mean(H.real)) < 0.02
    assert abs(np.mean(H.imag)) < 0.02
    # circular symmetry: equal power per real component, uncorrelated parts
    assert abs(np.var(H.real) - 0.5) < 0.01
    assert abs(np.mean(H.real * H.imag)) < 0.01


def test_channel_determinism():
    a = draw_channel(4, 8, RngStream(11, 3))
    b = draw_channel(4, 8, RngStream(11, 3))
    c = draw_channel(4, 8, RngStream(11, 4))
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_child_streams_are_distinct_and_reproducible():
    root = RngStream(5)
    assert root.child(1, 2) == RngStream(5, (0, 1, 2))
    x = root.child(1).generator().standard_normal(4)
    y = root.child(2).generator().standard_normal(4)
    assert not np.array_equal(x, y)
    assert np.array_equal(x, RngStream(5, (0, 1)).generator().standard_normal(4))


@pytest.mark.parametrize("M,N", [(0, 4), (3, 0)])
def test_channel_zero_dims(M, N):
    with pytest.raises(ValueError):
        draw_channel(M, N, RngStream(0))


def test_entries_uncorrelated():
    rng = np.random.default_rng(0)
    H = np.stack([draw_channel(2, 2, rng) for _ in range(N_SAMPLES // 4)])
    flat = H.reshape(len(H), -1)
    C = flat.conj().T @ flat / len(flat)
    off = C[~np.eye(4, dtype=bool)]
    assert np.max(np.abs(off)) < 0.05


def test_perturb_zero_variance_is_identity():
    H = draw_channel(3, 5, RngStream(1))
    assert perturb_csi(H, 0.0, RngStream(2)) is H


@pytest.mark.parametrize("ups,tol", [(0.1, 0.005), (0.2, 0.01)])
def test_perturb_variance(ups, tol):
    H = draw_channel(100, 1000, RngStream(1))
    E = perturb_csi(H, ups, RngStream(2)) - H
    assert abs(np.mean(np.abs(E) ** 2) - ups) < tol
    assert abs(np.mean(E)) < 0.01


def test_perturb_negative_variance():
    with pytest.raises(ValueError):
        perturb_csi(np.ones((2, 2)), -0.1, RngStream(0))


def test_noise_moments_and_determinism():
    eta = draw_noise(10, RngStream(3), size=N_SAMPLES // 10)
    assert eta.shape == (N_SAMPLES // 10, 10)
    assert abs(np.mean(np.abs(eta) ** 2) - 1.0) < 0.02
    assert abs(np.mean(eta.real)) < 0.02 and abs(np.mean(eta.imag)) < 0.02
    assert np.array_equal(draw_noise(10, RngStream(3)), draw_noise(10, RngStream(3)))
    assert draw_noise(4, RngStream(3)).shape == (4,)
