import numpy as np
import pytest

import selmet as sm
from selmet import InvalidInputError

from conftest import central_diff


def test_kernel_at_zero_is_one(kp):
    assert sm.kernel_eval([0.0, 0.0], kp) == 1.0


def test_kernel_closed_form(kp):
    # sigma_k_sq = 0.5 -> exp(-1/(2*0.5)) = exp(-1)
    assert sm.kernel_eval([1.0, 0.0], kp) == pytest.approx(np.exp(-1), rel=1e-15)


def test_kernel_even():
    params = sm.KernelParams(0.49)
    r = np.array([0.3, -0.7])
    assert sm.kernel_eval(r, params) == sm.kernel_eval(-r, params)


def test_kernel_positive_and_maximal_at_zero(kp):
    rng = np.random.default_rng(0)
    for _ in range(100):
        r = rng.uniform(-3, 3, 2)
        v = sm.kernel_eval(r, kp)
        assert 0 < v <= 1.0


def test_kernel_grad_at_zero(kp):
    assert np.all(sm.kernel_grad([0.0, 0.0], kp) == 0.0)


def test_kernel_grad_closed_form(kp):
    g = sm.kernel_grad([1.0, 0.0], kp)
    np.testing.assert_allclose(g, [-2 * np.exp(-1), 0.0], rtol=1e-14)


def test_kernel_grad_matches_finite_differences():
    params = sm.KernelParams(0.5)
    g = sm.kernel_grad([0.4, 0.2], params)
    g_fd = central_diff(lambda r: sm.kernel_eval(r, params), [0.4, 0.2])
    np.testing.assert_allclose(g, g_fd, atol=1e-8)


def test_kernel_grad_fd_random_points():
    rng = np.random.default_rng(1)
    for _ in range(100):
        params = sm.KernelParams(rng.uniform(0.1, 2.0))
        r = rng.uniform(-2, 2, 2)
        g = sm.kernel_grad(r, params)
        g_fd = central_diff(lambda v: sm.kernel_eval(v, params), r)
        np.testing.assert_allclose(g, g_fd, rtol=1e-6, atol=1e-9)


def test_nu_at_centroid():
    field = sm.NuField([[0.0, 0.0]], 0.04)
    assert sm.nu_eval([0.0, 0.0], field) == 1.0


def test_nu_one_length_scale_away():
    field = sm.NuField([[0.0, 0.0]], 0.04)
    assert sm.nu_eval([0.2, 0.0], field) == pytest.approx(np.exp(-1), rel=1e-14)


def test_nu_coincident_centroids():
    field = sm.NuField([[0.1, 0.3], [0.1, 0.3]], 0.04)
    assert sm.nu_eval([0.1, 0.3], field) == pytest.approx(2.0, rel=1e-14)


def test_nu_zero_centroids_returns_floor():
    assert sm.nu_eval([5.0, -3.0], sm.NuField.constant(0.2)) == 0.2
    assert sm.nu_eval([5.0, -3.0], sm.NuField.zero()) == 0.0


def test_nu_grad_at_lone_centroid():
    field = sm.NuField([[0.4, -0.2]], 0.1)
    np.testing.assert_allclose(sm.nu_grad([0.4, -0.2], field), [0.0, 0.0])


def test_nu_grad_constant_field():
    assert np.all(sm.nu_grad([1.0, 2.0], sm.NuField.constant(0.3)) == 0.0)


def test_nu_grad_matches_finite_differences():
    field = sm.NuField([[0.3, 0.1], [-0.5, 0.4]], 0.07)
    g = sm.nu_grad([0.1, -0.3], field)
    g_fd = central_diff(lambda x: sm.nu_eval(x, field), [0.1, -0.3])
    np.testing.assert_allclose(g, g_fd, atol=1e-8)


def test_nu_grad_fd_random_points():
    rng = np.random.default_rng(2)
    for _ in range(100):
        k = int(rng.integers(1, 4))
        field = sm.NuField(rng.uniform(-1, 1, (k, 2)), rng.uniform(0.03, 0.5))
        x = rng.uniform(-1.5, 1.5, 2)
        g = sm.nu_grad(x, field)
        g_fd = central_diff(lambda v: sm.nu_eval(v, field), x)
        np.testing.assert_allclose(g, g_fd, rtol=1e-6, atol=1e-9)


def test_nu_bounded_below_by_floor_and_decays():
    field = sm.NuField([[0.2, -0.6]], 0.04, floor=0.05)
    rng = np.random.default_rng(3)
    for _ in range(50):
        x = rng.uniform(-3, 3, 2)
        assert sm.nu_eval(x, field) >= field.floor
    far = np.array([0.2, -0.6]) + 20 * np.sqrt(field.sigma_nu_sq)
    assert sm.nu_eval(far, field) - field.floor < 1e-12


def test_velocity_field_single_landmark(kp):
    v = sm.velocity_field_eval([0.0, 0.0], [[0.0, 0.0]], [[1.0, 0.0]], kp)
    np.testing.assert_allclose(v, [1.0, 0.0])


def test_velocity_field_far_away(kp):
    v = sm.velocity_field_eval([10.0, 0.0], [[0.0, 0.0]], [[1.0, 0.0]], kp)
    assert np.linalg.norm(v) < 1e-20


def test_velocity_field_symmetric_pair():
    kp = sm.KernelParams(0.5)
    q = [[1.0, 0.0], [-1.0, 0.0]]
    p = [[0.0, 1.0], [0.0, 1.0]]
    v = sm.velocity_field_eval([0.0, 0.0], q, p, kp)
    np.testing.assert_allclose(v, [0.0, 2 * np.exp(-1)], rtol=1e-14)


def test_velocity_field_linear_in_momenta(kp):
    rng = np.random.default_rng(4)
    for _ in range(20):
        m = int(rng.integers(1, 5))
        q = rng.uniform(-1, 1, (m, 2))
        p = rng.uniform(-1, 1, (m, 2))
        x = rng.uniform(-1, 1, 2)
        v1 = sm.velocity_field_eval(x, q, p, kp)
        v2 = sm.velocity_field_eval(x, q, 2 * p, kp)
        np.testing.assert_allclose(v2, 2 * v1, atol=1e-12)


def test_velocity_field_mismatched_lengths(kp):
    with pytest.raises(InvalidInputError):
        sm.velocity_field_eval([0, 0], [[0, 0], [1, 1]], [[1, 0]], kp)


@pytest.mark.parametrize("bad", [[np.nan, 0.0], [np.inf, 1.0], [0.0, -np.inf]])
def test_non_finite_inputs_rejected(bad, kp):
    field = sm.NuField([[0.0, 0.0]], 0.04)
    with pytest.raises(InvalidInputError):
        sm.kernel_eval(bad, kp)
    with pytest.raises(InvalidInputError):
        sm.kernel_grad(bad, kp)
    with pytest.raises(InvalidInputError):
        sm.nu_eval(bad, field)
    with pytest.raises(InvalidInputError):
        sm.nu_grad(bad, field)


def test_invalid_params_rejected():
    with pytest.raises(InvalidInputError):
        sm.KernelParams(0.0)
    with pytest.raises(InvalidInputError):
        sm.KernelParams(-1.0)
    with pytest.raises(InvalidInputError):
        sm.NuField([[0, 0]], 0.0)
    with pytest.raises(InvalidInputError):
        sm.NuField([[0, 0]], 0.04, floor=-0.1)
    with pytest.raises(InvalidInputError):
        sm.NuField([[0, np.nan]], 0.04)
