import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy import stats

from liesig import (
    SO3,
    AntipodalRotation,
    Euclidean,
    GroupPoint,
    GroupSpec,
    Product,
    closed_form_indices,
    group_exp,
    group_identity,
    group_inv,
    group_log,
    group_mul,
    hat,
    sample_uniform_so3,
    vee,
)
from liesig.exceptions import SpecMismatch
from liesig.lie_groups import (
    SO3_BASIS,
    is_rotation,
    sample_uniform_so3_matrices,
    so3_adjoint,
    so3_angle,
    so3_exp,
    so3_hat,
    so3_log,
)

E1 = np.array([[0, -1, 0], [1, 0, 0], [0, 0, 0]], dtype=float)
E2 = np.array([[0, 0, 1], [0, 0, 0], [-1, 0, 0]], dtype=float)
E3 = np.array([[0, 0, 0], [0, 0, -1], [0, 1, 0]], dtype=float)

vectors3 = arrays(np.float64, 3, elements=st.floats(-3.0, 3.0, allow_nan=False))


def test_basis_matrices():
    np.testing.assert_array_equal(SO3_BASIS[0], E1)
    np.testing.assert_array_equal(SO3_BASIS[1], E2)
    np.testing.assert_array_equal(SO3_BASIS[2], E3)
    np.testing.assert_array_equal(hat(SO3, [1, 0, 0])[0], E1)
    np.testing.assert_array_equal(vee(SO3, (np.zeros((3, 3)),)), np.zeros(3))


def test_exp_quarter_turn():
    g = group_exp(SO3, [np.pi / 2, 0, 0])
    np.testing.assert_allclose(g.blocks[0], [[0, -1, 0], [1, 0, 0], [0, 0, 1]], atol=1e-15)
    np.testing.assert_allclose(group_log(SO3, g), [np.pi / 2, 0, 0], atol=1e-14)


def test_exp_matches_matrix_series():
    # independent oracle: truncated power series of the matrix exponential
    rng = np.random.default_rng(1)
    for _ in range(20):
        v = rng.normal(size=3)
        A = so3_hat(v)
        term, total = np.eye(3), np.eye(3)
        for k in range(1, 40):
            term = term @ A / k
            total = total + term
        np.testing.assert_allclose(so3_exp(v), total, atol=1e-12)


def test_exp_zero_and_tiny():
    np.testing.assert_array_equal(group_exp(SO3, np.zeros(3)).blocks[0], np.eye(3))
    v = np.array([1e-9, -2e-9, 3e-10])
    np.testing.assert_allclose(so3_exp(v), np.eye(3) + so3_hat(v), atol=1e-17)
    np.testing.assert_allclose(so3_log(so3_exp(v)), v, rtol=1e-6, atol=1e-20)


def test_log_identity():
    np.testing.assert_array_equal(group_log(SO3, group_identity(SO3)), np.zeros(3))


def test_log_antipodal():
    with pytest.raises(AntipodalRotation):
        group_log(SO3, group_exp(SO3, [np.pi, 0, 0]))
    with pytest.raises(AntipodalRotation):
        so3_log(so3_exp([0, 0, np.pi - 1e-7]))
    v = [0, 0, np.pi - 1e-3]
    np.testing.assert_allclose(so3_log(so3_exp(v)), v, atol=1e-10)


def test_roundtrip_many():
    rng = np.random.default_rng(2)
    d = rng.normal(size=(10_000, 3))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    v = d * rng.uniform(0, np.pi - 1e-3, size=(10_000, 1))
    back = so3_log(so3_exp(v))
    assert np.max(np.linalg.norm(back - v, axis=1)) < 1e-10


@settings(max_examples=100, deadline=None)
@given(vectors3)
def test_exp_inverse_property(v):
    g = group_exp(SO3, v)
    assert is_rotation(g.blocks[0])
    assert group_mul(g, group_exp(SO3, -v)).allclose(group_identity(SO3), atol=1e-12)
    np.testing.assert_allclose(group_inv(g).blocks[0], g.blocks[0].T, atol=0)
    assert np.linalg.norm(group_log(SO3, g)) < np.pi


@settings(max_examples=100, deadline=None)
@given(arrays(np.float64, (3, 3), elements=st.floats(-5, 5, allow_nan=False)))
def test_hat_vee_roundtrip(A):
    S = A - A.T
    np.testing.assert_allclose(hat(SO3, vee(SO3, (S,)))[0], S, atol=1e-12)


def test_vee_rejects_non_skew():
    with pytest.raises(ValueError):
        vee(SO3, (np.eye(3),))


def test_adjoint_conjugation():
    rng = np.random.default_rng(3)
    for _ in range(50):
        R = sample_uniform_so3(rng).blocks[0]
        v = rng.normal(size=3)
        lhs = R @ so3_exp(v) @ R.T
        np.testing.assert_allclose(lhs, so3_exp(so3_adjoint(R) @ v), atol=1e-10)
        # the Ad matrix is orthogonal with determinant one
        Ad = so3_adjoint(R)
        np.testing.assert_allclose(Ad @ Ad.T, np.eye(3), atol=1e-12)


def test_product_factorwise():
    spec = Product(SO3, Euclidean(2))
    assert spec.algebra_dim == 5
    v = np.array([0.1, 0.2, 0.3, 4.0, -1.0])
    g = group_exp(spec, v)
    np.testing.assert_allclose(g.blocks[0], so3_exp(v[:3]))
    np.testing.assert_array_equal(g.blocks[1], v[3:])
    np.testing.assert_allclose(group_log(spec, g), v, atol=1e-14)
    h = group_exp(spec, -v)
    assert group_mul(g, h).allclose(group_identity(spec), atol=1e-12)
    np.testing.assert_array_equal(group_inv(g).blocks[1], -v[3:])


def test_nested_product_flattens():
    spec = Product(Product(SO3, Euclidean(1)), SO3)
    assert spec.algebra_dim == 7
    assert [l.kind for l in spec.leaves] == ["so3", "euclidean", "so3"]
    assert GroupSpec.from_dict(spec.to_dict()) == spec


def test_spec_mismatch():
    with pytest.raises(SpecMismatch):
        group_mul(group_identity(SO3), group_identity(Euclidean(3)))


def test_point_validation():
    with pytest.raises(ValueError):
        GroupPoint(SO3, (2 * np.eye(3),))
    with pytest.raises(ValueError):
        GroupPoint(SO3, (np.diag([1.0, 1.0, -1.0]),))


def test_structure_constants():
    c = SO3.structure_constants
    # commutators in this basis: [e1, e2] = -e3 and cyclic
    for i, j in [(0, 1), (1, 2), (2, 0)]:
        comm = SO3_BASIS[i] @ SO3_BASIS[j] - SO3_BASIS[j] @ SO3_BASIS[i]
        np.testing.assert_allclose(np.tensordot(c[:, i, j], SO3_BASIS, axes=1), comm)
    assert not np.any(Euclidean(4).structure_constants)
    assert np.allclose(np.abs(c).sum(axis=(1, 2)), 2.0)


def test_closed_form_indices():
    assert closed_form_indices(Euclidean(4)) == {0, 1, 2, 3}
    assert closed_form_indices(SO3) == set()
    assert closed_form_indices(Product(SO3, Euclidean(1))) == {3}


def test_haar_sampler_basic():
    rng = np.random.default_rng(4)
    R = sample_uniform_so3_matrices(rng, 100_000)
    np.testing.assert_allclose(np.linalg.norm(R, axis=1), 1.0, atol=1e-12)
    np.testing.assert_allclose(np.linalg.det(R), 1.0, atol=1e-12)
    assert abs(np.trace(R, axis1=1, axis2=2).mean()) < 0.05


def test_haar_angle_distribution():
    rng = np.random.default_rng(5)
    theta = so3_angle(sample_uniform_so3_matrices(rng, 20_000))
    # density (1 - cos t) / pi on [0, pi]
    res = stats.kstest(theta, lambda t: (t - np.sin(t)) / np.pi)
    assert res.pvalue > 0.01


def test_haar_left_invariance():
    # the law of Q R equals the law of R: compare angle distributions
    rng = np.random.default_rng(6)
    Q = sample_uniform_so3(rng).blocks[0]
    a = so3_angle(Q @ sample_uniform_so3_matrices(rng, 20_000))
    b = so3_angle(sample_uniform_so3_matrices(rng, 20_000))
    assert stats.ks_2samp(a, b).pvalue > 0.01


def test_sampler_reproducible():
    a = sample_uniform_so3_matrices(np.random.default_rng(9), 5)
    b = sample_uniform_so3_matrices(np.random.default_rng(9), 5)
    np.testing.assert_array_equal(a, b)
