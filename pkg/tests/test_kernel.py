import numpy as np
import pytest
from conftest import random_euclidean_path, random_so3_path
from hypothesis import given, settings
from hypothesis import strategies as st

from liesig import (
    SO3,
    DiscretePath,
    NormalizationConfig,
    TruncatedTensor,
    gram_matrix,
    integrate,
    kernel_horner,
    kernel_matrix,
    kernel_naive,
    normalized_signature,
    psi,
    signature,
    signature_brute_force,
    tensor_normalize,
    tt_inner,
    tt_norm,
    tt_one,
)
from liesig.lie_groups import sample_uniform_so3
from liesig.paths import duplicate_point


def level1_tensor(N, M, sq):
    v = np.zeros(N)
    v[0] = np.sqrt(sq)
    coeffs = [np.ones(1), v] + [np.zeros(N**m) for m in range(2, M + 1)]
    return TruncatedTensor(N, M, tuple(coeffs))


def random_unit_tensor(rng, N, M, scale):
    coeffs = [np.ones(1)] + [rng.normal(scale=scale**m, size=N**m) for m in range(1, M + 1)]
    return TruncatedTensor(N, M, tuple(coeffs))


def test_psi_values():
    assert psi(1.0) == 1.0
    assert psi(2.0) == 4.0
    assert psi(3.0) == pytest.approx(8 / 3, rel=1e-15)
    assert psi(1e300) == pytest.approx(8.0)
    with pytest.raises(ValueError):
        psi(0.5)


def test_psi_squared_profile_shape():
    cfg = NormalizationConfig(profile="squared")
    x = np.linspace(1, 50, 2000)
    y = psi(x, cfg)
    assert np.all(np.diff(y) > 0)
    assert np.all(y <= x**2 + 1e-12)
    assert np.all(y < cfg.sup)
    assert psi(3.0, cfg) == pytest.approx(4 + 16 * (1 / 4 - 1 / 9))
    assert psi(2.0 + 1e-12, cfg) == pytest.approx(4.0, abs=1e-9)
    other = NormalizationConfig(psi_cap=9.0, psi_decay=2.0, profile="squared")
    assert other.sup == pytest.approx(13.5)
    assert psi(3.0 + 1e-12, other) == pytest.approx(9.0, abs=1e-9)


def test_psi_printed_profile_shape():
    x = np.linspace(2.0 + 1e-9, 50, 2000)
    y = psi(x)
    # increasing on each branch, bounded, with a drop right after sqrt(M)
    assert np.all(np.diff(y) > 0)
    assert np.all(y < 8.0)
    assert psi(2.0) == 4.0 and psi(2.0 + 1e-9) < 1e-6
    assert psi(16 / 7) == pytest.approx(1.0)


def test_config_validation():
    for kw in ({"psi_cap": 1.0}, {"psi_decay": 0.0}, {"tol": 0.0}):
        with pytest.raises(ValueError):
            NormalizationConfig(**kw)


def test_normalize_identity_boundary_and_analytic():
    lam, t = tensor_normalize(tt_one(3, 4))
    assert lam == 1.0 and t.allclose(tt_one(3, 4), atol=0)
    lam, _ = tensor_normalize(level1_tensor(3, 4, 3.0))
    assert lam == 1.0
    lam, t = tensor_normalize(level1_tensor(3, 4, 8.0))
    assert lam == pytest.approx(np.sqrt(5 / 24), abs=1e-10)
    assert tt_norm(t) ** 2 == pytest.approx(8 / 3, rel=1e-9)


def test_normalize_rejects_bad_constant():
    t = TruncatedTensor(2, 1, (np.array([2.0]), np.zeros(2)))
    with pytest.raises(ValueError):
        tensor_normalize(t)


@settings(max_examples=150, deadline=None)
@given(
    st.integers(0, 2**32 - 1),
    st.floats(0.1, 5.0),
    st.integers(1, 5),
    st.sampled_from(["printed", "squared"]),
)
def test_normalize_hits_psi(seed, scale, M, profile):
    cfg = NormalizationConfig(profile=profile)
    t = random_unit_tensor(np.random.default_rng(seed), 3, M, scale)
    lam, n = tensor_normalize(t, cfg)
    assert 0 <= lam <= 1
    target = psi(tt_norm(t), cfg)
    if target >= 1:
        assert lam > 0
        assert tt_norm(n) ** 2 == pytest.approx(target, rel=1e-9)
    else:
        # assert only reachable with the printed tail, just above sqrt(M)
        assert profile == "printed" and 2 < tt_norm(t) < 16 / 7
        assert lam == 0.0 and n.allclose(tt_one(3, M), atol=0)
    if tt_norm(t) <= 2:
        assert lam == 1.0


def test_printed_band_collapses():
    cfg = NormalizationConfig()
    lam, t = tensor_normalize(level1_tensor(3, 2, 3.84), cfg)  # norm 2.2
    assert lam == 0.0 and t.allclose(tt_one(3, 2), atol=0)
    lam, t = tensor_normalize(level1_tensor(3, 2, 3.84), NormalizationConfig(profile="squared"))
    assert 0 < lam < 1
    assert tt_norm(t) ** 2 == pytest.approx(psi(np.sqrt(4.84), NormalizationConfig(profile="squared")))


def test_config_roundtrip():
    for cfg in (NormalizationConfig(), NormalizationConfig(9.0, 2.0, profile="squared")):
        assert NormalizationConfig.from_dict(cfg.to_dict()) == cfg
    assert NormalizationConfig().to_dict() == {"M": 4.0, "a": 1.0}
    with pytest.raises(ValueError):
        NormalizationConfig.from_dict({"M": 4.0, "b": 1})
    with pytest.raises(ValueError):
        NormalizationConfig(profile="cubic")


def test_normalize_injective_spot_check(rng):
    outs = [tensor_normalize(random_unit_tensor(rng, 3, 3, 2.0))[1].to_vector() for _ in range(30)]
    d = [np.linalg.norm(a - b) for i, a in enumerate(outs) for b in outs[i + 1 :]]
    assert min(d) > 1e-6


def test_normalized_signature_bounded(rng):
    cfg = NormalizationConfig()
    for _ in range(10):
        p = random_so3_path(rng, 30, scale=1.0)
        assert tt_norm(normalized_signature(p, 4)) <= np.sqrt(cfg.sup)


def test_kernel_naive_basics(rng):
    p = random_so3_path(rng, 6)
    assert kernel_naive(p, p, 3) == pytest.approx(tt_norm(signature(p, 3)) ** 2)
    g = sample_uniform_so3(rng)
    const = DiscretePath.from_points([g] * 4)
    assert kernel_naive(const, p, 4) == pytest.approx(1.0)
    assert kernel_horner(const, p, 4) == pytest.approx(1.0)


def test_horner_single_steps(rng):
    v, w = rng.normal(size=3), rng.normal(size=3)
    a, b = integrate(SO3, v[None]), integrate(SO3, w[None])
    assert kernel_horner(a, b, 5) == pytest.approx(1 + v @ w, rel=1e-14)


@pytest.mark.parametrize("M", [0, 1, 2, 3, 4])
def test_horner_matches_brute_force(M, rng):
    for Ta, Tb in [(1, 1), (3, 5), (8, 8), (8, 2)]:
        a, b = rng.normal(size=(Ta, 3)), rng.normal(size=(Tb, 3))
        expected = tt_inner(signature_brute_force(a, M), signature_brute_force(b, M))
        assert kernel_horner(a, b, M) == pytest.approx(expected, abs=1e-12, rel=1e-12)


def test_horner_matches_naive_discrete(rng):
    for M in (2, 4, 6):
        a, b = random_so3_path(rng, 40), random_so3_path(rng, 25)
        h = kernel_horner(a, b, M)
        n = kernel_naive(a, b, M, mode="discrete")
        assert h == pytest.approx(n, rel=1e-10)


def test_horner_symmetric(rng):
    a, b = random_so3_path(rng, 9), random_so3_path(rng, 14)
    assert kernel_horner(a, b, 4) == kernel_horner(b, a, 4)


def test_gram_psd(rng):
    paths = [random_so3_path(rng, 10) for _ in range(20)]
    K = gram_matrix(paths, 4).values
    np.testing.assert_allclose(K, K.T, atol=1e-10)
    assert np.linalg.eigvalsh(K).min() >= -1e-8
    assert np.all(np.diag(K) >= 1.0)


def test_gram_constants_all_ones(rng):
    paths = [DiscretePath.from_points([sample_uniform_so3(rng)] * 3) for _ in range(4)]
    for kernel in ("horner", "naive"):
        np.testing.assert_allclose(gram_matrix(paths, 3, kernel).values, 1.0, atol=1e-12)


def test_gram_normalized(rng):
    paths = [random_so3_path(rng, 15, scale=1.0) for _ in range(6)]
    G = gram_matrix(paths, 4, "naive", normalized=True)
    assert np.all(np.diag(G.values) <= NormalizationConfig().sup + 1e-12)
    assert G.metadata() == {
        "n": 6, "M": 4, "kernel": "naive", "normalized": True,
        "mode": "continuous", "psi": {"M": 4.0, "a": 1.0},
    }
    dup = [duplicate_point(p, 2) for p in paths]
    np.testing.assert_allclose(
        gram_matrix(dup, 4, "naive", normalized=True).values, G.values, atol=1e-10
    )
    H = gram_matrix(paths, 4, "horner", normalized=True)
    assert H.mode == "discrete"
    np.testing.assert_allclose(
        H.values, gram_matrix(paths, 4, "naive", True, mode="discrete").values, atol=1e-12
    )


def test_kernel_matrix_rectangular(rng):
    X = [random_so3_path(rng, 5) for _ in range(3)]
    Y = [random_so3_path(rng, 7) for _ in range(2)]
    K = kernel_matrix(X, Y, 3)
    assert K.shape == (3, 2)
    assert K[1, 0] == pytest.approx(kernel_horner(X[1], Y[0], 3))
    N = kernel_matrix(X, Y, 3, "naive", normalized=True)
    assert N[2, 1] == pytest.approx(kernel_naive(X[2], Y[1], 3, normalized=True))


def test_kernel_matrix_parallel(rng, monkeypatch):
    paths = [random_so3_path(rng, 6) for _ in range(5)]
    serial = kernel_matrix(paths, None, 3, n_jobs=1)
    monkeypatch.setenv("LIESIG_THREADS", "2")
    np.testing.assert_array_equal(kernel_matrix(paths, None, 3), serial)


def test_mode_errors(rng):
    paths = [random_so3_path(rng, 3) for _ in range(2)]
    with pytest.raises(ValueError):
        gram_matrix(paths, 2, "horner", mode="continuous")
    with pytest.raises(ValueError):
        gram_matrix(paths, 2, "bogus")
    with pytest.raises(ValueError):
        kernel_horner(paths[0], random_euclidean_path(rng, 3, 2), 2)


def test_self_kernel_monotone_in_level(rng):
    p = random_so3_path(rng, 10)
    vals = [kernel_horner(p, p, M) for M in range(7)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    vals = [kernel_naive(p, p, M) for M in range(6)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_unequal_lengths_euclidean(rng):
    a, b = random_euclidean_path(rng, 4, 2), random_euclidean_path(rng, 11, 2)
    assert kernel_horner(a, b, 4) == pytest.approx(kernel_naive(a, b, 4, mode="discrete"), rel=1e-12)
