import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from liesig import (
    ExperimentConfig,
    TestConfig,
    WalkConfig,
    discrete_derivative,
    left_translate,
    one_variation,
    random_walk_so3,
    random_walks_so3,
    run_experiment,
    sample_vmf,
)
from liesig.lie_groups import sample_uniform_so3, sample_uniform_so3_matrices
from liesig.paths import matrix_representation
from liesig.randwalk import _trial_paths, run_trial, vmf_from_uniforms, vmf_polar


def mean_w(kappa):
    return 1 / np.tanh(kappa) - 1 / kappa


@pytest.mark.parametrize("kappa", [0.0, 0.1, 1.0, 10.0, 500.0, 1e5])
def test_polar_boundaries_exact(kappa):
    assert vmf_polar(1.0, kappa) == 1.0
    assert vmf_polar(0.0, kappa) == -1.0


@pytest.mark.parametrize("kappa", [0.1, 1.0, 10.0])
def test_boundary_directions(kappa):
    mu = np.array([0.0, 0.6, 0.8])
    np.testing.assert_array_equal(vmf_from_uniforms(mu, kappa, 1.0, 0.3), mu)
    np.testing.assert_array_equal(vmf_from_uniforms(mu, kappa, 0.0, 1.1), -mu)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(0.01, 50.0))
def test_polar_in_range_and_cdf(xi, kappa):
    w = vmf_polar(xi, kappa)
    assert -1.0 <= w <= 1.0
    # the vMF polar CDF (e^{k w} - e^{-k}) / (e^k - e^{-k}) inverts back to xi
    cdf = np.expm1(kappa * (w + 1)) / np.expm1(2 * kappa)
    assert cdf == pytest.approx(xi, abs=1e-9)


def test_polar_stable_near_one():
    # 1 - xi tiny: the direct formula loses every digit here
    w = vmf_polar(1 - 1e-15, 1e-3)
    assert 1 - w == pytest.approx(2e-15, rel=1e-3)


@pytest.mark.parametrize("kappa", [0.1, 1.0, 10.0])
def test_mean_polar(kappa):
    rng = np.random.default_rng(int(kappa * 10))
    mu = np.array([1.0, 0.0, 0.0])
    x = sample_vmf(mu, kappa, rng, 200_000)
    np.testing.assert_allclose(np.linalg.norm(x, axis=1), 1.0, atol=1e-12)
    assert (x @ mu).mean() == pytest.approx(mean_w(kappa), abs=0.01)


def test_uniform_at_zero_concentration():
    x = sample_vmf([0.0, 0.0, 1.0], 0.0, np.random.default_rng(1), 100_000)
    assert np.abs(x.mean(axis=0)).max() < 0.01
    # each coordinate of a uniform point on S^2 is uniform on [-1, 1]
    assert np.mean(x[:, 2] ** 2) == pytest.approx(1 / 3, abs=0.01)


def test_vmf_rotation_symmetry():
    rng = np.random.default_rng(2)
    mu = np.array([0.0, 1.0, 0.0])
    x = sample_vmf(mu, 2.0, rng, 200_000)
    perp = x - np.outer(x @ mu, mu)
    assert np.abs(perp.mean(axis=0)).max() < 0.01


def test_vmf_validation():
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError):
        sample_vmf([1.0, 1.0, 0.0], 1.0, rng)
    with pytest.raises(ValueError):
        sample_vmf([1.0, 0.0, 0.0], -1.0, rng)
    assert sample_vmf([1.0, 0.0, 0.0], 1.0, rng).shape == (3,)


def test_walk_config_validation():
    with pytest.raises(ValueError):
        WalkConfig(steps=0)
    with pytest.raises(ValueError):
        WalkConfig(mean_direction=(1.0, 1.0, 0.0))
    with pytest.raises(ValueError):
        WalkConfig(concentration=-1)
    with pytest.raises(ValueError):
        WalkConfig.from_dict({"steps": 3, "colour": "red"})
    cfg = WalkConfig(steps=7, step_size=0.2, seed=3)
    assert WalkConfig.from_dict(cfg.to_dict()) == cfg
    assert cfg.same_law(WalkConfig(steps=7, step_size=0.2, seed=99))


def test_walk_increments():
    cfg = WalkConfig(steps=30, step_size=0.25, concentration=1.0)
    rng = np.random.default_rng(5)
    walks = random_walks_so3(cfg, 4, rng)
    # replay the draws: Haar starts first, then the vMF increments
    replay = np.random.default_rng(5)
    starts = sample_uniform_so3_matrices(replay, 4)
    v = sample_vmf(cfg.mean_direction, cfg.concentration, replay, (4, 30))
    for k, w in enumerate(walks):
        assert w.n_points == 31
        np.testing.assert_array_equal(w.blocks[0][0], starts[k])
        np.testing.assert_allclose(discrete_derivative(w), 0.25 * v[k], atol=1e-10)
        assert one_variation(w) == pytest.approx(30 * 0.25, rel=1e-12)


def test_zero_step_size_constant():
    w = random_walk_so3(WalkConfig(steps=5, step_size=0.0), np.random.default_rng(0))
    np.testing.assert_array_equal(w.blocks[0], np.broadcast_to(w.blocks[0][0], (6, 3, 3)))


def test_left_invariant_increments():
    w = random_walk_so3(WalkConfig(steps=10, seed=1))
    g = sample_uniform_so3(np.random.default_rng(2))
    np.testing.assert_allclose(
        discrete_derivative(left_translate(w, g)), discrete_derivative(w), atol=1e-10
    )


def test_walks_deterministic():
    a = random_walks_so3(WalkConfig(steps=10, seed=4), 3)
    b = random_walks_so3(WalkConfig(steps=10, seed=4), 3)
    for x, y in zip(a, b):
        np.testing.assert_array_equal(x.blocks[0], y.blocks[0])


def small_experiment(**kw):
    base = dict(
        trials=3,
        samples_per_class=5,
        walk_x=WalkConfig(steps=10),
        walk_y=WalkConfig(steps=10, mean_direction=(0.0, 1.0, 0.0)),
        test=TestConfig(permutations=100),
        seed=7,
    )
    base.update(kw)
    return ExperimentConfig(**base)


def test_experiment_config_roundtrip_and_validation():
    cfg = small_experiment()
    assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg
    assert not cfg.null_is_true
    assert small_experiment(walk_y=WalkConfig(steps=10)).null_is_true
    for bad in ({"samples_per_class": 1}, {"level": 0}, {"representation": "quat"}, {"trials": 0}):
        with pytest.raises(ValueError):
            small_experiment(**bad)
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict({"trails": 3})


def test_same_walks_for_both_representations():
    cfg = small_experiment()
    seq = np.random.SeedSequence(1).spawn(2)[0]
    lie = _trial_paths(cfg, np.random.default_rng(seq))
    seq = np.random.SeedSequence(1).spawn(2)[0]
    e9 = _trial_paths(small_experiment(representation="euclidean9"), np.random.default_rng(seq))
    for a, b in zip(lie, e9):
        assert b.allclose(matrix_representation(a), atol=0)


def test_run_trial_deterministic():
    cfg = small_experiment()
    r1, n1 = run_trial(cfg, 123)
    r2, n2 = run_trial(cfg, 123)
    assert r1 == r2
    np.testing.assert_array_equal(n1, n2)
    assert r1.seed == 7


def test_run_experiment_summary():
    cfg = small_experiment()
    s = run_experiment(cfg)
    assert len(s.reports) == 3
    assert s.error_type == "type_II"
    assert s.error_rate == 1 - s.rejection_rate
    doc = s.to_dict()
    assert doc["trials"] == 3 and len(doc["reports"]) == 3
    again = run_experiment(cfg, n_jobs=2)
    assert [r.to_dict() for r in again.reports] == [r.to_dict() for r in s.reports]
    null_cfg = small_experiment(walk_y=WalkConfig(steps=10))
    assert run_experiment(null_cfg).error_type == "type_I"
