"""Drifted random walks on SO(3) and the two-sample testing experiment."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace

import numpy as np

from ._parallel import parallel_map
from .kernel import DEFAULT_NORMALIZATION, NormalizationConfig, gram_matrix
from .lie_groups import SO3, sample_uniform_so3_matrices, so3_exp
from .paths import DiscretePath, matrix_representation
from .stats import TestConfig, TestReport, permutation_test

REPRESENTATIONS = ("lie", "euclidean9")


def vmf_polar(xi, kappa: float):
    """Inverse CDF of the polar coordinate ``W = <x, mu>`` of a vMF on S^2.

    ``xi = 1`` maps to ``W = 1`` and ``xi = 0`` to ``W = -1``. For ``xi > 1/2``
    the log1p form avoids cancellation when ``1 - xi`` is tiny.
    """
    xi = np.asarray(xi, dtype=float)
    if kappa <= 0:
        return 2.0 * xi - 1.0
    em = np.expm1(-2.0 * kappa)
    with np.errstate(divide="ignore"):
        direct = np.log(xi + (1.0 - xi) * np.exp(-2.0 * kappa))
        stable = np.log1p((1.0 - xi) * em)
    w = 1.0 + np.where(xi > 0.5, stable, direct) / kappa
    w = np.clip(w, -1.0, 1.0)
    return float(w) if w.ndim == 0 else w


def _frame(mu: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Two unit vectors completing ``mu`` to an orthonormal frame."""
    helper = np.array([1.0, 0.0, 0.0]) if abs(mu[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    u1 = np.cross(mu, helper)
    u1 /= np.linalg.norm(u1)
    return u1, np.cross(mu, u1)


def _unit_mean(mu) -> np.ndarray:
    mu = np.asarray(mu, dtype=float).ravel()
    if mu.shape != (3,) or abs(np.linalg.norm(mu) - 1.0) > 1e-12:
        raise ValueError(f"mean direction must be a unit 3-vector, got {mu}")
    return mu


def vmf_from_uniforms(mu, kappa: float, xi, phi) -> np.ndarray:
    """Deterministic vMF transform of uniforms ``xi`` in [0,1] and angles ``phi``."""
    mu = _unit_mean(mu)
    w = np.asarray(vmf_polar(xi, kappa))
    r = np.sqrt(np.clip(1.0 - w**2, 0.0, None))
    u1, u2 = _frame(mu)
    phi = np.asarray(phi, dtype=float)
    return (
        r[..., None] * (np.cos(phi)[..., None] * u1 + np.sin(phi)[..., None] * u2)
        + w[..., None] * mu
    )


def sample_vmf(mu, kappa: float, rng: np.random.Generator, size=None) -> np.ndarray:
    """Von Mises-Fisher draws on S^2 by inversion of the polar CDF.

    ``kappa = 0`` gives the uniform distribution on the sphere.
    """
    if kappa < 0:
        raise ValueError(f"concentration must be >= 0, got {kappa}")
    shape = () if size is None else (size,) if np.isscalar(size) else tuple(size)
    xi = rng.random(shape)
    phi = rng.random(shape) * (2.0 * np.pi)
    return vmf_from_uniforms(mu, kappa, xi, phi)


@dataclass(frozen=True)
class WalkConfig:
    """Random walk ``g_{i+1} = g_i exp(c v_i)`` with vMF increments ``v_i``."""

    steps: int = 100
    step_size: float = 0.1
    mean_direction: tuple = (1.0, 0.0, 0.0)
    concentration: float = 0.1
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "mean_direction", tuple(float(x) for x in self.mean_direction))
        _unit_mean(self.mean_direction)
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")
        if self.step_size < 0:
            raise ValueError(f"step_size must be >= 0, got {self.step_size}")
        if self.concentration < 0:
            raise ValueError(f"concentration must be >= 0, got {self.concentration}")

    def same_law(self, other: "WalkConfig") -> bool:
        return replace(self, seed=None) == replace(other, seed=None)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["mean_direction"] = list(self.mean_direction)
        return d

    @classmethod
    def from_dict(cls, doc: dict) -> "WalkConfig":
        known = {"steps", "step_size", "mean_direction", "concentration", "seed"}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown walk fields: {sorted(unknown)}")
        return cls(**doc)


def random_walk_matrices(cfg: WalkConfig, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` walks as an ``(n, T+1, 3, 3)`` array with Haar-uniform starts."""
    start = sample_uniform_so3_matrices(rng, n)
    v = sample_vmf(cfg.mean_direction, cfg.concentration, rng, (n, cfg.steps))
    steps = so3_exp(cfg.step_size * v)
    out = np.empty((n, cfg.steps + 1, 3, 3))
    out[:, 0] = start
    for i in range(cfg.steps):
        out[:, i + 1] = out[:, i] @ steps[:, i]
    return out


def random_walks_so3(cfg: WalkConfig, n: int, rng=None) -> list[DiscretePath]:
    rng = np.random.default_rng(cfg.seed if rng is None else rng)
    return [DiscretePath(SO3, (w,)) for w in random_walk_matrices(cfg, n, rng)]


def random_walk_so3(cfg: WalkConfig, rng=None) -> DiscretePath:
    return random_walks_so3(cfg, 1, rng)[0]


@dataclass(frozen=True)
class ExperimentConfig:
    """Repeated two-sample tests between walks drawn from ``walk_x`` and ``walk_y``."""

    trials: int = 1000
    samples_per_class: int = 50
    walk_x: WalkConfig = field(default_factory=WalkConfig)
    walk_y: WalkConfig = field(default_factory=lambda: WalkConfig(mean_direction=(0.0, 1.0, 0.0)))
    level: int = 4
    representation: str = "lie"
    test: TestConfig = field(default_factory=TestConfig)
    kernel: str = "naive"
    normalized: bool = True
    normalization: NormalizationConfig = DEFAULT_NORMALIZATION
    seed: int | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.samples_per_class < 2:
            raise ValueError(f"need >= 2 samples per class, got {self.samples_per_class}")
        if self.level < 1:
            raise ValueError(f"truncation level must be >= 1, got {self.level}")
        if self.representation not in REPRESENTATIONS:
            raise ValueError(
                f"representation must be one of {REPRESENTATIONS}, got {self.representation!r}"
            )

    @property
    def null_is_true(self) -> bool:
        return self.walk_x.same_law(self.walk_y)

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "samples_per_class": self.samples_per_class,
            "walk_x": self.walk_x.to_dict(),
            "walk_y": self.walk_y.to_dict(),
            "level": self.level,
            "representation": self.representation,
            "test": self.test.to_dict(),
            "kernel": self.kernel,
            "normalized": self.normalized,
            "psi": self.normalization.to_dict(),
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        doc = dict(doc)
        kwargs = {}
        for key in ("walk_x", "walk_y"):
            if key in doc:
                kwargs[key] = WalkConfig.from_dict(doc.pop(key))
        if "test" in doc:
            kwargs["test"] = TestConfig(**doc.pop("test"))
        if "psi" in doc:
            kwargs["normalization"] = NormalizationConfig.from_dict(doc.pop("psi"))
        known = {
            "trials", "samples_per_class", "level", "representation",
            "kernel", "normalized", "seed",
        }
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown experiment fields: {sorted(unknown)}")
        return cls(**doc, **kwargs)


@dataclass
class ExperimentSummary:
    """Error rate over all trials plus the individual reports."""

    config: ExperimentConfig
    reports: list

    @property
    def rejection_rate(self) -> float:
        return float(np.mean([r.reject for r in self.reports]))

    @property
    def error_type(self) -> str:
        return "type_I" if self.config.null_is_true else "type_II"

    @property
    def error_rate(self) -> float:
        rate = self.rejection_rate
        return rate if self.config.null_is_true else 1.0 - rate

    def to_dict(self) -> dict:
        return {
            "error_type": self.error_type,
            "error_rate": self.error_rate,
            "rejection_rate": self.rejection_rate,
            "trials": len(self.reports),
            "config": self.config.to_dict(),
            "reports": [r.to_dict() for r in self.reports],
        }


def _trial_paths(cfg: ExperimentConfig, rng: np.random.Generator) -> list[DiscretePath]:
    n = cfg.samples_per_class
    paths = random_walks_so3(cfg.walk_x, n, rng) + random_walks_so3(cfg.walk_y, n, rng)
    if cfg.representation == "euclidean9":
        paths = [matrix_representation(p) for p in paths]
    return paths


def run_trial(cfg: ExperimentConfig, seed) -> tuple[TestReport, np.ndarray]:
    """One trial: fresh walks, pooled Gram matrix, permutation test.

    ``seed`` is a ``SeedSequence`` (or int); walks and permutations use
    independent child streams, so the same seed yields the same walks for
    either representation.
    """
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    walk_seq, perm_seq = seed.spawn(2)
    paths = _trial_paths(cfg, np.random.default_rng(walk_seq))
    gram = gram_matrix(paths, cfg.level, cfg.kernel, cfg.normalized, cfg.normalization)
    n = cfg.samples_per_class
    test = replace(cfg.test, seed=cfg.seed)
    return permutation_test(gram, n, n, test, np.random.default_rng(perm_seq))


def run_experiment(cfg: ExperimentConfig, n_jobs: int | None = None, return_null: bool = False):
    """Run ``cfg.trials`` independent trials with per-trial seeds from ``cfg.seed``.

    Returns an :class:`ExperimentSummary`; with ``return_null`` also the null
    distribution of the first trial.
    """
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.trials)
    results = parallel_map(lambda s: run_trial(cfg, s), seeds, n_jobs)
    summary = ExperimentSummary(cfg, [r for r, _ in results])
    if return_null:
        return summary, results[0][1]
    return summary
