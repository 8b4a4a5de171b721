"""scikit-learn compatible wrappers.

Inputs ``X`` are collections of paths: lists of :class:`~liesig.paths.DiscretePath`,
lists of ``(T+1, d)`` / ``(T+1, 3, 3)`` arrays, or one stacked array. Paths in a
collection may have different lengths.
"""

from __future__ import annotations

import itertools

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_level, check_paths
from .kernel import NormalizationConfig, kernel_matrix, normalize_features
from .paths import apply_transform, parse_transform
from .signature import lead_matrix, level2_matrix, signature_matrix
from .stats import TestConfig, permutation_test


def _prepare(X, path_transform, spec=None):
    parse_transform(path_transform)
    paths = check_paths(X, spec)
    return [apply_transform(p, path_transform) for p in paths]


class SignatureTransformer(TransformerMixin, BaseEstimator):
    """Map each path to its truncated (optionally normalized) signature.

    Parameters
    ----------
    level : int, default=2
        Truncation level.
    mode : {"continuous", "discrete"}, default="continuous"
    path_transform : {None, "time", "idinit", "swin:<lags>"}, default=None
        Applied to every path before the signature.
    normalize : bool, default=False
        Apply the tensor normalization with parameters ``psi_cap``, ``psi_decay``
        and ``psi_profile`` (see :class:`~liesig.kernel.NormalizationConfig`).
    include_constant : bool, default=False
        Keep the level-0 coefficient (always 1 before normalization) as a column.

    Attributes
    ----------
    spec_ : GroupSpec
        Group of the (transformed) training paths.
    n_features_out_ : int
    """

    def __init__(
        self,
        level=2,
        mode="continuous",
        path_transform=None,
        normalize=False,
        psi_cap=4.0,
        psi_decay=1.0,
        psi_profile="printed",
        include_constant=False,
    ):
        self.level = level
        self.mode = mode
        self.path_transform = path_transform
        self.normalize = normalize
        self.psi_cap = psi_cap
        self.psi_decay = psi_decay
        self.psi_profile = psi_profile
        self.include_constant = include_constant

    def fit(self, X, y=None):
        check_level(self.level, 1)
        paths = _prepare(X, self.path_transform)
        self.spec_ = paths[0].spec
        N = self.spec_.algebra_dim
        self.n_features_out_ = sum(N**m for m in range(self.level + 1)) - (
            0 if self.include_constant else 1
        )
        return self

    def transform(self, X):
        check_is_fitted(self, "spec_")
        paths = [apply_transform(p, self.path_transform) for p in check_paths(X)]
        if paths[0].spec != self.spec_:
            raise ValueError(f"fitted on {self.spec_!r} paths, got {paths[0].spec!r}")
        F = signature_matrix(paths, self.level, self.mode)
        if self.normalize:
            cfg = NormalizationConfig(self.psi_cap, self.psi_decay, profile=self.psi_profile)
            F = normalize_features(F, self.spec_.algebra_dim, self.level, cfg)
        return F if self.include_constant else F[:, 1:]

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "spec_")
        N = self.spec_.algebra_dim
        names = ["S()"] if self.include_constant else []
        for m in range(1, self.level + 1):
            for idx in itertools.product(range(N), repeat=m):
                names.append("S(" + ",".join(map(str, idx)) + ")")
        return np.asarray(names, dtype=object)


class LeadMatrixTransformer(TransformerMixin, BaseEstimator):
    """Flattened ``N x N`` lead matrix (``kind="lead"``) or level-2 signature.

    The lead matrix is antisymmetric, so with ``upper_only=True`` only the
    ``N (N - 1) / 2`` entries above the diagonal are returned.
    """

    def __init__(self, kind="lead", mode="continuous", path_transform=None, upper_only=False):
        self.kind = kind
        self.mode = mode
        self.path_transform = path_transform
        self.upper_only = upper_only

    def fit(self, X, y=None):
        if self.kind not in ("lead", "level2"):
            raise ValueError(f"kind must be 'lead' or 'level2', got {self.kind!r}")
        paths = _prepare(X, self.path_transform)
        self.spec_ = paths[0].spec
        return self

    def transform(self, X):
        check_is_fitted(self, "spec_")
        paths = [apply_transform(p, self.path_transform) for p in check_paths(X)]
        func = lead_matrix if self.kind == "lead" else level2_matrix
        mats = np.stack([func(p, self.mode) for p in paths])
        if self.upper_only:
            iu = np.triu_indices(mats.shape[1], k=1)
            return mats[:, iu[0], iu[1]]
        return mats.reshape(len(paths), -1)


class SignatureKernel(TransformerMixin, BaseEstimator):
    """Signature kernel against the training paths.

    ``transform(X)`` returns the ``(len(X), n_train)`` kernel matrix, which can
    be fed to estimators that accept ``kernel="precomputed"``.
    """

    def __init__(
        self,
        level=4,
        kernel="horner",
        normalize=False,
        mode=None,
        path_transform=None,
        psi_cap=4.0,
        psi_decay=1.0,
        psi_profile="printed",
        n_jobs=None,
    ):
        self.level = level
        self.kernel = kernel
        self.normalize = normalize
        self.mode = mode
        self.path_transform = path_transform
        self.psi_cap = psi_cap
        self.psi_decay = psi_decay
        self.psi_profile = psi_profile
        self.n_jobs = n_jobs

    def _matrix(self, X, Y=None):
        cfg = NormalizationConfig(self.psi_cap, self.psi_decay, profile=self.psi_profile)
        return kernel_matrix(
            X, Y, self.level, self.kernel, self.normalize, cfg, self.mode, self.n_jobs
        )

    def fit(self, X, y=None):
        check_level(self.level, 0)
        self.X_fit_ = _prepare(X, self.path_transform)
        return self

    def transform(self, X):
        check_is_fitted(self, "X_fit_")
        paths = _prepare(X, self.path_transform, self.X_fit_[0].spec)
        return self._matrix(paths, self.X_fit_)

    def fit_transform(self, X, y=None, **fit_params):
        self.fit(X)
        return self._matrix(self.X_fit_)


class SignatureMMDTest(BaseEstimator):
    """Two-sample permutation test with a signature kernel MMD statistic.

    ``fit(X, Y)`` runs the test. Results are stored in ``report_`` and mirrored
    in ``mmd_``, ``threshold_``, ``p_value_``, ``reject_`` and
    ``null_distribution_``.
    """

    def __init__(
        self,
        level=4,
        kernel="horner",
        normalize=False,
        mode=None,
        alpha=0.05,
        permutations=2000,
        random_state=None,
        psi_cap=4.0,
        psi_decay=1.0,
        psi_profile="printed",
        n_jobs=None,
    ):
        self.level = level
        self.kernel = kernel
        self.normalize = normalize
        self.mode = mode
        self.alpha = alpha
        self.permutations = permutations
        self.random_state = random_state
        self.psi_cap = psi_cap
        self.psi_decay = psi_decay
        self.psi_profile = psi_profile
        self.n_jobs = n_jobs

    def fit(self, X, Y):
        check_level(self.level, 1)
        px = check_paths(X)
        py = check_paths(Y, px[0].spec)
        cfg = NormalizationConfig(self.psi_cap, self.psi_decay, profile=self.psi_profile)
        K = kernel_matrix(
            px + py, None, self.level, self.kernel, self.normalize, cfg, self.mode, self.n_jobs
        )
        seed = self.random_state if isinstance(self.random_state, (int, np.integer)) else None
        test = TestConfig(self.alpha, self.permutations, seed)
        rng = self.random_state if isinstance(self.random_state, np.random.Generator) else None
        self.report_, self.null_distribution_ = permutation_test(K, len(px), len(py), test, rng)
        self.mmd_ = self.report_.mmd
        self.threshold_ = self.report_.threshold
        self.p_value_ = self.report_.p_value
        self.reject_ = self.report_.reject
        return self
