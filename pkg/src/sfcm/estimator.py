"""Scikit-learn style front end for the clustering engine.

``X`` is a single 2-D intensity grid (typically a normalized difference
image), not a samples-by-features matrix: the spatial variant needs the
pixel layout. Fitted attributes follow sklearn conventions so the
estimator composes with ``clone``, ``get_params`` and friends.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.utils.validation import check_is_fitted

from .clustering import fcm_membership, run_sfcm
from .config import SfcmConfig
from .validation import check_image


class SpatialFuzzyCMeans(ClusterMixin, BaseEstimator):
    """Fuzzy c-means on an intensity grid with optional spatial regularization.

    Parameters
    ----------
    n_clusters : int, default=2
        Number of clusters; the brightest one is reported as "changed".
    m : float, default=2.0
        Fuzzification exponent, must be > 1.
    p, q : float, default=1.0
        Exponents weighting the original membership (p) against the
        spatial function (q) in the reweighting step. ``q=0`` disables
        the spatial term exactly.
    window_radius : int, default=1
        Half-width of the square neighborhood window (1 means 3x3).
    epsilon : float, default=1e-5
        Convergence threshold on the max membership change per iteration.
    max_iter : int, default=100
        Iteration cap.
    init : str or array-like, default="percentile"
        "percentile", "kmeans-like", or explicit starting centers.
    spatial_variant : {"none", "neighbor", "intensity"}, default="neighbor"
        Which spatial function reweights memberships each iteration.
    intensity_levels : int, default=256
        Bin count for the intensity variant.
    seed : int, default=0
        Kept for interface parity with the config file; the fit itself
        is deterministic.

    Attributes
    ----------
    cluster_centers_ : ndarray of shape (n_clusters,), ascending
    membership_ : ndarray of shape (H, W, n_clusters)
    labels_ : ndarray of shape (H, W)
    change_map_ : ndarray of shape (H, W), uint8, 1 = changed
    n_iter_ : int
    trace_ : ndarray of shape (n_iter_, 2), per-iteration
        (max membership delta, objective value)

    Examples
    --------
    >>> import numpy as np
    >>> from sfcm import SpatialFuzzyCMeans
    >>> diff = np.random.default_rng(0).random((32, 32))
    >>> model = SpatialFuzzyCMeans(spatial_variant="neighbor").fit(diff)
    >>> model.change_map_.shape
    (32, 32)
    """

    def __init__(
        self,
        n_clusters: int = 2,
        m: float = 2.0,
        p: float = 1.0,
        q: float = 1.0,
        window_radius: int = 1,
        epsilon: float = 1e-5,
        max_iter: int = 100,
        init="percentile",
        spatial_variant: str = "neighbor",
        intensity_levels: int = 256,
        seed: int = 0,
    ):
        self.n_clusters = n_clusters
        self.m = m
        self.p = p
        self.q = q
        self.window_radius = window_radius
        self.epsilon = epsilon
        self.max_iter = max_iter
        self.init = init
        self.spatial_variant = spatial_variant
        self.intensity_levels = intensity_levels
        self.seed = seed

    def _config(self) -> SfcmConfig:
        init = self.init
        if not isinstance(init, str):
            init = tuple(float(v) for v in np.asarray(init, dtype=np.float64))
        return SfcmConfig(
            c=self.n_clusters,
            m=self.m,
            p=self.p,
            q=self.q,
            window_radius=self.window_radius,
            epsilon=self.epsilon,
            max_iter=self.max_iter,
            init=init,
            spatial_variant=self.spatial_variant,
            intensity_levels=self.intensity_levels,
            seed=self.seed,
        )

    @classmethod
    def from_config(cls, cfg: SfcmConfig) -> "SpatialFuzzyCMeans":
        return cls(
            n_clusters=cfg.c,
            m=cfg.m,
            p=cfg.p,
            q=cfg.q,
            window_radius=cfg.window_radius,
            epsilon=cfg.epsilon,
            max_iter=cfg.max_iter,
            init=cfg.init,
            spatial_variant=cfg.spatial_variant,
            intensity_levels=cfg.intensity_levels,
            seed=cfg.seed,
        )

    def fit(self, X, y=None):
        """Cluster the grid ``X`` and derive labels and the change map."""
        img = check_image(X, "X")
        result = run_sfcm(img, self._config())
        self.cluster_centers_ = result.centers
        self.membership_ = result.membership
        self.labels_ = result.labels
        self.change_map_ = result.change_map
        self.n_iter_ = result.iterations
        self.trace_ = result.trace
        return self

    def predict(self, X) -> np.ndarray:
        """Hard labels for a new grid using the fitted centers."""
        check_is_fitted(self, "cluster_centers_")
        img = check_image(X, "X")
        u = fcm_membership(img, self.cluster_centers_, self.m)
        return np.argmax(u, axis=2).astype(np.int64)

    def predict_membership(self, X) -> np.ndarray:
        """Membership field for a new grid using the fitted centers."""
        check_is_fitted(self, "cluster_centers_")
        img = check_image(X, "X")
        return fcm_membership(img, self.cluster_centers_, self.m)
