"""Fuzzy c-means clustering with spatial regularization on intensity grids.

One iteration of the loop:

1. memberships from the current centers via the reciprocal-distance
   update ``u_ij = 1 / sum_k (|x_j - v_i| / |x_j - v_k|) ** (2/(m-1))``;
2. optionally, a spatial function ``h`` (window sums of memberships, or
   same-intensity-bin sums) reweights each pixel's row as
   ``u'_ij = u_ij**p * h_ij**q / sum_k u_kj**p * h_kj**q``;
3. centers move to the membership-weighted means
   ``v_i = sum_j u_ij**m x_j / sum_j u_ij**m`` and are re-sorted
   ascending, permuting membership columns to match, so that the last
   cluster always names the brightest intensities;
4. the loop stops when the largest membership change falls below
   ``epsilon``, or after ``max_iter`` iterations.

All operations are pure and deterministic; single-threaded numpy is the
reference execution mode.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import SfcmConfig
from .errors import NumericalError
from .validation import check_centers, check_image, check_membership, check_same_shape


@dataclass(frozen=True)
class ChangeResult:
    """Everything produced by one clustering run.

    ``change_map`` marks pixels assigned to the brightest cluster (1 =
    changed). ``trace`` has one row per executed iteration with columns
    (max membership delta, clustering objective).
    """

    membership: np.ndarray
    centers: np.ndarray
    labels: np.ndarray
    change_map: np.ndarray
    iterations: int
    trace: np.ndarray

    @property
    def changed_count(self) -> int:
        return int(self.change_map.sum())


def init_centers(img, cfg: SfcmConfig) -> np.ndarray:
    """Initial cluster centers on the intensity axis, sorted ascending.

    ``percentile`` takes the (k + 0.5)/c quantiles of the intensity
    distribution; ``kmeans-like`` refines those seeds with hard 1-D
    k-means run to convergence; a tuple of fixed centers passes through
    (sorted). Random seeding is deliberately unsupported: it makes runs
    irreproducible and can start the loop from a bad basin.
    """
    img = check_image(img)
    x = img.reshape(-1)
    if isinstance(cfg.init, tuple):
        return np.sort(np.asarray(cfg.init, dtype=np.float64))
    if np.unique(x).size < cfg.c:
        raise NumericalError(f"degenerate image for {cfg.c} clusters")
    quantiles = (np.arange(cfg.c) + 0.5) / cfg.c
    centers = np.quantile(x, quantiles)
    if cfg.init == "kmeans-like":
        centers = _lloyd_1d(x, centers)
    centers = np.sort(centers)
    if np.any(np.diff(centers) == 0):
        raise NumericalError(f"initial centers are not distinct for {cfg.c} clusters")
    return centers


def _lloyd_1d(x: np.ndarray, seeds: np.ndarray, max_iter: int = 300) -> np.ndarray:
    """Hard k-means on scalar data, run to assignment convergence."""
    v = np.sort(np.asarray(seeds, dtype=np.float64))
    labels = None
    for _ in range(max_iter):
        d = np.abs(x[:, None] - v[None, :])
        new_labels = np.argmin(d, axis=1)
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for i in range(v.size):
            members = x[labels == i]
            if members.size:  # empty cluster keeps its previous center
                v[i] = members.mean()
        v = np.sort(v)
    return v


def fcm_membership(img, centers, m: float) -> np.ndarray:
    """Membership degrees of every pixel in every cluster (rows sum to 1).

    A pixel coinciding exactly with a center gets a crisp row (1 for the
    lowest such cluster index, 0 elsewhere), the limit of the update as
    the distance vanishes.
    """
    img = check_image(img)
    v = check_centers(centers)
    if np.unique(v).size < v.size:
        raise NumericalError("duplicate centers")
    if not m > 1:
        raise ValueError(f"m must be > 1, got {m}")
    x = img.reshape(-1)
    d = np.abs(x[:, None] - v[None, :])
    dmin = d.min(axis=1, keepdims=True)
    on_center = dmin[:, 0] == 0
    crisp_index = np.argmax(d[on_center] == 0, axis=1)
    d[on_center] = 1.0  # placeholder rows, overwritten below
    dmin[on_center] = 1.0
    # Dividing by the row minimum keeps the largest weight at exactly 1,
    # so the power never overflows however small the distances get.
    weights = (d / dmin) ** (-2.0 / (m - 1.0))
    u = weights / weights.sum(axis=1, keepdims=True)
    if crisp_index.size:
        u[on_center] = 0.0
        u[np.flatnonzero(on_center), crisp_index] = 1.0
    return u.reshape(img.shape + (v.size,))


def update_centers(img, membership, m: float) -> np.ndarray:
    """Membership-weighted mean intensities, re-sorted ascending."""
    img = check_image(img)
    mf = check_membership(membership)
    check_same_shape(img, mf[..., 0], "image and membership")
    centers, _ = _update_centers_sorted(img, mf, m)
    return centers


def _update_centers_sorted(img, mf, m):
    """Center update plus the matching column permutation of ``mf``."""
    n_clusters = mf.shape[2]
    x = img.reshape(-1)
    um = mf.reshape(-1, n_clusters) ** m
    denom = um.sum(axis=0)
    if np.any(denom == 0):
        dead = int(np.argmax(denom == 0))
        raise NumericalError(f"cluster collapsed (cluster {dead} has zero total membership)")
    v = (um * x[:, None]).sum(axis=0) / denom
    order = np.argsort(v, kind="stable")
    return v[order], mf[:, :, order]


def spatial_neighbor(membership, radius: int = 1) -> np.ndarray:
    """Window sums of memberships: each pixel's value per cluster is the
    sum of that cluster's memberships over the (2r+1)x(2r+1) square
    around it, center included, clipped at the image border.
    """
    mf = check_membership(membership)
    if radius < 1:
        raise ValueError(f"radius must be >= 1, got {radius}")
    height, width, _ = mf.shape
    h = np.zeros_like(mf)
    for di in range(-radius, radius + 1):
        r0, r1 = max(0, -di), min(height, height - di)
        s0, s1 = max(0, di), min(height, height + di)
        for dj in range(-radius, radius + 1):
            c0, c1 = max(0, -dj), min(width, width - dj)
            t0, t1 = max(0, dj), min(width, width + dj)
            h[r0:r1, c0:c1, :] += mf[s0:s1, t0:t1, :]
    return h


def spatial_intensity(membership, img, levels: int = 256) -> np.ndarray:
    """Same-intensity sums of memberships: pixels are grouped into
    ``levels`` equal-width bins over the image's [min, max] range, and
    each pixel's value per cluster is the sum of that cluster's
    memberships over every pixel in its bin, image-wide.
    """
    mf = check_membership(membership)
    img = check_image(img)
    check_same_shape(img, mf[..., 0], "image and membership")
    if levels < 2:
        raise ValueError(f"levels must be >= 2, got {levels}")
    bins = _intensity_bin_index(img, levels)
    n_clusters = mf.shape[2]
    flat = mf.reshape(-1, n_clusters)
    h = np.empty_like(flat)
    for i in range(n_clusters):
        sums = np.bincount(bins, weights=flat[:, i], minlength=levels)
        h[:, i] = sums[bins]
    return h.reshape(mf.shape)


def _intensity_bin_index(img: np.ndarray, levels: int) -> np.ndarray:
    x = img.reshape(-1)
    lo = x.min()
    hi = x.max()
    if hi == lo:
        return np.zeros(x.size, dtype=np.intp)
    idx = np.floor((x - lo) / (hi - lo) * levels).astype(np.intp)
    return np.minimum(idx, levels - 1)


def apply_spatial(membership, h, p: float, q: float) -> np.ndarray:
    """Reweight memberships by the spatial function and renormalize.

    ``0 ** 0`` evaluates to 1, so ``q = 0`` switches the spatial term
    off exactly. A pixel whose reweighted row sums to zero keeps its
    prior memberships: there is no information to update with.
    """
    mf = check_membership(membership)
    h = np.asarray(h, dtype=np.float64)
    if h.shape != mf.shape:
        raise ValueError(f"spatial field shape {h.shape} does not match membership {mf.shape}")
    if not np.all(np.isfinite(h)) or np.any(h < 0):
        raise ValueError("spatial field must be finite and non-negative")
    if p < 0 or q < 0 or p + q <= 0:
        raise ValueError(f"need p >= 0, q >= 0, p + q > 0; got p={p}, q={q}")
    num = (mf ** p) * (h ** q)
    den = num.sum(axis=2, keepdims=True)
    dead = den == 0.0
    if np.any(dead):
        out = num / np.where(dead, 1.0, den)
        return np.where(dead, mf, out)
    return num / den


def fcm_objective(img, membership, centers, m: float) -> float:
    """Weighted within-cluster scatter ``sum_ij u_ij**m (x_j - v_i)**2``."""
    img = check_image(img)
    v = check_centers(centers)
    mf = check_membership(membership, n_clusters=v.size)
    x = img.reshape(-1)
    um = mf.reshape(-1, v.size) ** m
    d2 = (x[:, None] - v[None, :]) ** 2
    return float((um * d2).sum())


def run_sfcm(img, cfg: SfcmConfig) -> ChangeResult:
    """Run the clustering loop to convergence and extract the change map.

    The changed cluster is the one with the largest center: on a
    normalized difference image, change magnitude maps monotonically to
    brightness.
    """
    img = check_image(img)
    try:
        centers = init_centers(img, cfg)
    except NumericalError as exc:
        raise NumericalError(str(exc), iteration=0) from exc

    u_prev = np.zeros(img.shape + (cfg.c,))
    trace_rows = []
    u = u_prev
    iterations = 0
    for iteration in range(1, cfg.max_iter + 1):
        try:
            u = fcm_membership(img, centers, cfg.m)
            if cfg.spatial_variant == "neighbor":
                h = spatial_neighbor(u, cfg.window_radius)
                u = apply_spatial(u, h, cfg.p, cfg.q)
            elif cfg.spatial_variant == "intensity":
                h = spatial_intensity(u, img, cfg.intensity_levels)
                u = apply_spatial(u, h, cfg.p, cfg.q)
            centers, u = _update_centers_sorted(img, u, cfg.m)
        except NumericalError as exc:
            if exc.iteration is None:
                raise NumericalError(str(exc), iteration=iteration) from exc
            raise
        delta = float(np.abs(u - u_prev).max())
        trace_rows.append((delta, fcm_objective(img, u, centers, cfg.m)))
        u_prev = u
        iterations = iteration
        if delta < cfg.epsilon:
            break

    labels = np.argmax(u, axis=2).astype(np.int64)
    change_map = (labels == cfg.c - 1).astype(np.uint8)
    trace = np.asarray(trace_rows, dtype=np.float64).reshape(iterations, 2)
    return ChangeResult(
        membership=u,
        centers=centers,
        labels=labels,
        change_map=change_map,
        iterations=iterations,
        trace=trace,
    )


def sweep_pq(img, cfg: SfcmConfig, ratios) -> list[tuple[float, int]]:
    """Changed-pixel count per p/q ratio, q held at ``cfg.q``.

    Every run starts from the identical (deterministic) initialization,
    so the counts isolate the effect of the ratio.
    """
    ratios = [float(r) for r in ratios]
    if not ratios:
        raise ValueError("empty sweep")
    if any(r < 1 for r in ratios):
        raise ValueError("p/q ratios must be >= 1")
    if cfg.q <= 0:
        raise ValueError("pq sweep requires q > 0")
    table = []
    for ratio in ratios:
        result = run_sfcm(img, cfg.with_overrides(p=ratio * cfg.q))
        table.append((ratio, result.changed_count))
    return table


def sweep_m(img, cfg: SfcmConfig, m_values) -> list[tuple[float, int]]:
    """Changed-pixel count per fuzzification exponent."""
    m_values = [float(m) for m in m_values]
    if not m_values:
        raise ValueError("empty sweep")
    if any(not m > 1 for m in m_values):
        raise ValueError("every m must be > 1")
    table = []
    for m in m_values:
        result = run_sfcm(img, cfg.with_overrides(m=m))
        table.append((m, result.changed_count))
    return table


def trace_to_csv(trace: np.ndarray) -> str:
    """Render an iteration trace as CSV with header ``iter,max_delta,objective``."""
    lines = ["iter,max_delta,objective"]
    for i, (delta, objective) in enumerate(np.asarray(trace), start=1):
        lines.append(f"{i},{float(delta)!r},{float(objective)!r}")
    return "\n".join(lines) + "\n"
