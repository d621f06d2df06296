"""k-means++ seeding and Lloyd iteration over feature vectors.

Distances are squared Euclidean.  Every operation is deterministic given
the generator passed in: seeding draws through the generator's uniform
stream only, assignment breaks ties toward the lowest center index, and
empty clusters are re-seeded to the point currently farthest from its
assigned center (lowest point index on ties).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientDistinctPoints


@dataclass(frozen=True, eq=False)
class ClusterModel:
    """Converged clustering state.

    objective is the sum of squared distances from each point to its
    assigned center; converged is False only when the iteration cap
    stopped the run.
    """

    k: int
    centers: np.ndarray
    labels: np.ndarray
    objective: float
    iterations: int
    converged: bool


def _as_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, np.newaxis]
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ValueError(f"points must form a nonempty (n, d) array, got {pts.shape}")
    if not np.isfinite(pts).all():
        raise ValueError("points must be finite")
    return pts


def kmeanspp_seed(points, k: int, rng: np.random.Generator) -> np.ndarray:
    """Choose k seeds from the data per the k-means++ rule.

    The first seed is uniform over the points; each further seed is drawn
    with probability proportional to its squared distance to the nearest
    seed chosen so far.  Seeds are always members of the input.
    """
    pts = _as_points(points)
    n = pts.shape[0]
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    distinct = np.unique(pts, axis=0).shape[0]
    if distinct < k:
        raise InsufficientDistinctPoints(
            f"{distinct} distinct points cannot seed {k} clusters"
        )

    seeds = np.empty((k, pts.shape[1]), dtype=np.float64)
    seeds[0] = pts[int(rng.integers(n))]
    d2 = ((pts - seeds[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        cdf = np.cumsum(d2)
        u = rng.random() * cdf[-1]
        idx = int(np.searchsorted(cdf, u, side="right"))
        seeds[j] = pts[min(idx, n - 1)]
        d2 = np.minimum(d2, ((pts - seeds[j]) ** 2).sum(axis=1))
    return seeds


def assign(points, centers) -> np.ndarray:
    """Label each point with its nearest center (lowest index on ties)."""
    pts = _as_points(points)
    ctr = np.asarray(centers, dtype=np.float64)
    if ctr.ndim == 1:
        ctr = ctr[:, np.newaxis]
    if ctr.shape[0] == 0:
        raise ValueError("centers must be nonempty")
    d2 = ((pts[:, np.newaxis, :] - ctr[np.newaxis, :, :]) ** 2).sum(axis=2)
    return np.argmin(d2, axis=1).astype(np.int64)


def update_centers(points, labels, k: int) -> np.ndarray:
    """Recompute each center as the mean of its members.

    A cluster left empty is re-seeded to the point farthest from its
    assigned (freshly computed) center, which keeps k clusters alive.
    """
    pts = _as_points(points)
    labels = np.asarray(labels, dtype=np.int64)
    centers = np.zeros((k, pts.shape[1]), dtype=np.float64)
    sizes = np.bincount(labels, minlength=k)
    for j in range(k):
        if sizes[j] > 0:
            centers[j] = pts[labels == j].mean(axis=0)

    empty = [j for j in range(k) if sizes[j] == 0]
    if empty:
        # Distances to the centers the points currently belong to.
        d2 = ((pts - centers[labels]) ** 2).sum(axis=1)
        order = np.argsort(-d2, kind="stable")
        taken: set[int] = set()
        for j in empty:
            pick = next(int(i) for i in order if int(i) not in taken)
            centers[j] = pts[pick]
            taken.add(pick)
    return centers


def _objective(pts: np.ndarray, labels: np.ndarray, centers: np.ndarray) -> float:
    return float(((pts - centers[labels]) ** 2).sum())


def lloyd(
    points,
    k: int,
    rng: np.random.Generator,
    max_iters: int = 100,
    tol: float = 1e-6,
) -> ClusterModel:
    """Run Lloyd's iteration from k-means++ seeds until the centers settle.

    Each iteration recomputes centers from the current assignment and then
    reassigns.  The run stops when the assignment is unchanged, when the
    largest center displacement is <= tol, or after max_iters iterations;
    only the last case reports converged=False.
    """
    if max_iters < 1:
        raise ValueError(f"max_iters must be >= 1, got {max_iters}")
    if tol < 0:
        raise ValueError(f"tol must be >= 0, got {tol}")
    pts = _as_points(points)
    centers = kmeanspp_seed(pts, k, rng)
    labels = assign(pts, centers)

    iterations = 0
    converged = False
    while iterations < max_iters:
        iterations += 1
        new_centers = update_centers(pts, labels, k)
        new_labels = assign(pts, new_centers)
        shift = float(np.sqrt(((new_centers - centers) ** 2).sum(axis=1)).max())
        stable = bool(np.array_equal(new_labels, labels))
        centers, labels = new_centers, new_labels
        if stable or shift <= tol:
            converged = True
            break

    return ClusterModel(
        k=k,
        centers=centers,
        labels=labels,
        objective=_objective(pts, labels, centers),
        iterations=iterations,
        converged=converged,
    )
