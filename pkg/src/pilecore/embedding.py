"""2D projection of feature matrices for data-driven scatter arrangements.

The built-in projector is exact PCA with a fixed sign convention, so layouts
are reproducible across processes. Anything fancier (UMAP and friends) can be
plugged in as any callable mapping an (n, d) matrix to (n, 2) positions.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import EmptyInputError

Embedder = Callable[[np.ndarray], np.ndarray]

_RANK_EPS = 1e-12


def pca_scores(matrix, n_components: int = 2) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Mean-centered principal-component scores.

    Returns (scores, components, eigenvalues) where components are rows and
    eigenvalues are the full population-covariance spectrum, descending. The
    sign convention makes each component's largest-magnitude loading positive.
    """
    x = np.asarray(matrix, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 2:
        raise EmptyInputError("projection needs a 2D matrix with at least 2 rows")
    centered = x - x.mean(axis=0)
    cov = centered.T @ centered / x.shape[0]
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1]
    eigvals = eigvals[order]
    eigvecs = eigvecs[:, order]
    take = min(n_components, x.shape[1])
    components = eigvecs[:, :take].T.copy()
    for row in components:
        pivot = int(np.argmax(np.abs(row)))
        if row[pivot] < 0:
            row *= -1.0
    scores = centered @ components.T
    if take < n_components:
        scores = np.hstack([scores, np.zeros((x.shape[0], n_components - take))])
        components = np.vstack([components,
                                np.zeros((n_components - take, x.shape[1]))])
    return scores, components, eigvals


def embed_2d(matrix) -> list[tuple[float, float]]:
    """Project rows onto the top-2 principal axes, min-max scaled into [0,1]².

    Degenerate directions (no variance) collapse to 0.5; rank-0 input puts
    every point at (0.5, 0.5).
    """
    scores, _, _ = pca_scores(matrix, n_components=2)
    out = np.empty_like(scores)
    for axis in range(2):
        col = scores[:, axis]
        span = col.max() - col.min()
        if span <= _RANK_EPS:
            out[:, axis] = 0.5
        else:
            out[:, axis] = (col - col.min()) / span
    return [(float(p[0]), float(p[1])) for p in out]
