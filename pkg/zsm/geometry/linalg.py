# zsm/geometry/linalg.py
"""
Dense linear-algebra helpers shared by the constrained zonotope kernel:
equality-constraint reduction, point welding and extreme-point extraction.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import ConvexHull, QhullError, cKDTree

logger = logging.getLogger(__name__)

# Singular values below this share of the largest one make a reduction noisy.
ILL_CONDITIONED = 1e-6


@dataclass(frozen=True)
class ReducedConstraints:
    """
    Affine solution set of A beta = b written as beta = origin + null @ y.

    rows/rhs are an orthonormal row basis equivalent to the original system.
    """

    origin: np.ndarray
    null: np.ndarray
    rows: np.ndarray
    rhs: np.ndarray

    @property
    def rank(self) -> int:
        return self.rows.shape[0]

    @property
    def freedom(self) -> int:
        return self.null.shape[1]


def reduce_constraints(
    con_matrix: np.ndarray, con_vector: np.ndarray, tol: float
) -> Optional[ReducedConstraints]:
    """
    Drop redundant rows of A beta = b and parametrize its solution space.

    Args:
        con_matrix: (p, m) constraint matrix
        con_vector: (p,) right-hand side
        tol: relative rank and consistency tolerance

    Returns:
        ReducedConstraints, or None when the system is inconsistent.
    """
    p, m = con_matrix.shape
    if p == 0:
        return ReducedConstraints(
            origin=np.zeros(m), null=np.eye(m), rows=np.zeros((0, m)), rhs=np.zeros(0)
        )

    norms = np.linalg.norm(con_matrix, axis=1)
    zero_rows = norms <= tol
    if np.any(np.abs(con_vector[zero_rows]) > tol * max(1.0, np.abs(con_vector).max())):
        return None
    keep = ~zero_rows
    if not np.any(keep):
        return ReducedConstraints(
            origin=np.zeros(m), null=np.eye(m), rows=np.zeros((0, m)), rhs=np.zeros(0)
        )

    rows = con_matrix[keep] / norms[keep, None]
    rhs = con_vector[keep] / norms[keep]
    u, s, vt = np.linalg.svd(rows, full_matrices=True)
    rank = int(np.sum(s > tol * s[0]))
    if s[rank - 1] < ILL_CONDITIONED * s[0]:
        logger.warning(
            f"Constraint system is ill-conditioned (sigma ratio {s[rank - 1] / s[0]:.2e})"
        )
    elif rank < rows.shape[0]:
        logger.debug(f"Dropped {rows.shape[0] - rank} redundant constraint rows")

    coeffs = (u[:, :rank].T @ rhs) / s[:rank]
    origin = vt[:rank].T @ coeffs
    residual = np.linalg.norm(rows @ origin - rhs)
    if residual > tol * (rows.shape[0] + m) * max(1.0, np.linalg.norm(rhs)):
        return None
    return ReducedConstraints(
        origin=origin, null=vt[rank:].T.copy(), rows=vt[:rank].copy(), rhs=coeffs
    )


def weld(points: np.ndarray, radius: float) -> np.ndarray:
    """
    Label points so that any two closer than ``radius`` share a label.

    Labels are consecutive and ordered by first appearance.
    """
    count = points.shape[0]
    if count == 0:
        return np.zeros(0, dtype=int)
    pairs = np.asarray(cKDTree(points).query_pairs(r=radius, output_type="ndarray")).reshape(-1, 2)
    graph = coo_matrix(
        (np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(count, count)
    )
    _, labels = connected_components(graph, directed=False)
    _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
    order = np.argsort(np.argsort(first))
    return order[inverse]


def dedup(points: np.ndarray, rel_tol: float) -> np.ndarray:
    """Collapse points closer than rel_tol times the point cloud scale."""
    if points.shape[0] <= 1:
        return points
    scale = max(1.0, float(np.abs(points).max()))
    labels = weld(points, rel_tol * scale)
    _, first = np.unique(labels, return_index=True)
    return points[np.sort(first)]


def affine_frame(points: np.ndarray, rel_tol: float):
    """
    Affine hull of a point cloud.

    Singular values are compared against the coordinate magnitude, not the
    spread, so a cluster a few ulps wide stays a point.

    Returns:
        (mean, basis, complement): basis columns span the hull directions,
        complement columns span the normal space.
    """
    mean = points.mean(axis=0)
    centered = points - mean
    _, s, vt = np.linalg.svd(centered, full_matrices=True)
    scale = max(1.0, float(np.abs(points).max()) if points.size else 0.0)
    dim = int(np.sum(s > rel_tol * scale * max(1.0, np.sqrt(points.shape[0]))))
    dim = min(dim, max(points.shape[0] - 1, 0))
    return mean, vt[:dim].T, vt[dim:].T


def _hull_indices(local: np.ndarray) -> Optional[np.ndarray]:
    try:
        return ConvexHull(local).vertices
    except QhullError:
        pass
    try:
        return ConvexHull(local, qhull_options="QJ").vertices
    except QhullError:
        return None


def extreme_points(points: np.ndarray, rel_tol: float) -> np.ndarray:
    """
    Vertices of the convex hull of a point cloud in any affine dimension.

    Works in local coordinates of the affine hull so flat sets (segments,
    polygons in 3-D) keep their original coordinates. A cloud qhull cannot
    triangulate is treated as one dimension flatter.
    """
    points = dedup(np.asarray(points, dtype=float), rel_tol)
    if points.shape[0] <= 1:
        return points
    mean, basis, _ = affine_frame(points, rel_tol)
    dim = basis.shape[1]
    while dim >= 2:
        index = _hull_indices((points - mean) @ basis[:, :dim])
        if index is not None:
            return points[index]
        logger.debug(f"Hull of {points.shape[0]} points failed in {dim}-D, flattening")
        dim -= 1
    if dim == 0:
        return points[:1]
    coord = (points - mean) @ basis[:, 0]
    return points[[int(np.argmin(coord)), int(np.argmax(coord))]]
