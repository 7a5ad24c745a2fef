# zsm/geometry/conzono.py
"""
Constrained zonotopes.

A constrained zonotope is the set {c + G beta : |beta|_inf <= 1, A beta = b}.
Values are immutable; every operation returns a new set and is safe to call
from several threads at once.
"""

import itertools
import logging
from dataclasses import dataclass
from functools import cached_property, reduce
from math import comb
from typing import Iterable, Iterator, Optional, Tuple

import numpy as np
from scipy.linalg import block_diag
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, HalfspaceIntersection, QhullError, cKDTree

from zsm.core.config import get_settings
from zsm.core.errors import DimensionError, GeneratorCapError, VertexEnumerationError
from zsm.geometry.linalg import (
    ReducedConstraints,
    affine_frame,
    extreme_points,
    reduce_constraints,
)

logger = logging.getLogger(__name__)

# |det| of an active-set block below which the block is treated as singular.
SINGULAR = 1e-10
# Elements per batched active-set solve.
CHUNK = 2**22


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class VertexList:
    """Vertex representation: the set is the convex hull of ``points``."""

    points: np.ndarray
    dimension: int

    def __len__(self) -> int:
        return self.points.shape[0]

    def __iter__(self) -> Iterator[np.ndarray]:
        return iter(self.points)

    @property
    def is_empty(self) -> bool:
        return self.points.shape[0] == 0


@dataclass(frozen=True, eq=False)
class ConZono:
    """Constrained zonotope {center + generators @ beta : |beta|_inf <= 1, con_matrix @ beta = con_vector}."""

    center: np.ndarray
    generators: np.ndarray
    con_matrix: np.ndarray
    con_vector: np.ndarray

    @property
    def dimension(self) -> int:
        return self.center.shape[0]

    @property
    def n_generators(self) -> int:
        return self.generators.shape[1]

    @property
    def n_constraints(self) -> int:
        return self.con_matrix.shape[0]

    @cached_property
    def interval_hull(self) -> Tuple[np.ndarray, np.ndarray]:
        """Axis-aligned box containing the set."""
        radius = np.abs(self.generators).sum(axis=1)
        return self.center - radius, self.center + radius

    @cached_property
    def vertex_list(self) -> VertexList:
        return vertices(self)

    @cached_property
    def halfspaces(self) -> Optional[Tuple[np.ndarray, np.ndarray]]:
        """(H, h) with unit-norm rows so that x is in the set iff H @ x <= h."""
        return _halfspaces(self)

    def __repr__(self) -> str:
        return (
            f"<ConZono(n={self.dimension}, generators={self.n_generators}, "
            f"constraints={self.n_constraints})>"
        )

    # Factory helpers --------------------------------------------------------

    @classmethod
    def point(cls, x: Iterable[float]) -> "ConZono":
        return make_conzono(np.asarray(x, dtype=float))

    @classmethod
    def zonotope(cls, center: Iterable[float], generators: np.ndarray) -> "ConZono":
        return make_conzono(np.asarray(center, dtype=float), generators)

    @classmethod
    def box(cls, lower: Iterable[float], upper: Iterable[float]) -> "ConZono":
        lower = np.asarray(lower, dtype=float)
        upper = np.asarray(upper, dtype=float)
        if lower.shape != upper.shape or np.any(upper < lower):
            raise DimensionError(f"Invalid box bounds {lower} / {upper}")
        return make_conzono((lower + upper) / 2.0, np.diag((upper - lower) / 2.0))

    @classmethod
    def from_points(cls, points: np.ndarray, detect_parallelotope: bool = True) -> "ConZono":
        """
        Convex hull of a point set.

        Hull vertices v_1..v_N become the simplex form c = sum(v)/2, G = [v/2],
        A = 1^T, b = 2 - N. A parallelotope hull comes back as a plain zonotope.
        """
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.size == 0:
            raise DimensionError("Cannot build a set from zero points")
        tol = get_settings().VERTEX_TOL
        hull = extreme_points(points, tol)
        if hull.shape[0] == 1:
            return cls.point(hull[0])
        if detect_parallelotope:
            parallelotope = _as_parallelotope(hull, tol)
            if parallelotope is not None:
                return parallelotope
        count = hull.shape[0]
        return make_conzono(
            hull.sum(axis=0) / 2.0,
            hull.T / 2.0,
            np.ones((1, count)),
            np.array([2.0 - count]),
        )


def make_conzono(
    center: np.ndarray,
    generators: Optional[np.ndarray] = None,
    con_matrix: Optional[np.ndarray] = None,
    con_vector: Optional[np.ndarray] = None,
) -> ConZono:
    """
    Validate and freeze a constrained zonotope. Emptiness is not checked.

    Raises:
        DimensionError: shapes disagree or an entry is not finite
    """
    center = np.asarray(center, dtype=float).reshape(-1)
    n = center.shape[0]
    if n == 0:
        raise DimensionError("Center must have at least one coordinate")

    generators = np.zeros((n, 0)) if generators is None else np.asarray(generators, dtype=float)
    if generators.size == 0:
        generators = np.zeros((n, 0))
    elif generators.ndim == 1 and generators.size % n == 0:
        generators = generators.reshape(n, -1)
    if generators.ndim != 2 or generators.shape[0] != n:
        raise DimensionError(
            f"Generators must have {n} rows, got shape {generators.shape}"
        )
    m = generators.shape[1]

    con_vector = np.zeros(0) if con_vector is None else np.asarray(con_vector, dtype=float).reshape(-1)
    con_matrix = np.zeros((0, m)) if con_matrix is None else np.asarray(con_matrix, dtype=float)
    if con_matrix.size == 0:
        # [] stands for "no constraints", or 0 * beta = b rows when m == 0
        con_matrix = np.zeros((con_vector.shape[0] if m == 0 else 0, m))
    elif con_matrix.ndim == 1:
        con_matrix = con_matrix.reshape(1, -1)
    if con_matrix.ndim != 2 or con_matrix.shape[1] != m:
        raise DimensionError(
            f"Constraint matrix must have {m} columns, got shape {con_matrix.shape}"
        )
    p = con_matrix.shape[0]

    if con_vector.shape[0] != p:
        raise DimensionError(
            f"Constraint vector must have {p} entries, got {con_vector.shape[0]}"
        )

    for name, value in (
        ("center", center),
        ("generators", generators),
        ("con_matrix", con_matrix),
        ("con_vector", con_vector),
    ):
        if not np.all(np.isfinite(value)):
            raise DimensionError(f"Non-finite entry in {name}")

    return ConZono(
        center=_frozen(center),
        generators=_frozen(generators),
        con_matrix=_frozen(con_matrix),
        con_vector=_frozen(con_vector),
    )


def _same_dimension(z1: ConZono, z2: ConZono) -> None:
    if z1.dimension != z2.dimension:
        raise DimensionError(
            f"Dimension mismatch: {z1.dimension} vs {z2.dimension}"
        )


# ======================================================================================
# Set operations
# ======================================================================================
def minkowski_sum(z1: ConZono, z2: ConZono) -> ConZono:
    """z1 + z2: concatenated generators, block-diagonal constraints."""
    _same_dimension(z1, z2)
    return make_conzono(
        z1.center + z2.center,
        np.hstack([z1.generators, z2.generators]),
        block_diag(z1.con_matrix, z2.con_matrix).reshape(
            z1.n_constraints + z2.n_constraints, z1.n_generators + z2.n_generators
        ),
        np.concatenate([z1.con_vector, z2.con_vector]),
    )


def intersect(z1: ConZono, z2: ConZono) -> ConZono:
    """
    z1 ∩ z2 with generators [G1, 0] and the coupling rows G1 b1 - G2 b2 = c2 - c1.

    The result carries the center and generators of z1, so flat structure in
    z1 (such as a ground plane at constant height) is preserved exactly.
    """
    _same_dimension(z1, z2)
    m1, m2 = z1.n_generators, z2.n_generators
    p1, p2 = z1.n_constraints, z2.n_constraints
    con_matrix = np.vstack(
        [
            np.hstack([z1.con_matrix, np.zeros((p1, m2))]),
            np.hstack([np.zeros((p2, m1)), z2.con_matrix]),
            np.hstack([z1.generators, -z2.generators]),
        ]
    )
    return make_conzono(
        z1.center,
        np.hstack([z1.generators, np.zeros((z1.dimension, m2))]),
        con_matrix,
        np.concatenate([z1.con_vector, z2.con_vector, z2.center - z1.center]),
    )


def convex_hull_pair(z1: ConZono, z2: ConZono) -> ConZono:
    """
    Convex hull of z1 ∪ z2.

    Generators [G1, G2, (c1 - c2)/2, 0] with 2(m1 + m2) slack columns; the
    result has 3(m1 + m2) + 1 generators and p1 + p2 + 2(m1 + m2) constraints.
    """
    _same_dimension(z1, z2)
    n = z1.dimension
    m1, m2 = z1.n_generators, z2.n_generators
    p1, p2 = z1.n_constraints, z2.n_constraints
    slack = 2 * (m1 + m2)

    a31 = np.vstack([np.eye(m1), -np.eye(m1), np.zeros((2 * m2, m1))])
    a32 = np.vstack([np.zeros((2 * m1, m2)), np.eye(m2), -np.eye(m2)])
    a30 = np.concatenate([-0.5 * np.ones(2 * m1), 0.5 * np.ones(2 * m2)])[:, None]

    con_matrix = np.vstack(
        [
            np.hstack([z1.con_matrix, np.zeros((p1, m2)), -0.5 * z1.con_vector[:, None], np.zeros((p1, slack))]),
            np.hstack([np.zeros((p2, m1)), z2.con_matrix, 0.5 * z2.con_vector[:, None], np.zeros((p2, slack))]),
            np.hstack([a31, a32, a30, np.eye(slack)]),
        ]
    )
    con_vector = np.concatenate(
        [0.5 * z1.con_vector, 0.5 * z2.con_vector, -0.5 * np.ones(slack)]
    )
    generators = np.hstack(
        [
            z1.generators,
            z2.generators,
            0.5 * (z1.center - z2.center)[:, None],
            np.zeros((n, slack)),
        ]
    )
    return make_conzono(0.5 * (z1.center + z2.center), generators, con_matrix, con_vector)


def fold_hull(sets: Iterable[ConZono]) -> ConZono:
    """Left fold of convex_hull_pair; generator counts grow as 3m + 1 per step."""
    sets = list(sets)
    if not sets:
        raise DimensionError("Cannot take the hull of zero sets")
    return reduce(convex_hull_pair, sets)


def affine_map(scale: np.ndarray, offset: np.ndarray, z: ConZono) -> ConZono:
    """{scale @ x + offset : x in z}; constraints are unchanged."""
    scale = np.atleast_2d(np.asarray(scale, dtype=float))
    if scale.shape[1] != z.dimension:
        raise DimensionError(
            f"Map has {scale.shape[1]} columns but the set has dimension {z.dimension}"
        )
    offset = np.asarray(offset, dtype=float).reshape(-1)
    if offset.shape[0] != scale.shape[0]:
        raise DimensionError(
            f"Offset has {offset.shape[0]} entries, expected {scale.shape[0]}"
        )
    return make_conzono(
        scale @ z.center + offset,
        scale @ z.generators,
        z.con_matrix,
        z.con_vector,
    )


# ======================================================================================
# Vertex enumeration
# ======================================================================================
def vertices(
    z: ConZono,
    max_generators: Optional[int] = None,
    active_set_limit: Optional[int] = None,
) -> VertexList:
    """
    Vertices of z.

    Enumerates vertices of the lifted polytope {beta : |beta|_inf <= 1, A beta = b}
    by fixing (m - rank A) coordinates to +-1 and solving for the rest, maps
    them through c + G beta and keeps the extreme points. Large active-set
    counts switch to a halfspace intersection in the null space of A.

    Raises:
        GeneratorCapError: more generators than the configured cap
    """
    if max_generators is None and active_set_limit is None and "vertex_list" in z.__dict__:
        return z.__dict__["vertex_list"]

    config = get_settings()
    cap = config.MAX_GENERATORS if max_generators is None else max_generators
    limit = config.ACTIVE_SET_LIMIT if active_set_limit is None else active_set_limit
    tol = config.VERTEX_TOL

    if z.n_generators > cap:
        raise GeneratorCapError(
            f"Vertex enumeration is capped at {cap} generators, set has {z.n_generators}"
        )
    n = z.dimension
    if z.n_generators == 0:
        if z.n_constraints and np.any(np.abs(z.con_vector) > tol):
            return VertexList(np.zeros((0, n)), n)
        return VertexList(z.center[None, :].copy(), n)

    reduced = reduce_constraints(z.con_matrix, z.con_vector, tol)
    if reduced is None:
        return VertexList(np.zeros((0, n)), n)

    m, d = z.n_generators, reduced.freedom
    if comb(m, d) * 2**d <= limit:
        betas = _active_set_betas(reduced, tol)
    else:
        betas = _halfspace_betas(reduced, tol)
        if betas is None:
            return VertexList(_support_points(z), n)

    if betas.shape[0] == 0:
        return VertexList(np.zeros((0, n)), n)
    mapped = z.center[None, :] + betas @ z.generators.T
    return VertexList(extreme_points(mapped, tol), n)


def _active_set_betas(reduced: ReducedConstraints, tol: float) -> np.ndarray:
    origin, null = reduced.origin, reduced.null
    m, d = null.shape
    slack = 10.0 * max(tol, 1e-12)
    if d == 0:
        if np.all(np.abs(origin) <= 1.0 + slack):
            return origin[None, :]
        return np.zeros((0, m))

    signs = np.array(list(itertools.product((-1.0, 1.0), repeat=d))).T
    combos = np.array(list(itertools.combinations(range(m), d)), dtype=int)
    chunk = max(1, CHUNK // (m * signs.shape[1]))
    found = []
    for start in range(0, combos.shape[0], chunk):
        fixed = combos[start:start + chunk]
        blocks = null[fixed]
        regular = np.abs(np.linalg.det(blocks)) > SINGULAR
        if not np.any(regular):
            continue
        fixed, blocks = fixed[regular], blocks[regular]
        rhs = signs[None, :, :] - origin[fixed][:, :, None]
        coords = np.linalg.solve(blocks, rhs)
        betas = origin[None, :, None] + np.einsum("md,kdj->kmj", null, coords)
        feasible = np.all(np.abs(betas) <= 1.0 + slack, axis=1)
        found.append(betas.transpose(0, 2, 1)[feasible])
    if not found:
        return np.zeros((0, m))
    return np.vstack(found)


def _halfspace_betas(reduced: ReducedConstraints, tol: float) -> Optional[np.ndarray]:
    """Null-space halfspace intersection; None when the polytope has no interior."""
    origin, null = reduced.origin, reduced.null
    m, d = null.shape
    normals = np.vstack([null, -null])
    offsets = np.concatenate([1.0 - origin, 1.0 + origin])
    norms = np.linalg.norm(normals, axis=1)
    flat = norms <= 1e-12
    if np.any(offsets[flat] < -tol):
        return np.zeros((0, m))
    normals, offsets, norms = normals[~flat], offsets[~flat], norms[~flat]

    result = linprog(
        np.concatenate([np.zeros(d), [-1.0]]),
        A_ub=np.hstack([normals, norms[:, None]]),
        b_ub=offsets,
        bounds=[(None, None)] * d + [(0, None)],
        method="highs",
    )
    if result.status == 2:
        return np.zeros((0, m))
    if result.status != 0:
        raise VertexEnumerationError(f"Interior point search failed: {result.message}")
    radius = result.x[-1]
    if radius <= tol:
        logger.warning("Lifted polytope has no interior; falling back to support points")
        return None
    try:
        intersection = HalfspaceIntersection(
            np.hstack([normals, -offsets[:, None]]), result.x[:d]
        )
    except QhullError as exc:
        raise VertexEnumerationError(f"Halfspace intersection failed: {exc}") from exc
    return origin[None, :] + intersection.intersections @ null.T


def _support_points(z: ConZono) -> np.ndarray:
    """Extreme points of z along axis and diagonal directions, via LP."""
    n = z.dimension
    axes = np.eye(n)
    directions = [axes, -axes]
    for i, j in itertools.combinations(range(n), 2):
        for si, sj in itertools.product((-1.0, 1.0), repeat=2):
            directions.append((si * axes[i] + sj * axes[j])[None, :])
    points = []
    for direction in np.vstack(directions):
        result = linprog(
            -(direction @ z.generators),
            A_eq=z.con_matrix if z.n_constraints else None,
            b_eq=z.con_vector if z.n_constraints else None,
            bounds=[(-1.0, 1.0)] * z.n_generators,
            method="highs",
        )
        if result.status == 0:
            points.append(z.center + z.generators @ result.x)
    if not points:
        return np.zeros((0, n))
    return extreme_points(np.array(points), get_settings().VERTEX_TOL)


def _as_parallelotope(hull: np.ndarray, tol: float) -> Optional[ConZono]:
    """Zonotope form of a parallelotope hull, or None."""
    mean, basis, _ = affine_frame(hull, tol)
    k = basis.shape[1]
    if k == 0 or hull.shape[0] != 2**k:
        return None
    scale = max(1.0, float(np.abs(hull).max()))
    tree = cKDTree(hull)
    base = hull[0]
    signs = np.array(list(itertools.product((-1.0, 1.0), repeat=k)))
    for others in itertools.combinations(range(1, hull.shape[0]), k):
        generators = (hull[list(others)] - base).T / 2.0
        if np.linalg.matrix_rank(generators, tol=tol * scale) < k:
            continue
        center = base + generators.sum(axis=1)
        corners = center[None, :] + signs @ generators.T
        distance, index = tree.query(corners)
        if np.all(distance <= 1e3 * tol * scale) and np.unique(index).size == hull.shape[0]:
            return make_conzono(center, generators)
    return None


# ======================================================================================
# Feasibility tests
# ======================================================================================
def _min_box_norm(eq_matrix: np.ndarray, eq_vector: np.ndarray, tol: float) -> float:
    """min |beta|_inf subject to eq_matrix @ beta = eq_vector (inf when infeasible)."""
    reduced = reduce_constraints(eq_matrix, eq_vector, tol)
    if reduced is None:
        return np.inf
    m = eq_matrix.shape[1]
    if reduced.rank == 0:
        return 0.0
    if reduced.freedom == 0:
        return float(np.abs(reduced.origin).max())
    eye = np.eye(m)
    result = linprog(
        np.concatenate([np.zeros(m), [1.0]]),
        A_ub=np.vstack(
            [
                np.hstack([eye, -np.ones((m, 1))]),
                np.hstack([-eye, -np.ones((m, 1))]),
            ]
        ),
        b_ub=np.zeros(2 * m),
        A_eq=np.hstack([reduced.rows, np.zeros((reduced.rank, 1))]),
        b_eq=reduced.rhs,
        bounds=[(None, None)] * m + [(0, None)],
        method="highs",
    )
    if result.status != 0:
        if result.status != 2:
            logger.warning(f"Feasibility LP ended with status {result.status}: {result.message}")
        return np.inf
    return float(result.fun)


def is_empty(z: ConZono, tol: Optional[float] = None) -> bool:
    """True iff no beta with |beta|_inf <= 1 satisfies A beta = b."""
    config = get_settings()
    tol = config.FEASIBILITY_TOL if tol is None else tol
    if z.n_constraints == 0:
        return False
    if z.n_generators == 0:
        return bool(np.any(np.abs(z.con_vector) > tol))
    return _min_box_norm(z.con_matrix, z.con_vector, config.VERTEX_TOL) > 1.0 + tol


def contains_point(z: ConZono, x: np.ndarray, tol: Optional[float] = None) -> bool:
    """True iff some feasible beta maps to x, within tol on the box bound."""
    config = get_settings()
    tol = config.FEASIBILITY_TOL if tol is None else tol
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != z.dimension:
        raise DimensionError(f"Point has {x.shape[0]} coordinates, set has {z.dimension}")
    lower, upper = z.interval_hull
    slack = tol * max(1.0, float(np.abs(x).max()))
    if np.any(x < lower - slack) or np.any(x > upper + slack):
        return False
    if z.n_generators == 0:
        return bool(np.linalg.norm(x - z.center) <= slack) and not is_empty(z, tol)
    eq_matrix = np.vstack([z.con_matrix, z.generators])
    eq_vector = np.concatenate([z.con_vector, x - z.center])
    return _min_box_norm(eq_matrix, eq_vector, config.VERTEX_TOL) <= 1.0 + tol


def _halfspaces(z: ConZono) -> Optional[Tuple[np.ndarray, np.ndarray]]:
    points = z.vertex_list.points
    if points.shape[0] == 0:
        return None
    n = z.dimension
    mean, basis, complement = affine_frame(points, get_settings().VERTEX_TOL)
    k = basis.shape[1]
    normals, offsets = [np.zeros((0, n))], [np.zeros(0)]
    if k == n:
        try:
            hull = ConvexHull(points)
        except QhullError:
            hull = ConvexHull(points, qhull_options="QJ")
        normals.append(hull.equations[:, :-1])
        offsets.append(-hull.equations[:, -1])
    elif k >= 2:
        local = (points - mean) @ basis
        try:
            hull = ConvexHull(local)
        except QhullError:
            hull = ConvexHull(local, qhull_options="QJ")
        lifted = hull.equations[:, :-1] @ basis.T
        normals.append(lifted)
        offsets.append(lifted @ mean - hull.equations[:, -1])
    elif k == 1:
        axis = basis[:, 0]
        coord = (points - mean) @ axis
        normals.append(np.vstack([axis, -axis]))
        offsets.append(np.array([axis @ mean + coord.max(), -(axis @ mean) - coord.min()]))
    for w in complement.T:
        normals.append(np.vstack([w, -w]))
        offsets.append(np.array([w @ mean, -(w @ mean)]))
    return np.vstack(normals), np.concatenate(offsets)


def segments_hit(
    z: ConZono,
    starts: np.ndarray,
    end: np.ndarray,
    tol: Optional[float] = None,
) -> np.ndarray:
    """
    For each row p of ``starts``, whether segment p -> end meets z.

    Clips the segments against the faces of z inflated by ``tol`` meters, so
    grazing contacts count as hits.
    """
    tol = get_settings().SEGMENT_TOL if tol is None else tol
    starts = np.atleast_2d(np.asarray(starts, dtype=float))
    end = np.asarray(end, dtype=float).reshape(-1)
    if starts.shape[1] != z.dimension or end.shape[0] != z.dimension:
        raise DimensionError(
            f"Segment endpoints must have {z.dimension} coordinates"
        )
    hits = np.zeros(starts.shape[0], dtype=bool)
    if starts.shape[0] == 0:
        return hits

    lower, upper = z.interval_hull
    seg_lower = np.minimum(starts, end[None, :])
    seg_upper = np.maximum(starts, end[None, :])
    near = np.all((seg_lower <= upper + tol) & (seg_upper >= lower - tol), axis=1)
    if not np.any(near):
        return hits

    faces = z.halfspaces
    if faces is None:
        return hits
    normals, offsets = faces
    origin = starts[near]
    direction = end[None, :] - origin
    slack = offsets[None, :] + tol - origin @ normals.T
    rate = direction @ normals.T
    scale = np.linalg.norm(direction, axis=1)[:, None]
    parallel = np.abs(rate) <= 1e-15 * np.maximum(scale, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = slack / rate
    upper_t = np.where((rate > 0) & ~parallel, ratio, np.inf).min(axis=1)
    lower_t = np.where((rate < 0) & ~parallel, ratio, -np.inf).max(axis=1)
    blocked = np.any(parallel & (slack < 0), axis=1)
    hits[near] = ~blocked & (np.maximum(lower_t, 0.0) <= np.minimum(upper_t, 1.0))
    return hits


def segment_hits(
    z: ConZono,
    p: np.ndarray,
    q: np.ndarray,
    tol: Optional[float] = None,
    method: str = "clip",
) -> bool:
    """
    Whether segment pq meets z.

    method="clip" uses the face representation; method="lp" solves
    p + t (q - p) = c + G beta, A beta = b, |beta|_inf <= 1, t in [0, 1].
    """
    if method == "clip":
        return bool(segments_hit(z, np.asarray(p, dtype=float)[None, :], q, tol)[0])
    if method != "lp":
        raise ValueError(f"Unknown segment test method: {method}")

    config = get_settings()
    tol = config.FEASIBILITY_TOL if tol is None else tol
    p = np.asarray(p, dtype=float).reshape(-1)
    q = np.asarray(q, dtype=float).reshape(-1)
    if p.shape[0] != z.dimension or q.shape[0] != z.dimension:
        raise DimensionError(f"Segment endpoints must have {z.dimension} coordinates")
    m, n = z.n_generators, z.dimension
    # variables: beta (m), t, s with |beta| <= s
    eq_matrix = np.vstack(
        [
            np.hstack([z.con_matrix, np.zeros((z.n_constraints, 2))]),
            np.hstack([z.generators, -(q - p)[:, None], np.zeros((n, 1))]),
        ]
    )
    eq_vector = np.concatenate([z.con_vector, p - z.center])
    eye = np.eye(m)
    result = linprog(
        np.concatenate([np.zeros(m + 1), [1.0]]),
        A_ub=np.vstack(
            [
                np.hstack([eye, np.zeros((m, 1)), -np.ones((m, 1))]),
                np.hstack([-eye, np.zeros((m, 1)), -np.ones((m, 1))]),
            ]
        ) if m else None,
        b_ub=np.zeros(2 * m) if m else None,
        A_eq=eq_matrix,
        b_eq=eq_vector,
        bounds=[(None, None)] * m + [(0.0, 1.0), (0.0, None)],
        method="highs",
    )
    return result.status == 0 and result.fun <= 1.0 + tol
