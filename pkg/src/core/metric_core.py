"""Finite metric spaces: validation, pair spaces, tubes around the diagonal, nets and
Lebesgue numbers of covers.

Open balls use ``d < r`` and closed balls ``d <= r``; every function says which.
Ties are always broken towards the lowest index.
"""
import logging

import numpy as np

from .errors import (
    Asymmetry, CoverError, DegenerateSpace, DiagonalNotCovered, IdentityViolation,
    InvalidMatrix, NegativeDistance, NonzeroDiagonal, TriangleViolation,
)
from .utils import Utils

try:
    from ..models.data_models import Cover, FiniteMetricSpace, PairSpace, ordered_pairs
except ImportError:
    from models.data_models import Cover, FiniteMetricSpace, PairSpace, ordered_pairs

DEFAULT_TOL = 1e-9


def validate_metric(matrix, tol=DEFAULT_TOL, labels=()):
    """
    Validate a distance matrix and wrap it as a FiniteMetricSpace

    Axioms are checked in a fixed order (diagonal, sign, symmetry, identity, triangle)
    and the first violation is raised with the lexicographically smallest witness.

    Args:
        matrix (array-like): n x n distances
        tol (float): Absolute slack for every comparison
        labels (tuple, optional): Point identifiers

    Returns:
        FiniteMetricSpace: The validated space
    """
    try:
        arr = np.array(matrix, dtype=float)
    except (TypeError, ValueError) as e:
        raise InvalidMatrix(f"Distance matrix is not numeric: {e}")
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise InvalidMatrix(f"Distance matrix must be square and non-empty, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        i, j = np.argwhere(~np.isfinite(arr))[0]
        raise InvalidMatrix(f"dist[{i}][{j}] is not finite", i=int(i), j=int(j))
    n = arr.shape[0]

    bad = np.flatnonzero(np.abs(np.diag(arr)) > tol)
    if bad.size:
        i = int(bad[0])
        raise NonzeroDiagonal(i, float(arr[i, i]))

    bad = np.argwhere(arr < -tol)
    if bad.size:
        i, j = (int(v) for v in bad[0])
        raise NegativeDistance(i, j, float(arr[i, j]))

    bad = np.argwhere(np.abs(arr - arr.T) > tol)
    if bad.size:
        i, j = (int(v) for v in bad[0])
        raise Asymmetry(i, j, float(arr[i, j]), float(arr[j, i]))

    off = ~np.eye(n, dtype=bool)
    bad = np.argwhere(off & (arr <= tol))
    if bad.size:
        i, j = (int(v) for v in bad[0])
        raise IdentityViolation(i, j)

    # violation[i, j, k]: dist[i][j] > dist[i][k] + dist[k][j]
    detour = arr[:, None, :] + arr.T[None, :, :]
    bad = np.argwhere(arr[:, :, None] > detour + tol)
    if bad.size:
        i, j, k = (int(v) for v in bad[0])
        raise TriangleViolation(i, j, k, float(arr[i, j]), float(detour[i, j, k]))

    clean = (arr + arr.T) / 2.0
    np.fill_diagonal(clean, 0.0)
    logging.debug(f"Validated metric on {n} points, diameter {clean.max():.6g}")
    return FiniteMetricSpace(clean, tuple(labels))


def space_from_vectors(vectors, norm="sup", labels=()):
    """Metric space of points in R^d under the chosen norm"""
    vectors = np.asarray(vectors, dtype=float)
    if vectors.ndim == 1:
        vectors = vectors[:, None]
    dist = Utils.vector_norm(vectors[:, None, :] - vectors[None, :, :], norm)
    return validate_metric(dist, labels=labels)


def off_diagonal(space):
    """All n(n-1) ordered pairs of distinct points with the maximum metric"""
    if space.n < 2:
        raise DegenerateSpace(f"Off-diagonal pair space needs at least 2 points, got {space.n}", n=space.n)
    return PairSpace(space, ordered_pairs(space.n))


def tube_reach(space):
    """reach[i, j] = min over z of max(d(i, z), d(j, z)); (i, j) lies in tube(delta) iff reach < delta"""
    d = space.dist
    return np.min(np.maximum(d[:, None, :], d[None, :, :]), axis=2)


def tube_mask(space, delta):
    return tube_reach(space) < delta


def tube(space, delta):
    """Pairs (i, j), diagonal included, with some z at open distance < delta from both"""
    return frozenset((int(i), int(j)) for i, j in np.argwhere(tube_mask(space, delta)))


def far_pairs(space, delta):
    """Off-diagonal pairs outside tube(delta), in lexicographic order"""
    outside = ~tube_mask(space, delta)
    return tuple((int(i), int(j)) for i, j in np.argwhere(outside) if i != j)


def _delta_candidates(space, radii=()):
    d = space.dist[~np.eye(space.n, dtype=bool)]
    distinct = np.unique(d)
    mids = (distinct[1:] + distinct[:-1]) / 2.0 if distinct.size > 1 else np.array([])
    pool = np.concatenate([distinct / 2.0, distinct, mids, np.asarray(radii, dtype=float)])
    pool = pool[pool > 0]
    return np.unique(pool)


def ball_union_mask(space, centers, radius):
    """mask[i, j]: i and j lie in a common open ball B(c, radius)"""
    inside = (space.dist[:, list(centers)] < radius).astype(int)
    return (inside @ inside.T) > 0


def max_tube_delta(space, centers, radius):
    """
    Largest candidate delta with tube(delta) inside the union of B(c, radius)^2

    Candidates are the half distances, the distances, midpoints between consecutive
    distinct distances and the radius. When every pair lies in the union the
    sentinel diam + 1 is returned (any delta works).

    Args:
        space (FiniteMetricSpace): The space
        centers (list): Ball centers covering the diagonal
        radius (float): Common open radius

    Returns:
        float: The tube radius
    """
    centers = list(centers)
    inside = space.dist[:, centers] < radius if centers else np.zeros((space.n, 0), dtype=bool)
    missing = np.flatnonzero(~inside.any(axis=1))
    if missing.size:
        raise DiagonalNotCovered(f"Point {int(missing[0])} lies in no ball of radius {radius}",
                                 point=int(missing[0]), radius=radius)

    union = ball_union_mask(space, centers, radius)
    reach = tube_reach(space)
    if union.all():
        logging.warning("Diagonal balls cover every pair; tube radius is unbounded")
        return space.diameter + 1.0

    best = None
    for candidate in _delta_candidates(space, [radius]):
        if not np.all(union[reach < candidate]):
            break
        best = float(candidate)
    logging.debug(f"max_tube_delta: {len(centers)} balls of radius {radius:.6g} -> delta {best}")
    return best


def farthest_point_net(dist, eps, closed=True, start=0):
    """
    Greedy farthest-point net on a distance matrix

    Args:
        dist (numpy.ndarray): Square distance matrix
        eps (float): Ball radius
        closed (bool): Closed balls (d <= eps) when True, open balls (d < eps) otherwise
        start (int): First center

    Returns:
        list: Center indices in the order they were chosen
    """
    if eps < 0 or (eps == 0 and not closed):
        raise ValueError(f"Net radius must be positive for open balls and non-negative for closed ones, got {eps}")
    dist = np.asarray(dist, dtype=float)
    if dist.shape[0] == 0:
        return []
    centers = [start]
    nearest = dist[start].copy()
    while True:
        uncovered = nearest > eps if closed else nearest >= eps
        if not uncovered.any():
            return centers
        far = int(np.argmax(nearest))
        centers.append(far)
        nearest = np.minimum(nearest, dist[far])


def greedy_eps_net(space, eps, subset=None, closed=True):
    """Closed-ball eps-net of the space (or of a subset), centers taken from the points"""
    if subset is None:
        return farthest_point_net(space.dist, eps, closed=closed)
    subset = sorted(subset)
    local = farthest_point_net(space.dist[np.ix_(subset, subset)], eps, closed=closed)
    return [subset[k] for k in local]


def ball_parts(dist, centers, radius, closed=True):
    """Index sets of the balls around each center"""
    dist = np.asarray(dist, dtype=float)
    parts = []
    for c in centers:
        inside = dist[c] <= radius if closed else dist[c] < radius
        parts.append(np.flatnonzero(inside).tolist())
    return parts


def lebesgue_delta(space, cover):
    """
    Largest pairwise distance delta such that every two points at distance <= delta
    share a part of the cover

    Returns diam when the cover splits no pair, and 0.0 when even the closest
    distinct points are split.
    """
    validate_point_cover(space, cover)
    n = space.n
    together = np.zeros((n, n), dtype=bool)
    for part in cover.parts:
        together[np.ix_(part, part)] = True
    off = ~np.eye(n, dtype=bool)
    split = off & ~together
    if not split.any():
        return space.diameter
    first_split = space.dist[split].min()
    below = space.dist[off & (space.dist < first_split)]
    if below.size == 0:
        logging.warning("Cover separates the closest points; Lebesgue number is 0")
        return 0.0
    return float(below.max())


def validate_point_cover(space, cover):
    if cover.kind != "points":
        raise CoverError(f"Expected a cover over points, got '{cover.kind}'")
    _check_parts(cover, set(range(space.n)), "point")


def validate_pair_cover(space, cover, ambient=None, exact=True):
    """
    Check a pair cover against its ambient pair set

    Args:
        space (FiniteMetricSpace): Base space
        cover (Cover): Cover over pairs
        ambient (iterable, optional): Ambient pairs, all off-diagonal pairs by default
        exact (bool): Require the union to equal the ambient set, not only lie inside it
    """
    if cover.kind != "pairs":
        raise CoverError(f"Expected a cover over pairs, got '{cover.kind}'")
    ambient = set(ordered_pairs(space.n)) if ambient is None else set(ambient)
    _check_parts(cover, ambient, "pair", exact=exact)


def _check_parts(cover, ambient, label, exact=True):
    for k, part in enumerate(cover.parts):
        if not part:
            raise CoverError(f"Part {k} is empty", part=k)
        stray = [e for e in part if e not in ambient]
        if stray:
            raise CoverError(f"Part {k} holds {label} {stray[0]} outside the ambient set",
                             part=k, element=list(np.atleast_1d(stray[0]).tolist()))
    if exact:
        missing = sorted(ambient - cover.support)
        if missing:
            raise CoverError(f"The {label} {missing[0]} is not covered",
                             element=list(np.atleast_1d(missing[0]).tolist()))
