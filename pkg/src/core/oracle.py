"""Exhaustive ground truth on small instances: covering numbers, minimal oscillation over
all covers with a bounded number of parts, and the zero-one sequence pigeonhole witness.
"""
import logging
import operator
from functools import reduce
from itertools import combinations

import numpy as np

from .errors import NoWitness, TooLarge
from .family import phi_distances, pointwise_norms, quotients
from .metric_core import farthest_point_net, off_diagonal, validate_point_cover
from .utils import Utils

try:
    from ..models.data_models import CoveringProfile
except ImportError:
    from models.data_models import CoveringProfile

MAX_POINTS = 16
MAX_AMBIENT = 8
MAX_PARTS = 4
KINDS = ("B", "DS", "L", "LDS")


def _distances(space_or_matrix):
    dist = getattr(space_or_matrix, "dist", space_or_matrix)
    return np.asarray(dist, dtype=float)


def exact_covering_number(space_or_matrix, eps, max_points=MAX_POINTS):
    """Fewest closed eps-balls centered at points of the space that cover it"""
    dist = _distances(space_or_matrix)
    n = dist.shape[0]
    if n > max_points:
        raise TooLarge(f"Exact covering needs at most {max_points} points, got {n}", points=n)
    masks = [sum(1 << j for j in np.flatnonzero(dist[i] <= eps)) for i in range(n)]
    full = (1 << n) - 1
    for size in range(1, n + 1):
        for centers in combinations(range(n), size):
            if reduce(operator.or_, (masks[c] for c in centers)) == full:
                return size
    return n


def covering_profile(space, eps_grid, max_points=MAX_POINTS):
    """Exact and greedy covering numbers over an increasing eps grid"""
    grid = tuple(sorted(float(e) for e in eps_grid))
    exact = tuple(exact_covering_number(space, e, max_points) for e in grid)
    greedy = tuple(len(farthest_point_net(space.dist, e)) for e in grid)
    logging.debug(f"Covering profile over {len(grid)} radii: exact {exact}, greedy {greedy}")
    return CoveringProfile(grid, exact, greedy)


def oscillation_weights(A, kind, phi=None, elements=None):
    """
    Pairwise oscillation between ambient elements, maximized over members

    The oscillation of every condition on a part is the largest weight between two of its
    elements, so a cover's value only depends on these weights.

    Returns:
        tuple: (elements, weight matrix)
    """
    if kind not in KINDS:
        raise ValueError(f"Unknown oscillation kind '{kind}', expected one of {KINDS}")
    if kind in ("B", "DS"):
        elements = list(range(A.domain.n)) if elements is None else [int(e) for e in elements]
        if kind == "B":
            norms = pointwise_norms(A)[:, elements]
            return elements, np.abs(norms[:, :, None] - norms[:, None, :]).max(axis=0)
        vals = A.values[:, elements, :]
        return elements, Utils.vector_norm(vals[:, :, None, :] - vals[:, None, :, :], A.norm).max(axis=0)

    if phi is None:
        raise ValueError(f"Kind '{kind}' needs a comparison function")
    pairs = list(off_diagonal(A.domain).pairs) if elements is None else [tuple(int(v) for v in e) for e in elements]
    idx = np.asarray(pairs, dtype=int).reshape(-1, 2)
    if kind == "L":
        q = quotients(A, phi)[:, idx[:, 0], idx[:, 1]]
        return pairs, np.abs(q[:, :, None] - q[:, None, :]).max(axis=0)
    gauged = phi_distances(A.domain, phi)[idx[:, 0], idx[:, 1]]
    transformed = (A.values[:, idx[:, 0], :] - A.values[:, idx[:, 1], :]) / gauged[None, :, None]
    return pairs, Utils.vector_norm(transformed[:, :, None, :] - transformed[:, None, :, :], A.norm).max(axis=0)


def _min_partition_cost(weights, budget):
    k = weights.shape[0]
    best = [np.inf]
    blocks = []

    def place(i, cost):
        if cost >= best[0]:
            return
        if i == k:
            best[0] = cost
            return
        for block in blocks:
            block.append(i)
            place(i + 1, max(cost, float(weights[i, block].max())))
            block.pop()
        if len(blocks) < budget:
            blocks.append([i])
            place(i + 1, cost)
            blocks.pop()

    place(0, 0.0)
    return float(best[0])


def exact_min_oscillation(A, parts_budget, kind, phi=None, elements=None,
                          max_ambient=MAX_AMBIENT, max_parts=MAX_PARTS):
    """
    Smallest achievable oscillation over every cover with at most parts_budget parts

    Args:
        A (FunctionFamily): Family to scan (pass a difference family for conditions on A - A)
        parts_budget (int): Largest number of parts, at most max_parts
        kind (str): "B" or "DS" over points, "L" or "LDS" over pairs
        phi (ComparisonFunction, optional): Gauge for the pair kinds
        elements (list, optional): Restrict the ambient set; the result then bounds every
            cover of the full ambient set from below

    Returns:
        float: The minimal oscillation
    """
    elements, weights = oscillation_weights(A, kind, phi, elements)
    if len(elements) > max_ambient:
        raise TooLarge(f"Exhaustive scan needs at most {max_ambient} elements, got {len(elements)}",
                       elements=len(elements))
    if not 1 <= parts_budget <= max_parts:
        raise TooLarge(f"Parts budget must lie in [1, {max_parts}], got {parts_budget}", parts=parts_budget)
    value = _min_partition_cost(weights, parts_budget)
    logging.debug(f"Exact minimal {kind} oscillation with {parts_budget} parts over {len(elements)} elements: {value}")
    return value


def pigeonhole_B_witness(fixture, cover):
    """
    Two zero-one sequences in one part that separate f_k - f_l in norm

    Points of the zero-one fixture encode sequences by bits (bit n-1 is position n);
    member n-1 is f_n. k is the least position with 2^(k-1) > number of parts, the
    sequences vanishing from position k on are pigeonholed, and l is their first
    disagreement.

    Returns:
        dict: part, x, y (x has a 1 at position l), k, l, gap
    """
    A = fixture.family
    p = int(fixture.params["p"])
    validate_point_cover(fixture.space, cover)
    parts_count = cover.num_parts
    k = next((k for k in range(1, p + 1) if 2 ** (k - 1) > parts_count), None)
    if k is None:
        raise NoWitness(f"No position k <= {p} with 2^(k-1) > {parts_count}", parts=parts_count, length=p)

    first_part = {}
    for index, part in enumerate(cover.parts):
        for x in part:
            first_part.setdefault(x, index)
    buckets = {}
    for x in range(2 ** (k - 1)):
        buckets.setdefault(first_part[x], []).append(x)
    part = min(index for index, members in buckets.items() if len(members) >= 2)
    x, y = buckets[part][:2]
    diff = x ^ y
    l = (diff & -diff).bit_length()
    if not (x >> (l - 1)) & 1:
        x, y = y, x

    delta = A.values[k - 1] - A.values[l - 1]
    norms = Utils.vector_norm(delta, A.norm)
    gap = abs(float(norms[x]) - float(norms[y]))
    logging.info(f"Pigeonhole witness: part {part}, sequences {x} and {y}, k={k}, l={l}, gap {gap}")
    return {"part": part, "x": x, "y": y, "k": k, "l": l, "gap": gap,
            "member": (k - 1) * A.size + (l - 1)}

