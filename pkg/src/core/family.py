"""Sampled function families and the norms defined on them.

A family stores its members as one array of shape (members, points, dimension);
SampledFunction is the single-member view.
"""
import logging

import numpy as np

from .comparison import evaluate
from .errors import DegenerateSpace, EmptySubset
from .metric_core import farthest_point_net, off_diagonal
from .utils import NORM_KINDS, Utils

try:
    from ..models.data_models import FunctionFamily, SampledFunction
except ImportError:
    from models.data_models import FunctionFamily, SampledFunction


def make_family(domain, values, norm="sup", base=0, phi=None):
    """
    Build a validated FunctionFamily

    Args:
        domain (FiniteMetricSpace): Common domain
        values (array-like): Shape (members, points, dimension), or (members, points) for scalars
        norm (str): Codomain norm, one of "sup", "euclid", "l1"
        base (int): Base point index
        phi (ComparisonFunction, optional): Gauge attached to the family

    Returns:
        FunctionFamily: The family
    """
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 2:
        arr = arr[:, :, None]
    if arr.ndim != 3 or arr.shape[0] == 0:
        raise ValueError(f"Family values must have shape (members, points, dimension), got {arr.shape}")
    if arr.shape[1] != domain.n:
        raise ValueError(f"Members sample {arr.shape[1]} points but the domain has {domain.n}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("Family values must be finite")
    if norm not in NORM_KINDS:
        raise ValueError(f"Unknown norm kind '{norm}'")
    if not 0 <= base < domain.n:
        raise ValueError(f"Base point {base} is outside the domain")
    return FunctionFamily(domain, arr, norm, int(base), phi)


def pointwise_norms(A):
    """norms[k, x] = |f_k(x)|"""
    return Utils.vector_norm(A.values, A.norm)


def sup_norm(f):
    return float(Utils.vector_norm(f.values, f.norm).max())


def sup_norms(A):
    return pointwise_norms(A).max(axis=1)


def seminorm_Y(f, Y):
    """max over y in Y of |f(y)|"""
    Y = sorted(set(int(y) for y in Y))
    if not Y:
        raise EmptySubset("The point subset Y must not be empty")
    if Y[0] < 0 or Y[-1] >= f.domain.n:
        raise ValueError(f"Y contains points outside the domain: {Y}")
    return float(Utils.vector_norm(f.values[Y], f.norm).max())


def _require_pairs(space):
    if space.n < 2:
        raise DegenerateSpace(f"Difference quotients need at least 2 points, got {space.n}", n=space.n)


def phi_distances(space, phi):
    """phi(d(x, y)) with ones on the diagonal so it can divide safely"""
    gauged = np.array(evaluate(phi, space.dist), dtype=float)
    np.fill_diagonal(gauged, 1.0)
    return gauged


def quotients(A, phi):
    """q[k, x, y] = |f_k(x) - f_k(y)| / phi(d(x, y)), zero on the diagonal"""
    _require_pairs(A.domain)
    diffs = Utils.vector_norm(A.values[:, :, None, :] - A.values[:, None, :, :], A.norm)
    q = diffs / phi_distances(A.domain, phi)[None, :, :]
    idx = np.arange(A.domain.n)
    q[:, idx, idx] = 0.0
    return q


def lip_seminorms(A, phi):
    return quotients(A, phi).max(axis=(1, 2))


def lip_seminorm(f, phi):
    """|f|_phi: largest difference quotient over ordered pairs of distinct points"""
    _require_pairs(f.domain)
    diffs = Utils.vector_norm(f.values[:, None, :] - f.values[None, :, :], f.norm)
    q = diffs / phi_distances(f.domain, phi)
    np.fill_diagonal(q, 0.0)
    return float(q.max())


def lip_norm(f, phi, base=0):
    """|f(base)| + |f|_phi"""
    return float(Utils.vector_norm(f.values[base], f.norm)) + lip_seminorm(f, phi)


def blip_norm(f, phi):
    """sup |f| + |f|_phi"""
    return sup_norm(f) + lip_seminorm(f, phi)


def difference_family(A):
    """All m^2 differences f_p - f_q, member p*m + q; duplicates kept"""
    m = A.size
    diffs = (A.values[:, None, :, :] - A.values[None, :, :, :]).reshape(m * m, A.domain.n, A.dimension)
    return A.with_values(diffs)


def difference_index(A, k):
    """(p, q) such that member k of difference_family(A) is f_p - f_q"""
    return divmod(int(k), A.size)


def section(A, x):
    """Values of every member at point x, one row per member"""
    return np.array(A.values[:, int(x), :])


def image(A):
    """Distinct values taken by the family over the whole domain"""
    return np.unique(A.values.reshape(-1, A.dimension), axis=0)


def deleeuw(f, phi, pair_space=None):
    """Phi(f)(x, y) = (f(x) - f(y)) / phi(d(x, y)) on the off-diagonal pairs"""
    if pair_space is None:
        pair_space = off_diagonal(f.domain)
    gauged = np.asarray(evaluate(phi, f.domain.dist[pair_space.first, pair_space.second]), dtype=float)
    values = (f.values[pair_space.first] - f.values[pair_space.second]) / gauged[:, None]
    return SampledFunction(pair_space, values, f.norm)


def deleeuw_values(A, phi, pair_space=None):
    """de Leeuw transform of every member, shape (members, pairs, dimension)"""
    if pair_space is None:
        pair_space = off_diagonal(A.domain)
    gauged = np.asarray(evaluate(phi, A.domain.dist[pair_space.first, pair_space.second]), dtype=float)
    return (A.values[:, pair_space.first, :] - A.values[:, pair_space.second, :]) / gauged[None, :, None]


def embed_T(f, phi, base=0):
    """(f(base), Phi(f)); isometric for the norm |f(base)| + |f|_phi"""
    return np.array(f.values[base]), deleeuw(f, phi)


def embedding_defect(f, phi, base=0):
    """| |f(base)| + sup |Phi(f)| - lip_norm(f) |"""
    at_base, transformed = embed_T(f, phi, base)
    total = float(Utils.vector_norm(at_base, f.norm)) + float(Utils.vector_norm(transformed.values, f.norm).max())
    return abs(total - lip_norm(f, phi, base))


def family_distance_matrix(A, kind="sup", phi=None):
    """
    Pairwise distances between members in a function-space norm

    Args:
        A (FunctionFamily): Family
        kind (str): "sup", "lip" (|f(base)| + |f|_phi) or "blip" (sup + |f|_phi)
        phi (ComparisonFunction, optional): Gauge, defaults to the family's

    Returns:
        numpy.ndarray: members x members matrix
    """
    D = difference_family(A)
    m = A.size
    sups = sup_norms(D)
    if kind == "sup":
        return sups.reshape(m, m)
    phi = phi or A.phi
    if phi is None:
        raise ValueError(f"The '{kind}' distance needs a comparison function")
    lips = lip_seminorms(D, phi)
    if kind == "lip":
        at_base = Utils.vector_norm(D.values[:, A.base, :], A.norm)
        return (at_base + lips).reshape(m, m)
    if kind == "blip":
        return (sups + lips).reshape(m, m)
    raise ValueError(f"Unknown family distance '{kind}'")


def family_net(A, eps, kind="sup", phi=None):
    """Greedy eps-net of the members themselves; returns member indices"""
    net = farthest_point_net(family_distance_matrix(A, kind, phi), eps)
    logging.debug(f"{kind} eps-net of {A.size} members at eps={eps}: {len(net)} centers")
    return net
