"""Cover synthesizers following the constructive compactness proofs.

Each synthesizer checks its precondition with the matching checker, builds the cover the
proof builds (same constants, lowest-index representatives) and re-runs the target
checker on the result. A failing postcondition raises PostconditionFailed.
"""
import logging
import math

import numpy as np

from .comparison import evaluate, modulus_radius
from .conditions import (
    check_B, check_DS, check_equicontinuity, check_equinormed, check_L, check_lambda,
    check_uniform_local_flatness, pair_quotient_oscillation,
)
from .errors import (
    DegenerateSpace, EmptyTilde, EquinormPreconditionFailed, NetPreconditionFailed, NotANet,
    PostconditionFailed, PreconditionFailed, SandwichViolation,
)
from .family import (
    difference_family, family_distance_matrix, image, lip_seminorms, pointwise_norms, quotients, sup_norms,
)
from .metric_core import (
    DEFAULT_TOL, ball_parts, far_pairs, farthest_point_net, greedy_eps_net, lebesgue_delta,
    max_tube_delta, off_diagonal, tube_reach,
)
from .utils import Utils

try:
    from ..models.data_models import BoundednessReport, Cover, EquinormWitness, LambdaWitness, TildeCover
except ImportError:
    from models.data_models import BoundednessReport, Cover, EquinormWitness, LambdaWitness, TildeCover


def _require(report, precondition, error=PreconditionFailed):
    if not report.passed:
        raise error(precondition, f"Precondition {precondition} fails: achieved {report.achieved:.6g} "
                                  f"> eps {report.eps:.6g}", **report.witness)


def _ensure(report, what):
    if not report.passed:
        logging.error(f"{what} produced a cover failing {report.condition}: {report.achieved} > {report.eps}")
        raise PostconditionFailed(f"{what} failed its postcondition", **report.witness)
    logging.info(f"{what}: {report.condition} passes at eps={report.eps} (achieved {report.achieved:.6g})")
    return report


def _net_of_vectors(vectors, radius, norm, budget, what):
    dist = Utils.vector_norm(vectors[:, None, :] - vectors[None, :, :], norm)
    centers = farthest_point_net(dist, radius)
    if budget is not None and len(centers) > budget:
        raise NetPreconditionFailed("net", f"{what} needs {len(centers)} balls of radius {radius}, "
                                           f"budget is {budget}", centers=len(centers), budget=budget)
    logging.debug(f"{what}: {len(centers)} net balls of radius {radius:.6g} over {len(vectors)} vectors")
    return vectors[centers]


def _first_ball(values, centers, radius, norm):
    """Index of the lowest ball containing each value; values (..., d), centers (c, d)"""
    gaps = Utils.vector_norm(values[..., None, :] - centers, norm)
    return np.argmax(gaps <= radius, axis=-1)


def synthesize_B_cover(A, eps, Y=None, net_eps=None, net_budget=None, tol=DEFAULT_TOL):
    """
    Point cover on which A - A oscillates in norm by at most eps

    Args:
        A (FunctionFamily): Source family
        eps (float): Target oscillation
        Y (list, optional): Points on which A - A is eps/16-equinormed, all points by default
        net_eps (float, optional): Net radius over the sections at Y, at most eps/32
        net_budget (int, optional): Largest acceptable net size

    Returns:
        Cover: The quantization cover, passing check_B(A - A, cover, eps)
    """
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    Y = sorted(set(range(A.domain.n) if Y is None else (int(y) for y in Y)))
    D = difference_family(A)
    _require(check_equinormed(D, Y, eps / 16.0, tol), "equinormed", EquinormPreconditionFailed)

    limit = eps / 32.0
    net_eps = limit if net_eps is None else net_eps
    if not 0 < net_eps <= limit:
        raise NetPreconditionFailed("net", f"Net radius {net_eps} must lie in (0, eps/32 = {limit}]",
                                    net_eps=net_eps, limit=limit)

    at_y = A.values[:, Y, :]
    vectors = np.unique(at_y.reshape(-1, A.dimension), axis=0)
    centers = _net_of_vectors(vectors, net_eps, A.norm, net_budget, "B cover section net")

    psi = _first_ball(at_y, centers, net_eps, A.norm)
    representatives = [group[0] for group in Utils.group_rows(psi)]
    H = A.values[representatives]
    G = Utils.vector_norm(H[:, None, :, :] - H[None, :, :, :], A.norm)
    G = G.reshape(-1, A.domain.n).T

    width = eps / 2.0
    top = 2.0 * float(sup_norms(A).max())
    boxes = max(1, math.ceil(top / width))
    labels = np.minimum(np.floor(G / width), boxes - 1).astype(int)
    cover = Cover("points", tuple(Utils.group_rows(labels)))
    logging.debug(f"B cover: {len(representatives)} representatives, {boxes} boxes per coordinate, "
                  f"{cover.num_parts} parts")
    _ensure(check_B(D, cover, eps, tol), "synthesize_B_cover")
    return cover


def equinorm_witness_from_B(A, cover, level, tol=DEFAULT_TOL):
    """Y = lowest point of every part; A is then 2*level-equinormed on Y"""
    _require(check_B(A, cover, level, tol), "B")
    Y = tuple(sorted({part[0] for part in cover.parts}))
    _ensure(check_equinormed(A, Y, 2.0 * level, tol), "equinorm_witness_from_B")
    return EquinormWitness(Y, 2.0 * level)


def synthesize_DS_from_B(A, b_cover, eps, net_budget=None, tol=DEFAULT_TOL):
    """
    Point cover on which every member's values oscillate by at most eps

    Args:
        A (FunctionFamily): Source family
        b_cover (Cover): Cover on which A - A passes (B) at eps/8
        eps (float): Target oscillation
        net_budget (int, optional): Largest acceptable net of the image

    Returns:
        Cover: Intersections of b_cover parts with the net boxes, passing check_DS(A, cover, eps)
    """
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    _require(check_B(difference_family(A), b_cover, eps / 8.0, tol), "B")
    radius = eps / 8.0
    centers = _net_of_vectors(image(A), radius, A.norm, net_budget, "DS image net")

    anchors = [part[0] for part in b_cover.parts]
    psi = _first_ball(A.values[:, anchors, :], centers, radius, A.norm)
    representatives = [group[0] for group in Utils.group_rows(psi)]

    boxes = _first_ball(A.values[representatives], centers, radius, A.norm).T
    parts = []
    for part in b_cover.parts:
        for group in Utils.group_rows(boxes[list(part)]):
            parts.append([part[k] for k in group])
    cover = Cover("points", tuple(parts))
    logging.debug(f"DS cover: {len(representatives)} representatives, {len(centers)} image balls, "
                  f"{cover.num_parts} parts")
    _ensure(check_DS(A, cover, eps, tol), "synthesize_DS_from_B")
    return cover


def ds_cover_from_equicontinuity(A, delta, eps, tol=DEFAULT_TOL):
    """Closed balls of radius delta/2 around greedy centers"""
    _require(check_equicontinuity(A, delta, eps, tol), "equicontinuity")
    space = A.domain
    centers = greedy_eps_net(space, delta / 2.0)
    cover = Cover("points", tuple(ball_parts(space.dist, centers, delta / 2.0)))
    _ensure(check_DS(A, cover, eps, tol), "ds_cover_from_equicontinuity")
    return cover


def equicontinuity_from_ds(A, cover, eps, tol=DEFAULT_TOL):
    """Lebesgue number of a DS cover as an equicontinuity radius"""
    _require(check_DS(A, cover, eps, tol), "DS")
    delta = lebesgue_delta(A.domain, cover)
    _ensure(check_equicontinuity(A, delta, eps, tol), "equicontinuity_from_ds")
    return delta


def synthesize_tilde_cover(A, phi, delta, eps, tol=DEFAULT_TOL):
    """
    Cover of the pairs outside tube(delta) by d_inf balls of radius r/2

    r is chosen so that phi(r) <= m^2 eps / (8 M^2) and phi moves by at most
    m^2 eps / (8 M) over steps of 2r, where m is the smallest phi(d) outside the tube and
    M bounds both the bounded Lipschitz norms of A and phi on the domain.

    Returns:
        TildeCover: The cover and its constants; differences of members oscillate in
        quotient norm by at most eps inside every part
    """
    if eps < 0:
        raise ValueError(f"eps must be non-negative, got {eps}")
    space = A.domain
    if space.n < 2:
        raise DegenerateSpace(f"Pair covers need at least 2 points, got {space.n}", n=space.n)
    pairs = far_pairs(space, delta)
    if not pairs:
        raise EmptyTilde(f"Every pair lies in tube({delta})", delta=delta)

    pair_space = off_diagonal(space)
    gauged = np.asarray(evaluate(phi, space.dist), dtype=float)
    idx = np.asarray(pairs, dtype=int)
    m_low = float(gauged[idx[:, 0], idx[:, 1]].min())
    m_high = max(float((sup_norms(A) + lip_seminorms(A, phi)).max()), float(gauged.max()))
    bound = min(m_low ** 2 * eps / (8.0 * m_high ** 2), m_low ** 2 * eps / (8.0 * m_high))
    # eps = 0 leaves only singleton parts
    radius = modulus_radius(phi, space.diameter, bound).radius if bound > 0 else 0.0

    dist = pair_space.distance_block(pairs, pairs)
    centers = farthest_point_net(dist, radius / 2.0)
    parts = tuple(tuple(pairs[k] for k in part) for part in ball_parts(dist, centers, radius / 2.0))
    cover = Cover("pairs", parts)
    logging.debug(f"Tilde cover at delta={delta}: m={m_low:.6g}, M={m_high:.6g}, r={radius:.6g}, "
                  f"{len(pairs)} pairs in {cover.num_parts} balls")

    achieved, witness, _ = pair_quotient_oscillation(difference_family(A), phi, cover.parts)
    if achieved > eps + tol:
        logging.error(f"Tilde cover oscillation {achieved} exceeds eps {eps}")
        raise PostconditionFailed("synthesize_tilde_cover failed its postcondition", **witness)
    logging.info(f"synthesize_tilde_cover: oscillation {achieved:.6g} <= {eps}")
    return TildeCover(cover, float(delta), float(eps), float(radius), m_low, m_high)


def lambda_from_L(A, phi, L_cover, eps, n, tol=DEFAULT_TOL):
    """
    Localize an (L) cover of A - A to the diagonal balls of radius 1/n

    Returns:
        LambdaWitness: tube radius from max_tube_delta and the parts U_i cut by B(x_j, 1/n)^2
    """
    D = difference_family(A)
    _require(check_L(D, phi, L_cover, eps, tol), "L")
    space = A.domain
    radius = 1.0 / n
    centers = greedy_eps_net(space, radius, closed=False)
    inside = space.dist[:, centers] < radius
    parts = []
    for part in L_cover.parts:
        for j in range(len(centers)):
            cut = tuple(p for p in part if inside[p[0], j] and inside[p[1], j])
            if cut:
                parts.append(cut)
    delta = max_tube_delta(space, centers, radius)
    witness = LambdaWitness(delta, Cover("pairs", tuple(parts)), n)
    _ensure(check_lambda(D, phi, eps, n, witness, tol), "lambda_from_L")
    return witness


def lambda_boundedness(A, phi, witness, eps, tol=DEFAULT_TOL):
    """
    Evaluate the boundedness chains that a lambda witness of A - A implies

    For a point x reached by a witness pair (y, x) in part U with first pair (xi, eta):
    |g(x)| <= phi(d(x, y)) (eps + q_{g-f}(xi, eta)) + |(g - f)(y)| + |f(x)|
           <= (2 + max(1, eps)) R + 2 R^2 / phi(d(xi, eta)),
    with f the first member. Pairs in a part satisfy
    q_g <= eps + 4M / phi(d(xi, eta)) + |f|_phi, other pairs q_g <= 2M / phi(d).
    Bounds include the tolerance slack.

    Returns:
        BoundednessReport: Chains and the values they bound
    """
    space = A.domain
    gauged = np.asarray(evaluate(phi, space.dist), dtype=float)
    norms = pointwise_norms(A)
    f0 = A.values[0]
    shifted = Utils.vector_norm(A.values - f0[None, :, :], A.norm)

    reached = {}
    owner = {}
    for k, part in enumerate(witness.cover.parts):
        for pair in part:
            owner.setdefault(pair, k)
            reached.setdefault(pair[1], (pair[0], k))

    zone = {z for y, k in reached.values() for z in (y, *witness.cover.parts[k][0])}
    R = max(float(gauged.max()), float(norms[0].max()))
    if zone:
        R = max(R, float(shifted[:, sorted(zone)].max()))

    sup_bounds, crude = [], 0.0
    for x in range(space.n):
        if x in reached:
            y, k = reached[x]
            xi, eta = witness.cover.parts[k][0]
            anchor = gauged[xi, eta]
            q_anchor = Utils.vector_norm(
                (A.values[:, xi, :] - f0[xi]) - (A.values[:, eta, :] - f0[eta]), A.norm) / anchor
            chain = gauged[x, y] * (eps + q_anchor) + shifted[:, y] + norms[0, x]
            rough = (2.0 + max(1.0, eps)) * R + 2.0 * R ** 2 / anchor
            crude = max(crude, rough)
            bound = min(float(chain.max()), rough) + tol * (1.0 + R)
        else:
            bound = float(norms[:, x].max())
        if norms[:, x].max() > bound:
            raise PostconditionFailed(f"Boundedness chain fails at point {x}", point=x)
        sup_bounds.append(bound)

    q = quotients(A, phi)
    big_m = float((sup_norms(A) + lip_seminorms(A, phi)).max())
    f_lip = float(q[0].max())
    lip_bound = 0.0
    for a, b in off_diagonal(space).pairs:
        if (a, b) in owner:
            xi, eta = witness.cover.parts[owner[(a, b)]][0]
            bound = eps + 4.0 * big_m / gauged[xi, eta] + f_lip + tol
        else:
            bound = 2.0 * big_m / gauged[a, b] + tol
        if q[:, a, b].max() > bound:
            raise PostconditionFailed(f"Lipschitz chain fails at pair {(a, b)}", pair=[a, b])
        lip_bound = max(lip_bound, bound)

    report = BoundednessReport(
        sup_bound=float(max(sup_bounds)),
        actual_sup=float(norms.max()),
        lip_bound=float(lip_bound),
        actual_lip=float(q.max()),
        blip_sup=big_m,
        crude_bound=float(crude),
    )
    logging.info(f"Boundedness bootstrap: sup {report.actual_sup:.6g} <= {report.sup_bound:.6g}, "
                 f"Lipschitz {report.actual_lip:.6g} <= {report.lip_bound:.6g}, M={big_m:.6g}")
    return report


def L_from_lambda(A, phi, witness, eps, tol=DEFAULT_TOL):
    """
    Extend a lambda witness of A - A to an (L) cover of every off-diagonal pair

    The witness parts handle the pairs near the diagonal; a tilde cover at delta/4 and
    eps/2, with pairs of reach at most delta/2 removed, handles the rest.

    Returns:
        tuple: (Cover passing check_L(A - A, phi, cover, eps), BoundednessReport of the
        witness with the bound M on the bounded Lipschitz norms)
    """
    D = difference_family(A)
    try:
        report = check_lambda(D, phi, eps, witness.n, witness, tol)
    except SandwichViolation as e:
        raise PreconditionFailed("lambda", f"Witness is not sandwiched: {e}", **e.witness) from e
    _require(report, "lambda")
    bounds = lambda_boundedness(A, phi, witness, eps, tol)

    space = A.domain
    parts = list(witness.cover.parts)
    quarter = witness.delta / 4.0
    if far_pairs(space, quarter):
        tilde = synthesize_tilde_cover(A, phi, quarter, eps / 2.0, tol)
        reach = tube_reach(space)
        for part in tilde.cover.parts:
            kept = tuple(p for p in part if reach[p] > witness.delta / 2.0)
            if kept:
                parts.append(kept)
    cover = Cover("pairs", tuple(parts))
    _ensure(check_L(D, phi, cover, eps, tol), "L_from_lambda")
    return cover, bounds


def lambda_from_flatness(A, phi, eps, n, flat_delta, tol=DEFAULT_TOL):
    """
    Lambda witness for A - A from eps/2-flatness of A within flat_delta

    Diagonal balls have radius 1/m with m the least integer making 1/m <= min(flat_delta/2, 1/n).
    """
    if flat_delta <= 0:
        raise PreconditionFailed("flatness", f"Flatness radius must be positive, got {flat_delta}")
    _require(check_uniform_local_flatness(A, phi, flat_delta, eps / 2.0, tol), "flatness")
    space = A.domain
    m = math.ceil(max(2.0 / flat_delta, n))
    radius = min(1.0 / m, flat_delta / 2.0, 1.0 / n)
    centers = greedy_eps_net(space, radius, closed=False)
    parts = []
    for c in centers:
        ball = np.flatnonzero(space.dist[c] < radius)
        pairs = tuple((int(a), int(b)) for a in ball for b in ball if a != b)
        if pairs:
            parts.append(pairs)
    delta = max_tube_delta(space, centers, radius)
    witness = LambdaWitness(delta, Cover("pairs", tuple(parts)), n)
    _ensure(check_lambda(difference_family(A), phi, eps, n, witness, tol), "lambda_from_flatness")
    return witness


def flatness_from_net(A, phi, net_indices, eps, tol=DEFAULT_TOL):
    """
    Flatness radius of a family from an eps/2-net of its members in the Lipschitz norm

    Returns:
        float: Largest distance at which every net member is eps/2-flat, 0.0 when none is
    """
    net = sorted(set(int(k) for k in net_indices))
    if not net:
        raise NotANet(0, float("inf"))
    nearest = family_distance_matrix(A, "lip", phi)[:, net].min(axis=1)
    worst = int(np.argmax(nearest))
    if nearest[worst] > eps / 2.0:
        raise NotANet(worst, float(nearest[worst]))

    space = A.domain
    q = quotients(A, phi)[net].max(axis=0)
    off = ~np.eye(space.n, dtype=bool)
    delta = 0.0
    for t in np.unique(space.dist[off]):
        if q[off & (space.dist <= t)].max() > eps / 2.0:
            break
        delta = float(t)
    if delta == 0.0:
        logging.warning("Net members are not eps/2-flat at any distance; flatness radius is 0")
    _ensure(check_uniform_local_flatness(A, phi, delta, eps, tol), "flatness_from_net")
    return delta
