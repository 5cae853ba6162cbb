"""Checkers for the compactness conditions on finite families.

Every checker measures an oscillation that does not depend on eps and passes iff the
measured value is at most eps + tol. Witnesses on failure name the worst part, the two
points or pairs realising the oscillation and the member; the lowest index wins ties.
"""
import logging

import numpy as np

from .errors import EmptySubset, MissingWitness, PreconditionFailed, PostconditionFailed, SandwichViolation
from .family import difference_family, phi_distances, pointwise_norms, quotients, sup_norms
from .metric_core import DEFAULT_TOL, tube_reach, validate_pair_cover, validate_point_cover
from .utils import Utils

try:
    from ..models.data_models import FAIL, PASS, ConditionReport, LambdaWitness
except ImportError:
    from models.data_models import FAIL, PASS, ConditionReport, LambdaWitness

ANCHORS = {
    "equinormed": "equinormed-sets",
    "B": "precompactness-in-bounded-maps",
    "DS": "precompactness-via-values",
    "equicontinuity": "arzela-ascoli",
    "L": "precompactness-in-lipschitz",
    "LDS": "precompactness-in-lipschitz-via-de-leeuw",
    "lambda": "localized-lipschitz-condition",
    "flatness": "little-lipschitz",
}


def _report(condition, eps, achieved, witness, tol, extras=None):
    verdict = PASS if achieved <= eps + tol else FAIL
    logging.debug(f"check {condition}: achieved {achieved:.6g} at eps {eps} -> {verdict}")
    return ConditionReport(condition, float(eps), verdict, float(achieved), witness, tol,
                           ANCHORS.get(condition, ""), extras or {})


def check_equinormed(A, Y, eps, tol=DEFAULT_TOL):
    """Pass iff sup|f| <= eps + max over Y of |f| for every member"""
    Y = sorted(set(int(y) for y in Y))
    if not Y:
        raise EmptySubset("Equinormed check needs a non-empty point subset Y")
    norms = pointwise_norms(A)
    excess = norms.max(axis=1) - norms[:, Y].max(axis=1)
    worst = int(np.argmax(excess))
    achieved = max(float(excess[worst]), 0.0)
    if achieved <= eps + tol:
        witness = {"Y": Y}
    else:
        witness = {
            "member": worst,
            "point": int(np.argmax(norms[worst])),
            "sup_norm": float(norms[worst].max()),
            "seminorm_Y": float(norms[worst, Y].max()),
        }
    return _report("equinormed", eps, achieved, witness, tol)


def _point_oscillation(A, cover, kind):
    """Worst (value, witness) over parts; kind "B" compares norms, "DS" compares values."""
    norms = pointwise_norms(A) if kind == "B" else None
    best, witness = 0.0, None
    for k, part in enumerate(cover.parts):
        if kind == "B":
            sub = norms[:, part]
            osc = sub.max(axis=1) - sub.min(axis=1)
            member = int(np.argmax(osc))
            value = float(osc[member])
            x, y = part[int(np.argmax(sub[member]))], part[int(np.argmin(sub[member]))]
        else:
            vals = A.values[:, part, :]
            gaps = Utils.vector_norm(vals[:, :, None, :] - vals[:, None, :, :], A.norm)
            member, a, b = np.unravel_index(int(np.argmax(gaps)), gaps.shape)
            value = float(gaps[member, a, b])
            member, x, y = int(member), part[int(a)], part[int(b)]
        if witness is None or value > best:
            best = value
            witness = {"part": k, "points": [int(x), int(y)], "member": member}
    return best, witness


def check_B(A, cover, eps, tol=DEFAULT_TOL):
    """Oscillation of |f(x)| within the parts of a point cover"""
    validate_point_cover(A.domain, cover)
    achieved, witness = _point_oscillation(A, cover, "B")
    return _report("B", eps, achieved, witness if achieved > eps + tol else cover.to_dict(), tol)


def check_DS(A, cover, eps, tol=DEFAULT_TOL):
    """Oscillation of the values f(x) within the parts of a point cover"""
    validate_point_cover(A.domain, cover)
    achieved, witness = _point_oscillation(A, cover, "DS")
    return _report("DS", eps, achieved, witness if achieved > eps + tol else cover.to_dict(), tol)


def check_equicontinuity(A, delta, eps, tol=DEFAULT_TOL):
    """|f(x) - f(y)| <= eps for all members and all pairs with d(x, y) <= delta"""
    if delta < 0:
        raise ValueError(f"delta must be non-negative, got {delta}")
    space = A.domain
    close = (space.dist <= delta) & ~np.eye(space.n, dtype=bool)
    if not close.any():
        logging.warning(f"No distinct pairs within delta={delta}; equicontinuity holds vacuously")
        return _report("equicontinuity", eps, 0.0, {"delta": delta, "pairs": 0}, tol)
    gaps = Utils.vector_norm(A.values[:, :, None, :] - A.values[:, None, :, :], A.norm)
    gaps = np.where(close[None, :, :], gaps, -np.inf)
    member, x, y = np.unravel_index(int(np.argmax(gaps)), gaps.shape)
    achieved = float(gaps[member, x, y])
    if achieved <= eps + tol:
        witness = {"delta": delta, "pairs": int(close.sum())}
    else:
        witness = {"points": [int(x), int(y)], "member": int(member), "distance": float(space.dist[x, y])}
    return _report("equicontinuity", eps, achieved, witness, tol)


def pair_quotient_oscillation(A, phi, parts):
    """
    Worst oscillation of the scalar quotient |f(x) - f(y)| / phi(d(x, y)) within pair parts

    Returns:
        tuple: (achieved, witness, peak quotient over the parts)
    """
    q = quotients(A, phi)
    best, witness, peak = 0.0, None, 0.0
    for k, part in enumerate(parts):
        idx = np.asarray(part, dtype=int).reshape(-1, 2)
        vals = q[:, idx[:, 0], idx[:, 1]]
        osc = vals.max(axis=1) - vals.min(axis=1)
        member = int(np.argmax(osc))
        peak = max(peak, float(vals.max()))
        if witness is None or osc[member] > best:
            best = float(osc[member])
            witness = {
                "part": k,
                "pairs": [list(part[int(np.argmax(vals[member]))]), list(part[int(np.argmin(vals[member]))])],
                "member": member,
            }
    return best, witness or {}, peak


def pair_value_oscillation(A, phi, parts):
    """Worst |Phi(f)(p) - Phi(f)(p')| over pairs p, p' sharing a part"""
    gauged = phi_distances(A.domain, phi)
    best, witness = 0.0, None
    for k, part in enumerate(parts):
        idx = np.asarray(part, dtype=int).reshape(-1, 2)
        transformed = (A.values[:, idx[:, 0], :] - A.values[:, idx[:, 1], :]) / gauged[idx[:, 0], idx[:, 1]][None, :, None]
        gaps = Utils.vector_norm(transformed[:, :, None, :] - transformed[:, None, :, :], A.norm)
        member, a, b = np.unravel_index(int(np.argmax(gaps)), gaps.shape)
        value = float(gaps[member, a, b])
        if witness is None or value > best:
            best = value
            witness = {"part": k, "pairs": [list(part[int(a)]), list(part[int(b)])], "member": int(member)}
    return best, witness or {}


def check_L(A, phi, cover, eps, tol=DEFAULT_TOL):
    """Oscillation of the difference quotient within the parts of a cover of all off-diagonal pairs"""
    validate_pair_cover(A.domain, cover)
    achieved, witness, peak = pair_quotient_oscillation(A, phi, cover.parts)
    return _report("L", eps, achieved, witness if achieved > eps + tol else cover.to_dict(), tol,
                   {"peak_quotient": peak})


def check_LDS(A, phi, cover, eps, tol=DEFAULT_TOL):
    """Oscillation of the de Leeuw values within the parts of a cover of all off-diagonal pairs"""
    validate_pair_cover(A.domain, cover)
    achieved, witness = pair_value_oscillation(A, phi, cover.parts)
    return _report("LDS", eps, achieved, witness if achieved > eps + tol else cover.to_dict(), tol)


def check_lambda(A, phi, eps, n, witness, tol=DEFAULT_TOL):
    """
    Localized quotient condition with an explicit witness

    The witness cover must contain every off-diagonal pair of tube(delta) and lie
    inside tube(1/n); inside each part the quotient may oscillate by at most eps.

    Args:
        A (FunctionFamily): Family, usually a difference family
        phi (ComparisonFunction): Gauge
        eps (float): Allowed oscillation
        n (float): Outer tube index, the outer tube has radius 1/n
        witness (LambdaWitness or tuple): (delta, cover)

    Returns:
        ConditionReport: Oscillation verdict; sandwich failures raise SandwichViolation
    """
    if witness is None:
        raise MissingWitness("Condition lambda needs a (delta, cover) witness")
    if not isinstance(witness, LambdaWitness):
        delta, cover = witness
        witness = LambdaWitness(float(delta), cover, n)
    space = A.domain
    cover = witness.cover
    validate_pair_cover(space, cover, exact=False)

    reach = tube_reach(space)
    support = cover.support
    inner = np.argwhere((reach < witness.delta) & ~np.eye(space.n, dtype=bool))
    for i, j in inner:
        if (int(i), int(j)) not in support:
            raise SandwichViolation("inner", (int(i), int(j)))
    outer_radius = 1.0 / n
    for pair in sorted(support):
        if not reach[pair] < outer_radius:
            raise SandwichViolation("outer", pair)

    if cover.parts:
        achieved, fail_witness, peak = pair_quotient_oscillation(A, phi, cover.parts)
    else:
        achieved, fail_witness, peak = 0.0, {}, 0.0
    ok = achieved <= eps + tol
    return _report("lambda", eps, achieved, witness.to_dict() if ok else fail_witness, tol,
                   {"peak_quotient": peak, "delta": witness.delta, "n": n})


def check_uniform_local_flatness(A, phi, delta, eps, tol=DEFAULT_TOL):
    """Peak quotient over pairs with 0 < d(x, y) <= delta; pass iff at most eps + tol"""
    if delta < 0:
        raise ValueError(f"delta must be non-negative, got {delta}")
    space = A.domain
    close = (space.dist <= delta) & ~np.eye(space.n, dtype=bool)
    if not close.any():
        logging.warning(f"No distinct pairs within delta={delta}; flatness holds vacuously")
        return _report("flatness", eps, 0.0, {"delta": delta, "pairs": 0}, tol)
    q = np.where(close[None, :, :], quotients(A, phi), -np.inf)
    member, x, y = np.unravel_index(int(np.argmax(q)), q.shape)
    achieved = float(q[member, x, y])
    if achieved <= eps + tol:
        witness = {"delta": delta, "pairs": int(close.sum())}
    else:
        witness = {"points": [int(x), int(y)], "member": int(member), "distance": float(space.dist[x, y])}
    return _report("flatness", eps, achieved, witness, tol)


def equinormed_sup_bound(A, Y, level=1.0, tol=DEFAULT_TOL):
    """
    Boundedness of a family whose difference set is equinormed on Y

    If every f - g is level-equinormed on Y, then for every member f
    sup|f| <= sup|f_0| + level + 2 * M_Y, with M_Y the largest norm the family takes on Y.

    Returns:
        dict: bound, actual supremum and M_Y
    """
    report = check_equinormed(difference_family(A), Y, level, tol)
    if not report.passed:
        raise PreconditionFailed("equinormed", f"A - A is not {level}-equinormed on Y", **report.witness)
    Y = sorted(set(int(y) for y in Y))
    m_y = float(pointwise_norms(A)[:, Y].max())
    sups = sup_norms(A)
    bound = float(sups[0]) + level + 2.0 * m_y
    actual = float(sups.max())
    if actual > bound + tol:
        raise PostconditionFailed(f"Supremum {actual} exceeds the equinormed bound {bound}")
    logging.info(f"Equinormed bootstrap: sup {actual:.6g} <= {bound:.6g} (M_Y={m_y:.6g})")
    return {"bound": bound, "actual": actual, "M_Y": m_y, "level": level}
