"""Deterministic example and counterexample instances with self-verifying claims.

Each builder returns a Fixture whose claims are re-derived by verify_fixture through the
checkers and oracles; nothing in a claim is trusted without recomputation.
"""
import logging
from fractions import Fraction

import numpy as np
import pandas as pd

from .comparison import ComparisonFunction
from .conditions import check_B, check_DS, check_L, check_LDS
from .errors import MetricError, UnknownFixture
from .family import deleeuw_values, difference_family, lip_norm, lip_seminorm, make_family, quotients, section, sup_norm
from .metric_core import DEFAULT_TOL, max_tube_delta, off_diagonal, space_from_vectors, validate_metric
from .oracle import exact_min_oscillation, pigeonhole_B_witness
from .utils import Utils

try:
    from ..models.data_models import Claim, ClaimResult, Cover, Fixture
except ImportError:
    from models.data_models import Claim, ClaimResult, Cover, Fixture


def riesz_zero_one(p=3):
    """
    Zero-one sequences of length p with f_n = e_0 where the n-th entry is 0, e_n where it is 1

    Point i encodes the sequence whose n-th entry is bit n-1 of i; the metric is the
    normalized Hamming distance and the codomain is R^(p+1) with the sup norm.
    """
    p = int(p)
    if p < 2:
        raise ValueError(f"Sequence length must be at least 2, got {p}")
    count = 2 ** p
    bits = np.array([[(i >> (n - 1)) & 1 for n in range(1, p + 1)] for i in range(count)])
    space = validate_metric(np.abs(bits[:, None, :] - bits[None, :, :]).sum(axis=2) / p,
                            labels=tuple("".join(str(b) for b in row) for row in bits))
    values = np.zeros((p, count, p + 1))
    for n in range(1, p + 1):
        values[n - 1, :, 0] = 1 - bits[:, n - 1]
        values[n - 1, :, n] = bits[:, n - 1]
    family = make_family(space, values, "sup")

    budget = min(3, 2 ** (p - 1) - 1)
    claims = [
        Claim("metric is valid", "metric_valid", "==", 1.0),
        Claim("(B) holds for A on one part", "check_B", "pass", eps=0.0,
              params={"target": "A", "cover": "trivial"}, provenance="published"),
        Claim("(B) fails for A - A on one part", "check_B", "fail", eps=0.25,
              params={"target": "A-A", "cover": "trivial"}, provenance="published"),
        Claim("pigeonhole separates A - A on one part", "pigeonhole", ">=", 0.5,
              params={"cover": "trivial"}, provenance="published"),
        Claim("sections take at most p+1 values", "section_size", "<=", float(p + 1)),
    ]
    if count <= 8:
        claims.append(Claim(f"(B) for A - A needs more than {budget} parts", "min_oscillation", ">=", 0.5,
                            params={"target": "A-A", "kind": "B", "parts": budget}, provenance="published"))
    return Fixture("riesz", space, family, None, tuple(claims), {"p": p})


def sphere_pair(k=4, points=None):
    """Separated unit vectors X with f(x) = x and g(x) = 2x"""
    if points is None:
        k = int(k)
        if not 1 <= k <= 6:
            raise ValueError(f"Basis sphere size must lie in [1, 6], got {k}")
        points = np.eye(k)
    points = np.asarray(points, dtype=float)
    norms = np.abs(points).max(axis=1)
    if not np.allclose(norms, 1.0):
        raise ValueError("Sphere points must have sup norm 1")
    space = space_from_vectors(points, "sup")
    if space.n > 1 and space.min_gap < 1.0 - DEFAULT_TOL:
        raise ValueError(f"Sphere points must be pairwise at distance >= 1, got {space.min_gap}")
    family = make_family(space, np.stack([points, 2.0 * points]), "sup")

    claims = [
        Claim("(B) holds for A on one part", "check_B", "pass", eps=0.0,
              params={"target": "A", "cover": "trivial"}, provenance="published"),
        Claim("(B) holds for A - A on one part", "check_B", "pass", eps=0.0,
              params={"target": "A-A", "cover": "trivial"}, provenance="published"),
        Claim("(DS) holds on singleton parts", "check_DS", "pass", eps=0.0,
              params={"target": "A", "cover": "singletons"}),
    ]
    if space.n > 1:
        claims.append(Claim("(DS) fails on one part", "check_DS", "fail", eps=0.5,
                            params={"target": "A", "cover": "trivial"}))
    if 1 < space.n <= 5:
        claims.append(Claim("(DS) below 1 needs one part per point", "min_oscillation", ">=", 1.0,
                            params={"target": "A", "kind": "DS", "parts": space.n - 1}))
    return Fixture("sphere", space, family, None, tuple(claims), {"k": space.n})


def tent_family(K=12):
    """Tents f_n(x) = max(0, 1 - |x/n - 1|) on the grid {0..K}, plus the zero member first"""
    K = int(K)
    if K < 4:
        raise ValueError(f"Tent grid needs K >= 4, got {K}")
    grid = np.arange(K + 1, dtype=float)
    space = space_from_vectors(grid, "sup")
    phi = ComparisonFunction.identity()
    tents = [np.zeros(K + 1)] + [np.maximum(0.0, 1.0 - np.abs(grid / n - 1.0)) for n in range(1, K // 2 + 1)]
    family = make_family(space, np.array(tents), "sup", base=0, phi=phi)

    claims = [Claim("zero member vanishes", "sup_norm", "==", 0.0, params={"member": 0})]
    for n in range(1, K // 2 + 1):
        claims.append(Claim(f"|f_{n}|_phi = 1/{n}", "lip_seminorm", "==", 1.0 / n,
                            params={"member": n}, provenance="published"))
        claims.append(Claim(f"lip norm of f_{n} = 1/{n}", "lip_norm", "==", 1.0 / n,
                            params={"member": n}))
    claims.append(Claim("(B) fails for A - A on one part", "check_B", "fail", eps=0.5,
                        params={"target": "A-A", "cover": "trivial"}, provenance="published"))
    claims.append(Claim("(B) for A - A needs more than two parts on {1..8}", "min_oscillation", ">=", 1.0,
                        params={"target": "A-A", "kind": "B", "parts": 2, "elements": list(range(1, 9))}))
    return Fixture("tent", space, family, phi, tuple(claims), {"K": K})


def ball_cover_failure(h=0.125):
    """
    Tent f(x) = 1 - |x - 1| sampled on a grid of step h over [0, 2]

    Pairs (1-2h, 1-h) and (1-h, 1-2h) are at d_inf distance h with de Leeuw values
    -1 and +1, so no ball through both has de Leeuw oscillation below 2.
    """
    steps = Fraction(1, 1) / Fraction(h).limit_denominator(10 ** 6)
    if steps.denominator != 1 or steps < 2:
        raise ValueError(f"Grid step must be 1/k for an integer k >= 2, got {h}")
    k = int(steps)
    h = 1.0 / k
    grid = np.arange(2 * k + 1) * h
    space = space_from_vectors(grid, "sup")
    phi = ComparisonFunction.identity()
    family = make_family(space, (1.0 - np.abs(grid - 1.0))[None, :], "sup", phi=phi)

    left, near, top, right = k - 2, k - 1, k, k + 1
    claims = [
        Claim("|f|_phi = 1", "lip_seminorm", "==", 1.0, params={"member": 0}),
        Claim("opposite pairs are h apart", "pair_distance", "==", h,
              params={"pairs": [[left, near], [near, left]]}),
        Claim("de Leeuw values differ by 2", "deleeuw_gap", "==", 2.0,
              params={"member": 0, "pairs": [[left, near], [near, left]]}, provenance="published"),
        Claim("quotients across the peak differ by 1", "quotient_gap", "==", 1.0,
              params={"member": 0, "pairs": [[near, top], [near, right]]}, provenance="published"),
        Claim("(LDS) holds on de Leeuw level sets", "check_LDS", "pass", eps=0.0,
              params={"target": "A", "cover": "level_sets"}),
        Claim("(LDS) holds on singleton pairs", "check_LDS", "pass", eps=0.0,
              params={"target": "A", "cover": "singleton_pairs"}),
    ]
    return Fixture("balls", space, family, phi, tuple(claims), {"h": h})


def _zminus_distance(a, b):
    if a == b:
        return 0.0
    n, m = abs(a), abs(b)
    same_sign = (a > 0) == (b > 0)
    if n == 1 and m == 1:
        return 0.5
    if n == 1 or m == 1:
        other = max(n, m)
        return 0.5 - 1.0 / (2 * other) if same_sign else 0.5
    return 1.0 / (2 * n) + 1.0 / (2 * m)


def zminus_labels(K):
    return tuple(range(1, K + 1)) + tuple(-n for n in range(1, K + 1))


def zminus_metric(K=6):
    """The integers +-1..+-K with the metric whose diagonal ball cover has no uniform tube"""
    K = int(K)
    if K < 2:
        raise ValueError(f"K must be at least 2, got {K}")
    labels = zminus_labels(K)
    dist = [[_zminus_distance(a, b) for b in labels] for a in labels]
    return validate_metric(dist, labels=labels)


def zminus_fixture(K=6):
    space = zminus_metric(K)
    K = int(K)
    one, minus_one = 0, K
    claims = [
        Claim("metric is valid", "metric_valid", "==", 1.0, provenance="published"),
        Claim("d(1, -1) = 1/2", "distance", "==", 0.5, params={"i": one, "j": minus_one}, provenance="published"),
        Claim("d(2, -2) = 1/2", "distance", "==", 0.5, params={"i": 1, "j": K + 1}, provenance="published"),
        Claim("B(1, 1/2) and B(-1, 1/2) cover the diagonal", "tube_delta", ">", 0.0,
              params={"centers": [one, minus_one], "radius": 0.5}, provenance="published"),
        Claim("tube radius of the two balls is 1/K", "tube_delta", "==", 1.0 / K,
              params={"centers": [one, minus_one], "radius": 0.5}),
    ]
    return Fixture("zminus", space, None, None, tuple(claims), {"K": K})


def linfty_family(K=5, a_grid=(0.0, 0.25, 0.5, 0.75, 1.0)):
    """x_0 = 0 and x_n = e_n / n in R^K under the sup norm, with maps f_a(x) = a x"""
    K = int(K)
    a_grid = [float(a) for a in np.atleast_1d(a_grid)]
    points = np.zeros((K + 1, K))
    for n in range(1, K + 1):
        points[n, n - 1] = 1.0 / n
    space = space_from_vectors(points, "sup")
    phi = ComparisonFunction.identity()
    family = make_family(space, np.array([a * points for a in a_grid]), "sup", base=0, phi=phi)

    spread = max(a_grid) - min(a_grid)
    claims = [
        Claim("(L) holds for A - A on one part", "check_L", "pass", eps=0.0,
              params={"target": "A-A", "cover": "trivial_pairs"}, provenance="published"),
        Claim("quotients of A - A peak at max|a - b|", "peak_quotient", "==", spread,
              params={"target": "A-A", "cover": "trivial_pairs"}, provenance="published"),
    ]
    critical = [[n, 0] for n in range(1, K + 1)]
    if 4 < K <= 8 and len(a_grid) > 1:
        claims.append(Claim("(LDS) on the critical pairs needs more than 4 parts", "min_oscillation", ">=",
                            max(abs(a) for a in a_grid),
                            params={"target": "A", "kind": "LDS", "parts": 4, "elements": critical},
                            provenance="published"))
    return Fixture("linfty", space, family, phi, tuple(claims), {"K": K, "a": a_grid})


def random_family(rng, n=8, m=5, d=2, norm="sup", phi=None):
    """Random points of the unit square (Euclidean metric) with members uniform in [-1, 1]^d"""
    space = space_from_vectors(rng.random((n, 2)), "euclid")
    return make_family(space, rng.uniform(-1.0, 1.0, size=(m, n, d)), norm, base=0, phi=phi)


FIXTURES = {
    "riesz": riesz_zero_one,
    "sphere": sphere_pair,
    "tent": tent_family,
    "balls": ball_cover_failure,
    "zminus": zminus_fixture,
    "linfty": linfty_family,
}


def build_fixture(name, params=None):
    if name not in FIXTURES:
        raise UnknownFixture(f"Unknown fixture '{name}', expected one of {sorted(FIXTURES)}", name=name)
    return FIXTURES[name](**(params or {}))


# Claim verification

def _target(fixture, claim):
    A = fixture.family
    return difference_family(A) if claim.params.get("target") == "A-A" else A


def _cover(fixture, claim, A):
    spec = claim.params.get("cover", "trivial")
    space = fixture.space
    if spec == "trivial":
        return Cover.trivial(space)
    if spec == "singletons":
        return Cover.singletons(space)
    if spec == "trivial_pairs":
        return Cover.trivial_pairs(space)
    if spec == "singleton_pairs":
        return Cover.singleton_pairs(space)
    if spec == "level_sets":
        pairs = off_diagonal(space).pairs
        transformed = deleeuw_values(A, fixture.phi)
        keys = np.round(transformed.transpose(1, 0, 2).reshape(len(pairs), -1), 12)
        groups = {}
        for pair, key in zip(pairs, map(tuple, keys)):
            groups.setdefault(key, []).append(pair)
        return Cover("pairs", tuple(tuple(g) for g in groups.values()))
    raise ValueError(f"Unknown cover spec '{spec}'")


def _measure(fixture, claim, tol):
    """Returns (value, verdict or None)."""
    condition, params = claim.condition, claim.params
    if condition == "metric_valid":
        try:
            validate_metric(fixture.space.dist, tol)
            return 1.0, None
        except MetricError:
            return 0.0, None
    if condition == "distance":
        return float(fixture.space.dist[params["i"], params["j"]]), None
    if condition == "tube_delta":
        return float(max_tube_delta(fixture.space, params["centers"], params["radius"])), None
    if condition == "pair_distance":
        (a, b), (c, d) = params["pairs"]
        return float(max(fixture.space.dist[a, c], fixture.space.dist[b, d])), None

    A = _target(fixture, claim)
    if condition == "sup_norm":
        return sup_norm(A.member(params["member"])), None
    if condition == "lip_seminorm":
        return lip_seminorm(A.member(params["member"]), fixture.phi), None
    if condition == "lip_norm":
        return lip_norm(A.member(params["member"]), fixture.phi, A.base), None
    if condition == "section_size":
        return float(max(len(np.unique(section(A, x), axis=0)) for x in range(A.domain.n))), None
    if condition in ("deleeuw_gap", "quotient_gap"):
        (a, b), (c, d) = params["pairs"]
        if condition == "deleeuw_gap":
            f, dist = A.values[params["member"]], fixture.space.dist
            u = (f[a] - f[b]) / fixture.phi(dist[a, b])
            v = (f[c] - f[d]) / fixture.phi(dist[c, d])
            return float(Utils.vector_norm(u - v, A.norm)), None
        q = quotients(A, fixture.phi)[params["member"]]
        return abs(float(q[a, b]) - float(q[c, d])), None
    if condition == "pigeonhole":
        return pigeonhole_B_witness(fixture, _cover(fixture, claim, A))["gap"], None
    if condition == "min_oscillation":
        elements = params.get("elements")
        if elements is not None and params["kind"] in ("L", "LDS"):
            elements = [tuple(e) for e in elements]
        return exact_min_oscillation(A, params["parts"], params["kind"], fixture.phi, elements), None

    cover = _cover(fixture, claim, A)
    if condition == "check_B":
        report = check_B(A, cover, claim.eps, tol)
    elif condition == "check_DS":
        report = check_DS(A, cover, claim.eps, tol)
    elif condition in ("check_L", "peak_quotient"):
        report = check_L(A, fixture.phi, cover, claim.eps, tol)
        if condition == "peak_quotient":
            return report.extras["peak_quotient"], None
    elif condition == "check_LDS":
        report = check_LDS(A, fixture.phi, cover, claim.eps, tol)
    else:
        raise ValueError(f"Unknown claim condition '{condition}'")
    return report.achieved, report.verdict


def verify_claim(fixture, claim, tol=DEFAULT_TOL):
    value, verdict = _measure(fixture, claim, tol)
    relation = claim.relation
    if relation in ("pass", "fail"):
        ok = verdict == relation
    elif relation == ">=":
        ok = value >= claim.threshold - tol
    elif relation == "<=":
        ok = value <= claim.threshold + tol
    elif relation == ">":
        ok = value > claim.threshold
    else:
        ok = abs(value - claim.threshold) <= tol
    if not ok:
        logging.warning(f"Fixture {fixture.name}: claim '{claim.name}' not confirmed (value {value})")
    return ClaimResult(claim, float(value), bool(ok))


def verify_fixture(fixture, tol=DEFAULT_TOL):
    results = [verify_claim(fixture, claim, tol) for claim in fixture.claims]
    confirmed = sum(r.ok for r in results)
    logging.info(f"Fixture {fixture.name}: {confirmed}/{len(results)} claims confirmed")
    return results


def verification_table(results):
    return pd.DataFrame([r.to_dict() for r in results],
                        columns=["name", "condition", "relation", "threshold", "eps", "value", "ok", "provenance"])
