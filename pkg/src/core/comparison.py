"""Comparison functions: concave gauges phi with phi(0) = 0 that define Hoelder-type
difference quotients.
"""
import logging
from collections import namedtuple
from dataclasses import dataclass

import numpy as np

from .errors import AxiomViolation, MetricError, NegativeArgument
from .metric_core import DEFAULT_TOL, validate_metric
from .utils import Utils

KINDS = ("power", "log1p", "pwl")
DEFAULT_GRID_POINTS = 1025
MAX_HALVINGS = 200
BISECTION_STEPS = 80

ModulusRadius = namedtuple("ModulusRadius", ["radius", "achieved"])


@dataclass(frozen=True)
class ComparisonFunction:
    """phi(t) = t**alpha, log(1 + t), or a piecewise-linear interpolant through breakpoints.

    Piecewise-linear gauges continue past the last breakpoint with the last slope.
    Concavity of breakpoints is checked by validate_comparison, not here.
    """
    kind: str
    alpha: float = 1.0
    breakpoints: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise AxiomViolation("kind", f"Unknown comparison kind '{self.kind}'", kind=self.kind)
        if self.kind == "power" and not 0.0 < self.alpha <= 1.0:
            raise AxiomViolation("exponent", f"Power exponent must lie in (0, 1], got {self.alpha}",
                                 alpha=self.alpha)
        if self.kind == "pwl":
            points = tuple((float(t), float(v)) for t, v in self.breakpoints)
            object.__setattr__(self, "breakpoints", points)
            if len(points) < 2:
                raise AxiomViolation("breakpoints", "Piecewise-linear gauge needs at least two breakpoints")
            if points[0] != (0.0, 0.0):
                raise AxiomViolation("zero", f"First breakpoint must be (0, 0), got {points[0]}",
                                     breakpoint=list(points[0]))
            ts = [t for t, _ in points]
            if any(b <= a for a, b in zip(ts, ts[1:])):
                raise AxiomViolation("breakpoints", "Breakpoint abscissae must increase strictly")

    @classmethod
    def power(cls, alpha):
        return cls("power", alpha=float(alpha))

    @classmethod
    def log1p(cls):
        return cls("log1p")

    @classmethod
    def pwl(cls, breakpoints):
        return cls("pwl", breakpoints=tuple(breakpoints))

    @classmethod
    def identity(cls):
        return cls("power", alpha=1.0)

    @classmethod
    def from_dict(cls, data):
        kind = data.get("kind")
        if kind == "power":
            return cls.power(data.get("alpha", 1.0))
        if kind == "pwl":
            return cls.pwl(data.get("breakpoints", ()))
        return cls(kind)

    def to_dict(self):
        if self.kind == "power":
            return {"kind": "power", "alpha": self.alpha}
        if self.kind == "pwl":
            return {"kind": "pwl", "breakpoints": [list(p) for p in self.breakpoints]}
        return {"kind": "log1p"}

    @property
    def slopes(self):
        ts = np.array([t for t, _ in self.breakpoints])
        vs = np.array([v for _, v in self.breakpoints])
        return np.diff(vs) / np.diff(ts)

    def __call__(self, t):
        return evaluate(self, t)


def evaluate(phi, t):
    """phi(t) for a scalar or array t >= 0"""
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0):
        raise NegativeArgument(f"Comparison functions are defined for t >= 0, got {arr.min()}",
                               t=float(arr.min()))
    if phi.kind == "power":
        out = np.power(arr, phi.alpha)
    elif phi.kind == "log1p":
        out = np.log1p(arr)
    else:
        ts = np.array([p[0] for p in phi.breakpoints])
        vs = np.array([p[1] for p in phi.breakpoints])
        last_slope = phi.slopes[-1]
        out = np.where(arr <= ts[-1], np.interp(arr, ts, vs), vs[-1] + last_slope * (arr - ts[-1]))
    return float(out) if np.ndim(out) == 0 else out


def default_grid(phi, upper=1.0, points=DEFAULT_GRID_POINTS):
    grid = Utils.chebyshev_grid(upper, points)
    if phi.kind == "pwl":
        grid = np.concatenate([grid, [t for t, _ in phi.breakpoints]])
    return np.unique(grid)


def validate_comparison(phi, grid=None, upper=1.0, tol=DEFAULT_TOL):
    """
    Check the comparison-function axioms on a grid

    Piecewise-linear gauges get an exact slope test first. The remaining checks run on
    the grid: phi(0) = 0, monotonicity, positivity, phi(t)/t non-increasing and
    sub-additivity over all grid pairs.

    Args:
        phi (ComparisonFunction): Gauge to check
        grid (list, optional): Sorted non-negative sample points
        upper (float): Right end of the default grid
        tol (float): Absolute slack

    Returns:
        dict: Passed checks and the informational ratio trend near 0
    """
    checks = []
    if phi.kind == "pwl":
        slopes = phi.slopes
        rising = np.flatnonzero(slopes[1:] > slopes[:-1] + tol)
        if rising.size:
            k = int(rising[0])
            raise AxiomViolation("concavity", f"Slope increases from {slopes[k]} to {slopes[k + 1]}",
                                 segment=k, slopes=[float(slopes[k]), float(slopes[k + 1])])
        checks.append("concavity")

    grid = default_grid(phi, upper) if grid is None else np.asarray(grid, dtype=float)
    if grid.size and (np.any(np.diff(grid) < 0) or grid[0] < 0):
        raise ValueError("Sample grid must be sorted and non-negative")
    values = evaluate(phi, grid)

    if abs(evaluate(phi, 0.0)) > tol:
        raise AxiomViolation("zero", f"phi(0) = {evaluate(phi, 0.0)}", value=evaluate(phi, 0.0))
    checks.append("zero")

    falling = np.flatnonzero(values[1:] < values[:-1] - tol)
    if falling.size:
        k = int(falling[0])
        raise AxiomViolation("monotonicity", f"phi decreases between {grid[k]} and {grid[k + 1]}",
                             pair=[float(grid[k]), float(grid[k + 1])])
    checks.append("monotonicity")

    positive = grid > 0
    zeros = np.flatnonzero(positive & (values <= 0))
    if zeros.size:
        t = float(grid[zeros[0]])
        raise AxiomViolation("positivity", f"phi({t}) is not positive", t=t)
    checks.append("positivity")

    ratios = values[positive] / grid[positive]
    ts = grid[positive]
    rising = np.flatnonzero(ratios[1:] > ratios[:-1] + tol)
    if rising.size:
        k = int(rising[0])
        raise AxiomViolation("ratio", f"phi(t)/t increases between {ts[k]} and {ts[k + 1]}",
                             pair=[float(ts[k]), float(ts[k + 1])])
    checks.append("ratio")

    sums = grid[:, None] + grid[None, :]
    excess = evaluate(phi, sums) - (values[:, None] + values[None, :])
    bad = np.argwhere(excess > tol)
    if bad.size:
        i, j = (int(v) for v in bad[0])
        raise AxiomViolation("subadditivity", f"phi({grid[i]} + {grid[j]}) exceeds phi({grid[i]}) + phi({grid[j]})",
                             pair=[float(grid[i]), float(grid[j])])
    checks.append("subadditivity")

    logging.debug(f"Comparison function {phi.to_dict()} passed {checks} on {grid.size} grid points")
    return {
        "phi": phi.to_dict(),
        "grid_points": int(grid.size),
        "checks": checks,
        "verdict": "pass",
        "ratio_trend": [float(r) for r in ratios[:5]],
    }


def induced_metric(space, phi, tol=DEFAULT_TOL):
    """The space with distances phi(d); the triangle inequality is re-validated"""
    dist = np.asarray(evaluate(phi, space.dist), dtype=float)
    np.fill_diagonal(dist, 0.0)
    try:
        return validate_metric(dist, tol=tol, labels=space.labels)
    except MetricError as e:
        raise AxiomViolation("induced_metric", f"phi o d is not a metric: {e}", **e.witness) from e


def oscillation_modulus(phi, h, upper, grid):
    """sup over grid points s of phi(min(s + h, upper)) - phi(s)"""
    s = grid[grid <= upper]
    return float(np.max(evaluate(phi, np.minimum(s + h, upper)) - evaluate(phi, s)))


def modulus_radius(phi, upper, osc_bound, grid_points=DEFAULT_GRID_POINTS):
    """
    Largest r found by geometric bisection with phi(r) <= osc_bound and
    |phi(t) - phi(s)| <= osc_bound whenever |t - s| <= 2r on [0, upper]

    Args:
        phi (ComparisonFunction): Gauge
        upper (float): Right end of the domain interval, > 0
        osc_bound (float): Allowed value and oscillation, > 0
        grid_points (int): Size of the grid the oscillation is measured on

    Returns:
        ModulusRadius: radius r and the achieved max(phi(r), oscillation over 2r)
    """
    if upper <= 0 or osc_bound <= 0:
        raise ValueError(f"modulus_radius needs upper > 0 and osc_bound > 0, got {upper}, {osc_bound}")
    grid = Utils.chebyshev_grid(upper, grid_points)

    def measure(r):
        return max(evaluate(phi, r), oscillation_modulus(phi, 2.0 * r, upper, grid))

    r = upper / 2.0
    achieved = measure(r)
    if achieved <= osc_bound:
        return ModulusRadius(r, achieved)

    hi = r
    for _ in range(MAX_HALVINGS):
        r /= 2.0
        achieved = measure(r)
        if achieved <= osc_bound:
            break
        hi = r
    else:
        logging.warning(f"modulus_radius gave up after {MAX_HALVINGS} halvings at r={r}")
        return ModulusRadius(r, achieved)

    lo = r
    for _ in range(BISECTION_STEPS):
        mid = float(np.sqrt(lo * hi))
        if not lo < mid < hi:
            break
        value = measure(mid)
        if value <= osc_bound:
            lo, achieved = mid, value
        else:
            hi = mid
    logging.debug(f"modulus_radius: r={lo:.6g} achieves {achieved:.6g} <= {osc_bound:.6g}")
    return ModulusRadius(lo, achieved)
