# Data carriers shared by the certification modules. Everything here is immutable after
# construction; validation lives in the core modules that build these objects.

from dataclasses import dataclass, field
from functools import cached_property
from itertools import permutations

import numpy as np
import pandas as pd

PASS = "pass"
FAIL = "fail"


def _frozen_array(values, dtype=float):
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    """Validated n-point metric space. Build it with metric_core.validate_metric."""
    dist: np.ndarray
    labels: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "dist", _frozen_array(self.dist))
        if not self.labels:
            object.__setattr__(self, "labels", tuple(range(self.dist.shape[0])))

    @property
    def n(self):
        return self.dist.shape[0]

    @property
    def points(self):
        return tuple(range(self.n))

    @cached_property
    def diameter(self):
        return float(self.dist.max()) if self.n else 0.0

    @cached_property
    def min_gap(self):
        """Smallest positive distance, or 0.0 for a one-point space."""
        if self.n < 2:
            return 0.0
        return float(self.dist[~np.eye(self.n, dtype=bool)].min())

    def to_dict(self):
        return {"points": self.n, "dist": self.dist.tolist()}


@dataclass(frozen=True, eq=False)
class PairSpace:
    """Off-diagonal pairs of a base space under the maximum metric."""
    base: FiniteMetricSpace
    pairs: tuple

    @cached_property
    def index(self):
        return {pair: k for k, pair in enumerate(self.pairs)}

    @cached_property
    def first(self):
        return np.array([p[0] for p in self.pairs], dtype=int)

    @cached_property
    def second(self):
        return np.array([p[1] for p in self.pairs], dtype=int)

    @cached_property
    def dist_inf(self):
        return self.distance_block(self.pairs, self.pairs)

    def distance_block(self, rows, cols):
        """d_inf between two lists of pairs as a len(rows) x len(cols) matrix."""
        d = self.base.dist
        r = np.asarray(rows, dtype=int).reshape(-1, 2)
        c = np.asarray(cols, dtype=int).reshape(-1, 2)
        return np.maximum(d[np.ix_(r[:, 0], c[:, 0])], d[np.ix_(r[:, 1], c[:, 1])])

    def __len__(self):
        return len(self.pairs)


def ordered_pairs(n):
    return tuple(permutations(range(n), 2))


@dataclass(frozen=True)
class Cover:
    """Finite list of non-empty parts over points ("points") or ordered pairs ("pairs")."""
    kind: str
    parts: tuple

    def __post_init__(self):
        if self.kind == "points":
            normalized = tuple(tuple(sorted({int(i) for i in part})) for part in self.parts)
        else:
            normalized = tuple(tuple(sorted({(int(a), int(b)) for a, b in part})) for part in self.parts)
        object.__setattr__(self, "parts", normalized)

    @classmethod
    def trivial(cls, space):
        return cls("points", (tuple(range(space.n)),))

    @classmethod
    def singletons(cls, space):
        return cls("points", tuple((i,) for i in range(space.n)))

    @classmethod
    def trivial_pairs(cls, space):
        return cls("pairs", (ordered_pairs(space.n),))

    @classmethod
    def singleton_pairs(cls, space):
        return cls("pairs", tuple((p,) for p in ordered_pairs(space.n)))

    @property
    def num_parts(self):
        return len(self.parts)

    @cached_property
    def support(self):
        return frozenset(e for part in self.parts for e in part)

    def to_dict(self):
        if self.kind == "points":
            parts = [list(part) for part in self.parts]
        else:
            parts = [[list(p) for p in part] for part in self.parts]
        return {"ambient": self.kind, "parts": parts}


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Values of one map X -> R^d at every point of its domain."""
    domain: FiniteMetricSpace
    values: np.ndarray
    norm: str = "sup"

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        object.__setattr__(self, "values", _frozen_array(values))

    @property
    def dimension(self):
        return self.values.shape[1]


@dataclass(frozen=True, eq=False)
class FunctionFamily:
    """Finite family of sampled maps sharing domain, codomain norm and base point.

    values has shape (members, points, dimension).
    """
    domain: FiniteMetricSpace
    values: np.ndarray
    norm: str = "sup"
    base: int = 0
    phi: object = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim == 2:
            values = values[:, :, None]
        object.__setattr__(self, "values", _frozen_array(values))

    @property
    def size(self):
        return self.values.shape[0]

    @property
    def dimension(self):
        return self.values.shape[2]

    def member(self, k):
        return SampledFunction(self.domain, self.values[k], self.norm)

    @property
    def members(self):
        return [self.member(k) for k in range(self.size)]

    def with_values(self, values):
        return FunctionFamily(self.domain, values, self.norm, self.base, self.phi)

    def to_dict(self):
        data = {
            "domain": self.domain.to_dict(),
            "norm": self.norm,
            "base": self.base,
            "members": self.values.tolist(),
        }
        if self.phi is not None:
            data["phi"] = self.phi.to_dict()
        return data


@dataclass(frozen=True)
class ConditionReport:
    """Verdict of one condition at one eps.

    witness holds the cover on a pass and the violating tuple on a failure;
    extras holds auxiliary measurements (peak quotients, constants of a construction).
    """
    condition: str
    eps: float
    verdict: str
    achieved: float
    witness: dict
    tol: float = 1e-9
    anchor: str = ""
    extras: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.verdict == PASS

    def to_dict(self):
        data = {
            "condition": self.condition,
            "eps": self.eps,
            "verdict": self.verdict,
            "achieved": self.achieved,
            "witness": self.witness,
            "tol": self.tol,
            "anchor": self.anchor,
        }
        if self.extras:
            data["extras"] = self.extras
        return data


@dataclass(frozen=True)
class EquinormWitness:
    Y: tuple
    eps: float

    def to_dict(self):
        return {"Y": list(self.Y), "eps": self.eps}


@dataclass(frozen=True)
class LambdaWitness:
    """Tube radius, near-diagonal pair cover and the outer tube index n."""
    delta: float
    cover: Cover
    n: float

    def to_dict(self):
        return {"delta": self.delta, "n": self.n, "cover": self.cover.to_dict()}


@dataclass(frozen=True)
class TildeCover:
    """Pair cover of the far-from-diagonal set together with the constants that sized it."""
    cover: Cover
    delta: float
    eps: float
    radius: float
    m_low: float
    m_high: float

    def to_dict(self):
        return {
            "cover": self.cover.to_dict(),
            "delta": self.delta,
            "eps": self.eps,
            "radius": self.radius,
            "m": self.m_low,
            "M": self.m_high,
        }


@dataclass(frozen=True)
class BoundednessReport:
    sup_bound: float
    actual_sup: float
    lip_bound: float
    actual_lip: float
    blip_sup: float
    crude_bound: float

    @property
    def holds(self):
        return self.actual_sup <= self.sup_bound and self.actual_lip <= self.lip_bound

    def to_dict(self):
        return {
            "sup_bound": self.sup_bound,
            "actual_sup": self.actual_sup,
            "lip_bound": self.lip_bound,
            "actual_lip": self.actual_lip,
            "M": self.blip_sup,
            "crude_bound": self.crude_bound,
            "holds": self.holds,
        }


@dataclass(frozen=True)
class CoveringProfile:
    eps_grid: tuple
    exact_sizes: tuple
    greedy_sizes: tuple

    def to_frame(self):
        return pd.DataFrame({
            "eps": list(self.eps_grid),
            "exact": list(self.exact_sizes),
            "greedy": list(self.greedy_sizes),
        })

    def to_dict(self):
        return {
            "eps_grid": list(self.eps_grid),
            "exact_sizes": list(self.exact_sizes),
            "greedy_sizes": list(self.greedy_sizes),
        }


@dataclass(frozen=True)
class Claim:
    """One expected outcome of a fixture.

    relation is "pass"/"fail" for checker verdicts, or ">=", "<=", "==" comparing the
    measured value with threshold.
    """
    name: str
    condition: str
    relation: str
    threshold: float = 0.0
    eps: float = 0.0
    params: dict = field(default_factory=dict)
    provenance: str = "derived"

    def to_dict(self):
        return {
            "name": self.name,
            "condition": self.condition,
            "relation": self.relation,
            "threshold": self.threshold,
            "eps": self.eps,
            "params": self.params,
            "provenance": self.provenance,
        }


@dataclass(frozen=True)
class ClaimResult:
    claim: Claim
    value: float
    ok: bool

    def to_dict(self):
        data = self.claim.to_dict()
        data.update({"value": self.value, "ok": self.ok})
        return data


@dataclass(frozen=True, eq=False)
class Fixture:
    name: str
    space: FiniteMetricSpace
    family: FunctionFamily = None
    phi: object = None
    claims: tuple = ()
    params: dict = field(default_factory=dict)

    def to_dict(self):
        data = {
            "name": self.name,
            "params": self.params,
            "space": self.space.to_dict(),
            "claims": [claim.to_dict() for claim in self.claims],
        }
        if self.family is not None:
            data["family"] = self.family.to_dict()
        if self.phi is not None:
            data["phi"] = self.phi.to_dict()
        return data


@dataclass(frozen=True)
class RunManifest:
    command: str
    input_digests: dict
    parameters: dict
    tool_version: str
    report_path: str = ""

    def to_dict(self):
        return {
            "command": self.command,
            "input_digests": dict(sorted(self.input_digests.items())),
            "parameters": self.parameters,
            "tool_version": self.tool_version,
            "report_path": self.report_path,
        }
