"""Exception hierarchy shared by the certification modules.

Every error carries a ``witness`` dictionary so the command layer can put the
offending indices straight into a report.
"""


class LipcertError(Exception):
    """Base class for all lipcert errors"""

    code = "error"

    def __init__(self, message, **witness):
        super().__init__(message)
        self.witness = witness

    def to_dict(self):
        return {"error": self.code, "message": str(self), "witness": dict(self.witness)}


# Metric axioms

class MetricError(LipcertError):
    code = "metric"


class InvalidMatrix(MetricError):
    code = "invalid_matrix"


class NonzeroDiagonal(MetricError):
    code = "nonzero_diagonal"

    def __init__(self, i, value):
        super().__init__(f"dist[{i}][{i}] = {value} is not zero", i=i, value=value)


class NegativeDistance(MetricError):
    code = "negative_distance"

    def __init__(self, i, j, value):
        super().__init__(f"dist[{i}][{j}] = {value} is negative", i=i, j=j, value=value)


class Asymmetry(MetricError):
    code = "asymmetry"

    def __init__(self, i, j, forward, backward):
        super().__init__(f"dist[{i}][{j}] = {forward} but dist[{j}][{i}] = {backward}",
                         i=i, j=j, forward=forward, backward=backward)


class IdentityViolation(MetricError):
    code = "identity"

    def __init__(self, i, j):
        super().__init__(f"distinct points {i} and {j} are at distance 0", i=i, j=j)


class TriangleViolation(MetricError):
    code = "triangle"

    def __init__(self, i, j, k, direct, detour):
        super().__init__(f"dist[{i}][{j}] = {direct} exceeds dist[{i}][{k}] + dist[{k}][{j}] = {detour}",
                         i=i, j=j, k=k, direct=direct, detour=detour)


class DegenerateSpace(LipcertError):
    code = "degenerate_space"


class DiagonalNotCovered(LipcertError):
    code = "diagonal_not_covered"


class EmptySubset(LipcertError):
    code = "empty_subset"


class CoverError(LipcertError):
    code = "cover"


# Comparison functions

class NegativeArgument(LipcertError):
    code = "negative_argument"


class AxiomViolation(LipcertError):
    code = "axiom_violation"

    def __init__(self, name, message, **witness):
        super().__init__(message, axiom=name, **witness)
        self.axiom = name


# Conditions and synthesis

class PreconditionFailed(LipcertError):
    code = "precondition_failed"

    def __init__(self, precondition, message, **witness):
        super().__init__(message, precondition=precondition, **witness)
        self.precondition = precondition


class EquinormPreconditionFailed(PreconditionFailed):
    code = "equinorm_precondition_failed"


class NetPreconditionFailed(PreconditionFailed):
    code = "net_precondition_failed"


class PostconditionFailed(LipcertError):
    code = "postcondition_failed"


class SandwichViolation(LipcertError):
    code = "sandwich_violation"

    def __init__(self, side, pair):
        super().__init__(f"{side} inclusion of the tube sandwich fails at pair {pair}",
                         side=side, pair=list(pair))
        self.side = side


class EmptyTilde(LipcertError):
    code = "empty_tilde"


class NotANet(LipcertError):
    code = "not_a_net"

    def __init__(self, member, distance):
        super().__init__(f"member {member} is at distance {distance} from every net member",
                         member=member, distance=distance)


# Oracles

class TooLarge(LipcertError):
    code = "too_large"


class NoWitness(LipcertError):
    code = "no_witness"


# Command layer

class SchemaError(LipcertError):
    code = "schema"


class MissingWitness(LipcertError):
    code = "missing_witness"


class UnknownFixture(LipcertError):
    code = "unknown_fixture"
