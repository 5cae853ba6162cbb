import math
import unittest

import numpy as np

from src.core.comparison import ComparisonFunction
from src.core.conditions import (
    ANCHORS, check_B, check_DS, check_equicontinuity, check_equinormed, check_L, check_LDS, check_lambda,
    check_uniform_local_flatness, equinormed_sup_bound,
)
from src.core.errors import CoverError, EmptySubset, MissingWitness, PreconditionFailed, SandwichViolation
from src.core.family import difference_family, make_family
from src.core.fixtures import random_family
from src.core.metric_core import space_from_vectors
from src.models.data_models import Cover, LambdaWitness, ordered_pairs


class ConditionTestCase(unittest.TestCase):

    def setUp(self):
        self.space = space_from_vectors([0.0, 1.0, 2.0, 3.0])
        self.phi = ComparisonFunction.identity()
        # f = x and the zero map
        self.A = make_family(self.space, [[0.0, 1.0, 2.0, 3.0], [0.0, 0.0, 0.0, 0.0]])


class TestPointConditions(ConditionTestCase):

    def test_equinormed(self):
        report = check_equinormed(self.A, [3], 0.0)
        self.assertTrue(report.passed)
        self.assertEqual(report.witness, {"Y": [3]})
        report = check_equinormed(self.A, [0], 1.0)
        self.assertFalse(report.passed)
        self.assertEqual(report.achieved, 3.0)
        self.assertEqual(report.witness["member"], 0)
        self.assertEqual(report.witness["point"], 3)
        with self.assertRaises(EmptySubset):
            check_equinormed(self.A, [], 1.0)

    def test_B(self):
        report = check_B(self.A, Cover.trivial(self.space), 3.0)
        self.assertTrue(report.passed)
        self.assertEqual(report.witness, Cover.trivial(self.space).to_dict())
        self.assertEqual(report.anchor, ANCHORS["B"])
        report = check_B(self.A, Cover.trivial(self.space), 2.0)
        self.assertFalse(report.passed)
        self.assertEqual(report.witness, {"part": 0, "points": [3, 0], "member": 0})
        self.assertEqual(check_B(self.A, Cover.singletons(self.space), 0.0).achieved, 0.0)

    def test_B_rejects_a_partial_cover(self):
        with self.assertRaises(CoverError):
            check_B(self.A, Cover("points", [[0, 1]]), 1.0)

    def test_DS(self):
        cover = Cover("points", [[0, 1], [2, 3]])
        report = check_DS(self.A, cover, 1.0)
        self.assertTrue(report.passed)
        self.assertEqual(report.achieved, 1.0)
        report = check_DS(self.A, cover, 0.5)
        self.assertEqual(report.verdict, "fail")
        self.assertEqual(report.witness["part"], 0)

    def test_report_verdict_respects_tolerance(self):
        self.assertTrue(check_DS(self.A, Cover.trivial(self.space), 3.0 - 1e-12).passed)
        self.assertFalse(check_DS(self.A, Cover.trivial(self.space), 3.0 - 1e-6).passed)

    def test_equicontinuity(self):
        self.assertTrue(check_equicontinuity(self.A, 1.0, 1.0).passed)
        report = check_equicontinuity(self.A, 1.0, 0.5)
        self.assertFalse(report.passed)
        self.assertEqual(report.witness, {"points": [0, 1], "member": 0, "distance": 1.0})
        vacuous = check_equicontinuity(self.A, 0.5, 0.0)
        self.assertTrue(vacuous.passed)
        self.assertEqual(vacuous.witness["pairs"], 0)
        with self.assertRaises(ValueError):
            check_equicontinuity(self.A, -1.0, 1.0)


class TestPairConditions(ConditionTestCase):

    def test_L_on_linear_maps(self):
        report = check_L(self.A, self.phi, Cover.trivial_pairs(self.space), 0.0)
        self.assertTrue(report.passed)
        self.assertEqual(report.extras["peak_quotient"], 1.0)

    def test_L_on_a_square(self):
        A = make_family(self.space, [[0.0, 1.0, 4.0, 9.0]])
        report = check_L(A, self.phi, Cover.trivial_pairs(self.space), 1.0)
        self.assertFalse(report.passed)
        self.assertEqual(report.achieved, 4.0)
        self.assertEqual(report.witness["pairs"], [[2, 3], [0, 1]])
        self.assertEqual(report.extras["peak_quotient"], 5.0)

    def test_LDS(self):
        report = check_LDS(self.A, self.phi, Cover.trivial_pairs(self.space), 1.0)
        self.assertFalse(report.passed)
        self.assertEqual(report.achieved, 2.0)
        self.assertTrue(check_LDS(self.A, self.phi, Cover.singleton_pairs(self.space), 0.0).passed)

    def test_LDS_needs_a_pair_cover(self):
        with self.assertRaises(CoverError):
            check_LDS(self.A, self.phi, Cover.trivial(self.space), 1.0)


class TestLambda(ConditionTestCase):

    def setUp(self):
        super().setUp()
        self.cover = Cover("pairs", [[(0, 1), (1, 0)]])

    def test_missing_witness(self):
        with self.assertRaises(MissingWitness):
            check_lambda(self.A, self.phi, 0.1, 1, None)

    def test_sandwiched_witness_passes(self):
        report = check_lambda(self.A, self.phi, 0.0, 0.5, LambdaWitness(1.0, self.cover, 0.5))
        self.assertTrue(report.passed)
        self.assertEqual(report.extras["delta"], 1.0)
        self.assertEqual(report.witness["cover"], self.cover.to_dict())

    def test_tuple_witness(self):
        self.assertTrue(check_lambda(self.A, self.phi, 0.0, 0.5, (1.0, self.cover)).passed)

    def test_outer_violation(self):
        with self.assertRaises(SandwichViolation) as ctx:
            check_lambda(self.A, self.phi, 0.0, 1, (1.0, self.cover))
        self.assertEqual(ctx.exception.side, "outer")

    def test_inner_violation(self):
        with self.assertRaises(SandwichViolation) as ctx:
            check_lambda(self.A, self.phi, 0.0, 0.5, (1.5, Cover("pairs", [[(1, 2)]])))
        self.assertEqual(ctx.exception.side, "inner")
        self.assertEqual(ctx.exception.witness["pair"], [0, 1])


class TestFlatnessAndBounds(ConditionTestCase):

    def test_uniform_local_flatness(self):
        self.assertTrue(check_uniform_local_flatness(self.A, self.phi, 1.0, 1.0).passed)
        report = check_uniform_local_flatness(self.A, self.phi, 1.0, 0.5)
        self.assertFalse(report.passed)
        self.assertEqual(report.witness["points"], [0, 1])
        self.assertEqual(check_uniform_local_flatness(self.A, self.phi, 0.0, 0.0).achieved, 0.0)

    def test_equinormed_sup_bound(self):
        result = equinormed_sup_bound(self.A, [0, 3], 1.0)
        self.assertEqual(result["M_Y"], 3.0)
        self.assertEqual(result["bound"], 10.0)
        self.assertLessEqual(result["actual"], result["bound"])
        with self.assertRaises(PreconditionFailed):
            equinormed_sup_bound(self.A, [0], 1.0)


def grouped(labels, elements):
    return [[elements[k] for k in np.flatnonzero(labels == label)] for label in np.unique(labels)]


class TestRandomizedInvariants(unittest.TestCase):

    gauges = (ComparisonFunction.identity(), ComparisonFunction.power(0.5), ComparisonFunction.log1p())

    def test_refinement_monotonicity_and_scaling(self):
        rng = np.random.default_rng(21)
        for _ in range(1000):
            n, m, d = int(rng.integers(2, 11)), int(rng.integers(1, 9)), int(rng.integers(1, 4))
            phi = self.gauges[int(rng.integers(len(self.gauges)))]
            A = random_family(rng, n, m, d, str(rng.choice(["sup", "euclid", "l1"])))
            points = list(range(n))
            labels = rng.integers(0, 3, size=n)
            coarse = Cover("points", grouped(labels, points))
            fine = Cover("points", grouped(2 * labels + rng.integers(0, 2, size=n), points))
            pairs = Cover("pairs", grouped(rng.integers(0, 3, size=n * (n - 1)), ordered_pairs(n)))
            off = A.domain.dist[~np.eye(n, dtype=bool)]
            delta = float(rng.choice(off))
            Y = sorted(set(rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False).tolist()))

            ds = check_DS(A, coarse, 0.0).achieved
            b = check_B(A, coarse, 0.0).achieved
            self.assertLessEqual(check_DS(A, fine, 0.0).achieved, ds)
            self.assertLessEqual(check_B(A, fine, 0.0).achieved, b)
            self.assertLessEqual(b, ds + 1e-12)
            self.assertLessEqual(check_DS(difference_family(A), coarse, 0.0).achieved, 2.0 * ds + 1e-12)

            self.assertTrue(check_DS(A, coarse, ds).passed)
            if ds > 1e-6:
                self.assertFalse(check_DS(A, coarse, ds - 1e-6).passed)

            measures = (
                lambda F: check_B(F, coarse, 0.0),
                lambda F: check_DS(F, coarse, 0.0),
                lambda F: check_equicontinuity(F, delta, 0.0),
                lambda F: check_equinormed(F, Y, 0.0),
                lambda F: check_L(F, phi, pairs, 0.0),
                lambda F: check_LDS(F, phi, pairs, 0.0),
                lambda F: check_uniform_local_flatness(F, phi, delta, 0.0),
            )
            scale = float(rng.choice([-2.0, 0.5, 4.0, -0.25]))
            scaled = A.with_values(A.values * scale)
            for measure in measures:
                self.assertTrue(math.isclose(measure(scaled).achieved, abs(scale) * measure(A).achieved,
                                             rel_tol=1e-12, abs_tol=1e-15))


if __name__ == '__main__':
    unittest.main()
