import unittest

import numpy as np

from src.core.comparison import ComparisonFunction
from src.core.conditions import (
    check_B, check_DS, check_equicontinuity, check_equinormed, check_L, check_lambda, check_uniform_local_flatness,
    pair_quotient_oscillation,
)
from src.core.errors import (
    EmptyTilde, EquinormPreconditionFailed, NetPreconditionFailed, NotANet, PreconditionFailed,
)
from src.core.family import difference_family, family_net, make_family, quotients
from src.core.fixtures import random_family
from src.core.metric_core import far_pairs, space_from_vectors, tube_reach
from src.core.synthesis import (
    L_from_lambda, ds_cover_from_equicontinuity, equicontinuity_from_ds, equinorm_witness_from_B,
    flatness_from_net, lambda_boundedness, lambda_from_flatness, lambda_from_L, synthesize_B_cover,
    synthesize_DS_from_B, synthesize_tilde_cover,
)
from src.models.data_models import Cover, LambdaWitness, ordered_pairs

GAUGES = (ComparisonFunction.identity(), ComparisonFunction.power(0.5), ComparisonFunction.log1p())
SWEEP = 500


def random_instances(seed, count=SWEEP):
    """Seeded families with at most 10 points, 8 members and dimension 3, eps in {1, 1/2, 1/4}"""
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n, m, d = int(rng.integers(2, 11)), int(rng.integers(1, 9)), int(rng.integers(1, 4))
        phi = GAUGES[int(rng.integers(len(GAUGES)))]
        A = random_family(rng, n, m, d, str(rng.choice(["sup", "euclid"])), phi)
        yield A, phi, float(rng.choice([1.0, 0.5, 0.25])), rng


def gentle(A, phi, level):
    """Rescale A so that every member is level-flat on the closest pairs"""
    peak = float(quotients(A, phi).max(axis=0)[A.domain.dist == A.domain.min_gap].max())
    if peak <= level / 2.0:
        return A
    return A.with_values(A.values * (level / 2.0 / peak))


def flat_radius(A, phi, level):
    """Largest pair distance up to which every member is level-flat"""
    q = quotients(A, phi).max(axis=0)
    off = ~np.eye(A.domain.n, dtype=bool)
    radius = 0.0
    for t in np.unique(A.domain.dist[off]):
        if q[off & (A.domain.dist <= t)].max() > level:
            break
        radius = float(t)
    return radius


def random_pair_cover(rng, n, parts=3):
    pairs = ordered_pairs(n)
    labels = rng.integers(0, parts, size=len(pairs))
    return Cover("pairs", [[pairs[k] for k in np.flatnonzero(labels == label)] for label in np.unique(labels)])


class SynthesisTestCase(unittest.TestCase):

    def setUp(self):
        self.space = space_from_vectors([0.0, 1.0, 2.0, 3.0])
        self.phi = ComparisonFunction.identity()
        self.A = make_family(self.space, [[0.0, 1.0, 2.0, 3.0], [0.0, 0.0, 0.0, 0.0]], phi=self.phi)
        self.flat = make_family(self.space, [[0.0, 0.1, 0.2, 0.3], [0.0, 0.0, 0.0, 0.0]], phi=self.phi)
        self.random = random_family(np.random.default_rng(42), 8, 4, 2)


class TestPointSynthesis(SynthesisTestCase):

    def test_B_cover_on_random_family(self):
        cover = synthesize_B_cover(self.random, 0.5)
        self.assertTrue(check_B(difference_family(self.random), cover, 0.5).passed)

    def test_B_cover_of_singleton_family_is_trivial(self):
        single = make_family(self.space, [[0.0, 1.0, 2.0, 3.0]])
        self.assertEqual(synthesize_B_cover(single, 0.5), Cover.trivial(self.space))

    def test_B_cover_equinorm_precondition(self):
        with self.assertRaises(EquinormPreconditionFailed) as ctx:
            synthesize_B_cover(self.A, 1.0, Y=[0])
        self.assertEqual(ctx.exception.precondition, "equinormed")

    def test_B_cover_net_budget(self):
        with self.assertRaises(NetPreconditionFailed):
            synthesize_B_cover(self.A, 1.0, net_budget=1)
        with self.assertRaises(NetPreconditionFailed):
            synthesize_B_cover(self.A, 1.0, net_eps=0.5)

    def test_DS_from_B(self):
        b_cover = synthesize_B_cover(self.random, 0.5 / 8.0)
        cover = synthesize_DS_from_B(self.random, b_cover, 0.5)
        self.assertTrue(check_DS(self.random, cover, 0.5).passed)
        for part in cover.parts:
            self.assertTrue(any(set(part) <= set(b) for b in b_cover.parts))

    def test_DS_from_B_precondition(self):
        with self.assertRaises(PreconditionFailed):
            synthesize_DS_from_B(self.A, Cover.trivial(self.space), 1.0)

    def test_equinorm_witness_from_B(self):
        witness = equinorm_witness_from_B(self.A, Cover("points", [[0, 1], [2, 3]]), 1.0)
        self.assertEqual(witness.Y, (0, 2))
        self.assertEqual(witness.eps, 2.0)
        self.assertTrue(check_equinormed(self.A, witness.Y, witness.eps).passed)


class TestEquicontinuityRoundTrip(SynthesisTestCase):

    def test_ds_cover_from_equicontinuity(self):
        cover = ds_cover_from_equicontinuity(self.A, 1.0, 1.0)
        self.assertEqual(sorted(cover.parts), list(Cover.singletons(self.space).parts))

    def test_equicontinuity_from_ds(self):
        delta = equicontinuity_from_ds(self.A, Cover("points", [[0, 1, 2], [1, 2, 3]]), 2.0)
        self.assertEqual(delta, 2.0)
        self.assertTrue(check_equicontinuity(self.A, delta, 2.0).passed)

    def test_round_trip_on_random_family(self):
        A = self.random
        delta = 0.3
        eps = check_equicontinuity(A, delta, 0.0).achieved + 1e-6
        cover = ds_cover_from_equicontinuity(A, delta, eps)
        self.assertTrue(check_DS(A, cover, eps).passed)
        self.assertTrue(check_equicontinuity(A, equicontinuity_from_ds(A, cover, eps), eps).passed)


class TestPairSynthesis(SynthesisTestCase):

    def test_tilde_cover(self):
        tilde = synthesize_tilde_cover(self.A, self.phi, 1.0, 0.5)
        self.assertEqual(tilde.cover.support, frozenset(far_pairs(self.space, 1.0)))
        self.assertEqual(tilde.m_low, 1.0)
        self.assertEqual(tilde.m_high, 4.0)
        self.assertGreater(tilde.radius, 0.0)

    def test_tilde_cover_on_random_family(self):
        phi = ComparisonFunction.power(0.5)
        tilde = synthesize_tilde_cover(self.random, phi, 0.2, 0.5)
        self.assertEqual(tilde.cover.support, frozenset(far_pairs(self.random.domain, 0.2)))

    def test_tilde_cover_at_zero_eps(self):
        tilde = synthesize_tilde_cover(self.A, self.phi, 1.0, 0.0)
        self.assertEqual(tilde.radius, 0.0)
        self.assertEqual(tilde.cover.num_parts, len(far_pairs(self.space, 1.0)))
        with self.assertRaises(ValueError):
            synthesize_tilde_cover(self.A, self.phi, 1.0, -0.5)

    def test_empty_tilde(self):
        with self.assertRaises(EmptyTilde):
            synthesize_tilde_cover(self.A, self.phi, 10.0, 0.5)

    def test_lambda_from_L(self):
        witness = lambda_from_L(self.A, self.phi, Cover.trivial_pairs(self.space), 0.1, 0.5)
        self.assertEqual(witness.delta, 1.0)
        self.assertEqual(witness.cover.num_parts, 2)
        self.assertTrue(check_lambda(difference_family(self.A), self.phi, 0.1, 0.5, witness).passed)

    def test_lambda_boundedness(self):
        witness = lambda_from_L(self.A, self.phi, Cover.trivial_pairs(self.space), 0.1, 0.5)
        report = lambda_boundedness(self.A, self.phi, witness, 0.1)
        self.assertTrue(report.holds)
        self.assertEqual(report.actual_sup, 3.0)
        self.assertEqual(report.blip_sup, 4.0)

    def test_L_from_lambda(self):
        witness = lambda_from_L(self.A, self.phi, Cover.trivial_pairs(self.space), 0.1, 0.5)
        cover, bounds = L_from_lambda(self.A, self.phi, witness, 0.1)
        self.assertEqual(cover.support, frozenset(ordered_pairs(4)))
        self.assertTrue(check_L(difference_family(self.A), self.phi, cover, 0.1).passed)
        self.assertEqual(bounds.blip_sup, 4.0)
        self.assertTrue(bounds.holds)

    def test_L_from_lambda_at_zero_eps(self):
        witness = lambda_from_L(self.A, self.phi, Cover.trivial_pairs(self.space), 0.0, 0.5)
        cover, _ = L_from_lambda(self.A, self.phi, witness, 0.0)
        self.assertEqual(cover.support, frozenset(ordered_pairs(4)))
        self.assertEqual(check_L(difference_family(self.A), self.phi, cover, 0.0).achieved, 0.0)

    def test_L_from_lambda_rejects_unsandwiched_witness(self):
        witness = lambda_from_L(self.A, self.phi, Cover.trivial_pairs(self.space), 0.1, 0.5)
        bad = LambdaWitness(witness.delta, witness.cover, 1.0)
        with self.assertRaises(PreconditionFailed):
            L_from_lambda(self.A, self.phi, bad, 0.1)


class TestFlatness(SynthesisTestCase):

    def test_lambda_from_flatness(self):
        witness = lambda_from_flatness(self.flat, self.phi, 0.5, 1, 3.0)
        self.assertEqual(witness.n, 1)
        self.assertTrue(check_lambda(difference_family(self.flat), self.phi, 0.5, 1, witness).passed)

    def test_lambda_from_flatness_preconditions(self):
        with self.assertRaises(PreconditionFailed):
            lambda_from_flatness(self.flat, self.phi, 0.5, 1, 0.0)
        with self.assertRaises(PreconditionFailed):
            lambda_from_flatness(self.A, self.phi, 1.0, 1, 3.0)

    def test_flatness_from_net(self):
        delta = flatness_from_net(self.flat, self.phi, [0], 0.5)
        self.assertEqual(delta, 3.0)
        self.assertTrue(check_uniform_local_flatness(self.flat, self.phi, delta, 0.5).passed)

    def test_flatness_from_net_rejects_non_net(self):
        with self.assertRaises(NotANet):
            flatness_from_net(self.A, self.phi, [0], 1.0)
        with self.assertRaises(NotANet):
            flatness_from_net(self.A, self.phi, [], 1.0)


class TestSeededSoundness(unittest.TestCase):
    """Synthesized covers and witnesses pass their target checkers on seeded random families"""

    def test_B_cover(self):
        for A, _, eps, _ in random_instances(101):
            cover = synthesize_B_cover(A, eps)
            self.assertTrue(check_B(difference_family(A), cover, eps).passed)

    def test_DS_from_B(self):
        for A, _, eps, _ in random_instances(102):
            cover = synthesize_DS_from_B(A, synthesize_B_cover(A, eps / 8.0), eps)
            self.assertTrue(check_DS(A, cover, eps).passed)

    def test_equicontinuity_round_trip(self):
        for A, _, _, rng in random_instances(103):
            space = A.domain
            delta = float(rng.uniform(0.05, 0.8))
            eps = check_equicontinuity(A, delta, 0.0).achieved
            cover = ds_cover_from_equicontinuity(A, delta, eps)
            self.assertTrue(check_DS(A, cover, eps).passed)
            recovered = equicontinuity_from_ds(A, cover, eps)
            self.assertTrue(check_equicontinuity(A, recovered, eps).passed)
            closest = np.argwhere(space.dist == space.min_gap)
            if all(any(i in part and j in part for part in cover.parts) for i, j in closest):
                self.assertGreaterEqual(recovered, space.min_gap)
            else:
                self.assertEqual(recovered, 0.0)

    def test_tilde_cover(self):
        for A, phi, eps, rng in random_instances(104):
            reach = tube_reach(A.domain)[~np.eye(A.domain.n, dtype=bool)]
            delta = float(reach.max() * rng.uniform(0.1, 1.0))
            tilde = synthesize_tilde_cover(A, phi, delta, eps)
            self.assertEqual(tilde.cover.support, frozenset(far_pairs(A.domain, delta)))
            achieved, _, _ = pair_quotient_oscillation(difference_family(A), phi, tilde.cover.parts)
            self.assertLessEqual(achieved, eps + 1e-9)

    def test_lambda_from_flatness(self):
        for A, phi, eps, rng in random_instances(105):
            A = gentle(A, phi, eps / 2.0)
            n = int(rng.integers(1, 4))
            witness = lambda_from_flatness(A, phi, eps, n, flat_radius(A, phi, eps / 2.0))
            self.assertTrue(check_lambda(difference_family(A), phi, eps, n, witness).passed)

    def test_L_from_lambda(self):
        for A, phi, eps, rng in random_instances(106):
            A = gentle(A, phi, eps / 2.0)
            witness = lambda_from_flatness(A, phi, eps, int(rng.integers(1, 4)), flat_radius(A, phi, eps / 2.0))
            cover, bounds = L_from_lambda(A, phi, witness, eps)
            self.assertEqual(cover.support, frozenset(ordered_pairs(A.domain.n)))
            self.assertTrue(check_L(difference_family(A), phi, cover, eps).passed)
            self.assertTrue(bounds.holds)

    def test_lambda_from_L(self):
        for A, phi, _, rng in random_instances(107):
            D = difference_family(A)
            cover = random_pair_cover(rng, A.domain.n)
            eps = check_L(D, phi, cover, 0.0).achieved
            n = int(rng.integers(1, 4))
            witness = lambda_from_L(A, phi, cover, eps, n)
            self.assertTrue(check_lambda(D, phi, eps, n, witness).passed)

    def test_flatness_from_net(self):
        for A, phi, eps, _ in random_instances(108):
            A = gentle(A, phi, eps / 2.0)
            delta = flatness_from_net(A, phi, family_net(A, eps / 2.0, "lip", phi), eps)
            self.assertGreaterEqual(delta, A.domain.min_gap)
            self.assertTrue(check_uniform_local_flatness(A, phi, delta, eps).passed)


if __name__ == '__main__':
    unittest.main()
