import json
import unittest

import numpy as np

from src.core.utils import Utils


class TestUtils(unittest.TestCase):

    def test_vector_norm(self):
        v = np.array([[3.0, -4.0], [0.0, 0.0]])
        np.testing.assert_allclose(Utils.vector_norm(v, "sup"), [4.0, 0.0])
        np.testing.assert_allclose(Utils.vector_norm(v, "euclid"), [5.0, 0.0])
        np.testing.assert_allclose(Utils.vector_norm(v, "l1"), [7.0, 0.0])
        with self.assertRaises(ValueError):
            Utils.vector_norm(v, "max")

    def test_group_rows_orders_by_first_occurrence(self):
        keys = np.array([[2], [1], [2], [3], [1]])
        self.assertEqual(Utils.group_rows(keys), [[0, 2], [1, 4], [3]])
        self.assertEqual(Utils.group_rows(np.zeros((0, 2))), [])

    def test_chebyshev_grid(self):
        grid = Utils.chebyshev_grid(2.0, 5)
        self.assertAlmostEqual(grid[0], 0.0)
        self.assertAlmostEqual(grid[-1], 2.0)
        self.assertTrue(np.all(np.diff(grid) > 0))

    def test_eps_grid(self):
        self.assertEqual(Utils.eps_grid(1.0, 3), [1.0, 0.5, 0.25, 0.125])

    def test_canonical_json_is_sorted_and_handles_numpy(self):
        text = Utils.canonical_json({"b": np.float64(1.5), "a": np.arange(2), "c": frozenset({2, 1})})
        self.assertEqual(text, '{"a":[0,1],"b":1.5,"c":[1,2]}')
        self.assertEqual(json.loads(Utils.canonical_json({"x": 1}, indent=2)), {"x": 1})

    def test_content_digest(self):
        self.assertEqual(Utils.content_digest("abc"), Utils.content_digest(b"abc"))
        self.assertEqual(len(Utils.content_digest("")), 64)

    def test_parse_number(self):
        self.assertEqual(Utils.parse_number("3"), 3)
        self.assertEqual(Utils.parse_number("0.5"), 0.5)
        self.assertEqual(Utils.parse_number("1/8"), 0.125)
        self.assertEqual(Utils.parse_number("0,1,2"), [0, 1, 2])
        self.assertEqual(Utils.parse_number("sup"), "sup")

    def test_parse_params(self):
        self.assertEqual(Utils.parse_params(["p=3", "h=1/8", "bad"]), {"p": 3, "h": 0.125})
        self.assertEqual(Utils.parse_params(None), {})


if __name__ == '__main__':
    unittest.main()
