import json
import sys
import tempfile
import unittest
from pathlib import Path

from openpyxl import load_workbook

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

import main  # noqa: E402

TAG = "lipcert/1"


class CliTestCase(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)
        self.family = self.write("family.json", {
            "schema": TAG,
            "domain": {"vectors": [[0.0], [1.0], [2.0], [3.0]], "norm": "sup"},
            "members": [[0.0, 1.0, 2.0, 3.0], [0.0, 0.0, 0.0, 0.0]],
        })
        self.trivial = self.write("trivial.json", {"schema": TAG, "ambient": "points", "parts": [[0, 1, 2, 3]]})
        self.pairs = self.write("pairs.json", {
            "schema": TAG, "ambient": "pairs",
            "parts": [[[i, j] for i in range(4) for j in range(4) if i != j]],
        })

    def tearDown(self):
        self.tmp.cleanup()

    def write(self, name, doc):
        path = self.dir / name
        path.write_text(json.dumps(doc), encoding="utf-8")
        return str(path)

    def run_cli(self, *argv, out="report.json"):
        """Run the entry point and return (exit code, parsed report)"""
        report = self.dir / out
        code = main.main(["--config-dir", str(self.dir), "--out", str(report), *argv])
        return code, json.loads(report.read_text(encoding="utf-8"))


class TestValidate(CliTestCase):

    def test_valid_space(self):
        path = self.write("space.json", {"schema": TAG, "dist": [[0, 1], [1, 0]]})
        code, report = self.run_cli("validate", path)
        self.assertEqual(code, 0)
        self.assertEqual(report["schema"], TAG)
        self.assertEqual(report["exit_code"], 0)
        self.assertEqual(report["result"]["kind"], "space")
        self.assertEqual(report["result"]["points"], 2)
        self.assertIn("input", report["manifest"]["input_digests"])

    def test_triangle_violation(self):
        path = self.write("space.json", {"schema": TAG, "dist": [[0, 1, 3], [1, 0, 1], [3, 1, 0]]})
        code, report = self.run_cli("validate", path)
        self.assertEqual(code, 1)
        self.assertEqual(report["result"]["error"], "triangle")
        self.assertEqual(report["result"]["verdict"], "fail")

    def test_schema_errors(self):
        untagged = self.write("space.json", {"dist": [[0, 1], [1, 0]]})
        self.assertEqual(self.run_cli("validate", untagged)[0], 2)
        garbage = self.dir / "garbage.json"
        garbage.write_text("{not json", encoding="utf-8")
        code, report = self.run_cli("validate", str(garbage))
        self.assertEqual(code, 2)
        self.assertEqual(report["result"]["error"], "schema")

    def test_non_square_matrix_is_a_schema_error(self):
        path = self.write("space.json", {"schema": TAG, "dist": [[0, 1, 2], [1, 0, 1]]})
        code, report = self.run_cli("validate", path)
        self.assertEqual(code, 2)
        self.assertEqual(report["result"]["error"], "schema")

    def test_family_with_phi(self):
        path = self.write("holder.json", {
            "schema": TAG,
            "domain": {"dist": [[0, 1], [1, 0]]},
            "members": [[0.0, 1.0]],
            "phi": {"kind": "power", "alpha": 0.5},
        })
        code, report = self.run_cli("validate", path)
        self.assertEqual(code, 0)
        self.assertEqual(report["result"]["phi"]["verdict"], "pass")


class TestCheck(CliTestCase):

    def test_B_verdicts(self):
        code, report = self.run_cli("--eps", "3", "check", "B", self.family, "--cover", self.trivial)
        self.assertEqual(code, 0)
        self.assertEqual(report["result"]["verdict"], "pass")
        self.assertEqual(report["result"]["target"], "A")
        code, report = self.run_cli("--eps", "2", "check", "B", self.family, "--cover", self.trivial)
        self.assertEqual(code, 1)
        self.assertEqual(report["result"]["achieved"], 3.0)

    def test_difference_family(self):
        code, report = self.run_cli("--eps", "1", "check", "L", self.family, "--cover", self.pairs, "--difference")
        self.assertEqual(code, 0)
        self.assertEqual(report["result"]["target"], "A-A")

    def test_missing_inputs(self):
        code, report = self.run_cli("check", "lambda", self.family)
        self.assertEqual(code, 2)
        self.assertEqual(report["result"]["error"], "missing_witness")
        self.assertEqual(self.run_cli("check", "B", self.family)[0], 2)
        self.assertEqual(self.run_cli("check", "equicontinuity", self.family)[0], 2)
        self.assertEqual(self.run_cli("check", "B")[0], 2)

    def test_equinormed_subset(self):
        code, report = self.run_cli("--eps", "0", "check", "equinormed", self.family, "--Y", "3")
        self.assertEqual(code, 0)
        self.assertEqual(report["manifest"]["parameters"]["Y"], [3])


class TestSynthesize(CliTestCase):

    def test_lambda_from_L_artifact_validates(self):
        artifact = self.dir / "witness.json"
        code, report = self.run_cli("--eps", "0.1", "synthesize", "lambda-from-L", self.family,
                                    "--cover", self.pairs, "--n", "0.5", "--artifact", str(artifact))
        self.assertEqual(code, 0)
        self.assertEqual(report["result"]["verification"]["verdict"], "pass")
        self.assertEqual(report["result"]["artifact"]["delta"], 1.0)
        self.assertEqual(self.run_cli("validate", str(artifact), out="validate.json")[0], 0)

    def test_L_from_lambda_reports_bounds(self):
        witness = self.dir / "witness.json"
        self.run_cli("--eps", "0.1", "synthesize", "lambda-from-L", self.family,
                     "--cover", self.pairs, "--n", "0.5", "--artifact", str(witness))
        code, report = self.run_cli("--eps", "0.1", "synthesize", "L-from-lambda", self.family,
                                    "--witness", str(witness))
        self.assertEqual(code, 0)
        bounds = report["result"]["artifact"]["bounds"]
        self.assertEqual(bounds["M"], 4.0)
        self.assertTrue(bounds["holds"])
        self.assertLessEqual(bounds["actual_sup"], bounds["sup_bound"])

    def test_random_runs_are_byte_identical(self):
        argv = ["--seed", "5", "synthesize", "B", "--random", "6,3,2"]
        code, _ = self.run_cli(*argv)
        first = (self.dir / "report.json").read_bytes()
        self.run_cli(*argv)
        self.assertEqual(code, 0)
        self.assertEqual(first, (self.dir / "report.json").read_bytes())

    def test_precondition_failure(self):
        code, report = self.run_cli("--eps", "1", "synthesize", "DS", self.family, "--cover", self.trivial)
        self.assertEqual(code, 1)
        self.assertEqual(report["result"]["error"], "precondition_failed")


class TestOracleAndFixture(CliTestCase):

    def test_oracle_profile(self):
        space = self.write("space.json", {"schema": TAG, "vectors": [[0.0], [1.0], [2.0]]})
        xlsx = self.dir / "profile.xlsx"
        code, report = self.run_cli("oracle", space, "--eps-grid", "1", "--xlsx", str(xlsx))
        self.assertEqual(code, 0)
        self.assertEqual(report["result"]["covering_profile"]["exact_sizes"], [1])
        self.assertTrue(xlsx.exists())

    def test_oracle_min_oscillation(self):
        code, report = self.run_cli("oracle", "--family", self.family, "--eps-grid", "1,2",
                                    "--kind", "DS", "--parts", "2")
        self.assertEqual(code, 0)
        self.assertEqual(report["result"]["min_oscillation"]["value"], 1.0)

    def test_fixture(self):
        xlsx = self.dir / "riesz.xlsx"
        code, report = self.run_cli("fixture", "riesz", "p=3", "--xlsx", str(xlsx))
        self.assertEqual(code, 0)
        self.assertTrue(report["result"]["verified"])
        self.assertEqual(report["manifest"]["parameters"]["params"], {"p": 3})
        self.assertEqual(load_workbook(xlsx).sheetnames, ["claims", "distances"])

    def test_unknown_fixture(self):
        code, report = self.run_cli("fixture", "circle")
        self.assertEqual(code, 2)
        self.assertEqual(report["result"]["error"], "unknown_fixture")


if __name__ == '__main__':
    unittest.main()
