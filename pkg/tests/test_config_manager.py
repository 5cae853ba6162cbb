import json
import tempfile
import unittest
from pathlib import Path

from src.core.config_manager import ConfigManager


class TestConfigManager(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.config_manager = ConfigManager(Path(self.tmp.name))

    def tearDown(self):
        self.tmp.cleanup()

    def test_get_default_config(self):
        default_config = self.config_manager.get_default_config()
        self.assertEqual(default_config["tolerance"], 1e-9)
        self.assertEqual(default_config["seed"], 0)
        self.assertIn("oracle", default_config)
        self.assertEqual(default_config["report"]["schema"], "lipcert/1")
        self.assertEqual(default_config["random_instance"]["norm"], "sup")

    def test_get_available_configs(self):
        self.config_manager.save_config("strict", {"tolerance": 1e-12})
        available_configs = self.config_manager.get_available_configs()
        self.assertEqual(available_configs[0], "Default")
        self.assertIn("strict", available_configs)

    def test_load_config_without_file_returns_defaults(self):
        config = self.config_manager.load_config("Default")
        self.assertEqual(config, self.config_manager.get_default_config())

    def test_load_config_merges_nested_sections(self):
        path = self.config_manager.get_config_file_path("desk")
        path.write_text(json.dumps({"tolerance": 1e-6, "oracle": {"max_parts": 2}}))
        config = self.config_manager.load_config("desk")
        self.assertEqual(config["tolerance"], 1e-6)
        self.assertEqual(config["oracle"]["max_parts"], 2)
        self.assertEqual(config["oracle"]["max_ambient"], 8)

    def test_load_config_with_broken_file_falls_back(self):
        self.config_manager.get_config_file_path("Default").write_text("{not json")
        config = self.config_manager.load_config("Default")
        self.assertEqual(config["default_eps"], 0.5)

    def test_invalid_values_fall_back_to_defaults(self):
        path = self.config_manager.get_config_file_path("bad")
        path.write_text(json.dumps({"tolerance": -1.0, "oracle": {"max_parts": 0}}))
        with self.assertLogs(level="WARNING") as logs:
            config = self.config_manager.load_config("bad")
        self.assertEqual(config, self.config_manager.get_default_config())
        self.assertTrue(any("oracle.max_parts" in line for line in logs.output))

    def test_validate_config(self):
        self.assertEqual(self.config_manager.validate_config(self.config_manager.get_default_config()), [])
        problems = self.config_manager.validate_config({"log_level": "LOUD"})
        self.assertEqual(len(problems), 1)
        self.assertTrue(problems[0].startswith("log_level"))

    def test_default_config_lives_in_base_dir(self):
        self.assertEqual(self.config_manager.get_config_file_path("Default").name, "lipcert_config.json")
        self.assertEqual(self.config_manager.get_config_file_path("x").parent.name, "configurations")

    def test_save_config(self):
        success = self.config_manager.save_config("test_config", self.config_manager.get_default_config())
        self.assertTrue(success)
        self.assertEqual(self.config_manager.load_config("test_config")["seed"], 0)

    def test_delete_config(self):
        config_name = "test_config"
        self.config_manager.save_config(config_name, self.config_manager.get_default_config())
        self.assertTrue(self.config_manager.delete_config(config_name))
        self.assertNotIn(config_name, self.config_manager.get_available_configs())
        self.assertFalse(self.config_manager.delete_config("Default"))

    def test_shipped_profiles_load(self):
        repo = ConfigManager(Path(__file__).resolve().parent.parent)
        self.assertEqual(repo.load_config("strict")["tolerance"], 1e-12)
        self.assertLess(repo.load_config("desk")["oracle"]["max_parts"], 4)


if __name__ == '__main__':
    unittest.main()
