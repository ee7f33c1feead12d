"""
Tests for the command line front-end and run configuration
"""

import json
import math
import os
import tempfile
import unittest
import sys
from pathlib import Path
from unittest import mock

import pandas as pd

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.analysts.base_analyst import AnalysisReport, relative_error, z_score
from src.capacity.errors import ConfigError
from src.orchestrator.orchestrator import exit_code
from src.orchestrator.run_config import RunConfig, grid_values, parse_grid, parse_pmf, parse_table
from src.run import main

TABLE = "1,S,0.6,1;2,S,0.4,2"


class TestInlineSyntax(unittest.TestCase):

    def test_parse_pmf(self):
        pmf = parse_pmf("1:0.5,2:0.5")
        self.assertEqual(pmf.probs, (0.0, 0.5, 0.5))
        self.assertEqual(parse_pmf({"1": 1.0}).K, 1)

    def test_parse_pmf_errors_name_the_key(self):
        for raw in ("1:0.5", "1-0.5", "x:1"):
            with self.assertRaises(ConfigError) as ctx:
                parse_pmf(raw)
            self.assertEqual(ctx.exception.key, "pmf")

    def test_parse_table(self):
        table = parse_table(TABLE)
        self.assertEqual(table.to_rows(), [(1, "S", 0.6, 1.0), (2, "S", 0.4, 2.0)])
        self.assertEqual(parse_table([[1, "S", 1.0, 3.0]]).K, 1)
        with self.assertRaises(ConfigError) as ctx:
            parse_table("1,S,0.6")
        self.assertEqual(ctx.exception.key, "table")

    def test_parse_grid(self):
        grid = parse_grid("1e-4,10,6,log", "theta_grid")
        self.assertTrue(grid["log"])
        values = grid_values(grid)
        self.assertEqual(len(values), 6)
        self.assertAlmostEqual(values[0], 1e-4, places=15)
        self.assertAlmostEqual(values[-1], 10.0, places=10)
        self.assertEqual(grid_values(parse_grid("0,1,3", "snr_grid")), [0.0, 0.5, 1.0])

    def test_parse_grid_errors(self):
        for raw in ("1,2", "0,1,5,log", "2,1,5"):
            with self.assertRaises(ConfigError):
                parse_grid(raw, "theta_grid")
        with self.assertRaises(ConfigError) as ctx:
            parse_grid({"min": 1, "max": 2, "points": 3, "step": 1}, "theta_grid")
        self.assertEqual(ctx.exception.key, "theta_grid.step")


class TestRunConfig(unittest.TestCase):

    def test_unknown_key(self):
        with self.assertRaises(ConfigError) as ctx:
            RunConfig.from_dict({"scheme": "cc", "sceme": "ir"})
        self.assertEqual(ctx.exception.key, "sceme")
        self.assertIn("sceme", str(ctx.exception))

    def test_theta_and_grid_are_exclusive(self):
        with self.assertRaises(ConfigError):
            RunConfig.from_dict({"theta": 1.0, "theta_grid": "1,2,3"})

    def test_type_errors(self):
        with self.assertRaises(ConfigError) as ctx:
            RunConfig.from_dict({"max_rounds": 2.5})
        self.assertEqual(ctx.exception.key, "max_rounds")
        with self.assertRaises(ConfigError) as ctx:
            RunConfig.from_dict({"fading": [{"m": 0.2}]})
        self.assertEqual(ctx.exception.key, "fading[0].m")
        with self.assertRaises(ConfigError):
            RunConfig.from_dict({"mode": "average"})

    def test_harq_config_defaults(self):
        run_config = RunConfig.from_dict({"scheme": "vr"})
        config = run_config.harq_config({"max_rounds": 5, "snr_db": 20.0, "packet_bits": 1080})
        self.assertEqual(config.rates, (4.0, 3.0, 3.0, 2.0, 2.0))
        self.assertEqual(config.snr_db, 20.0)

        xp = RunConfig.from_dict({"scheme": "xp", "max_rounds": 2}).harq_config({"rate": 3.0})
        self.assertEqual(xp.rates, (3.0, 0.0))

    def test_harq_config_errors_name_the_field(self):
        cases = [
            ({"scheme": "vr", "max_rounds": 3, "rates": [4.0, 3.0]}, "rates"),
            ({"scheme": "cc", "max_rounds": 3, "fading": [{"m": 1.0}, {"m": 2.0}]}, "fading"),
            ({"scheme": "ir", "rates": [4.0], "packet_bits": 1000, "symbols_per_round": 300}, "packet_bits"),
        ]
        for data, key in cases:
            with self.assertRaises(ConfigError) as ctx:
                RunConfig.from_dict(data).harq_config({})
            self.assertEqual(ctx.exception.key, key)

    def test_overrides_win_over_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "run.json"
            path.write_text(json.dumps({"scheme": "cc", "theta_grid": {"min": 1, "max": 2, "points": 2}}))
            run_config = RunConfig.from_file(str(path), {"theta": 0.5, "scheme": None})
        self.assertEqual(run_config.scheme, "cc")
        self.assertEqual(run_config.theta, 0.5)
        self.assertIsNone(run_config.theta_grid)


class TestHelpers(unittest.TestCase):

    def test_relative_error(self):
        self.assertEqual(relative_error(1.5, 1.0), 0.5)
        self.assertEqual(relative_error(0.25, 0.0), 0.25)

    def test_z_score(self):
        self.assertAlmostEqual(z_score(1.2, 1.0, 0.1), 2.0, places=12)
        self.assertEqual(z_score(1.0, 1.0, 0.0), 0.0)
        self.assertEqual(z_score(0.5, 1.0, 0.0), -math.inf)

    def test_exit_code(self):
        self.assertEqual(exit_code(AnalysisReport(rows=[])), 0)
        self.assertEqual(exit_code(AnalysisReport(rows=[], checks_passed=False), strict=True), 3)
        noisy = AnalysisReport(rows=[], high_variance=True)
        self.assertEqual(exit_code(noisy), 0)
        self.assertEqual(exit_code(noisy, strict=True), 4)


class TestMain(unittest.TestCase):
    """End-to-end runs through main(); rows go to a temporary file"""

    def setUp(self):
        patcher = mock.patch.dict(os.environ, {"EC_LOG_DIR": "", "EC_LOG_LEVEL": "WARNING"})
        patcher.start()
        self.addCleanup(patcher.stop)
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def output(self, name: str) -> str:
        return str(Path(self.tmp.name) / name)

    def run_main(self, *argv) -> int:
        return main(list(argv))

    def test_constant_point_mass(self):
        out = self.output("constant.csv")
        code = self.run_main("constant", "--pmf", "1:1", "--reward", "3", "--theta", "0.5", "--output", out)
        self.assertEqual(code, 0)
        frame = pd.read_csv(out)
        self.assertEqual(list(frame.columns), ["theta", "zeta", "capacity", "lower", "upper", "approx", "ltat"])
        self.assertAlmostEqual(frame["capacity"].iloc[0], 3.0, places=9)

    def test_constant_theta_grid_is_monotone(self):
        out = self.output("sweep.csv")
        code = self.run_main(
            "constant", "--scheme", "cc", "--theta-grid", "1e-4,10,20,log", "--output", out
        )
        self.assertEqual(code, 0)
        capacity = pd.read_csv(out)["capacity"].to_numpy()
        self.assertEqual(len(capacity), 20)
        self.assertTrue(all(b <= a + 1e-9 for a, b in zip(capacity, capacity[1:])))

    def test_bad_pmf_exits_2(self):
        out = self.output("bad.csv")
        code = self.run_main("constant", "--pmf", "1:0.5", "--reward", "1", "--theta", "1", "--output", out)
        self.assertEqual(code, 2)
        self.assertFalse(Path(out).exists())

    def test_unknown_run_config_key_exits_2(self):
        path = Path(self.tmp.name) / "run.json"
        path.write_text(json.dumps({"theta": 1.0, "bogus": 1}))
        code = self.run_main("constant", "--run-config", str(path), "--output", self.output("x.csv"))
        self.assertEqual(code, 2)

    def test_theta_flags_are_exclusive(self):
        with mock.patch("sys.stderr"), self.assertRaises(SystemExit) as ctx:
            self.run_main("constant", "--theta", "1", "--theta-grid", "1,2,3")
        self.assertEqual(ctx.exception.code, 2)

    def test_harq_max_arrival_floor(self):
        out = self.output("harq.csv")
        code = self.run_main("harq", "--mode", "max-arrival", "--theta", "1e4", "--output", out)
        self.assertEqual(code, 0)
        row = pd.read_csv(out).iloc[0]
        self.assertGreaterEqual(row["capacity"], 0.8)
        self.assertLess(row["capacity"], 0.81)

    def test_finite_enumeration_check(self):
        out = self.output("finite.csv")
        code = self.run_main(
            "finite", "--table", TABLE, "--theta", "1", "--t-max", "12", "--check", "enumeration", "--output", out
        )
        self.assertEqual(code, 0)
        frame = pd.read_csv(out)
        self.assertEqual(len(frame), 13)
        self.assertLess(frame["rel_err_enumeration"].max(), 1e-12)

    def test_json_format(self):
        out = self.output("constant.json")
        code = self.run_main(
            "constant", "--pmf", "1:0.5,2:0.5", "--reward", "1", "--theta", "1", "--format", "json", "--output", out
        )
        self.assertEqual(code, 0)
        with open(out, encoding="utf-8") as f:
            rows = json.load(f)
        zeta = (-1.0 + math.sqrt(1.0 + 8.0 * math.e)) / 2.0
        self.assertEqual(len(rows), 1)
        self.assertAlmostEqual(rows[0]["capacity"], math.log(zeta), places=9)

    def test_mc_rerun_is_byte_identical(self):
        outputs = []
        for workers in ("1", "3"):
            out = self.output(f"mc_{workers}.csv")
            code = self.run_main(
                "mc", "--table", TABLE, "--theta", "0.3", "--t", "10",
                "--samples", "10000", "--seed", "7", "--workers", workers, "--output", out,
            )
            self.assertEqual(code, 0)
            outputs.append(Path(out).read_bytes())
        self.assertEqual(outputs[0], outputs[1])

    def test_mc_outage_strict_variance(self):
        args = ["mc", "--scheme", "cc", "--snr-db", "0", "--rates", "1", "--samples", "2000", "--seed", "3"]
        self.assertEqual(self.run_main(*args, "--output", self.output("loose.csv")), 0)
        self.assertEqual(self.run_main(*args, "--strict", "--output", self.output("strict.csv")), 4)

        frame = pd.read_csv(self.output("loose.csv"))
        self.assertEqual(list(frame["k"]), [1, 2, 3, 4, 5])
        self.assertTrue((frame["p_closed"] > 0.0).all())


if __name__ == '__main__':
    unittest.main()
