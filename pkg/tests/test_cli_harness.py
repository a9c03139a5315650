#!/usr/bin/env python3
"""
実行基盤のテスト

- 設定ファイルの読み込みと上書き
- ログ（JSON 構造化ログとローテーション設定）
- 表の CSV / JSON 出力
- 手法実行（例外の status への変換）
- パラメータスイープ（格子順と並列実行の決定性）
- 検証スイート
- コマンドラインの終了コード
"""

import io
import json
import logging
import os
import tempfile
import unittest
from pathlib import Path

import numpy as np
import pandas as pd

from src.app.cli import cmd_dist, cmd_spectrum, cmd_sweep, cmd_validate, main
from src.models.params import ModelParams
from src.utils.config import AppConfig, ConfigManager, reload_config
from src.utils.constants import (
    EXIT_OK,
    EXIT_POINT_FAILURES,
    EXIT_USAGE_ERROR,
    EXIT_VALIDATION_FAILURE,
    PRESETS,
    STATUS_VOCABULARY,
)
from src.utils.csv_utils import PROGRAM_NAME, format_table, read_table, write_table
from src.utils.logger import (
    ColoredFormatter,
    LoggerManager,
    RunContextFilter,
    StructuredFormatter,
    log_extra_fields,
    run_context,
)
from src.utils.method_executor import MethodExecutor
from src.utils.sweep import SweepAxis, SweepGrid, _evaluate_point, records_to_frame, run_sweep
from src.utils.validation_suite import run_validation


class TestConfig(unittest.TestCase):
    """設定管理のテスト"""

    def setUp(self):
        """一時ディレクトリの準備"""
        self.tmpdir = tempfile.TemporaryDirectory()
        self.path = Path(self.tmpdir.name) / "run.conf"

    def tearDown(self):
        """後片付け"""
        self.tmpdir.cleanup()
        reload_config()

    def test_defaults(self):
        """既定値"""
        config = AppConfig()
        self.assertEqual(config.log_level, "WARNING")
        self.assertEqual(config.dimension_cap, 20000)
        self.assertEqual(config.output_format, "csv")
        self.assertEqual(config.float_format, "%.16e")
        self.assertEqual(config.root_config().max_iter, config.max_iter)

    def test_file_and_overrides(self):
        """設定ファイル < 上書き値"""
        self.path.write_text("# 実行設定\njobs = 2\nlog_level = INFO  # 詳細\nM = 6\nT = 0.3\n", encoding="utf-8")
        config = ConfigManager().load_config(self.path, {"M": 7, "T": None})
        self.assertEqual(config.jobs, 2)
        self.assertEqual(config.log_level, "INFO")
        self.assertEqual(config.M, 7)
        self.assertAlmostEqual(config.T, 0.3)

    def test_unknown_key(self):
        """未知のキー"""
        self.path.write_text("colour = blue\n", encoding="utf-8")
        with self.assertRaises(ValueError) as ctx:
            ConfigManager().load_config(self.path)
        self.assertIn("colour", str(ctx.exception))

    def test_invalid_values(self):
        """不正な値はまとめて報告"""
        with self.assertRaises(ValueError) as ctx:
            ConfigManager().load_config(overrides={"jobs": 0, "output_format": "xml", "rel_tol": 1e-20})
        message = str(ctx.exception)
        self.assertIn("jobs", message)
        self.assertIn("output_format", message)
        self.assertIn("rel_tol", message)

    def test_malformed_line(self):
        """key = value 形式でない行"""
        self.path.write_text("jobs 2\n", encoding="utf-8")
        with self.assertRaises(ValueError):
            ConfigManager().load_config(self.path)

    def test_missing_file(self):
        """存在しない設定ファイル"""
        with self.assertRaises(ValueError):
            ConfigManager().load_config(Path(self.tmpdir.name) / "none.conf")

    def test_type_conversion(self):
        """文字列の型変換"""
        self.path.write_text("debug_mode = yes\ndimension_cap = 500\nlog_file = logs/run.log\n", encoding="utf-8")
        config = ConfigManager().load_config(self.path)
        self.assertTrue(config.debug_mode)
        self.assertEqual(config.dimension_cap, 500)
        self.assertEqual(config.log_file, Path("logs/run.log"))


class TestLogging(unittest.TestCase):
    """ログ機能のテスト"""

    def test_structured_formatter(self):
        """JSON 1行に追加フィールドを含める"""
        record = logging.makeLogRecord(
            {"name": "ring", "levelname": "INFO", "levelno": logging.INFO, "msg": "完了", "fields": {"points": 4}}
        )
        entry = json.loads(StructuredFormatter().format(record))
        self.assertEqual(entry["message"], "完了")
        self.assertEqual(entry["level"], "INFO")
        self.assertEqual(entry["fields"], {"points": 4})

    def test_file_handler_and_extra_fields(self):
        """ログファイルへ JSON で出力"""
        root = logging.getLogger()
        saved_handlers, saved_level = root.handlers[:], root.level
        with tempfile.TemporaryDirectory() as tmp:
            log_file = Path(tmp) / "logs" / "run.log"
            manager = LoggerManager()
            manager.setup_logging(config=AppConfig(log_level="INFO", log_file=log_file))
            try:
                log_extra_fields(logging.getLogger("ring.test"), logging.INFO, "スイープ完了", rows=8)
                for handler in root.handlers:
                    handler.flush()
                lines = log_file.read_text(encoding="utf-8").splitlines()
                entries = [json.loads(line) for line in lines]
                self.assertTrue(any(e.get("fields") == {"rows": 8} for e in entries))
            finally:
                for handler in root.handlers[:]:
                    handler.close()
                    root.removeHandler(handler)
                for handler in saved_handlers:
                    root.addHandler(handler)
                root.setLevel(saved_level)

    def test_parse_size(self):
        """サイズ文字列の変換"""
        manager = LoggerManager()
        self.assertEqual(manager._parse_size("10MB"), 10 * 1024 * 1024)
        self.assertEqual(manager._parse_size("512kb"), 512 * 1024)
        self.assertEqual(manager._parse_size("2048"), 2048)
        with self.assertRaises(ValueError):
            manager._parse_size("10 bytes")
        with self.assertRaises(ValueError):
            ConfigManager().load_config(overrides={"log_max_size": "huge"})

    def test_run_context(self):
        """実行中のサブコマンド名を JSON の context に含める"""
        record = logging.makeLogRecord({"name": "ring", "levelname": "INFO", "levelno": logging.INFO, "msg": "開始"})
        run_context["command"] = "sweep"
        try:
            self.assertTrue(RunContextFilter().filter(record))
        finally:
            run_context.clear()
        entry = json.loads(StructuredFormatter().format(record))
        self.assertEqual(entry["context"], {"command": "sweep"})

    def test_colored_formatter(self):
        """debug_mode のレベル名は色付け"""
        record = logging.makeLogRecord({"name": "ring", "levelname": "ERROR", "levelno": logging.ERROR, "msg": "失敗"})
        text = ColoredFormatter("%(levelname)s %(message)s").format(record)
        self.assertEqual(text, "\033[31mERROR\033[0m 失敗")


class TestTableOutput(unittest.TestCase):
    """表出力のテスト"""

    def setUp(self):
        """テストデータの準備"""
        self.df = pd.DataFrame({"rank": [0, 1], "energy": [-1.5, np.nan], "label": ["a", "b"]})

    def test_csv_header_and_format(self):
        """コメント行、LF、17有効桁"""
        text = format_table(self.df, {"M": 6, "T": 0.3})
        lines = text.split("\n")
        self.assertTrue(lines[0].startswith(f"# {PROGRAM_NAME} "))
        self.assertEqual(lines[1], "# M: 6")
        self.assertEqual(lines[2], "# T: 2.9999999999999999e-01")
        self.assertEqual(lines[3], "rank,energy,label")
        self.assertEqual(lines[4], "0,-1.5000000000000000e+00,a")
        self.assertNotIn("\r", text)
        self.assertEqual(text, format_table(self.df, {"M": 6, "T": 0.3}))

    def test_json_nan_is_null(self):
        """JSON では NaN を null に"""
        document = json.loads(format_table(self.df, {"M": 6}, fmt="json"))
        self.assertEqual(document["meta"]["program"], PROGRAM_NAME)
        self.assertIsNone(document["rows"][1]["energy"])
        self.assertEqual(document["rows"][0]["label"], "a")

    def test_write_and_read_back(self):
        """書き出した CSV を読み戻す"""
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "out" / "table.csv"
            write_table(self.df, {"command": "spectrum"}, out=path)
            df, meta = read_table(path, required_columns=["rank", "energy"])
        self.assertEqual(meta["command"], "spectrum")
        self.assertEqual(df["rank"].tolist(), [0, 1])
        with self.assertRaises(ValueError):
            read_table(io.StringIO(format_table(self.df)), required_columns=["missing"])

    def test_unknown_format(self):
        """未対応の出力形式"""
        with self.assertRaises(ValueError):
            format_table(self.df, fmt="xml")


class TestMethodExecutor(unittest.TestCase):
    """手法実行のテスト"""

    def test_ok_outcomes(self):
        """3手法の基底エネルギーと一粒子量"""
        params = ModelParams(**PRESETS["sf-levels"])
        executor = MethodExecutor(params)
        for method in ("exact", "si", "sf"):
            outcome = executor.gs_energy(method)
            self.assertTrue(outcome.ok, outcome.message)
            self.assertLess(outcome.values["energy"], 0)
        self.assertIn("mu_0", executor.sp_energies("si").values)
        self.assertIn("eta_1", executor.sp_energies("sf").values)
        self.assertEqual(len(executor.sp_energies("exact").values), 6)

    def test_errors_become_status(self):
        """ソルバー例外は status に変換"""
        params = ModelParams(**PRESETS["si-localized"])
        outcome = MethodExecutor(params, AppConfig(dimension_cap=100)).gs_energy("exact")
        self.assertFalse(outcome.ok)
        self.assertEqual(outcome.status, "dimension_cap")
        self.assertIn(outcome.status, STATUS_VOCABULARY)

        unstable = ModelParams(M=12, N=12, T=0.01, U=1.0, V0=0.0)
        self.assertEqual(MethodExecutor(unstable).levels("sf", 3).status, "invalid_regime")

    def test_unknown_method_and_observable(self):
        """未対応の手法・観測量"""
        executor = MethodExecutor(ModelParams(**PRESETS["sf-levels"]))
        with self.assertRaises(ValueError):
            executor.gs_energy("dmrg")
        with self.assertRaises(ValueError):
            executor.run("si", "entropy")

    def test_validity_flags(self):
        """run() は成功した近似手法に妥当性フラグを付ける"""
        executor = MethodExecutor(ModelParams(**PRESETS["sf-levels"]))
        si = executor.run("si", "gs_energy")
        self.assertEqual(set(si.values), {"energy", "lambda0_dominant", "justified", "reasons"})
        self.assertIs(si.values["justified"], True)
        sf = executor.run("sf", "levels", 2)
        self.assertIn("nu_margin", sf.values)
        self.assertIn("large_t_first", sf.values)
        self.assertEqual(set(executor.run("exact", "gs_energy").values), {"energy"})

        pure_hopping = MethodExecutor(ModelParams(M=4, N=2, T=1.0, U=0.0, V0=0.0))
        self.assertEqual(pure_hopping.validity("si")["reasons"], "w=0;U=0;V0=0")

    def test_exact_levels_have_clusters(self):
        """厳密準位は近縮退クラスター番号を持つ"""
        outcome = MethodExecutor(ModelParams(**PRESETS["si-levels"])).levels("exact", 4)
        self.assertEqual([row["rank"] for row in outcome.rows], [0, 1, 2, 3])
        self.assertEqual(outcome.rows[0]["cluster"], 0)
        self.assertEqual(set(outcome.values), {"E_0", "E_1", "E_2", "E_3"})


class TestSweep(unittest.TestCase):
    """パラメータスイープのテスト"""

    def setUp(self):
        """テストデータの準備"""
        self.fixed = dict(PRESETS["si-levels"])

    def test_axis_parsing(self):
        """name:min:max:steps"""
        axis = SweepAxis.parse("v:0.5:2.0:4")
        np.testing.assert_allclose(axis.values(), [0.5, 1.0, 1.5, 2.0])
        np.testing.assert_allclose(SweepAxis.parse("tau:0.2:0.4:1").values(), [0.2])
        for text in ("v:0.5:2.0", "mass:0:1:2", "v:2:1:3", "v:0:1:0"):
            with self.assertRaises(ValueError):
                SweepAxis.parse(text)

    def test_grid_order(self):
        """軸1が外側のループ"""
        grid = SweepGrid(SweepAxis("tau", 0.1, 0.2, 2), SweepAxis("v", 0.5, 1.0, 3), self.fixed)
        indices = [index for index, _ in grid.points()]
        self.assertEqual(indices, [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2)])
        params = grid.point_params({"tau": 0.2, "v": 1.0})
        self.assertAlmostEqual(params.T, 0.2 * 0.3)
        self.assertAlmostEqual(params.V0, 0.3)
        with self.assertRaises(ValueError):
            SweepGrid(SweepAxis("v", 0.5, 1.0, 2), SweepAxis("v", 0.1, 0.2, 2), self.fixed)

    def test_sweep_rows_and_rel_error(self):
        """格子順の行と厳密解に対する相対誤差"""
        grid = SweepGrid(SweepAxis("v", 1.0, 2.0, 2), None, self.fixed)
        records = run_sweep(grid, ["si", "exact"], "gs_energy")
        df = records_to_frame(records)
        self.assertEqual(df["method"].tolist(), ["si", "exact", "si", "exact"])
        self.assertEqual(df.columns[-1], "rel_error")
        self.assertTrue((df["status"] == "ok").all())
        si_errors = df.loc[df["method"] == "si", "rel_error"]
        self.assertTrue((si_errors < 0.02).all())
        self.assertTrue(df.loc[df["method"] == "exact", "rel_error"].isna().all())

    def test_failures_become_status(self):
        """失敗した格子点は行の status に記録"""
        grid = SweepGrid(SweepAxis("U", 0.0, 1.0, 2), None, {"M": 12, "N": 12, "T": 0.01, "V0": 0.0})
        records = run_sweep(grid, ["sf"], "gs_energy")
        self.assertEqual([r.status for r in records], ["ok", "invalid_regime"])
        self.assertTrue(np.isnan(records_to_frame(records)["energy"].iloc[1]))

        task = ((0,), {"T": -1.0}, grid, ["si"], "gs_energy", 1, AppConfig())
        self.assertEqual(_evaluate_point(task)[0].status, "invalid_regime")

    def test_validity_and_regime_columns(self):
        """妥当性フラグとセパラトリクスの側を行に出力"""
        grid = SweepGrid(SweepAxis("tau", 1.0, 1.0, 1), None, dict(PRESETS["sf-levels"]))
        df = records_to_frame(run_sweep(grid, ["si", "sf", "exact"], "gs_energy"))
        self.assertTrue((df["status"] == "ok").all())
        self.assertEqual(df.columns[-1], "rel_error")
        rows = {row["method"]: row for _, row in df.iterrows()}
        self.assertTrue(rows["si"]["lambda0_dominant"])
        self.assertTrue(rows["si"]["justified"])
        self.assertEqual(rows["si"]["reasons"], "")
        self.assertGreater(rows["sf"]["nu_margin"], 0)
        self.assertGreater(rows["sf"]["eta_margin_minus"], 0)
        self.assertTrue(pd.isna(rows["exact"]["nu_margin"]))
        self.assertEqual(df["side_of_separatrix"].tolist(), ["superfluid"] * 3)

        soliton = SweepGrid(SweepAxis("v", 1.0, 2.0, 2), None, self.fixed)
        sides = records_to_frame(run_sweep(soliton, ["si"], "gs_energy"))["side_of_separatrix"]
        self.assertEqual(sides.tolist(), ["soliton", "soliton"])

    def test_regime_column_needs_interaction(self):
        """U·N = 0 の点ではセパラトリクスの側を出力しない"""
        grid = SweepGrid(SweepAxis("U", 0.0, 1.0, 2), None, {"M": 6, "N": 6, "T": 0.3, "V0": 0.05})
        records = run_sweep(grid, ["exact"], "gs_energy")
        self.assertNotIn("side_of_separatrix", records[0].outputs)
        self.assertIn(records[1].outputs["side_of_separatrix"], ("superfluid", "soliton", "boundary"))

    def test_sp_energies_rel_error(self):
        """sp_energies でも厳密な一体固有値に対する誤差を出力"""
        grid = SweepGrid(SweepAxis("v", 1.0, 2.0, 2), None, self.fixed)
        df = records_to_frame(run_sweep(grid, ["si", "exact"], "sp_energies"))
        self.assertEqual(df.columns[-1], "rel_error")
        si_errors = df.loc[df["method"] == "si", "rel_error"]
        self.assertEqual(len(si_errors), 2)
        self.assertTrue((si_errors < 1e-9).all())
        self.assertTrue(df.loc[df["method"] == "exact", "rel_error"].isna().all())

        # ν, θ, η は一体固有値と対応しないので誤差なし
        sf_grid = SweepGrid(SweepAxis("tau", 1.0, 1.0, 1), None, dict(PRESETS["sf-levels"]))
        records = run_sweep(sf_grid, ["sf", "exact"], "sp_energies")
        self.assertEqual(records[0].status, "ok")
        self.assertIsNone(records[0].rel_error)

    def test_parallel_is_deterministic(self):
        """並列数によらず同一のバイト列"""
        grid = SweepGrid(SweepAxis("tau", 0.5, 1.5, 3), SweepAxis("v", 0.0, 0.2, 2), dict(PRESETS["sf-levels"]))
        serial = format_table(records_to_frame(run_sweep(grid, ["sf", "si"], "levels", 3, jobs=1)))
        parallel = format_table(records_to_frame(run_sweep(grid, ["sf", "si"], "levels", 3, jobs=2)))
        self.assertEqual(serial, parallel)


class TestValidationSuite(unittest.TestCase):
    """検証スイートのテスト"""

    def test_passes(self):
        """既定の検査はすべて合格"""
        report = run_validation(draws=5, seed=1)
        self.assertTrue(report.passed, [c.name for c in report.checks if not c.passed])
        names = {check.name for check in report.checks}
        self.assertIn("bdg_oracle", names)
        self.assertIn("minimal_lattice", names)
        json.dumps(report.as_dict(), default=float)

    def test_detects_mutated_nu(self):
        """ν を2倍にすると BdG オラクル検査が不合格"""
        report = run_validation(draws=5, seed=1, nu_hook=lambda nu: 2.0 * nu)
        self.assertFalse(report.passed)
        failed = [check.name for check in report.checks if not check.passed]
        self.assertEqual(failed, ["bdg_oracle"])


class TestCommandLine(unittest.TestCase):
    """コマンドラインのテスト"""

    def setUp(self):
        """一時ディレクトリの準備"""
        self.tmpdir = tempfile.TemporaryDirectory()
        self.out = os.path.join(self.tmpdir.name, "out.csv")

    def tearDown(self):
        """後片付け"""
        self.tmpdir.cleanup()
        reload_config()

    def test_spectrum(self):
        """spectrum サブコマンド"""
        code = main(["spectrum", "--preset", "sf-levels", "--method", "sf", "--count", "3", "--out", self.out])
        self.assertEqual(code, EXIT_OK)
        df, meta = read_table(self.out, required_columns=["method", "rank", "energy", "label", "status"])
        self.assertEqual(len(df), 3)
        self.assertEqual(meta["command"], "spectrum")
        self.assertTrue(df["ground"].iloc[0])

    def test_spectrum_json(self):
        """JSON 出力"""
        code = main(["spectrum", "--preset", "si-levels", "--method", "si", "--format", "json", "--out", self.out])
        self.assertEqual(code, EXIT_OK)
        with open(self.out, encoding="utf-8") as handle:
            document = json.load(handle)
        self.assertEqual(len(document["rows"]), 5)
        self.assertEqual(document["meta"]["method"], "si")

    def test_usage_errors(self):
        """使い方の誤りは終了コード2"""
        self.assertEqual(main(["spectrum", "--method", "dmrg"]), EXIT_USAGE_ERROR)
        self.assertEqual(main(["spectrum", "--M", "6"]), EXIT_USAGE_ERROR)
        self.assertEqual(main(["sweep", "--preset", "si-levels", "--axis1", "mass:0:1:2"]), EXIT_USAGE_ERROR)
        self.assertEqual(main([]), EXIT_USAGE_ERROR)

    def test_strict_point_failures(self):
        """--strict では失敗した点があれば終了コード3"""
        args = ["spectrum", "--M", "12", "--N", "12", "--T", "0.01", "--U", "1", "--V0", "0", "--method", "sf"]
        self.assertEqual(main(args + ["--out", self.out]), EXIT_OK)
        df, _ = read_table(self.out)
        self.assertEqual(df["status"].iloc[0], "invalid_regime")
        self.assertEqual(main(args + ["--out", self.out, "--strict"]), EXIT_POINT_FAILURES)

    def test_dimension_cap_flag(self):
        """--dimension-cap を超える厳密対角化"""
        args = ["spectrum", "--preset", "si-localized", "--dimension-cap", "100", "--strict", "--out", self.out]
        self.assertEqual(main(args), EXIT_POINT_FAILURES)

    def test_dist(self):
        """dist サブコマンドと合計行"""
        code = main(["dist", "--preset", "sf-levels", "--methods", "exact,sf", "--out", self.out])
        self.assertEqual(code, EXIT_OK)
        df, meta = read_table(self.out)
        total = df[df["j"] == "sum"]
        self.assertAlmostEqual(float(total["n_exact"].iloc[0]), 6.0, places=9)
        self.assertAlmostEqual(float(total["m_sf"].iloc[0]), 6.0, places=9)
        self.assertEqual(meta["status_sf"], "ok")

    def test_dist_without_bound_state(self):
        """束縛状態がない SI は singular として記録し、他の手法は出力"""
        args = ["dist", "--M", "4", "--N", "2", "--T", "1", "--U", "0", "--V0", "0", "--methods", "si,exact"]
        self.assertEqual(main(args + ["--out", self.out]), EXIT_OK)
        df, meta = read_table(self.out)
        self.assertEqual(meta["status_si"], "singular")
        self.assertEqual(meta["status_exact"], "ok")
        n_exact = df["n_exact"].astype(float).to_numpy()
        self.assertTrue(np.all(np.isfinite(n_exact)))
        np.testing.assert_allclose(n_exact[:4], 0.5, atol=1e-9)
        self.assertTrue(df["n_si"].isna().all())
        self.assertEqual(main(args + ["--out", self.out, "--strict"]), EXIT_POINT_FAILURES)

    def test_method_alias(self):
        """--method は --methods の別名"""
        path = os.path.join(self.tmpdir.name, "alias.csv")
        self.assertEqual(main(["dist", "--preset", "sf-levels", "--method", "sf", "--out", path]), EXIT_OK)
        _, meta = read_table(path)
        self.assertEqual(meta["status_sf"], "ok")
        args = ["sweep", "--preset", "si-levels", "--axis1", "v:1.0:2.0:2", "--method", "si,exact", "--out", path]
        self.assertEqual(main(args), EXIT_OK)
        df, _ = read_table(path)
        self.assertEqual(df["method"].tolist(), ["si", "exact", "si", "exact"])

    def test_cmd_helpers(self):
        """コマンド関数は DataFrame を返す"""
        params = ModelParams(**PRESETS["si-levels"])
        df = cmd_spectrum(params, "exact", 3, AppConfig())
        self.assertEqual(df["cluster"].iloc[0], 0)
        dist, statuses = cmd_dist(params, ["si"], AppConfig())
        self.assertEqual(statuses, {"status_si": "ok"})
        self.assertEqual(len(dist), 7)

        grid = SweepGrid(SweepAxis("v", 1.0, 2.0, 2), None, {"M": 6, "N": 6, "U": 0.05, "T": 0.05})
        table, meta, failed = cmd_sweep(grid, ["si"], "gs_energy", 1, AppConfig())
        self.assertFalse(failed)
        self.assertEqual(meta["axes"], ["v:1.0:2.0:2"])
        self.assertEqual(table["method"].tolist(), ["si", "si"])

        text, passed = cmd_validate(AppConfig(), draws=2, seed=3)
        self.assertTrue(passed)
        self.assertTrue(json.loads(text)["passed"])

    def test_sweep_determinism_across_jobs(self):
        """--jobs 1 と --jobs 2 でバイト一致"""
        outputs = []
        for jobs in ("1", "2"):
            path = os.path.join(self.tmpdir.name, f"sweep_{jobs}.csv")
            args = ["sweep", "--preset", "si-levels", "--axis1", "v:0.5:2.0:4", "--methods", "si,exact", "--jobs", jobs]
            self.assertEqual(main(args + ["--out", path]), EXIT_OK)
            outputs.append(Path(path).read_bytes())
        self.assertEqual(outputs[0], outputs[1])
        df, _ = read_table(io.StringIO(outputs[0].decode("utf-8")), required_columns=["i1", "v", "method", "rel_error"])
        self.assertEqual(len(df), 8)

    def test_validate(self):
        """validate サブコマンドの JSON レポート"""
        path = os.path.join(self.tmpdir.name, "report.json")
        self.assertEqual(main(["validate", "--draws", "3", "--out", path]), EXIT_OK)
        with open(path, encoding="utf-8") as handle:
            report = json.load(handle)
        self.assertTrue(report["passed"])
        self.assertNotEqual(EXIT_VALIDATION_FAILURE, EXIT_OK)


if __name__ == "__main__":
    unittest.main()
