"""
コマンドラインインターフェース

サブコマンド:
    spectrum  1点の多体準位
    sweep     1軸/2軸の格子上の基底エネルギー・準位・一粒子エネルギー
    dist      基底状態のサイト分布 n_j と運動量分布 m_k
    validate  恒等式・オラクル検査のスイート（JSON レポート）

終了コード: 0 成功、1 検証失敗、2 使い方の誤り、3 失敗した点がある（--strict 指定時）
"""

import argparse
import json
import sys
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..models.params import ModelParams, derive
from ..utils.config import AppConfig, reload_config
from ..utils.constants import (
    EXIT_OK,
    EXIT_POINT_FAILURES,
    EXIT_USAGE_ERROR,
    EXIT_VALIDATION_FAILURE,
    METHODS,
    OBSERVABLES,
    OUTPUT_FORMATS,
    PRESETS,
    STATUS_OK,
)
from ..utils.csv_utils import write_table
from ..utils.logger import get_logger, logger_manager, run_context, setup_logging
from ..utils.method_executor import MethodExecutor
from ..utils.sweep import SweepAxis, SweepGrid, records_to_frame, run_sweep
from ..utils.validation_suite import run_validation

logger = get_logger(__name__)

_MODEL_KEYS = ("M", "N", "T", "U", "V0", "tau", "v", "UN_scale")


def _method_list(text: str) -> List[str]:
    methods = [m.strip() for m in text.split(",") if m.strip()]
    unknown = [m for m in methods if m not in METHODS]
    if not methods or unknown:
        raise argparse.ArgumentTypeError(f"手法は {', '.join(METHODS)} から選んでください: {text}")
    return methods


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    model = common.add_argument_group("モデルパラメータ")
    model.add_argument("--M", type=int, help="サイト数")
    model.add_argument("--N", type=int, help="ボソン数")
    model.add_argument("--T", type=float, help="ホッピング")
    model.add_argument("--U", type=float, help="引力の大きさ")
    model.add_argument("--V0", type=float, help="井戸の深さ")
    model.add_argument("--tau", type=float, help="T/(UN)")
    model.add_argument("--v", type=float, help="V0/(UN)")
    model.add_argument("--UN-scale", dest="UN_scale", type=float, help="tau, v の単位となる UN")
    model.add_argument("--preset", choices=sorted(PRESETS), help="参照パラメータセット")

    run = common.add_argument_group("実行と出力")
    run.add_argument("--config", help="key = value 形式の設定ファイル")
    run.add_argument("--out", help="出力ファイル（省略時は標準出力）")
    run.add_argument("--format", dest="output_format", choices=OUTPUT_FORMATS, help="出力形式")
    run.add_argument("--jobs", type=int, help="並列プロセス数")
    run.add_argument("--dimension-cap", dest="dimension_cap", type=int, help="厳密対角化の次元上限")
    run.add_argument("--log-level", dest="log_level", help="ログレベル")
    run.add_argument("--strict", action="store_true", help="失敗した点があれば終了コード3")
    return common


def build_parser() -> argparse.ArgumentParser:
    """引数パーサーを構築"""
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="ring-boson", description="リング上の引力ボソン系のスペクトル計算")
    sub = parser.add_subparsers(dest="command", required=True)

    spectrum = sub.add_parser("spectrum", parents=[common], help="多体準位")
    spectrum.add_argument("--method", choices=METHODS, default="exact")
    spectrum.add_argument("--count", type=int, default=5)

    sweep = sub.add_parser("sweep", parents=[common], help="パラメータスイープ")
    sweep.add_argument("--axis1", type=SweepAxis.parse, required=True, help="name:min:max:steps")
    sweep.add_argument("--axis2", type=SweepAxis.parse, help="name:min:max:steps")
    sweep.add_argument("--methods", "--method", dest="methods", type=_method_list, default=["si", "exact"], help="カンマ区切り")
    sweep.add_argument("--observable", choices=OBSERVABLES, default="gs_energy")
    sweep.add_argument("--count", type=int, default=1)

    dist = sub.add_parser("dist", parents=[common], help="基底状態の分布")
    dist.add_argument("--methods", "--method", dest="methods", type=_method_list, default=["exact"], help="カンマ区切り")

    validate = sub.add_parser("validate", parents=[common], help="検証スイート")
    validate.add_argument("--draws", type=int, default=50)
    validate.add_argument("--seed", type=int, default=20240601)
    return parser


def _load_config(args: argparse.Namespace) -> AppConfig:
    overrides = {
        key: getattr(args, key, None)
        for key in ("log_level", "output_format", "jobs", "dimension_cap") + _MODEL_KEYS
    }
    return reload_config(args.config, overrides)


def _model_values(args: argparse.Namespace, config: AppConfig) -> Dict[str, Any]:
    """プリセット < 設定ファイル < 引数 の順に上書きしたモデル値"""
    values: Dict[str, Any] = dict(PRESETS[args.preset]) if args.preset else {}
    values.update({key: getattr(config, key) for key in _MODEL_KEYS if getattr(config, key) is not None})
    return values


def _params_meta(params: ModelParams) -> Dict[str, Any]:
    derived = derive(params)
    meta: Dict[str, Any] = params.as_dict()
    if derived.tau is not None:
        meta.update({"tau": derived.tau, "v": derived.v})
    return meta


def cmd_spectrum(params: ModelParams, method: str, count: int, config: AppConfig) -> pd.DataFrame:
    """1点の最低 count 準位"""
    outcome = MethodExecutor(params, config).levels(method, count)
    if not outcome.ok:
        return pd.DataFrame([{"method": method, "rank": 0, "energy": np.nan, "label": "", "status": outcome.status}])
    rows = []
    for row in outcome.rows:
        ground = row.get("cluster", row["rank"]) == 0
        rows.append({"method": method, **row, "ground": ground, "status": STATUS_OK})
    return pd.DataFrame(rows)


def cmd_dist(params: ModelParams, methods: Sequence[str], config: AppConfig) -> Tuple[pd.DataFrame, Dict[str, str]]:
    """手法ごとの n_j, m_k と合計行"""
    executor = MethodExecutor(params, config)
    M = params.M
    columns: Dict[str, Any] = {"j": list(range(M)) + ["sum"]}
    m_columns: Dict[str, Any] = {"k": list(range(M)) + ["sum"]}
    statuses: Dict[str, str] = {}
    for method in methods:
        outcome = executor.distributions(method)
        statuses[f"status_{method}"] = outcome.status
        if outcome.ok:
            n, m = outcome.values["n"], outcome.values["m"]
        else:
            n = m = np.full(M, np.nan)
        columns[f"n_{method}"] = list(n) + [float(np.sum(n))]
        m_columns[f"m_{method}"] = list(m) + [float(np.sum(m))]
    return pd.DataFrame({**columns, **m_columns}), statuses


def cmd_sweep(
    grid: SweepGrid, methods: Sequence[str], observable: str, count: int, config: AppConfig
) -> Tuple[pd.DataFrame, Dict[str, Any], bool]:
    """格子上の各点を評価した表、メタデータ、失敗点の有無"""
    records = run_sweep(grid, methods, observable, count, config)
    meta = {
        "command": "sweep",
        "methods": list(methods),
        "observable": observable,
        "axes": [f"{a.name}:{a.min!r}:{a.max!r}:{a.steps}" for a in grid.axes],
        "fixed": grid.fixed,
    }
    failed = any(record.status != STATUS_OK for record in records)
    return records_to_frame(records), meta, failed


def cmd_validate(config: AppConfig, draws: int, seed: int) -> Tuple[str, bool]:
    """検証スイートの JSON レポートと合否"""
    report = run_validation(config, draws=draws, seed=seed)
    text = json.dumps(report.as_dict(), ensure_ascii=False, indent=2, default=float) + "\n"
    return text, report.passed


def _emit(df: pd.DataFrame, meta: Dict[str, Any], args: argparse.Namespace, config: AppConfig) -> None:
    write_table(df, meta, args.out, config.output_format, config.float_format)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """CLI のエントリーポイント（終了コードを返す）"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE_ERROR

    try:
        config = _load_config(args)
    except ValueError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_USAGE_ERROR
    logger_manager.reset()
    run_context["command"] = args.command
    setup_logging(config=config)
    logger.info(f"{args.command} を開始します")

    if args.command == "validate":
        text, passed = cmd_validate(config, args.draws, args.seed)
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="\n") as handle:
                handle.write(text)
        else:
            sys.stdout.write(text)
        logger.info(f"validate が終了しました: {'合格' if passed else '不合格'}")
        return EXIT_OK if passed else EXIT_VALIDATION_FAILURE

    try:
        values = _model_values(args, config)
        if args.command == "sweep":
            axis_names = {axis.name for axis in (args.axis1, args.axis2) if axis is not None}
            fixed = {k: v for k, v in values.items() if k not in axis_names}
            grid = SweepGrid(args.axis1, args.axis2, fixed)
        else:
            params = ModelParams.from_mapping(values)
    except ValueError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_USAGE_ERROR

    if args.command == "spectrum":
        df = cmd_spectrum(params, args.method, args.count, config)
        meta = {"command": "spectrum", "method": args.method, "count": args.count, **_params_meta(params)}
        failed = bool((df["status"] != STATUS_OK).any())
    elif args.command == "dist":
        df, statuses = cmd_dist(params, args.methods, config)
        meta = {"command": "dist", "methods": args.methods, **_params_meta(params), **statuses}
        failed = any(status != STATUS_OK for status in statuses.values())
    else:
        df, meta, failed = cmd_sweep(grid, args.methods, args.observable, args.count, config)

    _emit(df, meta, args, config)
    logger.info(f"{args.command} が終了しました")
    if failed and args.strict:
        return EXIT_POINT_FAILURES
    return EXIT_OK


def run() -> None:
    """コンソールスクリプト用"""
    sys.exit(main())


if __name__ == "__main__":
    run()
