"""
ユーティリティパッケージ

このパッケージは、アプリケーション全体で使用される共通機能を提供します。
設定管理、ログ機能、定数、表データ出力が含まれています。
手法実行・スイープ・検証スイートはソルバーに依存するため各モジュールから直接インポートします。
"""

# 設定管理とログ機能
from .config import AppConfig, get_config, reload_config
from .constants import METHODS, OBSERVABLES, PRESETS, STATUS_VOCABULARY, SWEEP_AXES
from .csv_utils import format_table, write_table
from .logger import get_logger, log_extra_fields, setup_logging

__all__ = [
    # 設定管理とログ機能
    "get_config",
    "reload_config",
    "AppConfig",
    "setup_logging",
    "get_logger",
    "log_extra_fields",
    # 定数
    "METHODS",
    "OBSERVABLES",
    "PRESETS",
    "STATUS_VOCABULARY",
    "SWEEP_AXES",
    # 表データ出力
    "format_table",
    "write_table",
]
