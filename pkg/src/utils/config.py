"""
設定管理モジュール

このモジュールは、アプリケーション全体で使用される設定値を管理します。
任意の `key = value` 形式の設定ファイルから値を読み込み、
コマンドライン引数の値で上書きします（引数が優先）。環境変数は読みません。

主な機能:
- 設定ファイルからの設定値読み込み
- デフォルト値の提供
- 設定値の型変換
- 設定値の検証
"""

import logging
import re
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Dict, Optional, Union

from .constants import (
    DEFAULT_DEGENERACY_REL_TOL,
    DEFAULT_DIMENSION_CAP,
    DEFAULT_LARGE_T_THRESHOLD,
    DEFAULT_MAX_ITER,
    DEFAULT_MERGE_REL_TOL,
    DEFAULT_POLE_OFFSET_FRAC,
    FLOAT_FORMAT,
    OUTPUT_FORMATS,
)

_LINE_PATTERN = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.*?)\s*$")
_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


@dataclass
class AppConfig:
    """アプリケーション設定クラス"""

    # ログ設定
    log_level: str = "WARNING"
    log_file: Optional[Path] = None
    log_max_size: str = "10MB"
    log_backup_count: int = 5
    debug_mode: bool = False

    # 厳密対角化
    dimension_cap: int = DEFAULT_DIMENSION_CAP
    degeneracy_rel_tol: float = DEFAULT_DEGENERACY_REL_TOL

    # 根探索
    rel_tol: float = 8.881784197001252e-16
    abs_tol: float = 1e-20
    max_iter: int = DEFAULT_MAX_ITER
    pole_offset_frac: float = DEFAULT_POLE_OFFSET_FRAC
    merge_rel_tol: float = DEFAULT_MERGE_REL_TOL

    # SF 近似
    large_t_threshold: float = DEFAULT_LARGE_T_THRESHOLD

    # 実行・出力
    jobs: int = 1
    output_format: str = "csv"
    float_format: str = FLOAT_FORMAT

    # モデルパラメータ（コマンドライン引数で上書き可能）
    M: Optional[int] = None
    N: Optional[int] = None
    T: Optional[float] = None
    U: Optional[float] = None
    V0: Optional[float] = None
    tau: Optional[float] = None
    v: Optional[float] = None
    UN_scale: Optional[float] = None

    def root_config(self):
        """根探索設定 RootConfig を生成"""
        from ..algorithms.numerics import RootConfig

        return RootConfig(
            rel_tol=self.rel_tol,
            abs_tol=self.abs_tol,
            max_iter=self.max_iter,
            pole_offset_frac=self.pole_offset_frac,
            merge_rel_tol=self.merge_rel_tol,
        )


class ConfigManager:
    """設定管理クラス"""

    def __init__(self):
        """設定マネージャーを初期化"""
        self._config: Optional[AppConfig] = None
        self._logger = logging.getLogger(__name__)

    def load_config(
        self, config_file: Optional[Union[str, Path]] = None, overrides: Optional[Dict[str, Any]] = None
    ) -> AppConfig:
        """設定ファイルと上書き値から設定を読み込み、AppConfigオブジェクトを返す"""
        if self._config is None or config_file is not None or overrides:
            self._config = self._create_config(config_file, overrides or {})
        return self._config

    def _create_config(self, config_file: Optional[Union[str, Path]], overrides: Dict[str, Any]) -> AppConfig:
        """設定オブジェクトを作成"""
        values: Dict[str, Any] = {}
        if config_file is not None:
            values.update(self._read_file(Path(config_file)))
        # コマンドライン引数が優先（None は未指定扱い）
        values.update({k: v for k, v in overrides.items() if v is not None})

        known = {f.name: f for f in fields(AppConfig)}
        unknown = sorted(set(values) - set(known))
        if unknown:
            raise ValueError("設定エラー:\n" + "\n".join(f"- 未知の設定キーです: {key}" for key in unknown))

        converted = {name: self._convert(name, value) for name, value in values.items()}
        config = AppConfig(**converted)

        # 設定の検証
        self._validate_config(config)

        # ログ出力
        self._log_config_summary(config, config_file)

        return config

    def _read_file(self, path: Path) -> Dict[str, str]:
        """`key = value` 形式の設定ファイルを読み込み"""
        if not path.exists():
            raise ValueError(f"設定エラー:\n- 設定ファイルが見つかりません: {path}")
        values: Dict[str, str] = {}
        errors = []
        for number, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            match = _LINE_PATTERN.match(line)
            if match is None:
                errors.append(f"{path}:{number}: `key = value` 形式ではありません: {raw.strip()}")
                continue
            values[match.group(1)] = match.group(2)
        if errors:
            raise ValueError("設定エラー:\n" + "\n".join(f"- {error}" for error in errors))
        return values

    def _convert(self, name: str, value: Any) -> Any:
        """設定値をフィールドの型に変換"""
        if not isinstance(value, str):
            return value
        try:
            if name in ("log_level", "log_max_size", "output_format", "float_format"):
                return value
            if name == "log_file":
                return Path(value) if value else None
            if name == "debug_mode":
                return self._parse_bool(value)
            if name in ("log_backup_count", "dimension_cap", "max_iter", "jobs", "M", "N"):
                return int(value)
            return float(value)
        except ValueError as exc:
            raise ValueError(f"設定エラー:\n- {name} の値を変換できません: {value!r}") from exc

    def _parse_bool(self, value: str) -> bool:
        """文字列をブール値に変換"""
        return value.lower() in ("true", "1", "yes", "on")

    def _validate_config(self, config: AppConfig) -> None:
        """設定値の検証"""
        errors = []

        if config.log_level.upper() not in _LOG_LEVELS:
            errors.append(f"log_level は {', '.join(_LOG_LEVELS)} のいずれかである必要があります: {config.log_level}")
        if config.log_backup_count < 0:
            errors.append("log_backup_count は0以上である必要があります")
        if not re.fullmatch(r"\s*\d+\s*(KB|MB|GB)?\s*", config.log_max_size.upper()):
            errors.append(f"log_max_size は 10MB のような形式である必要があります: {config.log_max_size}")

        if config.dimension_cap < 1:
            errors.append("dimension_cap は正の値である必要があります")
        if not config.degeneracy_rel_tol > 0:
            errors.append("degeneracy_rel_tol は正の値である必要があります")

        # brentq の rtol は 4·eps 以上
        if config.rel_tol < 8.881784197001252e-16:
            errors.append("rel_tol は 4·eps 以上である必要があります")
        if not config.abs_tol > 0:
            errors.append("abs_tol は正の値である必要があります")
        if config.max_iter < 1:
            errors.append("max_iter は正の値である必要があります")
        if not 0 < config.pole_offset_frac < 0.5:
            errors.append("pole_offset_frac は0と0.5の間の値である必要があります")
        if not 0 <= config.merge_rel_tol < 1:
            errors.append("merge_rel_tol は0以上1未満である必要があります")

        if not config.large_t_threshold > 0:
            errors.append("large_t_threshold は正の値である必要があります")
        if config.jobs < 1:
            errors.append("jobs は1以上である必要があります")
        if config.output_format not in OUTPUT_FORMATS:
            errors.append(f"output_format は {', '.join(OUTPUT_FORMATS)} のいずれかである必要があります: {config.output_format}")
        try:
            config.float_format % 1.0
        except (TypeError, ValueError):
            errors.append(f"float_format が不正な書式です: {config.float_format}")

        # エラーがあれば例外を発生
        if errors:
            error_msg = "設定エラー:\n" + "\n".join(f"- {error}" for error in errors)
            raise ValueError(error_msg)

    def _log_config_summary(self, config: AppConfig, config_file: Optional[Union[str, Path]]) -> None:
        """設定の要約をログに出力"""
        self._logger.debug(f"設定を読み込みました: ファイル={config_file or 'なし'}")
        self._logger.debug(f"  ログレベル: {config.log_level}, ログファイル: {config.log_file or 'なし'}")
        self._logger.debug(f"  次元上限: {config.dimension_cap}, 並列数: {config.jobs}, 出力形式: {config.output_format}")


# グローバル設定インスタンス
config_manager = ConfigManager()


def get_config() -> AppConfig:
    """設定オブジェクトを取得"""
    return config_manager.load_config()


def reload_config(config_file: Optional[Union[str, Path]] = None, overrides: Optional[Dict[str, Any]] = None) -> AppConfig:
    """設定を再読み込み"""
    config_manager._config = None
    return config_manager.load_config(config_file, overrides)
