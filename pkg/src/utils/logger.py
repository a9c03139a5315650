"""
ログ管理モジュール

ソルバー・スイープ・CLI が共有するログ設定です。
標準出力は表データ専用なので、コンソールログは標準エラーへ出します。

- コンソール: 通常は1行テキスト、debug_mode ではレベルを色付け
- ファイル: log_file 指定時のみ。JSON 1行1レコード、サイズでローテーション
- 実行中のサブコマンド名を全レコードに付与（run_context）
"""

import json
import logging
import logging.handlers
import re
import sys
from typing import Dict, List, Optional

from .config import AppConfig, get_config

_CONSOLE_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"
_SIZE_PATTERN = re.compile(r"^\s*(\d+)\s*(KB|MB|GB)?\s*$")
_SIZE_UNITS = {None: 1, "KB": 1024, "MB": 1024**2, "GB": 1024**3}
_QUIET_LIBRARIES = ("numpy", "scipy", "matplotlib")

# 実行コンテキスト（サブコマンド名など）
run_context: Dict[str, str] = {}


class RunContextFilter(logging.Filter):
    """run_context の内容をレコード属性 context として付与"""

    def filter(self, record: logging.LogRecord) -> bool:
        record.context = dict(run_context)
        return True


class ColoredFormatter(logging.Formatter):
    """レベル名を ANSI カラーで表示するフォーマッター"""

    _LEVEL_COLORS = {
        logging.DEBUG: 36,
        logging.INFO: 32,
        logging.WARNING: 33,
        logging.ERROR: 31,
        logging.CRITICAL: 35,
    }

    def formatMessage(self, record: logging.LogRecord) -> str:
        text = super().formatMessage(record)
        code = self._LEVEL_COLORS.get(record.levelno)
        if code is None:
            return text
        return text.replace(record.levelname, f"\033[{code}m{record.levelname}\033[0m", 1)


class StructuredFormatter(logging.Formatter):
    """1レコードを JSON 1行に変換"""

    def format(self, record: logging.LogRecord) -> str:
        entry = {
            "timestamp": self.formatTime(record, _DATE_FORMAT),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }
        for key in ("context", "fields"):
            value = getattr(record, key, None)
            if value:
                entry[key] = value
        if record.exc_info:
            entry["exception"] = self.formatException(record.exc_info)
        return json.dumps(entry, ensure_ascii=False, default=str)


class LoggerManager:
    """ルートロガーのハンドラー構成を一度だけ行う"""

    def __init__(self):
        self._initialized = False

    def setup_logging(self, log_level: Optional[str] = None, config: Optional[AppConfig] = None) -> None:
        """ルートロガーを設定（2回目以降は reset() するまで何もしない）"""
        if self._initialized:
            return
        config = config or get_config()
        level = logging.getLevelName((log_level or config.log_level).upper())
        if not isinstance(level, int):
            level = logging.WARNING

        root = logging.getLogger()
        root.setLevel(level)
        for handler in list(root.handlers):
            root.removeHandler(handler)
        for handler in self._build_handlers(config):
            handler.setLevel(level)
            handler.addFilter(RunContextFilter())
            root.addHandler(handler)

        for name in _QUIET_LIBRARIES:
            logging.getLogger(name).setLevel(logging.WARNING)
        self._initialized = True
        logging.getLogger(__name__).debug(f"ログを設定しました: level={logging.getLevelName(level)}, file={config.log_file}")

    def reset(self) -> None:
        """次の setup_logging で再構成させる"""
        self._initialized = False

    def _build_handlers(self, config: AppConfig) -> List[logging.Handler]:
        console = logging.StreamHandler(sys.stderr)
        formatter_cls = ColoredFormatter if config.debug_mode else logging.Formatter
        console.setFormatter(formatter_cls(_CONSOLE_FORMAT, datefmt=_DATE_FORMAT))
        handlers: List[logging.Handler] = [console]

        if config.log_file is not None:
            config.log_file.parent.mkdir(parents=True, exist_ok=True)
            rotating = logging.handlers.RotatingFileHandler(
                filename=config.log_file,
                maxBytes=self._parse_size(config.log_max_size),
                backupCount=config.log_backup_count,
                encoding="utf-8",
            )
            rotating.setFormatter(StructuredFormatter())
            handlers.append(rotating)
        return handlers

    def _parse_size(self, size_str: str) -> int:
        """"10MB", "512KB", "2048" などをバイト数に変換"""
        match = _SIZE_PATTERN.match(size_str.upper())
        if match is None:
            raise ValueError(f"ログサイズの形式が不正です: {size_str}")
        return int(match.group(1)) * _SIZE_UNITS[match.group(2)]


# グローバルログマネージャーインスタンス
logger_manager = LoggerManager()


def setup_logging(log_level: Optional[str] = None, config: Optional[AppConfig] = None) -> None:
    """ログ設定を初期化"""
    logger_manager.setup_logging(log_level, config)


def get_logger(name: str) -> logging.Logger:
    """指定された名前のロガーを取得"""
    return logging.getLogger(name)


def log_extra_fields(logger: logging.Logger, level: int, message: str, **kwargs) -> None:
    """fields 付きでログを出力（ファイルログでは JSON の fields に入る）"""
    logger.log(level, f"{message} | {kwargs}", extra={"fields": kwargs})
