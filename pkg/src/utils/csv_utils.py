"""
CSV処理モジュール

計算結果の表（pandas DataFrame）を CSV / JSON に書き出し、読み戻す機能を提供します。
CSV は `#` で始まるコメント行（バージョンとパラメータ）+ ヘッダー行 + データ行、
UTF-8・LF 改行・17有効桁の指数表記で出力し、同じ入力からは常に同一のバイト列になります。
"""

import io
import json
import math
import sys
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

import numpy as np
import pandas as pd

from .. import __version__
from .constants import FLOAT_FORMAT, OUTPUT_FORMATS

PROGRAM_NAME = "ring-boson-spectrum"


def _meta_value(value: Any, float_format: str) -> str:
    """コメント行用の値の文字列化"""
    if isinstance(value, (float, np.floating)):
        return float_format % float(value)
    if isinstance(value, Mapping):
        return ";".join(f"{k}={_meta_value(v, float_format)}" for k, v in value.items())
    if isinstance(value, (list, tuple)):
        return ",".join(_meta_value(v, float_format) for v in value)
    return str(value)


def _json_value(value: Any) -> Any:
    """JSON 用に numpy 型を変換（NaN / inf は null）"""
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, Mapping):
        return {str(k): _json_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_json_value(v) for v in value]
    return value


def format_table(
    df: pd.DataFrame,
    meta: Optional[Mapping[str, Any]] = None,
    fmt: str = "csv",
    float_format: str = FLOAT_FORMAT,
) -> str:
    """
    表を文字列に整形

    Args:
        df: 出力する表
        meta: コメント行（CSV）または meta オブジェクト（JSON）に書く情報
        fmt: "csv" または "json"
        float_format: 浮動小数点の書式

    Returns:
        整形済みの文字列
    """
    if fmt not in OUTPUT_FORMATS:
        raise ValueError(f"未対応の出力形式です: {fmt}")
    meta = dict(meta or {})

    if fmt == "json":
        document = {
            "meta": {"program": PROGRAM_NAME, "version": __version__, **_json_value(meta)},
            "rows": [{str(k): _json_value(v) for k, v in row.items()} for row in df.to_dict(orient="records")],
        }
        return json.dumps(document, ensure_ascii=False, indent=2) + "\n"

    buffer = io.StringIO()
    buffer.write(f"# {PROGRAM_NAME} {__version__}\n")
    for key, value in meta.items():
        buffer.write(f"# {key}: {_meta_value(value, float_format)}\n")
    df.to_csv(buffer, index=False, float_format=float_format, lineterminator="\n")
    return buffer.getvalue()


def write_table(
    df: pd.DataFrame,
    meta: Optional[Mapping[str, Any]] = None,
    out: Optional[Union[str, Path]] = None,
    fmt: str = "csv",
    float_format: str = FLOAT_FORMAT,
) -> str:
    """
    表をファイルまたは標準出力に書き出す

    Returns:
        書き出した文字列
    """
    text = format_table(df, meta, fmt, float_format)
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
    return text


def read_table(
    source: Union[str, Path, io.StringIO], required_columns: Optional[List[str]] = None
) -> Tuple[pd.DataFrame, Dict[str, str]]:
    """
    書き出した CSV を読み戻す

    Args:
        source: ファイルパスまたは文字列バッファ
        required_columns: 必須列名のリスト

    Returns:
        (DataFrame, コメント行の key: value 辞書)のタプル
    """
    text = Path(source).read_text(encoding="utf-8") if not isinstance(source, io.StringIO) else source.getvalue()
    meta: Dict[str, str] = {}
    for line in text.splitlines():
        if not line.startswith("#"):
            break
        body = line[1:].strip()
        if ": " in body:
            key, value = body.split(": ", 1)
            meta[key] = value

    df = pd.read_csv(io.StringIO(text), comment="#")
    missing_columns = [col for col in (required_columns or []) if col not in df.columns]
    if missing_columns:
        raise ValueError(f"必要な列が不足しています: {missing_columns}")
    return df, meta
