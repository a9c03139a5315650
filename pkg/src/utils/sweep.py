"""
パラメータスイープモジュール

1軸または2軸の格子上で手法を実行し、格子順の長い形式の表を組み立てます。
格子点は `jobs` 個のプロセスで並列評価できますが、出力順は常に格子順です。
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..models.params import ModelParams, classify_regime, derive
from .config import AppConfig
from .constants import METHODS, OBSERVABLES, STATUS_OK, SWEEP_AXES
from .logger import get_logger
from .method_executor import MethodExecutor

logger = get_logger(__name__)


@dataclass(frozen=True)
class SweepAxis:
    """スイープ軸 name ∈ SWEEP_AXES, [min, max] を steps 点で等分"""

    name: str
    min: float
    max: float
    steps: int

    def __post_init__(self):
        errors = []
        if self.name not in SWEEP_AXES:
            errors.append(f"軸名は {', '.join(SWEEP_AXES)} のいずれかである必要があります: {self.name}")
        if self.steps < 1:
            errors.append(f"steps は1以上である必要があります: {self.steps}")
        if self.min > self.max:
            errors.append(f"min ≤ max である必要があります: {self.min} > {self.max}")
        if errors:
            raise ValueError("スイープ軸エラー:\n" + "\n".join(f"- {e}" for e in errors))

    @classmethod
    def parse(cls, text: str) -> "SweepAxis":
        """`name:min:max:steps` 形式の文字列を解釈"""
        parts = text.split(":")
        if len(parts) != 4:
            raise ValueError(f"スイープ軸は name:min:max:steps 形式で指定してください: {text}")
        name, lo, hi, steps = parts
        return cls(name=name, min=float(lo), max=float(hi), steps=int(steps))

    def values(self) -> np.ndarray:
        if self.steps == 1:
            return np.array([self.min])
        return np.linspace(self.min, self.max, self.steps)


@dataclass(frozen=True)
class SweepGrid:
    """スイープ格子（軸1、任意の軸2、固定値）"""

    axis1: SweepAxis
    axis2: Optional[SweepAxis] = None
    fixed: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.axis2 is not None and self.axis2.name == self.axis1.name:
            raise ValueError(f"スイープ軸エラー:\n- 軸名が重複しています: {self.axis1.name}")
        # 全格子点でパラメータが決まることを最初の点で確認
        self.point_params(self.points()[0][1])

    @property
    def axes(self) -> List[SweepAxis]:
        return [self.axis1] + ([self.axis2] if self.axis2 is not None else [])

    def points(self) -> List[Tuple[Tuple[int, ...], Dict[str, float]]]:
        """(格子インデックス, 軸の値) のリスト（軸1が外側のループ）"""
        grids = [axis.values() for axis in self.axes]
        points = []
        for i, a in enumerate(grids[0]):
            if len(grids) == 1:
                points.append(((i,), {self.axis1.name: float(a)}))
                continue
            for j, b in enumerate(grids[1]):
                points.append(((i, j), {self.axis1.name: float(a), self.axis2.name: float(b)}))
        return points

    def point_params(self, coords: Dict[str, float]) -> ModelParams:
        """固定値と軸の値からモデルパラメータを組み立てる"""
        return ModelParams.from_mapping({**self.fixed, **coords})


@dataclass
class SweepRecord:
    """1格子点 × 1手法の結果"""

    index: Tuple[int, ...]
    coords: Dict[str, float]
    method: str
    status: str
    message: str = ""
    outputs: Dict[str, Any] = field(default_factory=dict)
    rel_error: Optional[float] = None

    def as_row(self) -> Dict[str, Any]:
        row: Dict[str, Any] = {f"i{n + 1}": i for n, i in enumerate(self.index)}
        row.update(self.coords)
        row["method"] = self.method
        row["status"] = self.status
        row.update(self.outputs)
        if self.rel_error is not None:
            row["rel_error"] = self.rel_error
        return row


def _evaluate_point(task: Tuple[Tuple[int, ...], Dict[str, float], SweepGrid, Sequence[str], str, int, AppConfig]) -> List[SweepRecord]:
    """1格子点ですべての手法を評価（プロセスプールから呼ばれる）"""
    index, coords, grid, methods, observable, count, config = task
    try:
        params = grid.point_params(coords)
    except ValueError as exc:
        logger.warning(f"格子点 {index} のパラメータが不正です: {exc}")
        return [SweepRecord(index, coords, method, "invalid_regime", str(exc)) for method in methods]

    executor = MethodExecutor(params, config)
    outcomes = {method: executor.run(method, observable, count) for method in methods}
    exact = outcomes.get("exact")
    # U·N = 0 では半古典分類が定義されない
    regime = classify_regime(params).side_of_separatrix.value if derive(params).tau is not None else None

    records = []
    for method in methods:
        outcome = outcomes[method]
        outputs = dict(outcome.values)
        if regime is not None:
            outputs["side_of_separatrix"] = regime
        record = SweepRecord(index, coords, method, outcome.status, outcome.message, outputs)
        if method != "exact" and exact is not None and exact.ok and outcome.ok:
            if observable == "sp_energies":
                record.rel_error = _spectrum_error(outcome.values, exact.values)
            else:
                record.rel_error = _energy_error(outcome.values, exact.values)
        records.append(record)
    return records


def _energy_error(approx: Dict[str, Any], exact: Dict[str, Any]) -> Optional[float]:
    """エネルギー列の相対誤差 |E_approx − E_exact|/|E_exact| の最大値"""
    errors = [
        abs(approx[key] - value) / abs(value)
        for key, value in exact.items()
        if key in approx and value != 0
    ]
    return float(max(errors)) if errors else None


def _spectrum_error(approx: Dict[str, Any], exact: Dict[str, Any]) -> Optional[float]:
    """一粒子エネルギー eps_i の誤差 max|Δeps|/max|eps_exact|

    誤差は exact の max|eps| で正規化します。共通の eps_i がない手法（sf）は None。
    """
    keys = [key for key in exact if key.startswith("eps_") and key in approx]
    if not keys:
        return None
    reference = np.array([exact[key] for key in keys], dtype=float)
    scale = float(np.abs(reference).max())
    if scale == 0:
        return None
    deviation = np.abs(np.array([approx[key] for key in keys], dtype=float) - reference)
    return float(deviation.max() / scale)


def run_sweep(
    grid: SweepGrid,
    methods: Sequence[str],
    observable: str,
    count: int = 1,
    config: Optional[AppConfig] = None,
    jobs: Optional[int] = None,
) -> List[SweepRecord]:
    """
    スイープを実行

    Args:
        grid: スイープ格子
        methods: 実行する手法
        observable: gs_energy / levels / sp_energies
        count: levels の準位数
        config: 設定
        jobs: 並列プロセス数（None なら config.jobs）

    Returns:
        格子順（同一点内は methods の順）のレコード
    """
    config = config or AppConfig()
    jobs = jobs or config.jobs
    unknown = [m for m in methods if m not in METHODS]
    if unknown:
        raise ValueError(f"未対応の手法です: {unknown}")
    if observable not in OBSERVABLES:
        raise ValueError(f"未対応の観測量です: {observable}")

    tasks = [(index, coords, grid, list(methods), observable, count, config) for index, coords in grid.points()]
    logger.info(f"スイープを開始します: {len(tasks)} 点 × {len(methods)} 手法, 並列数={jobs}")
    if jobs == 1:
        chunks = list(map(_evaluate_point, tasks))
    else:
        # map は入力順で結果を返す
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_evaluate_point, tasks))

    records = [record for chunk in chunks for record in chunk]
    failures = sum(1 for r in records if r.status != STATUS_OK)
    logger.info(f"スイープが完了しました: {len(records)} 行, 失敗 {failures} 行")
    return records


def records_to_frame(records: Sequence[SweepRecord]) -> pd.DataFrame:
    """レコードを長い形式の DataFrame に変換（列は初出順）"""
    rows = [record.as_row() for record in records]
    columns: List[str] = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    if "rel_error" in columns:
        columns.remove("rel_error")
        columns.append("rel_error")
    return pd.DataFrame(rows, columns=columns)
