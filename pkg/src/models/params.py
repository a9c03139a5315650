"""
モデルパラメータと運動量モード格子

M サイトのリング上の N 個の引力ボソン（サイト0に井戸）を記述する
物理パラメータ、派生スカラー、運動量モード定数、半古典レジーム分類を提供します。
ハミルトニアンは引力 −U（U ≥ 0 を保持）で構成します。
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Optional

import numpy as np

from .errors import DimensionCapExceeded, SemiclassicalUndefined


class SeparatrixSide(Enum):
    """半古典セパラトリクス v = 2τ − 1/2 に対する位置"""

    SUPERFLUID = "superfluid"
    SOLITON = "soliton"
    BOUNDARY = "boundary"


@dataclass(frozen=True)
class ModelParams:
    """物理入力パラメータ (M, N, T, U, V0)"""

    M: int
    N: int
    T: float
    U: float
    V0: float

    def __post_init__(self):
        """パラメータの検証"""
        errors = []
        if not isinstance(self.M, (int, np.integer)) or self.M < 2:
            errors.append(f"サイト数 M は2以上の整数である必要があります: {self.M}")
        if not isinstance(self.N, (int, np.integer)) or self.N < 1:
            errors.append(f"ボソン数 N は1以上の整数である必要があります: {self.N}")
        if not self.T > 0:
            errors.append(f"ホッピング T は正の値である必要があります: {self.T}")
        if not self.U >= 0:
            errors.append(f"引力の大きさ U は0以上である必要があります: {self.U}")
        if not self.V0 >= 0:
            errors.append(f"井戸の深さ V0 は0以上である必要があります: {self.V0}")
        if errors:
            raise ValueError("パラメータエラー:\n" + "\n".join(f"- {e}" for e in errors))

    @classmethod
    def from_dimensionless(cls, M: int, N: int, tau: float, v: float, UN: float) -> "ModelParams":
        """無次元量 τ, v とエネルギースケール UN から生成"""
        if UN <= 0:
            raise ValueError(f"UN スケールは正の値である必要があります: {UN}")
        return cls(M=M, N=N, T=tau * UN, U=UN / N, V0=v * UN)

    @classmethod
    def from_mapping(cls, values: Mapping[str, Optional[float]]) -> "ModelParams":
        """物理量 (T, U, V0) または無次元量 (tau, v, UN_scale) の混在から生成

        tau, v が与えられた場合は UN_scale（なければ U·N）を単位として T, V0 に換算します。
        """
        present = {k: v for k, v in values.items() if v is not None}
        missing = [k for k in ("M", "N") if k not in present]
        if missing:
            raise ValueError(f"パラメータエラー:\n- {', '.join(missing)} が指定されていません")
        M, N = int(present["M"]), int(present["N"])
        dimensionless = "tau" in present or "v" in present
        if not dimensionless:
            absent = [k for k in ("T", "U", "V0") if k not in present]
            if absent:
                raise ValueError(f"パラメータエラー:\n- {', '.join(absent)} が指定されていません")
            return cls(M=M, N=N, T=float(present["T"]), U=float(present["U"]), V0=float(present["V0"]))

        if "UN_scale" in present:
            UN = float(present["UN_scale"])
        elif "U" in present:
            UN = float(present["U"]) * N
        else:
            raise ValueError("パラメータエラー:\n- tau, v には UN_scale または U が必要です")
        if UN <= 0:
            raise ValueError(f"パラメータエラー:\n- UN スケールは正の値である必要があります: {UN}")
        T = float(present["tau"]) * UN if "tau" in present else present.get("T")
        V0 = float(present["v"]) * UN if "v" in present else present.get("V0")
        if T is None or V0 is None:
            raise ValueError("パラメータエラー:\n- T (tau) と V0 (v) の両方が必要です")
        return cls(M=M, N=N, T=float(T), U=UN / N, V0=float(V0))

    def as_dict(self) -> dict:
        return {"M": int(self.M), "N": int(self.N), "T": float(self.T), "U": float(self.U), "V0": float(self.V0)}


@dataclass(frozen=True)
class DerivedParams:
    """派生スカラー

    tau, v は U·N = 0 のとき None（未定義）。
    """

    tau: Optional[float]
    v: Optional[float]
    n: float
    w: float
    C_N: float
    Lambda: float


@dataclass(frozen=True)
class ModeGrid:
    """運動量モード定数

    c, s, y は k = 0..M−1、r2, e, g は k = 0..K。
    """

    M: int
    S: int
    K: int
    c: np.ndarray
    s: np.ndarray
    y: np.ndarray
    r2: np.ndarray
    e: np.ndarray
    g: np.ndarray
    r: np.ndarray = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "r", np.sqrt(self.r2))
        for name in ("c", "s", "y", "r2", "e", "g", "r"):
            getattr(self, name).setflags(write=False)

    def is_self_paired(self, k: int) -> bool:
        """k ≡ −k (mod M) となるモードか"""
        return (2 * k) % self.M == 0


@dataclass(frozen=True)
class RegimeReport:
    """半古典レジーム分類の結果"""

    E0_soliton: float
    E0_uniform: float
    side_of_separatrix: SeparatrixSide
    margin: float
    uniform_favoured: bool


def derive(params: ModelParams) -> DerivedParams:
    """派生スカラーを計算"""
    M, N, T, U, V0 = params.M, params.N, params.T, params.U, params.V0
    UN = U * N
    n = N / M
    return DerivedParams(
        tau=T / UN if UN > 0 else None,
        v=V0 / UN if UN > 0 else None,
        n=n,
        w=UN + V0,
        C_N=UN * (N + 1) / 2.0,
        Lambda=U * N * (N - 1) / (2.0 * M) + 2.0 * T * N + n * V0,
    )


def mode_grid(params: ModelParams) -> ModeGrid:
    """運動量モード格子を構築

    c_k は漸化式を使わず各 k で直接 cos(2πk/M) を評価します。
    """
    M = params.M
    if M % 2:
        S = K = (M - 1) // 2
    else:
        S, K = (M - 2) // 2, M // 2

    k_all = np.arange(M)
    y = 2.0 * np.pi * k_all / M
    c = np.array([math.cos(2.0 * math.pi * k / M) for k in range(M)])
    s = np.array([math.sin(2.0 * math.pi * k / M) for k in range(M)])

    r2 = np.full(K + 1, 2.0)
    r2[0] = 1.0
    if M % 2 == 0:
        r2[K] = 1.0

    # 1 − cos は sin² で評価して小さい k の桁落ちを避ける
    e = np.array([4.0 * params.T * math.sin(math.pi * k / M) ** 2 for k in range(K + 1)])
    n = params.N / M
    g = params.V0 / M + e - params.U * n
    return ModeGrid(M=M, S=S, K=K, c=c, s=s, y=y, r2=r2, e=e, g=g)


def classify_regime(params: ModelParams, boundary_tol: float = 1e-12) -> RegimeReport:
    """半古典的な基底状態エネルギーを比較してレジームを分類

    E'_0 はソリトン（1サイト局在）、E''_0 は一様凝縮体の値です。
    """
    derived = derive(params)
    if derived.tau is None:
        raise SemiclassicalUndefined()
    M, N, U = params.M, params.N, params.U
    tau, v = derived.tau, derived.v

    E0_soliton = -(N**2) * U * (0.5 + v)
    E0_uniform = -(N**2) * U * (1.0 / (2 * M) + v / M + 2.0 * tau)
    margin = v - (2.0 * tau - 0.5)

    if abs(margin) <= boundary_tol:
        side = SeparatrixSide.BOUNDARY
    elif margin < 0:
        side = SeparatrixSide.SUPERFLUID
    else:
        side = SeparatrixSide.SOLITON

    return RegimeReport(
        E0_soliton=E0_soliton,
        E0_uniform=E0_uniform,
        side_of_separatrix=side,
        margin=margin,
        uniform_favoured=E0_uniform < E0_soliton,
    )


def fock_dimension(M: int, N: int, cap: Optional[int] = None) -> int:
    """Fock空間の次元 binomial(N+M−1, N)"""
    if M < 1 or N < 0:
        raise ValueError(f"不正なFock空間サイズです: M={M}, N={N}")
    dimension = math.comb(N + M - 1, N)
    if cap is not None and dimension > cap:
        raise DimensionCapExceeded(dimension, cap)
    return dimension
