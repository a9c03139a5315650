"""
例外定義モジュール

ソルバー群が送出する例外を定義します。
各例外はスイープ出力の status 列に対応する `status` を持ちます。
"""

from typing import Any, Dict, Optional


class RingBosonError(Exception):
    """ソルバー例外の基底クラス"""

    status = "no_convergence"

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.details: Dict[str, Any] = dict(details or {})


class NoBracket(RingBosonError):
    """区間端で符号変化がない"""

    status = "no_convergence"


class NoConvergence(RingBosonError):
    """反復上限に到達した"""

    status = "no_convergence"


class InvalidRegime(RingBosonError):
    """準粒子エネルギーが実数にならないパラメータ領域"""

    status = "invalid_regime"

    def __init__(self, message: str, sector: str, index: int, margin: float):
        super().__init__(message, {"sector": sector, "index": index, "margin": margin})
        self.sector = sector
        self.index = index
        self.margin = margin


class Singular(RingBosonError):
    """共鳴・極上の根など分母がゼロになるケース"""

    status = "singular"

    def __init__(self, message: str, where: Any):
        super().__init__(message, {"where": where})
        self.where = where


class SemiclassicalUndefined(Singular):
    """U·N = 0 のため半古典分類が定義されない"""

    def __init__(self):
        super().__init__("半古典分類は U·N = 0 では定義されません", "UN")


class Unstable(RingBosonError):
    """A ± B が正定値でない二次形式"""

    status = "invalid_regime"

    def __init__(self, which: str, min_eigenvalue: float):
        super().__init__(
            f"二次形式が不安定です: A{which}B の最小固有値 = {min_eigenvalue:.6e}",
            {"which": which, "min_eigenvalue": min_eigenvalue},
        )
        self.which = which
        self.min_eigenvalue = min_eigenvalue


class DepletionOverflow(RingBosonError):
    """凝縮体占有数 m_0 が負になった"""

    status = "invalid_regime"

    def __init__(self, m0: float):
        super().__init__(f"凝縮体占有数が負になりました: m_0 = {m0:.6e}", {"m0": m0})
        self.m0 = m0


class DimensionCapExceeded(RingBosonError):
    """Fock空間の次元が上限を超えた"""

    status = "dimension_cap"

    def __init__(self, dimension: int, cap: int):
        super().__init__(f"Fock空間の次元 {dimension} が上限 {cap} を超えています", {"dimension": dimension, "cap": cap})
        self.dimension = dimension
        self.cap = cap
