"""
モデル層

モデルパラメータ、運動量モード格子、例外の定義を提供します。
"""

from .errors import (
    DepletionOverflow,
    DimensionCapExceeded,
    InvalidRegime,
    NoBracket,
    NoConvergence,
    RingBosonError,
    SemiclassicalUndefined,
    Singular,
    Unstable,
)
from .params import (
    DerivedParams,
    ModelParams,
    ModeGrid,
    RegimeReport,
    SeparatrixSide,
    classify_regime,
    derive,
    fock_dimension,
    mode_grid,
)

__all__ = [
    "ModelParams",
    "DerivedParams",
    "ModeGrid",
    "RegimeReport",
    "SeparatrixSide",
    "derive",
    "mode_grid",
    "classify_regime",
    "fock_dimension",
    "RingBosonError",
    "NoBracket",
    "NoConvergence",
    "InvalidRegime",
    "Singular",
    "SemiclassicalUndefined",
    "Unstable",
    "DepletionOverflow",
    "DimensionCapExceeded",
]
