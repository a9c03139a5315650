"""
定数定義モジュール

ソルバー、スイープ、CLI で使用する定数を定義します。
"""

# 厳密対角化
DEFAULT_DIMENSION_CAP = 20000  # 密行列で扱う Fock 空間次元の上限
DEFAULT_DEGENERACY_REL_TOL = 1e-8  # 基底クラスター判定の相対エネルギー差

# 根探索
DEFAULT_POLE_OFFSET_FRAC = 1e-9
DEFAULT_MERGE_REL_TOL = 1e-12
DEFAULT_MAX_ITER = 200

# 摂動近似の信頼判定 t = 8T/(M V0)
DEFAULT_LARGE_T_THRESHOLD = 50.0

# 出力書式（17有効桁の指数表記）
FLOAT_FORMAT = "%.16e"

# 手法・観測量・スイープ軸
METHODS = ["exact", "si", "sf"]
OBSERVABLES = ["gs_energy", "levels", "sp_energies"]
SWEEP_AXES = ["tau", "v", "T", "V0", "U"]
OUTPUT_FORMATS = ["csv", "json"]

# 格子点ごとのステータス
STATUS_OK = "ok"
STATUS_VOCABULARY = ["ok", "invalid_regime", "singular", "dimension_cap", "no_convergence"]

# 終了コード
EXIT_OK = 0
EXIT_VALIDATION_FAILURE = 1
EXIT_USAGE_ERROR = 2
EXIT_POINT_FAILURES = 3

# 参照パラメータセット
PRESETS = {
    # 二重項の形成（τ スイープ用。T は軸で上書き）
    "si-doublets": {"M": 6, "N": 6, "U": 0.05, "V0": 0.4, "T": 0.5},
    # 強い局在（SI 分布の比較）
    "si-localized": {"M": 7, "N": 8, "T": 0.5, "U": 1.0, "V0": 0.1},
    # SI 準位比較 τ = 1/6
    "si-levels": {"M": 6, "N": 6, "U": 0.05, "T": 0.05, "V0": 0.3},
    # SF 準位比較 τ = 1, v = 1/6
    "sf-levels": {"M": 6, "N": 6, "U": 0.05, "T": 0.3, "V0": 0.05},
    # 浅い井戸 2TM/V0 = 70
    "sf-weak-well": {"M": 7, "N": 8, "T": 1.0, "U": 0.2, "V0": 0.2},
    # 深い井戸 2TM/V0 = 22.4
    "sf-strong-well": {"M": 7, "N": 8, "T": 1.6, "U": 0.1, "V0": 1.0},
}
