"""
手法実行モジュール

1つのパラメータ点について exact / si / sf の各手法を実行し、
準位・基底エネルギー・一粒子エネルギー・分布を表の行として返します。
ソルバーの例外は行の status に変換し、呼び出し側には送出しません。
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..algorithms import exact_diag, sf_solver, si_solver
from ..algorithms.numerics import sym_eig
from ..models.errors import RingBosonError
from ..models.params import ModelParams, mode_grid
from .config import AppConfig
from .constants import METHODS, STATUS_OK
from .logger import get_logger

logger = get_logger(__name__)


@dataclass
class MethodOutcome:
    """1手法・1観測量の実行結果"""

    method: str
    status: str = STATUS_OK
    message: str = ""
    values: Dict[str, Any] = field(default_factory=dict)
    rows: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status == STATUS_OK


class MethodExecutor:
    """手法の実行を管理するクラス"""

    def __init__(self, params: ModelParams, config: Optional[AppConfig] = None):
        """
        初期化

        Args:
            params: モデルパラメータ
            config: 許容誤差・次元上限などの設定
        """
        self.params = params
        self.config = config or AppConfig()
        self._root_config = self.config.root_config()
        self._cache: Dict[Tuple[str, int], Any] = {}

    def _check_method(self, method: str) -> None:
        if method not in METHODS:
            raise ValueError(f"未対応の手法です: {method}（{', '.join(METHODS)} のいずれか）")

    def _guarded(self, method: str, action) -> MethodOutcome:
        """ソルバー例外を status に変換して実行"""
        self._check_method(method)
        outcome = MethodOutcome(method=method)
        try:
            action(outcome)
        except RingBosonError as exc:
            outcome.status = exc.status
            outcome.message = str(exc)
            logger.warning(f"{method} の計算に失敗しました ({exc.status}): {exc}")
        return outcome

    # ---- 各手法の素の計算 ----

    def _exact(self, count: int):
        key = ("exact", count)
        if key not in self._cache:
            self._cache[key] = exact_diag.exact_spectrum(
                self.params, count, self.config.dimension_cap, self.config.degeneracy_rel_tol
            )
        return self._cache[key]

    def _si(self) -> si_solver.SiSpectrum:
        key = ("si", 0)
        if key not in self._cache:
            self._cache[key] = si_solver.si_sp_energies(self.params, self._root_config)
        return self._cache[key]

    def _sf(self) -> sf_solver.SfSolution:
        key = ("sf", 0)
        if key not in self._cache:
            self._cache[key] = sf_solver.sf_solve(self.params, self._root_config)
        return self._cache[key]

    # ---- 観測量 ----

    def levels(self, method: str, count: int) -> MethodOutcome:
        """低い順に count 個の多体準位"""

        def run(outcome: MethodOutcome) -> None:
            if method == "exact":
                _, spectrum = self._exact(count)
                clusters = spectrum.cluster_ids()
                outcome.rows = [
                    {"rank": i, "energy": float(e), "label": "", "cluster": clusters[i]}
                    for i, e in enumerate(spectrum.energies)
                ]
            elif method == "si":
                found = si_solver.si_levels(self.params, count, self._si())
                outcome.rows = [{"rank": i, "energy": lv.energy, "label": lv.label} for i, lv in enumerate(found)]
            else:
                found = sf_solver.sf_levels(self.params, count, self._sf())
                outcome.rows = [{"rank": i, "energy": lv.energy, "label": lv.label} for i, lv in enumerate(found)]
            outcome.values = {f"E_{row['rank']}": row["energy"] for row in outcome.rows}

        return self._guarded(method, run)

    def gs_energy(self, method: str) -> MethodOutcome:
        """基底エネルギー"""

        def run(outcome: MethodOutcome) -> None:
            if method == "exact":
                _, spectrum = self._exact(1)
                energy = float(spectrum.energies[0])
            elif method == "si":
                energy = si_solver.si_levels(self.params, 1, self._si())[0].energy
            else:
                energy = self._sf().ground_energy
            outcome.values = {"energy": energy}

        return self._guarded(method, run)

    def sp_energies(self, method: str) -> MethodOutcome:
        """一粒子レベルの量

        si: μ_q、極 c_q と一粒子エネルギー eps_i、sf: ν_k, θ_ℓ, η_ℓ、
        exact: 有効一体ハミルトニアンの固有値 eps_i。
        """

        def run(outcome: MethodOutcome) -> None:
            values: Dict[str, Any] = {}
            if method == "exact":
                eigenvalues = sym_eig(si_solver.one_body_matrix(self.params)).values
                values.update({f"eps_{i}": float(e) for i, e in enumerate(eigenvalues)})
            elif method == "si":
                spectrum = self._si()
                grid = mode_grid(self.params)
                values.update({f"mu_{q}": float(mu) for q, mu in enumerate(spectrum.mu)})
                values.update({f"c_{q}": float(grid.c[q]) for q in range(grid.K + 1)})
                values.update({f"eps_{i}": float(e) for i, e in enumerate(spectrum.sp_energies())})
                values["lambda0_dominant"] = bool(spectrum.validity["lambda0_dominant"])
            else:
                solution = self._sf()
                values.update({f"nu_{k}": float(v) for k, v in enumerate(solution.nu, start=1)})
                values.update({f"theta_{l}": float(v) for l, v in enumerate(solution.theta, start=1)})
                values.update({f"eta_{l}": float(v) for l, v in enumerate(solution.eta, start=1)})
            outcome.values = values

        return self._guarded(method, run)

    def distributions(self, method: str) -> MethodOutcome:
        """基底状態のサイト分布 n_j と運動量分布 m_k"""

        def run(outcome: MethodOutcome) -> None:
            if method == "exact":
                basis, spectrum = self._exact(self.params.M + 1)
                rho = exact_diag.ground_state_density(spectrum, basis)
                n = exact_diag.site_occupations(rho)
                m = exact_diag.momentum_occupations(rho)
            elif method == "si":
                state = si_solver.si_ground_distributions(self.params, self._si())
                n, m = state.n, state.m
            else:
                state = sf_solver.sf_ground_distributions(self.params, self._sf())
                n, m = state.n, state.m
            outcome.values = {"n": np.asarray(n, dtype=float), "m": np.asarray(m, dtype=float)}

        return self._guarded(method, run)

    def validity(self, method: str) -> Dict[str, Any]:
        """近似手法の妥当性フラグ（exact は空）

        si: lambda0_dominant, justified, reasons（";" 区切り）
        sf: nu_margin, tau_margin, eta_margin_minus などの余裕と large_t 条件
        """
        self._check_method(method)
        if method == "si":
            flags = si_solver.si_validity(self.params, self._si())
            return {
                "lambda0_dominant": bool(flags["lambda0_dominant"]),
                "justified": bool(flags["justified"]),
                "reasons": ";".join(flags["reasons"]),
            }
        if method == "sf":
            return dict(self._sf().validity)
        return {}

    def run(self, method: str, observable: str, count: int = 1) -> MethodOutcome:
        """観測量名で振り分けて実行（成功時は妥当性フラグを values に追加）"""
        if observable == "gs_energy":
            outcome = self.gs_energy(method)
        elif observable == "levels":
            outcome = self.levels(method, count)
        elif observable == "sp_energies":
            outcome = self.sp_energies(method)
        else:
            raise ValueError(f"未対応の観測量です: {observable}")
        if outcome.ok:
            outcome.values.update(self.validity(method))
        return outcome
