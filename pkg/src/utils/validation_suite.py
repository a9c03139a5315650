"""
検証スイートモジュール

ソルバーの恒等式・オラクル一致・規格化を乱数パラメータで一括検査し、
機械可読なレポートを返します。
"""

from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from ..algorithms import exact_diag, sf_solver, si_solver
from ..algorithms.numerics import sym_eig
from ..models.errors import RingBosonError, Unstable
from ..models.params import ModelParams, mode_grid
from .config import AppConfig
from .logger import get_logger

logger = get_logger(__name__)

NuHook = Callable[[np.ndarray], np.ndarray]


@dataclass
class CheckResult:
    """1項目の検査結果"""

    name: str
    passed: bool
    cases: int = 0
    worst: float = 0.0
    tolerance: float = 0.0
    failures: List[Dict[str, Any]] = field(default_factory=list)


@dataclass
class ValidationReport:
    """検査結果一式"""

    checks: List[CheckResult]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def as_dict(self) -> Dict[str, Any]:
        return {"passed": self.passed, "checks": [asdict(check) for check in self.checks]}


def _random_params(rng: np.random.Generator, m_range=(2, 12), n_range=(1, 8)) -> ModelParams:
    return ModelParams(
        M=int(rng.integers(m_range[0], m_range[1] + 1)),
        N=int(rng.integers(n_range[0], n_range[1] + 1)),
        T=float(rng.uniform(0.05, 2.0)),
        U=float(rng.uniform(0.01, 1.0)),
        V0=float(rng.uniform(0.01, 1.0)),
    )


def _finish(check: CheckResult, value: float, detail: Dict[str, Any]) -> None:
    check.cases += 1
    check.worst = max(check.worst, float(value))
    if not value <= check.tolerance:
        check.failures.append({**detail, "value": float(value)})
        check.passed = False


def check_si_union_spectrum(rng: np.random.Generator, draws: int, cfg) -> CheckResult:
    """SI 一粒子スペクトルの和集合 = 有効一体ハミルトニアンの固有値"""
    check = CheckResult("si_union_spectrum", True, tolerance=1e-9)
    for _ in range(draws):
        params = _random_params(rng)
        spectrum = si_solver.si_sp_energies(params, cfg)
        exact = sym_eig(si_solver.one_body_matrix(params)).values
        scale = max(2.0 * params.T, params.U * params.N + params.V0)
        _finish(check, float(np.abs(spectrum.sp_energies() - exact).max()) / scale, params.as_dict())
    return check


def check_solution_count(cfg) -> CheckResult:
    """永年方程式の根の個数 M/2 + 1（偶数）、(M+1)/2（奇数）"""
    check = CheckResult("solution_count", True, tolerance=0.0)
    for M in range(2, 13):
        params = ModelParams(M=M, N=3, T=0.7, U=0.2, V0=0.3)
        found = si_solver.si_sp_energies(params, cfg).mu.size
        _finish(check, abs(found - si_solver.solution_count(M)), {"M": M, "found": found})
    return check


def check_bdg_oracle(rng: np.random.Generator, draws: int, cfg, nu_hook: Optional[NuHook]) -> CheckResult:
    """{ν} ∪ {η} = BdG 二次形式のシンプレクティック固有値"""
    check = CheckResult("bdg_oracle", True, tolerance=1e-9)
    attempts = 0
    while check.cases < draws and attempts < 50 * draws:
        attempts += 1
        params = ModelParams(
            M=int(rng.integers(2, 11)),
            N=int(rng.integers(2, 20)),
            T=float(rng.uniform(0.5, 3.0)),
            U=float(rng.uniform(0.001, 0.1)),
            V0=float(rng.uniform(0.001, 0.5)),
        )
        try:
            solution = sf_solver.sf_solve(params, cfg)
        except RingBosonError:
            continue
        try:
            report = sf_solver.bdg_oracle_check(params, solution, nu_hook=nu_hook)
        except Unstable as exc:
            # ν, η が実数なのに二次形式が不安定なら不一致
            _finish(check, float("inf"), {**params.as_dict(), "unstable": exc.which})
            continue
        _finish(check, report.max_abs_diff / report.scale, params.as_dict())
    return check


def check_sf_small_well_limit(cfg) -> CheckResult:
    """V0 = 0 で θ = g, η = ν, x = 0、V0 = 1e−8·UN で連続的"""
    check = CheckResult("sf_small_well_limit", True, tolerance=1e-6)
    for M in (5, 6):
        base = ModelParams(M=M, N=6, T=0.3, U=0.05, V0=0.0)
        grid = mode_grid(base)
        solution = sf_solver.sf_solve(base, cfg)
        exact_limit = max(
            float(np.abs(solution.theta - grid.g[1 : grid.K + 1]).max()),
            float(np.abs(solution.eta[: grid.S] - solution.nu).max(initial=0.0)),
            float(np.abs(solution.x).max()),
        )
        _finish(check, exact_limit, {"M": M, "V0": 0.0})

        tiny = ModelParams(M=M, N=6, T=0.3, U=0.05, V0=1e-8 * 0.05 * 6)
        near = sf_solver.sf_solve(tiny, cfg)
        deviation = max(
            float(np.abs((near.theta - solution.theta) / solution.theta).max()),
            float(np.abs((near.eta - solution.eta) / solution.eta).max()),
        )
        _finish(check, deviation, {"M": M, "V0": tiny.V0})
    return check


def check_normalization(rng: np.random.Generator, draws: int, cfg) -> CheckResult:
    """Σ|x_k|² = 1、Σn_j = N、反転対称性、B と f_rot の直交性"""
    check = CheckResult("normalization_symmetry", True, tolerance=1e-10)
    for _ in range(draws):
        params = _random_params(rng, m_range=(3, 10))
        spectrum = si_solver.si_sp_energies(params, cfg)
        state = si_solver.si_ground_distributions(params, spectrum)
        K = spectrum.B.shape[0]
        M, N = params.M, params.N
        reflect = (-np.arange(M)) % M
        values = [
            abs(float(np.sum(state.m)) / N - 1.0),
            abs(float(np.sum(state.n)) / N - 1.0),
            abs(float(np.sum(state.x**2)) - 1.0),
            float(np.abs(state.n - state.n[reflect]).max()) / N,
            float(np.abs(state.m - state.m[reflect]).max()) / N,
            float(np.abs(spectrum.B @ spectrum.B.T - np.eye(K)).max()),
        ]
        _finish(check, max(values), {"solver": "si", **params.as_dict()})

    attempts = 0
    done = 0
    while done < draws and attempts < 50 * draws:
        attempts += 1
        params = ModelParams(
            M=int(rng.integers(3, 10)),
            N=int(rng.integers(4, 20)),
            T=float(rng.uniform(0.5, 3.0)),
            U=float(rng.uniform(0.001, 0.05)),
            V0=float(rng.uniform(0.001, 0.3)),
        )
        try:
            solution = sf_solver.sf_solve(params, cfg)
            state = sf_solver.sf_ground_distributions(params, solution)
        except RingBosonError:
            continue
        done += 1
        M, N = params.M, params.N
        reflect = (-np.arange(M)) % M
        K = solution.f_rot.shape[0]
        values = [
            abs(float(np.sum(state.m)) / N - 1.0),
            abs(float(np.sum(state.n)) / N - 1.0),
            float(np.abs(state.n - state.n[reflect]).max()) / N,
            float(np.abs(state.m - state.m[reflect]).max()) / N,
            float(np.abs(solution.f_rot @ solution.f_rot.T - np.eye(K)).max()),
        ]
        _finish(check, max(values), {"solver": "sf", **params.as_dict()})
    return check


def check_minimal_lattice(config: AppConfig) -> CheckResult:
    """N = 1, U = 0 の厳密対角化 = 一体ハミルトニアン（M = 2 の二重結合を含む）"""
    check = CheckResult("minimal_lattice", True, tolerance=1e-12)
    for M in (2, 3, 4):
        params = ModelParams(M=M, N=1, T=0.4, U=0.0, V0=0.3)
        _, spectrum = exact_diag.exact_spectrum(params, M, config.dimension_cap, config.degeneracy_rel_tol)
        expected = sym_eig(si_solver.one_body_matrix(params)).values
        _finish(check, float(np.abs(spectrum.energies - expected).max()), {"M": M})
    return check


def run_validation(
    config: Optional[AppConfig] = None,
    draws: int = 50,
    seed: int = 20240601,
    nu_hook: Optional[NuHook] = None,
) -> ValidationReport:
    """
    検証スイートを実行

    Args:
        config: 設定（根探索の許容誤差など）
        draws: 乱数パラメータの試行数
        seed: 乱数シード
        nu_hook: BdG オラクル検査で ν を差し替えるフック

    Returns:
        検証レポート
    """
    config = config or AppConfig()
    cfg = config.root_config()
    rng = np.random.default_rng(seed)
    checks = [
        check_si_union_spectrum(rng, draws, cfg),
        check_solution_count(cfg),
        check_bdg_oracle(rng, draws, cfg, nu_hook),
        check_sf_small_well_limit(cfg),
        check_normalization(rng, draws, cfg),
        check_minimal_lattice(config),
    ]
    report = ValidationReport(checks)
    for check in checks:
        if check.passed:
            logger.info(f"検査 {check.name}: 合格（{check.cases} 件, 最大 {check.worst:.3e}）")
        else:
            logger.error(f"検査 {check.name}: 不合格（{len(check.failures)}/{check.cases} 件）")
    return report
