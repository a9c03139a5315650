"""
超流動（SF）ソルバー

k = 0 凝縮体まわりのボゴリューボフ展開:
    1. 変位 b_k → b_k + x_k で一次の項を消去
    2. 反対称モード f_k = (b_k − b_{−k})/√2 は井戸と結合せず ν_k = √(g_k² − U²n²)
    3. 対称モード F_h は G = diag(g_h) − (V0/M) r rᵀ を直交回転で対角化（θ_ℓ）
       して η_ℓ = √(θ_ℓ² − U²n²)
    4. 真空縮約から運動量・サイト分布を組み立てる
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..models.errors import DepletionOverflow, InvalidRegime, Singular
from ..models.params import ModelParams, ModeGrid, derive, mode_grid
from ..utils.constants import DEFAULT_LARGE_T_THRESHOLD
from ..utils.logger import get_logger
from .numerics import (
    DEFAULT_ROOT_CONFIG,
    RootConfig,
    SecularProblem,
    SecularSide,
    bdg_eig,
    best_first_levels,
    solve_secular,
)

logger = get_logger(__name__)


@dataclass(frozen=True)
class Displacement:
    """変位パラメータ

    x は長さ M で x[0] は使用しません（0）。
    """

    x: np.ndarray
    S_sum: float
    Phi: float
    C_total: float


@dataclass(frozen=True)
class NuResult:
    nu: np.ndarray
    alpha: np.ndarray
    validity: Dict[str, object]


@dataclass(frozen=True)
class ThetaRoots:
    """F セクターの回転後対角成分 θ_ℓ (ℓ = 1..K) と gaps[ℓ, h] = θ_ℓ − g_h"""

    theta: np.ndarray
    gaps: np.ndarray


@dataclass(frozen=True)
class ThetaApproximation:
    theta: np.ndarray
    xi: np.ndarray
    xi_large_t: np.ndarray
    discriminant: np.ndarray
    discriminant_threshold: np.ndarray
    t: float
    reliable: bool


@dataclass(frozen=True)
class EtaResult:
    eta: np.ndarray
    beta: np.ndarray
    validity: Dict[str, object]


@dataclass(frozen=True)
class SfSolution:
    """SF 解一式"""

    params: ModelParams
    grid: ModeGrid
    x: np.ndarray
    S_sum: float
    Phi: float
    C_total: float
    nu: np.ndarray
    alpha: np.ndarray
    theta: np.ndarray
    eta: np.ndarray
    beta: np.ndarray
    f_rot: np.ndarray
    Y: np.ndarray
    validity: Dict[str, object] = field(default_factory=dict)

    @property
    def ground_energy(self) -> float:
        g_f = self.grid.g[1 : self.grid.S + 1]
        return float(0.5 * np.sum(self.nu - g_f) + 0.5 * np.sum(self.eta - self.theta) - self.C_total)

    def quasiparticle_energies(self) -> np.ndarray:
        """{ν} ∪ {η}（昇順）"""
        return np.sort(np.concatenate([self.nu, self.eta]))


@dataclass(frozen=True)
class SfLevel:
    energy: float
    p: Tuple[int, ...]
    q: Tuple[int, ...]

    @property
    def label(self) -> str:
        return f"p=({','.join(map(str, self.p))});q=({','.join(map(str, self.q))})"


@dataclass(frozen=True)
class SfGroundState:
    """基底状態の分布

    rho は運動量基底の一体密度行列 ⟨b_q† b_k⟩。
    """

    m: np.ndarray
    n: np.ndarray
    rho: np.ndarray

    @property
    def m0(self) -> float:
        return float(self.m[0])


@dataclass(frozen=True)
class BdgReport:
    oracle: np.ndarray
    analytic: np.ndarray
    max_abs_diff: float
    scale: float
    passed: bool
    mismatches: List[Dict[str, float]]


def displacement_params(params: ModelParams) -> Displacement:
    """一次の項を消す変位 x_k と定数項"""
    grid = mode_grid(params)
    derived = derive(params)
    M, N, U, V0 = params.M, params.N, params.U, params.V0
    x = np.zeros(M)
    if V0 == 0:
        return Displacement(x=x, S_sum=0.0, Phi=0.0, C_total=derived.Lambda)

    UN = U * N
    k_all = np.arange(1, M)
    g_k = grid.g[np.minimum(k_all, M - k_all)]
    denom = UN - M * g_k
    scale = max(abs(UN), abs(M * g_k).max())
    for k, d in zip(k_all, denom):
        if abs(d) <= 1e-14 * scale:
            raise Singular(f"変位の分母が共鳴しています: k={k}", int(k))

    S_sum = float(np.sum(V0 / denom))
    if abs(1.0 + S_sum) <= 1e-14:
        raise Singular("1 + S = 0 のため変位が発散します", "S")
    x[1:] = -V0 * math.sqrt(N) / (denom * (1.0 + S_sum))
    Phi = -derived.n * V0 * S_sum / (1.0 + S_sum)
    return Displacement(x=x, S_sum=S_sum, Phi=Phi, C_total=derived.Lambda + Phi)


def nu_threshold_tau(M: int, v: float, k: int = 1) -> Tuple[float, float]:
    """g_k > Un となる τ の下限と大きな M での形 (1 − v/2)M/(2π²)"""
    if not 1 <= k <= M - 1:
        raise ValueError(f"モード番号が範囲外です: k={k}, M={M}")
    exact = (1.0 - 0.5 * v) / (2.0 * M * math.sin(math.pi * k / M) ** 2)
    large_m = (1.0 - 0.5 * v) * M / (2.0 * math.pi**2)
    return exact, large_m


def nu_energies(params: ModelParams) -> NuResult:
    """f セクターの準粒子エネルギー ν_k (k = 1..S)"""
    grid = mode_grid(params)
    derived = derive(params)
    Un = params.U * derived.n
    g = grid.g[1 : grid.S + 1]
    margins = g - Un

    validity: Dict[str, object] = {"nu_margin": float(margins.min()) if margins.size else math.inf}
    if derived.tau is not None and grid.S > 0:
        thresholds = [nu_threshold_tau(params.M, derived.v, k)[0] for k in range(1, grid.S + 1)]
        validity["tau_threshold"] = float(max(thresholds))
        validity["tau_margin"] = float(derived.tau - max(thresholds))

    if margins.size and margins.min() <= 0:
        worst = int(np.argmin(margins)) + 1
        raise InvalidRegime(f"g_k − Un ≤ 0 のため ν_k が実数になりません: k={worst}", "f", worst, float(margins.min()))

    nu = np.sqrt(g * g - Un * Un)
    alpha = np.arctanh(Un / g)
    return NuResult(nu=nu, alpha=alpha, validity=validity)


def theta_solve(params: ModelParams, cfg: RootConfig = DEFAULT_ROOT_CONFIG) -> ThetaRoots:
    """1 = −(V0/M) Σ_h r_h²/(θ − g_h) の K 個の根（昇順）"""
    grid = mode_grid(params)
    g = grid.g[1 : grid.K + 1]
    if params.V0 == 0:
        return ThetaRoots(theta=g.copy(), gaps=g[:, None] - g[None, :])

    weights = (params.V0 / params.M) * grid.r2[1 : grid.K + 1]
    solution = solve_secular(SecularProblem(g, weights, 1.0), SecularSide.BELOW, cfg)
    if solution.merged:
        raise Singular("θ の永年方程式の極が縮退しています", "poles")
    theta = solution.roots
    if np.any(theta >= g):
        raise Singular("θ_ℓ < g_ℓ の交互配置が破れています", "interlacing")
    logger.debug(f"θ を求めました: max(g − θ) = {float(np.max(g - theta)):.6e}")
    return ThetaRoots(theta=theta, gaps=solution.differences())


def _small_root(a: float, b: float, c: float) -> float:
    """a ξ² + b ξ + c = 0 の小さい方の根（判別式が負なら nan）"""
    disc = b * b - 4.0 * a * c
    if disc < 0:
        return float("nan")
    if a == 0:
        return -c / b if b != 0 else float("nan")
    q = -0.5 * (b + math.copysign(math.sqrt(disc), b if b != 0 else 1.0))
    return c / q if q != 0 else float("nan")


def _discriminant_threshold(s: float, c: float, rho: float, M: int) -> float:
    """判別式 s²t² − (2ρs² + 32c/M²)t + ρ²s² − 32(ρ−1)/M² が非負になる最小の t ≥ 0"""
    coeffs = np.trim_zeros(np.array([s * s, -(2.0 * rho * s * s + 32.0 * c / M**2), rho * rho * s * s - 32.0 * (rho - 1.0) / M**2]), "f")
    if coeffs.size <= 1:
        return 0.0
    roots = np.roots(coeffs)
    real = roots[np.abs(roots.imag) <= 1e-12 * np.maximum(1.0, np.abs(roots.real))].real
    return float(max(0.0, real.max())) if real.size else 0.0


def theta_approx(params: ModelParams, large_t_threshold: float = DEFAULT_LARGE_T_THRESHOLD) -> ThetaApproximation:
    """摂動的な θ_k の近似（θ_k ≈ g_k − 2V0/M）"""
    if params.V0 == 0:
        raise ValueError("θ の近似式は V0 > 0 でのみ定義されます")
    grid = mode_grid(params)
    M, T, V0 = params.M, params.T, params.V0
    Un = params.U * derive(params).n
    t = 8.0 * T / (M * V0)
    ks = np.arange(1, grid.K + 1)

    xi = np.empty(ks.size)
    xi_large = np.empty(ks.size)
    disc = np.empty(ks.size)
    threshold = np.empty(ks.size)
    for i, k in enumerate(ks):
        c, s = grid.c[k], grid.s[k]
        rho = 4.0 / (M**2 * (1.0 - c))
        a, b, c0 = t * c - 1.0 + rho, (t - rho) * s, 8.0 / M**2
        disc[i] = b * b - 4.0 * a * c0
        xi[i] = _small_root(a, b, c0)
        xi_large[i] = -8.0 / (t * M**2 * s) if abs(s) > 1e-15 else float("nan")
        threshold[i] = _discriminant_threshold(s, c, rho, M)

    if np.any(disc < 0):
        logger.debug(f"判別式が負のモードがあります: t={t:.4g}")
    theta = V0 / M - Un + 2.0 * T * (1.0 - np.cos(grid.y[ks] + xi))
    return ThetaApproximation(
        theta=theta,
        xi=xi,
        xi_large_t=xi_large,
        discriminant=disc,
        discriminant_threshold=threshold,
        t=t,
        reliable=bool(t >= large_t_threshold),
    )


def theta_trig_residual(params: ModelParams, theta: Sequence[float]) -> np.ndarray:
    """(2TM/V0) sin y − cot(y/2) + M cot(My/2) の相対残差

    cos y = 1 − (θ − V0/M + Un)/(2T) が [−1, 1] の外にある θ は nan。
    """
    M, T, V0 = params.M, params.T, params.V0
    if V0 == 0:
        raise ValueError("三角関数形は V0 > 0 でのみ定義されます")
    Un = params.U * derive(params).n
    theta = np.asarray(theta, dtype=float)
    cos_y = 1.0 - (theta - V0 / M + Un) / (2.0 * T)
    residual = np.full(theta.size, np.nan)
    for i, cy in enumerate(cos_y):
        if abs(cy) > 1.0:
            logger.debug(f"θ_{i + 1} は帯の外にあるため三角関数形を評価しません")
            continue
        y = math.acos(cy)
        lhs = (2.0 * T * M / V0) * math.sin(y)
        cot_half = 1.0 / math.tan(0.5 * y)
        cot_my = 1.0 / math.tan(0.5 * M * y)
        residual[i] = abs(lhs - cot_half + M * cot_my) / max(abs(lhs), abs(cot_half), abs(M * cot_my), 1.0)
    return residual


def f_matrix(params: ModelParams, theta: Sequence[float], gaps: Optional[np.ndarray] = None) -> Tuple[np.ndarray, np.ndarray]:
    """F セクターの直交回転 f_{hℓ} と正規化 Y_ℓ > 0"""
    grid = mode_grid(params)
    K = grid.K
    r = grid.r[1 : K + 1]
    if params.V0 == 0:
        return np.eye(K), r.copy()

    theta = np.asarray(theta, dtype=float)
    if gaps is None:
        gaps = theta[:, None] - grid.g[None, 1 : K + 1]
    if np.any(gaps == 0):
        raise Singular("θ が極 g_h の上にあります", "theta")
    coupling = params.V0 / params.M
    ratio = r[None, :] / gaps  # [ℓ, h]
    Y = 1.0 / (coupling * np.sqrt(np.sum(ratio**2, axis=1)))
    f_rot = (-coupling * ratio * Y[:, None]).T
    return f_rot, Y


def eta_energies(theta: Sequence[float], params: ModelParams) -> EtaResult:
    """F セクターの準粒子エネルギー η_ℓ"""
    theta = np.asarray(theta, dtype=float)
    derived = derive(params)
    Un = params.U * derived.n
    margin_minus = theta - Un
    margin_plus = theta + Un

    validity: Dict[str, object] = {
        "eta_margin_minus": float(margin_minus.min()),
        "eta_margin_plus": float(margin_plus.min()),
    }
    if derived.tau is not None:
        ks = np.arange(1, theta.size + 1)
        lhs = 4.0 * derived.tau * params.M * np.sin(np.pi * ks / params.M) ** 2
        validity["large_t_first"] = bool(np.all(lhs > derived.v))
        validity["large_t_second"] = bool(np.all(lhs - 2.0 > derived.v))

    for name, margins in (("θ − Un", margin_minus), ("θ + Un", margin_plus)):
        if margins.min() <= 0:
            worst = int(np.argmin(margins)) + 1
            raise InvalidRegime(f"{name} ≤ 0 のため η_ℓ が実数になりません: ℓ={worst}", "F", worst, float(margins.min()))

    eta = np.sqrt(theta * theta - Un * Un)
    beta = np.arctanh(Un / theta)
    return EtaResult(eta=eta, beta=beta, validity=validity)


def sf_solve(params: ModelParams, cfg: RootConfig = DEFAULT_ROOT_CONFIG) -> SfSolution:
    """SF 解一式を求める"""
    grid = mode_grid(params)
    displacement = displacement_params(params)
    nu = nu_energies(params)
    roots = theta_solve(params, cfg)
    f_rot, Y = f_matrix(params, roots.theta, roots.gaps)
    eta = eta_energies(roots.theta, params)
    validity = {**nu.validity, **eta.validity}
    logger.debug(f"SF 解: C_total={displacement.C_total:.10g}, min ν={nu.nu.min() if nu.nu.size else math.nan:.6g}, min η={eta.eta.min():.6g}")
    return SfSolution(
        params=params,
        grid=grid,
        x=displacement.x,
        S_sum=displacement.S_sum,
        Phi=displacement.Phi,
        C_total=displacement.C_total,
        nu=nu.nu,
        alpha=nu.alpha,
        theta=roots.theta,
        eta=eta.eta,
        beta=eta.beta,
        f_rot=f_rot,
        Y=Y,
        validity=validity,
    )


def sf_energy(params: ModelParams, p: Sequence[int], q: Sequence[int], solution: Optional[SfSolution] = None) -> float:
    """準粒子占有 (p, q) のエネルギー"""
    solution = solution or sf_solve(params)
    p = np.asarray(p, dtype=int)
    q = np.asarray(q, dtype=int)
    if p.size != solution.nu.size or q.size != solution.eta.size:
        raise ValueError(f"占有数の長さが不正です: p は {solution.nu.size}、q は {solution.eta.size} 個必要です")
    if np.any(p < 0) or np.any(q < 0):
        raise ValueError("占有数は0以上である必要があります")
    return float(solution.ground_energy + np.dot(solution.nu, p) + np.dot(solution.eta, q))


def sf_levels(params: ModelParams, count: int, solution: Optional[SfSolution] = None) -> List[SfLevel]:
    """準粒子を足していく最良優先探索で低い順に count 個"""
    solution = solution or sf_solve(params)
    quanta = np.concatenate([solution.nu, solution.eta])
    S = solution.nu.size
    e0 = solution.ground_energy

    def energy(label: Tuple[int, ...]) -> float:
        return float(e0 + np.dot(quanta, label))

    def successors(label: Tuple[int, ...]):
        for j in range(len(label)):
            occ = list(label)
            occ[j] += 1
            yield tuple(occ)

    found = best_first_levels(tuple([0] * quanta.size), energy, successors, count)
    return [SfLevel(energy=e, p=label[:S], q=label[S:]) for e, label in found]


def _sector_map(grid: ModeGrid) -> np.ndarray:
    """(F_1..F_K, f_1..f_S) から δb_k (k = 1..M−1) への直交行列"""
    M, S, K = grid.M, grid.S, grid.K
    Q = np.zeros((M - 1, K + S))
    half = 1.0 / math.sqrt(2.0)
    for k in range(1, S + 1):
        Q[k - 1, k - 1] = half
        Q[k - 1, K + k - 1] = half
        Q[M - k - 1, k - 1] = half
        Q[M - k - 1, K + k - 1] = -half
    if K > S:
        Q[K - 1, K - 1] = 1.0
    return Q


def sf_ground_distributions(params: ModelParams, solution: Optional[SfSolution] = None) -> SfGroundState:
    """ボゴリューボフ基底状態の運動量分布 m_k とサイト分布 n_j"""
    solution = solution or sf_solve(params)
    M, N = params.M, params.N
    grid = solution.grid

    F_cov = (solution.f_rot * np.sinh(0.5 * solution.beta) ** 2) @ solution.f_rot.T
    f_cov = np.diag(np.sinh(0.5 * solution.alpha) ** 2)
    sector_cov = np.zeros((grid.K + grid.S, grid.K + grid.S))
    sector_cov[: grid.K, : grid.K] = F_cov
    sector_cov[grid.K :, grid.K :] = f_cov
    Q = _sector_map(grid)

    x = solution.x[1:]
    rho = np.zeros((M, M))
    rho[1:, 1:] = np.outer(x, x) + Q @ sector_cov @ Q.T
    m0 = N - float(np.trace(rho[1:, 1:]))
    if m0 < 0:
        raise DepletionOverflow(m0)
    rho[0, 0] = m0
    rho[0, 1:] = rho[1:, 0] = math.sqrt(m0) * x

    density = sf_one_body_density(rho)
    n = np.real(np.diag(density)).copy()
    return SfGroundState(m=np.diag(rho).copy(), n=n, rho=rho)


def sf_one_body_density(rho_momentum: np.ndarray) -> np.ndarray:
    """運動量基底の ⟨b_q† b_k⟩ からサイト基底の ⟨a_j† a_l⟩ へ変換"""
    M = rho_momentum.shape[0]
    P = np.exp(2j * np.pi * np.outer(np.arange(M), np.arange(M)) / M) / math.sqrt(M)
    return P.conj().T @ rho_momentum @ P


def bdg_matrices(params: ModelParams) -> Tuple[np.ndarray, np.ndarray]:
    """k ≠ 0 モード上の二次形式の A, B 行列"""
    grid = mode_grid(params)
    M = params.M
    k_all = np.arange(1, M)
    A = np.diag(grid.g[np.minimum(k_all, M - k_all)]) - params.V0 / M
    B = np.zeros((M - 1, M - 1))
    Un = params.U * params.N / M
    for k in k_all:
        B[k - 1, M - k - 1] = -Un
    return A, B


def bdg_oracle_check(
    params: ModelParams,
    solution: Optional[SfSolution] = None,
    nu_hook: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    rel_tol: float = 1e-9,
) -> BdgReport:
    """{ν} ∪ {η} が二次形式のシンプレクティック固有値と一致するか検査

    nu_hook は ν を差し替える検査用フックです。
    """
    solution = solution or sf_solve(params)
    A, B = bdg_matrices(params)
    oracle = bdg_eig(A, B)
    nu = solution.nu if nu_hook is None else np.asarray(nu_hook(solution.nu), dtype=float)
    analytic = np.sort(np.concatenate([nu, solution.eta]))

    scale = max(float(np.abs(oracle).max(initial=0.0)), float(np.abs(analytic).max(initial=0.0)), np.finfo(float).tiny)
    diff = np.abs(oracle - analytic)
    mismatches = [
        {"index": int(i), "oracle": float(oracle[i]), "analytic": float(analytic[i]), "diff": float(diff[i])}
        for i in np.nonzero(diff > rel_tol * scale)[0]
    ]
    passed = not mismatches
    if not passed:
        logger.warning(f"BdG オラクルと不一致です: {len(mismatches)} 個, 最大差 {float(diff.max()):.3e}")
    return BdgReport(
        oracle=oracle,
        analytic=analytic,
        max_abs_diff=float(diff.max(initial=0.0)),
        scale=scale,
        passed=passed,
        mismatches=mismatches,
    )
