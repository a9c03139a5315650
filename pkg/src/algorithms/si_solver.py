"""
強相互作用（SI）ソルバー

有効井戸 w = UN + V0 を持つ一体ホッピング問題として
一粒子スペクトル（永年方程式）、多体準位、近似式、基底状態の分布を求めます。

一粒子準位:
    f セクター  −2T c_k            (k = 1..S)
    D セクター  −λ_q, λ_q = 2T μ_q  (q = 0..K)
μ_0 = cosh y は全極の上にある孤立根、μ_q (q ≥ 1) は区間 (c_q, c_{q−1}) の根です。
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..models.errors import Singular
from ..models.params import ModelParams, ModeGrid, derive, mode_grid
from ..utils.logger import get_logger
from .numerics import (
    DEFAULT_ROOT_CONFIG,
    RootConfig,
    SecularProblem,
    SecularSide,
    best_first_levels,
    solve_bracketed,
    solve_secular,
)

logger = get_logger(__name__)


class SiBranch(Enum):
    """近似一粒子エネルギーの分枝"""

    ISOLATED_LARGE_T = "isolated_large_t"
    ISOLATED_SMALL_T = "isolated_small_t"
    DOUBLET = "doublet"
    UNIFORM = "uniform"
    QUADRATIC = "quadratic"


@dataclass(frozen=True)
class SiSpectrum:
    """SI 一粒子スペクトル

    lambdas[q], mu[q] は q = 0..K、f_energy[k−1] は k = 1..S。
    B は (K+1)×(K+1) の直交行列、A[p] は正の規格化振幅です。
    gaps[p, k] = μ_p − c_k を桁落ちなしで保持します。
    """

    params: ModelParams
    grid: ModeGrid
    lambdas: np.ndarray
    mu: np.ndarray
    f_energy: np.ndarray
    B: np.ndarray
    A: np.ndarray
    gaps: np.ndarray
    y: Optional[float]
    validity: Dict[str, object] = field(default_factory=dict)

    def sp_energies(self) -> np.ndarray:
        """一粒子エネルギーの多重集合（昇順）"""
        return np.sort(np.concatenate([self.f_energy, -self.lambdas]))

    def secular_residuals(self) -> np.ndarray:
        """各 λ_q での 1 = (w/M)Σ r_k²/(λ − 2Tc_k) の相対残差"""
        w = derive(self.params).w
        T, M = self.params.T, self.params.M
        if w == 0:
            return np.zeros(self.lambdas.size)
        terms = (w / (2.0 * T * M)) * self.grid.r2[None, :] / self.gaps
        return np.abs(terms.sum(axis=1) - 1.0) / np.maximum(1.0, np.abs(terms).sum(axis=1))


@dataclass(frozen=True)
class SiApproximation:
    """近似 μ とレジームフラグ"""

    branch: SiBranch
    mu: np.ndarray
    flags: Dict[str, float]
    regime_matches: bool


@dataclass(frozen=True)
class SiGroundState:
    """SI 基底状態（su(M) コヒーレント状態）の振幅と分布"""

    y: float
    x: np.ndarray
    xi: np.ndarray
    n: np.ndarray
    m: np.ndarray


@dataclass(frozen=True)
class SiLevel:
    """多体準位 E = C_N − 2TΣc_kℓ_k − Σλ_q m_q"""

    energy: float
    ell: Tuple[int, ...]
    m: Tuple[int, ...]

    @property
    def label(self) -> str:
        return f"l=({','.join(map(str, self.ell))});m=({','.join(map(str, self.m))})"


def solution_count(M: int) -> int:
    """永年方程式の根の個数"""
    if M < 2:
        raise ValueError(f"M は2以上である必要があります: {M}")
    return M // 2 + 1 if M % 2 == 0 else (M + 1) // 2


def one_body_matrix(params: ModelParams) -> np.ndarray:
    """有効一体ハミルトニアン h（h_00 = −w、隣接 −T、周期境界）"""
    M, T = params.M, params.T
    h = np.zeros((M, M))
    for j in range(M):
        h[j, (j + 1) % M] += -T
        h[(j + 1) % M, j] += -T
    h[0, 0] = -derive(params).w
    return h


def hyperbolic_pole_sum(y: float, M: int) -> Tuple[float, float]:
    """Σ_k 1/(cosh y − c_k) と閉形式 M sinh(My)/(sinh y (cosh My − 1))"""
    c = np.cos(2.0 * np.pi * np.arange(M) / M)
    direct = float(np.sum(1.0 / (math.cosh(y) - c)))
    closed = M * math.sinh(M * y) / (math.sinh(y) * (math.cosh(M * y) - 1.0))
    return direct, closed


def trigonometric_pole_sum(y: float, M: int) -> Tuple[float, float]:
    """Σ_k 1/(cos y − c_k) と閉形式 −M sin(My)/(sin y (1 − cos My))"""
    c = np.cos(2.0 * np.pi * np.arange(M) / M)
    direct = float(np.sum(1.0 / (math.cos(y) - c)))
    closed = -M * math.sin(M * y) / (math.sin(y) * (1.0 - math.cos(M * y)))
    return direct, closed


def isolated_root(T: float, w: float, M: int, cfg: RootConfig = DEFAULT_ROOT_CONFIG) -> float:
    """(2T/w) sinh y = coth(My/2) の唯一の正の根 y"""
    if w <= 0:
        raise ValueError(f"孤立根は w > 0 でのみ存在します: w={w}")
    ratio = w / (2.0 * T)

    def residual(y: float) -> float:
        return math.sinh(y) / ratio - 1.0 / math.tanh(0.5 * M * y)

    # residual は単調増加で residual(lo) ≤ 0 ≤ residual(hi)
    lo = math.asinh(ratio)
    hi = math.asinh(ratio / math.tanh(0.5 * M * lo))
    if hi <= lo or residual(lo) >= 0:
        return lo
    if residual(hi) <= 0:
        return hi
    return solve_bracketed(residual, lo, hi, cfg)


def _pure_hopping_spectrum(params: ModelParams, grid: ModeGrid) -> SiSpectrum:
    """w = 0: 並進対称なスペクトル（B = 単位行列）"""
    K = grid.K
    mu = grid.c[: K + 1].copy()
    gaps = mu[:, None] - grid.c[None, : K + 1]
    logger.debug("w = 0 のため並進対称スペクトルにフォールバックします")
    return SiSpectrum(
        params=params,
        grid=grid,
        lambdas=2.0 * params.T * mu,
        mu=mu,
        f_energy=-2.0 * params.T * grid.c[1 : grid.S + 1],
        B=np.eye(K + 1),
        A=grid.r.copy(),
        gaps=gaps,
        y=None,
        validity=_validity_flags(params, mu, grid),
    )


def _validity_flags(params: ModelParams, mu: np.ndarray, grid: ModeGrid) -> Dict[str, object]:
    """λ_0 優位性と SI 近似の妥当性"""
    reasons: List[str] = []
    w = derive(params).w
    if w == 0:
        reasons.append("w=0")
    if params.U == 0:
        reasons.append("U=0")
    if params.V0 == 0:
        reasons.append("V0=0")
    dominant = bool(mu.size > 0 and np.all(mu[0] > mu[1:]) and mu[0] > grid.c[0])
    return {"lambda0_dominant": dominant, "justified": not reasons, "reasons": reasons}


def si_sp_energies(params: ModelParams, cfg: RootConfig = DEFAULT_ROOT_CONFIG) -> SiSpectrum:
    """SI 一粒子スペクトルと直交回転 B を求める"""
    grid = mode_grid(params)
    w = derive(params).w
    T, M, K = params.T, params.M, grid.K
    if w == 0:
        return _pure_hopping_spectrum(params, grid)

    # 帯内の根: 2TM/w = Σ_{k=0..K} r_k²/(μ − c_k)、極は c_K < ... < c_0
    poles = grid.c[K::-1].copy()
    weights = (w / (2.0 * T * M)) * grid.r2[::-1]
    solution = solve_secular(SecularProblem(poles, weights, 1.0), SecularSide.ABOVE, cfg)
    if solution.merged:
        raise Singular("SI 永年方程式の極が縮退しています", "poles")
    diff = solution.differences()  # diff[i, j] = root_i − c_{K−j}

    y = isolated_root(T, w, M, cfg)
    k_all = np.arange(K + 1)
    # μ_0 − c_k = 2 sinh²(y/2) + 2 sin²(πk/M)
    gap0 = 2.0 * math.sinh(0.5 * y) ** 2 + 2.0 * np.sin(np.pi * k_all / M) ** 2

    mu = np.empty(K + 1)
    gaps = np.empty((K + 1, K + 1))
    mu[0] = math.cosh(y)
    gaps[0] = gap0
    for q in range(1, K + 1):
        i = K - q
        mu[q] = solution.roots[i]
        gaps[q] = diff[i, K - k_all]

    outer_gap = abs(solution.roots[-1] - mu[0]) / mu[0]
    logger.debug(f"孤立根: μ_0 = {mu[0]:.15g}（永年方程式の最大根との相対差 {outer_gap:.2e}）")

    coeff = (w / (2.0 * T * M)) * grid.r[None, :] / gaps
    A = 1.0 / np.sqrt(np.sum(coeff**2, axis=1))
    B = A[:, None] * coeff

    spectrum = SiSpectrum(
        params=params,
        grid=grid,
        lambdas=2.0 * T * mu,
        mu=mu,
        f_energy=-2.0 * T * grid.c[1 : grid.S + 1],
        B=B,
        A=A,
        gaps=gaps,
        y=y,
        validity=_validity_flags(params, mu, grid),
    )
    if not spectrum.validity["lambda0_dominant"]:
        logger.warning("λ_0 が他の一粒子準位より大きくありません")
    return spectrum


def _small_quadratic_root(a: float, b: float, c: float) -> float:
    """a x² + b x + c = 0 の絶対値が小さい方の実根"""
    disc = b * b - 4.0 * a * c
    if disc < 0:
        return float("nan")
    if a == 0:
        return -c / b
    q = -0.5 * (b + math.copysign(math.sqrt(disc), b if b != 0 else 1.0))
    return c / q if q != 0 else float("nan")


def si_sp_energies_approx(params: ModelParams, branch) -> SiApproximation:
    """閉形式による近似 μ

    isolated_* は μ_0 のみ、それ以外は帯内の μ_q (q = 1..K) を返します。
    """
    branch = SiBranch(branch)
    grid = mode_grid(params)
    w = derive(params).w
    T, M, K = params.T, params.M, grid.K
    if w <= 0:
        raise ValueError("近似式は w > 0 でのみ定義されます")
    eta = 8.0 * T / (w * M)
    flags = {"T_over_w": T / w, "M_over_4": M / 4.0, "eta": eta}
    large_hopping = T / w > M / 4.0
    q = np.arange(1, K + 1)

    if branch is SiBranch.ISOLATED_LARGE_T:
        mu = np.array([1.0 + w / (2.0 * T * M)])
        matches = large_hopping
    elif branch is SiBranch.ISOLATED_SMALL_T:
        mu = np.array([math.sqrt(1.0 + w * w / (4.0 * T * T))])
        matches = not large_hopping
    elif branch is SiBranch.DOUBLET:
        # 極 c_q の上に r_q² w/(2TM) だけずれる
        mu = grid.c[q] + grid.r2[q] * w / (2.0 * T * M)
        matches = large_hopping
    elif branch is SiBranch.UNIFORM:
        y_bar = np.pi * (2 * q - 1) / M
        mu = np.cos(y_bar) - (4.0 * T / (w * M)) * np.sin(y_bar) ** 2
        matches = not large_hopping
    else:
        eps = np.array(
            [_small_quadratic_root(eta * grid.c[k] - 1.0, eta * grid.s[k], 8.0 / M**2) for k in q]
        )
        # 自己対の極 (s_k = 0) では ε の符号は μ に影響しない
        mu = np.cos(grid.y[q] - np.abs(eps))
        matches = large_hopping

    if not matches:
        logger.debug(f"近似 {branch.value} はレジーム外です: T/w={T / w:.4g}, M/4={M / 4.0:.4g}")
    return SiApproximation(branch=branch, mu=mu, flags=flags, regime_matches=bool(matches))


def si_energy(params: ModelParams, ell: Sequence[int], m: Sequence[int], spectrum: Optional[SiSpectrum] = None) -> float:
    """占有数 (ℓ, m) の多体エネルギー"""
    spectrum = spectrum or si_sp_energies(params)
    grid = spectrum.grid
    ell = np.asarray(ell, dtype=int)
    m = np.asarray(m, dtype=int)
    if ell.size != grid.S or m.size != grid.K + 1:
        raise ValueError(f"占有数の長さが不正です: ℓ は {grid.S}、m は {grid.K + 1} 個必要です")
    if np.any(ell < 0) or np.any(m < 0):
        raise ValueError("占有数は0以上である必要があります")
    total = int(ell.sum() + m.sum())
    if total != params.N:
        raise ValueError(f"占有数の合計 {total} がボソン数 N={params.N} と一致しません")
    C_N = derive(params).C_N
    return float(C_N - 2.0 * params.T * np.dot(grid.c[1 : grid.S + 1], ell) - np.dot(spectrum.lambdas, m))


def si_levels(params: ModelParams, count: int, spectrum: Optional[SiSpectrum] = None) -> List[SiLevel]:
    """多体準位を低い順に count 個列挙"""
    spectrum = spectrum or si_sp_energies(params)
    S = spectrum.grid.S
    sp = np.concatenate([spectrum.f_energy, -spectrum.lambdas])
    lowest = int(np.argmin(sp))
    C_N = derive(params).C_N

    def energy(label: Tuple[int, ...]) -> float:
        return float(C_N + np.dot(sp, label))

    def successors(label: Tuple[int, ...]):
        if label[lowest] == 0:
            return
        for j in range(len(label)):
            if j != lowest:
                occ = list(label)
                occ[lowest] -= 1
                occ[j] += 1
                yield tuple(occ)

    start = [0] * sp.size
    start[lowest] = params.N
    found = best_first_levels(tuple(start), energy, successors, count)
    return [SiLevel(energy=e, ell=label[:S], m=label[S:]) for e, label in found]


def si_site_amplitudes(x: np.ndarray) -> np.ndarray:
    """ξ_j = Σ_k x_k e^{ik̃j}/√M"""
    M = x.size
    phases = np.exp(2j * np.pi * np.outer(np.arange(M), np.arange(M)) / M)
    return phases @ x / math.sqrt(M)


def si_ground_distributions(params: ModelParams, spectrum: Optional[SiSpectrum] = None) -> SiGroundState:
    """基底状態のサイト分布 n_j と運動量分布 m_k（閉形式）

    e^{−My} でスケールした式で評価し、大きな y でもオーバーフローしません。
    """
    spectrum = spectrum or si_sp_energies(params)
    if spectrum.y is None or spectrum.mu[0] <= 1.0:
        raise Singular("λ_0 ≤ 2T のため束縛状態のパラメータ y が存在しません", "y")
    y = spectrum.y
    M, N = params.M, params.N
    grid = spectrum.grid

    E = math.exp(-M * y)
    den = M * E + 0.5 * (1.0 - E * E) / math.tanh(y)  # (M + sinh(My) coth y) e^{−My}

    a = np.abs(M / 2.0 - np.arange(M))
    n = N * (np.exp((2.0 * a - M) * y) + 2.0 * E + np.exp(-(2.0 * a + M) * y)) / (2.0 * den)

    k_all = np.arange(M)
    mu_minus_c = 2.0 * math.sinh(0.5 * y) ** 2 + 2.0 * np.sin(np.pi * k_all / M) ** 2
    x_sq = (1.0 - E) ** 2 * (math.sinh(y) / mu_minus_c) ** 2 / (2.0 * M * den)
    m = N * x_sq

    # D_0† の運動量振幅 x_k = B_{0,κ}/r_κ (κ = min(k, M−k))
    kappa = np.minimum(k_all, M - k_all)
    x = spectrum.B[0, kappa] / grid.r[kappa]
    xi = si_site_amplitudes(x).real
    return SiGroundState(y=y, x=x, xi=xi, n=n, m=m)


def si_validity(params: ModelParams, spectrum: Optional[SiSpectrum] = None) -> Dict[str, object]:
    """λ_0 優位性と SI 近似が正当化されるか（w > 0, U > 0, V0 > 0）"""
    spectrum = spectrum or si_sp_energies(params)
    return dict(spectrum.validity)
