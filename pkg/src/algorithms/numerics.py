"""
数値計算カーネル

- 区間保証付きの根探索（scipy の brentq）
- 極で区切られた有理方程式（永年方程式）のソルバー
- 実対称行列の固有値分解
- ボゴリューボフ・ド・ジャン（BdG）二次形式のシンプレクティック固有値
- 準位列挙用の最良優先探索
"""

import heapq
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, List, Optional, Tuple

import numpy as np
import scipy.linalg
from scipy.optimize import root_scalar

from ..models.errors import NoBracket, NoConvergence, Unstable
from ..utils.logger import get_logger

logger = get_logger(__name__)

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class RootConfig:
    """根探索の設定

    rel_tol, abs_tol は brentq の rtol, xtol に渡します。
    永年方程式では根を局所的な極間隔で正規化した座標で解くため、
    abs_tol はその正規化座標での絶対許容誤差になります。
    """

    rel_tol: float = 4.0 * _EPS
    abs_tol: float = 1e-20
    max_iter: int = 200
    pole_offset_frac: float = 1e-9
    merge_rel_tol: float = 1e-12

    def __post_init__(self):
        errors = []
        if not self.rel_tol >= 4.0 * _EPS:
            errors.append(f"rel_tol は 4ε 以上である必要があります: {self.rel_tol}")
        if not self.abs_tol > 0:
            errors.append(f"abs_tol は正の値である必要があります: {self.abs_tol}")
        if self.max_iter < 1:
            errors.append(f"max_iter は1以上である必要があります: {self.max_iter}")
        if not (0 < self.pole_offset_frac < 0.5):
            errors.append(f"pole_offset_frac は (0, 0.5) の範囲である必要があります: {self.pole_offset_frac}")
        if not self.merge_rel_tol >= 0:
            errors.append(f"merge_rel_tol は0以上である必要があります: {self.merge_rel_tol}")
        if errors:
            raise ValueError("根探索設定エラー:\n" + "\n".join(f"- {e}" for e in errors))


DEFAULT_ROOT_CONFIG = RootConfig()


class SecularSide(Enum):
    """永年方程式の符号

    ABOVE: rhs = Σ w2/(λ − d)  （各区間に1根 + 最大極の上に1根）
    BELOW: rhs = −Σ w2/(λ − d) （最小極の下に1根 + 各区間に1根）
    """

    ABOVE = "above"
    BELOW = "below"


@dataclass(frozen=True)
class SecularProblem:
    """対角 + ランク1 型の永年方程式"""

    poles: np.ndarray
    weights: np.ndarray
    rhs_const: float = 1.0

    def __post_init__(self):
        poles = np.asarray(self.poles, dtype=float).ravel()
        weights = np.asarray(self.weights, dtype=float).ravel()
        if poles.size == 0:
            raise ValueError("極が空の永年方程式は解けません")
        if poles.shape != weights.shape:
            raise ValueError(f"極と重みの長さが一致しません: {poles.size} != {weights.size}")
        if np.any(np.diff(poles) < 0):
            raise ValueError("極は昇順である必要があります")
        if not np.all(weights > 0):
            raise ValueError("重みはすべて正である必要があります")
        if not self.rhs_const > 0:
            raise ValueError(f"右辺定数は正の値である必要があります: {self.rhs_const}")
        object.__setattr__(self, "poles", poles)
        object.__setattr__(self, "weights", weights)

    def merged(self, merge_rel_tol: float) -> "SecularProblem":
        """近接した極を重みを合算して統合"""
        span = self.poles[-1] - self.poles[0]
        threshold = merge_rel_tol * span
        poles = [self.poles[0]]
        weights = [self.weights[0]]
        for d, w in zip(self.poles[1:], self.weights[1:]):
            if d - poles[-1] <= threshold:
                weights[-1] += w
            else:
                poles.append(d)
                weights.append(w)
        return SecularProblem(np.array(poles), np.array(weights), self.rhs_const)


@dataclass(frozen=True)
class SecularSolution:
    """永年方程式の根

    各根は最寄りの極 `origin` からのオフセット `offset` としても保持し、
    λ − d_j を桁落ちなしに評価できるようにします。
    """

    problem: SecularProblem
    side: SecularSide
    roots: np.ndarray
    origin: np.ndarray
    offset: np.ndarray
    merged: bool

    def differences(self) -> np.ndarray:
        """行列 D[r, j] = root_r − d_j"""
        d = self.problem.poles
        return (d[self.origin][:, None] - d[None, :]) + self.offset[:, None]

    def relative_residuals(self) -> np.ndarray:
        """各根での定義式の相対残差"""
        return secular_residual(self.problem, self.side, self.differences())


def secular_residual(problem: SecularProblem, side: SecularSide, differences: np.ndarray) -> np.ndarray:
    """λ − d_j を与えたときの永年方程式の相対残差

    differences は1行が1つの λ に対応する (…, 極数) 配列です。
    残差は max(rhs, Σ|w2/(λ − d)|) で正規化します。
    """
    differences = np.atleast_2d(np.asarray(differences, dtype=float))
    terms = problem.weights[None, :] / differences
    sign = 1.0 if side is SecularSide.ABOVE else -1.0
    value = sign * terms.sum(axis=1) - problem.rhs_const
    scale = np.maximum(problem.rhs_const, np.abs(terms).sum(axis=1))
    return np.abs(value) / scale


def solve_bracketed(f: Callable[[float], float], lo: float, hi: float, cfg: RootConfig = DEFAULT_ROOT_CONFIG) -> float:
    """符号変化する区間 [lo, hi] 内の根を brentq で求める"""
    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0:
        return float(lo)
    if f_hi == 0:
        return float(hi)
    if not (np.isfinite(f_lo) and np.isfinite(f_hi)) or np.sign(f_lo) == np.sign(f_hi):
        raise NoBracket(
            f"区間 [{lo:.6e}, {hi:.6e}] で符号変化がありません",
            {"lo": lo, "hi": hi, "f_lo": f_lo, "f_hi": f_hi},
        )
    sol = root_scalar(f, bracket=[lo, hi], method="brentq", xtol=cfg.abs_tol, rtol=cfg.rel_tol, maxiter=cfg.max_iter)
    if not sol.converged:
        raise NoConvergence(
            f"brentq が {cfg.max_iter} 回で収束しませんでした: {sol.flag}",
            {"lo": lo, "hi": hi, "iterations": sol.iterations},
        )
    return float(sol.root)


def _shifted_secular(problem: SecularProblem, sign: float, origin: int, scale: float) -> Callable[[float], float]:
    """極 origin を原点、scale を単位とした座標 t での永年関数"""
    shifts = problem.poles[origin] - problem.poles
    weights = problem.weights
    rhs = problem.rhs_const

    def func(t: float) -> float:
        return sign * float(np.sum(weights / (shifts + scale * t))) - rhs

    return func


def _pole_side_inset(func: Callable[[float], float], direction: float, pole_sign: float, cfg: RootConfig) -> float:
    """極側の区間端を決める

    pole_offset_frac から始めて極へ向かって幾何的に縮め、
    極の発散符号が得られた位置を返します。
    """
    inset = cfg.pole_offset_frac
    while inset > 1e-300:
        value = func(direction * inset)
        if np.isfinite(value) and np.sign(value) == pole_sign:
            return direction * inset
        inset *= 0.1
    raise NoBracket("極の近傍で符号変化が見つかりません", {"direction": direction})


def _solve_interval(problem: SecularProblem, sign: float, lower: int, cfg: RootConfig) -> Tuple[int, float]:
    """区間 (d_lower, d_lower+1) の根を (原点の極, オフセット) で返す"""
    gap = problem.poles[lower + 1] - problem.poles[lower]
    # 下端の極近傍で関数値は +sign·∞、上端では −sign·∞
    lower_func = _shifted_secular(problem, sign, lower, gap)
    mid_value = lower_func(0.5)
    if mid_value == 0:
        return lower, 0.5 * gap
    root_in_lower_half = np.sign(mid_value) != np.sign(sign)
    if root_in_lower_half:
        lo = _pole_side_inset(lower_func, 1.0, sign, cfg)
        t = solve_bracketed(lower_func, lo, 0.5, cfg)
        return lower, t * gap
    upper_func = _shifted_secular(problem, sign, lower + 1, gap)
    hi = _pole_side_inset(upper_func, -1.0, -sign, cfg)
    t = solve_bracketed(upper_func, -0.5, hi, cfg)
    return lower + 1, t * gap


def _solve_outer(problem: SecularProblem, side: SecularSide, cfg: RootConfig) -> Tuple[int, float]:
    """極の外側（ABOVE なら最大極の上、BELOW なら最小極の下）の根"""
    # 根はおおよそ最外極から Σw2/rhs 以内にある
    reach = float(problem.weights.sum() / problem.rhs_const)
    if side is SecularSide.ABOVE:
        origin, direction, sign = problem.poles.size - 1, 1.0, 1.0
    else:
        origin, direction, sign = 0, -1.0, -1.0
    func = _shifted_secular(problem, sign, origin, reach)
    # 外側の極の近傍ではどちらの向きでも +∞ に発散する
    pole_side = _pole_side_inset(func, direction, 1.0, cfg)

    # 遠方端 t = ±1 は丸めで残差が 0 以上になり得るので外へ広げる
    far = direction * 1.0
    value = func(far)
    for _ in range(60):
        if value < 0:
            break
        if abs(value) <= 8.0 * _EPS * problem.rhs_const:
            return origin, far * reach
        far *= 2.0
        value = func(far)
    else:
        raise NoBracket("外側の根の区間が見つかりません", {"side": side.value, "far": far * reach})

    lo, hi = sorted((pole_side, far))
    t = solve_bracketed(func, lo, hi, cfg)
    return origin, t * reach


def solve_secular(problem: SecularProblem, side: SecularSide, cfg: RootConfig = DEFAULT_ROOT_CONFIG) -> SecularSolution:
    """永年方程式のすべての根を昇順で求める

    縮退した極（間隔 ≤ merge_rel_tol·(d_max − d_min)）は重みを合算して統合してから解きます。
    """
    side = SecularSide(side)
    work = problem.merged(cfg.merge_rel_tol)
    was_merged = work.poles.size != problem.poles.size
    if was_merged:
        logger.debug(f"縮退した極を統合しました: {problem.poles.size} -> {work.poles.size}")

    sign = 1.0 if side is SecularSide.ABOVE else -1.0
    located: List[Tuple[int, float]] = [_solve_interval(work, sign, i, cfg) for i in range(work.poles.size - 1)]
    outer = _solve_outer(work, side, cfg)
    if side is SecularSide.ABOVE:
        located.append(outer)
    else:
        located.insert(0, outer)

    origin = np.array([o for o, _ in located], dtype=int)
    offset = np.array([delta for _, delta in located], dtype=float)
    roots = work.poles[origin] + offset
    solution = SecularSolution(work, side, roots, origin, offset, was_merged)
    logger.debug(f"永年方程式を解きました: side={side.value}, 根の数={roots.size}, 最大相対残差={solution.relative_residuals().max():.2e}")
    return solution


@dataclass(frozen=True)
class EigenDecomposition:
    """固有値（昇順）と正規直交固有ベクトル（列）"""

    values: np.ndarray
    vectors: np.ndarray


def _check_symmetric(matrix: np.ndarray, rel_tol: float, name: str) -> np.ndarray:
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} は正方行列である必要があります: shape={a.shape}")
    scale = max(float(np.abs(a).max(initial=0.0)), np.finfo(float).tiny)
    asymmetry = float(np.abs(a - a.T).max(initial=0.0))
    if asymmetry > rel_tol * scale:
        raise ValueError(f"{name} が対称ではありません: 非対称度 {asymmetry:.3e} (スケール {scale:.3e})")
    return a


def fix_eigenvector_signs(vectors: np.ndarray) -> np.ndarray:
    """各列の絶対値最大成分を正にそろえる"""
    if vectors.size == 0:
        return vectors
    pivots = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[pivots, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def sym_eig(matrix: np.ndarray, rel_tol: float = 1e-12, count: Optional[int] = None) -> EigenDecomposition:
    """実対称行列の固有値分解

    count を指定すると下から count 個の固有対だけを求めます。
    """
    a = _check_symmetric(matrix, rel_tol, "行列")
    a = 0.5 * (a + a.T)
    if count is None or count >= a.shape[0]:
        values, vectors = scipy.linalg.eigh(a)
    else:
        if count < 1:
            raise ValueError(f"count は1以上である必要があります: {count}")
        values, vectors = scipy.linalg.eigh(a, subset_by_index=[0, count - 1])
    return EigenDecomposition(values=values, vectors=fix_eigenvector_signs(vectors))


def bdg_eig(A: np.ndarray, B: np.ndarray, rel_tol: float = 1e-12) -> np.ndarray:
    """二次形式 ½Σ(A(b†b + bb†) + B(b†b† + bb)) の正の振動数（昇順）

    ω² は (A−B)(A+B) の固有値で、A+B のコレスキー分解 LLᵀ による
    対称化 Lᵀ(A−B)L から求めます。
    """
    a = _check_symmetric(A, rel_tol, "A")
    b = _check_symmetric(B, rel_tol, "B")
    if a.shape != b.shape:
        raise ValueError(f"A と B の形状が一致しません: {a.shape} != {b.shape}")
    plus = 0.5 * ((a + b) + (a + b).T)
    minus = 0.5 * ((a - b) + (a - b).T)

    for which, part in (("+", plus), ("-", minus)):
        lowest = float(scipy.linalg.eigvalsh(part)[0])
        if lowest <= 0:
            raise Unstable(which, lowest)

    lower = scipy.linalg.cholesky(plus, lower=True)
    product = lower.T @ minus @ lower
    omega_sq = scipy.linalg.eigvalsh(0.5 * (product + product.T))
    return np.sqrt(np.clip(omega_sq, 0.0, None))


Label = Tuple[int, ...]


def best_first_levels(
    start: Label,
    energy: Callable[[Label], float],
    successors: Callable[[Label], Iterable[Label]],
    count: int,
) -> List[Tuple[float, Label]]:
    """エネルギーが単調非減少な遷移で到達できる状態を低い順に列挙

    同じエネルギーはラベルの辞書順で並べます。
    """
    if count < 1:
        raise ValueError(f"count は1以上である必要があります: {count}")
    heap: List[Tuple[float, Label]] = [(energy(start), start)]
    seen = {start}
    levels: List[Tuple[float, Label]] = []
    while heap and len(levels) < count:
        value, label = heapq.heappop(heap)
        levels.append((value, label))
        for nxt in successors(label):
            if nxt not in seen:
                seen.add(nxt)
                heapq.heappush(heap, (energy(nxt), nxt))
    return levels
