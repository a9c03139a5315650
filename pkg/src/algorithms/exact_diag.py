"""
厳密対角化モジュール

ボソンFock基底上で多体ハミルトニアン
    H = −(U/2)Σ n_i(n_i−1) − V0 n_0 − T Σ_i (a†_{i+1} a_i + h.c.)
を構築して対角化し、一体密度行列からサイト占有数と運動量占有数を求めます。
近似ソルバーの参照解（オラクル）として使用します。
"""

from dataclasses import dataclass
from typing import Dict, Iterator, List, Tuple, Union

import numpy as np
from scipy.sparse import coo_matrix

from ..models.params import ModelParams, fock_dimension
from ..utils.constants import DEFAULT_DEGENERACY_REL_TOL, DEFAULT_DIMENSION_CAP
from ..utils.logger import get_logger
from .numerics import sym_eig

logger = get_logger(__name__)


@dataclass(frozen=True)
class FockBasis:
    """占有数ベクトルの基底（n_0 について降順の辞書式順序）"""

    M: int
    N: int
    states: np.ndarray
    index: Dict[Tuple[int, ...], int]

    @property
    def size(self) -> int:
        return int(self.states.shape[0])

    def lookup(self, rows: np.ndarray) -> np.ndarray:
        """占有数ベクトルの行から基底インデックスを引く"""
        return np.fromiter((self.index[tuple(row)] for row in rows.tolist()), dtype=np.int64, count=rows.shape[0])


@dataclass(frozen=True)
class ExactSpectrum:
    """最低 k 準位の固有対（エネルギー昇順）"""

    energies: np.ndarray
    vectors: np.ndarray
    degeneracy_rel_tol: float = DEFAULT_DEGENERACY_REL_TOL

    def ground_cluster(self) -> List[int]:
        """基底エネルギーから相対 degeneracy_rel_tol 以内の準位"""
        e0 = float(self.energies[0])
        scale = max(abs(e0), np.finfo(float).tiny)
        return [i for i, e in enumerate(self.energies) if (e - e0) < self.degeneracy_rel_tol * scale]

    def cluster_ids(self) -> List[int]:
        """近縮退クラスター番号（下から0, 1, ...）"""
        ids: List[int] = []
        current = 0
        for i, e in enumerate(self.energies):
            if i > 0:
                prev = float(self.energies[i - 1])
                if (e - prev) >= self.degeneracy_rel_tol * max(abs(prev), np.finfo(float).tiny):
                    current += 1
            ids.append(current)
        return ids


@dataclass(frozen=True)
class OneBodyDensity:
    """一体密度行列 rho[j][l] = ⟨a_j† a_l⟩"""

    rho: np.ndarray

    @property
    def M(self) -> int:
        return int(self.rho.shape[0])

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.rho)))


def _compositions(N: int, M: int) -> Iterator[Tuple[int, ...]]:
    if M == 1:
        yield (N,)
        return
    for first in range(N, -1, -1):
        for rest in _compositions(N - first, M - 1):
            yield (first,) + rest


def build_basis(M: int, N: int, cap: int = DEFAULT_DIMENSION_CAP) -> FockBasis:
    """Fock基底を生成"""
    dimension = fock_dimension(M, N, cap)
    states = np.array(list(_compositions(N, M)), dtype=np.int64).reshape(dimension, M)
    index = {tuple(row): i for i, row in enumerate(states.tolist())}
    logger.debug(f"Fock基底を生成しました: M={M}, N={N}, 次元={dimension}")
    return FockBasis(M=M, N=N, states=states, index=index)


def _hop(basis: FockBasis, create: int, annihilate: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """a†_create a_annihilate の非ゼロ要素 (行, 列, 係数)"""
    states = basis.states
    source = np.nonzero(states[:, annihilate] > 0)[0]
    targets = states[source].copy()
    factor = np.sqrt(targets[:, annihilate] * (targets[:, create] + 1.0))
    targets[:, annihilate] -= 1
    targets[:, create] += 1
    return basis.lookup(targets), source, factor


def build_hamiltonian(params: ModelParams, basis: FockBasis) -> np.ndarray:
    """多体ハミルトニアンの密行列を構築"""
    if basis.M != params.M or basis.N != params.N:
        raise ValueError(f"基底 (M={basis.M}, N={basis.N}) がパラメータ (M={params.M}, N={params.N}) と一致しません")
    M, D = params.M, basis.size
    n = basis.states.astype(float)

    diagonal = -0.5 * params.U * np.sum(n * (n - 1.0), axis=1) - params.V0 * n[:, 0]
    rows: List[np.ndarray] = [np.arange(D)]
    cols: List[np.ndarray] = [np.arange(D)]
    data: List[np.ndarray] = [diagonal]

    for i in range(M):
        j = (i + 1) % M
        target, source, factor = _hop(basis, j, i)
        # a†_{i+1} a_i とそのエルミート共役
        rows.extend([target, source])
        cols.extend([source, target])
        data.extend([-params.T * factor, -params.T * factor])

    # COO の重複要素は加算される（M=2 の二重結合）
    H = coo_matrix((np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))), shape=(D, D)).toarray()
    logger.debug(f"ハミルトニアンを構築しました: 次元={D}")
    return H


def diagonalize(H: np.ndarray, k_levels: int, degeneracy_rel_tol: float = DEFAULT_DEGENERACY_REL_TOL) -> ExactSpectrum:
    """最低 k_levels 個の固有対を求める"""
    decomposition = sym_eig(H, count=k_levels)
    spectrum = ExactSpectrum(
        energies=decomposition.values, vectors=decomposition.vectors, degeneracy_rel_tol=degeneracy_rel_tol
    )
    cluster = spectrum.ground_cluster()
    if len(cluster) > 1:
        logger.info(f"基底状態は {len(cluster)} 重に近縮退しています")
        if len(cluster) == len(spectrum.energies) and len(cluster) < H.shape[0]:
            logger.warning("求めた準位がすべて基底クラスターに含まれます。k_levels を増やしてください")
    return spectrum


def one_body_density(state: np.ndarray, basis: FockBasis, norm_tol: float = 1e-8) -> OneBodyDensity:
    """状態 |ψ⟩ の一体密度行列 ⟨ψ|a_j† a_l|ψ⟩"""
    psi = np.asarray(state, dtype=complex).ravel()
    if psi.size != basis.size:
        raise ValueError(f"状態ベクトルの長さ {psi.size} が基底の次元 {basis.size} と一致しません")
    norm = float(np.vdot(psi, psi).real)
    if abs(norm - 1.0) > norm_tol:
        raise ValueError(f"状態ベクトルが正規化されていません: ⟨ψ|ψ⟩ = {norm:.12f}")

    M = basis.M
    weights = np.abs(psi) ** 2
    rho = np.zeros((M, M), dtype=complex)
    rho[np.diag_indices(M)] = weights @ basis.states
    for l in range(M):
        for j in range(M):
            if j == l:
                continue
            target, source, factor = _hop(basis, j, l)
            rho[j, l] = np.sum(np.conj(psi[target]) * psi[source] * factor)
    return OneBodyDensity(rho=rho)


def ground_state_density(spectrum: ExactSpectrum, basis: FockBasis) -> OneBodyDensity:
    """基底クラスターで平均した一体密度行列"""
    cluster = spectrum.ground_cluster()
    rho = sum(one_body_density(spectrum.vectors[:, i], basis).rho for i in cluster) / len(cluster)
    return OneBodyDensity(rho=rho)


def _as_matrix(rho: Union[OneBodyDensity, np.ndarray]) -> np.ndarray:
    return rho.rho if isinstance(rho, OneBodyDensity) else np.asarray(rho)


def site_occupations(rho: Union[OneBodyDensity, np.ndarray]) -> np.ndarray:
    """n_j = rho[j][j]"""
    return np.real(np.diag(_as_matrix(rho))).copy()


def momentum_occupations(rho: Union[OneBodyDensity, np.ndarray], imag_tol: float = 1e-10) -> np.ndarray:
    """m_k = (1/M) Σ_{j,l} e^{ik̃(j−l)} rho[j][l]"""
    matrix = _as_matrix(rho)
    M = matrix.shape[0]
    phases = np.exp(2j * np.pi * np.outer(np.arange(M), np.arange(M)) / M)
    m = np.einsum("kj,jl,kl->k", phases, matrix, np.conj(phases)) / M
    residue = float(np.abs(m.imag).max())
    if residue > imag_tol * max(1.0, float(np.abs(m.real).max())):
        logger.warning(f"運動量占有数に虚部が残っています: {residue:.3e}")
    return m.real.copy()


def exact_spectrum(
    params: ModelParams,
    k_levels: int,
    cap: int = DEFAULT_DIMENSION_CAP,
    degeneracy_rel_tol: float = DEFAULT_DEGENERACY_REL_TOL,
) -> Tuple[FockBasis, ExactSpectrum]:
    """基底生成から対角化までをまとめて実行"""
    basis = build_basis(params.M, params.N, cap)
    H = build_hamiltonian(params, basis)
    return basis, diagonalize(H, min(k_levels, basis.size), degeneracy_rel_tol)
