#!/usr/bin/env python3
"""
モデル層のテスト

- パラメータ検証と無次元量からの生成
- 派生スカラー
- 運動量モード格子
- 半古典レジーム分類
- Fock空間の次元
"""

import math
import unittest

import numpy as np

from src.models.errors import DimensionCapExceeded, SemiclassicalUndefined
from src.models.params import (
    ModelParams,
    SeparatrixSide,
    classify_regime,
    derive,
    fock_dimension,
    mode_grid,
)


class TestModelParams(unittest.TestCase):
    """パラメータ検証のテスト"""

    def test_valid_params(self):
        """正常なパラメータ"""
        params = ModelParams(M=6, N=6, T=0.5, U=0.05, V0=0.4)
        self.assertEqual(params.as_dict(), {"M": 6, "N": 6, "T": 0.5, "U": 0.05, "V0": 0.4})

    def test_invalid_params_collect_all_errors(self):
        """不正な値はまとめて報告される"""
        with self.assertRaises(ValueError) as ctx:
            ModelParams(M=1, N=0, T=0.0, U=-1.0, V0=-0.1)
        message = str(ctx.exception)
        self.assertIn("パラメータエラー", message)
        for token in ("M", "N", "T", "U", "V0"):
            self.assertIn(token, message)

    def test_zero_interaction_and_well_allowed(self):
        """U = 0, V0 = 0 は許可"""
        params = ModelParams(M=3, N=1, T=1.0, U=0.0, V0=0.0)
        self.assertEqual(params.U, 0.0)

    def test_from_dimensionless(self):
        """τ, v, UN からの生成"""
        params = ModelParams.from_dimensionless(M=6, N=6, tau=1.0, v=1.0 / 6.0, UN=0.3)
        self.assertAlmostEqual(params.T, 0.3)
        self.assertAlmostEqual(params.U, 0.05)
        self.assertAlmostEqual(params.V0, 0.05)
        with self.assertRaises(ValueError):
            ModelParams.from_dimensionless(M=6, N=6, tau=1.0, v=0.1, UN=0.0)

    def test_from_mapping_physical(self):
        """物理量の辞書から生成"""
        params = ModelParams.from_mapping({"M": 7, "N": 8, "T": 1.0, "U": 0.2, "V0": 0.2, "tau": None})
        self.assertEqual((params.M, params.N), (7, 8))
        self.assertAlmostEqual(params.V0, 0.2)

    def test_from_mapping_dimensionless_overrides(self):
        """tau, v は UN 単位で T, V0 を置き換える"""
        params = ModelParams.from_mapping({"M": 6, "N": 6, "U": 0.05, "T": 9.0, "V0": 9.0, "tau": 2.0, "v": 0.5})
        self.assertAlmostEqual(params.T, 0.6)
        self.assertAlmostEqual(params.V0, 0.15)

        scaled = ModelParams.from_mapping({"M": 6, "N": 6, "tau": 1.0, "v": 1.0, "UN_scale": 2.0})
        self.assertAlmostEqual(scaled.U, 2.0 / 6.0)
        self.assertAlmostEqual(scaled.T, 2.0)

    def test_from_mapping_missing(self):
        """必須値の欠落"""
        with self.assertRaises(ValueError):
            ModelParams.from_mapping({"N": 6, "T": 1.0, "U": 0.1, "V0": 0.1})
        with self.assertRaises(ValueError):
            ModelParams.from_mapping({"M": 6, "N": 6, "T": 1.0})
        with self.assertRaises(ValueError):
            ModelParams.from_mapping({"M": 6, "N": 6, "tau": 1.0, "V0": 0.1})


class TestDerivedParams(unittest.TestCase):
    """派生スカラーのテスト"""

    def test_derived_values(self):
        """w, C_N, Λ, τ, v"""
        params = ModelParams(M=6, N=6, T=0.3, U=0.05, V0=0.05)
        derived = derive(params)
        self.assertAlmostEqual(derived.tau, 1.0)
        self.assertAlmostEqual(derived.v, 1.0 / 6.0)
        self.assertAlmostEqual(derived.n, 1.0)
        self.assertAlmostEqual(derived.w, 0.35)
        self.assertAlmostEqual(derived.C_N, 0.3 * 7 / 2.0)
        expected_lambda = 0.05 * 6 * 5 / 12.0 + 2 * 0.3 * 6 + 1.0 * 0.05
        self.assertAlmostEqual(derived.Lambda, expected_lambda)

    def test_undefined_dimensionless(self):
        """U = 0 では τ, v は未定義"""
        derived = derive(ModelParams(M=4, N=2, T=1.0, U=0.0, V0=0.2))
        self.assertIsNone(derived.tau)
        self.assertIsNone(derived.v)
        self.assertAlmostEqual(derived.w, 0.2)


class TestModeGrid(unittest.TestCase):
    """運動量モード格子のテスト"""

    def test_odd_ring(self):
        """M 奇数: S = K = (M−1)/2, r² = (1, 2, ..., 2)"""
        grid = mode_grid(ModelParams(M=7, N=8, T=1.0, U=0.2, V0=0.2))
        self.assertEqual((grid.S, grid.K), (3, 3))
        np.testing.assert_array_equal(grid.r2, [1.0, 2.0, 2.0, 2.0])
        self.assertEqual(int(np.sum(grid.r2)), 7)

    def test_even_ring(self):
        """M 偶数: S = (M−2)/2, K = M/2, 自己対モード r² = 1"""
        grid = mode_grid(ModelParams(M=6, N=6, T=0.5, U=0.05, V0=0.4))
        self.assertEqual((grid.S, grid.K), (2, 3))
        np.testing.assert_array_equal(grid.r2, [1.0, 2.0, 2.0, 1.0])
        self.assertTrue(grid.is_self_paired(3))
        self.assertTrue(grid.is_self_paired(0))
        self.assertFalse(grid.is_self_paired(1))
        self.assertEqual(grid.c[3], -1.0)

    def test_minimal_ring(self):
        """M = 2: S = 0, K = 1"""
        grid = mode_grid(ModelParams(M=2, N=1, T=1.0, U=0.0, V0=0.0))
        self.assertEqual((grid.S, grid.K), (0, 1))
        np.testing.assert_array_equal(grid.r2, [1.0, 1.0])

    def test_cosines_and_energies(self):
        """c_k, e_k, g_k"""
        params = ModelParams(M=6, N=6, T=0.5, U=0.05, V0=0.4)
        grid = mode_grid(params)
        np.testing.assert_allclose(grid.c, np.cos(2 * np.pi * np.arange(6) / 6), atol=1e-15)
        np.testing.assert_allclose(grid.e, 2 * params.T * (1 - grid.c[:4]), atol=1e-14)
        np.testing.assert_allclose(grid.g, params.V0 / 6 + grid.e - params.U * 1.0, atol=1e-14)
        np.testing.assert_allclose(grid.r, np.sqrt(grid.r2))

    def test_grid_is_read_only(self):
        """格子配列は書き換え不可"""
        grid = mode_grid(ModelParams(M=5, N=3, T=1.0, U=0.1, V0=0.1))
        with self.assertRaises(ValueError):
            grid.c[0] = 2.0


class TestRegimeClassification(unittest.TestCase):
    """半古典レジーム分類のテスト"""

    def test_soliton_side(self):
        """小さい τ はソリトン側"""
        params = ModelParams.from_dimensionless(M=6, N=6, tau=1.0 / 6.0, v=1.0, UN=1.0)
        report = classify_regime(params)
        self.assertEqual(report.side_of_separatrix, SeparatrixSide.SOLITON)
        self.assertGreater(report.margin, 0)
        self.assertFalse(report.uniform_favoured)
        self.assertAlmostEqual(report.E0_soliton, -36 * (1.0 / 6.0) * 1.5)

    def test_superfluid_side(self):
        """大きい τ は超流動側"""
        params = ModelParams.from_dimensionless(M=6, N=6, tau=1.0, v=1.0 / 6.0, UN=0.3)
        report = classify_regime(params)
        self.assertEqual(report.side_of_separatrix, SeparatrixSide.SUPERFLUID)
        self.assertTrue(report.uniform_favoured)

    def test_boundary(self):
        """v = 2τ − 1/2 は境界"""
        params = ModelParams.from_dimensionless(M=6, N=4, tau=0.5, v=0.5, UN=1.0)
        self.assertEqual(classify_regime(params).side_of_separatrix, SeparatrixSide.BOUNDARY)

    def test_invariant_under_joint_rescaling(self):
        """(T, U, V0) を同じ倍率で変えても分類は同じ"""
        rng = np.random.default_rng(23)
        for _ in range(50):
            base = ModelParams(
                M=int(rng.integers(2, 13)),
                N=int(rng.integers(1, 13)),
                T=float(rng.uniform(0.01, 2.0)),
                U=float(rng.uniform(0.01, 1.0)),
                V0=float(rng.uniform(0.0, 2.0)),
            )
            report = classify_regime(base)
            for s in (1e-3, 0.37, 4.0, 1e3):
                scaled = ModelParams(M=base.M, N=base.N, T=s * base.T, U=s * base.U, V0=s * base.V0)
                with self.subTest(params=base, s=s):
                    rescaled = classify_regime(scaled)
                    self.assertEqual(rescaled.side_of_separatrix, report.side_of_separatrix)
                    self.assertEqual(rescaled.uniform_favoured, report.uniform_favoured)
                    self.assertAlmostEqual(rescaled.margin, report.margin, places=10)
                    self.assertAlmostEqual(rescaled.E0_soliton / s, report.E0_soliton, delta=1e-10 * abs(report.E0_soliton))

    def test_undefined_without_interaction(self):
        """U·N = 0 では分類できない"""
        with self.assertRaises(SemiclassicalUndefined):
            classify_regime(ModelParams(M=4, N=2, T=1.0, U=0.0, V0=0.1))


class TestFockDimension(unittest.TestCase):
    """Fock空間の次元のテスト"""

    def test_known_dimensions(self):
        """binomial(N+M−1, N)"""
        self.assertEqual(fock_dimension(6, 6), 462)
        self.assertEqual(fock_dimension(7, 8), 3003)
        self.assertEqual(fock_dimension(3, 1), 3)
        self.assertEqual(fock_dimension(4, 0), 1)
        self.assertEqual(fock_dimension(8, 8), math.comb(15, 8))

    def test_cap(self):
        """上限超過"""
        with self.assertRaises(DimensionCapExceeded) as ctx:
            fock_dimension(7, 8, cap=1000)
        self.assertEqual(ctx.exception.dimension, 3003)
        self.assertEqual(ctx.exception.status, "dimension_cap")


if __name__ == "__main__":
    unittest.main()
