"""
リング上の引力ボソンのスペクトル計算 - メインパッケージ

単一サイトの井戸を持つ M サイトのリング上の N ボソン系について、
厳密対角化・強相互作用（SI）近似・超流動（SF）近似のソルバーと
パラメータスイープ用のコマンドラインを提供します。
"""

__version__ = "0.1.0"
__author__ = "Ring Boson Spectrum Team"
__description__ = "リング上の引力ボソン系のスペクトルと分布の計算"
