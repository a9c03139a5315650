"""
アプリケーション層

コマンドラインインターフェースを提供します。
"""
