#!/usr/bin/env python3
"""
ring-boson-spectrum - メインエントリーポイント

リポジトリを展開したままコマンドラインを起動するためのスクリプトです。
引数はそのまま `src.app.cli` に渡します。

使用例:
    python scripts/main.py spectrum --preset si-levels --method si --count 5
    python scripts/main.py sweep --preset si-doublets --axis1 tau:0.1:2:20 --methods si --observable sp_energies
    python scripts/main.py validate
"""

import sys
import traceback
from pathlib import Path

# プロジェクトルートをPythonパスに追加
project_root = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(project_root))

from src.app.cli import main as cli_main  # noqa: E402
from src.utils.constants import EXIT_USAGE_ERROR  # noqa: E402
from src.utils.logger import get_logger  # noqa: E402


def main() -> int:
    """メイン関数"""
    try:
        return cli_main(sys.argv[1:])
    except Exception as e:
        # 想定外のエラーは詳細をログに残す
        error_logger = get_logger("error")
        error_logger.error(f"実行エラー: {str(e)}")
        error_logger.error(f"詳細: {traceback.format_exc()}")
        sys.stderr.write(f"エラーが発生しました: {str(e)}\n")
        return EXIT_USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
