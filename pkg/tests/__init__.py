"""
テスト層

各ソルバーのユニットテストと、厳密対角化を基準にした横断テストです。
"""
