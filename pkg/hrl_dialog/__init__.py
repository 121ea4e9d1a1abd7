"""
HRL Dialog - 옵션 기반 계층형 대화 정책 학습
"""
__version__ = "0.1.0"
