"""공통 타입/모델/예외"""
