"""
로깅 설정
"""
import logging
import sys
from typing import Optional

from ..config import settings


def setup_logger(
    name: str = "hrl_dialog",
    level: str = settings.LOGGING["level"],
    log_file: Optional[str] = settings.LOGGING["file"],
) -> logging.Logger:
    """로거 설정"""
    logger = logging.getLogger(name)
    logger.setLevel(getattr(logging, level.upper(), logging.INFO))

    # 이미 핸들러가 있으면 추가하지 않음
    if logger.handlers:
        return logger

    formatter = logging.Formatter(settings.LOGGING["format"])

    # 콘솔 핸들러
    console_handler = logging.StreamHandler(sys.stdout)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    # 파일 핸들러
    if log_file:
        file_handler = logging.FileHandler(log_file)
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    return logger


def get_logger(name: str = "hrl_dialog") -> logging.Logger:
    """로거 가져오기"""
    return logging.getLogger(name)
