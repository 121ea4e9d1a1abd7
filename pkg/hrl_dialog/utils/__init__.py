from .logger import get_logger, setup_logger
