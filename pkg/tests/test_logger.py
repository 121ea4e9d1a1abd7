import logging

from hrl_dialog.utils.logger import get_logger, setup_logger


def test_setup_logger_is_idempotent(tmp_path):
    log_file = tmp_path / "run.log"
    logger = setup_logger("hrl_dialog.test_idempotent", "DEBUG", str(log_file))
    again = setup_logger("hrl_dialog.test_idempotent", "WARNING")
    assert logger is again
    assert len(logger.handlers) == 2
    assert logger.level == logging.WARNING

    logger.warning("dictionary cap reached")
    for handler in logger.handlers:
        handler.flush()
    assert "WARNING - dictionary cap reached" in log_file.read_text()
    assert get_logger("hrl_dialog.test_idempotent") is logger


def test_unknown_level_falls_back_to_info():
    logger = setup_logger("hrl_dialog.test_level", "chatty")
    assert logger.level == logging.INFO
