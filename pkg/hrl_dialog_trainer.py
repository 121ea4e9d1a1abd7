"""
HRL Dialog - 계층형 GP 대화 정책 학습
메인 실행 파일

    python hrl_dialog_trainer.py train --config configs/desk.json --seed 0,1,2
"""
import sys

from dotenv import load_dotenv

# 환경변수 로드 (HRL_DIALOG_LOG_LEVEL, HRL_DIALOG_OUTPUT_DIR)
load_dotenv()

from hrl_dialog.cli import main


if __name__ == "__main__":
    sys.exit(main())
