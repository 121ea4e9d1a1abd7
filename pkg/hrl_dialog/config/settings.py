"""
계층형 대화 정책 학습 설정
"""
import os

# =============================================================================
# 보상 설정
# =============================================================================

REWARD = {
    "success_bonus": 20,              # 성공 시 +20
    "per_turn": -1,                   # 턴마다 -1
    "max_dialogue_length": 30,        # 최대 대화 길이 (턴)
}

# =============================================================================
# Gaussian Process 설정
# =============================================================================

GP_CONFIG = {
    "belief_kernel": "linear",        # linear | gaussian
    "gaussian_width": 1.0,            # gaussian 커널 폭
    "noise_variance": 5.0,            # 관측 노이즈 분산 σ²
    "sparsify_threshold": 0.001,      # 딕셔너리 편입 임계값 ν
    "dictionary_cap": 1000,           # 딕셔너리 최대 크기
    "jitter": 1e-8,                   # Gram 역행렬 정규화
    "variance_tolerance": 1e-9,       # 음수 분산 허용 오차
}

# =============================================================================
# 계층 구조 설정
# =============================================================================

HIERARCHY = {
    "gamma": 0.99,                    # 할인율
    "master_exploration_scale": 2.0,  # 마스터 도메인은 더 탐험적으로
    "sub_exploration_scale": 1.0,
    "flat_exploration_scale": 1.0,
    "max_sub_steps": 15,              # 옵션 하나가 쓸 수 있는 최대 턴 (전체 한도의 절반)
}

# =============================================================================
# 사용자 시뮬레이터 설정
# =============================================================================

USER_SIM = {
    "p_change": 0.05,                 # 턴당 목표 변경 확률
    "dontcare_prob": 0.3,             # 슬롯별 dontcare 확률
    "opening_informs": 2,             # 첫 발화에 담는 최대 제약 수
    "opening_mode": "uniform",        # uniform: 1..opening_informs 개, exact: 정확히 opening_informs 개
    "max_goal_draws": 1000,           # 목표 샘플링 최대 시도
    "master_weights": {"restaurant": 0.5, "hotel": 0.5},
    "sub_task_weights": {"booking": 0.5, "payment": 0.5},
    "max_requestables": 2,            # 목표당 요청 슬롯 수 상한
}

# =============================================================================
# 실험 설정
# =============================================================================

EXPERIMENT = {
    "n_train_dialogues": 4000,
    "eval_every": 200,
    "eval_dialogues_per_point": 200,
    "seeds": [0, 1, 2, 3, 4],
    "workers": 1,
    "db_seed": 7,                     # 엔티티 DB 생성 시드
    "pretrain_dialogues": 2000,       # 적응 실험의 사전학습 대화 수
    "extra_flat_dialogues": 6000,     # flat 정체 구간 확인용 추가 학습
    "output_dir": os.getenv("HRL_DIALOG_OUTPUT_DIR", "runs"),
}

# =============================================================================
# 로깅
# =============================================================================

LOGGING = {
    "level": os.getenv("HRL_DIALOG_LOG_LEVEL", "INFO"),
    "format": "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    "file": None,
}

# =============================================================================
# 파일 포맷
# =============================================================================

FORMAT_VERSION = 1
