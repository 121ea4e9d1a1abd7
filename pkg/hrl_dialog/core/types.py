"""
공통 타입 정의
"""
from enum import Enum


class DomainKind(str, Enum):
    """도메인 종류"""
    MASTER = "master"
    SUB = "sub"
    FLAT = "flat"

    def __str__(self):
        return self.value


class UserIntent(str, Enum):
    """사용자 대화 행위"""
    INFORM = "inform"
    REQUEST = "request"
    AFFIRM = "affirm"
    NEGATE = "negate"
    BOOK = "book"               # 예약 요청 (서브 태스크 시작)
    PAY = "pay"                 # 결제 요청 (서브 태스크 시작)
    THANKYOU = "thankyou"       # 서브 태스크 완료 확인
    BYE = "bye"

    def __str__(self):
        return self.value


class SystemIntent(str, Enum):
    """시스템 대화 행위"""
    REQUEST = "request"
    CONFIRM = "confirm"
    INFORM = "inform"
    OFFER = "offer"
    EXECUTE = "execute"         # 서브 태스크 최종 확인 (예약/결제 확정)
    REPEAT = "repeat"
    BYE = "bye"

    def __str__(self):
        return self.value


class Phase(str, Enum):
    """사용자 에이전다 단계 (master → sub → done)"""
    MASTER = "master"
    SUB = "sub"
    DONE = "done"

    def __str__(self):
        return self.value


class RunMode(str, Enum):
    """에피소드 실행 모드"""
    TRAIN = "train"
    EVAL = "eval"

    def __str__(self):
        return self.value


class ExperimentMode(str, Enum):
    """실험 종류"""
    HIERARCHICAL = "hierarchical"
    FLAT = "flat"
    ADAPT = "adapt"

    def __str__(self):
        return self.value


# 서브 태스크 시작 행위 ↔ 서브 도메인
TASK_INTENTS = {
    UserIntent.BOOK: "booking",
    UserIntent.PAY: "payment",
}


def task_intent_for(sub_domain: str) -> UserIntent:
    """서브 도메인을 시작하는 사용자 행위"""
    for intent, domain in TASK_INTENTS.items():
        if domain == sub_domain:
            return intent
    raise KeyError(f"unknown sub-domain: {sub_domain}")
