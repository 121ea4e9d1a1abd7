"""
데이터 모델 정의
"""
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from .types import SystemIntent, UserIntent


class UserAct(BaseModel):
    """사용자 발화 (의미 수준 대화 행위)"""
    model_config = ConfigDict(frozen=True)

    intent: UserIntent
    slots: Dict[str, str] = {}             # inform/negate/task 행위의 슬롯-값
    requested: Optional[str] = None        # request 행위의 대상 슬롯

    def __str__(self):
        if self.intent == UserIntent.REQUEST:
            return f"request({self.requested})"
        if self.slots:
            pairs = ",".join(f"{k}={v}" for k, v in self.slots.items())
            return f"{self.intent.value}({pairs})"
        return self.intent.value


class SystemAct(BaseModel):
    """시스템 발화 (사용자가 관측하는 형태)"""
    model_config = ConfigDict(frozen=True)

    intent: SystemIntent
    action: str                            # 정책이 고른 ActionId
    domain: str
    slot: Optional[str] = None
    value: Optional[str] = None            # confirm/inform 대상 값
    entity: Optional[str] = None           # offer 엔티티 이름 (없으면 "none available")
    values: Dict[str, str] = {}            # offer/execute 시 슬롯 값 묶음

    def __str__(self):
        if self.intent == SystemIntent.OFFER:
            return f"offer({self.entity or 'none'})"
        if self.intent == SystemIntent.EXECUTE:
            pairs = ",".join(f"{k}={v}" for k, v in self.values.items())
            return f"execute_{self.domain}({pairs})"
        if self.slot is not None and self.value is not None:
            return f"{self.intent.value}({self.slot}={self.value})"
        if self.slot is not None:
            return f"{self.intent.value}({self.slot})"
        return self.intent.value


class UserGoal(BaseModel):
    """사용자 목표"""
    master_domain: str
    constraints: Dict[str, str]            # 슬롯 → 값 (dontcare 가능)
    requestables: List[str] = []
    sub_task: str                          # booking | payment
    sub_constraints: Dict[str, str] = {}   # entityname 제외

    def changed(self, slot: str, value: str) -> "UserGoal":
        """제약 하나를 바꾼 새 목표"""
        constraints = dict(self.constraints)
        constraints[slot] = value
        return self.model_copy(update={"constraints": constraints})


class CurvePoint(BaseModel):
    """학습 곡선의 평가 지점"""
    dialogues_seen: int
    success_rate: float = Field(ge=0.0, le=1.0)
    mean_return: float = Field(ge=-30.0, le=19.0)
    sub_success_rate: float = Field(ge=0.0, le=1.0)
    master_success_rate: float = Field(ge=0.0, le=1.0)


class LearningCurve(BaseModel):
    """시드별 학습 곡선"""
    seed: int
    label: str = ""
    points: List[CurvePoint] = []

    @field_validator("points")
    @classmethod
    def _monotone(cls, points: List[CurvePoint]) -> List[CurvePoint]:
        seen = [p.dialogues_seen for p in points]
        if any(b <= a for a, b in zip(seen, seen[1:])):
            raise ValueError("curve points must be strictly increasing in dialogues_seen")
        return points


class EvaluationReport(BaseModel):
    """탐험 없는 평가 결과"""
    n_dialogues: int
    success_rate: float
    mean_return: float
    master_success_rate: float
    sub_success_rate: float
    mean_length: float = 0.0
