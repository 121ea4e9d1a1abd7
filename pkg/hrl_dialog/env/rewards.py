"""
보상 및 성공 판정
"""
import logging
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Sequence

from ..config import settings
from ..config.ontology import BOUND_VALUE, NONE, RUNTIME_BOUND_SLOTS, SUB_DOMAINS
from ..core.models import SystemAct, UserGoal
from ..core.types import SystemIntent
from .database import matches

logger = logging.getLogger(__name__)


@dataclass
class RewardSpec:
    """보상 설정 (내부 보상도 같은 형태)"""
    success_bonus: float = settings.REWARD["success_bonus"]
    per_turn: float = settings.REWARD["per_turn"]
    max_length: int = settings.REWARD["max_dialogue_length"]

    def turn_reward(self, terminal: bool, success: bool) -> float:
        return self.per_turn + (self.success_bonus if terminal and success else 0.0)

    def dialogue_return(self, success: bool, length: int) -> float:
        """𝟙(success)·bonus + per_turn·T"""
        return (self.success_bonus if success else 0.0) + self.per_turn * length


class SuccessFlags(NamedTuple):
    overall: bool
    master_part: bool
    sub_part: bool


def master_part_success(goal: UserGoal, acts: Sequence[SystemAct]) -> bool:
    """마지막 제공 엔티티가 목표 제약을 만족하고 이후 요청 슬롯을 모두 알려줬는지"""
    last_offer: Optional[int] = None
    for i, act in enumerate(acts):
        if act.intent == SystemIntent.OFFER and act.entity is not None:
            last_offer = i
    if last_offer is None:
        return False
    if not matches(acts[last_offer].values, goal.constraints):
        return False

    informed = {
        act.slot for act in acts[last_offer + 1:]
        if act.intent == SystemIntent.INFORM and act.value not in (None, NONE)
    }
    return all(slot in informed for slot in goal.requestables)


def sub_part_success(goal: UserGoal, acts: Sequence[SystemAct], sub_domain: Optional[str] = None) -> bool:
    """마지막 execute 가 모든 서브 슬롯을 채우고 목표와 일치했는지"""
    sub_domain = sub_domain or goal.sub_task
    if sub_domain != goal.sub_task:
        return False

    executes = [a for a in acts if a.intent == SystemIntent.EXECUTE and a.domain == sub_domain]
    if not executes:
        return False
    values = executes[-1].values

    for slot in SUB_DOMAINS[sub_domain]["constraint_slots"]:
        value = values.get(slot, NONE)
        if value == NONE:
            return False
        if slot in RUNTIME_BOUND_SLOTS and value != BOUND_VALUE:
            return False
    return matches(values, goal.sub_constraints)


def success_check(goal: UserGoal, acts: Sequence[SystemAct], require_sub_task: bool = True) -> SuccessFlags:
    """
    대화 성공 판정

    Args:
        goal: 대화 종료 시점의 사용자 목표
        acts: 시스템 행위 이력
        require_sub_task: False 면 마스터 목표만으로 성공 (사전학습 환경)
    """
    master_part = master_part_success(goal, acts)
    sub_part = sub_part_success(goal, acts) if require_sub_task else True
    return SuccessFlags(master_part and sub_part, master_part, sub_part)


def intrinsic_reward(sub_turns: int, sub_success: bool, spec: Optional[RewardSpec] = None) -> List[float]:
    """내부 비평가 보상: 턴마다 -1, 서브 목표 달성 시 마지막 턴에 +20"""
    spec = spec or RewardSpec()
    if sub_turns <= 0:
        return []
    rewards = [float(spec.per_turn)] * sub_turns
    if sub_success:
        rewards[-1] += spec.success_bonus
    return rewards
