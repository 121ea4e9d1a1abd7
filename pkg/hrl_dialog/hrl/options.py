"""
옵션 정의 ⟨π, β, I⟩
"""
import logging
from dataclasses import dataclass
from typing import Dict, List, Sequence

from ..config import settings
from ..config.ontology import OPTIONS, SUB_DOMAINS
from ..core.types import DomainKind, SystemIntent
from ..env.belief import BeliefState
from ..env.domain import DomainSpec, parse_action

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OptionDef:
    """서브 도메인 정책을 호출하는 복합 행동"""
    id: str
    sub_domain: str
    max_sub_steps: int = settings.HIERARCHY["max_sub_steps"]

    def input_set(self, belief: BeliefState) -> bool:
        """마스터 도메인이 엔티티를 제공한 뒤에만 사용 가능"""
        return belief.entity_offered

    def termination(self, belief: BeliefState, elapsed: int, dialogue_terminal: bool) -> bool:
        """서브 목표 확인(thankyou) ∨ 서브 스텝 한도 ∨ 대화 종료 ∨ 제공 엔티티 무효화"""
        if dialogue_terminal or elapsed >= self.max_sub_steps or belief.sub_task_done:
            return True
        return not self.input_set(belief)


def option_defs(max_sub_steps: int = settings.HIERARCHY["max_sub_steps"]) -> Dict[str, OptionDef]:
    return {oid: OptionDef(oid, sub, max_sub_steps) for oid, sub in OPTIONS.items()}


def available_actions(spec: DomainSpec, belief: BeliefState) -> List[str]:
    """기본 행동은 항상, 옵션은 input set 을 만족할 때만"""
    actions = spec.primitive_acts()
    if spec.kind != DomainKind.MASTER:
        return actions
    defs = option_defs()
    return actions + [o for o in spec.options if defs[o].input_set(belief)]


def executable_actions(spec: DomainSpec, belief: BeliefState, actions: Sequence[str]) -> List[str]:
    """
    현재 belief 에서 의미 있는 행동만 남기는 마스크 (학습 정책 전용)

    request 는 모르는 슬롯, confirm 은 아는 슬롯, inform 은 엔티티 제공 이후,
    옵션과 서브 태스크 행동은 사용자가 해당 서브 태스크를 요청한 뒤에만 허용한다.
    bye 는 대화를 끝낼 수 있을 때만 (요청 슬롯 안내 완료 + 서브 태스크 완료) 허용한다.
    남는 행동이 없으면 actions 를 그대로 돌려준다.
    """
    sub_slots = {s: d for d in spec.sub_domains for s in SUB_DOMAINS[d]["constraint_slots"]}
    if spec.kind == DomainKind.SUB:
        sub_slots = {s: spec.id for s in spec.constraint_slots}

    def task_open(sub_domain: str) -> bool:
        if spec.kind == DomainKind.SUB:
            return True
        return belief.requested_task == sub_domain and not belief.sub_task_done

    def can_close() -> bool:
        if not belief.entity_offered or any(belief.requested.values()):
            return False
        return belief.sub_task_done or not (spec.options or spec.sub_domains)

    def allowed(action: str) -> bool:
        if action in OPTIONS:
            return task_open(OPTIONS[action])
        intent, target = parse_action(action)
        if intent in (SystemIntent.REQUEST, SystemIntent.CONFIRM):
            if target in sub_slots and not task_open(sub_slots[target]):
                return False
            return belief.known(target) == (intent == SystemIntent.CONFIRM)
        if intent == SystemIntent.INFORM:
            return belief.entity_offered
        if intent == SystemIntent.EXECUTE:
            return task_open(target)
        if intent == SystemIntent.BYE:
            return can_close()
        return True

    masked = [a for a in actions if allowed(a)]
    return masked or list(actions)
