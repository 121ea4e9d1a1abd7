"""
규칙 기반 belief 추적 (노이즈 없음)
"""
import copy
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from ..config.ontology import BOUND_VALUE, DONTCARE, MASTER_DOMAINS, NONE, RUNTIME_BOUND_SLOTS, SUB_DOMAINS
from ..core.models import UserAct
from ..core.types import TASK_INTENTS, UserIntent

logger = logging.getLogger(__name__)


@dataclass
class BeliefState:
    """대화 전체의 belief (마스터 + 모든 서브 도메인 슬롯)"""
    master_domain: str
    labels: Dict[str, List[str]]
    slots: Dict[str, np.ndarray]
    requested: Dict[str, bool]
    entity_offered: bool = False
    offered_entity: Optional[str] = None
    offered_values: Dict[str, str] = field(default_factory=dict)
    sub_task_active: Optional[str] = None
    requested_task: Optional[str] = None
    sub_task_done: bool = False
    last_user_intent: Optional[UserIntent] = None

    @classmethod
    def initial(cls, master_domain: str) -> "BeliefState":
        """모든 슬롯이 none 인 초기 belief"""
        slot_values: Dict[str, List[str]] = dict(MASTER_DOMAINS[master_domain]["constraint_slots"])
        for sub in SUB_DOMAINS.values():
            slot_values.update(sub["constraint_slots"])

        labels, slots = {}, {}
        for slot, values in slot_values.items():
            values = [BOUND_VALUE] if slot in RUNTIME_BOUND_SLOTS else list(values)
            labels[slot] = values + [DONTCARE, NONE]
            dist = np.zeros(len(labels[slot]))
            dist[-1] = 1.0
            slots[slot] = dist

        requested = {s: False for s in MASTER_DOMAINS[master_domain]["requestable_slots"]}
        return cls(master_domain=master_domain, labels=labels, slots=slots, requested=requested)

    # ==================== 조회 ====================

    def top(self, slot: str) -> str:
        """슬롯의 최대 확률 값"""
        return self.labels[slot][int(np.argmax(self.slots[slot]))]

    def known(self, slot: str) -> bool:
        return self.top(slot) != NONE

    @property
    def entity_bound(self) -> bool:
        return self.top("entityname") == BOUND_VALUE

    def tops(self, slots: List[str]) -> Dict[str, str]:
        return {s: self.top(s) for s in slots}

    # ==================== 갱신 ====================

    def set_value(self, slot: str, value: str) -> None:
        """슬롯 분포를 value 로 붕괴 (모르는 값은 none)"""
        labels = self.labels[slot]
        dist = np.zeros(len(labels))
        dist[labels.index(value) if value in labels else len(labels) - 1] = 1.0
        self.slots[slot] = dist

    def record_offer(self, entity: str, values: Dict[str, str]) -> None:
        self.entity_offered = True
        self.offered_entity = entity
        self.offered_values = dict(values)

    def contradicts_offer(self, slot: str, value: str) -> bool:
        """사용자가 알린 마스터 제약이 제공된 엔티티와 다른지"""
        if not self.entity_offered or slot not in self.offered_values or value == DONTCARE:
            return False
        return self.offered_values[slot] != value

    def copy(self) -> "BeliefState":
        return copy.deepcopy(self)


def update_belief(belief: BeliefState, user_act: UserAct) -> BeliefState:
    """사용자 행위 반영 (새 BeliefState 반환)"""
    new = belief.copy()
    new.last_user_intent = user_act.intent

    for slot, value in user_act.slots.items():
        if slot not in new.slots:
            logger.debug(f"Ignoring slot outside the dialogue ontology: {slot}")
            continue
        new.set_value(slot, value)

    # 제공된 엔티티와 어긋나는 제약을 들으면 다시 제공해야 한다
    if user_act.intent in (UserIntent.INFORM, UserIntent.NEGATE) and any(
        new.contradicts_offer(s, v) for s, v in user_act.slots.items()
    ):
        new.entity_offered = False

    if user_act.intent == UserIntent.REQUEST and user_act.requested in new.requested:
        new.requested[user_act.requested] = True
    elif user_act.intent in TASK_INTENTS:
        new.requested_task = TASK_INTENTS[user_act.intent]
    elif user_act.intent == UserIntent.THANKYOU:
        new.sub_task_done = True
    return new
