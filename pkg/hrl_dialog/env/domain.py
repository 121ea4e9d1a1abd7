"""
도메인 정의 (슬롯, 시스템 행동, belief 벡터 레이아웃)
"""
import logging
from typing import TYPE_CHECKING, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field

from ..config.ontology import (
    BOUND_VALUE,
    DONTCARE,
    MASTER_DOMAINS,
    NONE,
    OPTIONS,
    RUNTIME_BOUND_SLOTS,
    SUB_DOMAINS,
)
from ..core.errors import ConfigError
from ..core.types import DomainKind, SystemIntent, UserIntent

if TYPE_CHECKING:
    from .belief import BeliefState

logger = logging.getLogger(__name__)

# 마지막 사용자 행위 one-hot (없음 포함)
INTENT_FEATURES: List[Optional[UserIntent]] = [None] + list(UserIntent)

MASTER_CONTEXT = ["entity_offered", "sub_task_active", "sub_task_done", "task_booking", "task_payment"]
SUB_CONTEXT = ["entity_bound"] + [f"master_{d}" for d in MASTER_DOMAINS]


class DomainSpec(BaseModel):
    """도메인 명세"""
    id: str
    kind: DomainKind
    constraint_slots: Dict[str, List[str]]
    requestable_slots: List[str] = []
    entity_count: int = Field(default=0, ge=0)
    options: List[str] = []
    master_domain: Optional[str] = None       # flat 변형의 기반 마스터 도메인
    sub_domains: List[str] = []               # flat 변형에 결합된 서브 도메인

    # ==================== 슬롯 ====================

    def slot_labels(self, slot: str) -> List[str]:
        """슬롯 분포의 값 라벨 (values ∪ {dontcare, none})"""
        values = self.all_slots()[slot]
        if slot in RUNTIME_BOUND_SLOTS:
            values = [BOUND_VALUE]
        return list(values) + [DONTCARE, NONE]

    def all_slots(self) -> Dict[str, List[str]]:
        """belief 에 포함되는 전체 슬롯 (flat 은 서브 도메인 슬롯 포함)"""
        slots = dict(self.constraint_slots)
        for sub in self.sub_domains:
            slots.update(SUB_DOMAINS[sub]["constraint_slots"])
        return slots

    # ==================== 행동 ====================

    def primitive_acts(self) -> List[str]:
        """기본 시스템 행동 ID"""
        if self.kind == DomainKind.SUB:
            acts = [f"request_{s}" for s in self.constraint_slots]
            acts += [f"confirm_{s}" for s in self.constraint_slots]
            acts += [f"execute_{self.id}", "repeat"]
            return acts

        acts = [f"request_{s}" for s in self.constraint_slots]
        acts += [f"confirm_{s}" for s in self.constraint_slots]
        master_requestables = MASTER_DOMAINS[self.master_domain or self.id]["requestable_slots"]
        acts += [f"inform_{s}" for s in master_requestables]
        acts += ["offer", "repeat", "bye"]

        # flat: 서브 도메인 기본 행동의 합집합
        for sub in self.sub_domains:
            for act in sub_spec(sub).primitive_acts():
                if act not in acts:
                    acts.append(act)
        return acts

    def action_set(self) -> List[str]:
        return self.primitive_acts() + list(self.options)

    # ==================== belief 벡터 ====================

    @property
    def belief_dim(self) -> int:
        dim = sum(len(self.slot_labels(s)) for s in self.all_slots())
        if self.kind == DomainKind.SUB:
            dim += len(SUB_CONTEXT)
        else:
            dim += len(self.requestable_slots) + len(MASTER_CONTEXT)
            if self.kind == DomainKind.FLAT:
                dim += 1
        return dim + len(INTENT_FEATURES)

    def flatten(self, belief: "BeliefState") -> np.ndarray:
        """도메인 관점의 고정 길이 belief 벡터"""
        parts: List[np.ndarray] = [belief.slots[s] for s in self.all_slots()]

        if self.kind == DomainKind.SUB:
            context = [float(belief.entity_bound)]
            context += [float(belief.master_domain == d) for d in MASTER_DOMAINS]
        else:
            parts.append(np.array([float(belief.requested.get(s, False)) for s in self.requestable_slots]))
            context = [
                float(belief.entity_offered),
                float(belief.sub_task_active is not None),
                float(belief.sub_task_done),
                float(belief.requested_task == "booking"),
                float(belief.requested_task == "payment"),
            ]
            if self.kind == DomainKind.FLAT:
                context.append(float(belief.entity_bound))
        parts.append(np.array(context))

        intent = np.zeros(len(INTENT_FEATURES))
        intent[INTENT_FEATURES.index(belief.last_user_intent)] = 1.0
        parts.append(intent)

        vector = np.concatenate(parts)
        if vector.shape[0] != self.belief_dim:
            raise ConfigError(
                f"{self.id}: flattened belief has {vector.shape[0]} entries, expected {self.belief_dim}"
            )
        return vector


# =============================================================================
# 도메인 생성
# =============================================================================

def master_spec(domain: str, with_options: bool = True) -> DomainSpec:
    """마스터 도메인 명세 (with_options=False 는 사전학습용)"""
    if domain not in MASTER_DOMAINS:
        raise ConfigError(f"unknown master domain: {domain}")
    cfg = MASTER_DOMAINS[domain]
    return DomainSpec(
        id=domain,
        kind=DomainKind.MASTER,
        constraint_slots=cfg["constraint_slots"],
        requestable_slots=cfg["requestable_slots"],
        entity_count=cfg["entity_count"],
        options=list(cfg["options"]) if with_options else [],
    )


def sub_spec(domain: str) -> DomainSpec:
    """서브 도메인 명세"""
    if domain not in SUB_DOMAINS:
        raise ConfigError(f"unknown sub-domain: {domain}")
    return DomainSpec(
        id=domain,
        kind=DomainKind.SUB,
        constraint_slots=SUB_DOMAINS[domain]["constraint_slots"],
    )


def flat_spec(domain: str) -> DomainSpec:
    """마스터 + 모든 서브 도메인을 합친 flat 명세"""
    base = master_spec(domain, with_options=False)
    subs = list(SUB_DOMAINS)
    requestables = list(base.requestable_slots)
    for sub in subs:
        requestables += list(SUB_DOMAINS[sub]["constraint_slots"])
    return DomainSpec(
        id=f"flat_{domain}",
        kind=DomainKind.FLAT,
        constraint_slots=base.constraint_slots,
        requestable_slots=requestables,
        entity_count=base.entity_count,
        master_domain=domain,
        sub_domains=subs,
    )


def parse_action(action: str) -> Tuple[Optional[SystemIntent], Optional[str]]:
    """
    ActionId 해석

    Returns:
        (intent, slot 또는 서브 도메인) - 옵션이면 (None, 서브 도메인)
    """
    if action in OPTIONS:
        return None, OPTIONS[action]
    if action in ("offer", "repeat", "bye"):
        return SystemIntent(action), None
    prefix, _, target = action.partition("_")
    try:
        intent = SystemIntent(prefix)
    except ValueError:
        raise ConfigError(f"unknown action id: {action}")
    if not target:
        raise ConfigError(f"action id '{action}' has no target")
    return intent, target
