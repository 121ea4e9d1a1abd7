"""
대화 정책 (GP 사후 샘플링, 규칙 기반, 무작위)
"""
import logging
from abc import ABC, abstractmethod
from typing import Optional, Sequence

import numpy as np

from ..config.ontology import SUB_DOMAINS, option_for
from ..core.errors import EpisodeError
from ..core.types import DomainKind
from ..env.belief import BeliefState
from ..env.domain import DomainSpec
from ..gp.model import EpisodeTransitions, GPQModel, gptd_update, sample_action
from .options import executable_actions

logger = logging.getLogger(__name__)


class Policy(ABC):
    """정책 공통 인터페이스"""

    @abstractmethod
    def choose(
        self,
        spec: DomainSpec,
        belief: BeliefState,
        vector: np.ndarray,
        actions: Sequence[str],
        exploration_scale: float,
        rng: np.random.Generator,
    ) -> str:
        """사용 가능한 행동 중 하나 선택"""

    def learn(self, episode: EpisodeTransitions) -> None:
        """에피소드 단위 학습 (기본: 없음)"""


class GPPolicy(Policy):
    """
    GP Q 함수 사후 샘플링 정책

    use_mask 이면 executable_actions 마스크를 통과한 행동 중에서만 고른다.
    """

    def __init__(self, model: GPQModel, use_mask: bool = True):
        self.model = model
        self.use_mask = use_mask

    def choose(self, spec, belief, vector, actions, exploration_scale, rng) -> str:
        if self.use_mask:
            actions = executable_actions(spec, belief, actions)
        return sample_action(self.model, vector, list(actions), exploration_scale, rng)

    def learn(self, episode: EpisodeTransitions) -> None:
        try:
            gptd_update(self.model, episode)
        except EpisodeError as e:
            logger.warning(f"Skipped update: {e}")

    def __repr__(self):
        return f"GPPolicy({self.model!r})"


class RandomPolicy(Policy):
    """균등 무작위 정책 (하한 측정용)"""

    def choose(self, spec, belief, vector, actions, exploration_scale, rng) -> str:
        return actions[int(rng.integers(len(actions)))]


class ScriptedPolicy(Policy):
    """
    규칙 기반 최적 정책

    master: 누락 제약 요청 → 엔티티 제공(제공 전이거나 무효화된 경우) → 요청 슬롯 안내
            → 서브 태스크 옵션 → bye
    sub: 누락 슬롯 요청 → execute
    flat: master 규칙에 서브 태스크 규칙을 이어붙임
    """

    def choose(self, spec, belief, vector, actions, exploration_scale, rng) -> str:
        if spec.kind == DomainKind.SUB:
            action = self._sub_action(spec.id, belief)
        elif spec.kind == DomainKind.FLAT:
            action = self._flat_action(spec, belief)
        else:
            action = self._master_action(spec, belief, actions)
        if action not in actions:
            logger.debug(f"Scripted action {action} unavailable, falling back to {actions[0]}")
            return actions[0]
        return action

    @staticmethod
    def _sub_action(sub_domain: str, belief: BeliefState) -> str:
        for slot in SUB_DOMAINS[sub_domain]["constraint_slots"]:
            if not belief.known(slot):
                return f"request_{slot}"
        return f"execute_{sub_domain}"

    @staticmethod
    def _search_action(spec: DomainSpec, belief: BeliefState) -> Optional[str]:
        """엔티티 탐색 단계 행동 (끝났으면 None)"""
        for slot in spec.constraint_slots:
            if not belief.known(slot):
                return f"request_{slot}"
        if not belief.entity_offered:
            return "offer"
        for slot, flag in belief.requested.items():
            if flag:
                return f"inform_{slot}"
        return None

    def _master_action(self, spec: DomainSpec, belief: BeliefState, actions: Sequence[str]) -> str:
        if belief.sub_task_done:
            return "bye"
        action = self._search_action(spec, belief)
        if action is not None:
            return action
        if belief.requested_task is not None:
            option = option_for(belief.requested_task)
            if option in actions:
                return option
        return "bye"

    def _flat_action(self, spec: DomainSpec, belief: BeliefState) -> str:
        if belief.sub_task_done:
            return "bye"
        action = self._search_action(spec, belief)
        if action is not None:
            return action
        if belief.requested_task is not None:
            return self._sub_action(belief.requested_task, belief)
        return "bye"


def as_policy(obj) -> Policy:
    """GPQModel 이면 GPPolicy 로 감싼다"""
    if isinstance(obj, Policy):
        return obj
    if isinstance(obj, GPQModel):
        return GPPolicy(obj)
    raise TypeError(f"not a policy: {type(obj).__name__}")
