"""
다중 도메인 대화 환경

한 턴 = 시스템 행위 1개 + (종료가 아니면) 사용자 응답 1개.
턴마다 -1, 종료 시 성공이면 +20. 시스템/사용자 bye 또는 최대 길이에서 종료.
"""
import logging
from dataclasses import dataclass
from typing import List, Mapping, Optional, Tuple

import numpy as np

from ..config.ontology import BOUND_VALUE, DONTCARE, NONE, SUB_DOMAINS
from ..core.errors import ConfigError, OptionError
from ..core.models import SystemAct, UserAct, UserGoal
from ..core.types import TASK_INTENTS, SystemIntent, UserIntent
from .belief import BeliefState, update_belief
from .database import EntityDB, db_query
from .domain import DomainSpec, flat_spec, master_spec, parse_action, sub_spec
from .rewards import RewardSpec, SuccessFlags, sub_part_success, success_check

logger = logging.getLogger(__name__)


@dataclass
class StepResult:
    """환경 한 턴의 결과"""
    system_act: SystemAct
    user_act: Optional[UserAct]
    reward: float
    terminal: bool


class DialogueEnv:
    """대화 환경 (에피소드마다 reset)"""

    def __init__(
        self,
        dbs: Mapping[str, EntityDB],
        user,
        reward: Optional[RewardSpec] = None,
        flat: bool = False,
        require_sub_task: bool = True,
    ):
        self.dbs = dbs
        self.user = user
        self.reward = reward or RewardSpec()
        self.flat = flat
        self.require_sub_task = require_sub_task
        self.user.require_sub_task = require_sub_task

        self.belief: Optional[BeliefState] = None
        self.turn = 0
        self.terminal = False
        self.awaiting_close = False
        self.flags: Optional[SuccessFlags] = None
        self.system_acts: List[SystemAct] = []
        self.user_acts: List[UserAct] = []
        self._rng: Optional[np.random.Generator] = None

    # ==================== 도메인 ====================

    @property
    def goal(self) -> UserGoal:
        return self.user.goal

    @property
    def master_domain(self) -> str:
        return self.belief.master_domain

    @property
    def master_spec(self) -> DomainSpec:
        """현재 대화의 최상위 도메인 명세 (flat 이면 flat 명세)"""
        if self.flat:
            return flat_spec(self.master_domain)
        return master_spec(self.master_domain, with_options=self.require_sub_task)

    def spec_for(self, domain: str) -> DomainSpec:
        if domain in SUB_DOMAINS:
            return sub_spec(domain)
        if domain.startswith("flat_"):
            return flat_spec(domain[len("flat_"):])
        return master_spec(domain, with_options=self.require_sub_task)

    @property
    def active_domain(self) -> str:
        if self.belief.sub_task_active is not None:
            return self.belief.sub_task_active
        return self.master_spec.id

    # ==================== 에피소드 ====================

    def reset(self, rng: np.random.Generator) -> BeliefState:
        """새 사용자 목표로 대화 시작"""
        self._rng = rng
        self.turn = 0
        self.terminal = False
        self.flags = None
        self.system_acts = []
        self.user_acts = []

        opening = self.user.start(rng)
        self.user_acts.append(opening)
        self.belief = update_belief(BeliefState.initial(self.user.goal.master_domain), opening)
        self.awaiting_close = opening.intent == UserIntent.BYE
        return self.belief

    def step(self, action: str) -> StepResult:
        """시스템 행위 실행 후 사용자 응답"""
        if self.terminal:
            raise OptionError("dialogue already terminated")
        system_act, reward, terminal = self.apply_system_act(action)
        if terminal:
            return StepResult(system_act, None, reward, True)

        user_act = self.user.respond(system_act, self._rng)
        self.user_acts.append(user_act)
        self.belief = update_belief(self.belief, user_act)

        # flat: 사용자가 서브 태스크를 시작하면 제공된 엔티티를 넘긴다
        if self.flat and user_act.intent in TASK_INTENTS and self.belief.entity_offered:
            self.belief.set_value("entityname", BOUND_VALUE)

        if user_act.intent == UserIntent.BYE:
            self._finish()
            reward = self.reward.turn_reward(True, self.flags.overall)
            return StepResult(system_act, user_act, reward, True)
        return StepResult(system_act, user_act, reward, False)

    def apply_system_act(self, action: str) -> Tuple[SystemAct, float, bool]:
        """
        시스템 행위 적용 (사용자 응답 전)

        Returns:
            (사용자에게 보이는 행위, 외부 보상, 종료 여부)
        """
        intent, target = parse_action(action)
        if intent is None:
            raise OptionError(f"option '{action}' must be run through execute_option")

        self.turn += 1
        act = self._realize(action, intent, target)
        self.system_acts.append(act)

        if intent == SystemIntent.OFFER and act.entity is not None:
            self.belief.record_offer(act.entity, act.values)
        elif intent == SystemIntent.INFORM and target in self.belief.requested:
            self.belief.requested[target] = False

        terminal = intent == SystemIntent.BYE or self.turn >= self.reward.max_length
        if terminal:
            self._finish()
        reward = self.reward.turn_reward(terminal, terminal and self.flags.overall)
        return act, reward, terminal

    def _realize(self, action: str, intent: SystemIntent, target: Optional[str]) -> SystemAct:
        """ActionId → 구체적인 시스템 행위 (belief 와 DB 참조)"""
        domain = self.active_domain
        belief = self.belief

        if intent in (SystemIntent.REQUEST, SystemIntent.CONFIRM):
            if target not in belief.slots:
                raise ConfigError(f"action '{action}' refers to unknown slot '{target}'")
            value = belief.top(target) if intent == SystemIntent.CONFIRM else None
            return SystemAct(intent=intent, action=action, domain=domain, slot=target, value=value)

        if intent == SystemIntent.INFORM:
            value = NONE
            if belief.offered_entity is not None:
                entity = self.dbs[self.master_domain].find(belief.offered_entity)
                value = str(entity.get(target, NONE))
            return SystemAct(intent=intent, action=action, domain=domain, slot=target, value=value)

        if intent == SystemIntent.OFFER:
            slots = list(master_spec(self.master_domain).constraint_slots)
            constraints = {s: (DONTCARE if belief.top(s) == NONE else belief.top(s)) for s in slots}
            results = db_query(self.dbs[self.master_domain], constraints)
            if not results:
                return SystemAct(intent=intent, action=action, domain=domain)
            entity = results[0]
            return SystemAct(
                intent=intent, action=action, domain=domain,
                entity=entity["name"], values={s: str(entity[s]) for s in slots},
            )

        if intent == SystemIntent.EXECUTE:
            if target not in SUB_DOMAINS:
                raise ConfigError(f"action '{action}' executes unknown sub-domain '{target}'")
            slots = list(SUB_DOMAINS[target]["constraint_slots"])
            return SystemAct(intent=intent, action=action, domain=target, values=belief.tops(slots))

        return SystemAct(intent=intent, action=action, domain=domain)

    def _finish(self) -> None:
        self.terminal = True
        self.flags = success_check(self.user.goal, self.system_acts, self.require_sub_task)

    # ==================== 서브 도메인 전환 ====================

    def enter_sub_domain(self, sub_domain: str) -> None:
        """옵션 진입: 제공된 엔티티와 마스터 도메인을 서브 도메인 belief 에 전달"""
        if self.terminal:
            raise OptionError("cannot enter a sub-domain after the dialogue terminated")
        self.belief.sub_task_active = sub_domain
        if self.belief.entity_offered:
            self.belief.set_value("entityname", BOUND_VALUE)

    def leave_sub_domain(self) -> None:
        self.belief.sub_task_active = None

    def sub_goal_reached(self, sub_domain: str) -> bool:
        """내부 비평가: 해당 서브 도메인 목표 달성 여부"""
        return sub_part_success(self.user.goal, self.system_acts, sub_domain)

    def success(self) -> SuccessFlags:
        if self.flags is None:
            return success_check(self.user.goal, self.system_acts, self.require_sub_task)
        return self.flags
