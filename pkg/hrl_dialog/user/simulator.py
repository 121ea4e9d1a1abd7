"""
에이전다 기반 사용자 시뮬레이터

스택(LIFO)에 남은 사용자 행위와 목표로 시스템 행위에 응답한다.
단계는 master → sub → done 순서로만 진행된다. 목표는 done 전까지 언제든 바뀔 수 있고,
수락한 엔티티가 새 목표와 맞지 않으면 수락을 취소하고 다시 제공받는다.
"""
import logging
from abc import ABC, abstractmethod
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np

from ..config.experiment import UserConfig
from ..config.ontology import BOUND_VALUE, DONTCARE, MASTER_DOMAINS, NONE, RUNTIME_BOUND_SLOTS, SUB_DOMAINS
from ..core.models import SystemAct, UserAct, UserGoal
from ..core.types import Phase, SystemIntent, UserIntent, task_intent_for
from ..env.database import EntityDB, db_query, matches
from .goal import sample_goal

logger = logging.getLogger(__name__)

_PHASE_ORDER = [Phase.MASTER, Phase.SUB, Phase.DONE]


class Agenda:
    """사용자 에이전다 (스택 끝이 top)"""

    def __init__(self, goal: UserGoal, require_sub_task: bool = True):
        self.goal = goal
        self.require_sub_task = require_sub_task
        self.phase = Phase.MASTER
        self.stack: List[UserAct] = []
        self.accepted = False
        self.accepted_values: Dict[str, str] = {}
        self.last_act: Optional[UserAct] = None

    # ==================== 스택 연산 ====================

    def push(self, act: UserAct) -> None:
        self.stack.append(act)

    def pop(self) -> UserAct:
        return self.stack.pop()

    def peek(self) -> Optional[UserAct]:
        return self.stack[-1] if self.stack else None

    def push_bottom(self, act: UserAct) -> None:
        self.stack.insert(0, act)

    def drop_informs(self, slot: str) -> None:
        """slot 을 알려주는 대기 행위 제거"""
        self.stack = [
            a for a in self.stack
            if not (a.intent == UserIntent.INFORM and slot in a.slots)
        ]

    def mark_answered(self, slot: str) -> None:
        """시스템이 알려준 요청 슬롯 제거"""
        self.stack = [
            a for a in self.stack
            if not (a.intent == UserIntent.REQUEST and a.requested == slot)
        ]

    def advance(self, phase: Phase) -> None:
        if _PHASE_ORDER.index(phase) < _PHASE_ORDER.index(self.phase):
            raise ValueError(f"agenda phase cannot go back from {self.phase} to {phase}")
        self.phase = phase

    def __len__(self):
        return len(self.stack)

    # ==================== 목표 ====================

    def goal_value(self, slot: str) -> Optional[str]:
        """현재 단계에서 답할 수 있는 목표 값"""
        if slot in self.goal.constraints:
            return self.goal.constraints[slot]
        if self.phase != Phase.SUB:
            return None
        if slot in RUNTIME_BOUND_SLOTS and slot in SUB_DOMAINS[self.goal.sub_task]["constraint_slots"]:
            return BOUND_VALUE
        return self.goal.sub_constraints.get(slot)

    def initiation_act(self) -> UserAct:
        """서브 태스크 시작 행위 (예: book(peopleno=4))"""
        sub = SUB_DOMAINS[self.goal.sub_task]
        slot = sub["initiation_slot"]
        return UserAct(intent=task_intent_for(self.goal.sub_task), slots={slot: self.goal.sub_constraints[slot]})

    def _is_master_inform(self, act: UserAct) -> bool:
        return act.intent == UserIntent.INFORM and all(s in self.goal.constraints for s in act.slots)

    def accept(self, values: Optional[Mapping[str, str]] = None) -> None:
        """
        엔티티 수락: 남은 마스터 inform 제거, 요청(top) 추가

        master 단계에서는 서브 태스크 시작 행위를 stack bottom 에 넣는다.
        """
        self.accepted = True
        self.accepted_values = dict(values or {})
        self.stack = [a for a in self.stack if not self._is_master_inform(a)]
        if self.require_sub_task and self.phase == Phase.MASTER:
            self.push_bottom(self.initiation_act())
        for slot in reversed(self.goal.requestables):
            self.push(UserAct(intent=UserIntent.REQUEST, requested=slot))

    def change_goal(self, goal: UserGoal, slot: str) -> bool:
        """
        목표 변경 반영 (바뀐 slot 의 새 inform 을 top 에 추가)

        Returns:
            수락했던 엔티티가 새 목표와 맞지 않아 수락을 취소했는지
        """
        self.goal = goal
        self.drop_informs(slot)
        withdrawn = self.accepted and not matches(self.accepted_values, goal.constraints)
        if withdrawn:
            self.accepted = False
            self.accepted_values = {}
            self.stack = [
                a for a in self.stack
                if a.intent not in (UserIntent.REQUEST, UserIntent.BOOK, UserIntent.PAY)
            ]
        self.push(UserAct(intent=UserIntent.INFORM, slots={slot: goal.constraints[slot]}))
        return withdrawn

    def next_act(self) -> UserAct:
        """스택 top 행위 (요청은 답을 들을 때까지 남겨둔다)"""
        top = self.peek()
        if top is not None:
            if top.intent == UserIntent.REQUEST:
                return top
            act = self.pop()
            if act.intent in (UserIntent.BOOK, UserIntent.PAY):
                self._enter_sub_phase()
            return act

        if not self.accepted:
            return UserAct(intent=UserIntent.INFORM, slots=dict(self.goal.constraints))
        if self.phase == Phase.MASTER:
            # 서브 태스크 없는 대화: 요청을 모두 들었으면 종료
            self.advance(Phase.DONE)
            return UserAct(intent=UserIntent.BYE)
        return self.initiation_act()

    def _enter_sub_phase(self) -> None:
        self.advance(Phase.SUB)
        sub = SUB_DOMAINS[self.goal.sub_task]
        remaining = [
            s for s in self.goal.sub_constraints
            if s != sub["initiation_slot"]
        ]
        for slot in reversed(remaining):
            self.push(UserAct(intent=UserIntent.INFORM, slots={slot: self.goal.sub_constraints[slot]}))


# =============================================================================
# 응답 규칙
# =============================================================================

def user_respond(agenda: Agenda, system_act: SystemAct, rng: Optional[np.random.Generator] = None) -> UserAct:
    """시스템 행위에 대한 사용자 응답 (결정적)"""
    response = _respond(agenda, system_act)
    agenda.last_act = response
    return response


def _respond(agenda: Agenda, act: SystemAct) -> UserAct:
    if agenda.phase == Phase.DONE or act.intent == SystemIntent.BYE:
        return UserAct(intent=UserIntent.BYE)
    if act.intent == SystemIntent.REPEAT:
        return agenda.last_act or agenda.next_act()
    if act.intent == SystemIntent.REQUEST:
        return _answer_request(agenda, act.slot)
    if act.intent == SystemIntent.CONFIRM:
        return _answer_confirm(agenda, act.slot, act.value)
    if act.intent == SystemIntent.OFFER:
        return _answer_offer(agenda, act)
    if act.intent == SystemIntent.EXECUTE:
        return _answer_execute(agenda, act)
    if act.intent == SystemIntent.INFORM:
        agenda.mark_answered(act.slot)
    return agenda.next_act()


def _answer_request(agenda: Agenda, slot: Optional[str]) -> UserAct:
    value = agenda.goal_value(slot) if slot else None
    if value is None:
        return agenda.next_act()
    agenda.drop_informs(slot)
    return UserAct(intent=UserIntent.INFORM, slots={slot: value})


def _answer_confirm(agenda: Agenda, slot: Optional[str], value: Optional[str]) -> UserAct:
    target = agenda.goal_value(slot) if slot else None
    if target is None:
        return agenda.next_act()
    if target == DONTCARE or value == target:
        return UserAct(intent=UserIntent.AFFIRM)
    agenda.drop_informs(slot)
    return UserAct(intent=UserIntent.NEGATE, slots={slot: target})


def _answer_offer(agenda: Agenda, act: SystemAct) -> UserAct:
    if act.entity is None:
        return agenda.next_act()

    goal = agenda.goal
    for slot, target in goal.constraints.items():
        if target != DONTCARE and act.values.get(slot) != target:
            return UserAct(intent=UserIntent.NEGATE, slots={slot: target})

    if not agenda.accepted:
        agenda.accept(act.values)
    return agenda.next_act()


def _answer_execute(agenda: Agenda, act: SystemAct) -> UserAct:
    goal = agenda.goal
    if agenda.phase != Phase.SUB or act.domain != goal.sub_task or not agenda.accepted:
        return agenda.next_act()

    for slot in SUB_DOMAINS[goal.sub_task]["constraint_slots"]:
        target = BOUND_VALUE if slot in RUNTIME_BOUND_SLOTS else goal.sub_constraints[slot]
        value = act.values.get(slot, NONE)
        if value == NONE or (target != DONTCARE and value != target):
            return UserAct(intent=UserIntent.NEGATE, slots={slot: target})

    agenda.advance(Phase.DONE)
    return UserAct(intent=UserIntent.THANKYOU)


def maybe_change_goal(
    goal: UserGoal,
    phase: Phase,
    rng: np.random.Generator,
    dbs: Mapping[str, EntityDB],
    p_change: float,
) -> Tuple[UserGoal, bool]:
    """
    확률 p_change 로 마스터 제약 하나를 실현 가능한 새 값으로 변경

    done 단계 전까지 바뀌며 (엔티티 수락 이후 포함) master_domain/sub_task 는 고정.
    난수는 호출마다 정확히 하나 소비한 뒤, 변경할 때만 추가로 소비한다.
    """
    draw = rng.random()
    if phase == Phase.DONE or draw >= p_change:
        return goal, False

    db = dbs[goal.master_domain]
    options: Dict[str, List[str]] = {}
    for slot, values in MASTER_DOMAINS[goal.master_domain]["constraint_slots"].items():
        current = goal.constraints[slot]
        alternatives = []
        for value in list(values) + [DONTCARE]:
            if value == current:
                continue
            if db_query(db, goal.changed(slot, value).constraints):
                alternatives.append(value)
        if alternatives:
            options[slot] = alternatives

    if not options:
        return goal, False
    slots = list(options)
    slot = slots[int(rng.integers(len(slots)))]
    value = options[slot][int(rng.integers(len(options[slot])))]
    logger.debug(f"User goal change: {slot} {goal.constraints[slot]} -> {value}")
    return goal.changed(slot, str(value)), True


# =============================================================================
# 사용자 모델
# =============================================================================

class BaseUser(ABC):
    """환경이 사용하는 사용자 인터페이스"""
    goal: UserGoal
    require_sub_task: bool = True

    @abstractmethod
    def start(self, rng: np.random.Generator) -> UserAct:
        """목표 설정 후 첫 발화"""

    @abstractmethod
    def respond(self, system_act: SystemAct, rng: np.random.Generator) -> UserAct:
        """시스템 행위에 대한 응답"""


class AgendaUser(BaseUser):
    """에이전다 기반 시뮬레이션 사용자"""

    def __init__(
        self,
        dbs: Mapping[str, EntityDB],
        config: Optional[UserConfig] = None,
        require_sub_task: bool = True,
        goal: Optional[UserGoal] = None,
    ):
        self.dbs = dbs
        self.config = config or UserConfig()
        self.require_sub_task = require_sub_task
        self.fixed_goal = goal
        self.agenda: Optional[Agenda] = None
        self.n_goal_changes = 0

    @property
    def goal(self) -> UserGoal:
        return self.agenda.goal

    @property
    def phase(self) -> Phase:
        return self.agenda.phase

    def start(self, rng: np.random.Generator) -> UserAct:
        goal = self.fixed_goal or sample_goal(self.dbs, rng, self.config)
        self.agenda = Agenda(goal, self.require_sub_task)
        self.n_goal_changes = 0

        slots = list(goal.constraints)
        if self.config.opening_mode == "exact":
            n = min(self.config.opening_informs, len(slots))
        else:
            n = int(rng.integers(1, min(self.config.opening_informs, len(slots)) + 1))
        opening = set(rng.permutation(slots)[:n].tolist())

        for slot in reversed([s for s in slots if s not in opening]):
            self.agenda.push(UserAct(intent=UserIntent.INFORM, slots={slot: goal.constraints[slot]}))

        act = UserAct(intent=UserIntent.INFORM, slots={s: goal.constraints[s] for s in slots if s in opening})
        self.agenda.last_act = act
        return act

    def respond(self, system_act: SystemAct, rng: np.random.Generator) -> UserAct:
        agenda = self.agenda
        goal, changed = maybe_change_goal(agenda.goal, agenda.phase, rng, self.dbs, self.config.p_change)
        if changed:
            interrupt = self.change_goal(goal)
            if interrupt is not None:
                return interrupt
        return user_respond(agenda, system_act, rng)

    def change_goal(self, goal: UserGoal) -> Optional[UserAct]:
        """
        목표를 goal 로 교체 (제약 하나만 달라야 한다)

        수락했던 엔티티가 새 목표와 맞지 않으면 시스템 행위에 답하는 대신
        바뀐 제약을 바로 알리는 행위를 돌려준다. 그 밖에는 None.
        """
        agenda = self.agenda
        slot = next(s for s in goal.constraints if goal.constraints[s] != agenda.goal.constraints[s])
        self.n_goal_changes += 1
        if not agenda.change_goal(goal, slot):
            return None
        logger.debug(f"User withdrew acceptance after changing {slot} in {agenda.phase} phase")
        act = agenda.pop()
        agenda.last_act = act
        return act
