"""
터미널 대화 모드 (사람이 대화 행위 수준으로 사용자 역할)

입력 문법:
    inform(slot=value[, slot=value])   request(slot)   affirm   negate[(slot=value)]
    book(slot=value)   pay(slot=value)   thankyou   bye
"""
import logging
import re
from pathlib import Path
from typing import Callable, Dict, Optional, Union

import numpy as np

from ..config.experiment import ExperimentConfig
from ..core.models import SystemAct, UserAct, UserGoal
from ..core.types import RunMode, SystemIntent, UserIntent
from ..env.database import generate_databases
from ..hrl.episode import EpisodeLog
from ..user.goal import sample_goal
from ..user.simulator import BaseUser
from .trainer import PolicySet, make_env, run_dialogue

logger = logging.getLogger(__name__)

HELP = (
    "Type a dialogue act: inform(slot=value[, slot=value]), request(slot), affirm, "
    "negate(slot=value), book(slot=value), pay(slot=value), thankyou, bye"
)

_ACT = re.compile(r"^\s*([a-z]+)\s*(?:\((.*)\))?\s*$")
_PAIR = re.compile(r"^\s*([a-z_]+)\s*=\s*(.+?)\s*$")


def parse_user_act(text: str) -> UserAct:
    """입력 문자열 → UserAct (형식 오류는 ValueError)"""
    match = _ACT.match(text.strip().lower())
    if not match:
        raise ValueError(f"cannot parse '{text}'")
    name, args = match.group(1), match.group(2)
    try:
        intent = UserIntent(name)
    except ValueError:
        raise ValueError(f"unknown act '{name}'")

    if intent == UserIntent.REQUEST:
        slot = (args or "").strip()
        if not re.fullmatch(r"[a-z_]+", slot):
            raise ValueError("request needs exactly one slot name, e.g. request(phone)")
        return UserAct(intent=intent, requested=slot)

    slots: Dict[str, str] = {}
    if args is not None and args.strip():
        for part in args.split(","):
            pair = _PAIR.match(part)
            if not pair:
                raise ValueError(f"expected slot=value, got '{part.strip()}'")
            slots[pair.group(1)] = pair.group(2)
    if intent in (UserIntent.INFORM, UserIntent.BOOK, UserIntent.PAY) and not slots:
        raise ValueError(f"{intent.value} needs at least one slot=value pair")
    return UserAct(intent=intent, slots=slots)


def render_system_act(act: SystemAct) -> str:
    """시스템 행위 → 템플릿 문장"""
    if act.intent == SystemIntent.REQUEST:
        return f"What {act.slot} would you like?"
    if act.intent == SystemIntent.CONFIRM:
        return f"You want {act.slot} = {act.value}, is that right?"
    if act.intent == SystemIntent.INFORM:
        return f"The {act.slot} is {act.value}."
    if act.intent == SystemIntent.OFFER:
        if act.entity is None:
            return "Sorry, there is no match available."
        details = ", ".join(f"{k} {v}" for k, v in act.values.items())
        return f"{act.entity} matches your request ({details})."
    if act.intent == SystemIntent.EXECUTE:
        details = ", ".join(f"{k} {v}" for k, v in act.values.items())
        return f"I confirm the {act.domain} with {details}."
    if act.intent == SystemIntent.REPEAT:
        return "Sorry, could you repeat that?"
    return "Goodbye."


def describe_goal(goal: UserGoal) -> str:
    constraints = ", ".join(f"{k}={v}" for k, v in goal.constraints.items())
    sub = ", ".join(f"{k}={v}" for k, v in goal.sub_constraints.items())
    return (
        f"Your goal: find a {goal.master_domain} with {constraints}; "
        f"ask for {', '.join(goal.requestables)}; then {goal.sub_task} with {sub}."
    )


class HumanUser(BaseUser):
    """터미널 입력 사용자"""

    def __init__(
        self,
        goal: UserGoal,
        input_fn: Callable[[str], str] = input,
        output_fn: Callable[[str], None] = print,
    ):
        self.goal = goal
        self.input_fn = input_fn
        self.output_fn = output_fn

    def _read(self) -> UserAct:
        while True:
            try:
                text = self.input_fn("user> ")
            except EOFError:
                return UserAct(intent=UserIntent.BYE)
            try:
                return parse_user_act(text)
            except ValueError as e:
                # 턴을 소모하지 않고 다시 입력받는다
                self.output_fn(f"{e}. {HELP}")

    def start(self, rng: np.random.Generator) -> UserAct:
        self.output_fn(describe_goal(self.goal))
        self.output_fn(HELP)
        return self._read()

    def respond(self, system_act: SystemAct, rng: np.random.Generator) -> UserAct:
        self.output_fn(f"system> {render_system_act(system_act)}")
        return self._read()


def chat(
    policy_dir: Union[str, Path],
    seed: int,
    input_fn: Callable[[str], str] = input,
    output_fn: Callable[[str], None] = print,
    config: Optional[ExperimentConfig] = None,
) -> EpisodeLog:
    """학습된 정책과 대화 한 번 (greedy)"""
    config = config or ExperimentConfig()
    policy_set = PolicySet.load(policy_dir)
    dbs = generate_databases(config.experiment.db_seed)
    rng = np.random.default_rng(seed)

    goal = sample_goal(dbs, rng, config.user)
    user = HumanUser(goal, input_fn, output_fn)
    env = make_env(config, dbs, policy_set.mode, policy_set.require_sub_task, user=user)
    log = run_dialogue(policy_set, env, config, rng, RunMode.EVAL)

    last = env.system_acts[-1] if env.system_acts else None
    if last is not None and last.intent == SystemIntent.BYE:
        output_fn(f"system> {render_system_act(last)}")
    output_fn(
        f"Dialogue finished: {'success' if log.success else 'failure'}, "
        f"return {log.total_return:g} over {log.length} turns"
    )
    return log
