"""
에피소드 실행 (계층형 두 시간 척도 루프, flat 기준선 루프)
"""
import logging
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from ..config.experiment import HierarchyConfig
from ..core.errors import OptionError
from ..core.types import RunMode
from ..env.environment import DialogueEnv
from ..env.rewards import intrinsic_reward
from ..gp.kernel import JointPoint
from ..gp.model import EpisodeTransitions
from .episode import EpisodeLog, OptionOutcome, TurnRecord
from .options import OptionDef, available_actions, option_defs
from .policy import Policy, as_policy

logger = logging.getLogger(__name__)


def discounted_return(rewards: Sequence[float], gamma: float) -> float:
    """Σ_k γ^k r_k"""
    if not (0.0 < gamma <= 1.0):
        raise ValueError("gamma must be in (0, 1]")
    total = 0.0
    discount = 1.0
    for r in rewards:
        total += discount * r
        discount *= gamma
    return total


def smdp_return(transitions: EpisodeTransitions) -> float:
    """옵션 단위 전이의 할인 누적 보상 (할인율은 전이별 γ^τ)"""
    total = 0.0
    discount = 1.0
    for step in transitions:
        total += discount * step.reward
        discount *= step.discount_to_next
    return total


def execute_option(
    option: OptionDef,
    sub_policy,
    env: DialogueEnv,
    config: HierarchyConfig,
    rng: np.random.Generator,
    mode: RunMode = RunMode.TRAIN,
    log: Optional[EpisodeLog] = None,
) -> OptionOutcome:
    """
    옵션 실행: 종료 조건까지 서브 정책으로 진행

    cumulative_extrinsic = Σ_{k<τ} γ^k r_e(k), 서브 전이에는 내부 보상만 기록한다.
    """
    if env.terminal:
        raise OptionError(f"option '{option.id}' invoked on a terminated dialogue")

    policy = as_policy(sub_policy)
    spec = env.spec_for(option.sub_domain)
    scale = 0.0 if mode == RunMode.EVAL else config.sub_exploration_scale

    env.enter_sub_domain(option.sub_domain)
    transitions = EpisodeTransitions()
    records = []
    tau = 0
    cumulative = 0.0
    discount = 1.0

    while True:
        vector = spec.flatten(env.belief)
        actions = available_actions(spec, env.belief)
        action = policy.choose(spec, env.belief, vector, actions, scale, rng)
        step = env.step(action)

        cumulative += discount * step.reward
        discount *= config.gamma
        tau += 1

        point = JointPoint(vector, action)
        transitions.append(point, 0.0, config.gamma)
        record = TurnRecord(
            domain=option.sub_domain,
            point=point,
            system_act=str(step.system_act),
            user_act=str(step.user_act) if step.user_act is not None else None,
            reward_extrinsic=step.reward,
            option_boundary=tau == 1,
            option=option.id,
        )
        records.append(record)
        if log is not None:
            log.turns.append(record)

        if option.termination(env.belief, tau, env.terminal):
            break

    sub_success = env.sub_goal_reached(option.sub_domain)
    for step, record, reward in zip(transitions, records, intrinsic_reward(tau, sub_success, env.reward)):
        step.reward = reward
        record.reward_intrinsic = reward
    transitions.close()
    env.leave_sub_domain()

    return OptionOutcome(option.id, tau, cumulative, transitions, sub_success)


def _new_log(env: DialogueEnv, mode: RunMode) -> EpisodeLog:
    return EpisodeLog(mode=str(mode), master_domain=env.master_domain, goal=env.goal)


def _master_action(env: DialogueEnv, policy: Policy, spec, vector, scale, rng) -> str:
    if env.awaiting_close:
        # 사용자가 첫 발화에서 bye: 시스템 bye 로 닫는다
        return "bye"
    actions = available_actions(spec, env.belief)
    return policy.choose(spec, env.belief, vector, actions, scale, rng)


def _close_log(log: EpisodeLog, env: DialogueEnv) -> EpisodeLog:
    flags = env.success()
    log.success = flags.overall
    log.master_success = flags.master_part
    log.sub_success = flags.sub_part
    log.total_return = float(sum(log.extrinsic_rewards()))
    log.master_transitions.close()
    return log


def run_episode_hierarchical(
    masters: Mapping[str, object],
    subs: Mapping[str, object],
    env: DialogueEnv,
    config: HierarchyConfig,
    rng: np.random.Generator,
    mode: RunMode = RunMode.TRAIN,
) -> EpisodeLog:
    """
    계층형 대화 한 개 실행

    마스터 기본 행동은 한 턴, 옵션은 execute_option 에 위임하고 마스터 전이 하나
    (보상 = cumulative_extrinsic, 할인 = γ^τ) 로 기록한다.
    """
    env.reset(rng)
    log = _new_log(env, mode)
    master = as_policy(masters[env.master_domain])
    spec = env.master_spec
    defs = option_defs(config.max_sub_steps)
    scale = 0.0 if mode == RunMode.EVAL else config.master_exploration_scale

    while not env.terminal:
        vector = spec.flatten(env.belief)
        action = _master_action(env, master, spec, vector, scale, rng)
        point = JointPoint(vector, action)

        if action in defs:
            option = defs[action]
            outcome = execute_option(option, subs[option.sub_domain], env, config, rng, mode, log)
            log.sub_transitions.append((option.sub_domain, outcome.sub_transitions))
            log.option_success.append((option.id, outcome.sub_success))
            log.master_transitions.append(point, outcome.cumulative_extrinsic, config.gamma ** outcome.tau)
        else:
            step = env.step(action)
            log.turns.append(TurnRecord(
                domain=spec.id,
                point=point,
                system_act=str(step.system_act),
                user_act=str(step.user_act) if step.user_act is not None else None,
                reward_extrinsic=step.reward,
            ))
            log.master_transitions.append(point, step.reward, config.gamma)

    return _close_log(log, env)


def run_episode_flat(
    policy: Union[object, Mapping[str, object]],
    env: DialogueEnv,
    config: HierarchyConfig,
    rng: np.random.Generator,
    mode: RunMode = RunMode.TRAIN,
) -> EpisodeLog:
    """
    flat 기준선 대화 한 개 실행 (모든 기본 행동의 합집합, 단일 시간 척도)

    policy 가 마스터 도메인별 매핑이면 대화의 마스터 도메인으로 고른다.
    """
    env.reset(rng)
    log = _new_log(env, mode)
    spec = env.master_spec
    if isinstance(policy, Mapping):
        policy = policy[env.master_domain]
    flat_policy = as_policy(policy)
    scale = 0.0 if mode == RunMode.EVAL else config.flat_exploration_scale

    while not env.terminal:
        vector = spec.flatten(env.belief)
        action = _master_action(env, flat_policy, spec, vector, scale, rng)
        point = JointPoint(vector, action)
        step = env.step(action)
        log.turns.append(TurnRecord(
            domain=spec.id,
            point=point,
            system_act=str(step.system_act),
            user_act=str(step.user_act) if step.user_act is not None else None,
            reward_extrinsic=step.reward,
        ))
        log.master_transitions.append(point, step.reward, config.gamma)

    return _close_log(log, env)
