"""옵션/SMDP 패키지"""
from .episode import EpisodeLog, OptionOutcome, TurnRecord, read_trace
from .options import OptionDef, available_actions, executable_actions, option_defs
from .policy import GPPolicy, Policy, RandomPolicy, ScriptedPolicy, as_policy
from .runner import (
    discounted_return,
    execute_option,
    run_episode_flat,
    run_episode_hierarchical,
    smdp_return,
)

__all__ = [
    "EpisodeLog", "OptionOutcome", "TurnRecord", "read_trace",
    "OptionDef", "available_actions", "executable_actions", "option_defs",
    "GPPolicy", "Policy", "RandomPolicy", "ScriptedPolicy", "as_policy",
    "discounted_return", "execute_option", "run_episode_flat", "run_episode_hierarchical", "smdp_return",
]
