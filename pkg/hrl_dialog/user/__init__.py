"""사용자 시뮬레이터 패키지"""
from .goal import load_goal_fixtures, sample_goal, save_goal_fixtures
from .simulator import Agenda, AgendaUser, BaseUser, maybe_change_goal, user_respond

__all__ = [
    "load_goal_fixtures", "sample_goal", "save_goal_fixtures",
    "Agenda", "AgendaUser", "BaseUser", "maybe_change_goal", "user_respond",
]
