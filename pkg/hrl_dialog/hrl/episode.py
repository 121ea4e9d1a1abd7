"""
에피소드 기록 (학습 업데이트와 평가, 디버그 트레이스용)
"""
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Tuple, Union

from ..core.models import UserGoal
from ..gp.kernel import JointPoint
from ..gp.model import EpisodeTransitions

logger = logging.getLogger(__name__)


@dataclass
class TurnRecord:
    """환경 한 턴"""
    domain: str
    point: JointPoint
    system_act: str
    user_act: Optional[str]
    reward_extrinsic: float
    reward_intrinsic: Optional[float] = None
    option_boundary: bool = False          # 옵션 진입 턴
    option: Optional[str] = None

    def to_dict(self) -> Dict:
        return {
            "domain": self.domain,
            "action": self.point.action,
            "system": self.system_act,
            "user": self.user_act,
            "reward_extrinsic": self.reward_extrinsic,
            "reward_intrinsic": self.reward_intrinsic,
            "option_boundary": self.option_boundary,
            "option": self.option,
        }


@dataclass
class OptionOutcome:
    """옵션 실행 결과"""
    option: str
    tau: int
    cumulative_extrinsic: float
    sub_transitions: EpisodeTransitions
    sub_success: bool


@dataclass
class EpisodeLog:
    """대화 한 개의 기록"""
    mode: str
    master_domain: str
    goal: UserGoal
    turns: List[TurnRecord] = field(default_factory=list)
    master_transitions: EpisodeTransitions = field(default_factory=EpisodeTransitions)
    sub_transitions: List[Tuple[str, EpisodeTransitions]] = field(default_factory=list)
    option_success: List[Tuple[str, bool]] = field(default_factory=list)
    success: bool = False
    master_success: bool = False
    sub_success: bool = False
    total_return: float = 0.0

    @property
    def length(self) -> int:
        return len(self.turns)

    def extrinsic_rewards(self) -> List[float]:
        return [t.reward_extrinsic for t in self.turns]

    def summary(self) -> Dict:
        return {
            "mode": self.mode,
            "master_domain": self.master_domain,
            "goal": self.goal.model_dump(),
            "length": self.length,
            "total_return": self.total_return,
            "success": self.success,
            "master_success": self.master_success,
            "sub_success": self.sub_success,
            "options": [{"option": o, "success": s} for o, s in self.option_success],
        }

    # ==================== 트레이스 ====================

    def trace_lines(self) -> Iterator[str]:
        """헤더(요약) 한 줄 + 턴당 한 줄"""
        yield json.dumps({"episode": self.summary()}, sort_keys=True)
        for i, turn in enumerate(self.turns, start=1):
            yield json.dumps({"turn": i, **turn.to_dict()}, sort_keys=True)

    def write_trace(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(self.trace_lines()) + "\n", encoding="utf-8")
        return path


def read_trace(path: Union[str, Path]) -> Tuple[Dict, List[Dict]]:
    """트레이스 파일 → (요약, 턴 목록)"""
    lines = [json.loads(l) for l in Path(path).read_text(encoding="utf-8").splitlines() if l.strip()]
    if not lines or "episode" not in lines[0]:
        raise ValueError(f"{path}: missing episode header line")
    return lines[0]["episode"], lines[1:]
