"""
사용자 목표 샘플링 및 목표 픽스처 파일
"""
import json
import logging
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Union

import numpy as np

from ..config import settings
from ..config.experiment import UserConfig
from ..config.ontology import DONTCARE, MASTER_DOMAINS, RUNTIME_BOUND_SLOTS, SUB_DOMAINS
from ..core.errors import FormatVersionError, GoalSamplingError
from ..core.models import UserGoal
from ..env.database import EntityDB, db_query

logger = logging.getLogger(__name__)


def _weighted_choice(weights: Mapping[str, float], rng: np.random.Generator) -> str:
    keys = list(weights)
    p = np.array([weights[k] for k in keys], dtype=float)
    return keys[int(rng.choice(len(keys), p=p / p.sum()))]


def sample_goal(
    dbs: Mapping[str, EntityDB],
    rng: np.random.Generator,
    config: Optional[UserConfig] = None,
) -> UserGoal:
    """
    사용자 목표 샘플링

    마스터 도메인과 서브 태스크는 가중치(기본 균등)로 고르고, 제약은 슬롯별 dontcare
    확률로 뽑은 뒤 DB 에 맞는 엔티티가 있을 때까지 재추첨한다.
    """
    config = config or UserConfig()
    master = _weighted_choice(config.master_weights, rng)
    sub_task = _weighted_choice(config.sub_task_weights, rng)
    domain = MASTER_DOMAINS[master]

    constraints: Optional[Dict[str, str]] = None
    for _ in range(config.max_goal_draws):
        draw = {}
        for slot, values in domain["constraint_slots"].items():
            if rng.random() < config.dontcare_prob:
                draw[slot] = DONTCARE
            else:
                draw[slot] = str(values[int(rng.integers(len(values)))])
        if db_query(dbs[master], draw):
            constraints = draw
            break
    if constraints is None:
        raise GoalSamplingError(
            f"{master}: no realizable goal after {config.max_goal_draws} draws (DB coverage broken)"
        )

    candidates = [s for s in domain["requestable_slots"] if s != "name"]
    k = int(rng.integers(1, min(config.max_requestables, len(candidates)) + 1))
    chosen = set(rng.choice(candidates, size=k, replace=False).tolist())
    requestables = [s for s in domain["requestable_slots"] if s in chosen]

    sub = SUB_DOMAINS[sub_task]
    sub_constraints = {}
    for slot, values in sub["constraint_slots"].items():
        if slot in RUNTIME_BOUND_SLOTS:
            continue
        if slot in sub["dontcare_slots"] and rng.random() < config.dontcare_prob:
            sub_constraints[slot] = DONTCARE
        else:
            sub_constraints[slot] = str(values[int(rng.integers(len(values)))])

    return UserGoal(
        master_domain=master,
        constraints=constraints,
        requestables=requestables,
        sub_task=sub_task,
        sub_constraints=sub_constraints,
    )


def is_realizable(goal: UserGoal, dbs: Mapping[str, EntityDB]) -> bool:
    return bool(db_query(dbs[goal.master_domain], goal.constraints))


# =============================================================================
# 목표 픽스처 파일
# =============================================================================

def save_goal_fixtures(path: Union[str, Path], goals: List[UserGoal]) -> Path:
    """{"format_version": 1, "goals": [...]}"""
    path = Path(path)
    payload = {
        "format_version": settings.FORMAT_VERSION,
        "goals": [g.model_dump() for g in goals],
    }
    path.write_text(json.dumps(payload, indent=2), encoding="utf-8")
    return path


def load_goal_fixtures(path: Union[str, Path]) -> List[UserGoal]:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    if payload.get("format_version") != settings.FORMAT_VERSION:
        raise FormatVersionError(f"{path}: unsupported goal fixture version {payload.get('format_version')}")
    return [UserGoal(**g) for g in payload["goals"]]
