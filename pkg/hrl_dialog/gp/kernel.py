"""
커널 함수
k((b,a),(b',a')) = k_belief(b,b') · k_action(a,a')
"""
import logging
from dataclasses import dataclass, field
from typing import List, Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from ..config import settings
from ..core.errors import KernelError

logger = logging.getLogger(__name__)

# 포인트 출처: 사전학습 정책에서 넘어온 포인트(source), 적응 이후 학습한 포인트(target),
# 출처 표시 없음(untagged)
SOURCE = "source"
TARGET = "target"
UNTAGGED = "untagged"


class KernelSpec(BaseModel):
    """커널 설정"""
    belief_kernel: Literal["linear", "gaussian"] = settings.GP_CONFIG["belief_kernel"]
    gaussian_width: float = Field(default=settings.GP_CONFIG["gaussian_width"], gt=0)
    action_kernel: Literal["delta", "restricted_delta"] = "delta"
    shared_actions: Optional[List[str]] = None     # restricted_delta 전용
    prior_mean: float = 0.0
    noise_variance: float = Field(default=settings.GP_CONFIG["noise_variance"], gt=0)

    @field_validator("prior_mean")
    @classmethod
    def _zero_mean(cls, value: float) -> float:
        if value != 0.0:
            raise ValueError("prior mean is fixed at 0")
        return value

    @model_validator(mode="after")
    def _shared_set(self) -> "KernelSpec":
        if self.action_kernel == "restricted_delta" and not self.shared_actions:
            raise ValueError("restricted_delta needs a non-empty shared action set")
        return self


@dataclass(frozen=True)
class JointPoint:
    """(belief, action) 쌍"""
    belief: np.ndarray
    action: str
    origin: str = UNTAGGED

    def __post_init__(self):
        object.__setattr__(self, "belief", np.asarray(self.belief, dtype=float))


@dataclass
class PointSet:
    """커널 계산용 포인트 묶음 (열 방향 배열)"""
    beliefs: np.ndarray
    actions: np.ndarray
    origins: np.ndarray = field(default=None)

    def __post_init__(self):
        self.beliefs = np.atleast_2d(np.asarray(self.beliefs, dtype=float))
        self.actions = np.asarray(self.actions, dtype=str)
        if self.origins is None:
            self.origins = np.full(len(self.actions), UNTAGGED)
        self.origins = np.asarray(self.origins, dtype=str)

    @classmethod
    def from_points(cls, points: Sequence[JointPoint], dim: int) -> "PointSet":
        if not points:
            return cls(np.zeros((0, dim)), np.zeros(0, dtype=str), np.zeros(0, dtype=str))
        return cls(
            np.vstack([p.belief for p in points]),
            np.array([p.action for p in points], dtype=str),
            np.array([p.origin for p in points], dtype=str),
        )

    def __len__(self):
        return len(self.actions)


# =============================================================================
# belief 커널
# =============================================================================

def belief_kernel(spec: KernelSpec, beliefs: np.ndarray, b: np.ndarray) -> np.ndarray:
    """beliefs (m,d) 각 행과 b (d,) 사이의 belief 커널 값"""
    if spec.belief_kernel == "linear":
        return beliefs @ b
    diff = beliefs - b
    sq = np.einsum("ij,ij->i", diff, diff)
    return np.exp(-0.5 * sq / spec.gaussian_width ** 2)


def belief_self(spec: KernelSpec, b: np.ndarray) -> float:
    """k_belief(b, b)"""
    if spec.belief_kernel == "linear":
        return float(b @ b)
    return 1.0


# =============================================================================
# action 커널
# =============================================================================

def action_kernel(
    spec: KernelSpec,
    actions: np.ndarray,
    origins: np.ndarray,
    action: str,
    origin: str = TARGET,
) -> np.ndarray:
    """
    action 커널 값 벡터

    restricted_delta: 공유 행동 쌍은 일반 delta. 공유되지 않은 행동은
    두 포인트가 모두 target 일 때만 1 (source, untagged 가 끼면 0).
    """
    same = actions == action
    if spec.action_kernel == "delta":
        return same.astype(float)

    if action in spec.shared_actions:
        return same.astype(float)
    both_target = (origins == TARGET) & (origin == TARGET)
    return (same & both_target).astype(float)


def action_self(spec: KernelSpec, action: str, origin: str = TARGET) -> float:
    """k_action(a, a)"""
    if spec.action_kernel == "delta" or action in spec.shared_actions:
        return 1.0
    return 1.0 if origin == TARGET else 0.0


# =============================================================================
# 결합 커널
# =============================================================================

def kernel_vector(spec: KernelSpec, points: PointSet, x: JointPoint) -> np.ndarray:
    """k(D, x) 벡터"""
    if len(points) == 0:
        return np.zeros(0)
    if points.beliefs.shape[1] != x.belief.shape[0]:
        raise KernelError(
            f"belief dimension mismatch: dictionary has {points.beliefs.shape[1]}, "
            f"query has {x.belief.shape[0]}"
        )
    kb = belief_kernel(spec, points.beliefs, x.belief)
    ka = action_kernel(spec, points.actions, points.origins, x.action, x.origin)
    return kb * ka


def kernel_self(spec: KernelSpec, x: JointPoint) -> float:
    """k(x, x)"""
    return belief_self(spec, x.belief) * action_self(spec, x.action, x.origin)


def kernel_eval(x: JointPoint, y: JointPoint, spec: KernelSpec) -> float:
    """두 JointPoint 사이의 커널 값"""
    if x.belief.shape != y.belief.shape:
        raise KernelError(
            f"belief dimension mismatch: {x.belief.shape[0]} vs {y.belief.shape[0]}"
        )
    single = PointSet(x.belief[None, :], np.array([x.action]), np.array([x.origin]))
    return float(kernel_vector(spec, single, y)[0])


def gram_matrix(spec: KernelSpec, points: PointSet) -> np.ndarray:
    """Gram 행렬 K_DD"""
    n = len(points)
    gram = np.zeros((n, n))
    for j in range(n):
        x = JointPoint(points.beliefs[j], str(points.actions[j]), str(points.origins[j]))
        gram[:, j] = kernel_vector(spec, points, x)
    return 0.5 * (gram + gram.T)
