"""
사전학습 정책 재사용 (action 커널 제한)

공유 행동 쌍에서는 원래 커널과 같고, 새 행동(옵션)과 사전학습 포인트 사이의 공분산은 0.
belief 커널은 그대로 둔다.
"""
import logging
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, field_validator
from scipy.linalg import cho_factor, cho_solve, LinAlgError

from ..core.errors import NumericalError, TransferError
from ..gp.kernel import SOURCE, KernelSpec, gram_matrix
from ..gp.model import GPQModel

logger = logging.getLogger(__name__)


class PolicyTransferSpec(BaseModel):
    """사전학습(source) → 계층형(target) 행동 집합"""
    source_action_set: List[str]
    target_action_set: List[str]
    belief_dim: Optional[int] = None

    @field_validator("source_action_set", "target_action_set")
    @classmethod
    def _non_empty(cls, actions: List[str]) -> List[str]:
        if not actions:
            raise ValueError("action sets must be non-empty")
        return actions

    @property
    def shared_set(self) -> List[str]:
        """source ∩ target (target 순서)"""
        source = set(self.source_action_set)
        return [a for a in self.target_action_set if a in source]

    @property
    def new_actions(self) -> List[str]:
        source = set(self.source_action_set)
        return [a for a in self.target_action_set if a not in source]


def restrict_action_kernel(spec: PolicyTransferSpec, base: Optional[KernelSpec] = None) -> KernelSpec:
    """공유 행동에서만 1 인 restricted_delta 커널 (belief 커널은 base 그대로)"""
    shared = spec.shared_set
    if not shared:
        raise TransferError("source and target action sets share no action; nothing to transfer")
    base = base or KernelSpec()
    data = base.model_dump()
    data.update(action_kernel="restricted_delta", shared_actions=shared)
    return KernelSpec(**data)


def adapt_policy(pretrained: GPQModel, spec: PolicyTransferSpec) -> GPQModel:
    """
    사전학습 모델을 target 행동 집합의 모델로 변환

    딕셔너리/alpha/cov_factor/충분통계를 그대로 가져오고 딕셔너리 포인트를 source 로 표시한다.
    """
    if spec.belief_dim is not None and spec.belief_dim != pretrained.belief_dim:
        raise TransferError(
            f"belief dimension mismatch: pretrained {pretrained.belief_dim}, target {spec.belief_dim}"
        )
    source = set(spec.source_action_set)
    used = set(pretrained.actions) | set(str(a) for a in pretrained.dictionary.actions)
    unknown = sorted(used - source)
    if unknown:
        raise TransferError(f"pretrained model uses actions outside the source set: {unknown}")

    adapted = pretrained.copy()
    adapted.kernel = restrict_action_kernel(spec, pretrained.kernel)
    adapted.actions = list(spec.target_action_set)
    adapted.dictionary.origins = np.full(adapted.size, SOURCE)

    shared = set(spec.shared_set)
    if any(str(a) not in shared for a in adapted.dictionary.actions):
        # 공유되지 않는 사전학습 포인트는 커널 값이 0 이 되므로 Gram 을 다시 만든다
        adapted.gram = gram_matrix(adapted.kernel, adapted.dictionary)
        adapted.gram_inv = _regularized_inverse(adapted.gram, adapted.jitter)

    logger.info(
        f"Adapted policy: {adapted.size} carried-over points, "
        f"{len(spec.shared_set)} shared actions, new actions {spec.new_actions}"
    )
    return adapted


def _regularized_inverse(gram: np.ndarray, jitter: float) -> np.ndarray:
    m = gram.shape[0]
    if m == 0:
        return np.zeros((0, 0))
    try:
        factor = cho_factor(gram + jitter * np.eye(m))
    except LinAlgError as e:
        raise NumericalError(f"Gram matrix not positive definite after jitter: {e}") from e
    return cho_solve(factor, np.eye(m))
