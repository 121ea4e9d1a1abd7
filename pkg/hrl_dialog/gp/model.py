"""
희소 GP 기반 Q 함수 모델 (에피소드 단위 GPTD)

관측 모델: r_t = Q(x_t) - γ_t Q(x_{t+1}) + noise,  마지막 스텝 r_T = Q(x_T) + noise
노이즈 공분산 Σ = σ² H Hᵀ 이므로 H⁻¹r (할인 누적 보상) 에 대한 GP 회귀와 같다.
딕셔너리 D 위에서 Q(x) ≈ a(x)ᵀ Q_D,  a(x) = K_DD⁻¹ k_D(x) 로 근사하고
충분통계 S = Σ AᵀA/σ², b = Σ Aᵀy/σ² 를 누적한다.

    alpha     = (I + S K)⁻¹ b
    cov_factor = S (I + K S)⁻¹
    mean(x)   = k_xᵀ alpha
    var(x)    = k(x,x) - k_xᵀ cov_factor k_x
"""
import copy
import logging
from dataclasses import dataclass, field
from typing import Iterator, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import solve_triangular

from ..config import settings
from ..core.errors import EpisodeError, KernelError, NumericalError
from .kernel import (
    JointPoint,
    KernelSpec,
    PointSet,
    belief_kernel,
    belief_self,
    action_kernel,
    action_self,
    kernel_self,
    kernel_vector,
    TARGET,
    UNTAGGED,
)

logger = logging.getLogger(__name__)

# ν=0 일 때도 수치적으로 0인 잔차는 편입하지 않는다 (k(x,x) 대비 상대값)
_RESIDUAL_FLOOR = 1e-10


@dataclass
class Transition:
    """에피소드의 한 전이"""
    point: JointPoint
    reward: float
    discount_to_next: float
    is_terminal: bool = False


@dataclass
class EpisodeTransitions:
    """GPTD 업데이트 단위"""
    steps: List[Transition] = field(default_factory=list)

    def append(self, point: JointPoint, reward: float, discount_to_next: float,
               is_terminal: bool = False) -> None:
        self.steps.append(Transition(point, float(reward), float(discount_to_next), is_terminal))

    def close(self) -> None:
        """마지막 전이를 종료 전이로 표시"""
        if self.steps:
            self.steps[-1].is_terminal = True

    def rewards(self) -> np.ndarray:
        return np.array([s.reward for s in self.steps], dtype=float)

    def discounts(self) -> np.ndarray:
        return np.array([s.discount_to_next for s in self.steps], dtype=float)

    def validate(self) -> None:
        """형식 검증 (비어있지 않음, 마지막만 종료, 할인율 범위)"""
        if not self.steps:
            raise EpisodeError("episode has no transitions")
        for i, step in enumerate(self.steps):
            last = i == len(self.steps) - 1
            if step.is_terminal != last:
                raise EpisodeError(f"transition {i}: only the last transition may be terminal")
            if not last and not (0.0 < step.discount_to_next <= 1.0):
                raise EpisodeError(
                    f"transition {i}: discount_to_next {step.discount_to_next} outside (0, 1]"
                )

    def is_finite(self) -> bool:
        if not np.all(np.isfinite(self.rewards())):
            return False
        return all(np.all(np.isfinite(s.point.belief)) for s in self.steps)

    def __len__(self):
        return len(self.steps)

    def __iter__(self) -> Iterator[Transition]:
        return iter(self.steps)


class Admission(NamedTuple):
    """딕셔너리 편입 판정"""
    admit: bool
    residual: float
    coefficients: np.ndarray      # K_DD⁻¹ k_D(x)


class Posterior(NamedTuple):
    mean: float
    variance: float


class GPQModel:
    """희소 GP Q 함수"""

    def __init__(
        self,
        kernel: KernelSpec,
        belief_dim: int,
        sparsify_threshold: float = settings.GP_CONFIG["sparsify_threshold"],
        dictionary_cap: int = settings.GP_CONFIG["dictionary_cap"],
        gamma: float = 0.99,
        jitter: float = settings.GP_CONFIG["jitter"],
        variance_tolerance: float = settings.GP_CONFIG["variance_tolerance"],
        actions: Optional[Sequence[str]] = None,
    ):
        if sparsify_threshold < 0:
            raise ValueError("sparsify_threshold must be >= 0")
        if dictionary_cap <= 0:
            raise ValueError("dictionary_cap must be positive")
        if not (0.0 < gamma <= 1.0):
            raise ValueError("gamma must be in (0, 1]")

        self.kernel = kernel
        self.belief_dim = int(belief_dim)
        self.sparsify_threshold = float(sparsify_threshold)
        self.dictionary_cap = int(dictionary_cap)
        self.gamma = float(gamma)
        self.jitter = float(jitter)
        self.variance_tolerance = float(variance_tolerance)
        self.actions: List[str] = list(actions) if actions is not None else []

        # 딕셔너리와 사후분포
        self.dictionary = PointSet(np.zeros((0, self.belief_dim)), np.zeros(0, dtype=str))
        self.alpha = np.zeros(0)
        self.cov_factor = np.zeros((0, 0))
        self.gram = np.zeros((0, 0))
        self.gram_inv = np.zeros((0, 0))

        # 충분통계
        self.stat_s = np.zeros((0, 0))
        self.stat_b = np.zeros(0)
        self.n_episodes = 0

    # ==================== 딕셔너리 ====================

    @property
    def size(self) -> int:
        return len(self.dictionary)

    def dictionary_points(self) -> List[JointPoint]:
        return [
            JointPoint(self.dictionary.beliefs[i], str(self.dictionary.actions[i]),
                       str(self.dictionary.origins[i]))
            for i in range(self.size)
        ]

    def _check_dim(self, belief: np.ndarray) -> None:
        if belief.shape[0] != self.belief_dim:
            raise KernelError(
                f"belief dimension mismatch: model expects {self.belief_dim}, got {belief.shape[0]}"
            )

    def admit(self, x: JointPoint) -> Admission:
        """선형 독립성 테스트: δ = k(x,x) - k_xDᵀ K_DD⁻¹ k_Dx"""
        self._check_dim(x.belief)
        x = _tagged(x)
        kxx = kernel_self(self.kernel, x)
        if self.size == 0:
            residual = kxx
            coeffs = np.zeros(0)
        else:
            k_d = kernel_vector(self.kernel, self.dictionary, x)
            coeffs = self.gram_inv @ k_d
            residual = float(kxx - k_d @ coeffs)

        floor = max(self.sparsify_threshold, _RESIDUAL_FLOOR * kxx)
        admit = residual > floor and self.size < self.dictionary_cap
        return Admission(bool(admit), float(residual), coeffs)

    def _add_point(self, x: JointPoint, admission: Admission) -> None:
        """딕셔너리에 포인트 추가 (Gram 역행렬 블록 갱신, 통계 0 패딩)"""
        m = self.size
        k_d = kernel_vector(self.kernel, self.dictionary, x)
        kxx = kernel_self(self.kernel, x)
        a = admission.coefficients
        delta = admission.residual

        gram = np.zeros((m + 1, m + 1))
        gram[:m, :m] = self.gram
        gram[:m, m] = k_d
        gram[m, :m] = k_d
        gram[m, m] = kxx

        gram_inv = np.zeros((m + 1, m + 1))
        gram_inv[:m, :m] = self.gram_inv + np.outer(a, a) / delta
        gram_inv[:m, m] = -a / delta
        gram_inv[m, :m] = -a / delta
        gram_inv[m, m] = 1.0 / delta

        self.gram = gram
        self.gram_inv = gram_inv
        self.dictionary = PointSet(
            np.vstack([self.dictionary.beliefs, x.belief[None, :]]),
            np.append(self.dictionary.actions, x.action),
            np.append(self.dictionary.origins, x.origin),
        )
        self.stat_s = _pad_square(self.stat_s, m + 1)
        self.stat_b = np.append(self.stat_b, 0.0)
        self.alpha = np.append(self.alpha, 0.0)
        self.cov_factor = _pad_square(self.cov_factor, m + 1)

    # ==================== 학습 ====================

    def update(self, episode: EpisodeTransitions) -> "GPQModel":
        """
        에피소드 하나로 사후분포 갱신

        사후분포 풀이가 실패하면 딕셔너리와 충분통계를 호출 전 상태로 되돌린다.
        """
        episode.validate()
        if not episode.is_finite():
            logger.warning("Rejected episode with non-finite reward or belief entries")
            raise EpisodeError("episode contains non-finite rewards or belief entries")
        for step in episode:
            self._check_dim(step.point.belief)

        snapshot = self._snapshot()
        try:
            self._accumulate(episode)
            self._solve_posterior()
        except NumericalError:
            self._restore(snapshot)
            logger.warning(f"Posterior solve failed; model left at {self.n_episodes} episodes")
            raise
        return self

    def _accumulate(self, episode: EpisodeTransitions) -> None:
        rows: List[np.ndarray] = []
        for step in episode:
            point = _tagged(step.point)
            admission = self.admit(point)
            if admission.admit:
                self._add_point(point, admission)
                row = np.zeros(self.size)
                row[-1] = 1.0
            else:
                row = admission.coefficients
            rows.append(row)

        m = self.size
        design = np.zeros((len(rows), m))
        for t, row in enumerate(rows):
            design[t, : len(row)] = row

        returns = discounted_returns_to_go(episode.rewards(), episode.discounts())
        noise = self.kernel.noise_variance
        self.stat_s = self.stat_s + design.T @ design / noise
        self.stat_b = self.stat_b + design.T @ returns / noise
        self.n_episodes += 1

    # 갱신 중에 다시 대입되는 상태 (배열은 제자리 수정하지 않는다)
    _STATE = ("dictionary", "gram", "gram_inv", "stat_s", "stat_b", "alpha", "cov_factor", "n_episodes")

    def _snapshot(self) -> dict:
        return {name: getattr(self, name) for name in self._STATE}

    def _restore(self, snapshot: dict) -> None:
        for name, value in snapshot.items():
            setattr(self, name, value)

    def _solve_posterior(self) -> None:
        m = self.size
        if m == 0:
            return
        identity = np.eye(m)
        try:
            self.alpha = np.linalg.solve(identity + self.stat_s @ self.gram, self.stat_b)
            cov = np.linalg.solve((identity + self.gram @ self.stat_s).T, self.stat_s).T
        except np.linalg.LinAlgError as e:
            raise NumericalError(f"posterior solve failed: {e}") from e
        self.cov_factor = 0.5 * (cov + cov.T)

    # ==================== 질의 ====================

    def posterior(self, belief: np.ndarray, actions: Sequence[str]) -> Tuple[np.ndarray, np.ndarray]:
        """
        행동별 사후 평균/분산

        행동마다 action 커널이 0 이 아닌 딕셔너리 포인트만 모아서 계산한다.
        """
        if len(actions) == 0:
            raise ValueError("actions must be non-empty")
        belief = np.asarray(belief, dtype=float)
        self._check_dim(belief)

        prior_b = belief_self(self.kernel, belief)
        prior = np.array([prior_b * action_self(self.kernel, a, TARGET) for a in actions])
        if self.size == 0:
            return np.zeros(len(actions)), prior

        kb = belief_kernel(self.kernel, self.dictionary.beliefs, belief)
        means = np.zeros(len(actions))
        variances = prior.copy()
        for i, a in enumerate(actions):
            ka = action_kernel(self.kernel, self.dictionary.actions, self.dictionary.origins, a, TARGET)
            idx = np.flatnonzero(ka)
            if len(idx) == 0:
                continue
            kx = kb[idx] * ka[idx]
            means[i] = kx @ self.alpha[idx]
            variances[i] = prior[i] - kx @ self.cov_factor[np.ix_(idx, idx)] @ kx

        if np.any(variances < -self.variance_tolerance):
            worst = float(variances.min())
            raise NumericalError(f"negative posterior variance {worst:.3e} (broken covariance factor)")
        return means, np.maximum(variances, 0.0)

    def copy(self) -> "GPQModel":
        """읽기 전용 스냅샷"""
        return copy.deepcopy(self)

    def __repr__(self):
        return (
            f"GPQModel(dim={self.belief_dim}, dictionary={self.size}/{self.dictionary_cap}, "
            f"episodes={self.n_episodes}, kernel={self.kernel.belief_kernel}x{self.kernel.action_kernel})"
        )


# =============================================================================
# 함수형 인터페이스
# =============================================================================

def discounted_returns_to_go(rewards: np.ndarray, discounts: np.ndarray) -> np.ndarray:
    """H y = r 풀이 (H: 대각 1, 윗대각 -γ_t 인 상삼각 행렬)"""
    n = len(rewards)
    h = np.eye(n)
    if n > 1:
        h[np.arange(n - 1), np.arange(1, n)] = -discounts[:-1]
    return solve_triangular(h, rewards, lower=False, unit_diagonal=True)


def dictionary_admit(model: GPQModel, x: JointPoint) -> Admission:
    return model.admit(x)


def gptd_update(model: GPQModel, episode: EpisodeTransitions) -> GPQModel:
    return model.update(episode)


def q_posterior(model: GPQModel, belief: np.ndarray, actions: Sequence[str]) -> List[Posterior]:
    means, variances = model.posterior(belief, actions)
    return [Posterior(float(m), float(v)) for m, v in zip(means, variances)]


def sample_action(
    model: GPQModel,
    belief: np.ndarray,
    actions: Sequence[str],
    exploration_scale: float,
    rng: np.random.Generator,
) -> str:
    """
    사후분포 샘플링으로 행동 선택

    q_a ~ N(mean_a, scale² · var_a) 중 최대값. scale=0 이면 평균 기준 greedy,
    동점은 앞쪽 행동.
    """
    if len(actions) == 0:
        raise ValueError("actions must be non-empty")
    if exploration_scale < 0:
        raise ValueError("exploration_scale must be >= 0")
    if len(actions) == 1:
        return actions[0]

    means, variances = model.posterior(belief, actions)
    if exploration_scale == 0:
        return actions[int(np.argmax(means))]

    draws = means + exploration_scale * np.sqrt(variances) * rng.standard_normal(len(actions))
    return actions[int(np.argmax(draws))]


def _pad_square(matrix: np.ndarray, size: int) -> np.ndarray:
    padded = np.zeros((size, size))
    m = matrix.shape[0]
    padded[:m, :m] = matrix
    return padded


def _tagged(x: JointPoint) -> JointPoint:
    """모델이 직접 학습/질의하는 포인트는 target 으로 표시"""
    if x.origin != UNTAGGED:
        return x
    return JointPoint(x.belief, x.action, TARGET)
