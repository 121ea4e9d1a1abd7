"""
실험 설정 모델 (JSON 설정 파일 ↔ pydantic)
"""
import json
import logging
from pathlib import Path
from typing import Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from . import settings
from ..core.errors import ConfigError
from ..core.types import ExperimentMode

logger = logging.getLogger(__name__)


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class GPSettings(_Section):
    """GP 하이퍼파라미터"""
    belief_kernel: Literal["linear", "gaussian"] = settings.GP_CONFIG["belief_kernel"]
    gaussian_width: float = Field(default=settings.GP_CONFIG["gaussian_width"], gt=0)
    noise_variance: float = Field(default=settings.GP_CONFIG["noise_variance"], gt=0)
    sparsify_threshold: float = Field(default=settings.GP_CONFIG["sparsify_threshold"], ge=0)
    dictionary_cap: int = Field(default=settings.GP_CONFIG["dictionary_cap"], gt=0)


class HierarchyConfig(_Section):
    """두 시간 척도 설정"""
    gamma: float = Field(default=settings.HIERARCHY["gamma"], gt=0, le=1)
    master_exploration_scale: float = Field(default=settings.HIERARCHY["master_exploration_scale"], ge=0)
    sub_exploration_scale: float = Field(default=settings.HIERARCHY["sub_exploration_scale"], ge=0)
    flat_exploration_scale: float = Field(default=settings.HIERARCHY["flat_exploration_scale"], ge=0)
    max_dialogue_length: int = Field(default=settings.REWARD["max_dialogue_length"], gt=0)
    max_sub_steps: int = Field(default=settings.HIERARCHY["max_sub_steps"], gt=0)

    @model_validator(mode="after")
    def _master_more_exploratory(self) -> "HierarchyConfig":
        if self.master_exploration_scale < self.sub_exploration_scale:
            raise ValueError("master_exploration_scale must be >= sub_exploration_scale")
        return self


class UserConfig(_Section):
    """사용자 시뮬레이터 설정"""
    p_change: float = Field(default=settings.USER_SIM["p_change"], ge=0, le=1)
    dontcare_prob: float = Field(default=settings.USER_SIM["dontcare_prob"], ge=0, le=1)
    opening_informs: int = Field(default=settings.USER_SIM["opening_informs"], ge=1)
    opening_mode: Literal["uniform", "exact"] = settings.USER_SIM["opening_mode"]
    max_goal_draws: int = Field(default=settings.USER_SIM["max_goal_draws"], gt=0)
    master_weights: Dict[str, float] = dict(settings.USER_SIM["master_weights"])
    sub_task_weights: Dict[str, float] = dict(settings.USER_SIM["sub_task_weights"])
    max_requestables: int = Field(default=settings.USER_SIM["max_requestables"], ge=1)

    @field_validator("master_weights", "sub_task_weights")
    @classmethod
    def _positive_weights(cls, weights: Dict[str, float]) -> Dict[str, float]:
        if not weights or any(w < 0 for w in weights.values()) or sum(weights.values()) <= 0:
            raise ValueError("weights must be non-negative with a positive total")
        return weights


class RunSettings(_Section):
    """실험 실행 설정"""
    mode: ExperimentMode = ExperimentMode.HIERARCHICAL
    n_train_dialogues: int = Field(default=settings.EXPERIMENT["n_train_dialogues"], ge=0)
    eval_every: int = Field(default=settings.EXPERIMENT["eval_every"], gt=0)
    eval_dialogues_per_point: int = Field(default=settings.EXPERIMENT["eval_dialogues_per_point"], gt=0)
    seeds: List[int] = list(settings.EXPERIMENT["seeds"])
    workers: int = Field(default=settings.EXPERIMENT["workers"], ge=1)
    db_seed: int = settings.EXPERIMENT["db_seed"]
    pretrain_dialogues: int = Field(default=settings.EXPERIMENT["pretrain_dialogues"], ge=0)
    extra_flat_dialogues: int = Field(default=settings.EXPERIMENT["extra_flat_dialogues"], ge=0)
    output_dir: str = settings.EXPERIMENT["output_dir"]

    @model_validator(mode="after")
    def _check(self) -> "RunSettings":
        if not self.seeds:
            raise ValueError("seeds must be non-empty")
        if self.n_train_dialogues % self.eval_every != 0:
            raise ValueError(
                f"eval_every ({self.eval_every}) must divide n_train_dialogues ({self.n_train_dialogues})"
            )
        return self


class ExperimentConfig(_Section):
    """전체 실험 설정"""
    experiment: RunSettings = RunSettings()
    gp: GPSettings = GPSettings()
    hierarchy: HierarchyConfig = HierarchyConfig()
    user: UserConfig = UserConfig()

    def with_overrides(
        self,
        seeds: Optional[List[int]] = None,
        output_dir: Optional[str] = None,
        mode: Optional[ExperimentMode] = None,
    ) -> "ExperimentConfig":
        """CLI 플래그 반영"""
        update = {}
        if seeds is not None:
            update["seeds"] = seeds
        if output_dir is not None:
            update["output_dir"] = output_dir
        if mode is not None:
            update["mode"] = mode
        if not update:
            return self
        data = self.model_dump()
        data["experiment"].update(update)
        return build_config(data)


def build_config(data: Dict) -> ExperimentConfig:
    """dict → ExperimentConfig (오류는 ConfigError 로 변환)"""
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        fields = ", ".join(".".join(str(p) for p in err["loc"]) or "<root>" for err in e.errors())
        raise ConfigError(f"invalid config field(s): {fields}: {e.errors()[0]['msg']}") from e


def load_config(path: Optional[Union[str, Path]] = None) -> ExperimentConfig:
    """JSON 설정 파일 로드 (없으면 기본값)"""
    if path is None:
        return ExperimentConfig()
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: not valid JSON ({e})")
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    config = build_config(data)
    logger.debug(f"Loaded config from {path}")
    return config
