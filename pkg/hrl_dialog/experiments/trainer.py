"""
학습/평가 루프

시드마다 학습 난수는 SeedSequence([seed, 0]), 평가 난수는 평가 지점마다 새로 만든
SeedSequence([seed, 1]) 를 쓴다. 평가는 탐험 없이(greedy) 진행한다.
"""
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Mapping, Optional, Tuple, Union

import numpy as np

from ..config import settings
from ..config.experiment import ExperimentConfig
from ..config.ontology import MASTER_DOMAINS, SUB_DOMAINS
from ..core.errors import ConfigError, FormatVersionError
from ..core.models import CurvePoint, EvaluationReport, LearningCurve
from ..core.types import ExperimentMode, RunMode
from ..env.database import EntityDB, generate_databases
from ..env.domain import DomainSpec, flat_spec, master_spec, sub_spec
from ..env.environment import DialogueEnv
from ..env.rewards import RewardSpec
from ..gp.kernel import KernelSpec
from ..gp.model import GPQModel
from ..gp.storage import load_model, save_model
from ..hrl.episode import EpisodeLog
from ..hrl.policy import GPPolicy, Policy, RandomPolicy, ScriptedPolicy
from ..hrl.runner import run_episode_flat, run_episode_hierarchical
from ..user.simulator import AgendaUser
from .curves import save_curves, write_gnuplot_script
from .manifest import write_manifest

logger = logging.getLogger(__name__)

TRAIN_STREAM = 0
EVAL_STREAM = 1
PRETRAIN_STREAM = 2

_INDEX_FILE = "policies.json"


# =============================================================================
# 정책 묶음
# =============================================================================

@dataclass
class PolicySet:
    """한 실험의 정책들 (계층형: 마스터 + 서브, flat: 마스터 도메인별 flat 정책)"""
    mode: ExperimentMode
    policies: Dict[str, Policy]
    require_sub_task: bool = True

    @property
    def masters(self) -> Dict[str, Policy]:
        return {d: p for d, p in self.policies.items() if d in MASTER_DOMAINS}

    @property
    def subs(self) -> Dict[str, Policy]:
        return {d: p for d, p in self.policies.items() if d in SUB_DOMAINS}

    def models(self) -> Dict[str, GPQModel]:
        return {d: p.model for d, p in self.policies.items() if isinstance(p, GPPolicy)}

    def learn(self, log: EpisodeLog) -> None:
        """대화 한 개의 전이로 업데이트 (마스터는 외부 보상, 서브는 내부 보상)"""
        self.policies[log.master_domain].learn(log.master_transitions)
        for sub, transitions in log.sub_transitions:
            self.policies[sub].learn(transitions)

    def save(self, directory: Union[str, Path]) -> Path:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        files = {}
        for domain, model in self.models().items():
            files[domain] = f"{domain}.npz"
            save_model(model, directory / files[domain])
        index = {
            "format_version": settings.FORMAT_VERSION,
            "mode": str(self.mode),
            "require_sub_task": self.require_sub_task,
            "models": files,
        }
        (directory / _INDEX_FILE).write_text(json.dumps(index, indent=2, sort_keys=True), encoding="utf-8")
        return directory

    @classmethod
    def load(cls, directory: Union[str, Path]) -> "PolicySet":
        directory = Path(directory)
        index_path = directory / _INDEX_FILE
        if not index_path.exists():
            raise ConfigError(f"no policy index ({_INDEX_FILE}) in {directory}")
        index = json.loads(index_path.read_text(encoding="utf-8"))
        if index.get("format_version") != settings.FORMAT_VERSION:
            raise FormatVersionError(
                f"{index_path}: format version {index.get('format_version')}, expected {settings.FORMAT_VERSION}"
            )
        policies = {d: GPPolicy(load_model(directory / f)) for d, f in index["models"].items()}
        return cls(ExperimentMode(index["mode"]), policies, index.get("require_sub_task", True))


def kernel_from(config: ExperimentConfig) -> KernelSpec:
    gp = config.gp
    return KernelSpec(
        belief_kernel=gp.belief_kernel,
        gaussian_width=gp.gaussian_width,
        noise_variance=gp.noise_variance,
    )


def new_model(config: ExperimentConfig, spec: DomainSpec) -> GPQModel:
    return GPQModel(
        kernel_from(config),
        belief_dim=spec.belief_dim,
        sparsify_threshold=config.gp.sparsify_threshold,
        dictionary_cap=config.gp.dictionary_cap,
        gamma=config.hierarchy.gamma,
        actions=spec.action_set(),
    )


def _specs(mode: ExperimentMode, require_sub_task: bool = True) -> Dict[str, DomainSpec]:
    if mode == ExperimentMode.FLAT:
        return {d: flat_spec(d) for d in MASTER_DOMAINS}
    specs = {d: master_spec(d, with_options=require_sub_task) for d in MASTER_DOMAINS}
    specs.update({d: sub_spec(d) for d in SUB_DOMAINS})
    return specs


def new_policy_set(
    config: ExperimentConfig,
    mode: Optional[ExperimentMode] = None,
    require_sub_task: bool = True,
) -> PolicySet:
    """학습 전 GP 정책 묶음"""
    mode = _run_mode(mode or config.experiment.mode)
    policies = {d: GPPolicy(new_model(config, spec)) for d, spec in _specs(mode, require_sub_task).items()}
    return PolicySet(mode, policies, require_sub_task)


def scripted_policy_set(mode: ExperimentMode = ExperimentMode.HIERARCHICAL, require_sub_task: bool = True) -> PolicySet:
    """규칙 기반 최적 정책 묶음 (성공률 상한 측정)"""
    mode = _run_mode(mode)
    policy = ScriptedPolicy()
    return PolicySet(mode, {d: policy for d in _specs(mode, require_sub_task)}, require_sub_task)


def random_policy_set(mode: ExperimentMode = ExperimentMode.HIERARCHICAL, require_sub_task: bool = True) -> PolicySet:
    """무작위 정책 묶음 (성공률 하한 측정)"""
    mode = _run_mode(mode)
    policy = RandomPolicy()
    return PolicySet(mode, {d: policy for d in _specs(mode, require_sub_task)}, require_sub_task)


def _run_mode(mode: ExperimentMode) -> ExperimentMode:
    # adapt 실험도 학습 루프는 계층형
    return ExperimentMode.FLAT if mode == ExperimentMode.FLAT else ExperimentMode.HIERARCHICAL


# =============================================================================
# 대화 실행
# =============================================================================

def make_env(
    config: ExperimentConfig,
    dbs: Mapping[str, EntityDB],
    mode: ExperimentMode,
    require_sub_task: bool = True,
    user=None,
) -> DialogueEnv:
    user = user or AgendaUser(dbs, config.user, require_sub_task)
    reward = RewardSpec(max_length=config.hierarchy.max_dialogue_length)
    return DialogueEnv(dbs, user, reward, flat=mode == ExperimentMode.FLAT, require_sub_task=require_sub_task)


def run_dialogue(
    policy_set: PolicySet,
    env: DialogueEnv,
    config: ExperimentConfig,
    rng: np.random.Generator,
    mode: RunMode,
) -> EpisodeLog:
    if policy_set.mode == ExperimentMode.FLAT:
        return run_episode_flat(policy_set.policies, env, config.hierarchy, rng, mode)
    return run_episode_hierarchical(policy_set.masters, policy_set.subs, env, config.hierarchy, rng, mode)


def evaluate_policies(
    policy_set: PolicySet,
    config: ExperimentConfig,
    dbs: Mapping[str, EntityDB],
    n_dialogues: int,
    rng: np.random.Generator,
) -> EvaluationReport:
    """탐험 없이 n 개 대화를 실행해 성공률/평균 보상 집계"""
    env = make_env(config, dbs, policy_set.mode, policy_set.require_sub_task)
    logs = [run_dialogue(policy_set, env, config, rng, RunMode.EVAL) for _ in range(n_dialogues)]
    n = max(len(logs), 1)
    return EvaluationReport(
        n_dialogues=len(logs),
        success_rate=sum(l.success for l in logs) / n,
        mean_return=sum(l.total_return for l in logs) / n,
        master_success_rate=sum(l.master_success for l in logs) / n,
        sub_success_rate=sum(l.sub_success for l in logs) / n,
        mean_length=sum(l.length for l in logs) / n,
    )


def _eval_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, EVAL_STREAM]))


def _curve_point(report: EvaluationReport, seen: int) -> CurvePoint:
    return CurvePoint(
        dialogues_seen=seen,
        success_rate=report.success_rate,
        mean_return=report.mean_return,
        sub_success_rate=report.sub_success_rate,
        master_success_rate=report.master_success_rate,
    )


def train_seed(
    config: ExperimentConfig,
    seed: int,
    policy_set: Optional[PolicySet] = None,
    label: Optional[str] = None,
    n_dialogues: Optional[int] = None,
    dbs: Optional[Mapping[str, EntityDB]] = None,
) -> Tuple[PolicySet, LearningCurve]:
    """
    시드 하나의 학습 루프

    대화마다 gptd_update 를 적용하고 eval_every 마다 평가 지점을 기록한다.
    """
    dbs = dbs or generate_databases(config.experiment.db_seed)
    policy_set = policy_set or new_policy_set(config)
    label = label or str(policy_set.mode)
    n_dialogues = config.experiment.n_train_dialogues if n_dialogues is None else n_dialogues
    every = config.experiment.eval_every
    n_eval = config.experiment.eval_dialogues_per_point

    rng = np.random.default_rng(np.random.SeedSequence([seed, TRAIN_STREAM]))
    env = make_env(config, dbs, policy_set.mode, policy_set.require_sub_task)

    def evaluate_point(seen: int) -> CurvePoint:
        report = evaluate_policies(policy_set, config, dbs, n_eval, _eval_rng(seed))
        logger.info(
            f"[{label} seed={seed}] {seen} dialogues: success={report.success_rate:.3f} "
            f"master={report.master_success_rate:.3f} sub={report.sub_success_rate:.3f} "
            f"return={report.mean_return:.2f}"
        )
        return _curve_point(report, seen)

    points = [evaluate_point(0)]
    for i in range(1, n_dialogues + 1):
        log = run_dialogue(policy_set, env, config, rng, RunMode.TRAIN)
        policy_set.learn(log)
        if i % every == 0:
            points.append(evaluate_point(i))

    return policy_set, LearningCurve(seed=seed, label=label, points=points)


def _train_worker(args) -> Tuple[int, LearningCurve, Dict[str, GPQModel]]:
    config, seed = args
    policy_set, curve = train_seed(config, seed)
    return seed, curve, policy_set.models()


def train(config: ExperimentConfig, out_dir: Optional[Union[str, Path]] = None) -> Dict[int, LearningCurve]:
    """
    설정된 모든 시드 학습 후 정책/곡선/매니페스트 저장

    workers > 1 이면 시드를 프로세스별로 병렬 실행한다 (시드 내부는 순차).
    """
    out_dir = Path(out_dir or config.experiment.output_dir)
    ensure_writable(out_dir)
    mode = _run_mode(config.experiment.mode)
    seeds = config.experiment.seeds
    logger.info(f"Training {mode} policies: {config.experiment.n_train_dialogues} dialogues, seeds {seeds}")

    jobs = [(config, s) for s in seeds]
    if config.experiment.workers > 1 and len(seeds) > 1:
        with ProcessPoolExecutor(max_workers=min(config.experiment.workers, len(seeds))) as pool:
            results = list(pool.map(_train_worker, jobs))
    else:
        results = [_train_worker(job) for job in jobs]

    curves: Dict[int, LearningCurve] = {}
    for seed, curve, models in results:
        curves[seed] = curve
        policy_set = PolicySet(mode, {d: GPPolicy(m) for d, m in models.items()})
        policy_set.save(out_dir / "policies" / f"seed_{seed}")

    csv_path = save_curves(out_dir / "curves.csv", curves.values())
    write_gnuplot_script(csv_path, [str(mode)])
    write_manifest(out_dir, config, "train")
    return curves


def evaluate(
    policy_dir: Union[str, Path],
    n_dialogues: int,
    seed: int,
    config: Optional[ExperimentConfig] = None,
) -> EvaluationReport:
    """저장된 정책 평가 (파일은 읽기만 한다)"""
    config = config or ExperimentConfig()
    policy_set = PolicySet.load(policy_dir)
    dbs = generate_databases(config.experiment.db_seed)
    return evaluate_policies(policy_set, config, dbs, n_dialogues, _eval_rng(seed))


def ensure_writable(out_dir: Path) -> None:
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        probe = out_dir / ".write_test"
        probe.write_text("", encoding="utf-8")
        probe.unlink()
    except OSError as e:
        raise ConfigError(f"output directory {out_dir} is not writable: {e}") from e
