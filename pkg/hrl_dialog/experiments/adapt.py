"""
사전학습 마스터 정책 적응 실험

1) 서브 태스크 없는 환경에서 마스터 정책 사전학습
2) action 커널 제한으로 계층형 행동 집합에 맞게 변환
3) 계층형 재학습 곡선과 처음부터 학습한 곡선 비교
"""
import logging
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Union

import numpy as np

from ..adaptation.transfer import PolicyTransferSpec, adapt_policy
from ..config.experiment import ExperimentConfig
from ..config.ontology import MASTER_DOMAINS
from ..core.models import LearningCurve
from ..core.types import ExperimentMode, RunMode
from ..env.database import EntityDB, generate_databases
from ..env.domain import master_spec
from ..hrl.policy import GPPolicy
from .curves import save_curves, write_gnuplot_script
from .manifest import write_manifest
from .trainer import PRETRAIN_STREAM, PolicySet, ensure_writable, make_env, new_policy_set, run_dialogue, train_seed

logger = logging.getLogger(__name__)

PRETRAINED = "pretrained"
SCRATCH = "scratch"


def pretrain_masters(
    config: ExperimentConfig,
    seed: int,
    dbs: Mapping[str, EntityDB],
    n_dialogues: Optional[int] = None,
) -> PolicySet:
    """서브 태스크 없이(마스터 목표만으로 성공) 마스터 정책 학습"""
    n_dialogues = config.experiment.pretrain_dialogues if n_dialogues is None else n_dialogues
    policy_set = new_policy_set(config, ExperimentMode.HIERARCHICAL, require_sub_task=False)
    env = make_env(config, dbs, ExperimentMode.HIERARCHICAL, require_sub_task=False)
    rng = np.random.default_rng(np.random.SeedSequence([seed, PRETRAIN_STREAM]))
    for _ in range(n_dialogues):
        log = run_dialogue(policy_set, env, config, rng, RunMode.TRAIN)
        policy_set.learn(log)
    logger.info(f"[seed={seed}] pretrained masters on {n_dialogues} dialogues without sub-tasks")
    return policy_set


def adapted_policy_set(config: ExperimentConfig, pretrained: PolicySet) -> PolicySet:
    """사전학습 마스터 + 새 서브 정책으로 계층형 정책 묶음 구성"""
    policy_set = new_policy_set(config, ExperimentMode.HIERARCHICAL)
    for domain in MASTER_DOMAINS:
        source = master_spec(domain, with_options=False)
        target = master_spec(domain, with_options=True)
        spec = PolicyTransferSpec(
            source_action_set=source.action_set(),
            target_action_set=target.action_set(),
            belief_dim=target.belief_dim,
        )
        policy_set.policies[domain] = GPPolicy(adapt_policy(pretrained.policies[domain].model, spec))
    return policy_set


def adapt_experiment(
    config: ExperimentConfig,
    out_dir: Optional[Union[str, Path]] = None,
) -> Dict[str, List[LearningCurve]]:
    """시드마다 사전학습-적응 곡선과 처음부터 학습 곡선을 만든다"""
    out_dir = Path(out_dir or config.experiment.output_dir)
    ensure_writable(out_dir)
    dbs = generate_databases(config.experiment.db_seed)

    curves: Dict[str, List[LearningCurve]] = {PRETRAINED: [], SCRATCH: []}
    for seed in config.experiment.seeds:
        pretrained = pretrain_masters(config, seed, dbs)
        adapted = adapted_policy_set(config, pretrained)
        adapted, curve_pre = train_seed(config, seed, adapted, PRETRAINED, dbs=dbs)
        scratch, curve_scratch = train_seed(
            config, seed, new_policy_set(config, ExperimentMode.HIERARCHICAL), SCRATCH, dbs=dbs
        )
        curves[PRETRAINED].append(curve_pre)
        curves[SCRATCH].append(curve_scratch)
        adapted.save(out_dir / "policies" / PRETRAINED / f"seed_{seed}")
        scratch.save(out_dir / "policies" / SCRATCH / f"seed_{seed}")

    csv_path = save_curves(out_dir / "adapt_curves.csv", curves[PRETRAINED] + curves[SCRATCH])
    write_gnuplot_script(csv_path, [PRETRAINED, SCRATCH])
    write_manifest(out_dir, config, "adapt")
    return curves
