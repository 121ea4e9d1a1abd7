"""
계층형 vs flat 비교 실험
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Union

import pandas as pd
from tabulate import tabulate

from ..config.experiment import ExperimentConfig
from ..core.models import LearningCurve
from ..core.types import ExperimentMode
from .curves import save_curves, write_gnuplot_script
from .manifest import write_manifest
from .trainer import ensure_writable, new_policy_set, train, train_seed

logger = logging.getLogger(__name__)

_RATES = ["success_rate", "master_success_rate", "sub_success_rate"]


@dataclass
class ComparisonReport:
    """시드별 최종 지점 차이 (a - b)"""
    labels: List[str]
    deltas: pd.DataFrame
    curves: Dict[str, List[LearningCurve]]
    extended: Optional[LearningCurve] = None

    @property
    def mean_deltas(self) -> Dict[str, float]:
        return {c: float(self.deltas[f"delta_{c}"].mean()) for c in _RATES}

    def plateau_gain(self, at: int) -> Optional[float]:
        """확장 flat 실행에서 마지막 지점 성공률 - at 지점 성공률"""
        if self.extended is None:
            return None
        by_seen = {p.dialogues_seen: p.success_rate for p in self.extended.points}
        return self.extended.points[-1].success_rate - by_seen[at]

    def summary_table(self) -> str:
        rows = self.deltas[["seed"] + [f"delta_{c}" for c in _RATES]].values.tolist()
        rows.append(["mean"] + [self.mean_deltas[c] for c in _RATES])
        headers = ["seed", "Δ success", "Δ master", "Δ sub"]
        return tabulate(rows, headers=headers, floatfmt=".3f", tablefmt="grid")


def paired_deltas(a: List[LearningCurve], b: List[LearningCurve]) -> pd.DataFrame:
    """같은 시드의 최종 지점끼리 비교"""
    final_a = {c.seed: c.points[-1] for c in a}
    final_b = {c.seed: c.points[-1] for c in b}
    rows = []
    for seed in sorted(set(final_a) & set(final_b)):
        row = {"seed": seed}
        for rate in _RATES:
            va, vb = getattr(final_a[seed], rate), getattr(final_b[seed], rate)
            row[f"a_{rate}"] = va
            row[f"b_{rate}"] = vb
            row[f"delta_{rate}"] = va - vb
        rows.append(row)
    return pd.DataFrame(rows)


def compare(
    config_a: ExperimentConfig,
    config_b: ExperimentConfig,
    out_dir: Optional[Union[str, Path]] = None,
    labels: Optional[List[str]] = None,
) -> ComparisonReport:
    """
    두 설정(보통 계층형/flat)을 같은 시드로 학습해 비교

    config_b 가 flat 이고 extra_flat_dialogues > 0 이면 첫 시드로 연장 학습을 추가한다.
    """
    out_dir = Path(out_dir or config_a.experiment.output_dir)
    ensure_writable(out_dir)
    labels = labels or [str(config_a.experiment.mode), str(config_b.experiment.mode)]
    if labels[0] == labels[1]:
        labels = [f"{labels[0]}_a", f"{labels[1]}_b"]

    curves_a = list(train(config_a, out_dir / labels[0]).values())
    curves_b = list(train(config_b, out_dir / labels[1]).values())
    for curve in curves_a:
        curve.label = labels[0]
    for curve in curves_b:
        curve.label = labels[1]

    extended = None
    extra = config_b.experiment.extra_flat_dialogues
    if config_b.experiment.mode == ExperimentMode.FLAT and extra > 0:
        seed = config_b.experiment.seeds[0]
        n = config_b.experiment.n_train_dialogues + extra
        logger.info(f"Extended flat run: seed {seed}, {n} dialogues")
        _, extended = train_seed(config_b, seed, new_policy_set(config_b), f"{labels[1]}_extended", n_dialogues=n)

    deltas = paired_deltas(curves_a, curves_b)
    report = ComparisonReport(labels, deltas, {labels[0]: curves_a, labels[1]: curves_b}, extended)

    all_curves = curves_a + curves_b + ([extended] if extended else [])
    csv_path = save_curves(out_dir / "compare_curves.csv", all_curves)
    write_gnuplot_script(csv_path, sorted({c.label for c in all_curves}))
    deltas.to_csv(out_dir / "compare_deltas.csv", index=False)
    extra_info = {"labels": labels}
    if extended is not None:
        extra_info["plateau_gain"] = report.plateau_gain(config_b.experiment.n_train_dialogues)
    write_manifest(out_dir, config_a, "compare", {"config_b": config_b.model_dump(mode="json"), **extra_info})
    return report
