"""
학습 곡선 CSV / gnuplot 스크립트
"""
import logging
from pathlib import Path
from typing import Iterable, List, Union

import pandas as pd

from ..core.models import CurvePoint, LearningCurve

logger = logging.getLogger(__name__)

COLUMNS = ["label", "seed", "dialogues_seen", "success_rate", "mean_return", "sub_success_rate", "master_success_rate"]
_METRICS = COLUMNS[3:]


def curves_to_frame(curves: Iterable[LearningCurve]) -> pd.DataFrame:
    rows = []
    for curve in curves:
        for p in curve.points:
            rows.append({"label": curve.label, "seed": curve.seed, **p.model_dump()})
    return pd.DataFrame(rows, columns=COLUMNS)


def frame_to_curves(df: pd.DataFrame) -> List[LearningCurve]:
    curves = []
    for (label, seed), group in df.groupby(["label", "seed"], sort=False):
        points = [
            CurvePoint(**{k: row[k] for k in ["dialogues_seen"] + _METRICS})
            for row in group.sort_values("dialogues_seen").to_dict("records")
        ]
        curves.append(LearningCurve(seed=int(seed), label=str(label), points=points))
    return curves


def save_curves(path: Union[str, Path], curves: Iterable[LearningCurve]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    curves_to_frame(curves).to_csv(path, index=False)
    return path


def load_curves(path: Union[str, Path]) -> List[LearningCurve]:
    """CSV → 곡선 (실수값 무손실)"""
    df = pd.read_csv(path, float_precision="round_trip", keep_default_na=False, dtype={"label": str})
    return frame_to_curves(df)


def mean_curve(curves: Iterable[LearningCurve]) -> pd.DataFrame:
    """라벨별 시드 평균"""
    df = curves_to_frame(curves)
    return df.groupby(["label", "dialogues_seen"], sort=True)[_METRICS].mean().reset_index()


def write_gnuplot_script(csv_path: Union[str, Path], labels: List[str], metric: str = "success_rate") -> Path:
    """CSV 옆에 평균 곡선 플롯용 gnuplot 스크립트 작성"""
    csv_path = Path(csv_path)
    column = COLUMNS.index(metric) + 1
    script = csv_path.with_suffix(".gp")
    plots = ", \\\n     ".join(
        f"'{csv_path.name}' using (strcol(1) eq '{label}' ? $3 : 1/0):{column} "
        f"smooth unique with linespoints title '{label}'"
        for label in labels
    )
    script.write_text(
        "set datafile separator ','\n"
        "set xlabel 'training dialogues'\n"
        f"set ylabel '{metric}'\n"
        "set terminal pngcairo size 900,600\n"
        f"set output '{csv_path.stem}.png'\n"
        f"plot {plots}\n",
        encoding="utf-8",
    )
    return script
