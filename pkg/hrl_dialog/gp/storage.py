"""
정책 파일 저장/로드 (.npz)
"""
import json
import logging
from pathlib import Path
from typing import Union

import numpy as np

from ..config import settings
from ..core.errors import FormatVersionError
from .kernel import KernelSpec, PointSet
from .model import GPQModel

logger = logging.getLogger(__name__)

_ARRAYS = ("alpha", "cov_factor", "gram", "gram_inv", "stat_s", "stat_b")


def save_model(model: GPQModel, path: Union[str, Path]) -> Path:
    """GPQModel 저장 (헤더 JSON + 배열)"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    header = {
        "format_version": settings.FORMAT_VERSION,
        "kernel": model.kernel.model_dump(),
        "belief_dim": model.belief_dim,
        "sparsify_threshold": model.sparsify_threshold,
        "dictionary_cap": model.dictionary_cap,
        "gamma": model.gamma,
        "jitter": model.jitter,
        "variance_tolerance": model.variance_tolerance,
        "actions": model.actions,
        "n_episodes": model.n_episodes,
    }
    arrays = {name: getattr(model, name) for name in _ARRAYS}

    # 파일 객체로 넘겨야 확장자가 바뀌지 않음
    with open(path, "wb") as f:
        np.savez(
            f,
            header=np.array(json.dumps(header, sort_keys=True)),
            beliefs=model.dictionary.beliefs,
            actions=model.dictionary.actions,
            origins=model.dictionary.origins,
            **arrays,
        )
    logger.debug(f"Saved policy ({model.size} dictionary points) to {path}")
    return path


def load_model(path: Union[str, Path]) -> GPQModel:
    """GPQModel 로드"""
    path = Path(path)
    with np.load(path, allow_pickle=False) as data:
        header = json.loads(str(data["header"]))
        version = header.get("format_version")
        if version != settings.FORMAT_VERSION:
            raise FormatVersionError(
                f"{path}: format version {version}, expected {settings.FORMAT_VERSION}"
            )

        model = GPQModel(
            KernelSpec(**header["kernel"]),
            belief_dim=header["belief_dim"],
            sparsify_threshold=header["sparsify_threshold"],
            dictionary_cap=header["dictionary_cap"],
            gamma=header["gamma"],
            jitter=header["jitter"],
            variance_tolerance=header["variance_tolerance"],
            actions=header["actions"],
        )
        model.n_episodes = header["n_episodes"]
        model.dictionary = PointSet(
            data["beliefs"].reshape(-1, model.belief_dim), data["actions"], data["origins"]
        )
        for name in _ARRAYS:
            setattr(model, name, data[name].copy())

    logger.debug(f"Loaded policy {model!r} from {path}")
    return model
