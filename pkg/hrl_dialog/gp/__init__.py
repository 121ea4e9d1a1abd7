"""GP Q 함수 패키지"""
from .kernel import JointPoint, KernelSpec, PointSet, kernel_eval, gram_matrix, SOURCE, TARGET, UNTAGGED
from .model import (
    Admission,
    EpisodeTransitions,
    GPQModel,
    Posterior,
    dictionary_admit,
    gptd_update,
    q_posterior,
    sample_action,
)
from .storage import load_model, save_model

__all__ = [
    "JointPoint", "KernelSpec", "PointSet", "kernel_eval", "gram_matrix", "SOURCE", "TARGET", "UNTAGGED",
    "Admission", "EpisodeTransitions", "GPQModel", "Posterior",
    "dictionary_admit", "gptd_update", "q_posterior", "sample_action",
    "load_model", "save_model",
]
