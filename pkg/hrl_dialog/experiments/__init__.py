"""실험 하네스 패키지"""
from .adapt import adapt_experiment
from .chat import chat, parse_user_act
from .compare import ComparisonReport, compare
from .curves import load_curves, save_curves
from .trainer import PolicySet, evaluate, evaluate_policies, train, train_seed

__all__ = [
    "adapt_experiment", "chat", "parse_user_act", "ComparisonReport", "compare",
    "load_curves", "save_curves", "PolicySet", "evaluate", "evaluate_policies", "train", "train_seed",
]
