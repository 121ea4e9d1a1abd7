"""
명령행 인터페이스

    train / evaluate / compare / adapt / chat / gen-db
종료 코드: 0 성공, 1 사용법/설정 오류, 2 수치 계산 실패
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from tabulate import tabulate

from .config import settings
from .config.experiment import ExperimentConfig, load_config
from .core.errors import ConfigError, HRLDialogError, NumericalError
from .core.types import ExperimentMode
from .utils.logger import setup_logger

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2

_MODES = {"hier": ExperimentMode.HIERARCHICAL, "flat": ExperimentMode.FLAT}


class _Parser(argparse.ArgumentParser):
    """사용법 오류를 종료 코드 1 로"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_seeds(text: str) -> List[int]:
    """'3' 또는 '0,1,2'"""
    try:
        seeds = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed list: {text}")
    if not seeds:
        raise argparse.ArgumentTypeError("seed list is empty")
    return seeds


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hrl_dialog", description="Hierarchical GP dialogue policy toolkit")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON experiment config")
    common.add_argument("--seed", type=parse_seeds, help="seed or comma-separated seed list")
    common.add_argument("--out", help="output directory")
    common.add_argument("--mode", choices=list(_MODES), help="episode loop (hier|flat)")
    common.add_argument("--quiet", action="store_true", help="only warnings and errors")

    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    sub.add_parser("train", parents=[common], help="train policies and emit learning curves")

    p = sub.add_parser("evaluate", parents=[common], help="evaluate saved policies greedily")
    p.add_argument("--policies", required=True, help="policy directory (contains policies.json)")
    p.add_argument("--dialogues", type=int, default=settings.EXPERIMENT["eval_dialogues_per_point"])

    sub.add_parser("compare", parents=[common], help="hierarchical vs flat on paired seeds")
    sub.add_parser("adapt", parents=[common], help="pretrained-then-adapted vs from-scratch masters")

    p = sub.add_parser("chat", parents=[common], help="talk to a trained policy at dialogue-act level")
    p.add_argument("--policies", required=True, help="policy directory (contains policies.json)")

    p = sub.add_parser("gen-db", parents=[common], help="write ontology and entity databases")
    p.add_argument("--file", default="ontology_db.json", help="file name inside --out")

    return parser


def _config(args) -> ExperimentConfig:
    config = load_config(args.config)
    return config.with_overrides(
        seeds=args.seed,
        output_dir=args.out,
        mode=_MODES[args.mode] if args.mode else None,
    )


# ==================== 명령 ====================

def cmd_train(args) -> int:
    from .experiments.trainer import train

    config = _config(args)
    curves = train(config)
    rows = [[s, c.points[-1].dialogues_seen, c.points[-1].success_rate, c.points[-1].mean_return]
            for s, c in sorted(curves.items())]
    print(tabulate(rows, headers=["seed", "dialogues", "success", "return"], floatfmt=".3f", tablefmt="grid"))
    return EXIT_OK


def cmd_evaluate(args) -> int:
    from .experiments.trainer import evaluate

    config = _config(args)
    seed = (args.seed or config.experiment.seeds)[0]
    report = evaluate(args.policies, args.dialogues, seed, config)
    rows = [[k, v] for k, v in report.model_dump().items()]
    print(tabulate(rows, headers=["metric", "value"], floatfmt=".3f", tablefmt="grid"))
    return EXIT_OK


def cmd_compare(args) -> int:
    from .experiments.compare import compare

    config = _config(args)
    hier = config.with_overrides(mode=ExperimentMode.HIERARCHICAL)
    flat = config.with_overrides(mode=ExperimentMode.FLAT)
    report = compare(hier, flat)
    print(report.summary_table())
    gain = report.plateau_gain(flat.experiment.n_train_dialogues)
    if gain is not None:
        print(f"extended flat run gain after {flat.experiment.n_train_dialogues} dialogues: {gain:+.3f}")
    return EXIT_OK


def cmd_adapt(args) -> int:
    from .experiments.adapt import PRETRAINED, SCRATCH, adapt_experiment

    config = _config(args)
    curves = adapt_experiment(config)
    rows = []
    for label in (PRETRAINED, SCRATCH):
        for curve in curves[label]:
            rows.append([label, curve.seed, curve.points[0].success_rate, curve.points[-1].success_rate])
    print(tabulate(rows, headers=["family", "seed", "initial", "final"], floatfmt=".3f", tablefmt="grid"))
    return EXIT_OK


def cmd_chat(args) -> int:
    from .experiments.chat import chat

    config = _config(args)
    seed = (args.seed or config.experiment.seeds)[0]
    chat(args.policies, seed, config=config)
    return EXIT_OK


def cmd_gen_db(args) -> int:
    from .env.database import generate_databases, save_ontology_db

    config = _config(args)
    seed = args.seed[0] if args.seed else config.experiment.db_seed
    path = Path(config.experiment.output_dir) / args.file
    try:
        save_ontology_db(path, generate_databases(seed))
    except OSError as e:
        raise ConfigError(f"cannot write {path}: {e}") from e
    print(f"wrote {path}")
    return EXIT_OK


COMMANDS = {
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "compare": cmd_compare,
    "adapt": cmd_adapt,
    "chat": cmd_chat,
    "gen-db": cmd_gen_db,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    setup_logger("hrl_dialog", "WARNING" if args.quiet else settings.LOGGING["level"])

    try:
        return COMMANDS[args.command](args)
    except NumericalError as e:
        logger.error(f"Numerical failure: {e}")
        return EXIT_NUMERICAL
    except HRLDialogError as e:
        logger.error(f"{args.command} failed: {e}")
        return EXIT_USAGE
    except OSError as e:
        logger.error(f"{args.command} failed: {e}")
        return EXIT_USAGE
