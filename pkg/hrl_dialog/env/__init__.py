"""대화 환경 패키지"""
from .belief import BeliefState, update_belief
from .database import EntityDB, db_query, generate_database, generate_databases, load_ontology_db, save_ontology_db
from .domain import DomainSpec, flat_spec, master_spec, parse_action, sub_spec
from .environment import DialogueEnv, StepResult
from .rewards import RewardSpec, SuccessFlags, intrinsic_reward, success_check

__all__ = [
    "BeliefState", "update_belief",
    "EntityDB", "db_query", "generate_database", "generate_databases", "load_ontology_db", "save_ontology_db",
    "DomainSpec", "flat_spec", "master_spec", "parse_action", "sub_spec",
    "DialogueEnv", "StepResult",
    "RewardSpec", "SuccessFlags", "intrinsic_reward", "success_check",
]
