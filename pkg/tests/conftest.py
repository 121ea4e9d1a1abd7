"""
공통 픽스처 (DB, 설정, 고정 사용자 목표)
"""
import numpy as np
import pytest

from hrl_dialog.config.experiment import ExperimentConfig, HierarchyConfig, UserConfig, build_config
from hrl_dialog.core.models import UserGoal
from hrl_dialog.env.database import generate_databases
from hrl_dialog.env.environment import DialogueEnv
from hrl_dialog.env.rewards import RewardSpec
from hrl_dialog.hrl.policy import ScriptedPolicy
from hrl_dialog.user.simulator import AgendaUser

DB_SEED = 7


@pytest.fixture(scope="session")
def dbs():
    return generate_databases(DB_SEED)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def hierarchy():
    return HierarchyConfig()


@pytest.fixture
def exact_user():
    """목표 변경 없음, 첫 발화에 모든 제약"""
    return UserConfig(p_change=0.0, opening_mode="exact", opening_informs=5)


def _entity_constraints(db, slots):
    entity = db.entities[0]
    return {s: entity[s] for s in slots}


@pytest.fixture
def restaurant_goal(dbs):
    return UserGoal(
        master_domain="restaurant",
        constraints=_entity_constraints(dbs["restaurant"], ["pricerange", "area", "food"]),
        requestables=["name", "phone", "address"],
        sub_task="payment",
        sub_constraints={"amount": "50", "method": "card", "cardnumber": "2222"},
    )


@pytest.fixture
def hotel_goal(dbs):
    return UserGoal(
        master_domain="hotel",
        constraints=_entity_constraints(dbs["hotel"], ["pricerange", "kind", "stars", "hasparking", "area"]),
        requestables=["name", "price", "phone", "address"],
        sub_task="booking",
        sub_constraints={"hour": "6pm", "peopleno": "4", "durationdays": "2", "day": "dontcare"},
    )


@pytest.fixture
def make_env(dbs, exact_user):
    """고정 목표 환경 생성기"""

    def _make(goal, flat=False, require_sub_task=True, max_length=30):
        user = AgendaUser(dbs, exact_user, require_sub_task, goal=goal)
        return DialogueEnv(dbs, user, RewardSpec(max_length=max_length), flat=flat,
                           require_sub_task=require_sub_task)

    return _make


@pytest.fixture
def scripted():
    policy = ScriptedPolicy()
    masters = {"restaurant": policy, "hotel": policy}
    subs = {"booking": policy, "payment": policy}
    return masters, subs


@pytest.fixture
def small_config(tmp_path):
    """몇 초 안에 끝나는 실험 설정"""
    return build_config({
        "experiment": {
            "n_train_dialogues": 10,
            "eval_every": 5,
            "eval_dialogues_per_point": 4,
            "seeds": [0],
            "pretrain_dialogues": 5,
            "extra_flat_dialogues": 0,
            "output_dir": str(tmp_path / "runs"),
        },
        "gp": {"dictionary_cap": 200},
    })


@pytest.fixture
def default_config():
    return ExperimentConfig()
