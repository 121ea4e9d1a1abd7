import numpy as np
import pytest

from hrl_dialog.config.experiment import UserConfig
from hrl_dialog.config.ontology import BOUND_VALUE, DONTCARE, MASTER_DOMAINS
from hrl_dialog.core.errors import FormatVersionError
from hrl_dialog.core.models import SystemAct, UserAct
from hrl_dialog.core.types import Phase, SystemIntent, UserIntent
from hrl_dialog.env.database import db_query
from hrl_dialog.user.goal import is_realizable, load_goal_fixtures, sample_goal, save_goal_fixtures
from hrl_dialog.user.simulator import Agenda, AgendaUser, maybe_change_goal, user_respond


def _act(intent, action, domain="restaurant", **kwargs):
    return SystemAct(intent=intent, action=action, domain=domain, **kwargs)


def _offer_for(goal, db):
    entity = db_query(db, goal.constraints)[0]
    values = {s: entity[s] for s in goal.constraints}
    return _act(SystemIntent.OFFER, "offer", goal.master_domain, entity=entity["name"], values=values)


# ==================== 목표 ====================

def test_sampled_goals_are_realizable(dbs):
    rng = np.random.default_rng(0)
    for _ in range(50):
        goal = sample_goal(dbs, rng)
        assert is_realizable(goal, dbs)
        assert goal.sub_task in ("booking", "payment")
        assert 1 <= len(goal.requestables) <= 2
        assert "name" not in goal.requestables
        assert "entityname" not in goal.sub_constraints


def test_uniform_master_split(dbs):
    rng = np.random.default_rng(2)
    n = 10_000
    restaurant = sum(sample_goal(dbs, rng).master_domain == "restaurant" for _ in range(n))
    assert abs(restaurant / n - 0.5) < 0.02


def test_goal_weights(dbs):
    rng = np.random.default_rng(1)
    config = UserConfig(master_weights={"restaurant": 1.0, "hotel": 0.0})
    assert {sample_goal(dbs, rng, config).master_domain for _ in range(20)} == {"restaurant"}


def test_goal_fixture_file(dbs, tmp_path):
    goals = [sample_goal(dbs, np.random.default_rng(s)) for s in range(3)]
    assert load_goal_fixtures(save_goal_fixtures(tmp_path / "goals.json", goals)) == goals

    (tmp_path / "old.json").write_text('{"format_version": 0, "goals": []}', encoding="utf-8")
    with pytest.raises(FormatVersionError):
        load_goal_fixtures(tmp_path / "old.json")


# ==================== 응답 규칙 ====================

def test_answers_request_and_confirm(restaurant_goal):
    agenda = Agenda(restaurant_goal)
    area = restaurant_goal.constraints["area"]

    reply = user_respond(agenda, _act(SystemIntent.REQUEST, "request_area", slot="area"))
    assert reply == UserAct(intent=UserIntent.INFORM, slots={"area": area})

    reply = user_respond(agenda, _act(SystemIntent.CONFIRM, "confirm_area", slot="area", value=area))
    assert reply.intent == UserIntent.AFFIRM

    reply = user_respond(agenda, _act(SystemIntent.CONFIRM, "confirm_area", slot="area", value="nowhere"))
    assert reply == UserAct(intent=UserIntent.NEGATE, slots={"area": area})


def test_repeat_returns_last_act(restaurant_goal):
    agenda = Agenda(restaurant_goal)
    first = user_respond(agenda, _act(SystemIntent.REQUEST, "request_food", slot="food"))
    assert user_respond(agenda, _act(SystemIntent.REPEAT, "repeat")) == first


def test_offer_acceptance_pushes_requests(dbs, restaurant_goal):
    agenda = Agenda(restaurant_goal)
    agenda.push(UserAct(intent=UserIntent.INFORM, slots={"food": restaurant_goal.constraints["food"]}))
    reply = user_respond(agenda, _offer_for(restaurant_goal, dbs["restaurant"]))
    assert agenda.accepted
    assert reply == UserAct(intent=UserIntent.REQUEST, requested="name")
    # 답을 들을 때까지 같은 요청
    assert user_respond(agenda, _act(SystemIntent.REPEAT, "repeat")) == reply
    assert all(a.intent != UserIntent.INFORM for a in agenda.stack)
    assert agenda.stack[0].intent == UserIntent.PAY


def test_wrong_offer_is_negated(dbs, restaurant_goal):
    agenda = Agenda(restaurant_goal)
    offer = _offer_for(restaurant_goal, dbs["restaurant"])
    values = dict(offer.values)
    slot = next(s for s, v in restaurant_goal.constraints.items() if v != DONTCARE)
    values[slot] = "other"
    reply = user_respond(agenda, offer.model_copy(update={"values": values}))
    assert reply == UserAct(intent=UserIntent.NEGATE, slots={slot: restaurant_goal.constraints[slot]})
    assert not agenda.accepted


def test_phases_only_move_forward(dbs, restaurant_goal):
    agenda = Agenda(restaurant_goal)
    user_respond(agenda, _offer_for(restaurant_goal, dbs["restaurant"]))
    for slot in restaurant_goal.requestables:
        reply = user_respond(agenda, _act(SystemIntent.INFORM, f"inform_{slot}", slot=slot, value="x"))
    assert reply.intent == UserIntent.PAY
    assert reply.slots == {"amount": "50"}
    assert agenda.phase == Phase.SUB

    execute = _act(SystemIntent.EXECUTE, "execute_payment", "payment",
                   values={"amount": "50", "method": "card", "cardnumber": "1111"})
    assert user_respond(agenda, execute) == UserAct(intent=UserIntent.NEGATE, slots={"cardnumber": "2222"})

    execute = execute.model_copy(update={"values": {"amount": "50", "method": "card", "cardnumber": "2222"}})
    assert user_respond(agenda, execute).intent == UserIntent.THANKYOU
    assert agenda.phase == Phase.DONE
    assert user_respond(agenda, _act(SystemIntent.REPEAT, "repeat")).intent == UserIntent.BYE

    with pytest.raises(ValueError):
        agenda.advance(Phase.MASTER)


def test_sub_phase_answers_entityname(hotel_goal):
    agenda = Agenda(hotel_goal)
    assert agenda.goal_value("entityname") is None
    agenda.advance(Phase.SUB)
    assert agenda.goal_value("entityname") == BOUND_VALUE
    assert agenda.goal_value("hour") == "6pm"


def test_without_sub_task_user_says_bye(dbs, restaurant_goal):
    agenda = Agenda(restaurant_goal, require_sub_task=False)
    user_respond(agenda, _offer_for(restaurant_goal, dbs["restaurant"]))
    for slot in restaurant_goal.requestables:
        reply = user_respond(agenda, _act(SystemIntent.INFORM, f"inform_{slot}", slot=slot, value="x"))
    assert reply.intent == UserIntent.BYE


# ==================== 목표 변경 ====================

def _withdrawing_change(dbs, goal):
    """수락한 엔티티를 무효로 만드는 (dontcare 가 아닌 값으로의) 목표 변경"""
    for seed in range(100):
        new, did = maybe_change_goal(goal, Phase.MASTER, np.random.default_rng(seed), dbs, 1.0)
        if not did:
            continue
        slot = next(s for s in goal.constraints if new.constraints[s] != goal.constraints[s])
        if new.constraints[slot] != DONTCARE:
            return new, slot
    raise AssertionError("no withdrawing change found")


def test_goal_change_rate(dbs):
    goal = sample_goal(dbs, np.random.default_rng(5))
    rng = np.random.default_rng(6)
    n = 10_000
    changed = 0
    for _ in range(n):
        new, did = maybe_change_goal(goal, Phase.MASTER, rng, dbs, 0.05)
        if did:
            changed += 1
            assert is_realizable(new, dbs)
            assert new.master_domain == goal.master_domain and new.sub_task == goal.sub_task
            assert sum(new.constraints[s] != goal.constraints[s] for s in goal.constraints) == 1
    assert abs(changed / n - 0.05) < 0.01


def test_certain_change_every_call_until_done(dbs):
    goal = sample_goal(dbs, np.random.default_rng(5))
    rng = np.random.default_rng(7)
    for phase in (Phase.MASTER, Phase.SUB):
        for _ in range(50):
            new, did = maybe_change_goal(goal, phase, rng, dbs, 1.0)
            assert did and new != goal
    for _ in range(50):
        assert maybe_change_goal(goal, Phase.DONE, rng, dbs, 1.0) == (goal, False)


def test_one_draw_when_unchanged(dbs):
    goal = sample_goal(dbs, np.random.default_rng(5))
    rng = np.random.default_rng(8)
    reference = np.random.default_rng(8)
    maybe_change_goal(goal, Phase.DONE, rng, dbs, 0.5)
    maybe_change_goal(goal, Phase.MASTER, rng, dbs, 0.0)
    reference.random()
    reference.random()
    assert rng.bit_generator.state == reference.bit_generator.state


def test_change_after_acceptance_needs_new_offer(dbs, restaurant_goal):
    agenda = Agenda(restaurant_goal)
    old_offer = _offer_for(restaurant_goal, dbs["restaurant"])
    user_respond(agenda, old_offer)
    assert agenda.accepted

    new_goal, slot = _withdrawing_change(dbs, restaurant_goal)
    assert agenda.change_goal(new_goal, slot)
    assert not agenda.accepted
    assert not any(a.intent in (UserIntent.REQUEST, UserIntent.PAY) for a in agenda.stack)
    assert agenda.peek() == UserAct(intent=UserIntent.INFORM, slots={slot: new_goal.constraints[slot]})

    # 예전 엔티티는 거절, 새 목표에 맞는 엔티티는 다시 수락
    reply = user_respond(agenda, old_offer)
    assert reply.intent == UserIntent.NEGATE
    reply = user_respond(agenda, _offer_for(new_goal, dbs["restaurant"]))
    assert agenda.accepted
    assert reply == UserAct(intent=UserIntent.REQUEST, requested="name")
    assert agenda.stack[0].intent == UserIntent.PAY


def test_dontcare_change_keeps_acceptance(dbs, restaurant_goal):
    agenda = Agenda(restaurant_goal)
    user_respond(agenda, _offer_for(restaurant_goal, dbs["restaurant"]))
    assert not agenda.change_goal(restaurant_goal.changed("food", DONTCARE), "food")
    assert agenda.accepted
    assert agenda.stack[0].intent == UserIntent.PAY


def test_sub_phase_change_withdraws_until_reoffer(dbs, restaurant_goal):
    agenda = Agenda(restaurant_goal)
    user_respond(agenda, _offer_for(restaurant_goal, dbs["restaurant"]))
    for slot in restaurant_goal.requestables:
        user_respond(agenda, _act(SystemIntent.INFORM, f"inform_{slot}", slot=slot, value="x"))
    assert agenda.phase == Phase.SUB

    new_goal, slot = _withdrawing_change(dbs, restaurant_goal)
    assert agenda.change_goal(new_goal, slot)
    agenda.pop()
    execute = _act(SystemIntent.EXECUTE, "execute_payment", "payment",
                   values={"amount": "50", "method": "card", "cardnumber": "2222"})
    assert user_respond(agenda, execute).intent != UserIntent.THANKYOU
    assert agenda.phase == Phase.SUB

    user_respond(agenda, _offer_for(new_goal, dbs["restaurant"]))
    assert agenda.accepted
    # sub 단계에서 다시 수락하면 서브 태스크 시작 행위는 다시 넣지 않는다
    assert not any(a.intent == UserIntent.PAY for a in agenda.stack)


# ==================== AgendaUser ====================

def test_opening_modes(dbs, hotel_goal):
    exact = AgendaUser(dbs, UserConfig(opening_mode="exact", opening_informs=5), goal=hotel_goal)
    opening = exact.start(np.random.default_rng(0))
    assert opening.slots == hotel_goal.constraints
    assert len(exact.agenda) == 0

    uniform = AgendaUser(dbs, UserConfig(opening_informs=2), goal=hotel_goal)
    rng = np.random.default_rng(0)
    for _ in range(20):
        opening = uniform.start(rng)
        assert 1 <= len(opening.slots) <= 2
        pending = {s for a in uniform.agenda.stack for s in a.slots}
        assert pending | set(opening.slots) == set(MASTER_DOMAINS["hotel"]["constraint_slots"])


def test_goal_change_pushes_new_inform(dbs, restaurant_goal):
    user = AgendaUser(dbs, UserConfig(p_change=1.0, opening_mode="exact", opening_informs=3), goal=restaurant_goal)
    rng = np.random.default_rng(3)
    user.start(rng)
    reply = user.respond(_act(SystemIntent.REQUEST, "request_hour", slot="hour"), rng)
    assert user.n_goal_changes == 1
    assert user.goal != restaurant_goal
    slot = next(s for s in user.goal.constraints if user.goal.constraints[s] != restaurant_goal.constraints[s])
    assert reply == UserAct(intent=UserIntent.INFORM, slots={slot: user.goal.constraints[slot]})


def test_certain_change_user_changes_every_turn(dbs, restaurant_goal):
    user = AgendaUser(dbs, UserConfig(p_change=1.0, opening_mode="exact", opening_informs=3), goal=restaurant_goal)
    rng = np.random.default_rng(4)
    user.start(rng)
    for turn in range(1, 11):
        user.respond(_act(SystemIntent.REPEAT, "repeat"), rng)
        assert user.n_goal_changes == turn
        assert is_realizable(user.goal, dbs)
