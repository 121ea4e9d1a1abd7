import numpy as np
import pytest

from hrl_dialog.adaptation.transfer import PolicyTransferSpec, adapt_policy, restrict_action_kernel
from hrl_dialog.core.errors import TransferError
from hrl_dialog.gp.kernel import SOURCE, TARGET, JointPoint, KernelSpec, PointSet, gram_matrix, kernel_vector
from hrl_dialog.gp.model import EpisodeTransitions, GPQModel, discounted_returns_to_go

DIM = 4
NOISE = 0.8
SOURCE_ACTIONS = ["offer", "repeat", "bye"]
TARGET_ACTIONS = SOURCE_ACTIONS + ["book"]


def _episode(rng, actions, final_reward=19.0):
    episode = EpisodeTransitions()
    for i, a in enumerate(actions):
        reward = final_reward if i == len(actions) - 1 else -1.0
        episode.append(JointPoint(rng.random(DIM), a), reward, 0.99)
    episode.close()
    return episode


@pytest.fixture
def pretrained():
    rng = np.random.default_rng(17)
    kernel = KernelSpec(belief_kernel="gaussian", noise_variance=NOISE)
    model = GPQModel(kernel, DIM, sparsify_threshold=0.0, gamma=0.99, actions=SOURCE_ACTIONS)
    episodes = [_episode(rng, ["offer", "repeat", "bye"]), _episode(rng, ["repeat", "offer", "bye"], -1.0)]
    for ep in episodes:
        model.update(ep)
    return model, episodes


@pytest.fixture
def transfer_spec():
    return PolicyTransferSpec(source_action_set=SOURCE_ACTIONS, target_action_set=TARGET_ACTIONS, belief_dim=DIM)


def test_spec_sets(transfer_spec):
    assert transfer_spec.shared_set == SOURCE_ACTIONS
    assert transfer_spec.new_actions == ["book"]


def test_identity_on_shared_actions(pretrained, transfer_spec):
    model, _ = pretrained
    adapted = adapt_policy(model, transfer_spec)
    query = np.full(DIM, 0.4)
    before = model.posterior(query, SOURCE_ACTIONS)
    after = adapted.posterior(query, SOURCE_ACTIONS)
    np.testing.assert_allclose(after[0], before[0], atol=1e-12)
    np.testing.assert_allclose(after[1], before[1], atol=1e-12)
    assert set(adapted.dictionary.origins) == {SOURCE}
    assert adapted.actions == TARGET_ACTIONS
    # 원본은 그대로
    assert model.kernel.action_kernel == "delta"


def test_new_action_starts_at_prior(pretrained, transfer_spec):
    model, _ = pretrained
    adapted = adapt_policy(model, transfer_spec)
    means, variances = adapted.posterior(np.full(DIM, 0.4), ["book"])
    assert means[0] == 0.0
    assert variances[0] == pytest.approx(1.0)


def test_matches_dense_gp_after_retraining(pretrained, transfer_spec):
    model, source_episodes = pretrained
    adapted = adapt_policy(model, transfer_spec)
    rng = np.random.default_rng(23)
    target_episodes = [_episode(rng, ["offer", "book", "bye"]), _episode(rng, ["book", "repeat"], -1.0)]
    for ep in target_episodes:
        adapted.update(ep)

    source_points = [JointPoint(s.point.belief, s.point.action, SOURCE) for ep in source_episodes for s in ep]
    target_points = [JointPoint(s.point.belief, s.point.action, TARGET) for ep in target_episodes for s in ep]
    data = PointSet.from_points(source_points + target_points, DIM)
    returns = np.concatenate([
        discounted_returns_to_go(ep.rewards(), ep.discounts()) for ep in source_episodes + target_episodes
    ])
    inv = np.linalg.inv(gram_matrix(adapted.kernel, data) + NOISE * np.eye(len(data)))

    query = np.full(DIM, 0.6)
    means, variances = adapted.posterior(query, TARGET_ACTIONS)
    for i, action in enumerate(TARGET_ACTIONS):
        kx = kernel_vector(adapted.kernel, data, JointPoint(query, action, TARGET))
        assert means[i] == pytest.approx(kx @ inv @ returns, rel=1e-6, abs=1e-8)
        assert variances[i] == pytest.approx(1.0 - kx @ inv @ kx, rel=1e-6, abs=1e-8)


def test_unshared_source_points_are_cut(transfer_spec):
    rng = np.random.default_rng(29)
    kernel = KernelSpec(belief_kernel="gaussian", noise_variance=NOISE)
    model = GPQModel(kernel, DIM, sparsify_threshold=0.0, actions=SOURCE_ACTIONS + ["help"])
    model.update(_episode(rng, ["help", "offer", "bye"]))
    spec = PolicyTransferSpec(source_action_set=SOURCE_ACTIONS + ["help"], target_action_set=TARGET_ACTIONS)

    adapted = adapt_policy(model, spec)
    assert np.allclose(adapted.gram[0, 1:], 0.0)
    query = np.full(DIM, 0.5)
    np.testing.assert_allclose(adapted.posterior(query, ["offer"])[0], model.posterior(query, ["offer"])[0])


def test_no_shared_action():
    spec = PolicyTransferSpec(source_action_set=["offer"], target_action_set=["book"])
    with pytest.raises(TransferError):
        restrict_action_kernel(spec)


def test_rejects_incompatible_models(pretrained):
    model, _ = pretrained
    with pytest.raises(TransferError):
        adapt_policy(model, PolicyTransferSpec(
            source_action_set=SOURCE_ACTIONS, target_action_set=TARGET_ACTIONS, belief_dim=DIM + 1,
        ))
    with pytest.raises(TransferError):
        adapt_policy(model, PolicyTransferSpec(source_action_set=["offer", "bye"], target_action_set=TARGET_ACTIONS))
