import numpy as np
import pytest
from scipy.linalg import block_diag

from hrl_dialog.core.errors import EpisodeError, KernelError, NumericalError
from hrl_dialog.gp.kernel import JointPoint, KernelSpec, PointSet, gram_matrix, kernel_self, kernel_vector
from hrl_dialog.gp.model import (
    EpisodeTransitions,
    GPQModel,
    discounted_returns_to_go,
    q_posterior,
    sample_action,
)

GAMMA = 0.9
NOISE = 0.5


def _episode(beliefs, actions, rewards, gamma=GAMMA):
    episode = EpisodeTransitions()
    for b, a, r in zip(beliefs, actions, rewards):
        episode.append(JointPoint(b, a), r, gamma)
    episode.close()
    return episode


def _gaussian_model(dim=4, **kwargs):
    kernel = KernelSpec(belief_kernel="gaussian", gaussian_width=1.0, noise_variance=NOISE)
    params = dict(sparsify_threshold=0.0, gamma=GAMMA)
    params.update(kwargs)
    return GPQModel(kernel, belief_dim=dim, **params)


def _dense_posterior(kernel, episodes, belief, actions):
    """
    모든 포인트를 쓰는 GP 사후분포

    r = H Q + N,  N ~ N(0, σ² H Hᵀ),  H 는 에피소드별 (대각 1, 윗대각 -γ_t) 블록
    mean = k_xᵀ Hᵀ (H K Hᵀ + Σ)⁻¹ r,  var = k(x,x) - k_xᵀ Hᵀ (H K Hᵀ + Σ)⁻¹ H k_x
    """
    blocks = []
    for ep in episodes:
        n = len(ep)
        h = np.eye(n)
        for t, step in enumerate(ep.steps[:-1]):
            h[t, t + 1] = -step.discount_to_next
        blocks.append(h)
    h = block_diag(*blocks)
    rewards = np.concatenate([ep.rewards() for ep in episodes])
    points = [s.point for ep in episodes for s in ep]
    data = PointSet.from_points(points, len(belief))

    gram = gram_matrix(kernel, data)
    noise = kernel.noise_variance * h @ h.T
    inv = np.linalg.inv(h @ gram @ h.T + noise)
    means, variances = [], []
    for a in actions:
        x = JointPoint(belief, a)
        hk = h @ kernel_vector(kernel, data, x)
        means.append(hk @ inv @ rewards)
        variances.append(kernel_self(kernel, x) - hk @ inv @ hk)
    return np.array(means), np.array(variances)


def test_returns_to_go_example():
    y = discounted_returns_to_go(np.array([-1.0, -1.0, 19.0]), np.array([0.9, 0.9, 0.9]))
    np.testing.assert_allclose(y, [13.49, 16.1, 19.0])


def test_matches_dense_gp():
    rng = np.random.default_rng(11)
    model = _gaussian_model()
    episodes = [
        _episode(rng.random((3, 4)), ["a", "b", "a"], [-1.0, -1.0, 19.0]),
        _episode(rng.random((2, 4)), ["b", "a"], [-1.0, -1.0]),
    ]
    for ep in episodes:
        model.update(ep)
    assert model.size == 5

    query = rng.random(4)
    means, variances = model.posterior(query, ["a", "b"])
    dense_means, dense_vars = _dense_posterior(model.kernel, episodes, query, ["a", "b"])
    np.testing.assert_allclose(means, dense_means, rtol=1e-6, atol=1e-8)
    np.testing.assert_allclose(variances, dense_vars, rtol=1e-6, atol=1e-8)


def test_empty_model_is_prior():
    model = _gaussian_model()
    posts = q_posterior(model, np.zeros(4), ["a", "b"])
    assert [(p.mean, p.variance) for p in posts] == [(0.0, 1.0), (0.0, 1.0)]


def test_variance_contracts_at_visited_points():
    rng = np.random.default_rng(5)
    model = _gaussian_model()
    beliefs = rng.random((4, 4))
    model.update(_episode(beliefs, ["a"] * 4, [-1.0] * 4))
    _, variances = model.posterior(beliefs[0], ["a", "b"])
    assert variances[0] < 1.0
    assert variances[1] == pytest.approx(1.0)


def test_repeated_point_admitted_once():
    model = _gaussian_model(sparsify_threshold=0.01)
    b = np.array([0.2, 0.4, 0.1, 0.0])
    model.update(_episode([b, b, b], ["a", "a", "a"], [-1.0, -1.0, 5.0]))
    assert model.size == 1
    assert model.stat_s[0, 0] == pytest.approx(3.0 / NOISE)


def test_linear_kernel_dictionary_bounded_by_rank():
    kernel = KernelSpec(belief_kernel="linear", noise_variance=NOISE)
    model = GPQModel(kernel, belief_dim=3, sparsify_threshold=0.0)
    eye = np.eye(3)
    beliefs = [eye[0], eye[1], eye[0] + eye[1], eye[2], eye[0] - eye[2]]
    model.update(_episode(beliefs, ["a"] * 5, [-1.0] * 5))
    assert model.size == 3


def test_dictionary_cap():
    rng = np.random.default_rng(2)
    model = _gaussian_model(dictionary_cap=3)
    model.update(_episode(rng.random((6, 4)), ["a"] * 6, [-1.0] * 6))
    assert model.size == 3


def test_greedy_ignores_rng():
    rng = np.random.default_rng(8)
    model = _gaussian_model()
    model.update(_episode(rng.random((3, 4)), ["a", "b", "c"], [-1.0, 3.0, 2.0]))
    query = rng.random(4)
    means, _ = model.posterior(query, ["a", "b", "c"])
    expected = ["a", "b", "c"][int(np.argmax(means))]
    picks = {sample_action(model, query, ["a", "b", "c"], 0.0, np.random.default_rng(s)) for s in range(20)}
    assert picks == {expected}


def test_greedy_tie_breaks_to_first():
    model = _gaussian_model()
    assert sample_action(model, np.zeros(4), ["c", "a", "b"], 0.0, np.random.default_rng(0)) == "c"


def test_single_action_draws_nothing():
    model = _gaussian_model()
    rng = np.random.default_rng(4)
    before = rng.bit_generator.state
    assert sample_action(model, np.zeros(4), ["only"], 2.0, rng) == "only"
    assert rng.bit_generator.state == before


def test_sampling_explores_under_prior():
    model = _gaussian_model()
    rng = np.random.default_rng(9)
    picks = [sample_action(model, np.zeros(4), ["a", "b"], 1.0, rng) for _ in range(10_000)]
    assert abs(picks.count("a") / len(picks) - 0.5) < 0.02


def test_sample_action_argument_checks():
    model = _gaussian_model()
    with pytest.raises(ValueError):
        sample_action(model, np.zeros(4), [], 1.0, np.random.default_rng(0))
    with pytest.raises(ValueError):
        sample_action(model, np.zeros(4), ["a", "b"], -1.0, np.random.default_rng(0))


def test_broken_covariance_raises():
    rng = np.random.default_rng(6)
    model = _gaussian_model()
    beliefs = rng.random((2, 4))
    model.update(_episode(beliefs, ["a", "a"], [-1.0, 1.0]))
    model.cov_factor = model.cov_factor + 50.0 * np.eye(model.size)
    with pytest.raises(NumericalError):
        model.posterior(beliefs[0], ["a"])


def test_rejects_bad_episodes():
    model = _gaussian_model()
    with pytest.raises(EpisodeError):
        model.update(EpisodeTransitions())

    open_episode = EpisodeTransitions()
    open_episode.append(JointPoint(np.zeros(4), "a"), -1.0, GAMMA)
    with pytest.raises(EpisodeError):
        model.update(open_episode)

    with pytest.raises(EpisodeError):
        model.update(_episode([np.zeros(4)], ["a"], [float("nan")]))

    with pytest.raises(EpisodeError):
        model.update(_episode([np.zeros(4), np.ones(4)], ["a", "a"], [-1.0, -1.0], gamma=0.0))
    assert model.size == 0


def test_dimension_mismatch():
    model = _gaussian_model()
    with pytest.raises(KernelError):
        model.posterior(np.zeros(3), ["a"])


def test_copy_is_independent():
    rng = np.random.default_rng(1)
    model = _gaussian_model()
    snapshot = model.copy()
    model.update(_episode(rng.random((2, 4)), ["a", "b"], [-1.0, 2.0]))
    assert snapshot.size == 0
    assert model.size == 2


def test_single_terminal_transition_closed_form():
    kernel = KernelSpec(belief_kernel="linear", noise_variance=NOISE)
    model = GPQModel(kernel, belief_dim=3, sparsify_threshold=0.0)
    x = np.array([1.0, 2.0, 0.0])
    model.update(_episode([x], ["a"], [12.0]))
    k = float(x @ x)
    mean, variance = q_posterior(model, x, ["a"])[0]
    assert mean == pytest.approx(k / (k + NOISE) * 12.0)
    assert variance == pytest.approx(k - k * k / (k + NOISE))


def test_orthogonal_candidate_admitted_with_full_residual():
    kernel = KernelSpec(belief_kernel="linear", noise_variance=NOISE)
    model = GPQModel(kernel, belief_dim=3, sparsify_threshold=0.001)
    e1, e2 = np.eye(3)[0], 2.0 * np.eye(3)[1]
    model.update(_episode([e1], ["a"], [1.0]))
    admission = model.admit(JointPoint(e2, "a"))
    assert admission.admit
    assert admission.residual == pytest.approx(4.0)
    assert not model.admit(JointPoint(e1, "a")).admit


@pytest.mark.parametrize("seed", range(20))
def test_random_episodes_match_dense_gp(seed):
    rng = np.random.default_rng(seed)
    model = _gaussian_model()
    episodes = []
    for _ in range(int(rng.integers(1, 4))):
        n = int(rng.integers(1, 7))
        ep = _episode(rng.random((n, 4)), list(rng.choice(["a", "b", "c"], size=n)), rng.normal(size=n))
        episodes.append(ep)
        model.update(ep)

    for query in [rng.random(4), episodes[0].steps[0].point.belief]:
        means, variances = model.posterior(query, ["a", "b", "c"])
        dense_means, dense_vars = _dense_posterior(model.kernel, episodes, query, ["a", "b", "c"])
        assert np.max(np.abs(means - dense_means)) < 1e-8
        assert np.max(np.abs(variances - dense_vars)) < 1e-8


def test_variance_decreases_with_repeats():
    kernel = KernelSpec(belief_kernel="linear", noise_variance=NOISE)
    model = GPQModel(kernel, belief_dim=2, sparsify_threshold=0.0)
    x = np.array([1.0, 1.0])
    previous = model.posterior(x, ["a"])[1][0]
    for _ in range(5):
        model.update(_episode([x], ["a"], [3.0]))
        current = model.posterior(x, ["a"])[1][0]
        assert current < previous
        previous = current


def test_reward_scaling_scales_means():
    rng = np.random.default_rng(12)
    beliefs = rng.random((4, 4))
    actions = ["a", "b", "c", "a"]
    rewards = np.array([-1.0, 2.0, -3.0, 5.0])
    base, scaled = _gaussian_model(), _gaussian_model()
    base.update(_episode(beliefs, actions, rewards))
    scaled.update(_episode(beliefs, actions, 3.0 * rewards))

    query = rng.random(4)
    np.testing.assert_allclose(scaled.posterior(query, actions[:3])[0], 3.0 * base.posterior(query, actions[:3])[0])
    greedy = [sample_action(m, query, ["a", "b", "c"], 0.0, rng) for m in (base, scaled)]
    assert greedy[0] == greedy[1]


@pytest.mark.parametrize("seed", range(20))
def test_sparsification_close_to_full_dictionary(seed):
    rng = np.random.default_rng(seed)
    sparse, full = _gaussian_model(sparsify_threshold=0.001), _gaussian_model(sparsify_threshold=0.0)
    for _ in range(int(rng.integers(1, 4))):
        n = int(rng.integers(1, 7))
        ep = _episode(rng.random((n, 4)), list(rng.choice(["a", "b", "c"], size=n)), rng.normal(size=n))
        sparse.update(ep)
        full.update(ep)
    assert sparse.size <= full.size

    sparse_means, full_means = [], []
    for point in sparse.dictionary_points():
        sparse_means.append(sparse.posterior(point.belief, [point.action])[0][0])
        full_means.append(full.posterior(point.belief, [point.action])[0][0])
    sparse_means, full_means = np.array(sparse_means), np.array(full_means)
    scale = max(np.max(np.abs(full_means)), 1e-12)
    assert np.max(np.abs(sparse_means - full_means)) / scale < 0.05


def test_failed_solve_leaves_model_unchanged(monkeypatch):
    rng = np.random.default_rng(13)
    model = _gaussian_model()
    model.update(_episode(rng.random((3, 4)), ["a", "b", "a"], [-1.0, -1.0, 5.0]))
    before = model.copy()

    def singular(*args, **kwargs):
        raise np.linalg.LinAlgError("Singular matrix")

    monkeypatch.setattr(np.linalg, "solve", singular)
    with pytest.raises(NumericalError):
        model.update(_episode(rng.random((2, 4)), ["c", "a"], [-1.0, 2.0]))
    monkeypatch.undo()

    assert model.size == before.size
    assert model.n_episodes == before.n_episodes
    np.testing.assert_array_equal(model.dictionary.beliefs, before.dictionary.beliefs)
    for name in ["gram", "gram_inv", "stat_s", "stat_b", "alpha", "cov_factor"]:
        np.testing.assert_array_equal(getattr(model, name), getattr(before, name))

    query = rng.random(4)
    np.testing.assert_array_equal(model.posterior(query, ["a", "b"])[0], before.posterior(query, ["a", "b"])[0])
