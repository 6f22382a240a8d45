import numpy as np
import pytest

from crossvote.errors import DimensionError
from crossvote.neural.mlp import Mlp, MlpGrads, forward, forward_batch, gradients, loss, optimizer_step


def hand_net():
    return Mlp(
        weights=[np.array([[1.0, -1.0], [0.5, 2.0]]), np.array([[1.0, 1.0], [-1.0, 0.5]])],
        biases=[np.array([0.0, -1.0]), np.array([0.5, 0.0])],
    )


def batch_for(net, rng, n=7):
    obs = rng.normal(size=(n, net.input_dim))
    actions = rng.integers(0, net.output_dim, size=n)
    targets = rng.normal(size=n)
    return obs, actions, targets


def test_forward_examples():
    assert np.array_equal(forward(Mlp.zeros((6, 64, 64, 2)), np.ones(6)), [0.0, 0.0])
    identity = Mlp([np.eye(2)], [np.zeros(2)])
    assert np.array_equal(forward(identity, np.array([3.0, -4.0])), [3.0, -4.0])
    # hidden = relu([-1, 3.5]) = [0, 3.5]
    assert np.allclose(forward(hand_net(), np.array([1.0, 2.0])), [4.0, 1.75])


def test_forward_batch_matches_rows():
    rng = np.random.default_rng(0)
    net = Mlp.initialize((6, 16, 16, 2), rng)
    obs = rng.uniform(size=(5, 6))
    out = forward_batch(net, obs)
    assert out.shape == (5, 2)
    for i in range(5):
        assert np.allclose(out[i], forward(net, obs[i]), rtol=1e-12, atol=1e-14)


def test_dimension_errors():
    net = Mlp.zeros((6, 4, 2))
    with pytest.raises(DimensionError):
        forward(net, np.ones(5))
    with pytest.raises(DimensionError):
        Mlp([np.zeros((4, 6)), np.zeros((2, 5))], [np.zeros(4), np.zeros(2)])
    with pytest.raises(DimensionError):
        Mlp.initialize((6,), np.random.default_rng(0))
    with pytest.raises(DimensionError):
        loss(net, (np.ones((2, 6)), np.array([0, 2]), np.zeros(2)))
    with pytest.raises(DimensionError):
        optimizer_step(net, MlpGrads([np.zeros((4, 6))], [np.zeros(4)]), 0.1)


def test_initialization_is_seeded_and_bounded():
    a = Mlp.initialize((6, 64, 64, 2), np.random.default_rng(5))
    b = Mlp.initialize((6, 64, 64, 2), np.random.default_rng(5))
    assert np.array_equal(a.flat_parameters(), b.flat_parameters())
    assert a.layer_dims == (6, 64, 64, 2)
    assert np.abs(a.weights[0]).max() <= np.sqrt(6.0 / 70.0)
    assert all(np.array_equal(bias, np.zeros_like(bias)) for bias in a.biases)


@pytest.mark.parametrize("dims", [(6, 2), (6, 8, 2), (6, 16, 16, 2)])
def test_gradients_match_central_differences(dims):
    rng = np.random.default_rng(sum(dims))
    net = Mlp.initialize(dims, rng)
    for b in net.biases:
        b += rng.normal(scale=0.1, size=b.shape)
    batch = batch_for(net, rng)
    grads = gradients(net, batch)
    eps = 1e-6
    for param, grad in zip(net.weights + net.biases, grads.weights + grads.biases):
        flat, gflat = param.reshape(-1), grad.reshape(-1)
        for i in range(0, flat.size, max(1, flat.size // 25)):
            saved = flat[i]
            flat[i] = saved + eps
            up = loss(net, batch)
            flat[i] = saved - eps
            down = loss(net, batch)
            flat[i] = saved
            numeric = (up - down) / (2 * eps)
            assert gflat[i] == pytest.approx(numeric, rel=1e-4, abs=1e-7)


def test_zero_gradient_at_targets():
    rng = np.random.default_rng(3)
    net = Mlp.initialize((6, 8, 2), rng)
    obs = rng.normal(size=(4, 6))
    actions = np.array([0, 1, 1, 0])
    targets = forward_batch(net, obs)[np.arange(4), actions]
    grads = gradients(net, (obs, actions, targets))
    assert loss(net, (obs, actions, targets)) == 0.0
    assert grads.global_norm() == 0.0


def test_doubling_the_residual_doubles_the_gradient():
    rng = np.random.default_rng(4)
    net = Mlp.initialize((6, 8, 2), rng)
    obs = rng.normal(size=(4, 6))
    actions = np.array([1, 0, 1, 1])
    q = forward_batch(net, obs)[np.arange(4), actions]
    g1 = gradients(net, (obs, actions, q - 1.0))
    g2 = gradients(net, (obs, actions, q - 2.0))
    for a, b in zip(g1.weights + g1.biases, g2.weights + g2.biases):
        assert np.allclose(b, 2.0 * a, rtol=1e-9, atol=1e-12)


def test_tuple_list_batch_equals_array_batch():
    rng = np.random.default_rng(6)
    net = Mlp.initialize((6, 8, 2), rng)
    obs, actions, targets = batch_for(net, rng, n=3)
    as_list = [(obs[i], int(actions[i]), float(targets[i])) for i in range(3)]
    assert loss(net, as_list) == loss(net, (obs, actions, targets))


def test_optimizer_step():
    net = Mlp([np.ones((2, 2))], [np.zeros(2)])
    before = net.copy()
    optimizer_step(net, MlpGrads([np.zeros((2, 2))], [np.zeros(2)]), 0.5)
    assert np.array_equal(net.flat_parameters(), before.flat_parameters())
    optimizer_step(net, MlpGrads([np.ones((2, 2))], [np.full(2, 2.0)]), 0.5)
    assert np.array_equal(net.weights[0], np.full((2, 2), 0.5))
    assert np.array_equal(net.biases[0], [-1.0, -1.0])


def test_step_reduces_loss():
    rng = np.random.default_rng(9)
    net = Mlp.initialize((6, 16, 2), rng)
    batch = batch_for(net, rng, n=16)
    before = loss(net, batch)
    optimizer_step(net, gradients(net, batch), 1e-3)
    assert loss(net, batch) < before


def test_gradient_clipping():
    g = MlpGrads([np.array([[3.0, 0.0]])], [np.array([4.0])])
    assert g.global_norm() == 5.0
    clipped = g.clipped(1.0)
    assert clipped.global_norm() == pytest.approx(1.0)
    assert np.allclose(clipped.weights[0], [[0.6, 0.0]])
    assert g.clipped(10.0) is g
