import numpy as np
import pytest

from qnnsim import mlp


def zeros_net(n_in=3, hidden=(4,), c=3, activation="sigmoid"):
    net = mlp.MlpNetwork.initialize(n_in, hidden, c, activation=activation)
    return mlp.MlpNetwork([np.zeros_like(w) for w in net.weights],
                          [np.zeros_like(b) for b in net.biases], activation)


def test_zero_network_is_uniform():
    np.testing.assert_allclose(mlp.mlp_forward(zeros_net(), [0.3, 0.1, 0.9]), [1 / 3] * 3)


@pytest.mark.parametrize("activation", mlp.ACTIVATIONS)
def test_softmax_simplex_and_shift_invariance(activation):
    net = mlp.MlpNetwork.initialize(4, (10, 6), 3, seed=2, scale=3.0, activation=activation)
    x = np.random.default_rng(0).uniform(0, 1, (20, 4))
    p = mlp.mlp_forward(net, x)
    assert np.all((p > 0) & (p < 1))
    np.testing.assert_allclose(p.sum(axis=1), 1.0, atol=1e-12)
    shifted = net.copy()
    shifted.biases[-1] = shifted.biases[-1] + 7.5
    np.testing.assert_allclose(mlp.mlp_forward(shifted, x), p, atol=1e-12)


def test_sigmoid_is_overflow_free():
    net = mlp.MlpNetwork([np.full((1, 2), 1e4), np.ones((2, 2))], [np.zeros(2), np.zeros(2)])
    with np.errstate(all="raise"):
        p = mlp.mlp_forward(net, [[-1.0], [1.0]])
    assert np.all(np.isfinite(p))


def test_forward_shape_mismatch():
    with pytest.raises(ValueError):
        mlp.mlp_forward(zeros_net(), [0.1, 0.2])


def test_network_validation():
    with pytest.raises(ValueError):
        mlp.MlpNetwork([np.zeros((2, 3))], [np.zeros(2)])
    with pytest.raises(ValueError):
        mlp.MlpNetwork([np.zeros((2, 3)), np.zeros((4, 2))], [np.zeros(3), np.zeros(2)])
    with pytest.raises(ValueError):
        mlp.MlpNetwork([np.zeros((2, 3))], [np.zeros(3)], activation="relu")


def test_initialize_range_and_determinism():
    a = mlp.MlpNetwork.initialize(8, (10, 6), 2, seed=3)
    b = mlp.MlpNetwork.initialize(8, (10, 6), 2, seed=3)
    assert [w.shape for w in a.weights] == [(8, 10), (10, 6), (6, 2)]
    assert all(np.array_equal(x, y) for x, y in zip(a.params(), b.params()))
    assert all(np.all(np.abs(p) <= 0.5) for p in a.params())


def test_lr_zero_keeps_weights():
    net = mlp.MlpNetwork.initialize(2, (3,), 2, seed=0)
    x = np.array([[0.0, 1.0], [1.0, 0.0]])
    trained, records = mlp.mlp_train(net, x, [0, 1], lr=0.0, epochs=3, test=(x, [0, 1]))
    assert all(np.array_equal(a, b) for a, b in zip(net.params(), trained.params()))
    assert len(records) == 6


def test_separable_toy_reaches_full_accuracy():
    rng = np.random.default_rng(7)
    x = np.vstack([rng.uniform(0.0, 0.4, (5, 2)), rng.uniform(0.6, 1.0, (5, 2))])
    y = np.array([0] * 5 + [1] * 5)
    net = mlp.MlpNetwork.initialize(2, (10, 6), 2, seed=1)
    _, records = mlp.mlp_train(net, x, y, lr=1.0, epochs=2000)
    assert records[-1].accuracy == 1.0


def test_gd_decreases_loss_and_adam_fits():
    rng = np.random.default_rng(0)
    x = rng.uniform(0, 1, (30, 3))
    y = (x.sum(axis=1) > 1.5).astype(int)
    net = mlp.MlpNetwork.initialize(3, (5,), 2, seed=0)
    _, gd = mlp.mlp_train(net, x, y, lr=0.1, epochs=50)
    assert gd[-1].loss < gd[0].loss
    _, adam = mlp.mlp_train(net, x, y, lr=0.05, epochs=500, optimizer="adam")
    assert adam[-1].accuracy >= 0.9


@pytest.mark.parametrize("kw", [{"epochs": 0}, {"lr": -1.0}, {"optimizer": "sgd"}])
def test_train_rejects(kw):
    args = {"lr": 0.1, "epochs": 1, **kw}
    with pytest.raises(ValueError):
        mlp.mlp_train(zeros_net(2), np.zeros((2, 2)), [0, 1], **args)


def test_gradient_check_random_and_deterministic():
    net = mlp.MlpNetwork.initialize(4, (10, 6), 3, seed=9)
    e1 = mlp.mlp_gradient_check(net, [0.1, 0.5, 0.9, 0.3], 2)
    e2 = mlp.mlp_gradient_check(net, [0.1, 0.5, 0.9, 0.3], 2)
    assert e1 <= 1e-5 and e1 == e2


def test_gradient_check_symmetric_zero_point():
    # mirrored labels on a zero network: every gradient entry cancels
    net = zeros_net(2, (3,), 2)
    x = np.array([[0.2, 0.7], [0.2, 0.7]])
    labels = np.array([0, 1])
    _, analytic = mlp.loss_and_grad(net, x, labels)
    assert max(np.abs(g).max() for g in analytic) <= 1e-8
    from qnnsim.gradcheck import central_difference

    numeric = central_difference(
        lambda p: mlp.loss_and_grad(mlp._with_params(net, p), x, labels)[0], net.params())
    assert max(np.abs(g).max() for g in numeric) <= 1e-8
    assert mlp.mlp_gradient_check(net, x, labels) <= 1e-8


def test_evaluate_uses_argmax():
    net = mlp.MlpNetwork([np.array([[5.0, -5.0]])], [np.zeros(2)])
    loss, acc = mlp.evaluate(net, np.array([[1.0], [-1.0], [1.0]]), [0, 1, 1])
    assert acc == pytest.approx(2 / 3)
    assert loss > 0
