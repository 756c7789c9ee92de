import math
import random

import numpy as np
import pytest

from dialogsim import DialogueEnv
from dialogsim.agents import Agent, AgentResponse
from dialogsim.core import DialogAct, DialogueStatus, derive_rng
from dialogsim.corpus import GoalDatabase
from dialogsim.kb import MovieKB
from dialogsim.core import UserGoal
from dialogsim.rl import (
    BACKEND,
    DQNAgent,
    Experience,
    QNetwork,
    ReplayBuffer,
    Trainer,
    TrainerConfig,
    compute_upper_bound,
    evaluate,
)
from dialogsim.rl.qnet import QNetError
from dialogsim.rl.replay import batch_arrays
from dialogsim.rl.trainer import TrainerError


def small_config(**overrides):
    base = dict(
        gamma=0.9, epsilon=0.1, batch_size=8, num_batches=2,
        simulation_epoch_size=4, epochs=5, buffer_capacity=400,
        learning_rate=0.02, hidden_width=16, eval_episodes=5,
    )
    base.update(overrides)
    return TrainerConfig(**base)


# ----- q-network -------------------------------------------------------------


def test_zero_parameters_give_zero_outputs():
    net = QNetwork(4, 3, 2, seed=0)
    net.W1[:] = 0; net.b1[:] = 0; net.W2[:] = 0; net.b2[:] = 0
    out = net.forward(np.ones((5, 4)))
    assert np.all(out == 0.0)


def test_hand_computed_forward():
    net = QNetwork(2, 2, 2, seed=0)
    net.W1 = np.array([[1.0, 0.0], [0.0, -1.0]])
    net.b1 = np.array([0.5, 0.25])
    net.W2 = np.array([[1.0, 2.0], [3.0, -1.0]])
    net.b2 = np.array([0.1, -0.2])
    x = np.array([0.3, 0.7])
    h1 = math.tanh(0.3 + 0.5)
    h2 = math.tanh(-0.7 + 0.25)
    expected = [h1 + 3 * h2 + 0.1, 2 * h1 - h2 - 0.2]
    got = net.predict(x)
    assert np.allclose(got, expected, atol=1e-12)


def test_batched_forward_equals_per_sample():
    net = QNetwork(6, 8, 4, seed=3)
    rng = np.random.default_rng(1)
    X = rng.normal(size=(10, 6))
    batched = net.forward(X)
    rows = np.stack([net.predict(X[i]) for i in range(10)])
    assert np.allclose(batched, rows, atol=1e-12)


def test_done_transition_target_is_reward_exactly():
    net = QNetwork(3, 4, 2, seed=1)
    net.W1[:] = 0; net.b1[:] = 0; net.W2[:] = 0; net.b2[:] = 0
    target = net.clone()
    target.b2 = np.array([5.0, 2.0])  # would leak into targets if done ignored
    s = np.zeros((1, 3))
    loss = net.train_batch(
        s, np.array([0]), np.array([1.5]), s, np.array([1.0]),
        target_net=target, gamma=0.9, lr=0.0,
    )
    # Q(s, a) = 0, y = r = 1.5, loss = 2.25 regardless of the target net.
    assert abs(loss - 2.25) < 1e-12


def test_bellman_target_arithmetic():
    net = QNetwork(2, 4, 2, seed=1)
    net.W1[:] = 0; net.b1[:] = 0; net.W2[:] = 0; net.b2[:] = 0
    target = net.clone()
    target.b2 = np.array([2.0, 1.0])  # max target-Q = 2
    s = np.zeros((1, 2))
    loss = net.train_batch(
        s, np.array([0]), np.array([1.0]), s, np.array([0.0]),
        target_net=target, gamma=0.9, lr=0.0,
    )
    # y = 1 + 0.9 * 2 = 2.8; Q = 0; loss = 7.84
    assert abs(loss - 2.8 ** 2) < 1e-12


def finite_difference_grads(net, states, actions, targets, h=1e-5):
    grads = []
    for param in (net.W1, net.b1, net.W2, net.b2):
        grad = np.zeros_like(param)
        flat = param.reshape(-1)
        gflat = grad.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            plus = net.loss_and_grads(states, actions, targets)[0]
            flat[i] = orig - h
            minus = net.loss_and_grads(states, actions, targets)[0]
            flat[i] = orig
            gflat[i] = (plus - minus) / (2 * h)
        grads.append(grad)
    return grads


def test_gradients_match_finite_differences():
    rng = np.random.default_rng(0)
    for trial in range(5):
        net = QNetwork(4, 5, 3, seed=trial)
        states = rng.normal(size=(6, 4))
        actions = rng.integers(0, 3, size=6)
        targets = rng.normal(size=6)
        _, *analytic = net.loss_and_grads(states, actions, targets)
        numeric = finite_difference_grads(net, states, actions, targets)
        for a, n in zip(analytic, numeric):
            denom = np.maximum(np.maximum(np.abs(a), np.abs(n)), 1e-6)
            assert np.max(np.abs(a - n) / denom) < 1e-4


def test_gradient_clipping_bounds_step():
    net = QNetwork(3, 4, 2, seed=2)
    before = [p.copy() for p in (net.W1, net.b1, net.W2, net.b2)]
    target = net.clone()
    states = np.ones((4, 3)) * 3.0
    net.train_batch(states, np.zeros(4, dtype=int), np.full(4, 100.0), states,
                    np.ones(4), target_net=target, gamma=0.9, lr=1.0, clip=1.0)
    moved = math.sqrt(sum(
        float(np.sum((p - q) ** 2))
        for p, q in zip((net.W1, net.b1, net.W2, net.b2), before)
    ))
    assert moved <= 1.0 + 1e-9


def test_nan_loss_aborts():
    net = QNetwork(2, 3, 2, seed=0)
    target = net.clone()
    s = np.zeros((1, 2))
    with pytest.raises(QNetError):
        net.train_batch(s, np.array([0]), np.array([np.nan]), s, np.array([1.0]),
                        target_net=target, gamma=0.9, lr=0.01)


def test_dimension_mismatch_rejected():
    net = QNetwork(4, 3, 2, seed=0)
    with pytest.raises(QNetError):
        net.forward(np.zeros((2, 5)))


def test_save_load_bit_identical(tmp_path):
    net = QNetwork(7, 5, 3, seed=9)
    x = np.random.default_rng(2).normal(size=(4, 7))
    path = tmp_path / "net.json"
    net.save(path, layout={"length": 7}, config={"lr": 0.01})
    loaded, meta = QNetwork.load(path)
    assert meta["layout"] == {"length": 7}
    assert np.array_equal(net.forward(x), loaded.forward(x))


def test_bellman_fixed_point_two_state_mdp():
    """Full-batch updates converge to the analytic Q* of a tiny MDP.

    s0 --a0--> s0 (r 0); s0 --a1--> s1 (r 1);
    s1 --a0--> terminal (r 2); s1 --a1--> s0 (r 0); gamma 0.9.
    Solving the Bellman equations: V0 = 1/0.19, Q* as below.
    """
    gamma = 0.9
    v0 = 1.0 / (1.0 - 0.81)
    q_star = {
        (0, 0): gamma * v0,
        (0, 1): 1.0 + gamma * 0.9 * v0,
        (1, 0): 2.0,
        (1, 1): gamma * v0,
    }
    s0, s1 = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    states = np.stack([s0, s0, s1, s1])
    actions = np.array([0, 1, 0, 1])
    rewards = np.array([0.0, 1.0, 2.0, 0.0])
    next_states = np.stack([s0, s1, s0, s0])
    dones = np.array([0.0, 0.0, 1.0, 0.0])

    net = QNetwork(2, 32, 2, seed=0)
    target = net.clone()
    for sweep in range(6000):
        net.train_batch(states, actions, rewards, next_states, dones,
                        target_net=target, gamma=gamma,
                        lr=0.05 if sweep < 4000 else 0.01, clip=1.0)
        if sweep % 10 == 9:
            target.copy_from(net)
    q = net.forward(np.stack([s0, s1]))
    for (s, a), value in q_star.items():
        assert abs(q[s, a] - value) < 1e-3, (s, a, q[s, a], value)


def test_frozen_batch_loss_non_increasing():
    rng = np.random.default_rng(5)
    net = QNetwork(6, 12, 4, seed=5)
    target = net.clone()
    states = rng.normal(size=(32, 6))
    actions = rng.integers(0, 4, size=32)
    rewards = rng.normal(size=32)
    next_states = rng.normal(size=(32, 6))
    dones = (rng.random(32) < 0.3).astype(float)
    losses = [
        net.train_batch(states, actions, rewards, next_states, dones,
                        target_net=target, gamma=0.9, lr=1e-3)
        for _ in range(100)
    ]
    assert all(b <= a + 1e-9 for a, b in zip(losses, losses[1:]))


# ----- replay buffer ---------------------------------------------------------


def exp(i, dim=3):
    v = np.full(dim, float(i))
    return Experience(v, i % 2, float(i), v + 1, False)


def test_buffer_capacity_bound_and_flush():
    buf = ReplayBuffer(10)
    for i in range(25):
        buf.append(exp(i))
        assert len(buf) <= 10
    assert len(buf) == 10
    assert buf.full
    buf.flush()
    assert len(buf) == 0


def test_sample_with_replacement():
    buf = ReplayBuffer(4)
    for i in range(3):
        buf.append(exp(i))
    batch = buf.sample(50, random.Random(0))
    assert len(batch) == 50
    assert {e.a for e in batch} <= {0, 1}


def test_batch_arrays_shapes():
    batch = [exp(i) for i in range(6)]
    s, a, r, s2, d = batch_arrays(batch)
    assert s.shape == (6, 3) and s2.shape == (6, 3)
    assert a.dtype == np.int64 and r.shape == (6,) and d.shape == (6,)


# ----- policy ----------------------------------------------------------------


def test_epsilon_one_uniform(tiny_schema):
    agent = DQNAgent(tiny_schema, small_config(epsilon=1.0), seed=0)
    rng = random.Random(0)
    vec = np.zeros(agent.input_dim)
    counts = np.zeros(agent.num_actions)
    trials = 10_000
    for _ in range(trials):
        counts[agent.run_policy(vec, rng)] += 1
    assert np.all(np.abs(counts / trials - 1 / agent.num_actions) <= 0.02)


def test_epsilon_zero_greedy_argmax(tiny_schema):
    agent = DQNAgent(tiny_schema, small_config(epsilon=0.0, warm_start="off"), seed=0)
    rng = random.Random(1)
    vec = np.random.default_rng(3).random(agent.input_dim)
    expected = int(np.argmax(agent.qnet.predict(vec)))
    assert all(agent.run_policy(vec, rng) == expected for _ in range(20))


def test_warm_start_delegates_to_rule_walk(tiny_schema):
    agent = DQNAgent(tiny_schema, small_config(epsilon=0.0), seed=0)
    agent.initialize_episode()
    vec = np.zeros(agent.input_dim)
    rng = random.Random(2)
    space = agent.action_space
    walk = [agent.run_policy(vec, rng) for _ in range(7)]
    expected = [("request", s) for s in ["moviename", "starttime", "city", "date", "theater"]]
    expected += [("taskcomplete", None), ("thanks", None)]
    assert [space[i] for i in walk] == expected
    # Once the pool fills, the same call switches to the network.
    for i in range(agent.buffer.capacity):
        agent.buffer.append(exp(i, dim=agent.input_dim))
    agent.run_policy(vec, rng)
    assert agent.warm_start == 2


# ----- trainer ---------------------------------------------------------------


@pytest.fixture()
def tiny_env(tiny_schema, tiny_kb, tiny_goal_db):
    return DialogueEnv(tiny_schema, tiny_kb, tiny_goal_db)


def test_flush_policy_trace(tiny_env, tiny_schema):
    """Scripted success-rate sequence reproduces the hand-derived flush epochs:
    rates [0.1, 0.2, 0.35, 0.33, 0.4] with threshold 0.30 flush after epochs
    3 and 5."""
    from dialogsim.rl.trainer import EvalMetrics

    cfg = small_config(success_rate_threshold=0.30)
    agent = DQNAgent(tiny_schema, cfg, seed=0)
    trainer = Trainer(tiny_env, agent, cfg, seed=0)
    rates = iter([0.1, 0.2, 0.35, 0.33, 0.4])
    trainer.evaluate_policy = lambda: EvalMetrics(next(rates), 0.0, 0.0)
    trainer.warm_start_fill()
    flushed = [trainer.run_training_epoch().flushed for _ in range(5)]
    assert flushed == [False, False, True, False, True]
    assert trainer.best_rate == 0.4


def test_target_updates_only_between_epochs(tiny_env, tiny_schema):
    cfg = small_config()
    agent = DQNAgent(tiny_schema, cfg, seed=0)
    trainer = Trainer(tiny_env, agent, cfg, seed=0)
    trainer.warm_start_fill()
    checksum = agent.target.params_checksum()
    agent.train(random.Random(0))  # the in-epoch training pass
    assert agent.target.params_checksum() == checksum
    assert agent.qnet.params_checksum() != checksum
    agent.update_target()
    assert agent.target.params_checksum() == agent.qnet.params_checksum()


def test_pure_training_epoch_keeps_pool(tiny_env, tiny_schema):
    cfg = small_config(simulation_epoch_size=0, success_rate_threshold=1.1)
    agent = DQNAgent(tiny_schema, cfg, seed=0)
    trainer = Trainer(tiny_env, agent, cfg, seed=0)
    trainer.warm_start_fill()
    size = len(agent.buffer)
    assert size > 0
    trainer.run_training_epoch()
    assert len(agent.buffer) == size


def test_empty_pool_at_training_time_errors(tiny_env, tiny_schema):
    cfg = small_config(simulation_epoch_size=0, warm_start="off")
    agent = DQNAgent(tiny_schema, cfg, seed=0)
    trainer = Trainer(tiny_env, agent, cfg, seed=0)
    with pytest.raises(TrainerError):
        trainer.run_training_epoch()


def test_curve_csv_written(tiny_env, tiny_schema, tmp_path):
    cfg = small_config(epochs=2)
    agent = DQNAgent(tiny_schema, cfg, seed=0)
    trainer = Trainer(tiny_env, agent, cfg, seed=0)
    path = tmp_path / "curve.csv"
    trainer.train(epochs=2, curve_path=path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "epoch,success_rate,avg_reward,avg_turns,buffer_size,flushed"
    assert len(lines) == 3


class ThanksAgent(Agent):
    def state_to_action(self, state):
        return self._respond("thanks")


def test_evaluate_immediate_thanks_metrics(tiny_env, tiny_schema):
    stats = evaluate(ThanksAgent(tiny_schema), tiny_env, episodes=20,
                     rng=random.Random(0))
    assert stats.success_rate == 0.0
    assert stats.avg_turns == 4.0
    assert stats.avg_reward == -tiny_schema.max_turn


def test_evaluate_restores_epsilon(tiny_env, tiny_schema):
    cfg = small_config(epsilon=0.7)
    agent = DQNAgent(tiny_schema, cfg, seed=0)
    evaluate(agent, tiny_env, episodes=2, greedy=True, rng=random.Random(0))
    assert agent.epsilon == 0.7


def test_compute_upper_bound(tiny_schema):
    records = [{"moviename": "a", "theater": "t", "starttime": "1 pm",
                "date": "today", "city": "x"}]
    kb = MovieKB(records, tiny_schema)
    sat = UserGoal({"moviename": "a", "theater": "t", "starttime": "1 pm",
                    "date": "today", "numberofpeople": "2"}, {"ticket": "UNK"})
    unsat = UserGoal({"moviename": "b", "theater": "t", "starttime": "1 pm",
                      "date": "today", "numberofpeople": "2"}, {"ticket": "UNK"})
    goals = [sat.copy() for _ in range(7)] + [unsat.copy() for _ in range(3)]
    for i, g in enumerate(goals):
        g.inform_slots["numberofpeople"] = str(i + 1)  # defeat any dedup
    db = GoalDatabase(goals, ["t"] * 10)
    assert compute_upper_bound(db, kb) == 0.7
    all_sat = GoalDatabase(goals[:7], ["t"] * 7)
    assert compute_upper_bound(all_sat, kb) == 1.0


def test_backend_and_numpy_agree_numerically():
    from dialogsim.rl import _qnet_np

    rng = np.random.default_rng(7)
    W1 = rng.normal(size=(6, 5)); b1 = rng.normal(size=5)
    W2 = rng.normal(size=(5, 3)); b2 = rng.normal(size=3)
    X = rng.normal(size=(8, 6))
    actions = rng.integers(0, 3, size=8)
    targets = rng.normal(size=8)
    from dialogsim.rl import backend

    q_a = backend.forward(W1, b1, W2, b2, np.ascontiguousarray(X))
    q_b = _qnet_np.forward(W1, b1, W2, b2, X)
    assert np.allclose(q_a, q_b, atol=1e-10)
    out_a = backend.loss_and_grads(W1, b1, W2, b2, np.ascontiguousarray(X),
                                   np.ascontiguousarray(actions), targets)
    out_b = _qnet_np.loss_and_grads(W1, b1, W2, b2, X, actions, targets)
    assert abs(out_a[0] - out_b[0]) < 1e-10
    for a, b in zip(out_a[1:], out_b[1:]):
        assert np.allclose(a, b, atol=1e-10)
