"""Pure-numpy Q-network kernels; the fallback when the compiled module is absent.

Same math as _qnetc: one tanh hidden layer, linear output, squared error on
the chosen action's value.
"""

import numpy as np

NAME = "numpy"


def forward(W1, b1, W2, b2, X):
    hidden = np.tanh(X @ W1 + b1)
    return hidden @ W2 + b2


def loss_and_grads(W1, b1, W2, b2, X, actions, targets):
    batch = X.shape[0]
    hidden = np.tanh(X @ W1 + b1)
    q = hidden @ W2 + b2
    rows = np.arange(batch)
    diff = q[rows, actions] - targets
    loss = float(np.mean(diff * diff))

    dq = np.zeros_like(q)
    dq[rows, actions] = 2.0 * diff / batch
    g_w2 = hidden.T @ dq
    g_b2 = dq.sum(axis=0)
    d_hidden = (dq @ W2.T) * (1.0 - hidden * hidden)
    g_w1 = X.T @ d_hidden
    g_b1 = d_hidden.sum(axis=0)
    return loss, g_w1, g_b1, g_w2, g_b2
