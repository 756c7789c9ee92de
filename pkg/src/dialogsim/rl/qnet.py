"""Q-network: one tanh hidden layer, linear output, SGD with gradient clipping.

Checkpoints are JSON with base64-encoded float64 buffers so a reloaded network
reproduces forward passes bit for bit.
"""

from __future__ import annotations

import base64
import json
from pathlib import Path

import numpy as np

from ..core import DialogsimError
from . import backend

CHECKPOINT_FORMAT = "dialogsim-qnet"
CHECKPOINT_VERSION = 1


class QNetError(DialogsimError):
    pass


def _as_input(X) -> np.ndarray:
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    return X


class QNetwork:
    def __init__(self, input_dim: int, hidden_dim: int, output_dim: int, seed: int = 0):
        self.input_dim = input_dim
        self.hidden_dim = hidden_dim
        self.output_dim = output_dim
        rng = np.random.default_rng(seed)
        lim1 = np.sqrt(6.0 / (input_dim + hidden_dim))
        lim2 = np.sqrt(6.0 / (hidden_dim + output_dim))
        self.W1 = rng.uniform(-lim1, lim1, (input_dim, hidden_dim))
        self.b1 = np.zeros(hidden_dim)
        self.W2 = rng.uniform(-lim2, lim2, (hidden_dim, output_dim))
        self.b2 = np.zeros(output_dim)

    # ----- inference -------------------------------------------------------

    def forward(self, X) -> np.ndarray:
        X = _as_input(X)
        if X.shape[1] != self.input_dim:
            raise QNetError(f"expected input dim {self.input_dim}, got {X.shape[1]}")
        return backend.forward(self.W1, self.b1, self.W2, self.b2, X)

    def predict(self, x) -> np.ndarray:
        return self.forward(x)[0]

    # ----- training ----------------------------------------------------------

    def loss_and_grads(self, states, actions, targets):
        states = _as_input(states)
        actions = np.ascontiguousarray(actions, dtype=np.int64)
        targets = np.ascontiguousarray(targets, dtype=np.float64)
        return backend.loss_and_grads(
            self.W1, self.b1, self.W2, self.b2, states, actions, targets
        )

    def train_batch(
        self,
        states,
        actions,
        rewards,
        next_states,
        dones,
        target_net: "QNetwork",
        gamma: float,
        lr: float,
        clip: float = 1.0,
    ) -> float:
        rewards = np.asarray(rewards, dtype=np.float64)
        dones = np.asarray(dones, dtype=np.float64)
        next_q = target_net.forward(next_states).max(axis=1)
        targets = rewards + gamma * (1.0 - dones) * next_q
        loss, g_w1, g_b1, g_w2, g_b2 = self.loss_and_grads(states, actions, targets)
        if not np.isfinite(loss):
            raise QNetError(
                f"non-finite loss {loss}; check learning rate/reward scaling"
            )
        grads = (g_w1, g_b1, g_w2, g_b2)
        if clip is not None and clip > 0:
            norm = np.sqrt(sum(float(np.sum(g * g)) for g in grads))
            if norm > clip:
                scale = clip / norm
                grads = tuple(g * scale for g in grads)
        self.W1 -= lr * grads[0]
        self.b1 -= lr * grads[1]
        self.W2 -= lr * grads[2]
        self.b2 -= lr * grads[3]
        return loss

    # ----- parameter management ------------------------------------------------

    def copy_from(self, other: "QNetwork"):
        np.copyto(self.W1, other.W1)
        np.copyto(self.b1, other.b1)
        np.copyto(self.W2, other.W2)
        np.copyto(self.b2, other.b2)

    def clone(self) -> "QNetwork":
        twin = QNetwork(self.input_dim, self.hidden_dim, self.output_dim)
        twin.copy_from(self)
        return twin

    def params_checksum(self) -> float:
        return float(
            np.sum(self.W1) + np.sum(self.b1) + np.sum(self.W2) + np.sum(self.b2)
        )

    # ----- persistence -----------------------------------------------------------

    @staticmethod
    def _encode(arr: np.ndarray) -> dict:
        return {
            "shape": list(arr.shape),
            "data": base64.b64encode(np.ascontiguousarray(arr).tobytes()).decode(),
        }

    @staticmethod
    def _decode(entry: dict) -> np.ndarray:
        buf = base64.b64decode(entry["data"])
        return np.frombuffer(buf, dtype=np.float64).reshape(entry["shape"]).copy()

    def save(self, path: str | Path, layout: dict | None = None, config: dict | None = None):
        data = {
            "format": CHECKPOINT_FORMAT,
            "version": CHECKPOINT_VERSION,
            "dims": [self.input_dim, self.hidden_dim, self.output_dim],
            "params": {
                "W1": self._encode(self.W1),
                "b1": self._encode(self.b1),
                "W2": self._encode(self.W2),
                "b2": self._encode(self.b2),
            },
            "layout": layout or {},
            "config": config or {},
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(data, fh)
            fh.write("\n")

    @classmethod
    def load(cls, path: str | Path) -> tuple["QNetwork", dict]:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        if data.get("format") != CHECKPOINT_FORMAT:
            raise QNetError(f"{path} is not a {CHECKPOINT_FORMAT} checkpoint")
        if data.get("version") != CHECKPOINT_VERSION:
            raise QNetError(f"unsupported checkpoint version {data.get('version')}")
        net = cls(*data["dims"])
        net.W1 = cls._decode(data["params"]["W1"])
        net.b1 = cls._decode(data["params"]["b1"])
        net.W2 = cls._decode(data["params"]["W2"])
        net.b2 = cls._decode(data["params"]["b2"])
        meta = {"layout": data.get("layout", {}), "config": data.get("config", {})}
        return net, meta
