# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled Q-network kernels: tanh hidden layer forward pass and the fused
loss/gradient computation for squared error on the chosen actions.

Training batches are small (tens of rows over a few hundred inputs), so plain
typed loops beat BLAS dispatch overhead here; the numpy module mirrors the
same arithmetic for installs without a compiler.
"""

import numpy as np

from libc.math cimport tanh

NAME = "cython"


def forward(double[:, ::1] W1, double[::1] b1,
            double[:, ::1] W2, double[::1] b2,
            double[:, ::1] X):
    cdef Py_ssize_t B = X.shape[0]
    cdef Py_ssize_t D = X.shape[1]
    cdef Py_ssize_t H = W1.shape[1]
    cdef Py_ssize_t A = W2.shape[1]
    out_arr = np.empty((B, A), dtype=np.float64)
    hid_arr = np.empty(H, dtype=np.float64)
    cdef double[:, ::1] Q = out_arr
    cdef double[::1] hid = hid_arr
    cdef Py_ssize_t i, j, k
    cdef double acc
    for i in range(B):
        for j in range(H):
            acc = b1[j]
            for k in range(D):
                acc += X[i, k] * W1[k, j]
            hid[j] = tanh(acc)
        for j in range(A):
            acc = b2[j]
            for k in range(H):
                acc += hid[k] * W2[k, j]
            Q[i, j] = acc
    return out_arr


def loss_and_grads(double[:, ::1] W1, double[::1] b1,
                   double[:, ::1] W2, double[::1] b2,
                   double[:, ::1] X,
                   long[::1] actions, double[::1] targets):
    cdef Py_ssize_t B = X.shape[0]
    cdef Py_ssize_t D = X.shape[1]
    cdef Py_ssize_t H = W1.shape[1]
    cdef Py_ssize_t A = W2.shape[1]
    g_w1_arr = np.zeros((D, H), dtype=np.float64)
    g_b1_arr = np.zeros(H, dtype=np.float64)
    g_w2_arr = np.zeros((H, A), dtype=np.float64)
    g_b2_arr = np.zeros(A, dtype=np.float64)
    hid_arr = np.empty(H, dtype=np.float64)
    cdef double[:, ::1] gW1 = g_w1_arr
    cdef double[::1] gb1 = g_b1_arr
    cdef double[:, ::1] gW2 = g_w2_arr
    cdef double[::1] gb2 = g_b2_arr
    cdef double[::1] hid = hid_arr
    cdef Py_ssize_t i, j, k, a
    cdef double acc, q, diff, g, dz, loss = 0.0
    for i in range(B):
        for j in range(H):
            acc = b1[j]
            for k in range(D):
                acc += X[i, k] * W1[k, j]
            hid[j] = tanh(acc)
        a = actions[i]
        q = b2[a]
        for k in range(H):
            q += hid[k] * W2[k, a]
        diff = q - targets[i]
        loss += diff * diff
        # Only the chosen action's output carries gradient.
        g = 2.0 * diff / B
        gb2[a] += g
        for k in range(H):
            gW2[k, a] += hid[k] * g
            dz = g * W2[k, a] * (1.0 - hid[k] * hid[k])
            gb1[k] += dz
            for j in range(D):
                gW1[j, k] += X[i, j] * dz
    loss /= B
    return loss, g_w1_arr, g_b1_arr, g_w2_arr, g_b2_arr
