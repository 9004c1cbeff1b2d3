"""Numba kernels for the one-hidden-layer softmax classifier.

Plain loops over tiny matrices: at desk scale the per-call overhead of
numpy dominates, and a chain retrains the network hundreds of times.
Labels here are 0-based.
"""

import math

import numba as nb
import numpy as np


@nb.njit(cache=True, nogil=True)
def loss_grad(w1, b1, w2, b2, x, y, gw1, gb1, gw2, gb2):
    """Mean cross-entropy over the rows of ``x``; gradients written in place."""
    n, d = x.shape
    width = w1.shape[1]
    k = w2.shape[1]
    gw1[:] = 0.0
    gb1[:] = 0.0
    gw2[:] = 0.0
    gb2[:] = 0.0
    h = np.empty(width)
    z = np.empty(k)
    loss = 0.0
    for i in range(n):
        for j in range(width):
            s = b1[j]
            for r in range(d):
                s += x[i, r] * w1[r, j]
            h[j] = s if s > 0.0 else 0.0
        zmax = -np.inf
        for c in range(k):
            s = b2[c]
            for j in range(width):
                s += h[j] * w2[j, c]
            z[c] = s
            if s > zmax:
                zmax = s
        tot = 0.0
        for c in range(k):
            z[c] = math.exp(z[c] - zmax)
            tot += z[c]
        for c in range(k):
            z[c] /= tot
        loss -= math.log(z[y[i]])
        # z now holds dL/dlogits for this row
        z[y[i]] -= 1.0
        for c in range(k):
            g = z[c] / n
            gb2[c] += g
            for j in range(width):
                gw2[j, c] += h[j] * g
        for j in range(width):
            if h[j] > 0.0:
                g = 0.0
                for c in range(k):
                    g += w2[j, c] * z[c]
                g /= n
                gb1[j] += g
                for r in range(d):
                    gw1[r, j] += x[i, r] * g
    return loss / n


@nb.njit(cache=True, nogil=True)
def sgd_train(w1, b1, w2, b2, x, y, perms, batch_size, lr0, momentum, cosine):
    """Mini-batch SGD with heavy-ball momentum, updating parameters in place.

    ``perms`` holds one row-order permutation per epoch. Returns the mean
    training loss of the final epoch (nan/inf signals divergence).
    """
    epochs, n = perms.shape
    per_epoch = (n + batch_size - 1) // batch_size
    total = epochs * per_epoch
    gw1 = np.zeros_like(w1)
    gb1 = np.zeros_like(b1)
    gw2 = np.zeros_like(w2)
    gb2 = np.zeros_like(b2)
    vw1 = np.zeros_like(w1)
    vb1 = np.zeros_like(b1)
    vw2 = np.zeros_like(w2)
    vb2 = np.zeros_like(b2)
    step = 0
    last = 0.0
    for e in range(epochs):
        epoch_loss = 0.0
        for bi in range(per_epoch):
            idx = perms[e, bi * batch_size : min((bi + 1) * batch_size, n)]
            lr = lr0 * 0.5 * (1.0 + math.cos(math.pi * step / total)) if cosine else lr0
            loss = loss_grad(w1, b1, w2, b2, x[idx], y[idx], gw1, gb1, gw2, gb2)
            epoch_loss += loss * idx.size
            vw1[:] = momentum * vw1 + gw1
            vb1[:] = momentum * vb1 + gb1
            vw2[:] = momentum * vw2 + gw2
            vb2[:] = momentum * vb2 + gb2
            w1 -= lr * vw1
            b1 -= lr * vb1
            w2 -= lr * vw2
            b2 -= lr * vb2
            step += 1
        last = epoch_loss / n
        if not math.isfinite(last):
            return last
    return last
