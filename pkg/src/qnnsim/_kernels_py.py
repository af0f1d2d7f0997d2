"""Pure numpy versions of the batch kernels in ``_kernels.pyx``.

Same signatures and semantics; used when the extension is not built.
"""
import numpy as np


def _exclusive_products(s):
    # prod_{k != n} s[..., k] without dividing, so zero factors are safe
    ones = np.ones(s.shape[:-1] + (1,))
    pre = np.cumprod(np.concatenate([ones, s[..., :-1]], axis=-1), axis=-1)
    rev = s[..., ::-1]
    suf = np.cumprod(np.concatenate([ones, rev[..., :-1]], axis=-1), axis=-1)[..., ::-1]
    return pre * suf


def batch_forward(weights, angles, eps):
    phi = np.asarray(angles, dtype=np.float64)
    h = phi
    for i, w in enumerate(weights):
        h = np.sin(phi[:, None, :] + w[None, :, :]).prod(axis=-1)
        if i + 1 < len(weights):
            phi = np.arcsin(np.clip(h, -1.0 + eps, 1.0 - eps))
    return h


def batch_loss_grad(weights, angles, targets, eps):
    phi = np.asarray(angles, dtype=np.float64)
    cache = []
    for i, w in enumerate(weights):
        a = phi[:, None, :] + w[None, :, :]
        s = np.sin(a)
        h = s.prod(axis=-1)
        cache.append((a, s, h))
        if i + 1 < len(weights):
            phi = np.arcsin(np.clip(h, -1.0 + eps, 1.0 - eps))

    y = cache[-1][2]
    r = y * y - targets
    loss_sum = float(np.sum(r * r))
    g_h = 4.0 * y * r

    grads = [None] * len(weights)
    for i in range(len(weights) - 1, -1, -1):
        a, s, _ = cache[i]
        d = g_h[:, :, None] * np.cos(a) * _exclusive_products(s)
        grads[i] = d.sum(axis=0)
        if i > 0:
            hc = np.clip(cache[i - 1][2], -1.0 + eps, 1.0 - eps)
            g_h = d.sum(axis=1) / np.sqrt(1.0 - hc * hc)
    return loss_sum, grads
