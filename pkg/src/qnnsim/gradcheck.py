"""Central finite differences and the error measure used to compare gradients."""
from __future__ import annotations

import numpy as np

from . import qnn


def central_difference(fn, params, step=1e-6, dtype=np.float64):
    """Numerical gradient of scalar ``fn(params)`` for a list of arrays.

    ``dtype`` sets the precision of the bumped parameters; pass
    ``np.longdouble`` together with an ``fn`` that computes in that precision
    to push the rounding floor below the gradients being checked.
    """
    params = [np.array(p, dtype=dtype) for p in params]
    out = []
    for i, p in enumerate(params):
        g = np.zeros_like(p)
        for idx in np.ndindex(p.shape):
            bumped = [q.copy() for q in params]
            bumped[i][idx] = p[idx] + step
            up = fn(bumped)
            bumped[i][idx] = p[idx] - step
            down = fn(bumped)
            g[idx] = (up - down) / (2 * step)
        out.append(g.astype(np.float64))
    return out


def relative_error(analytic, numeric) -> float:
    """``max|a - f|`` divided by the largest gradient magnitude in either set.

    Normalising by the gradient scale rather than entry by entry keeps
    entries that are themselves at rounding level from dominating.
    """
    a = np.concatenate([np.ravel(g) for g in analytic])
    f = np.concatenate([np.ravel(g) for g in numeric])
    diff = float(np.max(np.abs(a - f)))
    scale = float(max(np.max(np.abs(a)), np.max(np.abs(f))))
    return diff / scale if scale > 0.0 else diff


def _qnn_loss_ld(layers, sample, target):
    # independent extended-precision forward pass; float64 differences of an
    # O(1) loss cannot resolve gradients near 1e-7 with a 1e-6 step
    eps = np.longdouble(qnn.CLAMP_EPS)
    phi = np.asarray(sample, dtype=np.longdouble)
    for i, w in enumerate(layers):
        h = np.prod(np.sin(phi[None, :] + w), axis=1)
        if i + 1 < len(layers):
            phi = np.arcsin(np.clip(h, -1 + eps, 1 - eps))
    t = np.asarray(target, dtype=np.longdouble)
    return np.sum((h * h - t) ** 2)


def qnn_gradient_check(net, sample, target, step=1e-6) -> float:
    """Analytic ``qnn.backward`` versus central differences of the loss."""
    trace = qnn.forward(net, sample)
    analytic = qnn.backward(net, trace, target)
    numeric = central_difference(lambda layers: _qnn_loss_ld(layers, sample, target),
                                 net.layers, step, dtype=np.longdouble)
    return relative_error(analytic, numeric)


def max_activation(net, sample) -> float:
    return float(max(np.max(np.abs(h)) for h in qnn.forward(net, sample).outputs))
