# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled batch kernels for the product-of-sines network.

Each call loops over samples in C and fuses the forward sweep with the
reverse-mode sweep. sin(phi + w) and cos(phi + w) are expanded with the
angle-addition identities so that transcendental calls scale with the
number of units rather than the number of weights.

All per-layer buffers live in flat arrays indexed through offset tables.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sin, cos, sqrt

cnp.import_array()


cdef inline double _clamp(double h, double eps) noexcept nogil:
    if h > 1.0 - eps:
        return 1.0 - eps
    if h < -1.0 + eps:
        return -1.0 + eps
    return h


cdef struct Layout:
    Py_ssize_t n_layers
    Py_ssize_t* rows      # neurons per layer
    Py_ssize_t* cols      # inputs per layer
    Py_ssize_t* w_off     # start of layer l in the flat weight buffers
    Py_ssize_t* u_off     # start of layer l inputs in the flat unit buffers


def _layout(list weights, Py_ssize_t n_features):
    shapes = []
    prev = n_features
    for x in weights:
        w = np.asarray(x, dtype=np.float64)
        if w.ndim != 2:
            raise ValueError("weights must be 2-D")
        if w.shape[1] != prev:
            raise ValueError(
                f"layer expects {w.shape[1]} inputs but receives {prev}")
        shapes.append(w.shape)
        prev = w.shape[0]
    sizes = np.array(shapes, dtype=np.intp).reshape(-1, 2)
    w_off = np.zeros(len(shapes) + 1, dtype=np.intp)
    w_off[1:] = np.cumsum(sizes[:, 0] * sizes[:, 1])
    u_off = np.zeros(len(shapes) + 1, dtype=np.intp)
    u_off[1:] = np.cumsum(sizes[:, 1])
    flat = np.concatenate([np.ravel(np.asarray(x, dtype=np.float64)) for x in weights])
    return (np.ascontiguousarray(sizes[:, 0]), np.ascontiguousarray(sizes[:, 1]),
            w_off, u_off, np.sin(flat), np.cos(flat))


cdef void _forward_one(Layout* L, const double* sw, const double* cw,
                       double* sphi, double* cphi, double* h,
                       double eps) noexcept nogil:
    """Forward sweep for one sample whose layer-0 sphi/cphi are filled.

    h receives every layer's raw outputs at offset u_off[l + 1] - cols[0]
    layout-compatible with sphi of the next layer.
    """
    cdef Py_ssize_t l, m, k, n_in, n_out, wo, uo, ho
    cdef double p, y
    for l in range(L.n_layers):
        n_out = L.rows[l]
        n_in = L.cols[l]
        wo = L.w_off[l]
        uo = L.u_off[l]
        ho = L.u_off[l + 1] - L.cols[0]
        for m in range(n_out):
            p = 1.0
            for k in range(n_in):
                p *= sphi[uo + k] * cw[wo + m * n_in + k] + cphi[uo + k] * sw[wo + m * n_in + k]
            h[ho + m] = p
        if l + 1 < L.n_layers:
            for m in range(n_out):
                y = _clamp(h[ho + m], eps)
                sphi[uo + n_in + m] = y
                cphi[uo + n_in + m] = sqrt(1.0 - y * y)


def batch_forward(list weights, const double[:, ::1] angles, double eps):
    """Return the output-layer amplitudes for every row of ``angles``."""
    rows, cols, w_off, u_off, sw_a, cw_a = _layout(weights, angles.shape[1])
    cdef Py_ssize_t[::1] rows_v = rows, cols_v = cols, wo_v = w_off, uo_v = u_off
    cdef Layout L
    L.n_layers = rows.shape[0]
    L.rows = &rows_v[0]
    L.cols = &cols_v[0]
    L.w_off = &wo_v[0]
    L.u_off = &uo_v[0]
    cdef double[::1] sw = sw_a, cw = cw_a
    cdef Py_ssize_t n_units = int(u_off[-1]) + int(rows[-1])
    cdef double[::1] sphi = np.empty(n_units, dtype=np.float64)
    cdef double[::1] cphi = np.empty(n_units, dtype=np.float64)
    cdef double[::1] h = np.empty(n_units, dtype=np.float64)
    cdef Py_ssize_t n_samples = angles.shape[0], n_feat = angles.shape[1]
    cdef Py_ssize_t n_out = rows[-1]
    cdef Py_ssize_t ho = L.u_off[L.n_layers - 1] + L.cols[L.n_layers - 1] - L.cols[0]
    out = np.empty((n_samples, n_out), dtype=np.float64)
    cdef double[:, ::1] out_v = out
    cdef Py_ssize_t b, k
    with nogil:
        for b in range(n_samples):
            for k in range(n_feat):
                sphi[k] = sin(angles[b, k])
                cphi[k] = cos(angles[b, k])
            _forward_one(&L, &sw[0], &cw[0], &sphi[0], &cphi[0], &h[0], eps)
            for k in range(n_out):
                out_v[b, k] = h[ho + k]
    return out


def batch_loss_grad(list weights, const double[:, ::1] angles,
                    const double[:, ::1] targets, double eps):
    """Summed squared-amplitude loss and its gradient over a batch.

    Returns ``(loss_sum, grads)`` where ``grads[l]`` has the shape of
    ``weights[l]``. Neither value is divided by the batch size.
    """
    rows, cols, w_off, u_off, sw_a, cw_a = _layout(weights, angles.shape[1])
    if targets.shape[0] != angles.shape[0] or targets.shape[1] != rows[-1]:
        raise ValueError("targets shape does not match batch and output width")
    cdef Py_ssize_t[::1] rows_v = rows, cols_v = cols, wo_v = w_off, uo_v = u_off
    cdef Layout L
    L.n_layers = rows.shape[0]
    L.rows = &rows_v[0]
    L.cols = &cols_v[0]
    L.w_off = &wo_v[0]
    L.u_off = &uo_v[0]
    cdef double[::1] sw = sw_a, cw = cw_a
    grad_a = np.zeros(sw_a.shape[0], dtype=np.float64)
    cdef double[::1] gw = grad_a
    cdef Py_ssize_t n_units = int(u_off[-1]) + int(rows[-1])
    cdef Py_ssize_t width = max(int(rows.max()), int(cols.max()))
    cdef double[::1] sphi = np.empty(n_units, dtype=np.float64)
    cdef double[::1] cphi = np.empty(n_units, dtype=np.float64)
    cdef double[::1] h = np.empty(n_units, dtype=np.float64)
    cdef double[::1] pre = np.empty(width + 1, dtype=np.float64)
    cdef double[::1] suf = np.empty(width + 1, dtype=np.float64)
    cdef double[::1] s = np.empty(width, dtype=np.float64)
    cdef double[::1] g_h = np.empty(width, dtype=np.float64)
    cdef double[::1] g_phi = np.empty(width, dtype=np.float64)
    cdef Py_ssize_t n_samples = angles.shape[0], n_feat = angles.shape[1]
    cdef Py_ssize_t n_out_final = rows[-1]
    cdef Py_ssize_t ho_final = L.u_off[L.n_layers - 1] + L.cols[L.n_layers - 1] - L.cols[0]
    cdef Py_ssize_t b, l, m, k, n_in, n_out, wo, uo, idx
    cdef double loss_sum = 0.0, y, r, gm, d

    with nogil:
        for b in range(n_samples):
            for k in range(n_feat):
                sphi[k] = sin(angles[b, k])
                cphi[k] = cos(angles[b, k])
            _forward_one(&L, &sw[0], &cw[0], &sphi[0], &cphi[0], &h[0], eps)

            for k in range(n_out_final):
                y = h[ho_final + k]
                r = y * y - targets[b, k]
                loss_sum += r * r
                g_h[k] = 4.0 * y * r

            for l in range(L.n_layers - 1, -1, -1):
                n_out = L.rows[l]
                n_in = L.cols[l]
                wo = L.w_off[l]
                uo = L.u_off[l]
                for k in range(n_in):
                    g_phi[k] = 0.0
                for m in range(n_out):
                    gm = g_h[m]
                    pre[0] = 1.0
                    for k in range(n_in):
                        idx = wo + m * n_in + k
                        s[k] = sphi[uo + k] * cw[idx] + cphi[uo + k] * sw[idx]
                        pre[k + 1] = pre[k] * s[k]
                    suf[n_in] = 1.0
                    for k in range(n_in - 1, -1, -1):
                        suf[k] = suf[k + 1] * s[k]
                    for k in range(n_in):
                        idx = wo + m * n_in + k
                        # cos(phi + w) times the product of the other factors
                        d = gm * (cphi[uo + k] * cw[idx] - sphi[uo + k] * sw[idx]) * pre[k] * suf[k + 1]
                        gw[idx] += d
                        g_phi[k] += d
                if l > 0:
                    # hidden-layer cphi holds sqrt(1 - h_clamped^2)
                    for k in range(n_in):
                        g_h[k] = g_phi[k] / cphi[uo + k]

    grads = []
    for l in range(rows.shape[0]):
        grads.append(grad_a[w_off[l]:w_off[l + 1]].reshape(rows[l], cols[l]).copy())
    return loss_sum, grads
