"""Hot numeric kernels for the GRU encoder-decoder.

Every kernel exists in a pure-numpy form; when numba is importable and the
env var FFRKIT_NUMBA is not "0", the same functions are compiled with
@njit. Both paths compute identical float64 results (same operations, same
order); `bench/kernel_bench.py` compares their throughput.

Convention: row vectors. x [B,E], h [B,H], W [E,H], U [H,H], b [H].
"""

from __future__ import annotations

import os

import numpy as np

NEG_INF = -1e30


def _gru_forward(x, h_prev, wz, uz, bz, wr, ur, br, wh, uh, bh):
    z = 1.0 / (1.0 + np.exp(-(np.dot(x, wz) + np.dot(h_prev, uz) + bz)))
    r = 1.0 / (1.0 + np.exp(-(np.dot(x, wr) + np.dot(h_prev, ur) + br)))
    hc = np.tanh(np.dot(x, wh) + np.dot(r * h_prev, uh) + bh)
    h = (1.0 - z) * h_prev + z * hc
    return h, z, r, hc


def _gru_backward(dh, x, h_prev, z, r, hc, wz, uz, wr, ur, wh, uh):
    dz = dh * (hc - h_prev)
    dhc = dh * z
    dh_prev = dh * (1.0 - z)

    dah = dhc * (1.0 - hc * hc)
    daz = dz * z * (1.0 - z)

    drh = np.dot(dah, uh.T)
    dr = drh * h_prev
    dh_prev = dh_prev + drh * r
    dar = dr * r * (1.0 - r)

    dx = np.dot(daz, wz.T) + np.dot(dar, wr.T) + np.dot(dah, wh.T)
    dh_prev = dh_prev + np.dot(daz, uz.T) + np.dot(dar, ur.T)

    xt = x.T
    ht = h_prev.T
    dwz = np.dot(xt, daz)
    duz = np.dot(ht, daz)
    dbz = np.sum(daz, 0)
    dwr = np.dot(xt, dar)
    dur = np.dot(ht, dar)
    dbr = np.sum(dar, 0)
    dwh = np.dot(xt, dah)
    duh = np.dot((r * h_prev).T, dah)
    dbh = np.sum(dah, 0)
    return dx, dh_prev, dwz, duz, dbz, dwr, dur, dbr, dwh, duh, dbh


def _attn_forward(dec_h, enc_hs, enc_proj, mask, w2, v):
    """Additive attention for one decoder step.

    dec_h [B,H], enc_hs [B,T,H], enc_proj = enc_hs @ w1 [B,T,A], mask [B,T].
    Returns context [B,H], weights [B,T], u [B,T,A] (post-tanh cache).
    """
    b_sz, t_sz, h_sz = enc_hs.shape
    a_sz = enc_proj.shape[2]
    dq = np.dot(dec_h, w2)
    u = np.empty((b_sz, t_sz, a_sz))
    weights = np.empty((b_sz, t_sz))
    context = np.empty((b_sz, h_sz))
    for b in range(b_sz):
        ub = np.tanh(enc_proj[b] + dq[b])
        u[b] = ub
        scores = np.dot(ub, v)
        m = -np.inf
        for t in range(t_sz):
            if mask[b, t] > 0.0 and scores[t] > m:
                m = scores[t]
        s = 0.0
        for t in range(t_sz):
            if mask[b, t] > 0.0:
                e = np.exp(scores[t] - m)
            else:
                e = 0.0
            weights[b, t] = e
            s += e
        for t in range(t_sz):
            weights[b, t] /= s
        context[b] = np.dot(weights[b], enc_hs[b])
    return context, weights, u


def _attn_backward(dcontext, dec_h, enc_hs, weights, u, w1, w2, v):
    """Gradients of the attention step; returns (ddec_h, denc_hs, dw1, dw2, dv)."""
    b_sz, t_sz, h_sz = enc_hs.shape
    a_sz = u.shape[2]
    denc_hs = np.zeros((b_sz, t_sz, h_sz))
    dw1 = np.zeros((h_sz, a_sz))
    dv = np.zeros(a_sz)
    ddq = np.empty((b_sz, a_sz))
    for b in range(b_sz):
        dweights = np.dot(enc_hs[b], dcontext[b])
        denc_hs[b] = np.outer(weights[b], dcontext[b])
        dot = np.dot(weights[b], dweights)
        ds = weights[b] * (dweights - dot)
        du = np.outer(ds, v)
        dv += np.dot(u[b].T, ds)
        da = du * (1.0 - u[b] * u[b])
        dw1 += np.dot(enc_hs[b].T, da)
        denc_hs[b] += np.dot(da, w1.T)
        ddq[b] = np.sum(da, 0)
    ddec_h = np.dot(ddq, w2.T)
    dw2 = np.dot(dec_h.T, ddq)
    return ddec_h, denc_hs, dw1, dw2, dv


def _softmax_xent(logits, targets, mask):
    """Masked softmax cross-entropy over one decoder step.

    logits [B,V], targets [B] int64, mask [B]. Returns (loss_sum, dlogits
    w.r.t. the summed loss, probs). Masked rows contribute nothing.
    """
    b_sz, v_sz = logits.shape
    probs = np.empty((b_sz, v_sz))
    dlogits = np.zeros((b_sz, v_sz))
    loss = 0.0
    for b in range(b_sz):
        row = logits[b]
        m = row[0]
        for j in range(1, v_sz):
            if row[j] > m:
                m = row[j]
        e = np.exp(row - m)
        s = np.sum(e)
        p = e / s
        probs[b] = p
        if mask[b] > 0.0:
            loss -= np.log(p[targets[b]])
            dlogits[b] = p
            dlogits[b, targets[b]] -= 1.0
    return loss, dlogits, probs


_USE_NUMBA = os.environ.get("FFRKIT_NUMBA", "1") != "0"
if _USE_NUMBA:
    try:
        from numba import njit
    except ImportError:
        _USE_NUMBA = False

if _USE_NUMBA:
    gru_forward = njit(cache=True)(_gru_forward)
    gru_backward = njit(cache=True)(_gru_backward)
    attn_forward = njit(cache=True)(_attn_forward)
    attn_backward = njit(cache=True)(_attn_backward)
    softmax_xent = njit(cache=True)(_softmax_xent)
else:
    gru_forward = _gru_forward
    gru_backward = _gru_backward
    attn_forward = _attn_forward
    attn_backward = _attn_backward
    softmax_xent = _softmax_xent


def numba_enabled() -> bool:
    return _USE_NUMBA
