"""GRU encoder-decoder with additive attention, analytic gradients.

The decoder applies attention pre-cell: at step t the previous top-layer
hidden queries the encoder states, and the cell input is the concatenation
of the previous-token embedding and the attention context.

Parameters live in a name -> float64 ndarray map so optimizers, gradient
clipping, checkpointing, and finite-difference checks can treat every
tensor uniformly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import AllMasked, EmptyTarget, NonFiniteGradient, ShapeMismatch
from ..tokenizer import EOS, SOS
from . import kernels as K
from .config import ModelConfig

GATES = ("Wz", "Uz", "bz", "Wr", "Ur", "br", "Wh", "Uh", "bh")


@dataclass
class ModelParams:
    config: ModelConfig
    tensors: dict[str, np.ndarray] = field(default_factory=dict)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.tensors[name]

    def copy(self) -> "ModelParams":
        return ModelParams(self.config, {k: v.copy() for k, v in self.tensors.items()})

    def names(self) -> list[str]:
        return list(self.tensors)


def init_bound(shape: tuple[int, ...]) -> float:
    """Uniform init bound sqrt(6/(fan_in+fan_out)); 1D vectors count as [n,1]."""
    fan_in = shape[0]
    fan_out = shape[1] if len(shape) > 1 else 1
    return math.sqrt(6.0 / (fan_in + fan_out))


def tensor_shapes(cfg: ModelConfig) -> dict[str, tuple[int, ...]]:
    e, h, a = cfg.embed_dim, cfg.hidden_dim, cfg.attn_dim
    shapes: dict[str, tuple[int, ...]] = {
        "src_emb": (cfg.src_vocab, e),
        "tgt_emb": (cfg.tgt_vocab, e),
    }
    for k in range(cfg.num_layers):
        in_dim = e if k == 0 else h
        for g in GATES:
            shapes[f"enc.l{k}.{g}"] = (h,) if g.startswith("b") else (
                (in_dim, h) if g.startswith("W") else (h, h)
            )
    for k in range(cfg.num_layers):
        in_dim = (e + h) if k == 0 else h
        for g in GATES:
            shapes[f"dec.l{k}.{g}"] = (h,) if g.startswith("b") else (
                (in_dim, h) if g.startswith("W") else (h, h)
            )
    shapes["attn.W1"] = (h, a)
    shapes["attn.W2"] = (h, a)
    shapes["attn.v"] = (a,)
    shapes["out.W"] = (h, cfg.tgt_vocab)
    shapes["out.b"] = (cfg.tgt_vocab,)
    return shapes


def init_model(cfg: ModelConfig) -> ModelParams:
    """Seed-deterministic scaled-uniform initialization; biases zero."""
    rng = np.random.default_rng(cfg.seed)
    tensors: dict[str, np.ndarray] = {}
    for name, shape in tensor_shapes(cfg).items():
        if name.endswith((".bz", ".br", ".bh")) or name == "out.b":
            tensors[name] = np.zeros(shape)
        else:
            b = init_bound(shape)
            tensors[name] = rng.uniform(-b, b, size=shape)
    return ModelParams(cfg, tensors)


def _gate_args(p: ModelParams, prefix: str):
    t = p.tensors
    return tuple(t[f"{prefix}.{g}"] for g in GATES)


def gru_cell(x: np.ndarray, h_prev: np.ndarray, gates: tuple[np.ndarray, ...]) -> np.ndarray:
    """One GRU step; gates = (Wz,Uz,bz,Wr,Ur,br,Wh,Uh,bh)."""
    wz, uz, bz, wr, ur, br, wh, uh, bh = gates
    if x.shape[-1] != wz.shape[0] or h_prev.shape[-1] != uz.shape[0]:
        raise ShapeMismatch(
            f"gru_cell: x {x.shape}, h {h_prev.shape}, Wz {wz.shape}, Uz {uz.shape}"
        )
    squeeze = x.ndim == 1
    if squeeze:
        x, h_prev = x[None, :], h_prev[None, :]
    h, _, _, _ = K.gru_forward(np.ascontiguousarray(x), np.ascontiguousarray(h_prev),
                               wz, uz, bz, wr, ur, br, wh, uh, bh)
    return h[0] if squeeze else h


def attend(
    dec_h: np.ndarray,
    enc_hs: np.ndarray,
    params: ModelParams,
    mask: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Additive attention: context and softmax weights over encoder steps.

    dec_h [H] or [B,H]; enc_hs [T,H] or [B,T,H]; mask [T] / [B,T] of 0/1.
    """
    squeeze = dec_h.ndim == 1
    if squeeze:
        dec_h = dec_h[None, :]
        enc_hs = enc_hs[None, :, :]
        if mask is not None:
            mask = mask[None, :]
    if mask is None:
        mask = np.ones(enc_hs.shape[:2])
    if np.any(mask.sum(axis=1) == 0):
        raise AllMasked("attention over a fully masked source")
    w1, w2, v = params["attn.W1"], params["attn.W2"], params["attn.v"]
    enc_proj = np.ascontiguousarray(
        (enc_hs.reshape(-1, enc_hs.shape[2]) @ w1).reshape(
            enc_hs.shape[0], enc_hs.shape[1], -1
        )
    )
    ctx, weights, _ = K.attn_forward(
        np.ascontiguousarray(dec_h), np.ascontiguousarray(enc_hs), enc_proj,
        np.ascontiguousarray(mask, dtype=np.float64), w2, v,
    )
    if squeeze:
        return ctx[0], weights[0]
    return ctx, weights


# --- full forward/backward ----------------------------------------------------


@dataclass
class _StepCache:
    x: np.ndarray
    h_prev: np.ndarray
    z: np.ndarray
    r: np.ndarray
    hc: np.ndarray


@dataclass
class ForwardCache:
    params: ModelParams
    src_ids: np.ndarray
    src_mask: np.ndarray
    tgt_ids: np.ndarray
    tgt_mask: np.ndarray
    fed_tokens: np.ndarray          # [B, L-1] tokens actually fed to the decoder
    enc_steps: list[list[_StepCache]]   # [T][layer]
    enc_hs: np.ndarray              # [B,T,H] top layer, mask-blended
    dec_steps: list[list[_StepCache]]
    attn_caches: list[tuple]        # per step: (dec_h_query, weights, u)
    dlogits: list[np.ndarray]       # grads of summed loss w.r.t. step logits
    hidden_states: list[np.ndarray]  # decoder top hidden per step [B,H]
    n_tokens: float
    logits: np.ndarray              # [B, L-1, V]
    attn: np.ndarray                # [B, L-1, T]
    loss: float


def _encode(params: ModelParams, src_ids: np.ndarray, src_mask: np.ndarray):
    cfg = params.config
    B, T = src_ids.shape
    H = cfg.hidden_dim
    emb = params["src_emb"][src_ids]  # [B,T,E]
    hs = [np.zeros((B, H)) for _ in range(cfg.num_layers)]
    enc_hs = np.empty((B, T, H))
    steps: list[list[_StepCache]] = []
    for t in range(T):
        x = np.ascontiguousarray(emb[:, t, :])
        m = src_mask[:, t : t + 1]
        layer_caches = []
        for k in range(cfg.num_layers):
            h_prev = hs[k]
            h_new, z, r, hc = K.gru_forward(
                np.ascontiguousarray(x), h_prev, *_gate_args(params, f"enc.l{k}")
            )
            layer_caches.append(_StepCache(x, h_prev, z, r, hc))
            h_blend = m * h_new + (1.0 - m) * h_prev
            hs[k] = h_blend
            x = h_blend
        steps.append(layer_caches)
        enc_hs[:, t, :] = hs[-1]
    return emb, steps, enc_hs


def forward(
    params: ModelParams,
    src_ids: np.ndarray,
    src_mask: np.ndarray,
    tgt_ids: np.ndarray,
    tgt_mask: np.ndarray,
    teacher_forcing: float = 1.0,
    rng: np.random.Generator | None = None,
) -> ForwardCache:
    """Run the full encoder-decoder; loss is mean masked token cross-entropy.

    Teacher forcing is decided per decoder step with probability
    `teacher_forcing` of feeding the gold previous token.
    """
    cfg = params.config
    if src_ids.shape != src_mask.shape or tgt_ids.shape != tgt_mask.shape:
        raise ShapeMismatch("ids and masks must have matching shapes")
    if src_ids.shape[0] != tgt_ids.shape[0]:
        raise ShapeMismatch("source and target batch sizes differ")
    n_tokens = float(tgt_mask[:, 1:].sum())
    if n_tokens == 0:
        raise EmptyTarget("no unmasked target tokens to score")
    if np.any(src_mask.sum(axis=1) == 0):
        raise AllMasked("a batch row has a fully masked source")
    if rng is None:
        rng = np.random.default_rng(0)

    B, T = src_ids.shape
    L = tgt_ids.shape[1]
    H, V = cfg.hidden_dim, cfg.tgt_vocab

    emb_src, enc_steps, enc_hs = _encode(params, src_ids, src_mask)
    w1 = params["attn.W1"]
    enc_proj = np.ascontiguousarray(
        (enc_hs.reshape(-1, H) @ w1).reshape(B, T, -1)
    )
    enc_hs_c = np.ascontiguousarray(enc_hs)
    mask_c = np.ascontiguousarray(src_mask, dtype=np.float64)

    hs = [np.zeros((B, H)) for _ in range(cfg.num_layers)]
    logits_all = np.empty((B, L - 1, V))
    attn_all = np.empty((B, L - 1, T))
    dec_steps: list[list[_StepCache]] = []
    attn_caches: list[tuple] = []
    dlogits_steps: list[np.ndarray] = []
    hidden_states: list[np.ndarray] = []
    fed = np.empty((B, L - 1), dtype=np.int64)

    loss_sum = 0.0
    prev_pred = np.full(B, SOS, dtype=np.int64)
    for t in range(L - 1):
        if t == 0 or rng.random() < teacher_forcing:
            tokens = tgt_ids[:, t]
        else:
            tokens = prev_pred
        fed[:, t] = tokens
        tok_emb = params["tgt_emb"][tokens]  # [B,E]

        dec_h_query = hs[-1]
        ctx, weights, u = K.attn_forward(
            np.ascontiguousarray(dec_h_query), enc_hs_c, enc_proj, mask_c,
            params["attn.W2"], params["attn.v"],
        )
        attn_all[:, t, :] = weights
        attn_caches.append((dec_h_query, weights, u))

        x = np.ascontiguousarray(np.concatenate([tok_emb, ctx], axis=1))
        layer_caches = []
        for k in range(cfg.num_layers):
            h_prev = hs[k]
            h_new, z, r, hc = K.gru_forward(x, h_prev, *_gate_args(params, f"dec.l{k}"))
            layer_caches.append(_StepCache(x, h_prev, z, r, hc))
            hs[k] = h_new
            x = h_new
        dec_steps.append(layer_caches)
        hidden_states.append(hs[-1])

        step_logits = hs[-1] @ params["out.W"] + params["out.b"]
        logits_all[:, t, :] = step_logits
        l, dlog, probs = K.softmax_xent(
            np.ascontiguousarray(step_logits),
            np.ascontiguousarray(tgt_ids[:, t + 1]),
            np.ascontiguousarray(tgt_mask[:, t + 1], dtype=np.float64),
        )
        loss_sum += l
        dlogits_steps.append(dlog)
        prev_pred = np.argmax(step_logits, axis=1)

    return ForwardCache(
        params=params,
        src_ids=src_ids,
        src_mask=src_mask,
        tgt_ids=tgt_ids,
        tgt_mask=tgt_mask,
        fed_tokens=fed,
        enc_steps=enc_steps,
        enc_hs=enc_hs,
        dec_steps=dec_steps,
        attn_caches=attn_caches,
        dlogits=dlogits_steps,
        hidden_states=hidden_states,
        n_tokens=n_tokens,
        logits=logits_all,
        attn=attn_all,
        loss=loss_sum / n_tokens,
    )


def backward(cache: ForwardCache) -> dict[str, np.ndarray]:
    """Analytic gradients of the mean masked cross-entropy for every tensor."""
    params = cache.params
    cfg = params.config
    B, T = cache.src_ids.shape
    L = cache.tgt_ids.shape[1]
    H = cfg.hidden_dim
    E = cfg.embed_dim

    grads = {name: np.zeros_like(arr) for name, arr in params.tensors.items()}
    dh = [np.zeros((B, H)) for _ in range(cfg.num_layers)]  # running dL/dh per layer
    denc_hs = np.zeros((B, T, H))
    scale = 1.0 / cache.n_tokens
    w1, w2, v = params["attn.W1"], params["attn.W2"], params["attn.v"]
    enc_hs_c = np.ascontiguousarray(cache.enc_hs)

    for t in range(L - 2, -1, -1):
        dlog = cache.dlogits[t] * scale
        grads["out.W"] += cache.hidden_states[t].T @ dlog
        grads["out.b"] += dlog.sum(axis=0)
        dh[-1] = dh[-1] + dlog @ params["out.W"].T

        # decoder layers, top down
        dx = None
        for k in range(cfg.num_layers - 1, -1, -1):
            sc = cache.dec_steps[t][k]
            if dx is not None:
                dh[k] = dh[k] + dx
            (dx, dh_prev, dwz, duz, dbz, dwr, dur, dbr, dwh, duh, dbh) = K.gru_backward(
                np.ascontiguousarray(dh[k]), sc.x, sc.h_prev, sc.z, sc.r, sc.hc,
                *(params[f"dec.l{k}.{g}"] for g in ("Wz", "Uz", "Wr", "Ur", "Wh", "Uh")),
            )
            p = f"dec.l{k}"
            grads[f"{p}.Wz"] += dwz
            grads[f"{p}.Uz"] += duz
            grads[f"{p}.bz"] += dbz
            grads[f"{p}.Wr"] += dwr
            grads[f"{p}.Ur"] += dur
            grads[f"{p}.br"] += dbr
            grads[f"{p}.Wh"] += dwh
            grads[f"{p}.Uh"] += duh
            grads[f"{p}.bh"] += dbh
            dh[k] = dh_prev

        # dx now targets layer-0 input [tok_emb, ctx]
        dtok = dx[:, :E]
        dctx = np.ascontiguousarray(dx[:, E:])
        np.add.at(grads["tgt_emb"], cache.fed_tokens[:, t], dtok)

        dec_h_query, weights, u = cache.attn_caches[t]
        ddec_h, denc, dw1, dw2, dv = K.attn_backward(
            dctx, np.ascontiguousarray(dec_h_query), enc_hs_c, weights, u, w1, w2, v
        )
        grads["attn.W1"] += dw1
        grads["attn.W2"] += dw2
        grads["attn.v"] += dv
        denc_hs += denc
        dh[-1] = dh[-1] + ddec_h  # query was previous step's top hidden

    # encoder backward through time; dh carries into t-1 via the mask blend
    denc_top = denc_hs
    dh_enc = [np.zeros((B, H)) for _ in range(cfg.num_layers)]
    for t in range(T - 1, -1, -1):
        m = cache.src_mask[:, t : t + 1]
        dh_enc[-1] = dh_enc[-1] + denc_top[:, t, :]
        dx = None
        for k in range(cfg.num_layers - 1, -1, -1):
            if dx is not None:
                dh_enc[k] = dh_enc[k] + dx
            d_blend = dh_enc[k]
            d_new = np.ascontiguousarray(d_blend * m)
            d_prev_direct = d_blend * (1.0 - m)
            sc = cache.enc_steps[t][k]
            (dx, dh_prev, dwz, duz, dbz, dwr, dur, dbr, dwh, duh, dbh) = K.gru_backward(
                d_new, sc.x, sc.h_prev, sc.z, sc.r, sc.hc,
                *(params[f"enc.l{k}.{g}"] for g in ("Wz", "Uz", "Wr", "Ur", "Wh", "Uh")),
            )
            p = f"enc.l{k}"
            grads[f"{p}.Wz"] += dwz
            grads[f"{p}.Uz"] += duz
            grads[f"{p}.bz"] += dbz
            grads[f"{p}.Wr"] += dwr
            grads[f"{p}.Ur"] += dur
            grads[f"{p}.br"] += dbr
            grads[f"{p}.Wh"] += dwh
            grads[f"{p}.Uh"] += duh
            grads[f"{p}.bh"] += dbh
            dh_enc[k] = dh_prev + d_prev_direct
            dx = dx * m  # layer input only flowed on unmasked steps
        np.add.at(grads["src_emb"], cache.src_ids[:, t], dx)

    for name, g in grads.items():
        if not np.all(np.isfinite(g)):
            raise NonFiniteGradient(f"non-finite gradient in {name}")
    return grads


def clip_gradients(grads: dict[str, np.ndarray], max_norm: float) -> float:
    """Global-norm clip in place; returns the pre-clip norm."""
    total = math.sqrt(sum(float(np.sum(g * g)) for g in grads.values()))
    if max_norm > 0 and total > max_norm:
        f = max_norm / total
        for g in grads.values():
            g *= f
    return total


def translate_ids(
    params: ModelParams, src_ids: list[int], max_len: int | None = None
) -> tuple[list[int], np.ndarray]:
    """Greedy decode from SOS until EOS or max_len; returns (ids, attention)."""
    cfg = params.config
    if max_len is None:
        max_len = cfg.max_tgt_len
    if not src_ids:
        return [], np.zeros((0, 0))

    src = np.asarray([src_ids], dtype=np.int64)
    mask = np.ones_like(src, dtype=np.float64)
    _, _, enc_hs = _encode(params, src, mask)
    B, T, H = enc_hs.shape
    enc_proj = np.ascontiguousarray((enc_hs.reshape(-1, H) @ params["attn.W1"]).reshape(B, T, -1))
    enc_hs_c = np.ascontiguousarray(enc_hs)
    mask_c = np.ascontiguousarray(mask)

    hs = [np.zeros((1, H)) for _ in range(cfg.num_layers)]
    token = SOS
    out_ids: list[int] = []
    attn_rows: list[np.ndarray] = []
    for _ in range(max_len):
        ctx, weights, _ = K.attn_forward(
            np.ascontiguousarray(hs[-1]), enc_hs_c, enc_proj, mask_c,
            params["attn.W2"], params["attn.v"],
        )
        attn_rows.append(weights[0])
        x = np.ascontiguousarray(
            np.concatenate([params["tgt_emb"][np.array([token])], ctx], axis=1)
        )
        for k in range(cfg.num_layers):
            h_new, _, _, _ = K.gru_forward(x, hs[k], *_gate_args(params, f"dec.l{k}"))
            hs[k] = h_new
            x = h_new
        logits = hs[-1] @ params["out.W"] + params["out.b"]
        token = int(np.argmax(logits[0]))
        if token == EOS:
            break
        out_ids.append(token)
    attn = np.vstack(attn_rows[: len(out_ids) + 1]) if attn_rows else np.zeros((0, T))
    return out_ids, attn


def translate(
    params: ModelParams,
    sentence: str,
    src_vocab,
    tgt_vocab,
    max_len: int | None = None,
) -> tuple[str, np.ndarray]:
    """Translate raw text; returns (text, attention matrix)."""
    from ..tokenizer import decode as decode_ids
    from ..tokenizer import encode as encode_text

    ids = encode_text(sentence, src_vocab)
    out_ids, attn = translate_ids(params, ids, max_len=max_len)
    return decode_ids(out_ids, tgt_vocab), attn
