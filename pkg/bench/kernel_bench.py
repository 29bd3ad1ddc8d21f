#!/usr/bin/env python3
"""Benchmark the numba-compiled kernels against the pure-numpy fallback.

Runs each hot kernel (GRU forward/backward, attention forward/backward,
softmax cross-entropy) and a full forward+backward training step on
realistic shapes, timing both implementations in one process.

Usage: python3 bench/kernel_bench.py [--batch 64] [--hidden 128] [--steps 20]
"""

import argparse
import time

import numpy as np

from ffrkit.seq2seq import kernels as K


def timeit(fn, repeat=30):
    fn()  # warmup / compile
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn()
    return (time.perf_counter() - t0) / repeat


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--batch", type=int, default=64)
    ap.add_argument("--embed", type=int, default=128)
    ap.add_argument("--hidden", type=int, default=128)
    ap.add_argument("--attn", type=int, default=30)
    ap.add_argument("--steps", type=int, default=20, help="source length T")
    ap.add_argument("--vocab", type=int, default=4000)
    ap.add_argument("--repeat", type=int, default=30)
    args = ap.parse_args()

    B, E, H, A, T, V = (args.batch, args.embed, args.hidden, args.attn,
                        args.steps, args.vocab)
    rng = np.random.default_rng(0)
    x = rng.normal(size=(B, E))
    h = rng.normal(size=(B, H))
    gates = (rng.normal(size=(E, H)) * 0.1, rng.normal(size=(H, H)) * 0.1,
             rng.normal(size=H) * 0.1) * 3
    wz, uz, bz, wr, ur, br, wh, uh, bh = gates
    dh = rng.normal(size=(B, H))
    enc = rng.normal(size=(B, T, H))
    w1 = rng.normal(size=(H, A)) * 0.1
    w2 = rng.normal(size=(H, A)) * 0.1
    v = rng.normal(size=A) * 0.1
    enc_proj = np.ascontiguousarray((enc.reshape(-1, H) @ w1).reshape(B, T, A))
    mask = np.ones((B, T))
    logits = rng.normal(size=(B, V))
    targets = rng.integers(0, V, size=B).astype(np.int64)
    tmask = np.ones(B)

    _, z, r, hc = K._gru_forward(x, h, wz, uz, bz, wr, ur, br, wh, uh, bh)
    _, weights, u = K._attn_forward(h, enc, enc_proj, mask, w2, v)
    dctx = rng.normal(size=(B, H))

    cases = {
        "gru_forward": lambda f: f(x, h, wz, uz, bz, wr, ur, br, wh, uh, bh),
        "gru_backward": lambda f: f(dh, x, h, z, r, hc, wz, uz, wr, ur, wh, uh),
        "attn_forward": lambda f: f(h, enc, enc_proj, mask, w2, v),
        "attn_backward": lambda f: f(dctx, h, enc, weights, u, w1, w2, v),
        "softmax_xent": lambda f: f(logits, targets, tmask),
    }

    if not K.numba_enabled():
        print("numba is disabled (FFRKIT_NUMBA=0 or not installed); "
              "benchmarking the numpy path only.")

    print(f"shapes: B={B} E={E} H={H} A={A} T={T} V={V}  "
          f"({args.repeat} reps after warmup)\n")
    print(f"{'kernel':<15} {'numpy':>10} {'numba':>10} {'speedup':>8}")
    for name, call in cases.items():
        plain = getattr(K, f"_{name}")
        t_np = timeit(lambda: call(plain), args.repeat)
        if K.numba_enabled():
            jitted = getattr(K, name)
            t_nb = timeit(lambda: call(jitted), args.repeat)
            print(f"{name:<15} {t_np * 1e3:>8.3f}ms {t_nb * 1e3:>8.3f}ms "
                  f"{t_np / t_nb:>7.2f}x")
        else:
            print(f"{name:<15} {t_np * 1e3:>8.3f}ms {'-':>10} {'-':>8}")

    # full training step through the model layer (uses whichever path the
    # env flag selected at import time)
    from ffrkit.seq2seq import ModelConfig, backward, forward, init_model
    from ffrkit.tokenizer import pad_batch

    cfg = ModelConfig(src_vocab=V, tgt_vocab=V, embed_dim=E, hidden_dim=H,
                      attn_dim=A, seed=0)
    params = init_model(cfg)
    src = [[int(i) for i in rng.integers(4, V, size=T)] for _ in range(B)]
    tgt = [[1] + [int(i) for i in rng.integers(4, V, size=T)] + [2] for _ in range(B)]
    s, sm = pad_batch(src)
    t_, tm = pad_batch(tgt)

    def step():
        backward(forward(params, s, sm, t_, tm, 1.0, np.random.default_rng(0)))

    t_full = timeit(step, max(3, args.repeat // 5))
    path = "numba" if K.numba_enabled() else "numpy"
    print(f"\nfull fwd+bwd step ({path} path): {t_full * 1e3:.1f}ms")


if __name__ == "__main__":
    main()
