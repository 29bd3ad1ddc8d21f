"""Acceptance suite: one test per release criterion, at its stated tolerance.

Each test prints a PASS line on success so the suite doubles as a report:
run with  pytest tests/test_acceptance.py -v -s
"""

import math
import random
import time
import unicodedata

import numpy as np
import pytest

from ffrkit.corpus import Corpus, SentencePair, length_stats
from ffrkit.cms import CmsStore, replay
from ffrkit.metrics import Smoothing, bleu_corpus, bleu_sentence, cms_total, gleu_sentence
from ffrkit.seq2seq import (
    ModelConfig,
    TrainConfig,
    backward,
    forward,
    init_model,
    load_checkpoint,
    save_checkpoint,
    token_accuracy,
    train,
    translate_ids,
)
from ffrkit.textnorm import NormalizationForm, normalize, strip_marks
from ffrkit.tokenizer import EOS, SOS, build_vocab, encode, pad_batch

from oracles import bleu_corpus_oracle, bleu_sentence_oracle, gleu_sentence_oracle


def ok(msg):
    print(f"[PASS] {msg}")


class TestGradientSuite:
    def test_all_tensors_match_finite_differences(self):
        t0 = time.time()
        cfg = ModelConfig(src_vocab=7, tgt_vocab=7, embed_dim=4,
                          hidden_dim=3, attn_dim=2, seed=1)
        params = init_model(cfg)
        src, sm = pad_batch([[4, 5, 6], [5, 4]])
        tgt, tm = pad_batch([[SOS, 6, 4, 5, EOS], [SOS, 4, EOS]])

        def loss_of():
            return forward(params, src, sm, tgt, tm, teacher_forcing=1.0,
                           rng=np.random.default_rng(0)).loss

        grads = backward(forward(params, src, sm, tgt, tm, 1.0,
                                 np.random.default_rng(0)))
        eps = 1e-4
        worst_name, worst = None, 0.0
        for name, arr in params.tensors.items():
            fd = np.zeros_like(arr)
            it = np.nditer(arr, flags=["multi_index"])
            for _ in it:
                idx = it.multi_index
                old = arr[idx]
                arr[idx] = old + eps
                lp = loss_of()
                arr[idx] = old - eps
                lm = loss_of()
                arr[idx] = old
                fd[idx] = (lp - lm) / (2 * eps)
            denom = np.maximum(np.abs(fd), np.abs(grads[name]))
            denom[denom < 1e-8] = 1e-8
            rel = float(np.max(np.abs(fd - grads[name]) / denom))
            assert rel < 1e-3, f"{name}: rel error {rel}"
            if rel > worst:
                worst_name, worst = name, rel
        elapsed = time.time() - t0
        assert elapsed < 30.0
        ok(f"gradient suite: all {len(params.tensors)} tensors < 1e-3 "
           f"(worst {worst_name} {worst:.2e}) in {elapsed:.1f}s")


class TestOverfitSuite:
    def test_copy_task_token_accuracy(self):
        t0 = time.time()
        rng = np.random.default_rng(7)
        vocab = 20
        pairs = []
        for _ in range(32):
            toks = [int(i) for i in rng.integers(4, vocab, size=int(rng.integers(3, 7)))]
            pairs.append((toks, [SOS] + toks + [EOS]))
        cfg = ModelConfig(src_vocab=vocab, tgt_vocab=vocab, embed_dim=32,
                          hidden_dim=32, attn_dim=16, seed=0)
        params = init_model(cfg)
        tc = TrainConfig(epochs=300, batch_size=8, learning_rate=3e-3,
                         seed=0, compute_valid_bleu=False)
        best, hist = train(params, pairs, [], tc)
        acc = token_accuracy(best, pairs)
        elapsed = time.time() - t0
        assert len(hist) <= 300
        assert acc >= 0.99, f"token accuracy {acc}"
        assert elapsed < 300.0
        ok(f"overfit suite: copy-task accuracy {acc:.3f} after {len(hist)} "
           f"epochs in {elapsed:.1f}s")


class TestMetricOracleSuite:
    def test_metrics_match_brute_force(self):
        rng = random.Random(99)
        vocab = ["a", "b", "c", "d", "e", "the", "cat", "tó", "tò"]

        def sent():
            return [rng.choice(vocab) for _ in range(rng.randint(1, 7))]

        for _ in range(200):
            ref, hyp = sent(), sent()
            assert bleu_sentence(ref, hyp) == pytest.approx(
                bleu_sentence_oracle(ref, hyp), abs=1e-12)
            assert bleu_corpus([ref], [hyp]).score == pytest.approx(
                bleu_corpus_oracle([ref], [hyp]), abs=1e-12)
            assert gleu_sentence(ref, hyp).score == pytest.approx(
                gleu_sentence_oracle(ref, hyp), abs=1e-12)

        identity = "le chat est sur le tapis".split()
        assert bleu_sentence(identity, identity) == 1.0
        assert bleu_corpus([identity], [identity]).score == 1.0
        assert gleu_sentence(identity, identity).score == 1.0
        assert bleu_sentence(["a", "b"], ["x", "y"],
                             smoothing=Smoothing.NONE) == 0.0
        assert gleu_sentence(["a", "b"], ["x", "y"]).score == 0.0

        ref = "the cat is on the mat".split()
        hyp = ["the"] * 7
        assert bleu_corpus([ref], [hyp]).precisions[0] == 2 / 7
        ok("metric oracle suite: 200 random pairs at 1e-12, identity=1, "
           "disjoint=0, clipped p1=2/7")


HOMOGRAPH_BASES = ["to", "gbe", "su", "do", "we", "ka"]
ACCENTS = ["́", "̀"]  # acute, grave


def build_homograph_corpus(rng):
    """500 word-for-word pairs; ~30% of source tokens are diacritic
    homographs whose accent decides the target word."""
    plain = [f"w{i}" for i in range(14)]
    pairs = []
    for _ in range(500):
        n = rng.randint(3, 5)
        src, tgt = [], []
        for _ in range(n):
            if rng.random() < 0.30:
                base = rng.choice(HOMOGRAPH_BASES)
                k = rng.randrange(2)
                src.append(normalize(base + ACCENTS[k], NormalizationForm.NFC))
                tgt.append(f"{base}_sense{k}")
            else:
                w = rng.choice(plain)
                src.append(w)
                tgt.append(f"fr_{w}")
        pairs.append((" ".join(src), " ".join(tgt)))
    return pairs


def bleu_of_run(pairs, seed):
    train_rows, test_rows = pairs[:400], pairs[400:]
    src_vocab = build_vocab([s for s, _ in train_rows])
    tgt_vocab = build_vocab([t for _, t in train_rows])
    enc = lambda rows: [
        (encode(s, src_vocab), encode(t, tgt_vocab, wrap=True)) for s, t in rows
    ]
    cfg = ModelConfig(src_vocab=len(src_vocab), tgt_vocab=len(tgt_vocab),
                      embed_dim=24, hidden_dim=24, attn_dim=8, seed=seed)
    params = init_model(cfg)
    tc = TrainConfig(epochs=25, batch_size=32, learning_rate=5e-3,
                     seed=seed, compute_valid_bleu=False)
    best, _ = train(params, enc(train_rows), [], tc)
    refs, hyps = [], []
    for src_ids, tgt_ids in enc(test_rows):
        out, _ = translate_ids(best, src_ids, max_len=10)
        refs.append([str(i) for i in tgt_ids if i not in (SOS, EOS)])
        hyps.append([str(i) for i in out])
    return bleu_corpus(refs, hyps).score


class TestDiacriticEncodingDirection:
    def test_nfc_beats_stripped_on_homograph_corpus(self):
        t0 = time.time()
        rng = random.Random(123)
        base_pairs = build_homograph_corpus(rng)
        stripped_pairs = [(strip_marks(s), t) for s, t in base_pairs]
        wins = 0
        for seed in range(5):
            nfc_bleu = bleu_of_run(base_pairs, seed)
            strip_bleu = bleu_of_run(stripped_pairs, seed)
            if nfc_bleu > strip_bleu:
                wins += 1
        elapsed = time.time() - t0
        assert wins >= 4, f"NFC won only {wins}/5 seeds"
        assert elapsed < 900.0
        ok(f"DE direction check: NFC > stripped on {wins}/5 seeds "
           f"in {elapsed:.0f}s")


class TestNormalizationSuite:
    def test_fuzz_idempotence_and_bridge(self):
        rng = random.Random(2024)
        pools = [
            "abcdefghijklmnopqrstuvwxyz",
            "̀́̂̃̄̆̈",
            "éèêôòóâäîïûüç",
            "ɔɛƆƐɖƉŋ",
            "ḍọẹṅ",
            " .,!?'-",
            "あ中Фא\U0001F600",
        ]

        def rand_string():
            n = rng.randint(0, 14)
            return "".join(rng.choice(rng.choice(pools)) for _ in range(n))

        forms = (NormalizationForm.NFC, NormalizationForm.NFD,
                 NormalizationForm.NFD_STRIP_MARKS)
        for _ in range(100_000):
            s = rand_string()
            nfd = normalize(s, NormalizationForm.NFD)
            assert normalize(nfd, NormalizationForm.NFC) == normalize(
                s, NormalizationForm.NFC)
            f = forms[rng.randrange(3)]
            once = normalize(s, f)
            assert normalize(once, f) == once

        family = ["tó", "tò", "tô"]
        assert {normalize(v, NormalizationForm.NFD_STRIP_MARKS) for v in family} == {"to"}
        assert len({normalize(v, NormalizationForm.NFC) for v in family}) == 3
        ok("normalization suite: idempotence + NFC/NFD bridge on 1e5 fuzz "
           "strings; to-family collapses under strip, distinct under NFC")


class TestLengthBucketMethodology:
    def test_fixture_hand_counts(self):
        lens_src = [1, 5, 6, 10, 11, 30, 31, 44, 3, 7]
        lens_tgt = [2, 2, 8, 9, 15, 25, 35, 40, 12, 5]
        pairs = tuple(
            SentencePair(i, " ".join(["s"] * a), " ".join(["t"] * b))
            for i, (a, b) in enumerate(zip(lens_src, lens_tgt))
        )
        rep = length_stats(Corpus(pairs))
        # hand counts for the fixture above
        assert (rep.source.very_short, rep.source.short,
                rep.source.medium, rep.source.long) == (3, 3, 2, 2)
        assert (rep.target.very_short, rep.target.short,
                rep.target.medium, rep.target.long) == (3, 2, 3, 2)
        assert rep.source.max_len == 44 and rep.target.max_len == 40

        rng = random.Random(5)
        for _ in range(20):
            n = rng.randint(1, 200)
            pairs = tuple(
                SentencePair(i, " ".join(["s"] * rng.randint(1, 80)),
                             " ".join(["t"] * rng.randint(1, 80)))
                for i in range(n)
            )
            rep = length_stats(Corpus(pairs))
            assert rep.source.total == n
            assert rep.target.total == n
        ok("length buckets: fixture hand counts exact; per-side bucket sums "
           "equal corpus size on 20 random corpora")


class TestCmsArithmetic:
    def test_grid_exact(self):
        for i in range(11):
            for j in range(11):
                t, tr = i / 10, j / 10
                got = cms_total(t, tr, 0.7)
                assert abs(got - (0.7 * t + 0.3 * tr)) <= 1e-15
        ok("CMS arithmetic: 11x11 grid exact to 1e-15 at alpha=0.7")

    def test_five_annotator_averaging(self):
        store = CmsStore()
        tid = store.create_task(
            [{"id": "0", "source": "s", "prediction": "p", "reference": "r"}],
            alpha=0.7,
            annotators=["a1", "a2", "a3", "a4", "a5"],
        )
        scores = [(0.9, 0.8), (1.0, 1.0), (0.5, 0.7), (0.8, 0.9), (0.6, 0.4)]
        for (t, tr), ann in zip(scores, ["a1", "a2", "a3", "a4", "a5"]):
            store.submit_score(tid, ann, "0", "P1", t)
        for (t, tr), ann in zip(scores, ["a1", "a2", "a3", "a4", "a5"]):
            store.submit_score(tid, ann, "0", "P2", tr)
        want = sum(0.7 * t + 0.3 * tr for t, tr in scores) / 5
        got = store.report(tid)["items"][0]["cms"]
        assert got == pytest.approx(want, abs=1e-12)
        ok("CMS arithmetic: five-annotator averaging matches hand computation")

    def test_replay_equals_live_1000_interleavings(self, tmp_path):
        t0 = time.time()
        rng = random.Random(777)
        items = [{"id": str(i), "source": f"s{i}", "prediction": f"p{i}",
                  "reference": f"r{i}"} for i in range(2)]
        for trial in range(1000):
            log = tmp_path / f"t{trial}.jsonl"
            store = CmsStore(log_path=log)
            tid = store.create_task(items, annotators=["a", "b"])
            queues = {
                a: [(str(i), "P1", round(rng.random(), 3)) for i in range(2)]
                + [(str(i), "P2", round(rng.random(), 3)) for i in range(2)]
                for a in ("a", "b")
            }
            while any(queues.values()):
                a = rng.choice([x for x, q in queues.items() if q])
                item, phase, score = queues[a].pop(0)
                store.submit_score(tid, a, item, phase, score)
            assert replay(log).snapshot() == store.snapshot()
        ok(f"CMS replay: 1000 randomized interleavings replay to live state "
           f"in {time.time() - t0:.1f}s")


class TestCheckpointRoundTrip:
    def test_translations_and_bytes(self, tmp_path):
        rng = np.random.default_rng(3)
        vocab = 15
        pairs = []
        for _ in range(24):
            toks = [int(i) for i in rng.integers(4, vocab, size=int(rng.integers(2, 5)))]
            pairs.append((toks, [SOS] + toks + [EOS]))
        cfg = ModelConfig(src_vocab=vocab, tgt_vocab=vocab, embed_dim=16,
                          hidden_dim=16, attn_dim=8, seed=2)
        params = init_model(cfg)
        tc = TrainConfig(epochs=60, batch_size=8, learning_rate=3e-3,
                         seed=2, compute_valid_bleu=False)
        best, _ = train(params, pairs, [], tc)

        f1, f2 = tmp_path / "m1.ckpt", tmp_path / "m2.ckpt"
        save_checkpoint(best, f1)
        loaded = load_checkpoint(f1)
        probes = [p[0] for p in pairs[:10]]
        for ids in probes:
            a, _ = translate_ids(best, ids, max_len=8)
            b, _ = translate_ids(loaded, ids, max_len=8)
            assert a == b
        save_checkpoint(loaded, f2)
        assert f1.read_bytes() == f2.read_bytes()
        ok("checkpoint round-trip: identical translations on 10 probes, "
           "bitwise-equal tensor bytes")
