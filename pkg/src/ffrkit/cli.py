"""Command-line entry point.

Subcommands: clean, stats, normalize, split, vocab, train, translate,
eval, cms. Exit codes: 0 success, 1 validation error, 2 I/O error.
--json switches reports to machine-readable output.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import random
import sys
from pathlib import Path

from . import corpus as corpus_mod
from . import metrics as metrics_mod
from . import textnorm
from . import tokenizer as tok_mod
from .corpus import CorpusFormat, SplitSpec
from .errors import FfrkitError, InvalidUtf8, IoError
from .textnorm import NormalizationForm

IO_ERRORS = (IoError, InvalidUtf8, FileNotFoundError, OSError)


def _emit(args, payload: dict, human: str) -> None:
    if getattr(args, "json", False):
        print(json.dumps(payload, ensure_ascii=False, sort_keys=True))
    elif not getattr(args, "quiet", False):
        print(human)


def _load_tsv(path: str, skip_header: bool = False):
    return corpus_mod.load_parallel(path, CorpusFormat.TSV, skip_header=skip_header)


# --- subcommands ---------------------------------------------------------


def cmd_clean(args) -> int:
    c = _load_tsv(args.infile, args.header)
    rules = args.rules.split(",") if args.rules else corpus_mod.DEFAULT_RULES
    cleaned, report = corpus_mod.clean(c, rules, max_length_ratio=args.max_ratio)
    corpus_mod.export(cleaned, args.outfile)
    payload = {
        "input_count": report.input_count,
        "output_count": report.output_count,
        "dropped_by_rule": report.dropped_by_rule,
    }
    _emit(args, payload,
          f"kept {report.output_count}/{report.input_count}; drops: {report.dropped_by_rule}")
    return 0


def cmd_stats(args) -> int:
    c = _load_tsv(args.infile, args.header)
    rep = corpus_mod.length_stats(c)
    payload = {
        "total": rep.total,
        "source": dataclasses.asdict(rep.source),
        "target": dataclasses.asdict(rep.target),
    }
    human = (
        f"total {rep.total}\n"
        f"source: very_short={rep.source.very_short} short={rep.source.short} "
        f"medium={rep.source.medium} long={rep.source.long} max_len={rep.source.max_len}\n"
        f"target: very_short={rep.target.very_short} short={rep.target.short} "
        f"medium={rep.target.medium} long={rep.target.long} max_len={rep.target.max_len}"
    )
    _emit(args, payload, human)
    return 0


_FORMS = {
    "nfc": NormalizationForm.NFC,
    "nfd": NormalizationForm.NFD,
    "strip": NormalizationForm.NFD_STRIP_MARKS,
}


def cmd_normalize(args) -> int:
    if args.families:
        c = _load_tsv(args.infile, args.header)
        fams = textnorm.find_diacritic_families(
            c, side=args.side, fold_open_vowels=args.fold_open_vowels
        )
        lines = [
            json.dumps(
                {"skeleton": f.skeleton, "variants": sorted(f.variants),
                 "counts": f.counts, "total": f.total},
                ensure_ascii=False, sort_keys=True,
            )
            for f in fams
        ]
        out = "\n".join(lines) + ("\n" if lines else "")
        if args.outfile:
            Path(args.outfile).write_text(out, encoding="utf-8")
        else:
            sys.stdout.write(out)
        return 0
    form = _FORMS[args.form]
    text = Path(args.infile).read_text(encoding="utf-8")
    normalized = "\n".join(textnorm.normalize(line, form) for line in text.split("\n"))
    Path(args.outfile).write_text(normalized, encoding="utf-8")
    return 0


def cmd_split(args) -> int:
    c = _load_tsv(args.infile, args.header)
    spec = SplitSpec(args.train, args.valid, args.test, seed=args.seed)
    tr, va, te = corpus_mod.split(c, spec)
    for part, name in ((tr, "train"), (va, "valid"), (te, "test")):
        corpus_mod.export(part, f"{args.out_prefix}.{name}.tsv")
    _emit(args, {"train": len(tr), "valid": len(va), "test": len(te)},
          f"train {len(tr)}  valid {len(va)}  test {len(te)}")
    return 0


def cmd_vocab(args) -> int:
    c = _load_tsv(args.infile, args.header)
    sentences = [p.source if args.side == "source" else p.target for p in c.pairs]
    v = tok_mod.build_vocab(
        sentences, min_freq=args.min_freq, max_size=args.max_size,
        lowercase=not args.no_lower,
    )
    v.save(args.outfile)
    _emit(args, {"size": len(v)}, f"vocabulary of {len(v)} tokens -> {args.outfile}")
    return 0


def cmd_train(args) -> int:
    from .seq2seq import (
        ModelConfig, Optimizer, TrainConfig, init_model, save_checkpoint, train,
    )

    cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
    train_c = _load_tsv(cfg["train"])
    valid_c = _load_tsv(cfg["valid"]) if cfg.get("valid") else None

    vocab_cfg = cfg.get("vocab", {})
    lowercase = vocab_cfg.get("lowercase", True)
    src_v = tok_mod.build_vocab(
        [p.source for p in train_c.pairs],
        min_freq=vocab_cfg.get("min_freq", 1),
        max_size=vocab_cfg.get("max_size"), lowercase=lowercase,
    )
    tgt_v = tok_mod.build_vocab(
        [p.target for p in train_c.pairs],
        min_freq=vocab_cfg.get("min_freq", 1),
        max_size=vocab_cfg.get("max_size"), lowercase=lowercase,
    )

    def encode_pairs(c):
        return [
            (tok_mod.encode(p.source, src_v), tok_mod.encode(p.target, tgt_v, wrap=True))
            for p in c.pairs
        ]

    model_cfg = ModelConfig(
        src_vocab=len(src_v), tgt_vocab=len(tgt_v), **cfg.get("model", {})
    )
    t = cfg.get("training", {})
    if "optimizer" in t:
        t = dict(t, optimizer=Optimizer(t["optimizer"]))
    train_cfg = TrainConfig(**t)

    params = init_model(model_cfg)
    best, history = train(
        params, encode_pairs(train_c),
        encode_pairs(valid_c) if valid_c else [], train_cfg,
    )

    out = cfg.get("out", {})
    ckpt = out.get("checkpoint", "model.ckpt")
    save_checkpoint(best, ckpt)
    src_v.save(out.get("src_vocab", "src_vocab.json"))
    tgt_v.save(out.get("tgt_vocab", "tgt_vocab.json"))
    hist_payload = [dataclasses.asdict(e) for e in history.epochs]
    if out.get("history"):
        Path(out["history"]).write_text(json.dumps(hist_payload), encoding="utf-8")
    last = history.epochs[-1]
    _emit(args, {"checkpoint": ckpt, "epochs": len(history), "history": hist_payload},
          f"trained {len(history)} epochs; final train loss {last.train_loss:.4f} -> {ckpt}")
    return 0


def cmd_translate(args) -> int:
    from .seq2seq import load_checkpoint, translate

    params = load_checkpoint(args.checkpoint)
    src_v = tok_mod.Vocabulary.load(args.src_vocab)
    tgt_v = tok_mod.Vocabulary.load(args.tgt_vocab)

    if args.text is not None:
        lines = [args.text]
    else:
        lines = Path(args.infile).read_text(encoding="utf-8").splitlines()
    outputs = [translate(params, line, src_v, tgt_v, max_len=args.max_len)[0]
               for line in lines]
    if args.outfile:
        Path(args.outfile).write_text("\n".join(outputs) + "\n", encoding="utf-8")
    else:
        for o in outputs:
            print(o)
    return 0


def cmd_eval(args) -> int:
    refs = Path(args.refs).read_text(encoding="utf-8").splitlines()
    hyps = Path(args.hyps).read_text(encoding="utf-8").splitlines()
    if len(refs) != len(hyps):
        raise FfrkitError(f"eval: {len(refs)} refs vs {len(hyps)} hyps")
    ref_toks = [tok_mod.tokenize(r, lowercase=not args.no_lower) for r in refs]
    hyp_toks = [tok_mod.tokenize(h, lowercase=not args.no_lower) for h in hyps]

    scale = 100.0 if args.x100 else 1.0
    if args.metric == "bleu":
        rep = metrics_mod.bleu_corpus(ref_toks, hyp_toks)
        payload = {
            "metric": "bleu", "score": rep.score * scale,
            "details": {
                "precisions": list(rep.precisions),
                "brevity_penalty": rep.brevity_penalty,
                "hyp_len": rep.hyp_len, "ref_len": rep.ref_len,
            },
        }
    elif args.metric == "sentence-bleu":
        scores = [
            metrics_mod.bleu_sentence(r, h) if r else 0.0
            for r, h in zip(ref_toks, hyp_toks)
        ]
        payload = {
            "metric": "sentence-bleu",
            "score": (sum(scores) / len(scores)) * scale if scores else 0.0,
            "details": {"sentences": [s * scale for s in scores]},
        }
    else:
        reports = [
            metrics_mod.gleu_sentence(r, h) if r else None
            for r, h in zip(ref_toks, hyp_toks)
        ]
        scores = [r.score if r else 0.0 for r in reports]
        payload = {
            "metric": "gleu",
            "score": (sum(scores) / len(scores)) * scale if scores else 0.0,
            "details": {"sentences": [s * scale for s in scores]},
        }
    print(json.dumps(payload, ensure_ascii=False, sort_keys=True))
    return 0


def cmd_cms(args) -> int:
    from .cms import CmsStore, replay

    if args.cms_cmd == "serve":
        from .cms import serve

        static = args.ui_dir if args.ui_dir else None
        serve(CmsStore(log_path=args.store), host=args.host, port=args.port,
              static_dir=static)
        return 0

    if args.cms_cmd == "create":
        items = json.loads(Path(args.items).read_text(encoding="utf-8"))
        annotators = args.annotators.split(",") if args.annotators else None
        store = CmsStore(log_path=args.store)
        tid = store.create_task(items, alpha=args.alpha, annotators=annotators)
        _emit(args, {"task": tid}, f"created task {tid}")
        return 0

    if args.cms_cmd == "report":
        store = replay(args.store)
        rep = store.report(args.task)
        if getattr(args, "json", False):
            print(json.dumps(rep, ensure_ascii=False, sort_keys=True))
        else:
            cms = rep["task_cms"]
            print(f"task {rep['task']}  alpha={rep['alpha']}  "
                  f"CMS={cms if cms is not None else 'n/a'}  complete={rep['complete']}")
            for it in rep["items"]:
                print(f"  item {it['item']}: cms={it['cms']} complete={it['complete']}")
        return 0

    # sample: draw items for a task from a test TSV + hypothesis file
    c = _load_tsv(args.infile)
    hyps = Path(args.hyps).read_text(encoding="utf-8").splitlines()
    if len(hyps) != len(c):
        raise FfrkitError(f"cms sample: {len(c)} pairs vs {len(hyps)} hypotheses")
    idx = list(range(len(c)))
    random.Random(args.seed).shuffle(idx)
    chosen = sorted(idx[: args.n])
    items = [
        {"id": str(i), "source": c.pairs[i].source,
         "prediction": hyps[i], "reference": c.pairs[i].target}
        for i in chosen
    ]
    Path(args.outfile).write_text(
        json.dumps(items, ensure_ascii=False, indent=1), encoding="utf-8"
    )
    _emit(args, {"count": len(items), "out": args.outfile},
          f"sampled {len(items)} items -> {args.outfile}")
    return 0


# --- parser --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ffrkit", description=__doc__)
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--quiet", action="store_true")
    p.add_argument("--seed", type=int, default=0, help="global default seed")
    sub = p.add_subparsers(dest="cmd", required=True)

    def tsv_in(sp):
        sp.add_argument("--in", dest="infile", required=True)
        sp.add_argument("--header", action="store_true", help="skip one header line")

    sp = sub.add_parser("clean", help="apply the cleaning rule catalogue")
    tsv_in(sp)
    sp.add_argument("--out", dest="outfile", required=True)
    sp.add_argument("--rules", help="comma-separated rule names (default: full catalogue)")
    sp.add_argument("--max-ratio", type=float, default=3.0)
    sp.set_defaults(fn=cmd_clean)

    sp = sub.add_parser("stats", help="length-bucket report")
    tsv_in(sp)
    sp.set_defaults(fn=cmd_stats)

    sp = sub.add_parser("normalize", help="Unicode normalization / diacritic families")
    tsv_in(sp)
    sp.add_argument("--out", dest="outfile")
    sp.add_argument("--form", choices=sorted(_FORMS), default="nfc")
    sp.add_argument("--families", action="store_true",
                    help="emit diacritic-family report (JSON Lines) from a TSV corpus")
    sp.add_argument("--side", choices=["source", "target"], default="source")
    sp.add_argument("--fold-open-vowels", action="store_true")
    sp.set_defaults(fn=cmd_normalize)

    sp = sub.add_parser("split", help="seeded train/valid/test split")
    tsv_in(sp)
    sp.add_argument("--train", type=float, required=True)
    sp.add_argument("--valid", type=float, required=True)
    sp.add_argument("--test", type=float, required=True)
    sp.add_argument("--split-seed", dest="seed", type=int, default=0)
    sp.add_argument("--out-prefix", required=True)
    sp.set_defaults(fn=cmd_split)

    sp = sub.add_parser("vocab", help="build a vocabulary file")
    tsv_in(sp)
    sp.add_argument("--side", choices=["source", "target"], default="source")
    sp.add_argument("--min-freq", type=int, default=1)
    sp.add_argument("--max-size", type=int)
    sp.add_argument("--no-lower", action="store_true")
    sp.add_argument("--out", dest="outfile", required=True)
    sp.set_defaults(fn=cmd_vocab)

    sp = sub.add_parser("train", help="train a model from a JSON config")
    sp.add_argument("--config", required=True)
    sp.set_defaults(fn=cmd_train)

    sp = sub.add_parser("translate", help="greedy decode with a checkpoint")
    sp.add_argument("--checkpoint", required=True)
    sp.add_argument("--src-vocab", required=True)
    sp.add_argument("--tgt-vocab", required=True)
    sp.add_argument("--in", dest="infile")
    sp.add_argument("--text")
    sp.add_argument("--out", dest="outfile")
    sp.add_argument("--max-len", type=int, default=None)
    sp.set_defaults(fn=cmd_translate)

    sp = sub.add_parser("eval", help="BLEU / GLEU evaluation")
    sp.add_argument("--metric", choices=["bleu", "sentence-bleu", "gleu"], default="bleu")
    sp.add_argument("--refs", required=True)
    sp.add_argument("--hyps", required=True)
    sp.add_argument("--x100", action="store_true", help="report scores scaled by 100")
    sp.add_argument("--no-lower", action="store_true")
    sp.set_defaults(fn=cmd_eval)

    sp = sub.add_parser("cms", help="human-evaluation service and reports")
    cms_sub = sp.add_subparsers(dest="cms_cmd", required=True)

    s = cms_sub.add_parser("serve")
    s.add_argument("--port", type=int, default=8700)
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--store", required=True, help="event-log path (JSON Lines)")
    s.add_argument("--ui-dir", help="serve the annotator UI from this directory")
    s.set_defaults(fn=cmd_cms)

    s = cms_sub.add_parser("create")
    s.add_argument("--items", required=True, help="JSON list of items")
    s.add_argument("--alpha", type=float, default=0.7)
    s.add_argument("--annotators", help="comma-separated annotator ids (default 5)")
    s.add_argument("--store", required=True)
    s.set_defaults(fn=cmd_cms)

    s = cms_sub.add_parser("report")
    s.add_argument("--task", required=True)
    s.add_argument("--store", required=True)
    s.set_defaults(fn=cmd_cms)

    s = cms_sub.add_parser("sample")
    s.add_argument("--in", dest="infile", required=True, help="test TSV")
    s.add_argument("--hyps", required=True)
    s.add_argument("--n", type=int, default=100)
    s.add_argument("--sample-seed", dest="seed", type=int, default=0)
    s.add_argument("--out", dest="outfile", required=True)
    s.set_defaults(fn=cmd_cms)

    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except IO_ERRORS as e:
        print(f"{args.cmd}: I/O error: {e}", file=sys.stderr)
        return 2
    except (FfrkitError, ValueError) as e:
        print(f"{args.cmd}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
