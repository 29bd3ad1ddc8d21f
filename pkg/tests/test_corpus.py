import pytest

from ffrkit.corpus import (
    CleanReport,
    Corpus,
    CorpusFormat,
    SentencePair,
    SplitSpec,
    clean,
    export,
    length_stats,
    load_parallel,
    split,
)
from ffrkit.errors import (
    EmptyCorpus,
    LineCountMismatch,
    MalformedRow,
    SpecMismatch,
)


def make_corpus(rows):
    return Corpus(tuple(SentencePair(i, s, t) for i, (s, t) in enumerate(rows)))


class TestLoad:
    def test_empty_file(self, tmp_path):
        f = tmp_path / "e.tsv"
        f.write_text("")
        assert len(load_parallel(f)) == 0

    def test_two_row_tsv(self, tmp_path):
        f = tmp_path / "c.tsv"
        f.write_text("a\tb\nc\td\n", encoding="utf-8")
        c = load_parallel(f)
        assert [(p.id, p.source, p.target) for p in c.pairs] == [(0, "a", "b"), (1, "c", "d")]

    def test_malformed_row(self, tmp_path):
        f = tmp_path / "bad.tsv"
        f.write_text("a\tb\tc\n", encoding="utf-8")
        with pytest.raises(MalformedRow):
            load_parallel(f)

    def test_paired_txt(self, tmp_path):
        s = tmp_path / "s.txt"
        t = tmp_path / "t.txt"
        s.write_text("un\ndeux\n", encoding="utf-8")
        t.write_text("one\ntwo\n", encoding="utf-8")
        c = load_parallel(s, CorpusFormat.PAIRED_TXT, target_path=t)
        assert len(c) == 2
        assert c.pairs[1].target == "two"

    def test_line_count_mismatch(self, tmp_path):
        s = tmp_path / "s.txt"
        t = tmp_path / "t.txt"
        s.write_text("un\ndeux\n", encoding="utf-8")
        t.write_text("one\n", encoding="utf-8")
        with pytest.raises(LineCountMismatch):
            load_parallel(s, CorpusFormat.PAIRED_TXT, target_path=t)

    def test_header_skip(self, tmp_path):
        f = tmp_path / "h.tsv"
        f.write_text("src\ttgt\na\tb\n", encoding="utf-8")
        assert len(load_parallel(f, skip_header=True)) == 1


class TestClean:
    def test_drop_empty(self):
        c = make_corpus([("", "bonjour"), ("ok", "fine")])
        out, rep = clean(c, ["drop_empty"])
        assert len(out) == 1
        assert rep.dropped_by_rule == {"drop_empty": 1}

    def test_dedup_keeps_first(self):
        c = make_corpus([("a b", "x y"), ("a  b", "x y"), ("c", "z")])
        out, rep = clean(c, ["drop_exact_duplicates"])
        assert len(out) == 2
        assert out.pairs[0].id == 0

    def test_length_ratio_fixture(self):
        # 100 pairs; 7 engineered to exceed ratio 3.0
        rows = []
        for i in range(100):
            if i % 15 == 0:  # i = 0,15,...,90 -> 7 violators
                rows.append(("w " * 8, "w"))
            else:
                rows.append(("a b c", "d e f"))
        # independent hand count of violators
        violators = sum(
            1 for s, t in rows
            if max(len(s.split()), len(t.split())) / min(len(s.split()), len(t.split())) > 3.0
        )
        assert violators == 7
        out, rep = clean(make_corpus(rows), ["drop_length_ratio"])
        assert rep.output_count == 93
        assert rep.dropped_by_rule == {"drop_length_ratio": 7}

    def test_report_accounts_for_every_drop(self):
        c = make_corpus([("", ""), ("123", "456"), ("dup", "dup"), ("dup", "dup"), ("ok ok", "da da")])
        out, rep = clean(c)
        assert rep.output_count == rep.input_count - sum(rep.dropped_by_rule.values())
        assert rep.output_count == len(out)

    def test_idempotent(self):
        c = make_corpus([("  a   b ", "x y"), ("a b", "xy"), ("", "q")])
        once, _ = clean(c)
        twice, rep = clean(once)
        assert twice.pairs == once.pairs
        assert rep.dropped_by_rule == {}

    def test_order_preserved(self):
        c = make_corpus([(f"s{i} s{i}", f"t{i} t{i}") for i in range(20)])
        out, _ = clean(c)
        assert [p.id for p in out.pairs] == list(range(20))

    def test_unknown_rule(self):
        with pytest.raises(ValueError):
            clean(make_corpus([("a", "b")]), ["no_such_rule"])


class TestLengthStats:
    def test_bucket_boundaries(self):
        c = make_corpus([("a b c d e", "x")])
        rep = length_stats(c)
        assert rep.source.very_short == 1
        c6 = make_corpus([("a b c d e f", "x")])
        assert length_stats(c6).source.short == 1

    def test_long_bucket_and_max(self):
        c = make_corpus([(" ".join(["w"] * 31), "x")])
        rep = length_stats(c)
        assert rep.source.long == 1
        assert rep.source.max_len == 31

    def test_engineered_fixture(self):
        lens = [2] * 3 + [8] * 2 + [20] * 4 + [40] * 1
        c = make_corpus([(" ".join(["w"] * n), " ".join(["v"] * n)) for n in lens])
        rep = length_stats(c)
        assert (rep.source.very_short, rep.source.short, rep.source.medium, rep.source.long) == (3, 2, 4, 1)
        assert rep.total == 10
        assert rep.source.total == rep.total
        assert rep.target.total == rep.total

    def test_bucket_sums_equal_total(self):
        import random

        rng = random.Random(5)
        c = make_corpus([
            (" ".join(["w"] * rng.randint(1, 60)), " ".join(["v"] * rng.randint(1, 60)))
            for _ in range(300)
        ])
        rep = length_stats(c)
        assert rep.source.total == 300
        assert rep.target.total == 300

    def test_empty(self):
        with pytest.raises(EmptyCorpus):
            length_stats(Corpus(()))


class TestSplit:
    def test_paper_counts(self):
        c = make_corpus([(f"s{i}", f"t{i}") for i in range(53975)])
        tr, va, te = split(c, SplitSpec(43719, 4858, 5398, seed=1))
        assert (len(tr), len(va), len(te)) == (43719, 4858, 5398)
        ids = sorted(p.id for part in (tr, va, te) for p in part.pairs)
        assert ids == list(range(53975))

    def test_degenerate_all_train(self):
        c = make_corpus([(f"s{i}", f"t{i}") for i in range(10)])
        tr, va, te = split(c, SplitSpec(1.0, 0.0, 0.0))
        assert (len(tr), len(va), len(te)) == (10, 0, 0)

    def test_determinism(self):
        c = make_corpus([(f"s{i}", f"t{i}") for i in range(100)])
        spec = SplitSpec(0.8, 0.1, 0.1, seed=42)
        a = split(c, spec)
        b = split(c, spec)
        for x, y in zip(a, b):
            assert x.pairs == y.pairs

    def test_shuffled(self):
        c = make_corpus([(f"s{i}", f"t{i}") for i in range(1000)])
        tr, _, _ = split(c, SplitSpec(0.9, 0.05, 0.05, seed=7))
        assert [p.id for p in tr.pairs] != list(range(len(tr)))

    def test_count_mismatch(self):
        c = make_corpus([(f"s{i}", f"t{i}") for i in range(10)])
        with pytest.raises(SpecMismatch):
            split(c, SplitSpec(5, 3, 3))
        with pytest.raises(SpecMismatch):
            split(c, SplitSpec(0.5, 0.1, 0.1))


class TestExport:
    def test_round_trip(self, tmp_path):
        c = make_corpus([("yí bo wa", "prends et viens"), ("hɔn", "porte")])
        f = tmp_path / "o.tsv"
        export(c, f)
        assert load_parallel(f).pairs == c.pairs

    def test_empty_round_trip(self, tmp_path):
        f = tmp_path / "empty.tsv"
        export(Corpus(()), f)
        assert len(load_parallel(f)) == 0

    def test_golden_bytes(self, tmp_path):
        c = make_corpus([(f"fon {i} ɖò", f"fr {i} é") for i in range(200)])
        f = tmp_path / "g.tsv"
        export(c, f)
        golden = "".join(f"fon {i} ɖò\tfr {i} é\n" for i in range(200)).encode("utf-8")
        assert f.read_bytes() == golden

    def test_paired_round_trip(self, tmp_path):
        c = make_corpus([("un", "one"), ("deux", "two")])
        s, t = tmp_path / "s.txt", tmp_path / "t.txt"
        export(c, s, CorpusFormat.PAIRED_TXT, target_path=t)
        back = load_parallel(s, CorpusFormat.PAIRED_TXT, target_path=t)
        assert back.pairs == c.pairs
