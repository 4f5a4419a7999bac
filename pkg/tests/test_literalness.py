import random
from itertools import combinations

import pytest

from litmetrics.alignment import AlignmentSet
from litmetrics.errors import MetricsError
from litmetrics.literalness import (
    SegmentMetrics,
    build_report,
    corpus_metrics,
    nm_crossings,
    nm_deviation,
    segment_metrics,
    unaligned_source_words,
)


# -- independent oracles ----------------------------------------------------

def usw_oracle(a, mask=None):
    """Per-index scan: an index is unaligned when no link leaves it."""
    count = 0
    denom = 0
    for i in range(a.src_len):
        if mask is not None and mask[i]:
            continue
        denom += 1
        if not any(li == i for li, _ in a.links):
            count += 1
    return count, (100.0 * count / denom if denom else 0.0)


def crossings_oracle(a):
    """Exhaustive enumeration over unordered link pairs."""
    pairs = list(combinations(sorted(a.links), 2))
    if not pairs:
        return 0.0
    crossing = sum(
        1 for (i, j), (i2, j2) in pairs if (i - i2) * (j - j2) < 0
    )
    return 100.0 * crossing / len(pairs)


def random_alignment(rng, max_len=8):
    src_len = rng.randint(1, max_len)
    tgt_len = rng.randint(1, max_len)
    pool = [(i, j) for i in range(src_len) for j in range(tgt_len)]
    n = rng.randint(0, len(pool))
    return AlignmentSet(frozenset(rng.sample(pool, n)), src_len, tgt_len)


def aset(pairs, src_len, tgt_len):
    return AlignmentSet(frozenset(pairs), src_len, tgt_len)


class TestUSW:
    def test_basic_counts(self):
        a = aset([(0, 0), (1, 1), (3, 2)], 5, 4)
        assert unaligned_source_words(a) == (2, 40.0)

    def test_fully_linked(self):
        a = aset([(0, 0), (1, 0)], 2, 1)
        assert unaligned_source_words(a) == (0, 0.0)

    def test_empty_source_rejected(self):
        with pytest.raises(MetricsError, match="empty source"):
            unaligned_source_words(aset([], 0, 3))

    def test_content_tokens_denominator(self):
        # "the cat sat" with "the" a stopword and "sat" unaligned
        a = aset([(1, 0)], 3, 2)
        mask = [True, False, False]
        assert unaligned_source_words(a, "content_tokens", mask) == (1, 50.0)

    def test_content_tokens_requires_mask(self):
        with pytest.raises(MetricsError, match="mask"):
            unaligned_source_words(aset([], 2, 2), "content_tokens")

    def test_all_stopwords_degenerate(self):
        a = aset([], 2, 2)
        assert unaligned_source_words(a, "content_tokens", [True, True]) == (0, 0.0)

    def test_matches_oracle_on_random_inputs(self):
        rng = random.Random(0)
        for _ in range(300):
            a = random_alignment(rng)
            assert unaligned_source_words(a) == usw_oracle(a)

    def test_zero_iff_all_covered(self):
        rng = random.Random(1)
        for _ in range(100):
            a = random_alignment(rng)
            _, pct = unaligned_source_words(a)
            covered = a.aligned_source_indices() == set(range(a.src_len))
            assert (pct == 0.0) == covered


class TestNMDeviation:
    def test_identity_diagonal(self):
        assert nm_deviation(aset([(0, 0), (1, 1), (2, 2)], 3, 3)) == 0.0

    def test_full_reversal(self):
        # (|0/2 - 2/2| + |1/2 - 1/2| + |2/2 - 0/2|) / 3 = 2/3
        a = aset([(0, 2), (1, 1), (2, 0)], 3, 3)
        assert nm_deviation(a) == pytest.approx(66.67, abs=0.01)

    def test_empty_is_zero(self):
        assert nm_deviation(aset([], 3, 3)) == 0.0

    def test_single_token_sentences_defined(self):
        assert nm_deviation(aset([(0, 0)], 1, 1)) == 0.0

    def test_rectangular_diagonal_is_zero(self):
        # Corner links normalize onto the diagonal regardless of shape.
        a = aset([(0, 0), (2, 4)], 3, 5)
        assert nm_deviation(a) == 0.0


class TestNMCrossings:
    def test_monotone(self):
        assert nm_crossings(aset([(0, 0), (1, 1), (2, 2)], 3, 3)) == 0.0

    def test_full_reversal(self):
        assert nm_crossings(aset([(0, 2), (1, 1), (2, 0)], 3, 3)) == 100.0

    def test_one_of_three_pairs(self):
        a = aset([(0, 0), (1, 2), (2, 1)], 3, 3)
        assert nm_crossings(a) == pytest.approx(33.33, abs=0.01)

    def test_fewer_than_two_links(self):
        assert nm_crossings(aset([], 2, 2)) == 0.0
        assert nm_crossings(aset([(0, 0)], 2, 2)) == 0.0

    def test_shared_index_does_not_cross(self):
        assert nm_crossings(aset([(0, 0), (0, 1)], 1, 2)) == 0.0
        assert nm_crossings(aset([(0, 0), (1, 0)], 2, 1)) == 0.0

    def test_matches_oracle_on_random_inputs(self):
        rng = random.Random(2)
        for _ in range(300):
            a = random_alignment(rng)
            assert nm_crossings(a) == crossings_oracle(a)

    def test_invariant_under_transpose(self):
        rng = random.Random(3)
        for _ in range(100):
            a = random_alignment(rng)
            assert nm_crossings(a.transpose()) == nm_crossings(a)

    def test_depends_only_on_the_link_set(self):
        # Stripping stopword links and building a fresh set from the
        # survivors give identical NM values: the metric is a pure function
        # of (links, lengths).
        from litmetrics.alignment import strip_stopword_links

        rng = random.Random(8)
        for _ in range(50):
            a = random_alignment(rng)
            src_mask = [rng.random() < 0.3 for _ in range(a.src_len)]
            tgt_mask = [rng.random() < 0.3 for _ in range(a.tgt_len)]
            stripped = strip_stopword_links(a, src_mask, tgt_mask)
            rebuilt = AlignmentSet(frozenset(stripped.links), a.src_len, a.tgt_len)
            assert nm_crossings(stripped) == nm_crossings(rebuilt)
            assert nm_deviation(stripped) == nm_deviation(rebuilt)

    def test_source_reversal_complements_crossings(self):
        # For permutation alignments no pair shares an index, so reversing
        # source order flips every pair's crossing status.
        rng = random.Random(4)
        for _ in range(100):
            n = rng.randint(2, 8)
            perm = list(range(n))
            rng.shuffle(perm)
            links = [(i, perm[i]) for i in range(n)]
            rev = [(n - 1 - i, j) for i, j in links]
            total = n * (n - 1) // 2
            c = nm_crossings(aset(links, n, n)) * total / 100.0
            c_rev = nm_crossings(aset(rev, n, n)) * total / 100.0
            assert round(c + c_rev) == total


class TestSegmentMetrics:
    def test_reversal_composition(self):
        a = aset([(0, 2), (1, 1), (2, 0)], 3, 3)
        m = segment_metrics(a)
        assert m.usw_pct == 0.0
        assert m.nm_dev_pct == pytest.approx(66.67, abs=0.01)
        assert m.nm_cross_pct == 100.0
        assert not m.degenerate

    def test_empty_alignment_flagged(self):
        m = segment_metrics(aset([], 3, 4))
        assert m.usw_pct == 100.0
        assert m.nm_dev_pct == 0.0
        assert m.nm_cross_pct == 0.0
        assert m.degenerate

    def test_stopword_filtering_switches_denominator(self):
        # Source: [the, cat, sat]; links to 2-token target; "the" stopword.
        a = aset([(0, 0), (1, 1)], 3, 2)
        m = segment_metrics(
            a, src_stop_mask=[True, False, False],
            tgt_stop_mask=[True, False], filter_stopwords=True,
        )
        # link (0,0) stripped; content tokens = {cat, sat}; sat unaligned
        assert m.stopword_filtered
        assert m.src_len == 2
        assert m.usw_count == 1
        assert m.usw_pct == 50.0
        assert m.link_count == 1

    def test_filtering_requires_masks(self):
        with pytest.raises(MetricsError):
            segment_metrics(aset([], 2, 2), filter_stopwords=True)


def seg(count, denom, dev=0.0, cross=0.0, links=1):
    return SegmentMetrics(
        usw_count=count, usw_pct=100.0 * count / denom, nm_dev_pct=dev,
        nm_cross_pct=cross, src_len=denom, tgt_len=denom, link_count=links,
    )


class TestCorpusMetrics:
    def test_micro_pools_counts(self):
        agg = corpus_metrics([seg(1, 2), seg(1, 4)], "micro")
        assert agg.usw_pct == pytest.approx(100.0 * 2 / 6)

    def test_macro_averages_percentages(self):
        agg = corpus_metrics([seg(1, 2), seg(1, 4)], "macro")
        assert agg.usw_pct == pytest.approx(37.5)

    def test_single_segment_micro_equals_macro(self):
        s = seg(2, 5, dev=10.0, cross=20.0)
        micro = corpus_metrics([s], "micro")
        macro = corpus_metrics([s], "macro")
        assert micro.usw_pct == macro.usw_pct == 40.0
        assert micro.nm_dev_pct == macro.nm_dev_pct == 10.0

    def test_micro_nm_weighted_by_links(self):
        a = seg(0, 4, dev=10.0, links=1)
        b = seg(0, 4, dev=40.0, links=3)
        agg = corpus_metrics([a, b], "micro")
        assert agg.nm_dev_pct == pytest.approx((10.0 + 3 * 40.0) / 4)

    def test_empty_rejected(self):
        with pytest.raises(MetricsError):
            corpus_metrics([], "micro")

    def test_unknown_mode_rejected(self):
        with pytest.raises(MetricsError):
            corpus_metrics([seg(0, 1)], "median")


class TestMetricReport:
    def test_corpus_values_recomputable(self):
        segments = [seg(1, 2, dev=30.0, links=2), seg(0, 3, dev=12.0, links=4)]
        report = build_report("sys", segments, ["a", "b"], [20.0, 24.0], "micro")
        agg = corpus_metrics(report.segments, report.mode)
        assert report.usw_pct == agg.usw_pct
        assert report.nm_dev_pct == agg.nm_dev_pct
        assert report.qe_mean == pytest.approx(22.0)
        assert report.n_segments == 2

    def test_to_obj_carries_ids(self):
        segments = [seg(1, 2)]
        report = build_report("sys", segments, ["seg-9"])
        obj = report.to_obj()
        assert obj["segments"][0]["id"] == "seg-9"
        assert obj["qe_mean"] is None
