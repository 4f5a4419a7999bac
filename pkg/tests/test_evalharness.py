import json
import random

import numpy as np
import pytest

from litmetrics.alignment import AlignmentSet
from litmetrics.errors import MetricsError, ValidationError
from litmetrics.evalharness import (
    CSV_HEADER,
    TallySheet,
    bootstrap_ci,
    compare_systems,
    render_report,
    tally_judgments,
)

from litmetrics.textcore import SegmentRecord, tokenize

def make_corpus(n=6, drop_for_b=0, swap_for_b=False):
    """Synthetic en->xx corpus with explicit alignments for systems a/b.

    System "a" aligns the identity. System "b" leaves `drop_for_b` source
    tokens unaligned per segment and optionally reverses link order.
    """
    rng = random.Random(13)
    words = ["storm", "river", "bridge", "market", "garden", "harbor",
             "treaty", "signal"]
    records = []
    for k in range(n):
        src_tokens = rng.sample(words, 6)
        source = " ".join(src_tokens)
        tgt = " ".join(w + "u" for w in src_tokens)
        record = SegmentRecord(
            id=f"s{k}",
            src_lang="en",
            tgt_lang="xx",
            source=tokenize(source, "en"),
            translations={"a": tokenize(tgt, "en"), "b": tokenize(tgt, "en")},
            qe_scores={"a": 20.0 + k, "b": 21.0 + k},
        )
        identity = frozenset((i, i) for i in range(6))
        record.set_alignment("a", AlignmentSet(identity, 6, 6))
        kept = range(drop_for_b, 6)
        if swap_for_b:
            b_links = frozenset((i, 5 - i + drop_for_b) for i in kept)
        else:
            b_links = frozenset((i, i) for i in kept)
        record.set_alignment("b", AlignmentSet(b_links, 6, 6))
        records.append(record)
    return records

class TestBootstrap:
    def test_degenerate_distribution(self):
        assert bootstrap_ci([5.0] * 10, 200, 0.95, seed=1) == (5.0, 5.0)

    def test_deterministic_for_seed(self):
        values = [1.0, 4.0, 2.0, 8.0, 5.0]
        assert bootstrap_ci(values, 500, 0.9, seed=42) == \
            bootstrap_ci(values, 500, 0.9, seed=42)

    def test_contains_sample_mean_on_synthetic_data(self):
        rng = np.random.default_rng(7)
        values = rng.normal(10.0, 2.0, size=1000).tolist()
        low, high = bootstrap_ci(values, 1000, 0.95, seed=0)
        mean = float(np.mean(values))
        assert low <= mean <= high

    def test_endpoints_within_data_range(self):
        rng = random.Random(9)
        for _ in range(20):
            values = [rng.uniform(-50, 50) for _ in range(rng.randint(1, 30))]
            low, high = bootstrap_ci(values, 200, 0.99, seed=3)
            assert min(values) <= low <= high <= max(values)

    def test_validation(self):
        with pytest.raises(MetricsError):
            bootstrap_ci([], 200)
        with pytest.raises(MetricsError):
            bootstrap_ci([1.0], 99)
        with pytest.raises(MetricsError):
            bootstrap_ci([1.0], 200, confidence=1.5)

class TestCompareSystems:
    def test_self_comparison_diffs_zero(self):
        records = make_corpus()
        comp = compare_systems(records, ["a", "b"], "a")
        assert comp.diffs["a"] == {
            "usw_pct": 0.0, "nm_dev_pct": 0.0, "nm_cross_pct": 0.0,
            "qe_mean": 0.0,
        }

    def test_diff_sign_candidate_minus_baseline(self):
        records = make_corpus(drop_for_b=2)
        comp = compare_systems(records, ["a", "b"], "a")
        expected = 100.0 * 2 / 6
        assert comp.diffs["b"]["usw_pct"] == pytest.approx(expected)

    def test_diffs_antisymmetric(self):
        records = make_corpus(drop_for_b=1, swap_for_b=True)
        fwd = compare_systems(records, ["a", "b"], "a")
        rev = compare_systems(records, ["a", "b"], "b")
        for metric in ("usw_pct", "nm_dev_pct", "nm_cross_pct", "qe_mean"):
            assert fwd.diffs["b"][metric] == pytest.approx(-rev.diffs["a"][metric])

    def test_dropping_words_raises_usw(self):
        records = make_corpus(drop_for_b=2)
        comp = compare_systems(records, ["a", "b"], "a")
        assert comp.reports["b"].usw_pct > comp.reports["a"].usw_pct

    def test_missing_system_lists_ids(self):
        records = make_corpus(n=3)
        del records[1].translations["b"]
        with pytest.raises(ValidationError, match="s1"):
            compare_systems(records, ["a", "b"], "a")

    def test_missing_alignment_lists_ids(self):
        records = make_corpus(n=3)
        del records[2].alignments["b"]
        with pytest.raises(ValidationError, match="s2"):
            compare_systems(records, ["a", "b"], "a")

    def test_unknown_baseline_rejected(self):
        with pytest.raises(ValidationError, match="baseline"):
            compare_systems(make_corpus(), ["a", "b"], "zz")

    def test_internal_aligner_path(self):
        records = make_corpus(n=8)
        comp = compare_systems(records, ["a", "b"], "a", "internal-aligner")
        assert comp.alignment_source == "internal-aligner"
        # gloss corpus is fully learnable, so alignments cover the source
        assert comp.reports["a"].usw_pct < 20.0

    def test_bootstrap_intervals_present(self):
        records = make_corpus(drop_for_b=2)
        comp = compare_systems(records, ["a", "b"], "a",
                               bootstrap_resamples=200, seed=5)
        low, high = comp.intervals["b"]["usw_pct"]
        assert low <= high
        assert comp.intervals["a"]["usw_pct"] == (0.0, 0.0)

    def test_partial_qe_rejected(self):
        records = make_corpus(n=3)
        records[1].qe_scores = {"a": 20.0}
        with pytest.raises(ValidationError, match="partial qe"):
            compare_systems(records, ["a", "b"], "a")

class TestTally:
    def test_table3_en_de_row(self):
        judgments = (
            [{"resolved": "system_a"}] * 52
            + [{"resolved": "system_b"}] * 32
            + [{"resolved": "equal"}] * 16
        )
        sheet = tally_judgments(judgments)
        assert (sheet.system_a_more_literal, sheet.system_b_more_literal,
                sheet.equal) == (52, 32, 16)
        assert sheet.diff == 20
        assert sheet.n == 100

    def test_empty(self):
        sheet = tally_judgments([])
        assert sheet.n == 0
        assert sheet.diff == 0

    def test_order_invariance(self):
        rows = ([{"resolved": "system_a"}] * 5 + [{"resolved": "equal"}] * 2
                + [{"resolved": "system_b"}] * 3)
        shuffled = rows[:]
        random.Random(0).shuffle(shuffled)
        assert tally_judgments(rows) == tally_judgments(shuffled)

    def test_invalid_outcome_rejected(self):
        with pytest.raises(ValidationError, match="invalid resolved"):
            tally_judgments([{"resolved": "left"}])

class TestRender:
    def test_tally_markdown_row(self):
        sheet = TallySheet(52, 32, 16)
        text = render_report(sheet, "markdown")
        assert "| 52 | 32 | 16 | +20 |" in text

    def test_tally_json_round_trip(self):
        sheet = TallySheet(3, 4, 5)
        obj = json.loads(render_report(sheet, "json"))
        assert obj == sheet.to_obj()

    def test_csv_header_golden(self):
        records = make_corpus()
        comp = compare_systems(records, ["a", "b"], "a")
        text = render_report(comp, "csv")
        header = text.splitlines()[0]
        assert header == ",".join(CSV_HEADER)
        assert header.startswith("system,usw_pct,nm_dev_pct,nm_cross_pct,qe_mean")
        assert len(text.splitlines()) == 3

    def test_comparison_json_round_trip(self):
        records = make_corpus(drop_for_b=1)
        comp = compare_systems(records, ["a", "b"], "a",
                               bootstrap_resamples=150, seed=2)
        parsed = json.loads(render_report(comp, "json"))
        assert parsed == json.loads(json.dumps(comp.to_obj()))

    def test_comparison_markdown_has_diff_row(self):
        records = make_corpus(drop_for_b=2)
        comp = compare_systems(records, ["a", "b"], "a")
        text = render_report(comp, "markdown")
        assert "| b | +33.33" in text

    def test_single_report_markdown(self):
        records = make_corpus()
        comp = compare_systems(records, ["a"], "a")
        text = render_report(comp.reports["a"], "markdown")
        assert "| a |" in text

    def test_unknown_format_rejected(self):
        with pytest.raises(ValidationError):
            render_report(TallySheet(1, 2, 3), "yaml")
