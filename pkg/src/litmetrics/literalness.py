"""Alignment-based translation literalness measures.

Two corpus-level signals, both computed from a source-translation word
alignment:

* unaligned source words (USW): the share of source tokens with no link.
  A less literal translation of equal quality tends to leave more source
  words unaligned.
* non-monotonicity (NM): how far the alignment strays from the monotone
  diagonal. Two variants are reported side by side: the mean absolute
  normalized deviation of each link from the diagonal, and the share of
  link pairs that cross.

All values are percentages. An optional stopword filter recomputes both
measures after dropping links that touch stopwords, with source stopwords
also excluded from the USW denominator.
"""

from __future__ import annotations

from dataclasses import dataclass
from statistics import fmean
from typing import Sequence

from .alignment import AlignmentSet, strip_stopword_links
from .errors import MetricsError

DENOMINATORS = ("all_tokens", "content_tokens")
AGGREGATION_MODES = ("micro", "macro")


@dataclass(frozen=True)
class SegmentMetrics:
    """Literalness measurements for one segment.

    `src_len` is the USW denominator actually used: all source tokens, or
    only content tokens when stopword filtering was applied.
    """

    usw_count: int
    usw_pct: float
    nm_dev_pct: float
    nm_cross_pct: float
    src_len: int
    tgt_len: int
    link_count: int
    stopword_filtered: bool = False

    @property
    def degenerate(self) -> bool:
        """True when no links survive; NM is 0 and USW is total by convention."""
        return self.link_count == 0


def unaligned_source_words(
    a: AlignmentSet,
    count_denominator: str = "all_tokens",
    src_stop_mask: Sequence[bool] | None = None,
) -> tuple[int, float]:
    """Count source indices with no outgoing link.

    In "content_tokens" mode, stopword positions (mask True) are excluded
    from both the numerator and the denominator; a mask is then required.
    Returns (count, percentage). A denominator of zero content tokens yields
    (0, 0.0).
    """
    if a.src_len == 0:
        raise MetricsError("empty source")
    if count_denominator not in DENOMINATORS:
        raise MetricsError(f"unknown denominator rule {count_denominator!r}")

    aligned = a.aligned_source_indices()
    if count_denominator == "content_tokens":
        if src_stop_mask is None:
            raise MetricsError("content_tokens mode requires a source stopword mask")
        if len(src_stop_mask) != a.src_len:
            raise MetricsError(
                f"mask length {len(src_stop_mask)} != src_len {a.src_len}"
            )
        candidates = [i for i in range(a.src_len) if not src_stop_mask[i]]
    else:
        candidates = list(range(a.src_len))

    count = sum(1 for i in candidates if i not in aligned)
    if not candidates:
        return 0, 0.0
    return count, 100.0 * count / len(candidates)


def nm_deviation(a: AlignmentSet) -> float:
    """Mean absolute deviation of links from the normalized diagonal, x100.

    Positions are normalized to [0, 1] by max(len - 1, 1) so single-token
    sentences are well defined. An empty link set scores 0.
    """
    if not a.links:
        return 0.0
    sn = max(a.src_len - 1, 1)
    tn = max(a.tgt_len - 1, 1)
    total = sum(abs(i / sn - j / tn) for i, j in a.links)
    return 100.0 * total / len(a.links)


def _count_inversions(seq: list[int]) -> int:
    """Strict inversions (earlier element > later element) by merge sort."""
    if len(seq) < 2:
        return 0
    mid = len(seq) // 2
    left, right = seq[:mid], seq[mid:]
    inv = _count_inversions(left) + _count_inversions(right)
    merged = []
    i = j = 0
    while i < len(left) and j < len(right):
        if left[i] <= right[j]:
            merged.append(left[i])
            i += 1
        else:
            inv += len(left) - i
            merged.append(right[j])
            j += 1
    merged.extend(left[i:])
    merged.extend(right[j:])
    seq[:] = merged
    return inv


def nm_crossings(a: AlignmentSet) -> float:
    """Share of unordered link pairs that cross, x100.

    A pair {(i, j), (i', j')} crosses when (i - i') and (j - j') have
    opposite signs. Fewer than two links scores 0.
    """
    n = len(a.links)
    if n < 2:
        return 0.0
    # Sorting by (i, j) makes crossing pairs exactly the strict inversions
    # of the j sequence: ties in i or j contribute no inversion.
    js = [j for _, j in sorted(a.links)]
    crossings = _count_inversions(js)
    pairs = n * (n - 1) // 2
    return 100.0 * crossings / pairs


def segment_metrics(
    a: AlignmentSet,
    src_stop_mask: Sequence[bool] | None = None,
    tgt_stop_mask: Sequence[bool] | None = None,
    filter_stopwords: bool = False,
) -> SegmentMetrics:
    """Compute all segment-level measures for one alignment.

    With `filter_stopwords`, links touching stopwords are stripped first and
    USW switches to the content-token denominator.
    """
    if filter_stopwords:
        if src_stop_mask is None or tgt_stop_mask is None:
            raise MetricsError("stopword filtering requires both masks")
        stripped = strip_stopword_links(a, src_stop_mask, tgt_stop_mask)
        count, pct = unaligned_source_words(stripped, "content_tokens", src_stop_mask)
        denom = sum(1 for m in src_stop_mask if not m)
        return SegmentMetrics(
            usw_count=count,
            usw_pct=pct,
            nm_dev_pct=nm_deviation(stripped),
            nm_cross_pct=nm_crossings(stripped),
            src_len=denom,
            tgt_len=a.tgt_len,
            link_count=len(stripped.links),
            stopword_filtered=True,
        )
    count, pct = unaligned_source_words(a, "all_tokens")
    return SegmentMetrics(
        usw_count=count,
        usw_pct=pct,
        nm_dev_pct=nm_deviation(a),
        nm_cross_pct=nm_crossings(a),
        src_len=a.src_len,
        tgt_len=a.tgt_len,
        link_count=len(a.links),
        stopword_filtered=False,
    )


@dataclass(frozen=True)
class CorpusAggregate:
    usw_pct: float
    nm_dev_pct: float
    nm_cross_pct: float
    mode: str


def corpus_metrics(segments: Sequence[SegmentMetrics], mode: str = "micro") -> CorpusAggregate:
    """Aggregate per-segment metrics to corpus level.

    Micro pools counts: USW is total unaligned over total denominator tokens,
    NM is the link-count-weighted mean. Macro is the unweighted mean of the
    per-segment percentages.
    """
    if not segments:
        raise MetricsError("cannot aggregate an empty segment list")
    if mode not in AGGREGATION_MODES:
        raise MetricsError(f"unknown aggregation mode {mode!r}")

    if mode == "macro":
        return CorpusAggregate(
            usw_pct=fmean(s.usw_pct for s in segments),
            nm_dev_pct=fmean(s.nm_dev_pct for s in segments),
            nm_cross_pct=fmean(s.nm_cross_pct for s in segments),
            mode=mode,
        )

    denom = sum(s.src_len for s in segments)
    usw = 100.0 * sum(s.usw_count for s in segments) / denom if denom else 0.0
    links = sum(s.link_count for s in segments)
    if links:
        dev = sum(s.nm_dev_pct * s.link_count for s in segments) / links
        cross = sum(s.nm_cross_pct * s.link_count for s in segments) / links
    else:
        dev = cross = 0.0
    return CorpusAggregate(usw_pct=usw, nm_dev_pct=dev, nm_cross_pct=cross, mode=mode)


@dataclass
class MetricReport:
    """Corpus-level literalness results for one system."""

    system: str
    usw_pct: float
    nm_dev_pct: float
    nm_cross_pct: float
    qe_mean: float | None
    segments: list[SegmentMetrics]
    segment_ids: list[str]
    mode: str
    alignment_source: str | None = None

    @property
    def n_segments(self) -> int:
        return len(self.segments)

    def to_obj(self) -> dict:
        return {
            "system": self.system,
            "usw_pct": self.usw_pct,
            "nm_dev_pct": self.nm_dev_pct,
            "nm_cross_pct": self.nm_cross_pct,
            "qe_mean": self.qe_mean,
            "n_segments": self.n_segments,
            "mode": self.mode,
            "alignment_source": self.alignment_source,
            "segments": [
                {
                    "id": sid,
                    "usw_count": s.usw_count,
                    "usw_pct": s.usw_pct,
                    "nm_dev_pct": s.nm_dev_pct,
                    "nm_cross_pct": s.nm_cross_pct,
                    "src_len": s.src_len,
                    "tgt_len": s.tgt_len,
                    "link_count": s.link_count,
                    "stopword_filtered": s.stopword_filtered,
                    "degenerate": s.degenerate,
                }
                for sid, s in zip(self.segment_ids, self.segments)
            ],
        }


def build_report(
    system: str,
    segments: Sequence[SegmentMetrics],
    segment_ids: Sequence[str],
    qe_values: Sequence[float] | None = None,
    mode: str = "micro",
    alignment_source: str | None = None,
) -> MetricReport:
    """Assemble a MetricReport; corpus values recomputable from `segments`."""
    if len(segments) != len(segment_ids):
        raise MetricsError("segments and segment_ids must be parallel")
    agg = corpus_metrics(segments, mode)
    qe_mean = fmean(qe_values) if qe_values else None
    return MetricReport(
        system=system,
        usw_pct=agg.usw_pct,
        nm_dev_pct=agg.nm_dev_pct,
        nm_cross_pct=agg.nm_cross_pct,
        qe_mean=qe_mean,
        segments=list(segments),
        segment_ids=list(segment_ids),
        mode=mode,
        alignment_source=alignment_source,
    )
