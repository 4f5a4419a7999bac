"""Multi-system comparison pipeline and human-judgment tallying.

Computes per-system literalness reports over one corpus, score diffs
against a designated baseline (candidate minus baseline), seedable
percentile-bootstrap confidence intervals, and count tables for pairwise
human literalness judgments. Renders everything as JSON, CSV, or markdown.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np

from .alignment import align_corpus
from .errors import MetricsError, ValidationError
from .langid import LanguageProfile, lid_filter
from .literalness import MetricReport, SegmentMetrics, build_report, segment_metrics
from .textcore import SegmentRecord, StopwordSet

ALIGNMENT_SOURCES = ("ingested", "internal-aligner")
DIFF_METRICS = ("usw_pct", "nm_dev_pct", "nm_cross_pct", "qe_mean")

CSV_HEADER = ["system", "usw_pct", "nm_dev_pct", "nm_cross_pct", "qe_mean",
              "n_segments", "mode"]


@dataclass
class SystemComparison:
    """Literalness reports for several systems plus diffs vs a baseline."""

    lang_pair: str
    baseline: str
    reports: dict[str, MetricReport]
    diffs: dict[str, dict[str, float | None]]
    intervals: dict[str, dict[str, tuple[float, float]]]
    n_segments: int
    alignment_source: str
    options: dict[str, Any] = field(default_factory=dict)

    @property
    def systems(self) -> list[str]:
        return list(self.reports)

    def to_obj(self) -> dict:
        return {
            "lang_pair": self.lang_pair,
            "baseline": self.baseline,
            "n_segments": self.n_segments,
            "alignment_source": self.alignment_source,
            "options": self.options,
            "reports": {s: r.to_obj() for s, r in self.reports.items()},
            "diffs": self.diffs,
            "intervals": {
                s: {m: list(iv) for m, iv in per.items()}
                for s, per in self.intervals.items()
            },
        }


def bootstrap_ci(
    values: Sequence[float],
    resamples: int = 1000,
    confidence: float = 0.95,
    seed: int = 0,
) -> tuple[float, float]:
    """Percentile bootstrap interval for the mean of `values`.

    Deterministic for a given seed. Endpoints are means of resamples, hence
    always within [min(values), max(values)].
    """
    if not len(values):
        raise MetricsError("cannot bootstrap an empty value list")
    if resamples < 100:
        raise MetricsError("resamples must be >= 100")
    if not 0.0 < confidence < 1.0:
        raise MetricsError("confidence must be in (0, 1)")
    arr = np.asarray(values, dtype=float)
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, arr.size, size=(resamples, arr.size))
    means = arr[idx].mean(axis=1)
    alpha = (1.0 - confidence) / 2.0
    low, high = np.quantile(means, [alpha, 1.0 - alpha])
    return float(low), float(high)


def _collect_alignments(
    records: Sequence[SegmentRecord], system: str, source: str,
    aligner_iterations: int,
) -> list:
    if source == "ingested":
        missing = [
            r.id
            for r in records
            if r.alignments is None or system not in r.alignments
        ]
        if missing:
            raise ValidationError(
                f"missing ingested alignments for system {system!r}: "
                f"{', '.join(missing)}"
            )
        return [r.alignments[system] for r in records]
    pairs = [
        (list(r.source.tokens), list(r.translations[system].tokens))
        for r in records
    ]
    return align_corpus(pairs, iterations=aligner_iterations)


def _system_qe(
    records: Sequence[SegmentRecord],
    system: str,
    profiles: Sequence[LanguageProfile] | None,
    null_penalty: float,
) -> list[float] | None:
    """Effective qe values for one system, or None when no record carries qe.

    Partial coverage is an error: scores must be present for every record or
    for none of them.
    """
    have = [r for r in records if r.qe_scores and system in r.qe_scores]
    if not have:
        return None
    if len(have) < len(records):
        missing = [
            r.id for r in records if not (r.qe_scores and system in r.qe_scores)
        ]
        raise ValidationError(
            f"partial qe coverage for system {system!r}; missing: "
            f"{', '.join(missing)}"
        )
    if profiles:
        return [f.effective_qe for f in lid_filter(records, system, profiles, null_penalty)]
    return [r.qe_scores[system] for r in records]


def compare_systems(
    records: Sequence[SegmentRecord],
    systems: Sequence[str],
    baseline: str,
    alignment_source: str = "ingested",
    *,
    src_stopwords: StopwordSet | None = None,
    tgt_stopwords: StopwordSet | None = None,
    filter_stopwords: bool = False,
    agg: str = "micro",
    profiles: Sequence[LanguageProfile] | None = None,
    null_penalty: float = 0.0,
    bootstrap_resamples: int = 0,
    confidence: float = 0.95,
    seed: int = 0,
    aligner_iterations: int = 10,
) -> SystemComparison:
    """Build per-system reports over one corpus and diff them vs `baseline`."""
    if not records:
        raise ValidationError("empty corpus")
    if not systems:
        raise ValidationError("no systems given")
    if baseline not in systems:
        raise ValidationError(f"baseline {baseline!r} not among systems")
    if alignment_source not in ALIGNMENT_SOURCES:
        raise ValidationError(f"unknown alignment source {alignment_source!r}")
    if filter_stopwords and src_stopwords is None:
        raise ValidationError("stopword filtering requires source stopwords")

    for system in systems:
        missing = [r.id for r in records if system not in r.translations]
        if missing:
            raise ValidationError(
                f"missing translations for system {system!r}: {', '.join(missing)}"
            )
    pair_set = {(r.src_lang, r.tgt_lang) for r in records}
    if len(pair_set) > 1:
        raise ValidationError(f"mixed language pairs in corpus: {sorted(pair_set)}")
    src_lang, tgt_lang = next(iter(pair_set))
    lang_pair = f"{src_lang}-{tgt_lang}"

    reports: dict[str, MetricReport] = {}
    intervals: dict[str, dict[str, tuple[float, float]]] = {}
    for system in systems:
        alignments = _collect_alignments(
            records, system, alignment_source, aligner_iterations
        )
        segments: list[SegmentMetrics] = []
        for record, a in zip(records, alignments):
            if filter_stopwords:
                src_mask = src_stopwords.mask(record.source.tokens)
                if tgt_stopwords is not None:
                    tgt_mask = tgt_stopwords.mask(record.translations[system].tokens)
                else:
                    tgt_mask = [False] * a.tgt_len
                segments.append(
                    segment_metrics(a, src_mask, tgt_mask, filter_stopwords=True)
                )
            else:
                segments.append(segment_metrics(a))
        qe_values = _system_qe(records, system, profiles, null_penalty)
        reports[system] = build_report(
            system,
            segments,
            [r.id for r in records],
            qe_values,
            mode=agg,
            alignment_source=alignment_source,
        )
        if bootstrap_resamples:
            per_metric: dict[str, tuple[float, float]] = {
                "usw_pct": bootstrap_ci(
                    [s.usw_pct for s in segments], bootstrap_resamples, confidence, seed
                ),
                "nm_dev_pct": bootstrap_ci(
                    [s.nm_dev_pct for s in segments], bootstrap_resamples, confidence, seed
                ),
                "nm_cross_pct": bootstrap_ci(
                    [s.nm_cross_pct for s in segments], bootstrap_resamples, confidence, seed
                ),
            }
            if qe_values is not None:
                per_metric["qe_mean"] = bootstrap_ci(
                    qe_values, bootstrap_resamples, confidence, seed
                )
            intervals[system] = per_metric

    base = reports[baseline]
    diffs: dict[str, dict[str, float | None]] = {}
    for system, report in reports.items():
        diffs[system] = {
            "usw_pct": report.usw_pct - base.usw_pct,
            "nm_dev_pct": report.nm_dev_pct - base.nm_dev_pct,
            "nm_cross_pct": report.nm_cross_pct - base.nm_cross_pct,
            "qe_mean": (
                report.qe_mean - base.qe_mean
                if report.qe_mean is not None and base.qe_mean is not None
                else None
            ),
        }

    return SystemComparison(
        lang_pair=lang_pair,
        baseline=baseline,
        reports=reports,
        diffs=diffs,
        intervals=intervals,
        n_segments=len(records),
        alignment_source=alignment_source,
        options={
            "agg": agg,
            "filter_stopwords": filter_stopwords,
            "lid_filtered": bool(profiles),
            "null_penalty": null_penalty if profiles else None,
            "bootstrap_resamples": bootstrap_resamples,
            "confidence": confidence,
            "seed": seed,
        },
    )


@dataclass(frozen=True)
class TallySheet:
    """Counts of pairwise literalness judgments for a two-system session."""

    system_a_more_literal: int
    system_b_more_literal: int
    equal: int

    @property
    def n(self) -> int:
        return self.system_a_more_literal + self.system_b_more_literal + self.equal

    @property
    def diff(self) -> int:
        return self.system_a_more_literal - self.system_b_more_literal

    def to_obj(self) -> dict:
        return {
            "system_a_more_literal": self.system_a_more_literal,
            "system_b_more_literal": self.system_b_more_literal,
            "equal": self.equal,
            "diff": self.diff,
            "n": self.n,
        }


RESOLVED_OUTCOMES = ("system_a", "system_b", "equal")


def tally_judgments(judgments: Sequence[Any]) -> TallySheet:
    """Count resolved judgments; order of the input does not matter.

    Accepts objects with a `resolved` attribute or mappings with a
    "resolved" key, each one of "system_a", "system_b", or "equal".
    """
    counts = {outcome: 0 for outcome in RESOLVED_OUTCOMES}
    for judgment in judgments:
        if isinstance(judgment, Mapping):
            resolved = judgment.get("resolved")
        else:
            resolved = getattr(judgment, "resolved", None)
        if resolved not in counts:
            raise ValidationError(f"judgment has invalid resolved outcome {resolved!r}")
        counts[resolved] += 1
    return TallySheet(counts["system_a"], counts["system_b"], counts["equal"])


def _fmt(value: float | None, spec: str = ".2f") -> str:
    return "" if value is None else format(value, spec)


def _tally_markdown(tally: TallySheet) -> str:
    lines = [
        "| System A | System B | Equal | Diff |",
        "| ---: | ---: | ---: | ---: |",
        f"| {tally.system_a_more_literal} | {tally.system_b_more_literal} "
        f"| {tally.equal} | {tally.diff:+d} |",
    ]
    return "\n".join(lines) + "\n"


def _comparison_markdown(c: SystemComparison) -> str:
    out = [f"## {c.lang_pair} ({c.n_segments} segments, "
           f"{c.alignment_source} alignments, {c.options.get('agg')} aggregation)",
           "",
           "| System | USW | NM (dev) | NM (cross) | QE |",
           "| --- | ---: | ---: | ---: | ---: |"]
    for system, r in c.reports.items():
        out.append(
            f"| {system} | {_fmt(r.usw_pct)} | {_fmt(r.nm_dev_pct)} "
            f"| {_fmt(r.nm_cross_pct)} | {_fmt(r.qe_mean)} |"
        )
    out += ["", f"Diffs vs {c.baseline}:", "",
            "| System | USW diff | NM (dev) diff | NM (cross) diff | QE diff |",
            "| --- | ---: | ---: | ---: | ---: |"]
    for system, d in c.diffs.items():
        if system == c.baseline:
            continue
        cells = [
            _fmt(d["usw_pct"], "+.2f"),
            _fmt(d["nm_dev_pct"], "+.2f"),
            _fmt(d["nm_cross_pct"], "+.2f"),
            _fmt(d["qe_mean"], "+.2f"),
        ]
        out.append(f"| {system} | " + " | ".join(cells) + " |")
    if c.intervals:
        out += ["", "Bootstrap intervals "
                f"({int(c.options.get('confidence', 0.95) * 100)}%, per-segment means):",
                "",
                "| System | Metric | Low | High |",
                "| --- | --- | ---: | ---: |"]
        for system, per in c.intervals.items():
            for metric, (low, high) in per.items():
                out.append(f"| {system} | {metric} | {_fmt(low)} | {_fmt(high)} |")
    return "\n".join(out) + "\n"


def _reports_csv(reports: Sequence[MetricReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in reports:
        writer.writerow([
            r.system,
            f"{r.usw_pct:.4f}",
            f"{r.nm_dev_pct:.4f}",
            f"{r.nm_cross_pct:.4f}",
            "" if r.qe_mean is None else f"{r.qe_mean:.4f}",
            r.n_segments,
            r.mode,
        ])
    return buf.getvalue()


def render_report(
    obj: SystemComparison | MetricReport | TallySheet, fmt: str = "markdown"
) -> str:
    """Render a comparison, single-system report, or tally as text."""
    if fmt not in ("json", "csv", "markdown"):
        raise ValidationError(f"unknown format {fmt!r}")

    if isinstance(obj, TallySheet):
        if fmt == "json":
            return json.dumps(obj.to_obj(), indent=2) + "\n"
        if fmt == "csv":
            buf = io.StringIO()
            writer = csv.writer(buf, lineterminator="\n")
            writer.writerow(["system_a_more_literal", "system_b_more_literal",
                             "equal", "diff", "n"])
            writer.writerow([obj.system_a_more_literal, obj.system_b_more_literal,
                             obj.equal, obj.diff, obj.n])
            return buf.getvalue()
        return _tally_markdown(obj)

    if isinstance(obj, MetricReport):
        if fmt == "json":
            return json.dumps(obj.to_obj(), indent=2) + "\n"
        if fmt == "csv":
            return _reports_csv([obj])
        header = ["| System | USW | NM (dev) | NM (cross) | QE | n |",
                  "| --- | ---: | ---: | ---: | ---: | ---: |",
                  f"| {obj.system} | {_fmt(obj.usw_pct)} | {_fmt(obj.nm_dev_pct)} "
                  f"| {_fmt(obj.nm_cross_pct)} | {_fmt(obj.qe_mean)} "
                  f"| {obj.n_segments} |"]
        return "\n".join(header) + "\n"

    if isinstance(obj, SystemComparison):
        if fmt == "json":
            return json.dumps(obj.to_obj(), indent=2) + "\n"
        if fmt == "csv":
            return _reports_csv(list(obj.reports.values()))
        return _comparison_markdown(obj)

    raise ValidationError(f"cannot render object of type {type(obj).__name__}")
