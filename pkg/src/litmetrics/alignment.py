"""Word-alignment data model and the built-in statistical aligner.

Alignments normally come from an external aligner in Pharaoh "i-j" format.
When none are available, a translation-table aligner (expectation
maximization over co-occurrence, one NULL source slot) plus directional
symmetrization produces a deterministic offline substitute.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import AlignmentError

# Source-side slot that absorbs target tokens with no lexical counterpart.
NULL_TOKEN = "<null>"

Link = tuple[int, int]
TokenPair = tuple[Sequence[str], Sequence[str]]

SYMMETRIZATION_HEURISTICS = ("intersection", "union", "grow-diag-final-and")


@dataclass(frozen=True)
class AlignmentSet:
    """A set of (source index, target index) links with declared lengths."""

    links: frozenset[Link]
    src_len: int
    tgt_len: int

    def __post_init__(self):
        if self.src_len < 0 or self.tgt_len < 0:
            raise AlignmentError("sentence lengths must be non-negative")
        object.__setattr__(self, "links", frozenset(self.links))
        for i, j in self.links:
            if not 0 <= i < self.src_len:
                raise AlignmentError(
                    f"source index {i} out of range [0,{self.src_len})"
                )
            if not 0 <= j < self.tgt_len:
                raise AlignmentError(
                    f"target index {j} out of range [0,{self.tgt_len})"
                )

    def aligned_source_indices(self) -> set[int]:
        return {i for i, _ in self.links}

    def aligned_target_indices(self) -> set[int]:
        return {j for _, j in self.links}

    def transpose(self) -> "AlignmentSet":
        return AlignmentSet(
            frozenset((j, i) for i, j in self.links), self.tgt_len, self.src_len
        )


def parse_pharaoh(line: str, src_len: int, tgt_len: int) -> AlignmentSet:
    """Parse a whitespace-separated "i-j" line into an AlignmentSet.

    An empty (or all-whitespace) line yields an empty link set. Non-integer
    fields and out-of-range indices raise AlignmentError naming the pair.
    """
    links: set[Link] = set()
    for pair in line.split():
        src_s, sep, tgt_s = pair.partition("-")
        if not sep:
            raise AlignmentError(f"malformed alignment pair {pair!r}")
        try:
            i, j = int(src_s), int(tgt_s)
        except ValueError:
            raise AlignmentError(f"malformed alignment pair {pair!r}") from None
        if not 0 <= i < src_len:
            raise AlignmentError(f"source index {i} out of range [0,{src_len})")
        if not 0 <= j < tgt_len:
            raise AlignmentError(f"target index {j} out of range [0,{tgt_len})")
        links.add((i, j))
    return AlignmentSet(frozenset(links), src_len, tgt_len)


def serialize_pharaoh(a: AlignmentSet) -> str:
    """Render links sorted by (i, j) as "i-j" pairs joined by single spaces."""
    return " ".join(f"{i}-{j}" for i, j in sorted(a.links))


@dataclass
class LexiconTable:
    """Conditional translation probabilities p(target word | source word).

    Rows (one per source word, including the NULL slot) each sum to 1 over
    their stored target words. `log_likelihoods` holds the corpus
    log-likelihood measured at the start of every EM iteration.
    """

    probabilities: dict[str, dict[str, float]]
    src_vocab_size: int
    tgt_vocab_size: int
    pair_count: int
    log_likelihoods: list[float] = field(default_factory=list)

    def prob(self, src_word: str, tgt_word: str) -> float:
        return self.probabilities.get(src_word, {}).get(tgt_word, 0.0)

    def save_tsv(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for src in sorted(self.probabilities):
                row = self.probabilities[src]
                for tgt in sorted(row):
                    fh.write(f"{src}\t{tgt}\t{row[tgt]:.12g}\n")

    @classmethod
    def load_tsv(cls, path: str | Path) -> "LexiconTable":
        probs: dict[str, dict[str, float]] = defaultdict(dict)
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.rstrip("\n")
                if not line:
                    continue
                src, tgt, p = line.split("\t")
                probs[src][tgt] = float(p)
        src_vocab = set(probs) - {NULL_TOKEN}
        tgt_vocab = {t for row in probs.values() for t in row}
        return cls(dict(probs), len(src_vocab), len(tgt_vocab), 0)


def train_ibm1(
    corpus: Sequence[TokenPair], iterations: int = 10, smoothing: float = 0.0
) -> LexiconTable:
    """Estimate a translation table by EM over sentence-pair co-occurrence.

    Each target token may also be generated by a NULL source slot. With
    `smoothing` > 0, add-k mass is spread over the target words co-occurring
    with each source word, which keeps every stored row summing to 1.
    """
    if not corpus:
        raise AlignmentError("empty training corpus")
    if iterations < 1:
        raise AlignmentError("iterations must be >= 1")
    if smoothing < 0:
        raise AlignmentError("smoothing must be >= 0")
    for n, (src, tgt) in enumerate(corpus):
        if not src or not tgt:
            raise AlignmentError(f"pair {n}: source and target must be non-empty")

    # Co-occurrence support: candidate target words per source word.
    support: dict[str, set[str]] = defaultdict(set)
    for src, tgt in corpus:
        for e in list(src) + [NULL_TOKEN]:
            support[e].update(tgt)

    t: dict[str, dict[str, float]] = {
        e: {f: 1.0 / len(fs) for f in fs} for e, fs in support.items()
    }

    log_likelihoods: list[float] = []
    for _ in range(iterations):
        counts: dict[str, Counter[str]] = defaultdict(Counter)
        totals: Counter[str] = Counter()
        ll = 0.0
        for src, tgt in corpus:
            slots = list(src) + [NULL_TOKEN]
            for f in tgt:
                ps = [t[e].get(f, 0.0) for e in slots]
                denom = sum(ps)
                ll += math.log(denom) - math.log(len(slots))
                for e, p in zip(slots, ps):
                    if p > 0.0:
                        gamma = p / denom
                        counts[e][f] += gamma
                        totals[e] += gamma
        log_likelihoods.append(ll)
        for e, fs in support.items():
            z = totals[e] + smoothing * len(fs)
            t[e] = {f: (counts[e][f] + smoothing) / z for f in fs}

    src_vocab = {w for src, _ in corpus for w in src}
    tgt_vocab = {w for _, tgt in corpus for w in tgt}
    return LexiconTable(t, len(src_vocab), len(tgt_vocab), len(corpus), log_likelihoods)


def viterbi_align(
    lexicon: LexiconTable, pair: TokenPair, direction: str = "src2tgt"
) -> AlignmentSet:
    """Link each generated-side token to its most probable conditioning token.

    With direction "src2tgt" the lexicon conditions on source words and every
    target token gets at most one link; "tgt2src" swaps roles and returns a
    set in (target, source) index space, ready for transposition during
    symmetrization. A token whose best probability is 0 (out of vocabulary)
    or is beaten by the NULL slot stays unlinked; exact ties go to the real
    token with the lowest index, then to the real token over NULL.
    """
    src, tgt = pair
    if direction == "src2tgt":
        cond, gen = list(src), list(tgt)
    elif direction == "tgt2src":
        cond, gen = list(tgt), list(src)
    else:
        raise AlignmentError(f"unknown direction {direction!r}")

    links: set[Link] = set()
    for j, f in enumerate(gen):
        best_i, best_p = -1, 0.0
        for i, e in enumerate(cond):
            p = lexicon.prob(e, f)
            if p > best_p:
                best_i, best_p = i, p
        if best_p > 0.0 and best_p >= lexicon.prob(NULL_TOKEN, f):
            links.add((best_i, j))
    return AlignmentSet(frozenset(links), len(cond), len(gen))


def _neighbors(i: int, j: int) -> Iterable[Link]:
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di or dj:
                yield i + di, j + dj


def symmetrize(
    forward: AlignmentSet, backward: AlignmentSet, heuristic: str = "grow-diag-final-and"
) -> AlignmentSet:
    """Combine a forward and a backward directional alignment.

    `forward` lives in (source, target) index space and `backward` in
    (target, source) space; the backward set is transposed here. Heuristics:
    plain set intersection, plain union, or the neighborhood-growing
    procedure seeded from the intersection with a final pass that adds
    directional links whose both endpoints are still unaligned.
    """
    if heuristic not in SYMMETRIZATION_HEURISTICS:
        raise AlignmentError(f"unknown symmetrization heuristic {heuristic!r}")
    bt = backward.transpose()
    if (forward.src_len, forward.tgt_len) != (bt.src_len, bt.tgt_len):
        raise AlignmentError(
            "directional alignments disagree on sentence lengths: "
            f"{(forward.src_len, forward.tgt_len)} vs {(bt.src_len, bt.tgt_len)}"
        )

    fw, bw = set(forward.links), set(bt.links)
    inter, union = fw & bw, fw | bw
    if heuristic == "intersection":
        chosen = inter
    elif heuristic == "union":
        chosen = union
    else:
        chosen = _grow_diag_final_and(fw, bw, forward.src_len, forward.tgt_len)
    return AlignmentSet(frozenset(chosen), forward.src_len, forward.tgt_len)


def _grow_diag_final_and(
    fw: set[Link], bw: set[Link], src_len: int, tgt_len: int
) -> set[Link]:
    union = fw | bw
    aligned = set(fw & bw)
    src_covered = {i for i, _ in aligned}
    tgt_covered = {j for _, j in aligned}

    grew = True
    while grew:
        grew = False
        for i, j in sorted(aligned):
            for ni, nj in _neighbors(i, j):
                if (ni, nj) not in union or (ni, nj) in aligned:
                    continue
                if ni not in src_covered or nj not in tgt_covered:
                    aligned.add((ni, nj))
                    src_covered.add(ni)
                    tgt_covered.add(nj)
                    grew = True

    for directional in (fw, bw):
        for i, j in sorted(directional):
            if i not in src_covered and j not in tgt_covered:
                aligned.add((i, j))
                src_covered.add(i)
                tgt_covered.add(j)
    return aligned


def strip_stopword_links(
    a: AlignmentSet, src_stop_mask: Sequence[bool], tgt_stop_mask: Sequence[bool]
) -> AlignmentSet:
    """Drop every link whose source or target token is masked as a stopword."""
    if len(src_stop_mask) != a.src_len:
        raise AlignmentError(
            f"source mask length {len(src_stop_mask)} != src_len {a.src_len}"
        )
    if len(tgt_stop_mask) != a.tgt_len:
        raise AlignmentError(
            f"target mask length {len(tgt_stop_mask)} != tgt_len {a.tgt_len}"
        )
    kept = frozenset(
        (i, j) for i, j in a.links if not src_stop_mask[i] and not tgt_stop_mask[j]
    )
    return AlignmentSet(kept, a.src_len, a.tgt_len)


def align_corpus(
    pairs: Sequence[TokenPair],
    iterations: int = 10,
    smoothing: float = 0.0,
    heuristic: str = "grow-diag-final-and",
) -> list[AlignmentSet]:
    """Train both directional models on `pairs` and symmetrize each pair."""
    forward_lex = train_ibm1(pairs, iterations, smoothing)
    backward_lex = train_ibm1([(t, s) for s, t in pairs], iterations, smoothing)
    out = []
    for pair in pairs:
        fwd = viterbi_align(forward_lex, pair, "src2tgt")
        bwd = viterbi_align(backward_lex, pair, "tgt2src")
        out.append(symmetrize(fwd, bwd, heuristic))
    return out


def load_alignment_manifest(path: str | Path) -> list[dict]:
    """Read a sidecar manifest JSONL of {"id", "system", "alignment"} entries.

    Entries may carry an optional "aligner" provenance string. Parsing against
    declared sentence lengths happens when entries are attached to records.
    """
    import json

    entries = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise AlignmentError(f"line {lineno}: invalid JSON: {e}") from None
            for key in ("id", "system", "alignment"):
                if key not in obj:
                    raise AlignmentError(f"line {lineno}: missing field {key}")
            entries.append(obj)
    return entries
