"""Character n-gram language identification and the copy-error score filter.

Quality-estimation scores are blind to copy errors, where a system parrots
the source language instead of translating. The filter detects the
translation's language with a rank-profile classifier (character 1..4-gram
frequency ranks compared by out-of-place distance) and demotes the score of
any segment whose translation comes back in the source language.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

from .errors import LangIDError
from .textcore import SegmentRecord, primary_subtag

log = logging.getLogger(__name__)

DEFAULT_PROFILE_SIZE = 3000
MIN_TRAINING_CHARS = 500
LOW_CONFIDENCE_CHARS = 20

_WS = re.compile(r"\s+")


def _char_ngrams(text: str, max_n: int = 4) -> dict[str, int]:
    """Frequency counts of padded character n-grams, n in 1..max_n."""
    normalized = " " + _WS.sub(" ", text.casefold()).strip() + " "
    counts: dict[str, int] = {}
    size = len(normalized)
    for n in range(1, max_n + 1):
        for start in range(size - n + 1):
            gram = normalized[start : start + n]
            if gram.isspace():
                continue
            counts[gram] = counts.get(gram, 0) + 1
    return counts


def _rank(counts: dict[str, int], cap: int) -> dict[str, int]:
    ordered = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:cap]
    return {gram: rank for rank, (gram, _) in enumerate(ordered, start=1)}


@dataclass(frozen=True)
class LanguageProfile:
    """Ranked n-gram profile of one language."""

    language: str
    ranks: dict[str, int]
    training_chars: int
    cap: int = DEFAULT_PROFILE_SIZE

    def save(self, path: str | Path) -> None:
        obj = {
            "language": self.language,
            "training_chars": self.training_chars,
            "cap": self.cap,
            "ngrams": sorted(self.ranks.items(), key=lambda kv: kv[1]),
        }
        Path(path).write_text(
            json.dumps(obj, ensure_ascii=False), encoding="utf-8"
        )

    @classmethod
    def load(cls, path: str | Path) -> "LanguageProfile":
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(
            language=obj["language"],
            ranks={gram: rank for gram, rank in obj["ngrams"]},
            training_chars=obj.get("training_chars", 0),
            cap=obj.get("cap", DEFAULT_PROFILE_SIZE),
        )


def train_profile(
    text: str, language: str, cap: int = DEFAULT_PROFILE_SIZE
) -> LanguageProfile:
    """Build a rank profile from at least MIN_TRAINING_CHARS of text."""
    if len(text) < MIN_TRAINING_CHARS:
        raise LangIDError(
            f"training text too short: {len(text)} < {MIN_TRAINING_CHARS} chars"
        )
    ranks = _rank(_char_ngrams(text), cap)
    return LanguageProfile(language, ranks, len(text), cap)


def _out_of_place(doc_ranks: dict[str, int], profile: LanguageProfile) -> int:
    penalty = profile.cap
    return sum(
        abs(rank - profile.ranks.get(gram, penalty))
        for gram, rank in doc_ranks.items()
    )


def identify(
    text: str, profiles: Sequence[LanguageProfile]
) -> tuple[str, float]:
    """Pick the profile with minimal out-of-place distance to `text`.

    Returns (language, score) where score is the distance margin between the
    two closest profiles, normalized to [0, 1]; with a single profile the
    score is 1.0. Texts shorter than LOW_CONFIDENCE_CHARS are still
    classified but logged as low-confidence.
    """
    if not profiles:
        raise LangIDError("empty profile set")
    if not text:
        raise LangIDError("cannot identify empty text")
    if len(text) < LOW_CONFIDENCE_CHARS:
        log.warning(
            "identifying only %d chars of text: result is low-confidence",
            len(text),
        )

    cap = max(p.cap for p in profiles)
    doc_ranks = _rank(_char_ngrams(text), cap)
    distances = sorted(
        ((_out_of_place(doc_ranks, p), p.language) for p in profiles)
    )
    best_d, best_lang = distances[0]
    if len(distances) == 1:
        return best_lang, 1.0
    second_d = distances[1][0]
    margin = (second_d - best_d) / max(cap * len(doc_ranks), 1)
    return best_lang, margin


class FilteredScore(NamedTuple):
    """One segment's quality score after the copy-error rule."""

    segment_id: str
    system: str
    original_qe: float | None
    effective_qe: float
    copy_flag: bool
    detected_lang: str


def lid_filter(
    records: Sequence[SegmentRecord],
    system: str,
    profiles: Sequence[LanguageProfile],
    null_penalty: float = 0.0,
) -> list[FilteredScore]:
    """Demote the score of every segment whose translation is in the source language.

    Each record must carry a qe score for `system`. When the detected
    translation language equals the record's source language, the effective
    score becomes `null_penalty` and the copy flag is set; otherwise the
    original score passes through unchanged.
    """
    missing = [
        r.id
        for r in records
        if r.qe_scores is None or system not in r.qe_scores
    ]
    if missing:
        raise LangIDError(
            f"missing qe scores for system {system!r}: {', '.join(missing)}"
        )
    no_output = [r.id for r in records if system not in r.translations]
    if no_output:
        raise LangIDError(
            f"missing translations for system {system!r}: {', '.join(no_output)}"
        )

    out: list[FilteredScore] = []
    for record in records:
        original = record.qe_scores[system]
        text = record.translations[system].raw
        if text.strip():
            detected, _ = identify(text, profiles)
        else:
            log.warning("record %r: empty translation, skipping detection", record.id)
            detected = ""
        is_copy = bool(detected) and primary_subtag(detected) == primary_subtag(
            record.src_lang
        )
        out.append(
            FilteredScore(
                segment_id=record.id,
                system=system,
                original_qe=original,
                effective_qe=null_penalty if is_copy else original,
                copy_flag=is_copy,
                detected_lang=detected,
            )
        )
    return out


def copy_rate(scores: Iterable[FilteredScore]) -> float:
    """Fraction of segments flagged as copies."""
    scores = list(scores)
    if not scores:
        return 0.0
    return sum(1 for s in scores if s.copy_flag) / len(scores)


_DATA_DIR = Path(__file__).parent / "data" / "lid"
BUNDLED_LANGUAGES = ("de", "en", "ru", "zh")


def load_bundled_profiles(
    languages: Sequence[str] = BUNDLED_LANGUAGES,
    cap: int = DEFAULT_PROFILE_SIZE,
) -> list[LanguageProfile]:
    """Train profiles from the training texts shipped with the package."""
    profiles = []
    for lang in languages:
        path = _DATA_DIR / f"train_{lang}.txt"
        if not path.exists():
            raise LangIDError(f"no bundled training text for {lang!r}")
        profiles.append(train_profile(path.read_text(encoding="utf-8"), lang, cap))
    return profiles


def load_heldout_snippets(language: str) -> list[str]:
    """Bundled held-out evaluation snippets for one language."""
    path = _DATA_DIR / f"heldout_{language}.jsonl"
    if not path.exists():
        raise LangIDError(f"no bundled held-out snippets for {language!r}")
    snippets = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                snippets.append(json.loads(line)["text"])
    return snippets
