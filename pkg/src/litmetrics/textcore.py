"""Tokenization, stopword handling, and corpus I/O.

Tokens are the alignment units everywhere downstream. The tokenizer is
deterministic and rule based: whitespace languages split on whitespace and
detach leading/trailing punctuation; Chinese and Japanese segment per
character (Latin/digit runs stay whole) so alignment positions match
character-level alignments. Pre-tokenized input is accepted verbatim via
the corpus schema's token fields.
"""

from __future__ import annotations

import json
import logging
import unicodedata
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .alignment import AlignmentSet, parse_pharaoh
from .errors import CorpusFormatError

log = logging.getLogger(__name__)

# Primary subtags that use per-character segmentation.
CHAR_SEGMENTED = {"zh", "ja"}
# Primary subtags known to be whitespace-delimited. Anything else falls back
# to whitespace mode with a logged warning.
WHITESPACE_SEGMENTED = {
    "en", "de", "ru", "fr", "es", "pt", "it", "nl", "cs", "pl", "uk", "sv",
    "da", "no", "fi", "tr", "ro", "hu", "bg", "el", "id", "vi", "ar", "he",
    "hi", "ko",
}


def primary_subtag(language: str) -> str:
    """Lowercased primary subtag of a BCP-47-style code ("zh-CN" -> "zh")."""
    return language.replace("_", "-").split("-")[0].lower()


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


@dataclass(frozen=True)
class TokenizedSegment:
    """A sentence as an ordered token sequence with its language tag."""

    tokens: tuple[str, ...]
    language: str
    raw: str

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        for tok in self.tokens:
            if not tok:
                raise CorpusFormatError("tokens must be non-empty")
            if any(ch.isspace() for ch in tok):
                raise CorpusFormatError(f"token {tok!r} contains whitespace")

    def __len__(self) -> int:
        return len(self.tokens)


def _tokenize_whitespace(text: str) -> list[str]:
    tokens: list[str] = []
    for chunk in text.split():
        leading: list[str] = []
        trailing: list[str] = []
        while chunk and _is_punct(chunk[0]):
            leading.append(chunk[0])
            chunk = chunk[1:]
        while chunk and _is_punct(chunk[-1]):
            trailing.append(chunk[-1])
            chunk = chunk[:-1]
        tokens.extend(leading)
        if chunk:
            tokens.append(chunk)
        tokens.extend(reversed(trailing))
    return tokens


def _tokenize_chars(text: str) -> list[str]:
    tokens: list[str] = []
    run = ""
    for ch in text:
        if ch.isspace():
            if run:
                tokens.append(run)
                run = ""
        elif ch.isascii() and ch.isalnum():
            run += ch
        else:
            if run:
                tokens.append(run)
                run = ""
            tokens.append(ch)
    if run:
        tokens.append(run)
    return tokens


def tokenize(text: str, language: str) -> TokenizedSegment:
    """Segment `text` deterministically according to its language.

    Unknown language codes fall back to whitespace mode and log a warning.
    Every non-whitespace character of the input survives into exactly one
    token.
    """
    sub = primary_subtag(language)
    if sub in CHAR_SEGMENTED:
        tokens = _tokenize_chars(text)
    else:
        if sub not in WHITESPACE_SEGMENTED:
            log.warning(
                "unknown language code %r: falling back to whitespace tokenization",
                language,
            )
        tokens = _tokenize_whitespace(text)
    return TokenizedSegment(tuple(tokens), language, text)


@dataclass(frozen=True)
class StopwordSet:
    """Case-insensitive stopword membership for one language."""

    language: str
    words: frozenset[str]

    def __post_init__(self):
        object.__setattr__(
            self, "words", frozenset(w.casefold() for w in self.words)
        )

    def __contains__(self, token: str) -> bool:
        return token.casefold() in self.words

    def __len__(self) -> int:
        return len(self.words)

    def mask(self, tokens: Sequence[str]) -> list[bool]:
        """True at positions holding stopwords."""
        return [tok in self for tok in tokens]


def load_stopwords(path: str | Path, language: str) -> StopwordSet:
    """Read a one-token-per-line stopword file; '#' lines are comments."""
    words = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            words.add(line)
    if not words:
        log.warning("stopword file %s produced an empty set", path)
    return StopwordSet(language, frozenset(words))


@dataclass
class SegmentRecord:
    """One evaluation unit: a source and the systems' translations of it."""

    id: str
    src_lang: str
    tgt_lang: str
    source: TokenizedSegment
    translations: dict[str, TokenizedSegment]
    qe_scores: dict[str, float] | None = None
    alignments: dict[str, AlignmentSet] | None = None

    def __post_init__(self):
        if self.alignments:
            for system, a in self.alignments.items():
                self._check_alignment(system, a)

    def _check_alignment(self, system: str, a: AlignmentSet) -> None:
        if a.src_len != len(self.source):
            raise CorpusFormatError(
                f"record {self.id!r}: alignment for {system!r} declares "
                f"src_len {a.src_len}, source has {len(self.source)} tokens"
            )
        if system not in self.translations:
            raise CorpusFormatError(
                f"record {self.id!r}: alignment for unknown system {system!r}"
            )
        if a.tgt_len != len(self.translations[system]):
            raise CorpusFormatError(
                f"record {self.id!r}: alignment for {system!r} declares "
                f"tgt_len {a.tgt_len}, translation has "
                f"{len(self.translations[system])} tokens"
            )

    def set_alignment(self, system: str, a: AlignmentSet) -> None:
        self._check_alignment(system, a)
        if self.alignments is None:
            self.alignments = {}
        self.alignments[system] = a


_REQUIRED_FIELDS = ("id", "src_lang", "tgt_lang", "source", "translations")


def _record_from_obj(obj: dict, lineno: int) -> SegmentRecord:
    for name in _REQUIRED_FIELDS:
        if name not in obj:
            raise CorpusFormatError(f"line {lineno}: missing field {name}")
    src_lang, tgt_lang = obj["src_lang"], obj["tgt_lang"]
    if not isinstance(obj["translations"], dict):
        raise CorpusFormatError(f"line {lineno}: translations must be an object")

    if "source_tokens" in obj:
        source = TokenizedSegment(
            tuple(obj["source_tokens"]), src_lang, obj["source"]
        )
    else:
        source = tokenize(obj["source"], src_lang)

    provided = obj.get("translation_tokens") or {}
    translations = {}
    for system, text in obj["translations"].items():
        if not isinstance(text, str):
            raise CorpusFormatError(
                f"line {lineno}: translation for {system!r} must be a string"
            )
        if system in provided:
            translations[system] = TokenizedSegment(
                tuple(provided[system]), tgt_lang, text
            )
        else:
            translations[system] = tokenize(text, tgt_lang)

    qe = obj.get("qe")
    if qe is not None:
        for system, score in qe.items():
            if system not in translations:
                raise CorpusFormatError(
                    f"line {lineno}: qe score for unknown system {system!r}"
                )
            if not isinstance(score, (int, float)) or isinstance(score, bool):
                raise CorpusFormatError(
                    f"line {lineno}: qe score for {system!r} must be a number"
                )
        qe = {system: float(score) for system, score in qe.items()}

    return SegmentRecord(
        id=str(obj["id"]),
        src_lang=src_lang,
        tgt_lang=tgt_lang,
        source=source,
        translations=translations,
        qe_scores=qe,
    )


def load_corpus(path: str | Path) -> list[SegmentRecord]:
    """Read a JSONL corpus, tokenizing where token fields are absent.

    Records come back in file order. Malformed lines and duplicate ids raise
    CorpusFormatError naming the line.
    """
    records: list[SegmentRecord] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise CorpusFormatError(f"line {lineno}: invalid JSON: {e}") from None
            try:
                record = _record_from_obj(obj, lineno)
            except CorpusFormatError:
                raise
            except (TypeError, ValueError) as e:
                raise CorpusFormatError(f"line {lineno}: {e}") from None
            if record.id in seen:
                raise CorpusFormatError(
                    f"line {lineno}: duplicate id {record.id!r}"
                )
            seen.add(record.id)
            records.append(record)
    return records


def record_to_obj(record: SegmentRecord) -> dict:
    """JSON-serializable form of a record; token fields always included."""
    obj: dict = {
        "id": record.id,
        "src_lang": record.src_lang,
        "tgt_lang": record.tgt_lang,
        "source": record.source.raw,
        "source_tokens": list(record.source.tokens),
        "translations": {s: t.raw for s, t in record.translations.items()},
        "translation_tokens": {
            s: list(t.tokens) for s, t in record.translations.items()
        },
    }
    if record.qe_scores is not None:
        obj["qe"] = dict(record.qe_scores)
    return obj


def save_corpus(records: Iterable[SegmentRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record_to_obj(record), ensure_ascii=False) + "\n")


def attach_alignments(
    records: Sequence[SegmentRecord], entries: Iterable[dict]
) -> set[str]:
    """Attach sidecar manifest entries to records; returns aligner names seen.

    Each entry is {"id", "system", "alignment"} with an optional "aligner"
    provenance string. Unknown record ids or systems raise CorpusFormatError.
    """
    by_id = {r.id: r for r in records}
    provenance: set[str] = set()
    for entry in entries:
        record = by_id.get(str(entry["id"]))
        if record is None:
            raise CorpusFormatError(f"alignment for unknown record id {entry['id']!r}")
        system = entry["system"]
        if system not in record.translations:
            raise CorpusFormatError(
                f"record {record.id!r}: alignment for unknown system {system!r}"
            )
        a = parse_pharaoh(
            entry["alignment"], len(record.source), len(record.translations[system])
        )
        record.set_alignment(system, a)
        if entry.get("aligner"):
            provenance.add(str(entry["aligner"]))
    return provenance
