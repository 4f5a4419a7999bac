"""Prompt construction and a client for an external completion endpoint.

Covers few-shot/zero-shot translation prompts, the synthetic-sentence
generation prompts (idiom/entity/phrase, single or multiple idioms), a
retrying HTTP client, and ingestion of the resulting completions back into
corpus records or monolingual sentence lists.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import random
import re
import threading
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

import requests

from .errors import CompletionError, PromptError
from .textcore import SegmentRecord, tokenize

log = logging.getLogger(__name__)

TRANSLATION_KINDS = ("translate_fewshot", "translate_zeroshot")
SYNTHESIS_KINDS = ("synth_idiom", "synth_entity", "synth_phrase", "synth_multi_idiom")

DEFAULT_SHOTS = 8
API_KEY_ENV = "LITLAB_API_KEY"

LANGUAGE_NAMES = {
    "en": "English",
    "de": "German",
    "ru": "Russian",
    "zh": "Chinese",
    "ja": "Japanese",
    "fr": "French",
    "es": "Spanish",
    "it": "Italian",
    "pt": "Portuguese",
    "nl": "Dutch",
    "cs": "Czech",
    "pl": "Polish",
    "uk": "Ukrainian",
}

_COUNT_WORDS = {2: "two", 3: "three", 4: "four"}
_SYNTH_NOUNS = {
    "synth_idiom": "idiom",
    "synth_entity": "entity",
    "synth_phrase": "phrase",
}


def language_name(code: str) -> str:
    sub = code.replace("_", "-").split("-")[0].lower()
    if sub not in LANGUAGE_NAMES:
        raise PromptError(f"no language name known for code {code!r}")
    return LANGUAGE_NAMES[sub]


@dataclass(frozen=True)
class PromptTemplate:
    """Render pieces for translation prompts; overridable from config."""

    header: str = "Translate this sentence from {src_language} to {tgt_language}:"
    demonstration: str = "{source} = {target}"
    query: str = "{source} ="


DEFAULT_TEMPLATE = PromptTemplate()


@dataclass(frozen=True)
class PromptSpec:
    """A fully rendered prompt plus the fields it was built from."""

    kind: str
    text: str
    id: str
    src_lang: str | None = None
    tgt_lang: str | None = None
    demonstrations: tuple[tuple[str, str], ...] = ()
    expressions: tuple[str, ...] = ()

    def to_obj(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "text": self.text,
            "src_lang": self.src_lang,
            "tgt_lang": self.tgt_lang,
            "demonstrations": [list(d) for d in self.demonstrations],
            "expressions": list(self.expressions),
        }

    @classmethod
    def from_obj(cls, obj: Mapping) -> "PromptSpec":
        return cls(
            kind=obj["kind"],
            text=obj["text"],
            id=obj["id"],
            src_lang=obj.get("src_lang"),
            tgt_lang=obj.get("tgt_lang"),
            demonstrations=tuple(
                (s, t) for s, t in obj.get("demonstrations") or ()
            ),
            expressions=tuple(obj.get("expressions") or ()),
        )


def _content_id(kind: str, *parts: str) -> str:
    digest = hashlib.sha1("\x1f".join(parts).encode("utf-8")).hexdigest()[:10]
    return f"{kind}-{digest}"


def sample_demonstrations(
    devset: Sequence[tuple[str, str]], k: int = DEFAULT_SHOTS, seed: int = 0
) -> list[tuple[str, str]]:
    """Uniform sample without replacement, deterministic for a given seed."""
    if len(devset) < k:
        raise PromptError(f"devset has {len(devset)} pairs, need {k}")
    return random.Random(seed).sample(list(devset), k)


def build_translation_prompt(
    source: str,
    src_lang: str,
    tgt_lang: str,
    demonstrations: Sequence[tuple[str, str]] = (),
    *,
    shots: int = DEFAULT_SHOTS,
    template: PromptTemplate = DEFAULT_TEMPLATE,
    prompt_id: str | None = None,
) -> PromptSpec:
    """Render a translation prompt.

    With demonstrations the prompt is few-shot and must carry exactly
    `shots` of them; without any it is zero-shot.
    """
    if not source.strip():
        raise PromptError("empty source sentence")
    src_name, tgt_name = language_name(src_lang), language_name(tgt_lang)
    if demonstrations and len(demonstrations) != shots:
        raise PromptError(
            f"few-shot prompt needs exactly {shots} demonstrations, "
            f"got {len(demonstrations)}"
        )

    lines = [template.header.format(src_language=src_name, tgt_language=tgt_name)]
    for demo_src, demo_ref in demonstrations:
        lines.append(
            template.demonstration.format(source=demo_src, target=demo_ref)
        )
    lines.append(template.query.format(source=source))
    kind = "translate_fewshot" if demonstrations else "translate_zeroshot"
    return PromptSpec(
        kind=kind,
        text="\n".join(lines),
        id=prompt_id or _content_id(kind, source, src_lang, tgt_lang),
        src_lang=src_lang,
        tgt_lang=tgt_lang,
        demonstrations=tuple(tuple(d) for d in demonstrations),
    )


def build_synthesis_prompt(
    kind: str, expressions: Sequence[str], prompt_id: str | None = None
) -> PromptSpec:
    """Render a synthetic-sentence generation prompt.

    Single-expression kinds ask for a news-style sentence containing the
    idiom/entity/phrase; the multi-idiom kind takes 1 to 4 idioms (one idiom
    falls back to the single-idiom wording).
    """
    if kind not in SYNTHESIS_KINDS:
        raise PromptError(f"unknown synthesis kind {kind!r}")
    expressions = tuple(expressions)
    if any(not e.strip() for e in expressions):
        raise PromptError("expressions must be non-empty")

    if kind == "synth_multi_idiom":
        if not 1 <= len(expressions) <= 4:
            raise PromptError(
                f"synth_multi_idiom takes 1-4 idioms, got {len(expressions)}"
            )
        if len(expressions) == 1:
            text = _single_expression_prompt("idiom", expressions[0])
        else:
            count_word = _COUNT_WORDS[len(expressions)]
            joined = ", ".join(expressions)
            text = (
                f"Q: Generate a sentence using the {count_word} idioms: {joined} "
                f"in the form of a news article sentence. \n A:"
            )
    else:
        if len(expressions) != 1:
            raise PromptError(f"{kind} takes exactly 1 expression, got {len(expressions)}")
        text = _single_expression_prompt(_SYNTH_NOUNS[kind], expressions[0])

    return PromptSpec(
        kind=kind,
        text=text,
        id=prompt_id or _content_id(kind, *expressions),
        expressions=expressions,
    )


def _single_expression_prompt(noun: str, expression: str) -> str:
    return (
        f"Q: Generate a sentence containing the {noun}: {expression}, "
        f"in the form of a news article sentence. \n A:"
    )


@dataclass(frozen=True)
class EndpointConfig:
    """Where and how to send completion requests. Credentials stay in the
    LITLAB_API_KEY environment variable, never in the config file."""

    url: str
    model: str
    max_tokens: int = 256
    temperature: float = 0.0

    @classmethod
    def from_file(cls, path: str | Path) -> "EndpointConfig":
        path = Path(path)
        if path.suffix == ".toml":
            try:
                import tomllib  # type: ignore[import-not-found]
            except ModuleNotFoundError:
                import tomli as tomllib
            obj = tomllib.loads(path.read_text(encoding="utf-8"))
        else:
            obj = json.loads(path.read_text(encoding="utf-8"))
        return cls(
            url=obj["url"],
            model=obj["model"],
            max_tokens=int(obj.get("max_tokens", 256)),
            temperature=float(obj.get("temperature", 0.0)),
        )


_BLANK_LINE = re.compile(r"\n\s*\n")


def extract_answer(raw: str) -> str:
    """Text up to the first blank line, trimmed."""
    return _BLANK_LINE.split(raw, maxsplit=1)[0].strip()


@dataclass
class CompletionRecord:
    """One completion: the raw output plus the extracted first block."""

    prompt_id: str
    raw: str
    text: str
    model: str
    timestamp: str
    usage: dict | None = None
    attempts: int = 1
    prompt: PromptSpec | None = None

    def to_obj(self) -> dict:
        obj = {
            "prompt_id": self.prompt_id,
            "raw": self.raw,
            "text": self.text,
            "model": self.model,
            "timestamp": self.timestamp,
            "usage": self.usage,
            "attempts": self.attempts,
        }
        if self.prompt is not None:
            obj["prompt"] = self.prompt.to_obj()
        return obj

    @classmethod
    def from_obj(cls, obj: Mapping) -> "CompletionRecord":
        prompt = obj.get("prompt")
        return cls(
            prompt_id=obj["prompt_id"],
            raw=obj["raw"],
            text=obj["text"],
            model=obj["model"],
            timestamp=obj["timestamp"],
            usage=obj.get("usage"),
            attempts=obj.get("attempts", 1),
            prompt=PromptSpec.from_obj(prompt) if prompt else None,
        )


RETRYABLE_STATUSES = {429, 500, 502, 503, 504}


def request_completion(
    prompt: PromptSpec,
    config: EndpointConfig,
    *,
    max_retries: int = 3,
    backoff_base: float = 0.5,
    session: requests.Session | None = None,
    sleep: Callable[[float], None] = time.sleep,
    timeout: float = 60.0,
) -> CompletionRecord:
    """POST the prompt as a JSON completion request.

    Transient failures (429 and 5xx, or connection errors) are retried with
    exponential backoff up to `max_retries` times; auth failures are
    terminal immediately. The raw output is preserved next to the extracted
    answer, and the number of attempts is recorded.
    """
    sess = session or requests.Session()
    headers = {"Content-Type": "application/json"}
    api_key = os.environ.get(API_KEY_ENV)
    if api_key:
        headers["Authorization"] = f"Bearer {api_key}"
    payload = {
        "model": config.model,
        "prompt": prompt.text,
        "max_tokens": config.max_tokens,
        "temperature": config.temperature,
    }

    last_status: int | None = None
    attempts = 0
    for attempt in range(max_retries + 1):
        attempts = attempt + 1
        try:
            resp = sess.post(config.url, json=payload, headers=headers, timeout=timeout)
        except requests.RequestException as e:
            last_status = None
            if attempt == max_retries:
                raise CompletionError(f"request failed after {attempts} attempts: {e}")
            sleep(backoff_base * 2**attempt)
            continue
        if resp.status_code in (401, 403):
            raise CompletionError(
                f"authentication failed (status {resp.status_code})",
                status=resp.status_code,
            )
        if resp.status_code in RETRYABLE_STATUSES:
            last_status = resp.status_code
            if attempt == max_retries:
                break
            sleep(backoff_base * 2**attempt)
            continue
        if resp.status_code != 200:
            raise CompletionError(
                f"unexpected status {resp.status_code}", status=resp.status_code
            )
        data = resp.json()
        raw = _response_text(data)
        return CompletionRecord(
            prompt_id=prompt.id,
            raw=raw,
            text=extract_answer(raw),
            model=config.model,
            timestamp=datetime.now(timezone.utc).isoformat(),
            usage=data.get("usage"),
            attempts=attempts,
            prompt=prompt,
        )
    raise CompletionError(
        f"gave up after {attempts} attempts (last status {last_status})",
        status=last_status,
    )


def _response_text(data: Mapping) -> str:
    choices = data.get("choices")
    if choices:
        return choices[0].get("text", "")
    if "text" in data:
        return data["text"]
    raise CompletionError("response carries neither 'choices' nor 'text'")


@dataclass(frozen=True)
class GeneratedSentence:
    """A synthetic sentence tagged with the expressions it should contain."""

    text: str
    expressions: tuple[str, ...]
    prompt_id: str
    expression_missing: bool = False


def ingest_generations(
    completions: Sequence[CompletionRecord],
    kind: str,
    *,
    records: Sequence[SegmentRecord] | None = None,
    system: str | None = None,
) -> list[GeneratedSentence] | list[SegmentRecord]:
    """Turn completions into corpus material.

    Synthesis kinds yield tagged monolingual sentences; a sentence that does
    not contain one of its requested expressions is flagged rather than
    dropped. Translation kinds attach each completion to the record whose id
    matches the prompt id, under `system` (defaulting to the model name),
    and return the updated records. Completions with empty extracted text
    are skipped with a warning.
    """
    if not completions:
        raise PromptError("no completions to ingest")

    if kind in SYNTHESIS_KINDS:
        out: list[GeneratedSentence] = []
        for c in completions:
            if not c.text.strip():
                log.warning("completion %s: empty text, skipped", c.prompt_id)
                continue
            expressions = c.prompt.expressions if c.prompt else ()
            lowered = c.text.lower()
            missing = any(e.lower() not in lowered for e in expressions)
            out.append(
                GeneratedSentence(
                    text=c.text,
                    expressions=tuple(expressions),
                    prompt_id=c.prompt_id,
                    expression_missing=missing,
                )
            )
        return out

    if kind in TRANSLATION_KINDS:
        if records is None:
            raise PromptError("translation ingestion requires corpus records")
        by_id = {r.id: r for r in records}
        for c in completions:
            if not c.text.strip():
                log.warning("completion %s: empty text, skipped", c.prompt_id)
                continue
            record = by_id.get(c.prompt_id)
            if record is None:
                raise PromptError(f"completion for unknown record id {c.prompt_id!r}")
            name = system or c.model
            record.translations[name] = tokenize(c.text, record.tgt_lang)
        return list(records)

    raise PromptError(f"unknown ingestion kind {kind!r}")


def run_prompts(
    prompts: Sequence[PromptSpec],
    config: EndpointConfig,
    out_path: str | Path,
    *,
    concurrency: int = 1,
    max_retries: int = 3,
    session: requests.Session | None = None,
) -> list[CompletionRecord]:
    """Request completions for all prompts, optionally in parallel.

    Up to `concurrency` requests are in flight at once; finished records are
    appended to `out_path` as they arrive through a single writer, so the
    file stays line-consistent even if the run is interrupted. Returns the
    records in prompt order.
    """
    from concurrent.futures import ThreadPoolExecutor

    if concurrency < 1:
        raise PromptError("concurrency must be >= 1")
    write_lock = threading.Lock()
    results: list[CompletionRecord | None] = [None] * len(prompts)

    with open(out_path, "w", encoding="utf-8") as fh:

        def one(index: int) -> None:
            record = request_completion(
                prompts[index], config, max_retries=max_retries, session=session
            )
            with write_lock:
                fh.write(json.dumps(record.to_obj(), ensure_ascii=False) + "\n")
                fh.flush()
            results[index] = record

        if concurrency == 1:
            for k in range(len(prompts)):
                one(k)
        else:
            with ThreadPoolExecutor(max_workers=concurrency) as pool:
                for future in [pool.submit(one, k) for k in range(len(prompts))]:
                    future.result()
    return [r for r in results if r is not None]


def save_prompts(prompts: Iterable[PromptSpec], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for p in prompts:
            fh.write(json.dumps(p.to_obj(), ensure_ascii=False) + "\n")


def load_prompts(path: str | Path) -> list[PromptSpec]:
    prompts = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                prompts.append(PromptSpec.from_obj(json.loads(line)))
    return prompts


def save_completions(completions: Iterable[CompletionRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for c in completions:
            fh.write(json.dumps(c.to_obj(), ensure_ascii=False) + "\n")


def load_completions(path: str | Path) -> list[CompletionRecord]:
    completions = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                completions.append(CompletionRecord.from_obj(json.loads(line)))
    return completions


def load_devset(path: str | Path) -> list[tuple[str, str]]:
    """JSONL of {"source", "reference"} pairs used for demonstrations."""
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            obj = json.loads(line)
            if "source" not in obj or "reference" not in obj:
                raise PromptError(f"line {lineno}: devset needs source and reference")
            pairs.append((obj["source"], obj["reference"]))
    return pairs


def load_expressions(path: str | Path) -> list[str]:
    """One expression per line; blank lines and '#' comments skipped."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                out.append(line)
    return out
