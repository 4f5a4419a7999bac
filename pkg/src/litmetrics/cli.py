"""Command-line interface.

Subcommands: metrics (score one system), compare (multi-system diff table),
tally (judgment log to count table), prompt build, gen run, gen ingest, and
serve (annotation server). Validation problems exit with code 2.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from . import annotate, evalharness, langid, llmgen, textcore
from .errors import CompletionError, ValidationError


def _fail_on_validation(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ValidationError, FileNotFoundError, CompletionError) as e:
            raise click.UsageError(str(e))

    return wrapper


@click.group()
def main():
    """Translation literalness metrics and evaluation tooling."""


def _load_records(corpus, alignments):
    records = textcore.load_corpus(corpus)
    provenance = set()
    if alignments:
        from .alignment import load_alignment_manifest

        provenance = textcore.attach_alignments(
            records, load_alignment_manifest(alignments)
        )
    return records, provenance


def _stopword_options(fn):
    fn = click.option(
        "--stopwords", type=click.Path(exists=True), default=None,
        help="Source-language stopword file (one token per line).",
    )(fn)
    fn = click.option(
        "--tgt-stopwords", type=click.Path(exists=True), default=None,
        help="Target-language stopword file.",
    )(fn)
    fn = click.option(
        "--filter-stopwords", is_flag=True,
        help="Drop stopword links and use the content-token USW denominator.",
    )(fn)
    return fn


def _comparison_kwargs(records, stopwords, tgt_stopwords, filter_stopwords):
    kwargs = {}
    if stopwords:
        kwargs["src_stopwords"] = textcore.load_stopwords(
            stopwords, records[0].src_lang
        )
    if tgt_stopwords:
        kwargs["tgt_stopwords"] = textcore.load_stopwords(
            tgt_stopwords, records[0].tgt_lang
        )
    kwargs["filter_stopwords"] = filter_stopwords
    return kwargs


@main.command()
@click.option("--corpus", type=click.Path(exists=True), required=True)
@click.option("--system", required=True, help="System name to score.")
@click.option("--alignments", type=click.Path(exists=True), default=None,
              help="Sidecar alignment manifest JSONL.")
@click.option("--internal-aligner", is_flag=True,
              help="Align with the built-in statistical aligner.")
@_stopword_options
@click.option("--agg", type=click.Choice(["micro", "macro"]), default="micro")
@click.option("--format", "fmt", type=click.Choice(["json", "csv", "markdown"]),
              default="markdown")
@_fail_on_validation
def metrics(corpus, system, alignments, internal_aligner, stopwords,
            tgt_stopwords, filter_stopwords, agg, fmt):
    """Compute literalness metrics for one system."""
    records, _ = _load_records(corpus, alignments)
    source = "internal-aligner" if internal_aligner else "ingested"
    comparison = evalharness.compare_systems(
        records, [system], system, source, agg=agg,
        **_comparison_kwargs(records, stopwords, tgt_stopwords, filter_stopwords),
    )
    click.echo(evalharness.render_report(comparison.reports[system], fmt), nl=False)


@main.command()
@click.option("--corpus", type=click.Path(exists=True), required=True)
@click.option("--systems", required=True,
              help="Comma-separated system names.")
@click.option("--baseline", required=True)
@click.option("--alignments", type=click.Path(exists=True), default=None)
@click.option("--internal-aligner", is_flag=True)
@_stopword_options
@click.option("--nm", type=click.Choice(["dev", "cross", "both"]), default="both",
              help="Which non-monotonicity variant to show in markdown output.")
@click.option("--agg", type=click.Choice(["micro", "macro"]), default="micro")
@click.option("--bootstrap", "bootstrap_n", type=int, default=0,
              help="Bootstrap resamples for confidence intervals (0 = off).")
@click.option("--seed", type=int, default=0)
@click.option("--lid-filter", "use_lid", is_flag=True,
              help="Demote qe scores of translations detected in the source language.")
@click.option("--null-penalty", type=float, default=0.0)
@click.option("--format", "fmt", type=click.Choice(["json", "csv", "markdown"]),
              default="markdown")
@_fail_on_validation
def compare(corpus, systems, baseline, alignments, internal_aligner, stopwords,
            tgt_stopwords, filter_stopwords, nm, agg, bootstrap_n, seed,
            use_lid, null_penalty, fmt):
    """Compare several systems against a baseline."""
    records, _ = _load_records(corpus, alignments)
    system_list = [s.strip() for s in systems.split(",") if s.strip()]
    source = "internal-aligner" if internal_aligner else "ingested"
    profiles = langid.load_bundled_profiles() if use_lid else None
    comparison = evalharness.compare_systems(
        records, system_list, baseline, source,
        agg=agg, profiles=profiles, null_penalty=null_penalty,
        bootstrap_resamples=bootstrap_n, seed=seed,
        **_comparison_kwargs(records, stopwords, tgt_stopwords, filter_stopwords),
    )
    text = evalharness.render_report(comparison, fmt)
    if fmt == "markdown" and nm != "both":
        drop = "NM (cross)" if nm == "dev" else "NM (dev)"
        text = _drop_markdown_column(text, drop)
    click.echo(text, nl=False)


def _drop_markdown_column(text: str, header: str) -> str:
    """Drop one table column, matched by header cell (plain or ' diff')."""
    out = []
    drop_idx: int | None = None
    for line in text.splitlines():
        if not line.startswith("|"):
            drop_idx = None
            out.append(line)
            continue
        cells = [c.strip() for c in line.strip().strip("|").split("|")]
        if drop_idx is None:
            drop_idx = next(
                (k for k, c in enumerate(cells) if c in (header, header + " diff")),
                None,
            )
            if drop_idx is None:
                out.append(line)
                continue
        if drop_idx < len(cells):
            cells.pop(drop_idx)
        out.append("| " + " | ".join(cells) + " |")
    return "\n".join(out) + "\n"


@main.command()
@click.argument("judgments", type=click.Path(exists=True))
@click.option("--format", "fmt", type=click.Choice(["json", "csv", "markdown"]),
              default="markdown")
@_fail_on_validation
def tally(judgments, fmt):
    """Tally a judgment JSONL log into a count table."""
    rows = []
    with open(judgments, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                rows.append(json.loads(line))
    sheet = evalharness.tally_judgments(rows)
    click.echo(evalharness.render_report(sheet, fmt), nl=False)


@main.group()
def prompt():
    """Prompt construction."""


@prompt.command("build")
@click.option("--kind", required=True,
              type=click.Choice(list(llmgen.TRANSLATION_KINDS) +
                                list(llmgen.SYNTHESIS_KINDS)))
@click.option("--corpus", type=click.Path(exists=True), default=None,
              help="Corpus JSONL; required for translation kinds.")
@click.option("--devset", type=click.Path(exists=True), default=None,
              help="JSONL of {source, reference} demonstration candidates.")
@click.option("--expressions-file", type=click.Path(exists=True), default=None,
              help="One expression per line; required for synthesis kinds.")
@click.option("--group-size", type=int, default=1,
              help="Idioms per prompt for synth_multi_idiom (1-4).")
@click.option("--shots", type=int, default=llmgen.DEFAULT_SHOTS)
@click.option("--seed", type=int, default=0)
@click.option("--out", type=click.Path(), required=True)
@_fail_on_validation
def prompt_build(kind, corpus, devset, expressions_file, group_size, shots,
                 seed, out):
    """Build a prompts JSONL file."""
    prompts = []
    if kind in llmgen.TRANSLATION_KINDS:
        if not corpus:
            raise click.UsageError("translation kinds require --corpus")
        records = textcore.load_corpus(corpus)
        demos = []
        if kind == "translate_fewshot":
            if not devset:
                raise click.UsageError("translate_fewshot requires --devset")
            demos = llmgen.sample_demonstrations(
                llmgen.load_devset(devset), shots, seed
            )
        for record in records:
            prompts.append(
                llmgen.build_translation_prompt(
                    record.source.raw, record.src_lang, record.tgt_lang,
                    demos, shots=shots, prompt_id=record.id,
                )
            )
    else:
        if not expressions_file:
            raise click.UsageError("synthesis kinds require --expressions-file")
        expressions = llmgen.load_expressions(expressions_file)
        if kind == "synth_multi_idiom":
            groups = [
                expressions[i : i + group_size]
                for i in range(0, len(expressions) - group_size + 1, group_size)
            ]
            for group in groups:
                prompts.append(llmgen.build_synthesis_prompt(kind, group))
        else:
            for expr in expressions:
                prompts.append(llmgen.build_synthesis_prompt(kind, [expr]))
    llmgen.save_prompts(prompts, out)
    click.echo(f"wrote {len(prompts)} prompts to {out}")


@main.group()
def gen():
    """Completion generation against an external endpoint."""


@gen.command("run")
@click.option("--prompts", "prompts_path", type=click.Path(exists=True), required=True)
@click.option("--config", "config_path", type=click.Path(exists=True), required=True,
              help="Endpoint config (TOML or JSON): url, model, max_tokens, temperature.")
@click.option("--out", type=click.Path(), required=True)
@click.option("--max-retries", type=int, default=3)
@click.option("--concurrency", type=int, default=1,
              help="Maximum completion requests in flight at once.")
@_fail_on_validation
def gen_run(prompts_path, config_path, out, max_retries, concurrency):
    """Request a completion for every prompt; writes a completions JSONL."""
    config = llmgen.EndpointConfig.from_file(config_path)
    prompts = llmgen.load_prompts(prompts_path)
    completions = llmgen.run_prompts(
        prompts, config, out, concurrency=concurrency, max_retries=max_retries
    )
    click.echo(f"wrote {len(completions)} completions to {out}")


@gen.command("ingest")
@click.option("--completions", "completions_path", type=click.Path(exists=True),
              required=True)
@click.option("--kind", required=True,
              type=click.Choice(list(llmgen.TRANSLATION_KINDS) +
                                list(llmgen.SYNTHESIS_KINDS)))
@click.option("--corpus", type=click.Path(exists=True), default=None,
              help="Corpus to attach translations to (translation kinds).")
@click.option("--system", default=None,
              help="System name for attached translations (default: model name).")
@click.option("--out", type=click.Path(), required=True)
@_fail_on_validation
def gen_ingest(completions_path, kind, corpus, system, out):
    """Turn completions into a corpus or a tagged sentence list."""
    completions = llmgen.load_completions(completions_path)
    if kind in llmgen.TRANSLATION_KINDS:
        if not corpus:
            raise click.UsageError("translation kinds require --corpus")
        records = textcore.load_corpus(corpus)
        llmgen.ingest_generations(completions, kind, records=records, system=system)
        textcore.save_corpus(records, out)
        click.echo(f"wrote {len(records)} records to {out}")
    else:
        sentences = llmgen.ingest_generations(completions, kind)
        with open(out, "w", encoding="utf-8") as fh:
            for s in sentences:
                fh.write(json.dumps({
                    "text": s.text,
                    "expressions": list(s.expressions),
                    "prompt_id": s.prompt_id,
                    "expression_missing": s.expression_missing,
                }, ensure_ascii=False) + "\n")
        flagged = sum(1 for s in sentences if s.expression_missing)
        click.echo(
            f"wrote {len(sentences)} sentences to {out} "
            f"({flagged} flagged expression-missing)"
        )


@main.command()
@click.option("--corpus", type=click.Path(exists=True), required=True)
@click.option("--systems", required=True, help="Exactly two, comma-separated.")
@click.option("--n", "sample_size", type=int, default=100)
@click.option("--seed", type=int, default=0)
@click.option("--port", type=int, default=8000)
@click.option("--host", default="127.0.0.1")
@click.option("--session-id", default="main")
@click.option("--data-dir", type=click.Path(), default="annotation_data")
@click.option("--ui-dir", type=click.Path(), default=None,
              help="Directory with the built UI bundle to serve at /.")
@_fail_on_validation
def serve(corpus, systems, sample_size, seed, port, host, session_id,
          data_dir, ui_dir):
    """Run the pairwise annotation server."""
    import uvicorn

    system_list = tuple(s.strip() for s in systems.split(",") if s.strip())
    storage = Path(data_dir) / session_id
    if (storage / "meta.json").exists():
        session = annotate.Session.load(storage)
        click.echo(f"resumed session {session_id!r} with "
                   f"{len(session.judgments())} judgments")
    else:
        records = textcore.load_corpus(corpus)
        session = annotate.create_session(
            records, system_list, sample_size, seed, session_id, storage
        )
        click.echo(f"created session {session_id!r} with {session.total} tasks")
    app = annotate.create_app({session.session_id: session}, ui_dir)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    sys.exit(main())
