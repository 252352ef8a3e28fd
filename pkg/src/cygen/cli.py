"""Operator entry point: one config file, one subcommand per pipeline stage."""

from __future__ import annotations

import json
import logging
import sys
from pathlib import Path
from typing import Optional

import click

from . import pipeline_llm, pipeline_template
from .config import Config, check_paths_exist, load_config
from .errors import ConfigError, CygenError
from .evaluation import (
    aggregate,
    execute_and_score,
    pairwise_judge,
    read_records,
    scaffold_eval_questions,
    write_records,
)
from .export import (
    DEFAULT_INSTRUCTION,
    DatasetManifest,
    assemble,
    audit_provenance,
    parse_scale,
    write_dataset,
)
from .gateway import LlmGateway
from .ner import NerRegistry
from .pairs import read_pairs, write_pairs
from .prompts import PromptLibrary
from .review.store import ReviewStore
from .schema import extract_schema, render_schema, save_schema
from .seeds import derive_seed
from .validators import (
    ValidationContext,
    passing_rate_report,
    read_reports,
    render_cell,
    run_all,
    write_reports,
)

logger = logging.getLogger(__name__)

_ERROR_EXIT = {ConfigError: 2}


def _fail(exc: CygenError, module: str) -> None:
    payload = {"error": type(exc).__name__, "module": module, "message": str(exc)}
    click.echo(json.dumps(payload), err=True)
    sys.exit(_ERROR_EXIT.get(type(exc), 1))


class _Context:
    def __init__(self, config_path: Optional[str]):
        self.config: Config = load_config(config_path)

    def prompts(self) -> PromptLibrary:
        return PromptLibrary(self.config.paths.prompts)


@click.group()
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="YAML config file (defaults are used when omitted).")
@click.option("--verbose", is_flag=True, default=False)
@click.pass_context
def main(ctx: click.Context, config_path: Optional[str], verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        ctx.obj = _Context(config_path)
    except CygenError as exc:
        _fail(exc, "config")


# --- schema ------------------------------------------------------------------------


@main.group()
def schema() -> None:
    """Schema extraction and caching."""


@schema.command("extract")
@click.option("--db", "db_name", required=True)
@click.option("-o", "--output", type=click.Path(), default=None,
              help="Schema cache path (JSON); also writes a .txt rendering.")
@click.pass_obj
def schema_extract(ctx: _Context, db_name: str, output: Optional[str]) -> None:
    try:
        session = ctx.config.connect(db_name)
        extracted = extract_schema(session)
        out = Path(output) if output else Path(ctx.config.paths.output) / f"schema_{db_name}.json"
        out.parent.mkdir(parents=True, exist_ok=True)
        save_schema(extracted, out)
        out.with_suffix(".txt").write_text(render_schema(extracted) + "\n", encoding="utf-8")
        click.echo(f"wrote {out} ({len(extracted.node_labels)} labels, "
                   f"{len(extracted.valid_relationships)} relationship triples)")
    except CygenError as exc:
        _fail(exc, "graph-metadata")


# --- generation ----------------------------------------------------------------------


@main.group()
def generate() -> None:
    """Synthetic pair generation pipelines."""


def _few_shots(ctx: _Context, db_name: str) -> list[dict]:
    if ctx.config.paths.few_shots:
        return pipeline_llm.load_few_shots(ctx.config.paths.few_shots)
    builtin = Path(__file__).parent / "prompts" / "few_shots"
    candidate = builtin / f"{db_name}.jsonl"
    if not candidate.exists():
        candidate = builtin / "default.jsonl"
    return pipeline_llm.load_few_shots(candidate)


@generate.command("p1")
@click.option("--db", "db_name", required=True)
@click.option("-o", "--output", type=click.Path(), default=None)
@click.option("--k", type=int, default=None, help="Pairs per category.")
@click.pass_obj
def generate_p1(ctx: _Context, db_name: str, output: Optional[str],
                k: Optional[int]) -> None:
    try:
        check_paths_exist(ctx.config, "prompts", "few_shots")
        cfg = ctx.config
        session = cfg.connect(db_name)
        extracted = extract_schema(session)
        gateway = cfg.build_gateway(session=session, schema=extracted)
        role = cfg.llm.role("generator")
        merged, result = pipeline_llm.run_pipeline(
            gateway,
            render_schema(extracted),
            db_name,
            _few_shots(ctx, db_name),
            k=k or cfg.pipeline.k,
            iterations=cfg.pipeline.iterations,
            target_count=cfg.pipeline.target_count,
            model=role.model,
            temperature=role.temperature,
            prompts=ctx.prompts(),
            max_workers=cfg.parallelism,
            language_tag=cfg.database(db_name).language_tag,
        )
        out = Path(output) if output else Path(cfg.paths.output) / f"pairs_p1_{db_name}.jsonl"
        out.parent.mkdir(parents=True, exist_ok=True)
        write_pairs(result.pairs, out)
        cats_path = out.parent / f"categories_{db_name}.json"
        cats_path.write_text(json.dumps(
            {"source": merged.source, "categories": [list(c) for c in merged.categories]},
            indent=2, ensure_ascii=False, sort_keys=True,
        ) + "\n", encoding="utf-8")
        for diag in result.diagnostics:
            logger.warning("p1: %s", diag)
        click.echo(f"wrote {out} ({len(result.pairs)} pairs, "
                   f"{len(result.diagnostics)} diagnostics); categories at {cats_path}")
    except CygenError as exc:
        _fail(exc, "pipeline-prompting")


@generate.command("p2")
@click.option("--db", "db_name", required=True)
@click.option("-o", "--output", type=click.Path(), default=None)
@click.option("--per-template", type=int, default=None)
@click.option("--seed", type=int, default=None, help="Overrides root_seed.")
@click.pass_obj
def generate_p2(ctx: _Context, db_name: str, output: Optional[str],
                per_template: Optional[int], seed: Optional[int]) -> None:
    try:
        check_paths_exist(ctx.config, "templates")
        cfg = ctx.config
        session = cfg.connect(db_name)
        extracted = extract_schema(session)
        load = pipeline_template.load_templates(cfg.paths.templates, extracted)
        for template_id, reason in load.excluded:
            logger.warning("excluded template %s: %s", template_id, reason)
        base_seed = derive_seed(seed if seed is not None else cfg.root_seed, "p2", db_name)
        diagnostics: list[str] = []
        pairs = list(pipeline_template.generate_instances(
            load.active, extracted, session, db_name,
            per_template or cfg.pipeline.per_template, base_seed, diagnostics,
        ))
        out = Path(output) if output else Path(cfg.paths.output) / f"pairs_p2_{db_name}.jsonl"
        out.parent.mkdir(parents=True, exist_ok=True)
        write_pairs(pairs, out)
        coverage = pipeline_template.registry_tag_coverage(load.active)
        click.echo(f"wrote {out} ({len(pairs)} pairs from {len(load.active)} active "
                   f"templates, {len(load.excluded)} excluded)")
        click.echo("syntax tag coverage: " + ", ".join(f"{t}={n}" for t, n in coverage.items()))
    except CygenError as exc:
        _fail(exc, "pipeline-template")


# --- template registry tools ----------------------------------------------------------


@main.group()
def templates() -> None:
    """Inspect the template registry."""


@templates.command("list")
@click.option("--db", "db_name", default=None, help="Filter to templates active for this database.")
@click.pass_obj
def templates_list(ctx: _Context, db_name: Optional[str]) -> None:
    try:
        check_paths_exist(ctx.config, "templates")
        if db_name:
            extracted = extract_schema(ctx.config.connect(db_name))
        else:
            extracted = None
        directory = ctx.config.paths.templates
        if extracted is not None:
            load = pipeline_template.load_templates(directory, extracted)
            for template in load.active:
                click.echo(f"{template.id}\tactive\t{','.join(sorted(template.syntax_tags))}")
            for template_id, reason in load.excluded:
                click.echo(f"{template_id}\texcluded\t{reason}")
        else:
            import yaml as _yaml
            base = Path(directory) if directory else Path(pipeline_template.__file__).parent / "templates"
            for file in sorted(base.glob("*.yaml")):
                template = pipeline_template.parse_template(
                    _yaml.safe_load(file.read_text(encoding="utf-8")), path=str(file),
                )
                click.echo(f"{template.id}\t{','.join(sorted(template.syntax_tags))}")
    except CygenError as exc:
        _fail(exc, "pipeline-template")


@templates.command("validate")
@click.pass_obj
def templates_validate(ctx: _Context) -> None:
    """Parse every template file, reporting the first structural error."""
    try:
        check_paths_exist(ctx.config, "templates")
        directory = Path(ctx.config.paths.templates) if ctx.config.paths.templates \
            else Path(pipeline_template.__file__).parent / "templates"
        import yaml as _yaml
        count = 0
        for file in sorted(directory.glob("*.yaml")):
            payload = _yaml.safe_load(file.read_text(encoding="utf-8"))
            pipeline_template.parse_template(payload, path=str(file))
            count += 1
        click.echo(f"{count} template files parse cleanly")
    except CygenError as exc:
        _fail(exc, "pipeline-template")


@templates.command("dry-run")
@click.option("--db", "db_name", required=True)
@click.option("--template", "template_id", default=None)
@click.option("--seed", type=int, default=0)
@click.pass_obj
def templates_dry_run(ctx: _Context, db_name: str, template_id: Optional[str], seed: int) -> None:
    """Instantiate templates once and print the question/cypher they produce."""
    try:
        check_paths_exist(ctx.config, "templates")
        session = ctx.config.connect(db_name)
        extracted = extract_schema(session)
        load = pipeline_template.load_templates(ctx.config.paths.templates, extracted)
        sampler = pipeline_template.TemplateSampler(extracted, session)
        selected = [t for t in load.active if template_id in (None, t.id)]
        if template_id and not selected:
            raise ConfigError(f"template {template_id!r} is not active for {db_name}")
        for template in selected:
            binding = sampler.sample(template, seed)
            pair = pipeline_template.instantiate(template, binding, extracted, db_name)
            click.echo(f"-- {template.id}")
            click.echo(f"   Q: {pair.question}")
            click.echo(f"   C: {pair.cypher}")
    except CygenError as exc:
        _fail(exc, "pipeline-template")


# --- validation ------------------------------------------------------------------------


@main.command("validate")
@click.option("--db", "db_name", required=True)
@click.option("--input", "input_path", type=click.Path(exists=True), required=True)
@click.option("-o", "--output", type=click.Path(), default=None)
@click.pass_obj
def validate_cmd(ctx: _Context, db_name: str, input_path: str, output: Optional[str]) -> None:
    """Run the five automatic validators over a pairs file."""
    try:
        cfg = ctx.config
        session = cfg.connect(db_name)
        extracted = extract_schema(session)
        pairs = read_pairs(input_path)
        needs_llm = any(
            v not in cfg.policy.skipped_for(p.provenance.pipeline)
            for p in pairs for v in ("semantic", "coherence")
        )
        gateway: Optional[LlmGateway] = None
        if needs_llm:
            gateway = cfg.build_gateway(session=session, schema=extracted)
        context = ValidationContext(
            session=session,
            schema=extracted,
            gateway=gateway,
            ner=NerRegistry(),
            prompts=ctx.prompts(),
            policy=cfg.policy,
            validator_model=cfg.llm.role("validator").model,
        )
        reports = [run_all(pair, context) for pair in pairs]
        out = Path(output) if output else Path(cfg.paths.output) / f"reports_{db_name}.jsonl"
        out.parent.mkdir(parents=True, exist_ok=True)
        write_reports(reports, out)
        passed = sum(1 for r in reports if r.all_passed)
        click.echo(f"wrote {out} ({passed}/{len(reports)} pairs passed all validators)")
    except CygenError as exc:
        _fail(exc, "validators")


@main.group()
def report() -> None:
    """Derived reports."""


@report.command("passing-rates")
@click.option("--input", "input_path", type=click.Path(exists=True), required=True)
@click.option("-o", "--output", type=click.Path(), default=None)
@click.pass_obj
def report_passing_rates(ctx: _Context, input_path: str, output: Optional[str]) -> None:
    try:
        reports = read_reports(input_path)
        table = passing_rate_report(reports)
        click.echo(table.render_text())
        if output:
            Path(output).parent.mkdir(parents=True, exist_ok=True)
            Path(output).write_text(table.to_json(), encoding="utf-8")
            click.echo(f"wrote {output}")
    except (CygenError, ValueError) as exc:
        if isinstance(exc, CygenError):
            _fail(exc, "validators")
        click.echo(json.dumps({"error": "ValueError", "module": "validators",
                               "message": str(exc)}), err=True)
        sys.exit(1)


# --- review -------------------------------------------------------------------------


@main.group()
def review() -> None:
    """Manual-validation workflow."""


@review.command("assign")
@click.option("--input", "input_path", type=click.Path(exists=True), required=True)
@click.option("--reports", "reports_path", type=click.Path(exists=True), default=None,
              help="Validation reports; only all-passed pairs are assigned.")
@click.option("--reviewers", required=True, help="Comma-separated reviewer ids.")
@click.option("--db", "db_name", default=None, help="Database for result previews.")
@click.option("--seed", type=int, default=None)
@click.pass_obj
def review_assign(ctx: _Context, input_path: str, reports_path: Optional[str],
                  reviewers: str, db_name: Optional[str], seed: Optional[int]) -> None:
    try:
        cfg = ctx.config
        pairs = read_pairs(input_path)
        diagnostics_by_pair: dict[str, dict] = {}
        if reports_path:
            reports = {r.pair_id: r for r in read_reports(reports_path)}
            pairs = [p for p in pairs if p.id in reports and reports[p.id].all_passed]
            diagnostics_by_pair = {
                pid: {"verdicts": r.verdicts, "diagnostics": r.diagnostics}
                for pid, r in reports.items()
            }
        session = cfg.connect(db_name) if db_name else None
        payloads = []
        for pair in pairs:
            preview: list[str] = []
            if session is not None:
                try:
                    result = session.run(pair.cypher, timeout=cfg.policy.query_timeout_s)
                    preview = [
                        ", ".join(render_cell(row.get(c)) for c in result.columns)
                        for row in result.rows[:5]
                    ]
                except CygenError:
                    preview = ["<execution failed>"]
            payloads.append({
                "id": pair.id,
                "question": pair.question,
                "cypher": pair.cypher,
                "schema_snippet": pair.schema_snippet,
                "language_tag": pair.language_tag,
                "result_preview": preview,
                "diagnostics": diagnostics_by_pair.get(pair.id, {}),
            })
        store = ReviewStore(cfg.review.db)
        store.add_pairs(payloads)
        reviewer_list = [r.strip() for r in reviewers.split(",") if r.strip()]
        assign_seed = seed if seed is not None else (
            cfg.review.seed if cfg.review.seed is not None else derive_seed(cfg.root_seed, "review")
        )
        tasks = store.create_assignments([p["id"] for p in payloads], reviewer_list, assign_seed)
        click.echo(f"assigned {len(payloads)} pairs as {len(tasks)} tasks "
                   f"across {len(reviewer_list)} reviewers into {cfg.review.db}")
    except CygenError as exc:
        _fail(exc, "review-service")


@review.command("serve")
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8321)
@click.option("--ui", "ui_dir", type=click.Path(), default=None,
              help="Static UI bundle directory to host at /.")
@click.pass_obj
def review_serve(ctx: _Context, host: str, port: int, ui_dir: Optional[str]) -> None:
    try:
        import uvicorn

        from .review.api import create_app

        cfg = ctx.config
        if not cfg.review.tokens:
            raise ConfigError("review.tokens is empty; provision reviewer tokens first")
        store = ReviewStore(cfg.review.db)
        app = create_app(store, cfg.review.tokens, cfg.review.show_diagnostics, ui_dir)
        click.echo(f"review service on http://{host}:{port} (store: {cfg.review.db})")
        uvicorn.run(app, host=host, port=port, log_level="warning")
    except CygenError as exc:
        _fail(exc, "review-service")


# --- evaluation -----------------------------------------------------------------------


@main.group("eval")
def eval_group() -> None:
    """Evaluation harness."""


def _read_generated(path: str) -> dict[str, str]:
    out: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                payload = json.loads(line)
                out[payload["id"]] = payload["cypher"]
    return out


@eval_group.command("score")
@click.option("--db", "db_name", required=True)
@click.option("--records", "records_path", type=click.Path(exists=True), required=True)
@click.option("--generated", "generated_path", type=click.Path(exists=True), required=True,
              help="JSONL of {id, cypher} produced by the model under test.")
@click.option("-o", "--output", type=click.Path(), default=None)
@click.pass_obj
def eval_score(ctx: _Context, db_name: str, records_path: str,
               generated_path: str, output: Optional[str]) -> None:
    try:
        cfg = ctx.config
        session = cfg.connect(db_name)
        records = [r for r in read_records(records_path) if r.annotated]
        generated = _read_generated(generated_path)
        scores = []
        for record in records:
            cypher = generated.get(record.id)
            if cypher is None:
                logger.warning("no generated cypher for record %s", record.id)
                continue
            scores.append(execute_and_score(cypher, session, record,
                                            timeout=cfg.policy.query_timeout_s))
        out = Path(output) if output else Path(cfg.paths.output) / f"scores_{db_name}.jsonl"
        out.parent.mkdir(parents=True, exist_ok=True)
        with out.open("w", encoding="utf-8") as fh:
            for score in scores:
                fh.write(json.dumps({
                    "record_id": score.record_id,
                    "accuracy": score.accuracy,
                    "diagnostic": score.diagnostic,
                    "database": score.database,
                    "domain_tag": score.domain_tag,
                    "category": score.category,
                    "n_rows": len(score.generated_results),
                }, ensure_ascii=False, sort_keys=True) + "\n")
        table = aggregate(scores, [])
        click.echo(table.render_text())
        click.echo(f"wrote {out}")
    except CygenError as exc:
        _fail(exc, "evaluation")


@eval_group.command("judge")
@click.option("--records", "records_path", type=click.Path(exists=True), required=True)
@click.option("--candidates-a", type=click.Path(exists=True), required=True)
@click.option("--candidates-b", type=click.Path(exists=True), required=True)
@click.option("-o", "--output", type=click.Path(), default=None)
@click.pass_obj
def eval_judge(ctx: _Context, records_path: str, candidates_a: str,
               candidates_b: str, output: Optional[str]) -> None:
    try:
        cfg = ctx.config
        gateway = cfg.build_gateway()
        role = cfg.llm.role("judge")
        records = read_records(records_path)
        gen_a = _read_generated(candidates_a)
        gen_b = _read_generated(candidates_b)
        verdicts = []
        for record in records:
            a, b = gen_a.get(record.id), gen_b.get(record.id)
            if a is None or b is None:
                logger.warning("record %s missing a candidate; skipped", record.id)
                continue
            verdicts.append(pairwise_judge(
                record.question, a, b, gateway, ctx.prompts(), role.model,
                record_id=record.id, database=record.database, domain_tag=record.domain_tag,
            ))
        out = Path(output) if output else Path(cfg.paths.output) / "judge_verdicts.jsonl"
        out.parent.mkdir(parents=True, exist_ok=True)
        with out.open("w", encoding="utf-8") as fh:
            for verdict in verdicts:
                fh.write(json.dumps({
                    "record_id": verdict.record_id,
                    "verdict": verdict.verdict,
                    "order_ab": verdict.order_ab,
                    "order_ba": verdict.order_ba,
                    "diagnostic": verdict.diagnostic,
                    "database": verdict.database,
                    "domain_tag": verdict.domain_tag,
                }, ensure_ascii=False, sort_keys=True) + "\n")
        table = aggregate([], verdicts)
        click.echo(table.render_text())
        click.echo(f"wrote {out}")
    except CygenError as exc:
        _fail(exc, "evaluation")


@eval_group.command("scaffold")
@click.option("--db", "db_name", required=True)
@click.option("--categories", "categories_path", type=click.Path(exists=True), required=True)
@click.option("--unseen", "unseen_path", type=click.Path(exists=True), required=True)
@click.option("--per-category", type=int, default=10)
@click.option("-o", "--output", type=click.Path(), default=None)
@click.pass_obj
def eval_scaffold(ctx: _Context, db_name: str, categories_path: str, unseen_path: str,
                  per_category: int, output: Optional[str]) -> None:
    try:
        cfg = ctx.config
        session = cfg.connect(db_name)
        extracted = extract_schema(session)
        gateway = cfg.build_gateway(session=session, schema=extracted)
        role = cfg.llm.role("validator")

        def read_categories(path: str) -> list[tuple[str, str]]:
            payload = json.loads(Path(path).read_text(encoding="utf-8"))
            raw = payload["categories"] if isinstance(payload, dict) else payload
            return [(c[0], c[1]) if isinstance(c, list) else (c["name"], c.get("description", ""))
                    for c in raw]

        drafts = scaffold_eval_questions(
            gateway, render_schema(extracted),
            read_categories(categories_path), read_categories(unseen_path),
            per_category, db_name, ctx.prompts(), role.model,
        )
        out = Path(output) if output else Path(cfg.paths.output) / f"eval_drafts_{db_name}.jsonl"
        out.parent.mkdir(parents=True, exist_ok=True)
        write_records(drafts, out)
        click.echo(f"wrote {out} ({len(drafts)} unannotated drafts)")
    except CygenError as exc:
        _fail(exc, "evaluation")


# --- export -------------------------------------------------------------------------


@main.command("export")
@click.option("--input", "input_paths", type=click.Path(exists=True), multiple=True, required=True)
@click.option("--reports", "reports_paths", type=click.Path(exists=True), multiple=True,
              help="Validation report files; only all-passed pairs are eligible.")
@click.option("--review-db", type=click.Path(exists=True), default=None,
              help="Review store; only accepted pairs are eligible.")
@click.option("--quota", type=int, default=None)
@click.option("--scale", default=None)
@click.option("--seed", type=int, default=None)
@click.option("--name", default="dataset")
@click.option("-o", "--output", type=click.Path(), required=True)
@click.pass_obj
def export_cmd(ctx: _Context, input_paths: tuple[str, ...], reports_paths: tuple[str, ...],
               review_db: Optional[str], quota: Optional[int], scale: Optional[str],
               seed: Optional[int], name: str, output: str) -> None:
    """Assemble accepted pairs into the SFT-ready dataset file."""
    try:
        cfg = ctx.config
        pool = []
        for path in input_paths:
            pool.extend(read_pairs(path))
        passed_ids: Optional[set[str]] = None
        if reports_paths:
            passed_ids = set()
            for path in reports_paths:
                passed_ids.update(r.pair_id for r in read_reports(path) if r.all_passed)
            pool = [p for p in pool if p.id in passed_ids]
        accepted_ids: Optional[set[str]] = None
        if review_db:
            store = ReviewStore(review_db)
            accepted_ids = set(store.export_accepted())
            pool = [p for p in pool if p.id in accepted_ids]
        combos = sorted({(p.provenance.database, p.provenance.pipeline) for p in pool})
        if not combos:
            raise ConfigError("pool is empty after filtering; nothing to export")
        manifest = DatasetManifest(
            name=name,
            quotas={combo: quota if quota is not None else cfg.export.quota for combo in combos},
            scale_factor=parse_scale(scale if scale is not None else cfg.export.scale),
            seed=seed if seed is not None else cfg.root_seed,
            instruction=cfg.export.instruction or DEFAULT_INSTRUCTION,
        )
        dataset = assemble(pool, manifest)
        if passed_ids is not None:
            problems = audit_provenance(dataset, passed_ids, accepted_ids)
            if problems:
                raise ConfigError("provenance audit failed: " + "; ".join(problems[:5]))
        content_hash = write_dataset(dataset, output)
        click.echo(f"wrote {output} ({len(dataset.records)} records, sha256 {content_hash[:16]}…)")
    except CygenError as exc:
        _fail(exc, "dataset-export")


if __name__ == "__main__":
    main()
