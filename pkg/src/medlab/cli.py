"""Command-line interface.

Exit codes: 0 success, 2 ethics rejection, 3 stage failure,
4 configuration error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .bench import (
    aggregate,
    build_bench,
    evaluate_with_rubric,
    load_rubric,
    render_report,
)
from .bench.types import ScoreSheet
from .executor.types import Verdict
from .pipeline import (
    EthicsRejected,
    ModeConfig,
    ModeInputError,
    PipelineError,
    StageFailure,
    build_gateway,
    run_mode,
)
from .types import TaskInput

EXIT_OK = 0
EXIT_ETHICS = 2
EXIT_STAGE = 3
EXIT_CONFIG = 4


def _load_config(config_path, backend, transcript, max_global_retries, workspace):
    if config_path:
        config = ModeConfig.from_yaml(config_path)
    else:
        config = ModeConfig(transcript_path=transcript or "")
    if backend:
        config = config.model_copy(update={"backend": backend})
    if transcript:
        config = config.model_copy(update={"transcript_path": transcript})
    if max_global_retries is not None:
        config = config.model_copy(update={"global_retries": max_global_retries})
    ModeConfig.model_validate(config.model_dump())
    return config


def _load_task(task_path: str) -> TaskInput:
    return TaskInput.model_validate(json.loads(Path(task_path).read_text("utf-8")))


def _run(mode: str, task_path, config_path, workspace, backend, transcript, retries):
    try:
        config = _load_config(config_path, backend, transcript, retries, workspace)
        task = _load_task(task_path)
    except (ValueError, OSError) as exc:
        click.echo(f"configuration error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    try:
        bundle = run_mode(task, mode, config, workspace)
    except ModeInputError as exc:
        click.echo(f"configuration error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    except EthicsRejected as exc:
        click.echo(f"ethics rejection: {'; '.join(exc.reasons)}", err=True)
        sys.exit(EXIT_ETHICS)
    except (StageFailure, PipelineError) as exc:
        click.echo(f"stage failure: {exc}", err=True)
        sys.exit(EXIT_STAGE)
    click.echo(json.dumps(bundle.model_dump(), indent=2, sort_keys=True))
    sys.exit(EXIT_OK)


def _mode_options(fn):
    fn = click.option("--config", "config_path", type=click.Path(exists=True))(fn)
    fn = click.option("--workspace", default=".", show_default=True)(fn)
    fn = click.option("--backend", type=click.Choice(["live", "replay"]))(fn)
    fn = click.option("--transcript", type=click.Path())(fn)
    fn = click.option("--max-global-retries", "retries", type=int, default=None)(fn)
    return fn


@click.group()
def main():
    """Autonomous medical-AI research pipeline."""


@main.command()
@click.argument("task_path", type=click.Path(exists=True))
@_mode_options
def reproduce(task_path, config_path, workspace, backend, transcript, retries):
    """Faithfully implement a specified method from instructions and references."""
    _run("reproduction", task_path, config_path, workspace, backend, transcript, retries)


@main.command()
@click.argument("task_path", type=click.Path(exists=True))
@_mode_options
def innovate(task_path, config_path, workspace, backend, transcript, retries):
    """Generate and validate a hypothesis from fixed references and data."""
    _run("innovation", task_path, config_path, workspace, backend, transcript, retries)


@main.command()
@click.argument("task_path", type=click.Path(exists=True))
@_mode_options
def explore(task_path, config_path, workspace, backend, transcript, retries):
    """Problem-driven discovery from a task description alone."""
    _run("exploration", task_path, config_path, workspace, backend, transcript, retries)


@main.command()
@click.option("--workspace", required=True, type=click.Path(exists=True))
def resume(workspace):
    """Re-enter an interrupted run at its first un-checkpointed stage."""
    workspace = Path(workspace)
    try:
        task_payload = json.loads((workspace / "task.json").read_text("utf-8"))
        config = ModeConfig.model_validate(
            json.loads((workspace / "config.json").read_text("utf-8"))
        )
        task = TaskInput.model_validate(task_payload["task"])
        mode = task_payload["mode"]
    except (OSError, ValueError, KeyError) as exc:
        click.echo(f"configuration error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    config = config.model_copy(update={"run_id": workspace.name})
    try:
        bundle = run_mode(task, mode, config, workspace.parent.parent, resume_run=True)
    except EthicsRejected as exc:
        click.echo(f"ethics rejection: {'; '.join(exc.reasons)}", err=True)
        sys.exit(EXIT_ETHICS)
    except PipelineError as exc:
        click.echo(f"stage failure: {exc}", err=True)
        sys.exit(EXIT_STAGE)
    click.echo(json.dumps(bundle.model_dump(), indent=2, sort_keys=True))
    sys.exit(EXIT_OK)


@main.command()
@click.option("--workspace", required=True, type=click.Path(exists=True))
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--transcript", type=click.Path())
def compose(workspace, config_path, transcript):
    """Recompose the manuscript for a run whose earlier stages completed."""
    from .composer import compose_manuscript
    from .evidence import EvidenceBase
    from .executor import StructuredResults
    from .ideation import ResearchPlan
    from .pipeline.modes import make_compiler
    from .types import DatasetSpec

    workspace = Path(workspace)
    try:
        config = (
            ModeConfig.from_yaml(config_path)
            if config_path
            else ModeConfig.model_validate(
                json.loads((workspace / "config.json").read_text("utf-8"))
            )
        )
        if transcript:
            config = config.model_copy(update={"transcript_path": transcript})
        base = EvidenceBase.model_validate(
            json.loads((workspace / "evidence" / "base.json").read_text("utf-8"))
        )
        plan = ResearchPlan.model_validate(
            json.loads((workspace / "plan.json").read_text("utf-8"))
        )
        execution = json.loads((workspace / "execution.json").read_text("utf-8"))
        results = StructuredResults.model_validate(execution["results"])
        task_payload = json.loads((workspace / "task.json").read_text("utf-8"))
        dataset = DatasetSpec.model_validate(task_payload["task"]["dataset"])
    except (OSError, ValueError, KeyError) as exc:
        click.echo(f"configuration error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    try:
        gateway = build_gateway(config)
        composed = compose_manuscript(
            base,
            plan,
            results,
            [dataset],
            gateway,
            workspace / "manuscript",
            adapter=make_compiler(config),
            max_iter=config.max_compile_iterations,
        )
    except Exception as exc:
        click.echo(f"stage failure: {exc}", err=True)
        sys.exit(EXIT_STAGE)
    click.echo(f"manuscript composed: {composed.compile_outcome.status}")
    sys.exit(EXIT_OK)


@main.group()
def bench():
    """Benchmark construction and evaluation."""


@bench.command("build")
@click.option("--source", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
def bench_build(source, out):
    """Build the bench tree (tasks, tiered entries, cases) from curated metadata."""
    try:
        result = build_bench(source, out)
    except Exception as exc:
        click.echo(f"configuration error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    click.echo(
        f"bench built: {result.task_count} tasks, {result.entry_count} entries, "
        f"{result.case_count} cases at {result.out_dir}"
    )
    sys.exit(EXIT_OK)


@bench.command("eval")
@click.option("--subjects", required=True, type=click.Path(exists=True),
              help="Subject file or directory of subject files.")
@click.option("--rubric", "rubric_id", default="idea_v1", show_default=True)
@click.option("--out", required=True, type=click.Path())
@click.option("--backend", type=click.Choice(["live", "replay"]), default="replay")
@click.option("--transcript", type=click.Path())
@click.option("--verdicts", type=click.Path(exists=True),
              help="Optional JSONL of run verdicts for the success rate.")
@click.option("--anonymize-token", "tokens", multiple=True)
def bench_eval(subjects, rubric_id, out, backend, transcript, verdicts, tokens):
    """Score subjects with a rubric judge and aggregate the sheets."""
    try:
        rubric = load_rubric(rubric_id)
        config = ModeConfig(backend=backend, transcript_path=transcript or "")
        gateway = build_gateway(config)
    except (ValueError, OSError) as exc:
        click.echo(f"configuration error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)

    subjects_path = Path(subjects)
    files = (
        sorted(subjects_path.glob("*.txt")) + sorted(subjects_path.glob("*.md"))
        if subjects_path.is_dir()
        else [subjects_path]
    )
    sheets: list[ScoreSheet] = []
    try:
        for path in files:
            sheets.append(
                evaluate_with_rubric(
                    path.read_text("utf-8"),
                    rubric,
                    gateway,
                    subject_id=path.stem,
                    identifier_tokens=tuple(tokens) or ("medlab",),
                )
            )
        verdict_list = None
        if verdicts:
            verdict_list = [
                Verdict.model_validate(json.loads(line))
                for line in Path(verdicts).read_text("utf-8").splitlines()
                if line.strip()
            ]
        report = aggregate(sheets, verdicts=verdict_list)
    except Exception as exc:
        click.echo(f"stage failure: {exc}", err=True)
        sys.exit(EXIT_STAGE)

    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "sheets.jsonl").write_text(
        "\n".join(json.dumps(s.model_dump(), sort_keys=True) for s in sheets) + "\n",
        encoding="utf-8",
    )
    (out_dir / "report.json").write_text(
        json.dumps(report.model_dump(), indent=2, sort_keys=True), encoding="utf-8"
    )
    (out_dir / "report.txt").write_text(render_report(report) + "\n", encoding="utf-8")
    click.echo(render_report(report))
    sys.exit(EXIT_OK)


if __name__ == "__main__":
    main()
