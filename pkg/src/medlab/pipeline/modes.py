"""Mode orchestration: wiring the agent stages with checkpoints and retries."""

from __future__ import annotations

import json
from pathlib import Path

from pydantic import BaseModel, Field

from ..composer import (
    ComposedManuscript,
    MaxIterationsExceeded,
    PdflatexAdapter,
    ScriptedCompilerAdapter,
    WasmTexAdapter,
    compose_manuscript,
)
from ..composer.drafting import valid_targets
from ..evidence import (
    CachingSearchClient,
    CodeRecord,
    EvidenceBase,
    FixtureSearchClient,
    LiveSearchClient,
    PaperRecord,
    ParadigmCandidate,
    TaskRepresentation,
    analyze_task,
    build_evidence_base,
    explore_paradigms,
    persist_evidence_base,
    search_literature,
    survey_reference,
)
from ..evidence.taxonomy import is_valid_task, modality_of_task
from ..executor import (
    ExecutionProtocol,
    JudgePolicy,
    LocalProcessSandbox,
    RoundsExhausted,
    RunRecord,
    ScriptedSandbox,
    StructuredResults,
    Verdict,
    consolidate_results,
    execute_protocol,
    investigate_workspace,
    judge_run,
    plan_protocol,
    repair_loop,
)
from ..gateway import (
    Budget,
    Gateway,
    LiveBackend,
    ReplayBackend,
    StageCeiling,
    canonical_digest,
    load_transcript,
)
from ..ideation import (
    Assessment,
    Hypothesis,
    ResearchPlan,
    VERDICT_ACCEPT,
    VERDICT_REFINE,
    assess_hypothesis,
    finalize_plan,
    generate_hypotheses,
    load_metric_table,
    refine_hypothesis,
    select_best,
)
from ..types import TaskInput
from .config import ModeConfig
from .errors import EthicsRejected, ModeInputError, StageFailure
from .gate import GatePolicy, GateResult, gate_ethics, load_default_policy
from .ledger import LedgerEntry, ProvenanceLedger
from .state import RunState, checkpoint, resume, save_state

MODES = ("reproduction", "innovation", "exploration")


class ArtifactBundle(BaseModel):
    run_id: str
    mode: str
    workspace: str
    plan: ResearchPlan
    verdict: Verdict
    repair_rounds: int = 0
    manuscript_dir: str
    crossref_clean: bool
    compile_status: str
    ledger_size: int = Field(ge=0)


def validate_mode_input(task_input: TaskInput, mode: str) -> None:
    if mode not in MODES:
        raise ModeInputError(f"unknown mode {mode!r}")
    if task_input.dataset is None:
        raise ModeInputError(f"{mode} mode requires a dataset spec")
    if mode == "reproduction":
        if not task_input.instructions.strip():
            raise ModeInputError("reproduction mode requires instructions")
        if not task_input.references:
            raise ModeInputError("reproduction mode requires reference papers")
        if not task_input.method_description.strip():
            raise ModeInputError("reproduction mode requires a method description")
    elif mode == "innovation":
        if task_input.instructions.strip():
            raise ModeInputError("innovation mode takes references and data, not instructions")
        if not task_input.references:
            raise ModeInputError("innovation mode requires reference papers")
    else:  # exploration
        if not task_input.instructions.strip():
            raise ModeInputError("exploration mode requires instructions")
        if task_input.references:
            raise ModeInputError("exploration mode takes instructions and data only")


def derive_run_id(task_input: TaskInput, mode: str) -> str:
    return canonical_digest({"mode": mode, "task": task_input.model_dump()})[:12]


def build_gateway(config: ModeConfig) -> Gateway:
    if config.backend == "replay":
        backend = ReplayBackend(load_transcript(config.transcript_path))
    else:
        backend = LiveBackend()
    budget = Budget(
        ceilings={
            stage: StageCeiling(**limits) for stage, limits in config.budget_ceilings.items()
        }
    )
    return Gateway(
        backend,
        budget,
        provider_id=config.provider_id,
        model_id=config.model_id,
        generator_temperature=config.generator_temperature,
    )


def make_sandbox(config: ModeConfig, workspace: Path):
    target = workspace / "sandbox"
    if config.sandbox == "local":
        return LocalProcessSandbox(target)
    if config.sandbox.startswith("scripted:"):
        return ScriptedSandbox.from_file(target, config.sandbox.split(":", 1)[1])
    if config.sandbox.startswith("container:"):
        from ..executor.sandbox import ContainerSandbox

        return ContainerSandbox(config.sandbox.split(":", 1)[1], target)
    raise ModeInputError(f"unknown sandbox {config.sandbox!r}")


def make_compiler(config: ModeConfig):
    if config.compiler == "wasm":
        return WasmTexAdapter(engine_dir=config.engine_dir)
    if config.compiler == "pdflatex":
        return PdflatexAdapter()
    if config.compiler.startswith("scripted:"):
        steps = json.loads(Path(config.compiler.split(":", 1)[1]).read_text("utf-8"))
        return ScriptedCompilerAdapter(steps)
    raise ModeInputError(f"unknown compiler {config.compiler!r}")


def make_search_client(config: ModeConfig, workspace: Path):
    if config.search_index:
        inner = FixtureSearchClient(config.search_index)
    else:
        inner = LiveSearchClient()
    return CachingSearchClient(inner, workspace / "evidence" / "search_cache")


def derive_task_representation(task_input: TaskInput) -> TaskRepresentation:
    """Direct formalization for reproduction/innovation runs (no analyzer pass)."""
    dataset = task_input.dataset
    task_category = task_input.declared_task or (dataset.task_hint if dataset else None)
    if not task_category or not is_valid_task(task_category):
        raise ModeInputError(
            f"task category {task_category!r} missing or outside the taxonomy; "
            "declare one on the task input or dataset spec"
        )
    modality = task_input.declared_modality or modality_of_task(task_category)
    metric_table = load_metric_table()
    characteristics = list(dataset.characteristics) or [dataset.description or dataset.name]
    context = task_input.method_description or task_input.instructions or dataset.description
    return TaskRepresentation(
        modality=modality,
        task_category=task_category,
        disease_context=context or dataset.name,
        data_characteristics=characteristics,
        evaluation_constraints=[f"report {m}" for m in metric_table.get(task_category, ["accuracy"])],
        clinical_needs=[task_input.instructions or dataset.description or dataset.name],
    )


def _write_json(path: Path, payload) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True), encoding="utf-8")


def _read_json(path: Path):
    return json.loads(path.read_text("utf-8"))


class _RunContext:
    def __init__(self):
        self.gate: GateResult | None = None
        self.task_rep: TaskRepresentation | None = None
        self.papers: list[PaperRecord] = []
        self.codes: list[CodeRecord] = []
        self.candidates: list[ParadigmCandidate] = []
        self.base: EvidenceBase | None = None
        self.plan: ResearchPlan | None = None
        self.protocol: ExecutionProtocol | None = None
        self.record: RunRecord | None = None
        self.verdict: Verdict | None = None
        self.results: StructuredResults | None = None
        self.rounds_used: int = 0
        self.composed: ComposedManuscript | None = None
        self.ledger: ProvenanceLedger | None = None


def run_mode(
    task_input: TaskInput,
    mode: str,
    config: ModeConfig,
    workspace_root: str | Path,
    resume_run: bool = False,
    gateway: Gateway | None = None,
) -> ArtifactBundle:
    """Execute (or resume) one full run; every stage checkpoints before advancing."""
    validate_mode_input(task_input, mode)
    run_id = config.run_id or derive_run_id(task_input, mode)
    workspace = Path(workspace_root) / "runs" / run_id
    workspace.mkdir(parents=True, exist_ok=True)

    lock = workspace / ".lock"
    if lock.exists() and not resume_run:
        raise StageFailure("init", RuntimeError(f"workspace {workspace} is locked by another run"))
    lock.write_text("running", encoding="utf-8")

    try:
        _write_json(workspace / "task.json", {"mode": mode, "task": task_input.model_dump()})
        _write_json(workspace / "config.json", config.model_dump())
        if resume_run and (workspace / "state.json").exists():
            state = resume(workspace)
        else:
            state = RunState(run_id=run_id, mode=mode)
            save_state(state, workspace)

        if gateway is None:
            gateway = build_gateway(config)
        context = _RunContext()
        policy = (
            GatePolicy.model_validate(_read_json(Path(config.ethics_policy_path)))
            if config.ethics_policy_path
            else load_default_policy()
        )

        for stage in state.sequence():
            if stage in state.completed:
                _reload_stage(stage, workspace, context)
                continue
            _execute_stage(
                stage, task_input, mode, config, workspace, gateway, context, policy, state
            )
            state = checkpoint(state, workspace, stage, _artifact_for(stage))

        assert context.plan and context.verdict and context.composed and context.ledger
        return ArtifactBundle(
            run_id=run_id,
            mode=mode,
            workspace=str(workspace),
            plan=context.plan,
            verdict=context.verdict,
            repair_rounds=context.rounds_used,
            manuscript_dir=str(workspace / "manuscript"),
            crossref_clean=context.composed.crossref_report.is_clean(),
            compile_status=context.composed.compile_outcome.status,
            ledger_size=len(context.ledger.entries),
        )
    finally:
        lock.unlink(missing_ok=True)


def _artifact_for(stage: str) -> str:
    return {
        "gate": "gate.json",
        "analyze": "evidence/analysis.json",
        "explore": "evidence/paradigms.json",
        "evidence": "evidence/base.json",
        "ideate": "plan.json",
        "execute": "execution.json",
        "compose": "manuscript/composed.json",
        "finalize": "ledger.json",
    }[stage]


def _reload_stage(stage: str, workspace: Path, context: _RunContext) -> None:
    path = workspace / _artifact_for(stage)
    payload = _read_json(path)
    if stage == "gate":
        context.gate = GateResult.model_validate(payload)
    elif stage == "analyze":
        context.task_rep = TaskRepresentation.model_validate(payload["task_representation"])
        context.papers = [PaperRecord.model_validate(p) for p in payload["papers"]]
    elif stage == "explore":
        context.candidates = [ParadigmCandidate.model_validate(c) for c in payload["candidates"]]
        context.codes = context.candidates[0].code_records if context.candidates else []
    elif stage == "evidence":
        context.base = EvidenceBase.model_validate(payload)
        context.task_rep = context.base.task
    elif stage == "ideate":
        context.plan = ResearchPlan.model_validate(payload)
    elif stage == "execute":
        context.protocol = ExecutionProtocol.model_validate(payload["protocol"])
        context.record = RunRecord.model_validate(payload["record"])
        context.verdict = Verdict.model_validate(payload["verdict"])
        context.results = StructuredResults.model_validate(payload["results"])
        context.rounds_used = payload["rounds_used"]
    elif stage == "compose":
        context.composed = ComposedManuscript.model_validate(payload)
    elif stage == "finalize":
        context.ledger = ProvenanceLedger.model_validate(payload)


def _execute_stage(
    stage: str,
    task_input: TaskInput,
    mode: str,
    config: ModeConfig,
    workspace: Path,
    gateway: Gateway,
    context: _RunContext,
    policy: GatePolicy,
    state: RunState,
) -> None:
    try:
        if stage == "gate":
            result = gate_ethics(task_input, gateway, policy)
            _write_json(workspace / "gate.json", result.model_dump())
            context.gate = result
            if not result.passed:
                raise EthicsRejected(result.reasons)

        elif stage == "analyze":
            context.task_rep = analyze_task(task_input, gateway)
            client = make_search_client(config, workspace)
            papers = search_literature(task_input.instructions, client, page_limit=1)
            context.papers = papers[: config.analyze_paper_limit]
            _write_json(
                workspace / "evidence" / "analysis.json",
                {
                    "task_representation": context.task_rep.model_dump(),
                    "papers": [p.model_dump() for p in context.papers],
                },
            )

        elif stage == "explore":
            assert context.task_rep is not None
            context.candidates = explore_paradigms(context.task_rep, context.papers, gateway)
            context.codes = [
                code
                for candidate in context.candidates[: config.paradigm_count]
                for code in candidate.code_records
            ]
            _write_json(
                workspace / "evidence" / "paradigms.json",
                {"candidates": [c.model_dump() for c in context.candidates]},
            )

        elif stage == "evidence":
            if mode in ("reproduction", "innovation"):
                context.task_rep = derive_task_representation(task_input)
                context.papers = [PaperRecord.model_validate(p) for p in task_input.references]
                context.codes = [CodeRecord.model_validate(c) for c in task_input.code_refs]
            assert context.task_rep is not None
            base = build_evidence_base(context.task_rep, context.papers, context.codes, gateway)
            code_by_paper = {c.linked_paper: c for c in context.codes if c.linked_paper}
            default_code = context.codes[0] if context.codes else None
            primitives = []
            for paper in base.papers:
                code = code_by_paper.get(paper.record_id, default_code)
                primitives.extend(survey_reference(paper, code, gateway))
            context.base = EvidenceBase(
                task=base.task,
                papers=base.papers,
                codes=base.codes,
                primitives=primitives,
                items=base.items,
            )
            persist_evidence_base(context.base, workspace)

        elif stage == "ideate":
            _stage_ideate(task_input, mode, config, workspace, gateway, context, state)

        elif stage == "execute":
            _stage_execute(task_input, mode, config, workspace, gateway, context, state)

        elif stage == "compose":
            assert context.base and context.plan and context.results
            composed = compose_manuscript(
                context.base,
                context.plan,
                context.results,
                [task_input.dataset],
                gateway,
                workspace / "manuscript",
                adapter=make_compiler(config),
                max_iter=config.max_compile_iterations,
                component_labels=[s.stage_name for s in context.protocol.stages]
                if context.protocol
                else None,
            )
            context.composed = composed
            _write_json(workspace / "manuscript" / "composed.json", composed.model_dump())

        elif stage == "finalize":
            assert context.base and context.results and context.composed
            ledger = ProvenanceLedger(
                entries=[
                    LedgerEntry(locator=e.locator, target=e.target)
                    for e in context.composed.claim_entries
                ]
            )
            ledger.validate_closure(valid_targets(context.base, context.results))
            ledger.save(workspace / "ledger.json")
            context.ledger = ledger

    except (EthicsRejected, StageFailure):
        raise
    except MaxIterationsExceeded as exc:
        raise StageFailure(stage, exc)
    except Exception as exc:
        raise StageFailure(stage, exc)


def _stage_ideate(task_input, mode, config, workspace, gateway, context, state, attempt=0):
    assert context.base is not None
    dimensions = ("maturity", "ethicality") if mode == "reproduction" else None
    seed = (config.seed or 0) + attempt
    hypotheses = generate_hypotheses(context.base, config.fanout, gateway, seed=seed)
    pairs: list[tuple[Hypothesis, Assessment]] = []
    for hypothesis in hypotheses:
        assessment = _assess(hypothesis, gateway, dimensions)
        while (
            assessment.verdict == VERDICT_REFINE
            and hypothesis.iteration < config.max_refine_iterations
        ):
            hypothesis = refine_hypothesis(
                hypothesis, assessment, gateway, max_iterations=config.max_refine_iterations
            )
            assessment = _assess(hypothesis, gateway, dimensions)
        pairs.append((hypothesis, assessment))

    accepted = [(h, a) for h, a in pairs if a.verdict == VERDICT_ACCEPT]
    if not accepted:
        reasons = [r for _, a in pairs for r in a.ethics_reasons]
        if any(a.ethics_violation for _, a in pairs) and not any(
            a.verdict == VERDICT_ACCEPT for _, a in pairs
        ):
            raise EthicsRejected(reasons or ["all hypotheses rejected on ethics grounds"])
        raise StageFailure(
            "ideate", RuntimeError("no hypothesis reached acceptance after refinement")
        )
    best_h, best_a = select_best(accepted)
    low_confidence = not any(i.kind == "technical" for i in context.base.items)
    plan = finalize_plan(
        best_h,
        best_a,
        context.base.task,
        gateway,
        dataset_id=task_input.dataset.dataset_id,
        out_dir=workspace,
        low_confidence=low_confidence,
    )
    context.plan = plan
    state.iteration_counters["ideate"] = state.iteration_counters.get("ideate", 0) + 1
    _write_json(
        workspace / "ideation.json",
        {
            "candidates": [
                {"hypothesis": h.model_dump(), "assessment": a.model_dump()} for h, a in pairs
            ],
            "selected_digest": best_h.content_digest(),
            "attempt": attempt,
        },
    )


def _assess(hypothesis, gateway, dimensions):
    if dimensions is None:
        return assess_hypothesis(hypothesis, gateway)
    return assess_hypothesis(hypothesis, gateway, dimensions=dimensions)


def _stage_execute(task_input, mode, config, workspace, gateway, context, state):
    assert context.base and context.plan
    attempts = 1 + config.global_retries
    last_error: Exception | None = None
    for attempt in range(attempts):
        spec = investigate_workspace(context.plan, context.base)
        protocol = plan_protocol(spec, context.plan, gateway)
        _write_json(workspace / "protocol.json", protocol.model_dump())
        sandbox = make_sandbox(config, workspace)
        record = execute_protocol(protocol, sandbox)
        verdict = judge_run(record, config.judge_policy)
        rounds_used = 0
        if verdict.status == "failure":
            try:
                record, rounds_used = repair_loop(
                    protocol,
                    verdict,
                    gateway,
                    max_rounds=config.max_repair_rounds,
                    sandbox=sandbox,
                    policy=config.judge_policy,
                )
                verdict = judge_run(record, config.judge_policy)
            except RoundsExhausted as exc:
                last_error = exc
                if attempt + 1 < attempts:
                    # one global retry: re-enter ideation with a shifted seed, and
                    # refresh its checkpoint since plan.json changed
                    _stage_ideate(
                        task_input, mode, config, workspace, gateway, context, state,
                        attempt=attempt + 1,
                    )
                    if "ideate" in state.completed:
                        checkpoint(state, workspace, "ideate", "plan.json")
                    continue
                record, verdict = exc.record, exc.verdict

        context.protocol = protocol
        context.record = record
        context.verdict = verdict
        context.rounds_used = rounds_used
        if verdict.status == "success":
            context.results = consolidate_results([(record, verdict)])
        else:
            raise StageFailure("execute", last_error or RuntimeError(verdict.feedback))
        _write_json(workspace / "verdict.json", verdict.model_dump())
        _write_json(workspace / "logs" / "run_record.json", record.model_dump())
        _write_json(
            workspace / "execution.json",
            {
                "protocol": protocol.model_dump(),
                "record": record.model_dump(),
                "verdict": verdict.model_dump(),
                "results": context.results.model_dump(),
                "rounds_used": rounds_used,
            },
        )
        return
