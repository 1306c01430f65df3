"""Executor: metrics wire format, dataflow, toolboxes, sandboxes, repair, results."""

import json
import math

import pytest

from medlab.evidence import (
    CodeRecord,
    EvidenceAnchor,
    EvidenceBase,
    EvidenceItem,
    PaperRecord,
    TaskRepresentation,
)
from medlab.executor import (
    ConflictingConstraint,
    DataflowViolation,
    ExecutionProtocol,
    JudgePolicy,
    LocalProcessSandbox,
    MetricEvent,
    NoValidatedRun,
    PackagePin,
    RoundsExhausted,
    RunRecord,
    ScriptedSandbox,
    Stage,
    StageOutcome,
    Verdict,
    consolidate_results,
    execute_protocol,
    format_metric_line,
    investigate_workspace,
    judge_run,
    merge_manifests,
    parse_metric_line,
    parse_metrics_stream,
    plan_protocol,
    repair_loop,
)
from medlab.ideation import (
    ASSESSMENT_DIMENSIONS,
    EvaluationProtocol,
    Hypothesis,
    ResearchPlan,
)

from conftest import make_gateway
from record_builders import make_record


def make_plan():
    hypothesis = Hypothesis(
        clinical_rationale="r",
        technical_design="d",
        objectives=["o"],
        evidence_links=[EvidenceAnchor(record_id="p1", locator="x")],
    )
    return ResearchPlan(
        hypothesis=hypothesis,
        algorithmic_rationale="because",
        evaluation_protocol=EvaluationProtocol(metrics=["accuracy"], splits="70/10/20"),
        dataset_binding="d1",
        success_criteria=["works"],
    )


def make_base(codes=True):
    task = TaskRepresentation(
        modality="image",
        task_category="image.classification",
        disease_context="retina",
        data_characteristics=["fundus"],
        evaluation_constraints=["graded"],
        clinical_needs=["screening"],
    )
    paper = PaperRecord(record_id="p1", title="T", year=2021, citation_count=1, abstract="a")
    code_list = (
        [CodeRecord(repo_url="https://example.org/r", entrypoints=["train.py"])] if codes else []
    )
    return EvidenceBase(
        task=task,
        papers=[paper],
        codes=code_list,
        items=[
            EvidenceItem(
                claim_text="c",
                anchor=EvidenceAnchor(record_id="p1", locator=""),
                kind="clinical",
            )
        ],
    )


def four_stage_content(test_input="weights/model.bin"):
    return {
        "stages": [
            {"stage_name": "preprocess", "command": "python prep.py",
             "declared_inputs": ["/workspace/data"], "declared_outputs": ["processed"],
             "timeout_s": 60},
            {"stage_name": "train", "command": "python train.py",
             "declared_inputs": ["processed"], "declared_outputs": ["weights/model.bin"],
             "timeout_s": 600},
            {"stage_name": "validate", "command": "python validate.py",
             "declared_inputs": ["weights/model.bin"], "declared_outputs": ["valmetrics.json"],
             "timeout_s": 120},
            {"stage_name": "test", "command": "python test.py",
             "declared_inputs": [test_input], "declared_outputs": ["testmetrics.json"],
             "timeout_s": 120},
        ]
    }


class TestMetricsWire:
    def test_round_trip(self):
        event = MetricEvent(step=3, split="train", loss=0.5, grad_norm=1.25,
                            extras={"lr": 0.001}, ts="2024-01-01T00:00:00Z")
        parsed = parse_metric_line(format_metric_line(event))
        assert parsed.model_dump() == event.model_dump()

    def test_nan_sentinel(self):
        event = MetricEvent(step=0, split="train", loss=math.nan, ts="t")
        line = format_metric_line(event)
        assert '"NaN"' in line
        parsed = parse_metric_line(line)
        assert math.isnan(parsed.loss)

    def test_truncated_final_line_ignored(self, tmp_path):
        good = format_metric_line(MetricEvent(step=0, split="train", loss=1.0, ts="t"))
        path = tmp_path / "metrics.jsonl"
        path.write_text(good + "\n" + good[: len(good) // 2])
        events = parse_metrics_stream(path)
        assert len(events) == 1

    def test_non_metric_lines_skipped(self, tmp_path):
        path = tmp_path / "metrics.jsonl"
        path.write_text('{"event":"info","msg":"hi"}\n'
                        + format_metric_line(MetricEvent(step=0, split="val", loss=0.2, ts="t"))
                        + "\n")
        events = parse_metrics_stream(path)
        assert len(events) == 1 and events[0].split == "val"


class TestProtocolTypes:
    def test_event_ordering_enforced(self):
        with pytest.raises(ValueError):
            RunRecord(
                protocol_id="p",
                stage_outcomes=[StageOutcome(stage_name="train", exit_status=0, wall_time_s=1)],
                metric_events=[
                    MetricEvent(step=5, split="train", loss=1.0),
                    MetricEvent(step=2, split="train", loss=0.9),
                ],
            )

    def test_train_required(self):
        with pytest.raises(ValueError):
            ExecutionProtocol(
                protocol_id="p",
                stages=[Stage(stage_name="test", command="x", timeout_s=5)],
            )

    def test_single_train_stage_valid(self):
        protocol = ExecutionProtocol(
            protocol_id="p", stages=[Stage(stage_name="train", command="x", timeout_s=5)]
        )
        assert protocol.validate_dataflow([]) == []


class TestPlanProtocol:
    def test_four_stages_in_order(self):
        gateway = make_gateway(lambda req: four_stage_content())
        base = make_base()
        spec = investigate_workspace(make_plan(), base)
        protocol = plan_protocol(spec, make_plan(), gateway)
        assert [s.stage_name for s in protocol.stages] == [
            "preprocess", "train", "validate", "test",
        ]

    def test_dataflow_violation_after_repair(self):
        gateway = make_gateway(lambda req: four_stage_content(test_input="never_made.bin"))
        spec = investigate_workspace(make_plan(), make_base())
        with pytest.raises(DataflowViolation):
            plan_protocol(spec, make_plan(), gateway)
        assert len(gateway.call_log) == 2


class TestToolboxes:
    def test_image_modality_selects_imaging_kit(self):
        spec = investigate_workspace(make_plan(), make_base())
        assert "imaging-kit" in spec.toolbox_ids
        packages = {p.package for p in spec.environment_manifest}
        assert "scikit-image" in packages

    def test_no_codes_sets_scaffold(self):
        spec = investigate_workspace(make_plan(), make_base(codes=False))
        assert spec.scaffold is True
        assert spec.codebase_refs == []

    def test_disjoint_constraints_merge(self):
        merged = merge_manifests(
            [
                [PackagePin(package="alpha", constraint=">=1")],
                [PackagePin(package="beta", constraint=">=2")],
            ]
        )
        assert {p.package for p in merged} == {"alpha", "beta"}

    def test_conflicting_pins_reported(self):
        with pytest.raises(ConflictingConstraint):
            merge_manifests(
                [
                    [PackagePin(package="alpha", constraint="==1.0")],
                    [PackagePin(package="alpha", constraint="==2.0")],
                ]
            )

    def test_overlapping_ranges_ok(self):
        merged = merge_manifests(
            [
                [PackagePin(package="alpha", constraint=">=1")],
                [PackagePin(package="alpha", constraint=">=2")],
            ]
        )
        assert len(merged) == 1


def simple_protocol(timeouts=None):
    timeouts = timeouts or {}
    return ExecutionProtocol(
        protocol_id="proto",
        stages=[
            Stage(stage_name=name, command=f"echo {name}",
                  timeout_s=timeouts.get(name, 30))
            for name in ("preprocess", "train", "validate", "test")
        ],
    )


def metrics_text(losses, manifest=True):
    lines = [
        format_metric_line(MetricEvent(step=i, split="train", loss=l, grad_norm=1.0, ts="t"))
        for i, l in enumerate(losses)
    ]
    return "\n".join(lines) + "\n"


GOOD_MANIFEST = json.dumps(
    {
        "weights": [{"path": "weights/model.bin", "bytes": 128, "sha256": "b" * 64}],
        "final_metrics": {"accuracy": 0.8},
    }
)


class TestExecuteProtocol:
    def test_scripted_full_run(self, tmp_path):
        script = {
            "train": {
                "files": {
                    "logs/metrics.jsonl": metrics_text([2.0, 1.6, 1.2, 0.9, 0.7]),
                    "logs/weights_manifest.json": GOOD_MANIFEST,
                    "weights/model.bin": "x" * 128,
                }
            }
        }
        sandbox = ScriptedSandbox(tmp_path, script)
        record = execute_protocol(simple_protocol(), sandbox)
        assert len(record.stage_outcomes) == 4
        assert len(record.metric_events) == 5
        assert judge_run(record).status == "success"

    def test_halt_on_train_failure(self, tmp_path):
        sandbox = ScriptedSandbox(tmp_path, {"train": {"exit_status": 1}})
        record = execute_protocol(simple_protocol(), sandbox)
        assert [o.stage_name for o in record.stage_outcomes] == ["preprocess", "train"]
        assert record.stage_outcomes[-1].exit_status == 1

    def test_local_sandbox_timeout(self, tmp_path):
        protocol = ExecutionProtocol(
            protocol_id="p",
            stages=[Stage(stage_name="train", command="sleep 5", timeout_s=1)],
        )
        record = execute_protocol(protocol, LocalProcessSandbox(tmp_path))
        outcome = record.stage_outcomes[0]
        assert outcome.timed_out is True
        assert outcome.wall_time_s >= 1.0
        assert judge_run(record).failure_class == "timeout"

    def test_local_sandbox_runs_commands(self, tmp_path):
        protocol = ExecutionProtocol(
            protocol_id="p",
            stages=[
                Stage(
                    stage_name="train",
                    command="mkdir -p logs && printf '%s\\n' "
                    "'{\"event\":\"metric\",\"step\":0,\"split\":\"train\",\"loss\":1.0,"
                    "\"grad_norm\":null,\"extras\":{},\"ts\":\"t\"}' > logs/metrics.jsonl",
                    timeout_s=10,
                )
            ],
        )
        record = execute_protocol(protocol, LocalProcessSandbox(tmp_path))
        assert record.stage_outcomes[0].exit_status == 0
        assert len(record.metric_events) == 1


class TestRepairLoop:
    def patch_content(self):
        return {"patches": [{"stage_name": "train", "command": "python train.py --fixed"}],
                "note": "lower lr"}

    def failing_then_ok_sandbox(self, tmp_path):
        good_files = {
            "logs/metrics.jsonl": metrics_text([2.0, 1.5, 1.1, 0.8, 0.6]),
            "logs/weights_manifest.json": GOOD_MANIFEST,
            "weights/model.bin": "x" * 128,
        }
        return ScriptedSandbox(
            tmp_path,
            {"runs": [{"train": {"exit_status": 1}}, {"train": {"files": good_files}}]},
        )

    def initial_failure(self):
        return judge_run(make_record(exits=(0, 1), stage_names=("preprocess", "train")))

    def test_fail_then_succeed_in_two_rounds(self, tmp_path):
        gateway = make_gateway(lambda req: self.patch_content())
        sandbox = self.failing_then_ok_sandbox(tmp_path)
        # round 1 re-executes the failing script, round 2 the fixed one
        record, rounds = repair_loop(
            simple_protocol(), self.initial_failure(), gateway, max_rounds=3, sandbox=sandbox
        )
        assert rounds == 2
        assert judge_run(record).status == "success"

    def test_rounds_exhausted_after_exactly_three(self, tmp_path):
        gateway = make_gateway(lambda req: self.patch_content())
        sandbox = ScriptedSandbox(tmp_path, {"train": {"exit_status": 1}})
        with pytest.raises(RoundsExhausted) as excinfo:
            repair_loop(
                simple_protocol(), self.initial_failure(), gateway, max_rounds=3, sandbox=sandbox
            )
        assert sandbox.runs_started == 3
        assert excinfo.value.verdict.failure_class == "runtime_error"

    def test_success_verdict_precondition(self, tmp_path):
        gateway = make_gateway(lambda req: self.patch_content())
        with pytest.raises(ValueError):
            repair_loop(
                simple_protocol(),
                Verdict(status="success"),
                gateway,
                sandbox=ScriptedSandbox(tmp_path, {}),
            )


class TestConsolidate:
    def test_single_success_with_provenance(self):
        record = make_record()
        results = consolidate_results([(record, judge_run(record))])
        cells = results.table()[("test", "accuracy")]
        assert cells[0].value == 0.8
        assert "weights_manifest" in cells[0].provenance

    def test_no_success_raises(self):
        record = make_record(exits=(0, 1), stage_names=("preprocess", "train"))
        with pytest.raises(NoValidatedRun):
            consolidate_results([(record, judge_run(record))])

    def test_two_successes_run_axis(self):
        a, b = make_record(), make_record()
        results = consolidate_results([(a, judge_run(a)), (b, judge_run(b))])
        assert results.run_count == 2
        assert {c.run_index for c in results.cells} == {0, 1}
