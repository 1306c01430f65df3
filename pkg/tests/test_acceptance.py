"""Acceptance criteria, one test per criterion, each printing a PASS line.

Run with:  pytest tests/test_acceptance.py -v -s
"""

import json
import math
import random
import time
from pathlib import Path

import pytest
from click.testing import CliRunner

from medlab.bench import (
    PaperEntry,
    Rater,
    RawMetrics,
    ScoreContext,
    ScoreSheet,
    aggregate,
    build_bench,
    load_bench_entries,
    load_rubric,
    partition_tiers,
    score_paper,
)
from medlab.cli import main as cli_main
from medlab.composer import MaxIterationsExceeded, WasmTexAdapter, compile_document, resolve_crossrefs
from medlab.executor import JudgePolicy, Verdict, judge_run, loss_trend_ok
from medlab.pipeline import EthicsRejected, run_mode
from medlab.pipeline.modes import build_gateway

from conftest import make_gateway
from crossref_corpus import BIB_KEYS, make_clean_doc, mutate
from record_builders import make_manifest, make_record, oracle_trend_ok
from test_pipeline import fixture_config, fixture_task

REPO = Path(__file__).parents[1]
FIXTURES = Path(__file__).parent / "fixtures"


def report(name: str) -> None:
    print(f"ACCEPTANCE PASS: {name}")


class TestBenchShape:
    def test_bench_shape(self, tmp_path):
        from importlib import resources

        source = resources.files("medlab").joinpath("data/bench_fixture/bench_source.jsonl")
        started = time.monotonic()
        result = build_bench(str(source), tmp_path / "bench")
        elapsed = time.monotonic() - started

        assert result.task_count == 19
        assert result.entry_count == 57
        assert result.case_count == 171
        entries = load_bench_entries(tmp_path / "bench")
        by_task = {}
        for entry in entries:
            by_task.setdefault(entry.task_id, []).append(entry)
        assert len(by_task) == 19
        for task_id, group in by_task.items():
            assert len(group) == 3, task_id
            assert sorted(e.tier for e in group) == ["easy", "hard", "medium"]
        case_dirs = list((tmp_path / "bench" / "cases").iterdir())
        assert len(case_dirs) == 171
        assert elapsed < 5.0, f"bench build took {elapsed:.2f}s"
        report(f"bench shape 19/57/171 in {elapsed:.2f}s")


class TestSuccessRateArithmetic:
    def test_success_rate(self):
        verdicts = [Verdict(status="success")] * 52 + [
            Verdict(status="failure", failure_class="runtime_error", feedback="x")
        ] * 5
        sheet = ScoreSheet(
            subject_id="s",
            rubric_id="idea_v1",
            rater=Rater(kind="llm", rater_id="judge"),
            scores={"novelty": 3.0},
        )
        result = aggregate([sheet], verdicts=verdicts)
        rate = result.success_rate
        assert rate.successes == 52 and rate.total == 57
        assert rate.rate == 52 / 57  # exact ratio
        assert abs(rate.rate - 0.9123) < 0.00005
        assert rate.display() == "0.91"
        assert abs(round(rate.rate, 2) - 0.91) <= 0.005
        report(f"success-rate arithmetic 52/57 = {rate.rate:.7f} displays {rate.display()}")


def _workspace_snapshot(root: Path) -> dict[str, bytes]:
    exclude = {"meta.json", ".lock"}
    snapshot = {}
    for path in sorted(root.rglob("*")):
        if path.is_file() and path.name not in exclude:
            snapshot[str(path.relative_to(root))] = path.read_bytes()
    return snapshot


@pytest.mark.slow
class TestEndToEndReplay:
    def test_innovation_replay(self, tmp_path):
        started = time.monotonic()
        bundle_a = run_mode(fixture_task(), "innovation", fixture_config(), tmp_path / "a")
        first_elapsed = time.monotonic() - started

        assert bundle_a.verdict.status == "success"
        assert bundle_a.compile_status == "success"
        assert bundle_a.crossref_clean, "crossref report must be empty"
        assert bundle_a.ledger_size > 0
        workspace_a = Path(bundle_a.workspace)
        report_payload = json.loads((workspace_a / "manuscript" / "report.json").read_text())
        assert report_payload["findings"] == []
        plan_payload = json.loads((workspace_a / "plan.json").read_text())
        assert plan_payload["evaluation_protocol"]["metrics"]

        bundle_b = run_mode(fixture_task(), "innovation", fixture_config(), tmp_path / "b")
        snap_a = _workspace_snapshot(Path(bundle_a.workspace))
        snap_b = _workspace_snapshot(Path(bundle_b.workspace))
        assert snap_a.keys() == snap_b.keys()
        different = [k for k in snap_a if snap_a[k] != snap_b[k]]
        assert not different, f"workspaces differ at: {different}"
        assert first_elapsed < 60.0, f"run took {first_elapsed:.1f}s"
        report(
            f"end-to-end replay in {first_elapsed:.1f}s, "
            f"{len(snap_a)} files byte-identical across runs"
        )


class TestJudgerSuite:
    def labeled_records(self):
        """Labeled synthetic records: singles, variants, and all failure pairs."""
        flat = (1.0, 1.0, 1.0, 1.0, 1.0)
        down = (2.0, 1.5, 1.1, 0.9, 0.7)
        nan_losses = (2.0, math.nan, 1.0, 0.9)
        cases = [
            ("success", make_record(losses=down), None),
            ("runtime_error", make_record(exits=(0, 1), stage_names=("preprocess", "train")),
             "runtime_error"),
            ("timeout", make_record(exits=(0, 124, 0, 0), timed_out_stage="train"), "timeout"),
            ("explosion_nan_loss", make_record(losses=nan_losses), "gradient_explosion"),
            ("explosion_nan_grad",
             make_record(losses=down, grads=(1.0, math.nan, 1.0, 1.0, 1.0)),
             "gradient_explosion"),
            ("explosion_consecutive_grads",
             make_record(losses=down, grads=(2e4, 3e4, 2e4, 1.0, 1.0)),
             "gradient_explosion"),
            ("flat_loss", make_record(losses=flat), "non_decreasing_loss"),
            ("rising_loss", make_record(losses=(1.0, 1.2, 1.4, 1.6, 1.8)),
             "non_decreasing_loss"),
            ("insufficient_events", make_record(losses=(2.0, 1.0)), "non_decreasing_loss"),
            ("missing_manifest", make_record(manifest=None), "missing_weights"),
            ("zero_byte_weight", make_record(manifest=make_manifest(bytes_=0)),
             "missing_weights"),
            ("malformed_checksum", make_record(manifest=make_manifest(sha="nothex")),
             "missing_weights"),
            ("weight_not_artifact", make_record(artifacts=["logs/metrics.jsonl"]),
             "missing_weights"),
            # pairwise combinations resolve to the first class in precedence order
            ("runtime+timeout",
             make_record(exits=(1, 124), timed_out_stage="train",
                         stage_names=("preprocess", "train")),
             "runtime_error"),
            ("runtime+explosion",
             make_record(losses=nan_losses, exits=(0, 1), stage_names=("preprocess", "train")),
             "runtime_error"),
            ("runtime+flat_loss",
             make_record(losses=flat, exits=(0, 1), stage_names=("preprocess", "train")),
             "runtime_error"),
            ("runtime+missing_weights",
             make_record(losses=down, manifest=None, exits=(0, 1),
                         stage_names=("preprocess", "train")),
             "runtime_error"),
            ("timeout+explosion",
             make_record(losses=nan_losses, exits=(0, 124, 0, 0), timed_out_stage="train"),
             "timeout"),
            ("timeout+flat_loss",
             make_record(losses=flat, exits=(0, 124, 0, 0), timed_out_stage="train"),
             "timeout"),
            ("timeout+missing_weights",
             make_record(losses=down, manifest=None, exits=(0, 124, 0, 0),
                         timed_out_stage="train"),
             "timeout"),
            ("explosion+flat_loss", make_record(losses=(1.0, math.nan, 1.0, 1.0)),
             "gradient_explosion"),
            ("explosion+missing_weights", make_record(losses=nan_losses, manifest=None),
             "gradient_explosion"),
            ("flat_loss+missing_weights", make_record(losses=flat, manifest=None),
             "non_decreasing_loss"),
        ]
        return cases

    def test_labeled_classification(self):
        cases = self.labeled_records()
        assert len(cases) >= 20
        covered = {label for _, _, label in cases if label}
        assert covered == {
            "runtime_error", "timeout", "gradient_explosion",
            "non_decreasing_loss", "missing_weights",
        }
        mismatches = []
        for name, record, expected in cases:
            verdict = judge_run(record)
            actual = verdict.failure_class if verdict.status == "failure" else None
            if actual != expected:
                mismatches.append((name, expected, actual))
        assert not mismatches, mismatches
        report(f"judger suite: {len(cases)} labeled records, 100% agreement")

    def test_loss_trend_oracle_agreement(self):
        rng = random.Random(20260810)
        policy = JudgePolicy()
        disagreements = 0
        for _ in range(100):
            n = rng.randint(4, 80)
            start = rng.uniform(0.2, 6.0)
            drift = rng.uniform(-0.1, 0.05)
            noise = rng.uniform(0.0, 0.4)
            losses = [max(1e-6, start + drift * i + rng.gauss(0, noise)) for i in range(n)]
            if loss_trend_ok(losses, policy) != oracle_trend_ok(losses):
                disagreements += 1
        assert disagreements == 0
        report("loss-trend decisions match the independent slope oracle on 100 series")


class TestCrossrefCorpus:
    def test_seeded_corpus_recall(self):
        kinds = ("dangling_ref", "duplicate_label", "missing_citation", "unused_label")
        total = 0
        for index in range(8):  # 8 documents x 4 kinds = 32 seeded defects
            for kind in kinds:
                doc, symbol = mutate(make_clean_doc(index, sections=2 + index % 3), kind, index)
                findings = resolve_crossrefs(doc, bibliography_keys=set(BIB_KEYS)).findings
                assert len(findings) == 1, (kind, index, findings)
                assert findings[0].kind == kind
                assert findings[0].symbol == symbol
                total += 1
        assert total >= 30
        report(f"crossref corpus: {total} seeded defects, 100% recall")

    def test_clean_documents_no_findings(self):
        for index in range(10):
            doc = make_clean_doc(100 + index, sections=1 + index % 4)
            assert resolve_crossrefs(doc, bibliography_keys=set(BIB_KEYS)).is_clean()
        report("crossref corpus: 10 clean documents, 0 findings")


@pytest.fixture(scope="module")
def adapter():
    adapter = WasmTexAdapter(engine_dir=REPO / "texengine")
    assert adapter.available(), (
        "real TeX toolchain unavailable: run `npm install` inside texengine/ "
        "(node 20 and the package mirror are sufficient)"
    )
    return adapter


@pytest.mark.slow
class TestCompileLoop:
    """The five deterministic error classes against the real TeX engine."""

    BIB = (
        "@article{kay2020,\n  title = {A Study},\n  author = {R. Kay},\n"
        "  journal = {Journal},\n  year = {2020}\n}\n"
    )

    def fixtures(self):
        return {
            "missing_end": ("\\begin{document}\nThe document just stops here.\n", None),
            "unbalanced_math": (
                "\\begin{document}\nA dangling $x^2 formula runs on.\n\\end{document}\n",
                None,
            ),
            "missing_file": (
                "\\begin{document}\n\\input{extra.tex}\nAfter the include.\n\\end{document}\n",
                None,
            ),
            "undefined_reference_rerun": (
                "\\begin{document}\n\\begin{minipage}{6.5in}\n"
                "\\section{One}\\label{sec:one}\nSee Section~\\ref{sec:one}.\n"
                "\\end{minipage}\n\\end{document}\n",
                None,
            ),
            "missing_citation_bibpass": (
                "\\begin{document}\n\\begin{minipage}{6.5in}\n"
                "As shown in~\\cite{kay2020}.\n\\bibliographystyle{plain}\n"
                "\\bibliography{refs}\n\\end{minipage}\n\\end{document}\n",
                self.BIB,
            ),
        }

    def test_five_deterministic_classes(self, adapter, tmp_path):
        for error_class, (source, bib) in self.fixtures().items():
            workdir = tmp_path / error_class
            workdir.mkdir()
            if bib:
                (workdir / "refs.bib").write_text(bib)
            outcome = compile_document(source, adapter, None, max_iter=5, workdir=workdir)
            assert outcome.status == "success", error_class
            assert outcome.iterations <= 5
            applied = [f.error_class for f in outcome.fixes_applied]
            assert error_class in applied, (error_class, applied)
            assert all(f.fix_kind == "deterministic" for f in outcome.fixes_applied)
        report("compile loop: 5 deterministic error classes repaired on the real engine")

    def test_clean_document_exactly_one_iteration(self, adapter, tmp_path):
        outcome = compile_document(
            "\\begin{document}\nA clean paragraph with $y = mx + b$.\n\\end{document}\n",
            adapter,
            None,
            max_iter=5,
            workdir=tmp_path,
        )
        assert outcome.status == "success"
        assert outcome.iterations == 1
        assert outcome.fixes_applied == []
        report("compile loop: clean document compiles in exactly 1 iteration")

    def test_always_failing_adapter_bounded(self, tmp_path):
        from medlab.composer import ScriptedCompilerAdapter

        adapter = ScriptedCompilerAdapter([{"exit_status": 1, "log": "! Broken.\nl.1 x\n"}])
        gateway = make_gateway(
            lambda req: {"start_line": 1, "end_line": 1, "replacement": "still broken"}
        )
        with pytest.raises(MaxIterationsExceeded):
            compile_document("doc", adapter, gateway, max_iter=5, workdir=tmp_path)
        assert adapter.calls == 5
        report("compile loop: bounded at exactly max_iter iterations when unfixable")


class TestScoringProperties:
    def test_composites_bounded_ten_thousand(self):
        rng = random.Random(404)
        for index in range(10_000):
            entry = PaperEntry(
                paper_id=f"p-{index}",
                task_id="image.classification",
                modality="image",
                raw_metrics=RawMetrics(
                    code_availability=rng.random(),
                    venue_score=rng.random(),
                    citation_count=rng.randint(0, 10**6),
                    year=rng.randint(1950, 2025),
                    complexity=1 + 4 * rng.random(),
                    human_rating=1 + 4 * rng.random(),
                ),
            )
            context = ScoreContext(
                max_citation_count=max(entry.raw_metrics.citation_count, rng.randint(0, 10**6))
            )
            for variant in ("quality", "difficulty"):
                composite = score_paper(entry, context, variant=variant)
                assert 0.0 <= composite <= 1.0
        report("scoring: 10^4 randomized composites all within [0,1]")

    def test_tier_partition_sort_oracle_thousand(self):
        rng = random.Random(505)
        for _ in range(1000):
            entries = [
                PaperEntry(
                    paper_id=f"p-{i}",
                    task_id="ehr.risk_prediction",
                    modality="ehr",
                    raw_metrics=RawMetrics(
                        code_availability=rng.random(),
                        venue_score=rng.random(),
                        citation_count=rng.randint(0, 2000),
                        year=rng.randint(2000, 2025),
                        complexity=1 + 4 * rng.random(),
                        human_rating=1 + 4 * rng.random(),
                    ),
                )
                for i in range(3)
            ]
            context = ScoreContext(
                max_citation_count=max(e.raw_metrics.citation_count for e in entries)
            )
            tiered = partition_tiers(entries)
            oracle = sorted(
                entries,
                key=lambda e: (
                    -score_paper(e, context, variant="difficulty"),
                    -e.raw_metrics.citation_count,
                    e.paper_id,
                ),
            )
            assert [e.paper_id for e in tiered] == [e.paper_id for e in oracle]
            assert [e.tier for e in tiered] == ["hard", "medium", "easy"]
        report("scoring: tier partition matches the sort oracle on 10^3 triples")

    def test_out_of_range_scores_always_rejected(self):
        rubric = load_rubric("idea_v1")
        for bad in (0.0, 0.99, 5.01, 6.0, -1.0, 100.0):
            scores = dict.fromkeys(rubric.dimension_names(), 3.0)
            scores["novelty"] = bad
            sheet = ScoreSheet(
                subject_id="s",
                rubric_id="idea_v1",
                rater=Rater(kind="llm", rater_id="j"),
                scores=scores,
            )
            with pytest.raises(ValueError):
                sheet.validate_against(rubric)
        report("scoring: out-of-range rubric scores are always rejected")


@pytest.mark.slow
class TestEthicsGateOrdering:
    def test_harmful_pattern_zero_ideation_calls_and_exit_two(self, tmp_path):
        harmful = fixture_task().model_copy(
            update={
                "dataset": fixture_task().dataset.model_copy(
                    update={"description": "re-identification of patients at scale"}
                )
            }
        )
        config = fixture_config()
        gateway = build_gateway(config)
        with pytest.raises(EthicsRejected):
            run_mode(harmful, "innovation", config, tmp_path / "direct", gateway=gateway)
        ideation_calls = [stage for stage, _ in gateway.call_log if stage == "ideation"]
        assert ideation_calls == []
        assert gateway.call_log == []  # pattern screen fires before any model call

        task_path = tmp_path / "task.json"
        task_path.write_text(json.dumps(harmful.model_dump()))
        result = CliRunner().invoke(
            cli_main,
            [
                "innovate", str(task_path),
                "--workspace", str(tmp_path / "cli"),
                "--config", str(FIXTURES / "innovation_config.yaml"),
            ],
        )
        assert result.exit_code == 2
        report("ethics gate: zero ideation calls before the gate; CLI exit code 2")
