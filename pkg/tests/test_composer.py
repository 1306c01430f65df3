"""Composer: crossrefs, figures, bibliography, narrative, drafting, compile loop."""

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from medlab.composer import (
    MaxIterationsExceeded,
    ScriptedCompilerAdapter,
    TokenizeError,
    UnresolvedClaim,
    cited_keys_from_aux,
    clip_summary,
    compile_document,
    draft_section,
    emit_bbl,
    enhance_narrative,
    fix_duplicate_labels,
    generate_figures,
    parse_bib,
    plan_outline,
    reference_commands,
    render_statement,
    resolve_crossrefs,
    review_ethics,
)
from medlab.evidence import (
    CodeRecord,
    EvidenceAnchor,
    EvidenceBase,
    EvidenceItem,
    PaperRecord,
    TaskRepresentation,
)
from medlab.executor import LossSeries, MetricCell, StructuredResults
from medlab.types import DatasetSpec

from conftest import make_gateway
from crossref_corpus import BIB_KEYS, make_clean_doc, mutate


def make_results(runs=1):
    cells = [
        MetricCell(
            stage="test",
            metric="accuracy",
            value=0.8,
            run_index=i,
            provenance=f"run{i}:logs/weights_manifest.json:final_metrics.accuracy",
        )
        for i in range(runs)
    ]
    series = [
        LossSeries(
            split="train",
            run_index=i,
            points=[(s, 2.0 - 0.3 * s) for s in range(5)],
            provenance=f"run{i}:logs/metrics.jsonl",
        )
        for i in range(runs)
    ]
    return StructuredResults(cells=cells, series=series, run_count=runs)


def make_base():
    task = TaskRepresentation(
        modality="image",
        task_category="image.classification",
        disease_context="retinal disease",
        data_characteristics=["fundus"],
        evaluation_constraints=["graded"],
        clinical_needs=["screening"],
    )
    papers = [
        PaperRecord(record_id="alpha2019", title="Alpha", year=2019, venue="VenueA",
                    citation_count=10, abstract="alpha abstract"),
        PaperRecord(record_id="beta2020", title="Beta", year=2020, venue="VenueB",
                    citation_count=5, abstract="beta abstract"),
    ]
    code = CodeRecord(repo_url="https://example.org/r", entrypoints=["train.py"])
    items = [
        EvidenceItem(claim_text="clinical claim",
                     anchor=EvidenceAnchor(record_id="alpha2019", locator="s1"),
                     kind="clinical"),
        EvidenceItem(claim_text="technical claim",
                     anchor=EvidenceAnchor(record_id="https://example.org/r", locator="train.py"),
                     kind="technical"),
    ]
    return EvidenceBase(task=task, papers=papers, codes=[code], items=items)


class TestCrossref:
    def test_dangling_ref(self):
        doc = "line one\n\\ref{fig:one} here\n"
        report = resolve_crossrefs(doc)
        assert [f.kind for f in report.findings] == ["dangling_ref"]
        assert report.findings[0].symbol == "fig:one"
        assert report.findings[0].line == 2

    def test_duplicate_label_single_finding(self):
        doc = "\\label{eq:a}\nmiddle \\ref{eq:a}\n\\label{eq:a}\n"
        report = resolve_crossrefs(doc)
        assert [f.kind for f in report.findings] == ["duplicate_label"]

    def test_missing_citation_multi_key(self):
        doc = "\\cite{known,unknown}\n"
        report = resolve_crossrefs(doc, bibliography_keys={"known"})
        assert [f.kind for f in report.findings] == ["missing_citation"]
        assert report.findings[0].symbol == "unknown"

    def test_unused_label_is_warning(self):
        doc = "\\label{never-used}\n"
        report = resolve_crossrefs(doc)
        assert report.findings[0].kind == "unused_label"
        assert report.findings[0].severity == "warning"

    def test_clean_document_empty_report(self):
        report = resolve_crossrefs(make_clean_doc(0), bibliography_keys=set(BIB_KEYS))
        assert report.is_clean()

    def test_idempotence_on_clean(self):
        doc = make_clean_doc(1)
        first = resolve_crossrefs(doc, bibliography_keys=set(BIB_KEYS))
        second = resolve_crossrefs(doc, bibliography_keys=set(BIB_KEYS))
        assert first.is_clean() and second.is_clean()
        assert first.model_dump() == second.model_dump()

    def test_comment_lines_ignored(self):
        doc = "% \\ref{fig:ghost}\nreal text\n"
        assert resolve_crossrefs(doc).is_clean()

    def test_tokenize_error_on_unbalanced_brace(self):
        with pytest.raises(TokenizeError):
            resolve_crossrefs("\\ref{fig:one\n")

    def test_seeded_mutation_recall(self):
        kinds = ("dangling_ref", "duplicate_label", "missing_citation", "unused_label")
        for i in range(8):
            for kind in kinds:
                doc, symbol = mutate(make_clean_doc(i), kind, i)
                report = resolve_crossrefs(doc, bibliography_keys=set(BIB_KEYS))
                assert len(report.findings) == 1, (kind, i, report.findings)
                assert report.findings[0].kind == kind
                assert report.findings[0].symbol == symbol

    def test_fix_duplicate_labels(self):
        doc = "\\label{x}\n\\ref{x}\n\\label{x}\n"
        fixed, renames = fix_duplicate_labels(doc)
        assert renames == {"x": ["x-dup2"]}
        assert resolve_crossrefs(fixed).findings[0].kind == "unused_label"  # the renamed one


class TestFigures:
    def test_line_plot_contains_all_points(self, tmp_path):
        results = make_results()
        paths = generate_figures(results, tmp_path)
        loss = next(p for p in paths if "loss_train" in p.name)
        payload = loss.read_text()
        data = json.loads(payload.split("<metadata>")[1].split("</metadata>")[0])
        assert len(data["points"]) == 5

    def test_empty_results_empty_assets(self, tmp_path):
        results = StructuredResults()
        assert generate_figures(results, tmp_path) == []

    def test_byte_identical_reruns(self, tmp_path):
        results = make_results()
        a = generate_figures(results, tmp_path / "a")
        b = generate_figures(results, tmp_path / "b")
        for pa, pb in zip(a, b):
            assert pa.read_bytes() == pb.read_bytes()


class TestBibliography:
    BIB = (
        "@article{kay2020,\n  title = {A Study of Things},\n"
        "  author = {R. Kay},\n  journal = {Journal of Examples},\n  year = {2020}\n}\n"
        "@inproceedings{lin2021,\n  title = {Another {Nested} Title},\n"
        "  author = {T. Lin},\n  booktitle = {Proc. Conf.},\n  year = {2021}\n}\n"
    )

    def test_parse_entries(self):
        db = parse_bib(self.BIB)
        assert set(db) == {"kay2020", "lin2021"}
        assert db["kay2020"].fields["year"] == "2020"
        assert "Nested" in db["lin2021"].fields["title"]

    def test_cited_keys_from_aux(self):
        aux = "\\relax\n\\citation{kay2020}\n\\citation{lin2021,kay2020}\n"
        assert cited_keys_from_aux(aux) == ["kay2020", "lin2021"]

    def test_emit_bbl_sorted_and_complete(self):
        db = parse_bib(self.BIB)
        bbl = emit_bbl(["lin2021", "kay2020"], db)
        assert bbl.index("kay2020") < bbl.index("lin2021")
        assert "\\begin{thebibliography}" in bbl


class TestNarrative:
    DOC = (
        "Intro citing \\cite{alpha2019} here.\n\n"
        "Middle section, see \\ref{sec:x} and \\label{sec:x}.\n\n"
        "Closing words without references."
    )

    def test_reference_preservation_on_good_edit(self):
        def responder(request):
            return {"edits": [{"index": 2, "text": "Better closing words without references."}]}

        gateway = make_gateway(responder)
        result = enhance_narrative(self.DOC, gateway)
        assert "Better closing" in result.text
        assert len(result.change_log) == 1
        assert result.change_log[0].status == "applied"
        assert reference_commands(result.text) == reference_commands(self.DOC)

    def test_reference_mutation_reverted(self):
        def responder(request):
            return {"edits": [{"index": 0, "text": "Intro with the citation removed."}]}

        gateway = make_gateway(responder)
        result = enhance_narrative(self.DOC, gateway)
        assert "\\cite{alpha2019}" in result.text
        assert result.change_log[0].status == "rejected_reference_mutation"

    @settings(max_examples=60, deadline=None)
    @given(index=st.integers(min_value=0, max_value=4), drop=st.booleans())
    def test_reference_multiset_invariant(self, index, drop):
        def responder(request):
            text = "rewritten" if drop else self.DOC.split("\n\n")[min(index // 2, 2)]
            return {"edits": [{"index": index, "text": text}]}

        gateway = make_gateway(responder)
        result = enhance_narrative(self.DOC, gateway)
        assert reference_commands(result.text) == reference_commands(self.DOC)


class TestOutlineAndDrafting:
    def outline_content(self):
        return {
            "sections": [
                {"section_id": sid, "title": sid.title(), "goal": f"cover {sid}",
                 "evidence_refs": []}
                for sid in ("introduction", "method", "experiments", "conclusion")
            ]
        }

    def test_minimum_sections_and_bindings(self):
        gateway = make_gateway(lambda req: self.outline_content())
        outline = plan_outline(make_base().papers, make_results(runs=2), gateway)
        assert set(outline.section_ids()) >= {"introduction", "method", "experiments", "conclusion"}
        experiments = next(n for n in outline.flat() if n.section_id == "experiments")
        assert "table:test/accuracy" in experiments.evidence_refs

    def test_empty_reference_list_precondition(self):
        gateway = make_gateway(lambda req: self.outline_content())
        with pytest.raises(ValueError):
            plan_outline([], make_results(), gateway)

    def draft_content(self, target="alpha2019"):
        return {
            "body": "Claims with \\cite{alpha2019}.",
            "anchor_summary": "One sentence. Two sentences.",
            "claim_links": [{"span": "Claims", "target": target}],
        }

    def test_first_section_empty_anchors(self):
        gateway = make_gateway(lambda req: self.draft_content())
        outline_node = plan_outline(
            make_base().papers, make_results(), make_gateway(lambda r: self.outline_content())
        ).flat()[0]
        draft = draft_section(outline_node, make_base(), [], make_results(), gateway)
        assert draft.anchor_summary

    def test_prior_anchors_in_request_verbatim(self):
        gateway = make_gateway(lambda req: self.draft_content())
        node = plan_outline(
            make_base().papers, make_results(), make_gateway(lambda r: self.outline_content())
        ).flat()[2]
        anchors = ["First summary sentence.", "Second summary, also verbatim."]
        draft_section(node, make_base(), anchors, make_results(), gateway)
        request_text = gateway.backend.requests[-1].messages[-1].text
        for anchor in anchors:
            assert anchor in request_text

    def test_unresolved_claim_after_repair(self):
        gateway = make_gateway(lambda req: self.draft_content(target="run9:nowhere"))
        node = plan_outline(
            make_base().papers, make_results(), make_gateway(lambda r: self.outline_content())
        ).flat()[0]
        with pytest.raises(UnresolvedClaim):
            draft_section(node, make_base(), [], make_results(), gateway)

    def test_clip_summary(self):
        assert clip_summary("One. Two. Three. Four.") == "One. Two. Three."


class TestEthics:
    def test_entries_per_dataset_with_markers(self):
        gateway = make_gateway(lambda req: {"narrative": "Data governance summary."})
        specs = [
            DatasetSpec(dataset_id="d1", name="set1", modality="image",
                        license_id="CC-BY-4.0", origin="public archive",
                        ethical_approval="IRB-123"),
            DatasetSpec(dataset_id="d2", name="set2", modality="image"),
        ]
        statement = review_ethics(specs, gateway)
        assert len(statement.entries) == 2
        text = render_statement(statement)
        assert "CC-BY-4.0" in text
        assert "not documented" in text

    def test_requires_a_dataset(self):
        gateway = make_gateway(lambda req: {"narrative": "x"})
        with pytest.raises(ValueError):
            review_ethics([], gateway)


class TestCompileLoopScripted:
    def test_clean_document_one_iteration(self, tmp_path):
        adapter = ScriptedCompilerAdapter([{"exit_status": 0, "log": "all good", "artifact": True}])
        outcome = compile_document("doc", adapter, None, workdir=tmp_path)
        assert outcome.status == "success"
        assert outcome.iterations == 1
        assert outcome.fixes_applied == []

    def test_rerun_warning_then_clean(self, tmp_path):
        adapter = ScriptedCompilerAdapter(
            [
                {"exit_status": 0, "artifact": True,
                 "log": "LaTeX Warning: Reference `a' on page 1 undefined on input line 3.\n"
                        "LaTeX Warning: There were undefined references."},
                {"exit_status": 0, "artifact": True, "log": "clean"},
            ]
        )
        outcome = compile_document("doc", adapter, None, workdir=tmp_path)
        assert outcome.iterations == 2
        assert [(f.error_class, f.fix_kind) for f in outcome.fixes_applied] == [
            ("undefined_reference_rerun", "deterministic")
        ]

    def test_always_failing_exhausts_exactly_five(self, tmp_path):
        adapter = ScriptedCompilerAdapter(
            [{"exit_status": 1, "log": "! Something horrible happened.\nl.1 x\n"}]
        )
        gateway = make_gateway(
            lambda req: {"start_line": 1, "end_line": 1, "replacement": "still broken"}
        )
        with pytest.raises(MaxIterationsExceeded) as excinfo:
            compile_document("doc", adapter, gateway, max_iter=5, workdir=tmp_path)
        assert adapter.calls == 5
        assert excinfo.value.outcome.iterations == 5
        assert len(excinfo.value.outcome.attempt_transcript) == 5
