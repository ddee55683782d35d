"""Retrieval evaluation: pairing, subsets, report shape, CSV export.

The corpus here is built from Pythagorean triples so every clean and
tampered measure value is a quotient of small exact integers (4/5,
12/13, 8/17, ...). That makes the expected VA, AUC and rankings exact
doubles we can write down literally.
"""

import csv
import io
import json
import math

import pytest

from conftest import doc, person
from oracles import pairwise_auc, recount_ap, recount_va
from xmec.evaluation import (
    RECALL_LEVELS,
    SUBSET_FRACTIONS,
    EvaluationReport,
    collection_retrieval,
    load_report,
    reports_to_csv,
    save_report,
    score_pairs,
    topk_subset,
)
from xmec.exceptions import EmptyInput, MalformedManifest
from xmec.measures import ScoringConfig
from xmec.model import make_corpus
from xmec.tamper import TamperStrategy, tamper_entities

# with exactly two persons, "random" tampering has a single candidate
# per substitution, so the tampered value is known without touching RNG
CLEAN = {"d1": 4 / 5, "d2": 12 / 13, "d3": 5 / 13, "d4": 8 / 17, "d5": 15 / 17}
TAMPERED = {"d1": 3 / 5, "d2": 5 / 13, "d3": 12 / 13, "d4": 15 / 17, "d5": 8 / 17}

# descending by (-score, doc_id, variant); 1 marks the clean variant
DESCENDING_CLEAN_FLAGS = [1, 0, 0, 1, 1, 0, 1, 0, 0, 1]


def retrieval_corpus():
    entities = [
        person("pa", gallery=[(1, 0, 0, 0)]),
        person("pb", gallery=[(0, 1, 0, 0)], gender="male"),
    ]
    documents = [
        # d0 mentions a person but has no faces: the measure is absent
        doc("d0", persons=["pa"], imgsim=(1, 0, 0, 0)),
        doc("d1", persons=["pa"], faces=[(4, 3, 0, 0)]),
        doc("d2", persons=["pa"], faces=[(12, 5, 0, 0)]),
        doc("d3", persons=["pa"], faces=[(5, 12, 0, 0)]),
        doc("d4", persons=["pa"], faces=[(8, 15, 0, 0)]),
        doc("d5", persons=["pa"], faces=[(15, 8, 0, 0)]),
    ]
    return make_corpus("retrieval", entities, documents)


def person_testset(corpus, seed=123):
    strategy = TamperStrategy.parse("person", "random")
    return tamper_entities(corpus, "person", strategy, seed)


@pytest.fixture(scope="module")
def fixture():
    corpus = retrieval_corpus()
    return corpus, person_testset(corpus)


class TestScorePairs:
    def test_values_are_exact_rationals(self, fixture):
        corpus, testset = fixture
        pairs, _ = score_pairs(corpus, testset)
        assert [p[0] for p in pairs] == ["d1", "d2", "d3", "d4", "d5"]
        for doc_id, clean, tampered in pairs:
            assert clean == CLEAN[doc_id]
            assert tampered == TAMPERED[doc_id]

    def test_document_without_measure_is_excluded(self, fixture):
        corpus, testset = fixture
        assert "d0" in testset.doc_ids()
        pairs, _ = score_pairs(corpus, testset)
        assert "d0" not in {p[0] for p in pairs}

    def test_clean_scored_aligns_with_pairs(self, fixture):
        corpus, testset = fixture
        pairs, clean_scored = score_pairs(corpus, testset)
        assert [s.doc_id for s in clean_scored] == [p[0] for p in pairs]
        for scored, (_, clean, _) in zip(clean_scored, pairs):
            assert scored.measure("cmps").value == clean

    def test_no_scorable_documents_raises(self):
        entities = [
            person("pa", gallery=[(1, 0, 0, 0)]),
            person("pb", gallery=[(0, 1, 0, 0)], gender="male"),
        ]
        corpus = make_corpus(
            "faceless", entities, [doc("d0", persons=["pa"], imgsim=(1, 0, 0, 0))]
        )
        testset = person_testset(corpus)
        pairs, _ = score_pairs(corpus, testset)
        assert pairs == []
        with pytest.raises(EmptyInput):
            collection_retrieval(corpus, testset)


class TestCollectionRetrieval:
    def test_report_header_fields(self, fixture):
        corpus, testset = fixture
        report = collection_retrieval(corpus, testset)
        assert report.corpus_id == "retrieval"
        assert report.entity_type == "person"
        assert report.strategy == "random"
        assert report.seed == testset.seed
        assert report.measure == "cmps"
        assert report.subset == "all"
        assert report.n_documents == 5

    def test_va_and_auc_match_oracles(self, fixture):
        corpus, testset = fixture
        report = collection_retrieval(corpus, testset)
        pairs, _ = score_pairs(corpus, testset)
        # d1, d2 and d5 keep clean above tampered; d3 and d4 flip
        assert report.va == recount_va([(c, t) for _, c, t in pairs])
        assert report.va == 0.6
        clean = [c for _, c, _ in pairs]
        tampered = [t for _, _, t in pairs]
        assert report.auc == pairwise_auc(clean, tampered)
        assert report.auc == pytest.approx(13 / 25)

    def test_ap_matches_flag_walk_oracle(self, fixture):
        corpus, testset = fixture
        report = collection_retrieval(corpus, testset)
        assert set(report.ap_clean) == set(RECALL_LEVELS)
        for level in RECALL_LEVELS:
            expected = recount_ap(DESCENDING_CLEAN_FLAGS, level)
            snapped = (expected * 100.0) / 100.0
            assert report.ap_clean[level] == pytest.approx(snapped, abs=1e-12)
        assert report.ap_clean[0.25] == 0.75
        assert report.ap_clean[0.5] == pytest.approx(0.7)
        assert report.ap_clean[1.0] == pytest.approx(
            (1 + 1 / 2 + 3 / 5 + 4 / 7 + 1 / 2) / 5
        )

    def test_tampered_ranking_mirrors_clean(self, fixture):
        # ascending over swapped values realizes the identical flag
        # pattern, so the two AP maps coincide bit for bit
        corpus, testset = fixture
        report = collection_retrieval(corpus, testset)
        assert report.ap_tampered == report.ap_clean

    def test_custom_recall_levels(self, fixture):
        corpus, testset = fixture
        report = collection_retrieval(corpus, testset, recall_levels=(0.5,))
        assert set(report.ap_clean) == {0.5}
        assert set(report.ap_tampered) == {0.5}

    def test_literal_ap_mode(self, fixture):
        corpus, testset = fixture
        report = collection_retrieval(corpus, testset, literal_ap=True)
        for level in RECALL_LEVELS:
            expected = recount_ap(DESCENDING_CLEAN_FLAGS, level, literal=True)
            snapped = (expected * 100.0) / 100.0
            assert report.ap_clean[level] == pytest.approx(snapped, abs=1e-12)

    def test_person_mode_does_not_matter_for_singleton_galleries(self, fixture):
        corpus, testset = fixture
        by_cluster = collection_retrieval(
            corpus, testset, ScoringConfig(person_mode="cluster")
        )
        by_aggregate = collection_retrieval(
            corpus, testset, ScoringConfig(person_mode="aggregate")
        )
        assert by_cluster == by_aggregate

    def test_repeated_runs_serialize_identically(self, fixture):
        corpus, testset = fixture
        first = collection_retrieval(corpus, testset)
        second = collection_retrieval(corpus, testset)
        assert first.to_json() == second.to_json()


class TestTopkSubset:
    def test_quarter_and_half(self, fixture):
        corpus, testset = fixture
        _, clean_scored = score_pairs(corpus, testset)
        # five applicable documents: ceil(1.25) = 2, ceil(2.5) = 3
        assert topk_subset(clean_scored, "person", 0.25) == {"d2", "d5"}
        assert topk_subset(clean_scored, "person", 0.5) == {"d1", "d2", "d5"}

    def test_ties_break_by_doc_id(self):
        entities = [
            person("pa", gallery=[(1, 0, 0, 0)]),
            person("pb", gallery=[(0, 1, 0, 0)], gender="male"),
        ]
        documents = [
            # (4, 3) and (8, 6) are parallel, so t1 and t2 tie at 0.8
            doc("t1", persons=["pa"], faces=[(4, 3, 0, 0)]),
            doc("t2", persons=["pa"], faces=[(8, 6, 0, 0)]),
            doc("t3", persons=["pa"], faces=[(12, 5, 0, 0)]),
        ]
        corpus = make_corpus("ties", entities, documents)
        testset = person_testset(corpus)
        _, clean_scored = score_pairs(corpus, testset)
        assert topk_subset(clean_scored, "person", 0.25) == {"t3"}
        assert topk_subset(clean_scored, "person", 0.5) == {"t1", "t3"}

    @pytest.mark.parametrize("fraction", [0.3, 1.0, 0.0, -0.25])
    def test_unsupported_fraction_rejected(self, fixture, fraction):
        corpus, testset = fixture
        _, clean_scored = score_pairs(corpus, testset)
        assert fraction not in SUBSET_FRACTIONS
        with pytest.raises(ValueError):
            topk_subset(clean_scored, "person", fraction)

    def test_subset_report_quarter(self, fixture):
        corpus, testset = fixture
        report = collection_retrieval(corpus, testset, subset=0.25)
        assert report.subset == "top25"
        assert report.n_documents == 2
        # d2 and d5 both keep clean strictly above every tampered value
        assert report.va == 1.0
        assert report.auc == 1.0
        assert report.ap_clean == {level: 1.0 for level in RECALL_LEVELS}
        assert report.ap_tampered == {level: 1.0 for level in RECALL_LEVELS}

    def test_subset_report_half(self, fixture):
        corpus, testset = fixture
        report = collection_retrieval(corpus, testset, subset=0.5)
        assert report.subset == "top50"
        assert report.n_documents == 3
        assert report.va == 1.0
        assert report.auc == 1.0

    def test_subset_membership_decided_on_clean_scores(self, fixture):
        # d3's tampered value (12/13) tops the tampered list, but its
        # clean score is the weakest, so it never enters the subset
        corpus, testset = fixture
        pairs, clean_scored = score_pairs(corpus, testset)
        keep = topk_subset(clean_scored, "person", 0.5)
        assert "d3" not in keep
        assert max(TAMPERED.items(), key=lambda kv: kv[1])[0] == "d3"


class TestReportSerialization:
    def test_payload_shape(self, fixture):
        corpus, testset = fixture
        report = collection_retrieval(corpus, testset)
        payload = report.to_payload()
        assert payload["format"] == "xmec-report"
        assert payload["version"] == 1
        assert set(payload["ap_clean"]) == {"25", "50", "100"}
        assert payload["ap_clean"]["25"] == 75.0
        for label, level in (("25", 0.25), ("50", 0.5), ("100", 1.0)):
            assert payload["ap_clean"][label] == report.ap_clean[level] * 100.0

    def test_round_trip_preserves_equality(self, fixture):
        corpus, testset = fixture
        report = collection_retrieval(corpus, testset)
        restored = EvaluationReport.from_payload(json.loads(report.to_json()))
        assert restored == report
        assert restored.to_json() == report.to_json()

    def test_save_and_load(self, fixture, tmp_path):
        corpus, testset = fixture
        report = collection_retrieval(corpus, testset, subset=0.25)
        path = save_report(report, tmp_path / "report.json")
        assert load_report(path) == report

    def test_load_rejects_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(MalformedManifest):
            load_report(path)

    def test_load_rejects_non_object_top_level(self, tmp_path):
        path = tmp_path / "list.json"
        path.write_text("[1, 2, 3]")
        with pytest.raises(MalformedManifest):
            load_report(path)

    def test_load_rejects_missing_file(self, tmp_path):
        with pytest.raises(MalformedManifest):
            load_report(tmp_path / "absent.json")

    def test_from_payload_rejects_wrong_marker(self, fixture):
        corpus, testset = fixture
        payload = collection_retrieval(corpus, testset).to_payload()
        for mangled in (
            {**payload, "format": "xmec-corpus"},
            {**payload, "version": 2},
        ):
            with pytest.raises(MalformedManifest):
                EvaluationReport.from_payload(mangled)

    def test_from_payload_rejects_missing_field(self, fixture):
        corpus, testset = fixture
        payload = collection_retrieval(corpus, testset).to_payload()
        payload.pop("va")
        with pytest.raises(MalformedManifest):
            EvaluationReport.from_payload(payload)


class TestCsvExport:
    HEADER = [
        "test_set",
        "subset",
        "n_documents",
        "va",
        "auc",
        "ap_clean@25",
        "ap_clean@50",
        "ap_clean@100",
        "ap_tampered@25",
        "ap_tampered@50",
        "ap_tampered@100",
    ]

    def test_rows_carry_percent_values(self, fixture):
        corpus, testset = fixture
        full = collection_retrieval(corpus, testset)
        quarter = collection_retrieval(corpus, testset, subset=0.25)
        rows = list(csv.reader(io.StringIO(reports_to_csv([full, quarter]))))
        assert rows[0] == self.HEADER
        assert len(rows) == 3
        for row, report in zip(rows[1:], (full, quarter)):
            assert row[0] == "person/random"
            assert row[1] == report.subset
            assert int(row[2]) == report.n_documents
            assert float(row[3]) == report.va
            assert float(row[4]) == report.auc
            assert float(row[5]) == report.ap_clean[0.25] * 100.0
            assert float(row[7]) == report.ap_clean[1.0] * 100.0
            assert float(row[10]) == report.ap_tampered[1.0] * 100.0

    def test_missing_levels_render_empty(self, fixture):
        corpus, testset = fixture
        narrow = collection_retrieval(corpus, testset, recall_levels=(0.5,))
        rows = list(csv.reader(io.StringIO(reports_to_csv([narrow]))))
        row = rows[1]
        assert row[5] == "" and row[7] == ""
        assert float(row[6]) == narrow.ap_clean[0.5] * 100.0
