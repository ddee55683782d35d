"""Evaluation tasks: document verification and collection retrieval.

Given a tampered test set, every covered document is scored twice (clean
and tampered variant) on the measure matching the tampered type. The
report carries verification accuracy, ROC AUC, and average precision at
recall levels 25/50/100% for both retrieval directions: descending
similarity retrieves clean documents, ascending retrieves tampered ones.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .exceptions import MalformedManifest
from .manifest import canonical_json
from .measures import MEASURE_FOR_TYPE, ScoredDocument, ScoringConfig, score_document
from .metrics import (
    RankedCollection,
    RankEntry,
    ap_at_recall,
    roc_auc,
    verification_accuracy,
)
from .model import CorpusManifest
from .tamper import TamperedTestSet, tampered_document

RECALL_LEVELS = (0.25, 0.5, 1.0)
SUBSET_FRACTIONS = (0.25, 0.5)
REPORT_FORMAT = "xmec-report"
REPORT_VERSION = 1


def _percent_label(level: float) -> str:
    return str(int(round(level * 100)))


def _snap(value: float) -> float:
    # lock AP fractions to values that survive the x100 serialization
    return (value * 100.0) / 100.0


@dataclass(frozen=True)
class EvaluationReport:
    """Results for one (type, strategy, subset) cell of an evaluation grid."""

    corpus_id: str
    entity_type: str
    strategy: str
    seed: int
    measure: str
    subset: str
    n_documents: int
    va: float
    auc: float
    ap_clean: Mapping[float, float]
    ap_tampered: Mapping[float, float]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "ap_clean", {k: _snap(v) for k, v in self.ap_clean.items()}
        )
        object.__setattr__(
            self, "ap_tampered", {k: _snap(v) for k, v in self.ap_tampered.items()}
        )

    def to_payload(self) -> dict[str, object]:
        def percent_map(values: Mapping[float, float]) -> dict[str, float]:
            return {
                _percent_label(level): values[level] * 100.0
                for level in sorted(values)
            }

        return {
            "format": REPORT_FORMAT,
            "version": REPORT_VERSION,
            "corpus_id": self.corpus_id,
            "entity_type": self.entity_type,
            "strategy": self.strategy,
            "seed": self.seed,
            "measure": self.measure,
            "subset": self.subset,
            "n_documents": self.n_documents,
            "va": self.va,
            "auc": self.auc,
            "ap_clean": percent_map(self.ap_clean),
            "ap_tampered": percent_map(self.ap_tampered),
        }

    def to_json(self) -> str:
        return canonical_json(self.to_payload())

    @classmethod
    def from_payload(cls, payload: Mapping[str, object]) -> "EvaluationReport":
        if payload.get("format") != REPORT_FORMAT:
            raise MalformedManifest(f"not a {REPORT_FORMAT} document")
        if payload.get("version") != REPORT_VERSION:
            raise MalformedManifest(
                f"unsupported report version {payload.get('version')!r}"
            )

        def fraction_map(raw: Mapping[str, float]) -> dict[float, float]:
            return {int(label) / 100.0: value / 100.0 for label, value in raw.items()}

        try:
            return cls(
                corpus_id=str(payload["corpus_id"]),
                entity_type=str(payload["entity_type"]),
                strategy=str(payload["strategy"]),
                seed=int(payload["seed"]),
                measure=str(payload["measure"]),
                subset=str(payload["subset"]),
                n_documents=int(payload["n_documents"]),
                va=float(payload["va"]),
                auc=float(payload["auc"]),
                ap_clean=fraction_map(payload["ap_clean"]),
                ap_tampered=fraction_map(payload["ap_tampered"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedManifest(f"malformed report: {exc}") from exc


def save_report(report: EvaluationReport, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(report.to_json())
    return path


def load_report(path: str | Path) -> EvaluationReport:
    path = Path(path)
    try:
        payload = json.loads(path.read_text())
    except OSError as exc:
        raise MalformedManifest(f"cannot read report {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise MalformedManifest(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise MalformedManifest(f"{path}: top level must be an object")
    return EvaluationReport.from_payload(payload)


def reports_to_csv(reports: Iterable[EvaluationReport]) -> str:
    """Flatten reports into CSV rows, one per (test set, subset), AP x100."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    levels = [0.25, 0.5, 1.0]
    writer.writerow(
        ["test_set", "subset", "n_documents", "va", "auc"]
        + [f"ap_clean@{_percent_label(l)}" for l in levels]
        + [f"ap_tampered@{_percent_label(l)}" for l in levels]
    )
    for report in reports:
        writer.writerow(
            [
                f"{report.entity_type}/{report.strategy}",
                report.subset,
                report.n_documents,
                report.va,
                report.auc,
            ]
            + [
                report.ap_clean[l] * 100.0 if l in report.ap_clean else ""
                for l in levels
            ]
            + [
                report.ap_tampered[l] * 100.0 if l in report.ap_tampered else ""
                for l in levels
            ]
        )
    return buffer.getvalue()


def topk_subset(
    scored: Sequence[ScoredDocument], entity_type: str, fraction: float
) -> set[str]:
    """Ids of the ceil(fraction * N) applicable documents with the
    highest clean measure of *entity_type*; ties broken by doc_id."""
    if fraction not in SUBSET_FRACTIONS:
        raise ValueError(f"fraction must be one of {SUBSET_FRACTIONS}")
    measure_name = MEASURE_FOR_TYPE[entity_type]
    applicable = [
        (s.doc_id, s.measure(measure_name).value)
        for s in scored
        if s.measure(measure_name).present
    ]
    k = math.ceil(round(fraction * len(applicable), 9))
    ordered = sorted(applicable, key=lambda item: (-item[1], item[0]))
    return {doc_id for doc_id, _ in ordered[:k]}


def score_pairs(
    corpus: CorpusManifest,
    testset: TamperedTestSet,
    config: ScoringConfig | None = None,
) -> tuple[list[tuple[str, float, float]], list[ScoredDocument]]:
    """Per-document (doc_id, clean, tampered) measure values for the
    test set's entity type.

    Documents where either variant's measure is absent are excluded;
    they cannot participate in a comparison.
    """
    config = config or ScoringConfig()
    measure_name = MEASURE_FOR_TYPE[testset.entity_type]
    pairs: list[tuple[str, float, float]] = []
    clean_scored: list[ScoredDocument] = []
    for doc_id in testset.doc_ids():
        clean = score_document(corpus.documents[doc_id], corpus, config)
        tampered = score_document(
            tampered_document(corpus, testset, doc_id), corpus, config
        )
        clean_value = clean.measure(measure_name).value
        tampered_value = tampered.measure(measure_name).value
        if clean_value is None or tampered_value is None:
            continue
        clean_scored.append(clean)
        pairs.append((doc_id, clean_value, tampered_value))
    return pairs, clean_scored


def collection_retrieval(
    corpus: CorpusManifest,
    testset: TamperedTestSet,
    config: ScoringConfig | None = None,
    *,
    subset: float | None = None,
    recall_levels: Sequence[float] = RECALL_LEVELS,
    literal_ap: bool = False,
) -> EvaluationReport:
    """Score all clean and tampered variants and reduce to one report.

    With *subset*, only the documents whose clean measure ranks in the
    top fraction are evaluated; membership is decided on clean scores
    alone and the tampered variants inherit it.
    """
    measure_name = MEASURE_FOR_TYPE[testset.entity_type]
    pairs, clean_scored = score_pairs(corpus, testset, config)
    subset_label = "all"
    if subset is not None:
        keep = topk_subset(clean_scored, testset.entity_type, subset)
        pairs = [p for p in pairs if p[0] in keep]
        subset_label = f"top{_percent_label(subset)}"

    score_pairs_only = [(c, t) for _, c, t in pairs]
    clean_values = [c for _, c, _ in pairs]
    tampered_values = [t for _, _, t in pairs]
    va = verification_accuracy(score_pairs_only)
    auc = roc_auc(clean_values, tampered_values)

    entries = []
    for doc_id, clean_value, tampered_value in pairs:
        entries.append(RankEntry(doc_id, "clean", clean_value))
        entries.append(RankEntry(doc_id, "tampered", tampered_value))
    descending = RankedCollection.build(entries, "descending")
    ascending = RankedCollection.build(entries, "ascending")
    ap_clean = {
        level: ap_at_recall(descending, "clean", level, literal=literal_ap)
        for level in recall_levels
    }
    ap_tampered = {
        level: ap_at_recall(ascending, "tampered", level, literal=literal_ap)
        for level in recall_levels
    }
    return EvaluationReport(
        corpus_id=corpus.corpus_id,
        entity_type=testset.entity_type,
        strategy=testset.strategy.spec(),
        seed=testset.seed,
        measure=measure_name,
        subset=subset_label,
        n_documents=len(pairs),
        va=va,
        auc=auc,
        ap_clean=ap_clean,
        ap_tampered=ap_tampered,
    )
