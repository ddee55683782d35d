"""Document-level cross-modal similarity measures.

Four measures are computed per document, each independently and each
with a full per-entity (or per-noun) breakdown:

    cmps  faces vs mentioned persons' reference galleries
    cmls  geo feature vs mentioned locations' galleries
    cmes  scene feature vs mentioned events' galleries
    cmcs  noun context vs scene classes, weighted by scene probabilities

Measures are reported on the raw cosine scale [-1, 1] and are never
combined. A measure that does not apply to a document is absent and
carries a reason code instead of a value.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .clustering import DEFAULT_TAU_P, person_reference_vector
from .exceptions import EmptyReferences
from .manifest import canonical_json
from .model import CorpusManifest, DocumentRecord, EntityRecord, SceneVocabulary
from .similarity import Aggregator, aggregate, cosine, parse_aggregator

MEASURES = ("cmps", "cmls", "cmes", "cmcs")

REASON_NO_MENTIONS = "no_mentions"
REASON_NO_FACES = "no_faces"
REASON_EMPTY_REFERENCES = "empty_references"
REASON_MISSING_IMAGE_FEATURE = "missing_image_feature"
REASON_NO_CONTEXT = "no_context"

PERSON_MODES = ("cluster", "aggregate")


@dataclass(frozen=True)
class ScoringConfig:
    """Knobs for a scoring run.

    Persons default to the cluster-then-mean reference strategy; the
    aggregate mode compares each face against every gallery image and
    reduces with ``person_aggregator`` instead. Locations and events
    always reduce their gallery cosines with their aggregator (Max by
    default, empirically the strongest choice).
    """

    tau_p: float = DEFAULT_TAU_P
    person_mode: str = "cluster"
    person_aggregator: Aggregator = Aggregator.maximum()
    location_aggregator: Aggregator = Aggregator.maximum()
    event_aggregator: Aggregator = Aggregator.maximum()

    def __post_init__(self) -> None:
        if not 0.0 <= self.tau_p <= 1.0:
            raise ValueError(f"tau_p must lie in [0, 1], got {self.tau_p}")
        if self.person_mode not in PERSON_MODES:
            raise ValueError(f"person_mode must be one of {PERSON_MODES}")

    def to_mapping(self) -> dict[str, object]:
        return {
            "tau_p": self.tau_p,
            "person_mode": self.person_mode,
            "person_aggregator": self.person_aggregator.spec(),
            "location_aggregator": self.location_aggregator.spec(),
            "event_aggregator": self.event_aggregator.spec(),
        }

    @classmethod
    def from_mapping(cls, payload: Mapping[str, object]) -> "ScoringConfig":
        known = {
            "tau_p",
            "person_mode",
            "person_aggregator",
            "location_aggregator",
            "event_aggregator",
        }
        unknown = set(payload) - known
        if unknown:
            raise ValueError(f"unknown scoring options: {sorted(unknown)}")
        base = cls()
        return cls(
            tau_p=float(payload.get("tau_p", base.tau_p)),
            person_mode=str(payload.get("person_mode", base.person_mode)),
            person_aggregator=parse_aggregator(
                payload.get("person_aggregator", base.person_aggregator)
            ),
            location_aggregator=parse_aggregator(
                payload.get("location_aggregator", base.location_aggregator)
            ),
            event_aggregator=parse_aggregator(
                payload.get("event_aggregator", base.event_aggregator)
            ),
        )

    def fingerprint(self, exclude: Iterable[str] = ()) -> str:
        """Stable digest of the config plus any entity exclusions; used
        as the score-cache key."""
        payload = self.to_mapping()
        payload["exclude"] = sorted(set(exclude))
        return hashlib.sha256(canonical_json(payload).encode()).hexdigest()


@dataclass(frozen=True)
class MeasureResult:
    """Either a value in [-1, 1] or a reason the measure is absent."""

    value: float | None
    reason: str | None = None

    def __post_init__(self) -> None:
        if (self.value is None) == (self.reason is None):
            raise ValueError("exactly one of value and reason must be set")

    @property
    def present(self) -> bool:
        return self.value is not None


@dataclass(frozen=True)
class MatrixBreakdown:
    """Faces x persons similarity matrix; rows follow the document's
    face order, columns the sorted usable person ids."""

    person_ids: tuple[str, ...] = ()
    matrix: tuple[tuple[float, ...], ...] = ()
    skipped: tuple[tuple[str, str], ...] = ()

    def to_payload(self) -> dict[str, object]:
        return {
            "person_ids": list(self.person_ids),
            "matrix": [list(row) for row in self.matrix],
            "skipped": [list(item) for item in self.skipped],
        }


@dataclass(frozen=True)
class StripBreakdown:
    """One similarity per label: entity ids for cmls/cmes, nouns for cmcs."""

    labels: tuple[str, ...] = ()
    values: tuple[float, ...] = ()
    skipped: tuple[tuple[str, str], ...] = ()

    def to_payload(self) -> dict[str, object]:
        return {
            "labels": list(self.labels),
            "values": list(self.values),
            "skipped": [list(item) for item in self.skipped],
        }


def _mentioned(
    doc: DocumentRecord, entity_type: str, exclude: frozenset[str]
) -> list[str]:
    return sorted(set(doc.mentions(entity_type)) - exclude)


def cmps(
    doc: DocumentRecord,
    entities: Mapping[str, EntityRecord],
    config: ScoringConfig,
    exclude: frozenset[str] = frozenset(),
) -> tuple[MeasureResult, MatrixBreakdown]:
    """Cross-modal person similarity: the maximum cosine between any
    detected face and any mentioned person's visual reference."""
    mentioned = _mentioned(doc, "person", exclude)
    if not mentioned:
        return MeasureResult(None, REASON_NO_MENTIONS), MatrixBreakdown()
    skipped = tuple(
        (pid, REASON_EMPTY_REFERENCES)
        for pid in mentioned
        if not len(entities[pid].references)
    )
    usable = [pid for pid in mentioned if len(entities[pid].references)]
    if not doc.face_embeddings:
        return MeasureResult(None, REASON_NO_FACES), MatrixBreakdown(skipped=skipped)
    if not usable:
        return (
            MeasureResult(None, REASON_EMPTY_REFERENCES),
            MatrixBreakdown(skipped=skipped),
        )

    columns: list[list[float]] = []
    for pid in usable:
        gallery = entities[pid].references.vectors
        if config.person_mode == "cluster":
            reference = person_reference_vector(gallery, tau_p=config.tau_p)
            columns.append([cosine(face, reference) for face in doc.face_embeddings])
        else:
            columns.append(
                [
                    aggregate(
                        [cosine(face, ref) for ref in gallery],
                        config.person_aggregator,
                    )
                    for face in doc.face_embeddings
                ]
            )
    matrix = tuple(
        tuple(columns[p][f] for p in range(len(usable)))
        for f in range(len(doc.face_embeddings))
    )
    value = max(max(row) for row in matrix)
    return MeasureResult(value), MatrixBreakdown(tuple(usable), matrix, skipped)


def entity_image_similarity(
    image_vec: np.ndarray, entity: EntityRecord, agg: Aggregator
) -> float:
    """Aggregate the cosines between one image feature and every
    reference image of *entity*."""
    refs = entity.references.vectors
    if not refs:
        raise EmptyReferences(f"entity {entity.entity_id!r} has no reference images")
    return aggregate([cosine(image_vec, ref) for ref in refs], agg)


def _gallery_measure(
    doc: DocumentRecord,
    entities: Mapping[str, EntityRecord],
    entity_type: str,
    image_vec: np.ndarray | None,
    agg: Aggregator,
    exclude: frozenset[str],
) -> tuple[MeasureResult, StripBreakdown]:
    mentioned = _mentioned(doc, entity_type, exclude)
    if not mentioned:
        return MeasureResult(None, REASON_NO_MENTIONS), StripBreakdown()
    skipped = tuple(
        (eid, REASON_EMPTY_REFERENCES)
        for eid in mentioned
        if not len(entities[eid].references)
    )
    usable = [eid for eid in mentioned if len(entities[eid].references)]
    if image_vec is None:
        return (
            MeasureResult(None, REASON_MISSING_IMAGE_FEATURE),
            StripBreakdown(skipped=skipped),
        )
    if not usable:
        return (
            MeasureResult(None, REASON_EMPTY_REFERENCES),
            StripBreakdown(skipped=skipped),
        )
    values = tuple(
        entity_image_similarity(image_vec, entities[eid], agg) for eid in usable
    )
    return MeasureResult(max(values)), StripBreakdown(tuple(usable), values, skipped)


def cmls(
    doc: DocumentRecord,
    entities: Mapping[str, EntityRecord],
    agg: Aggregator,
    exclude: frozenset[str] = frozenset(),
) -> tuple[MeasureResult, StripBreakdown]:
    """Cross-modal location similarity: geolocation feature vs the
    galleries of mentioned locations, max over entities."""
    return _gallery_measure(doc, entities, "location", doc.geo_embedding, agg, exclude)


def cmes(
    doc: DocumentRecord,
    entities: Mapping[str, EntityRecord],
    agg: Aggregator,
    exclude: frozenset[str] = frozenset(),
) -> tuple[MeasureResult, StripBreakdown]:
    """Cross-modal event similarity: scene feature vs the galleries of
    mentioned events, max over entities."""
    return _gallery_measure(doc, entities, "event", doc.scene_embedding, agg, exclude)


def cmcs(
    doc: DocumentRecord, vocab: SceneVocabulary
) -> tuple[MeasureResult, StripBreakdown]:
    """Cross-modal context similarity.

    Every noun is compared to every scene class in word-embedding space;
    per noun the cosines are weighted by the image's scene probabilities
    and summed. The document value is the best noun.
    """
    if not doc.noun_context:
        return MeasureResult(None, REASON_NO_CONTEXT), StripBreakdown()
    if doc.scene_probabilities is None or not len(vocab):
        return MeasureResult(None, REASON_MISSING_IMAGE_FEATURE), StripBreakdown()
    weights = np.asarray(doc.scene_probabilities, dtype=np.float64)
    values = []
    for item in doc.noun_context:
        terms = [
            weights[i] * cosine(cls.vector, item.vector)
            for i, cls in enumerate(vocab.classes)
        ]
        values.append(math.fsum(terms))
    labels = tuple(item.noun for item in doc.noun_context)
    return MeasureResult(max(values)), StripBreakdown(labels, tuple(values))


@dataclass(frozen=True)
class ScoredDocument:
    """All four measures for one document, each with its breakdown.

    Invariant: every present measure equals the exact maximum of its own
    breakdown entries.
    """

    doc_id: str
    cmps: MeasureResult
    cmls: MeasureResult
    cmes: MeasureResult
    cmcs: MeasureResult
    person_breakdown: MatrixBreakdown = field(default_factory=MatrixBreakdown)
    location_breakdown: StripBreakdown = field(default_factory=StripBreakdown)
    event_breakdown: StripBreakdown = field(default_factory=StripBreakdown)
    context_breakdown: StripBreakdown = field(default_factory=StripBreakdown)

    def measure(self, name: str) -> MeasureResult:
        if name not in MEASURES:
            raise KeyError(f"unknown measure {name!r}")
        return getattr(self, name)

    def to_payload(self) -> dict[str, object]:
        def measure_payload(result: MeasureResult) -> dict[str, object]:
            return {"value": result.value, "reason": result.reason}

        return {
            "doc_id": self.doc_id,
            "measures": {name: measure_payload(self.measure(name)) for name in MEASURES},
            "person_breakdown": self.person_breakdown.to_payload(),
            "location_breakdown": self.location_breakdown.to_payload(),
            "event_breakdown": self.event_breakdown.to_payload(),
            "context_breakdown": self.context_breakdown.to_payload(),
        }


def score_document(
    doc: DocumentRecord,
    corpus: CorpusManifest,
    config: ScoringConfig | None = None,
    *,
    exclude: Iterable[str] = (),
) -> ScoredDocument:
    """Compute all four measures for one document.

    *exclude* removes entity mentions before scoring (the what-if path);
    scoring is a pure function of its inputs.
    """
    config = config or ScoringConfig()
    excluded = frozenset(exclude)
    person_result, person_breakdown = cmps(doc, corpus.entities, config, excluded)
    location_result, location_breakdown = cmls(
        doc, corpus.entities, config.location_aggregator, excluded
    )
    event_result, event_breakdown = cmes(
        doc, corpus.entities, config.event_aggregator, excluded
    )
    context_result, context_breakdown = cmcs(doc, corpus.scene_vocabulary)
    return ScoredDocument(
        doc_id=doc.doc_id,
        cmps=person_result,
        cmls=location_result,
        cmes=event_result,
        cmcs=context_result,
        person_breakdown=person_breakdown,
        location_breakdown=location_breakdown,
        event_breakdown=event_breakdown,
        context_breakdown=context_breakdown,
    )


MEASURE_FOR_TYPE = {
    "person": "cmps",
    "location": "cmls",
    "event": "cmes",
    "context": "cmcs",
}
