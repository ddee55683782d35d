"""Corpus data model: entities, documents, scene vocabulary, statistics.

Embeddings arrive precomputed from external producers (face, geolocation,
scene, and word models); this package never runs inference. A corpus is
immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

import numpy as np

from .exceptions import DimMismatch, IntegrityError, InvalidCoordinate
from .geo import check_coordinates
from .validation import as_vector, check_probability_vector

ENTITY_TYPES = ("person", "location", "event")
SCENE_KINDS = ("indoor", "outdoor")
DEFAULT_PER_SOURCE_CAP = 10

# Embedding roles; every vector of one role shares a single dimension
# corpus-wide because members of a role are compared to each other.
ROLE_FACE = "face"      # document faces + person reference galleries
ROLE_GEO = "geo"        # document geo feature + location reference galleries
ROLE_SCENE = "scene"    # document scene feature + event reference galleries
ROLE_WORD = "word"      # noun-context embeddings + scene-class label embeddings
ROLE_IMAGE = "image"    # whole-image similarity feature (context tampering only)
ROLES = (ROLE_FACE, ROLE_GEO, ROLE_SCENE, ROLE_WORD, ROLE_IMAGE)


@dataclass(frozen=True)
class ReferenceImage:
    source: str
    vector: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "vector", as_vector(self.vector, name="reference vector")
        )


@dataclass(frozen=True)
class ReferenceImageSet:
    """Per-entity gallery of reference-image embeddings, capped per source."""

    items: tuple[ReferenceImage, ...] = ()

    def __len__(self) -> int:
        return len(self.items)

    @property
    def vectors(self) -> tuple[np.ndarray, ...]:
        return tuple(item.vector for item in self.items)

    def capped(self, per_source_cap: int) -> "ReferenceImageSet":
        """Drop items beyond the first *per_source_cap* of each source."""
        if per_source_cap < 1:
            raise ValueError("per_source_cap must be positive")
        seen: dict[str, int] = {}
        kept = []
        for item in self.items:
            seen[item.source] = seen.get(item.source, 0) + 1
            if seen[item.source] <= per_source_cap:
                kept.append(item)
        return ReferenceImageSet(tuple(kept))


@dataclass(frozen=True)
class PersonAttrs:
    gender: str
    citizenship: frozenset[str] = frozenset()


@dataclass(frozen=True)
class LocationAttrs:
    latitude: float
    longitude: float
    parent_classes: frozenset[str] = frozenset()


@dataclass(frozen=True)
class EventAttrs:
    parent_classes: frozenset[str] = frozenset()


@dataclass(frozen=True)
class EntityRecord:
    """A knowledge-base-linked person, location, or event.

    Exactly the attribute block matching ``entity_type`` must be present;
    location coordinates are validated on construction.
    """

    entity_id: str
    entity_type: str
    label: str
    references: ReferenceImageSet = field(default_factory=ReferenceImageSet)
    person: PersonAttrs | None = None
    location: LocationAttrs | None = None
    event: EventAttrs | None = None

    def __post_init__(self) -> None:
        if self.entity_type not in ENTITY_TYPES:
            raise IntegrityError(
                f"entity {self.entity_id!r}: unknown type {self.entity_type!r}"
            )
        blocks = {
            "person": self.person,
            "location": self.location,
            "event": self.event,
        }
        for kind, block in blocks.items():
            present = block is not None
            if present != (kind == self.entity_type):
                raise IntegrityError(
                    f"entity {self.entity_id!r}: attrs block mismatch for "
                    f"type {self.entity_type!r}"
                )
        if self.location is not None:
            try:
                check_coordinates(self.location.latitude, self.location.longitude)
            except InvalidCoordinate as exc:
                raise InvalidCoordinate(
                    f"entity {self.entity_id!r}: {exc}"
                ) from exc


@dataclass(frozen=True)
class ContextNoun:
    noun: str
    vector: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "vector", as_vector(self.vector, name=f"noun {self.noun!r}")
        )


@dataclass(frozen=True)
class DocumentRecord:
    """One news article: text-side entity mentions and noun context plus
    the image-side feature vectors."""

    doc_id: str
    person_mentions: tuple[str, ...] = ()
    location_mentions: tuple[str, ...] = ()
    event_mentions: tuple[str, ...] = ()
    noun_context: tuple[ContextNoun, ...] = ()
    face_embeddings: tuple[np.ndarray, ...] = ()
    geo_embedding: np.ndarray | None = None
    scene_embedding: np.ndarray | None = None
    scene_probabilities: np.ndarray | None = None
    image_similarity_embedding: np.ndarray | None = None
    scene_kind: str | None = None

    def __post_init__(self) -> None:
        if self.scene_kind is not None and self.scene_kind not in SCENE_KINDS:
            raise IntegrityError(
                f"document {self.doc_id!r}: bad scene_kind {self.scene_kind!r}"
            )
        # store everything as immutable float32 so a corpus scores
        # identically before and after a save/load round trip
        owner = f"document {self.doc_id!r}"
        object.__setattr__(
            self,
            "face_embeddings",
            tuple(
                as_vector(face, name=f"{owner} face[{i}]")
                for i, face in enumerate(self.face_embeddings)
            ),
        )
        for attr in ("geo_embedding", "scene_embedding",
                     "image_similarity_embedding"):
            value = getattr(self, attr)
            if value is not None:
                object.__setattr__(
                    self, attr, as_vector(value, name=f"{owner} {attr}")
                )
        if self.scene_probabilities is not None:
            object.__setattr__(
                self,
                "scene_probabilities",
                check_probability_vector(
                    self.scene_probabilities,
                    size=None,
                    name=f"{owner} scene_probabilities",
                ),
            )

    def mentions(self, entity_type: str) -> tuple[str, ...]:
        return {
            "person": self.person_mentions,
            "location": self.location_mentions,
            "event": self.event_mentions,
        }[entity_type]

    def with_image_from(self, donor: "DocumentRecord") -> "DocumentRecord":
        """Replace the image wholesale: every image-side feature comes from
        *donor* while the text side stays untouched."""
        return replace(
            self,
            face_embeddings=donor.face_embeddings,
            geo_embedding=donor.geo_embedding,
            scene_embedding=donor.scene_embedding,
            scene_probabilities=donor.scene_probabilities,
            image_similarity_embedding=donor.image_similarity_embedding,
            scene_kind=donor.scene_kind,
        )


@dataclass(frozen=True)
class SceneClass:
    class_id: str
    label: str
    vector: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(
            self,
            "vector",
            as_vector(self.vector, name=f"scene class {self.class_id!r}"),
        )


@dataclass(frozen=True)
class SceneVocabulary:
    """Fixed scene-class vocabulary; the reference configuration has 365
    classes but any fixed size is accepted."""

    classes: tuple[SceneClass, ...] = ()

    def __len__(self) -> int:
        return len(self.classes)

    def __post_init__(self) -> None:
        ids = [c.class_id for c in self.classes]
        if len(set(ids)) != len(ids):
            raise IntegrityError("scene vocabulary has duplicate class ids")


@dataclass(frozen=True)
class CorpusManifest:
    """Validated, immutable corpus. Construct via :func:`make_corpus` or
    :func:`xmec.manifest.load_manifest`."""

    corpus_id: str
    entities: Mapping[str, EntityRecord]
    documents: Mapping[str, DocumentRecord]
    scene_vocabulary: SceneVocabulary
    embedding_dims: Mapping[str, int]
    per_source_cap: int = DEFAULT_PER_SOURCE_CAP

    def entity(self, entity_id: str) -> EntityRecord:
        return self.entities[entity_id]

    def document(self, doc_id: str) -> DocumentRecord:
        return self.documents[doc_id]

    def entities_of_type(self, entity_type: str) -> list[EntityRecord]:
        return [e for e in self.entities.values() if e.entity_type == entity_type]

    def sorted_doc_ids(self) -> list[str]:
        return sorted(self.documents)


class _DimRegistry:
    """Tracks one dimension per embedding role, inferring or enforcing."""

    def __init__(self, declared: Mapping[str, int] | None):
        self.dims: dict[str, int] = dict(declared or {})
        for role, dim in self.dims.items():
            if role not in ROLES:
                raise IntegrityError(f"unknown embedding role {role!r}")
            if not (isinstance(dim, int) and dim > 0):
                raise IntegrityError(f"embedding dim for {role!r} must be positive")

    def check(self, role: str, vector: np.ndarray, owner: str) -> None:
        dim = self.dims.get(role)
        if dim is None:
            self.dims[role] = vector.size
        elif vector.size != dim:
            raise DimMismatch(
                f"{owner}: {role} vector has dim {vector.size}, corpus uses {dim}"
            )


def _validate_entity(entity: EntityRecord, dims: _DimRegistry) -> None:
    role = {"person": ROLE_FACE, "location": ROLE_GEO, "event": ROLE_SCENE}[
        entity.entity_type
    ]
    for item in entity.references.items:
        dims.check(role, item.vector, f"entity {entity.entity_id!r}")


def _validate_document(
    doc: DocumentRecord,
    entities: Mapping[str, EntityRecord],
    vocab: SceneVocabulary,
    dims: _DimRegistry,
) -> None:
    owner = f"document {doc.doc_id!r}"
    for entity_type in ENTITY_TYPES:
        for entity_id in doc.mentions(entity_type):
            record = entities.get(entity_id)
            if record is None:
                raise IntegrityError(f"{owner}: unknown entity {entity_id!r}")
            if record.entity_type != entity_type:
                raise IntegrityError(
                    f"{owner}: entity {entity_id!r} is a {record.entity_type}, "
                    f"listed under {entity_type} mentions"
                )
    for face in doc.face_embeddings:
        dims.check(ROLE_FACE, face, owner)
    if doc.geo_embedding is not None:
        dims.check(ROLE_GEO, doc.geo_embedding, owner)
    if doc.scene_embedding is not None:
        dims.check(ROLE_SCENE, doc.scene_embedding, owner)
    if doc.image_similarity_embedding is not None:
        dims.check(ROLE_IMAGE, doc.image_similarity_embedding, owner)
    for item in doc.noun_context:
        dims.check(ROLE_WORD, item.vector, owner)
    if doc.scene_probabilities is not None:
        check_probability_vector(
            doc.scene_probabilities,
            size=len(vocab),
            name=f"{owner} scene_probabilities",
        )


def make_corpus(
    corpus_id: str,
    entities: Iterable[EntityRecord],
    documents: Iterable[DocumentRecord],
    scene_vocabulary: SceneVocabulary | None = None,
    *,
    embedding_dims: Mapping[str, int] | None = None,
    per_source_cap: int = DEFAULT_PER_SOURCE_CAP,
) -> CorpusManifest:
    """Assemble and fully validate a corpus.

    Ingestion is total: the returned corpus satisfies every invariant
    (referential integrity, per-role dimension consistency, probability
    vectors, reference caps) or a typed error is raised. Reference items
    beyond *per_source_cap* per source are dropped, keeping the first
    ones in listed order.
    """
    vocab = scene_vocabulary or SceneVocabulary()
    dims = _DimRegistry(embedding_dims)

    entity_table: dict[str, EntityRecord] = {}
    for entity in entities:
        if entity.entity_id in entity_table:
            raise IntegrityError(f"duplicate entity id {entity.entity_id!r}")
        if len(entity.references):
            entity = replace(entity, references=entity.references.capped(per_source_cap))
        entity_table[entity.entity_id] = entity
        _validate_entity(entity, dims)

    for cls in vocab.classes:
        dims.check(ROLE_WORD, cls.vector, f"scene class {cls.class_id!r}")

    doc_table: dict[str, DocumentRecord] = {}
    for doc in documents:
        if doc.doc_id in doc_table:
            raise IntegrityError(f"duplicate document id {doc.doc_id!r}")
        _validate_document(doc, entity_table, vocab, dims)
        doc_table[doc.doc_id] = doc

    return CorpusManifest(
        corpus_id=corpus_id,
        entities=entity_table,
        documents=doc_table,
        scene_vocabulary=vocab,
        embedding_dims=dict(dims.dims),
        per_source_cap=per_source_cap,
    )


def filter_by_document_frequency(
    corpus: CorpusManifest, min_documents: Mapping[str, int]
) -> CorpusManifest:
    """Drop entities mentioned in fewer than ``min_documents[type]``
    documents, removing their mentions as well.

    Dataset-construction convenience mirrored from how large corpora are
    usually pruned; never applied implicitly.
    """
    doc_counts: dict[str, set[str]] = {}
    for doc in corpus.documents.values():
        for entity_type in ENTITY_TYPES:
            for entity_id in set(doc.mentions(entity_type)):
                doc_counts.setdefault(entity_id, set()).add(doc.doc_id)

    def keep(entity: EntityRecord) -> bool:
        threshold = min_documents.get(entity.entity_type, 0)
        return len(doc_counts.get(entity.entity_id, ())) >= threshold

    kept = {eid: e for eid, e in corpus.entities.items() if keep(e)}
    documents = []
    for doc_id in corpus.sorted_doc_ids():
        doc = corpus.documents[doc_id]
        documents.append(
            replace(
                doc,
                person_mentions=tuple(m for m in doc.person_mentions if m in kept),
                location_mentions=tuple(m for m in doc.location_mentions if m in kept),
                event_mentions=tuple(m for m in doc.event_mentions if m in kept),
            )
        )
    return make_corpus(
        corpus.corpus_id,
        kept.values(),
        documents,
        corpus.scene_vocabulary,
        embedding_dims=corpus.embedding_dims,
        per_source_cap=corpus.per_source_cap,
    )


@dataclass(frozen=True)
class TypeStats:
    """Per-type corpus statistics: document count, distinct entities, and
    the mean number of distinct mentions per document with that type."""

    documents: int
    unique_entities: int | None
    mean_unique: float | None


def corpus_stats(corpus: CorpusManifest) -> dict[str, TypeStats]:
    """Document/entity counts per entity type plus the noun-context row.

    ``context`` counts every document and averages the noun-context
    length; entity rows count only documents with at least one mention.
    Deterministic and invariant to document insertion order.
    """
    stats: dict[str, TypeStats] = {}
    doc_ids = corpus.sorted_doc_ids()
    for entity_type in ENTITY_TYPES:
        per_doc = [
            len(set(corpus.documents[d].mentions(entity_type))) for d in doc_ids
        ]
        counts = [c for c in per_doc if c > 0]
        distinct = set()
        for d in doc_ids:
            distinct.update(corpus.documents[d].mentions(entity_type))
        stats[entity_type] = TypeStats(
            documents=len(counts),
            unique_entities=len(distinct),
            mean_unique=(math.fsum(counts) / len(counts)) if counts else None,
        )
    noun_counts = [len(corpus.documents[d].noun_context) for d in doc_ids]
    stats["context"] = TypeStats(
        documents=len(doc_ids),
        unique_entities=None,
        mean_unique=(math.fsum(noun_counts) / len(noun_counts)) if noun_counts else None,
    )
    return stats
