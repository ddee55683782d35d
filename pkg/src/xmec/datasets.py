"""Synthetic corpora with controllable cross-modal structure.

Three generators:

    make_separable_corpus    every document has its own visual topic;
                             clean scores concentrate near 1 and any
                             substitution lands far away
    make_overlapping_corpus  events share parent classes whose visual
                             themes overlap, so same-parent substitution
                             is much harder to detect than random
    make_attribute_fixture   many entities with dense attribute
                             structure (genders, citizenship, parent
                             classes, coordinates) for tampering tests

All generators are deterministic per seed and emit float32 vectors.
"""

from __future__ import annotations

import numpy as np

from .model import (
    ContextNoun,
    CorpusManifest,
    DocumentRecord,
    EntityRecord,
    EventAttrs,
    LocationAttrs,
    PersonAttrs,
    ReferenceImage,
    ReferenceImageSet,
    SceneClass,
    SceneVocabulary,
    make_corpus,
)

_GENDERS = ("female", "male")
_COUNTRIES = ("AR", "BR", "DE", "FR", "IN", "JP", "KE", "US")
_LOCATION_PARENTS = ("city", "capital", "municipality")
_EVENT_PARENTS = ("sport", "politics", "disaster", "culture")


def _unit(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.standard_normal(dim)
    return (v / np.linalg.norm(v)).astype(np.float32)


def _near(rng: np.random.Generator, center: np.ndarray, noise: float) -> np.ndarray:
    v = center.astype(np.float64) + noise * rng.standard_normal(center.size)
    return (v / np.linalg.norm(v)).astype(np.float32)


def _gallery(
    rng: np.random.Generator, center: np.ndarray, noise: float, count: int
) -> ReferenceImageSet:
    items = tuple(
        ReferenceImage(source=f"src{i % 2}", vector=_near(rng, center, noise))
        for i in range(count)
    )
    return ReferenceImageSet(items)


def make_separable_corpus(
    n_documents: int = 200,
    dim: int = 32,
    seed: int = 7,
    noise: float = 0.05,
    references_per_entity: int = 4,
) -> CorpusManifest:
    """One private visual topic per document and per entity type.

    Each document mentions exactly one person, location, and event of
    its own; galleries and image features sit within *noise* of the
    topic direction, so clean similarities approach 1 while any
    substituted entity scores near the cosine of two random directions.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    entities: list[EntityRecord] = []
    documents: list[DocumentRecord] = []
    classes = []
    class_centers = []
    for d in range(n_documents):
        center = _unit(rng, dim)
        class_centers.append(center)
        classes.append(
            SceneClass(class_id=f"s{d:03d}", label=f"scene {d}", vector=center)
        )
    vocab = SceneVocabulary(tuple(classes))

    for d in range(n_documents):
        face_center = _unit(rng, dim)
        geo_center = _unit(rng, dim)
        scene_center = _unit(rng, dim)
        image_center = _unit(rng, dim)
        person_id, location_id, event_id = f"p{d:03d}", f"l{d:03d}", f"e{d:03d}"
        entities.append(
            EntityRecord(
                entity_id=person_id,
                entity_type="person",
                label=f"Person {d}",
                references=_gallery(rng, face_center, noise, references_per_entity),
                person=PersonAttrs(
                    gender=_GENDERS[d % 2],
                    citizenship=frozenset({_COUNTRIES[d % len(_COUNTRIES)]}),
                ),
            )
        )
        entities.append(
            EntityRecord(
                entity_id=location_id,
                entity_type="location",
                label=f"Location {d}",
                references=_gallery(rng, geo_center, noise, references_per_entity),
                location=LocationAttrs(
                    latitude=float(rng.uniform(-60, 60)),
                    longitude=float(rng.uniform(-179, 180)),
                    parent_classes=frozenset(
                        {_LOCATION_PARENTS[d % len(_LOCATION_PARENTS)]}
                    ),
                ),
            )
        )
        entities.append(
            EntityRecord(
                entity_id=event_id,
                entity_type="event",
                label=f"Event {d}",
                references=_gallery(rng, scene_center, noise, references_per_entity),
                event=EventAttrs(
                    parent_classes=frozenset({_EVENT_PARENTS[d % len(_EVENT_PARENTS)]})
                ),
            )
        )
        probs = np.zeros(n_documents, dtype=np.float32)
        probs[d] = 1.0
        documents.append(
            DocumentRecord(
                doc_id=f"d{d:03d}",
                person_mentions=(person_id,),
                location_mentions=(location_id,),
                event_mentions=(event_id,),
                noun_context=tuple(
                    ContextNoun(
                        noun=f"noun{d}_{i}",
                        vector=_near(rng, class_centers[d], noise),
                    )
                    for i in range(3)
                ),
                face_embeddings=(
                    _near(rng, face_center, noise),
                    _near(rng, face_center, noise),
                ),
                geo_embedding=_near(rng, geo_center, noise),
                scene_embedding=_near(rng, scene_center, noise),
                scene_probabilities=probs,
                image_similarity_embedding=_near(rng, image_center, noise),
                scene_kind="outdoor" if d % 2 else "indoor",
            )
        )
    return make_corpus(f"separable-{seed}", entities, documents, vocab)


def make_overlapping_corpus(
    n_documents: int = 200,
    dim: int = 32,
    seed: int = 11,
    n_parents: int = 4,
    parent_pull: float = 0.3,
    event_spread: float = 0.25,
    noise: float = 0.35,
    references_per_entity: int = 3,
) -> CorpusManifest:
    """Events only, grouped under visually themed parent classes.

    Parent themes share a common global direction (*parent_pull* controls
    how much), events scatter around their parent (*event_spread*), and
    galleries plus scene embeddings add *noise*. Same-parent substitutes
    therefore stay visually close while random substitutes usually cross
    parents, reproducing the ordering random > same-parent in detection
    difficulty.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    anchor = _unit(rng, dim).astype(np.float64)
    parent_dirs = []
    for _ in range(n_parents):
        v = parent_pull * anchor + rng.standard_normal(dim)
        parent_dirs.append(v / np.linalg.norm(v))

    entities = []
    event_dirs = []
    for d in range(n_documents):
        parent = d % n_parents
        direction = parent_dirs[parent] + event_spread * rng.standard_normal(dim)
        direction = direction / np.linalg.norm(direction)
        event_dirs.append(direction)
        entities.append(
            EntityRecord(
                entity_id=f"e{d:03d}",
                entity_type="event",
                label=f"Event {d}",
                references=_gallery(
                    rng, direction.astype(np.float32), noise, references_per_entity
                ),
                event=EventAttrs(parent_classes=frozenset({f"parent{parent}"})),
            )
        )
    documents = [
        DocumentRecord(
            doc_id=f"d{d:03d}",
            event_mentions=(f"e{d:03d}",),
            scene_embedding=_near(rng, event_dirs[d].astype(np.float32), noise),
        )
        for d in range(n_documents)
    ]
    return make_corpus(f"overlapping-{seed}", entities, documents, SceneVocabulary())


def make_attribute_fixture(
    n_entities: int = 300, n_documents: int = 80, dim: int = 8, seed: int = 3
) -> CorpusManifest:
    """Attribute-dense fixture: 100 persons, 100 locations, 100 events
    (for the default 300), documents mentioning several of each, and
    full image features on every document."""
    if n_entities % 3:
        raise ValueError("n_entities must be divisible by 3")
    per_type = n_entities // 3
    rng = np.random.Generator(np.random.PCG64(seed))
    entities: list[EntityRecord] = []
    for i in range(per_type):
        citizenship = {
            _COUNTRIES[i % len(_COUNTRIES)],
            _COUNTRIES[(i // 3) % len(_COUNTRIES)],
        }
        entities.append(
            EntityRecord(
                entity_id=f"p{i:03d}",
                entity_type="person",
                label=f"Person {i}",
                references=_gallery(rng, _unit(rng, dim), 0.2, 2),
                person=PersonAttrs(
                    gender=_GENDERS[i % 2], citizenship=frozenset(citizenship)
                ),
            )
        )
    for i in range(per_type):
        # ring of locations: neighbors sit tens to hundreds of km apart,
        # so every GCD band finds candidates somewhere on the ring, and
        # blocks of ten consecutive ring positions share a region parent
        angle = 2 * np.pi * i / per_type
        entities.append(
            EntityRecord(
                entity_id=f"l{i:03d}",
                entity_type="location",
                label=f"Location {i}",
                references=_gallery(rng, _unit(rng, dim), 0.2, 2),
                location=LocationAttrs(
                    latitude=float(35.0 + 10.0 * np.sin(angle)),
                    longitude=float(10.0 + 40.0 * np.cos(angle)),
                    parent_classes=frozenset(
                        {
                            f"region{i // 10}",
                            _LOCATION_PARENTS[i % len(_LOCATION_PARENTS)],
                        }
                    ),
                ),
            )
        )
    for i in range(per_type):
        parents = {_EVENT_PARENTS[i % len(_EVENT_PARENTS)]}
        if i % 5 == 0:
            parents.add(_EVENT_PARENTS[(i + 1) % len(_EVENT_PARENTS)])
        entities.append(
            EntityRecord(
                entity_id=f"e{i:03d}",
                entity_type="event",
                label=f"Event {i}",
                references=_gallery(rng, _unit(rng, dim), 0.2, 2),
                event=EventAttrs(parent_classes=frozenset(parents)),
            )
        )

    vocab = SceneVocabulary(
        tuple(
            SceneClass(class_id=f"s{i}", label=f"scene {i}", vector=_unit(rng, dim))
            for i in range(12)
        )
    )
    documents = []
    for d in range(n_documents):
        picks = {
            kind: sorted(
                f"{kind[0]}{int(i):03d}"
                for i in rng.choice(per_type, size=3, replace=False)
            )
            for kind in ("person", "location", "event")
        }
        probs = rng.dirichlet(np.ones(len(vocab))).astype(np.float32)
        probs = probs / probs.sum()
        documents.append(
            DocumentRecord(
                doc_id=f"d{d:03d}",
                person_mentions=tuple(picks["person"]),
                location_mentions=tuple(picks["location"]),
                event_mentions=tuple(picks["event"]),
                noun_context=tuple(
                    ContextNoun(noun=f"noun{d}_{i}", vector=_unit(rng, dim))
                    for i in range(2)
                ),
                face_embeddings=(_unit(rng, dim),),
                geo_embedding=_unit(rng, dim),
                scene_embedding=_unit(rng, dim),
                scene_probabilities=probs,
                image_similarity_embedding=_unit(rng, dim),
                scene_kind="indoor" if d % 3 else "outdoor",
            )
        )
    return make_corpus(f"fixture-{seed}", entities, documents, vocab)
