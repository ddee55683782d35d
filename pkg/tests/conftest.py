"""Shared fixtures and terse corpus builders for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from xmec.datasets import (
    make_attribute_fixture,
    make_overlapping_corpus,
    make_separable_corpus,
)
from xmec.model import (
    ContextNoun,
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


def vec(*xs) -> np.ndarray:
    return np.asarray(xs, dtype=np.float64)


def refs(*vectors, source: str = "wiki") -> ReferenceImageSet:
    return ReferenceImageSet(
        tuple(ReferenceImage(source=source, vector=vec(*v)) for v in vectors)
    )


def person(eid, gallery=(), gender="female", citizenship=("DE",), label=None):
    return EntityRecord(
        entity_id=eid,
        entity_type="person",
        label=label or eid,
        references=refs(*gallery),
        person=PersonAttrs(gender=gender, citizenship=frozenset(citizenship)),
    )


def location(eid, gallery=(), lat=52.52, lon=13.405, parents=("city",), label=None):
    return EntityRecord(
        entity_id=eid,
        entity_type="location",
        label=label or eid,
        references=refs(*gallery),
        location=LocationAttrs(
            latitude=lat, longitude=lon, parent_classes=frozenset(parents)
        ),
    )


def event(eid, gallery=(), parents=("sport",), label=None):
    return EntityRecord(
        entity_id=eid,
        entity_type="event",
        label=label or eid,
        references=refs(*gallery),
        event=EventAttrs(parent_classes=frozenset(parents)),
    )


def doc(doc_id, persons=(), locations=(), events=(), faces=(), geo=None,
        scene=None, probs=None, nouns=(), imgsim=None, scene_kind=None):
    return DocumentRecord(
        doc_id=doc_id,
        person_mentions=tuple(persons),
        location_mentions=tuple(locations),
        event_mentions=tuple(events),
        noun_context=tuple(
            ContextNoun(noun=f"n{i}", vector=vec(*v)) for i, v in enumerate(nouns)
        ),
        face_embeddings=tuple(vec(*f) for f in faces),
        geo_embedding=None if geo is None else vec(*geo),
        scene_embedding=None if scene is None else vec(*scene),
        scene_probabilities=None if probs is None else vec(*probs),
        image_similarity_embedding=None if imgsim is None else vec(*imgsim),
        scene_kind=scene_kind,
    )


def vocab(*vectors) -> SceneVocabulary:
    return SceneVocabulary(
        tuple(
            SceneClass(class_id=f"c{i}", label=f"class {i}", vector=vec(*v))
            for i, v in enumerate(vectors)
        )
    )


def toy_corpus():
    """Four-dimensional corpus small enough to score by hand.

    alice's gallery clusters around e0, bob's around e1, carol has no
    references. d1 carries two faces plus image features; d2 has
    mentions but no image side; d3 has an image but mentions nothing.
    """
    entities = [
        person("alice", gallery=[(1, 0, 0, 0), (0.9, 0.1, 0, 0), (1, 0.05, 0, 0)]),
        person("bob", gallery=[(0, 1, 0, 0), (0, 0.95, 0.05, 0)], gender="male"),
        person("carol", gallery=[]),
        location("paris", gallery=[(0, 0, 1, 0), (0, 0.1, 0.9, 0)],
                 lat=48.8566, lon=2.3522),
        location("berlin", gallery=[(0, 0, 0, 1)], lat=52.52, lon=13.405),
        location("nowhere", gallery=[], lat=0.0, lon=0.0),
        event("match", gallery=[(0.5, 0.5, 0, 0), (0.4, 0.6, 0, 0)]),
        event("quiet", gallery=[]),
    ]
    documents = [
        doc(
            "d1",
            persons=["alice", "bob", "carol"],
            locations=["paris", "nowhere"],
            events=["match"],
            faces=[(1, 0, 0, 0), (0, 1, 0, 0)],
            geo=(0, 0, 1, 0),
            scene=(0.5, 0.5, 0, 0),
            probs=(0.7, 0.2, 0.1),
            nouns=[(1, 0, 0), (0, 1, 0)],
            imgsim=(1, 0, 0, 0),
        ),
        doc(
            "d2",
            persons=["alice"],
            locations=["berlin"],
            events=["quiet"],
            nouns=[(0, 0, 1)],
            imgsim=(0, 1, 0, 0),
        ),
        doc(
            "d3",
            faces=[(0.7, 0.7, 0, 0)],
            geo=(0, 0, 0, 1),
            scene=(0, 1, 0, 0),
            probs=(0.2, 0.3, 0.5),
            imgsim=(0.5, 0.5, 0, 0),
        ),
    ]
    vocabulary = vocab((1, 0, 0), (0, 1, 0), (0, 0, 1))
    return make_corpus("toy", entities, documents, vocabulary)


@pytest.fixture
def toy():
    return toy_corpus()


@pytest.fixture(scope="session")
def separable():
    return make_separable_corpus(n_documents=200, dim=32, seed=7)


@pytest.fixture(scope="session")
def overlapping():
    return make_overlapping_corpus(n_documents=200, dim=32, seed=11)


@pytest.fixture(scope="session")
def attribute_fixture():
    return make_attribute_fixture(n_entities=300, n_documents=80, dim=8, seed=3)


@pytest.fixture(scope="session")
def small_separable():
    # small variant for pipeline tests where runtime matters more than power
    return make_separable_corpus(n_documents=60, dim=16, seed=21)
