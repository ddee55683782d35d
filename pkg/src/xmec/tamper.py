"""Constrained entity and image substitution for building tampered test sets.

Each strategy replaces the mentioned entities of one type (or the whole
image, for context strategies) with plausible but wrong alternatives:

    person    random | psg (same gender) | psc (shared citizenship) | pscg (both)
    location  random | gcd:DMIN:DMAX (distance band, shared parent class)
    event     random | esp (shared parent class)
    context   random | similar:F (donor image from the top F fraction
              by whole-image similarity)

When no candidate satisfies every constraint, the fallback rule draws
uniformly among the candidates satisfying the most atomic constraints.
Generation is deterministic per (corpus, strategy, seed) and test sets
serialize to canonical JSON byte-identically.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Mapping

import numpy as np

from .exceptions import (
    MalformedManifest,
    MissingSimilarityEmbedding,
    NoCandidates,
)
from .geo import haversine_km
from .manifest import canonical_json
from .model import CorpusManifest, DocumentRecord, EntityRecord
from .similarity import cosine

RNG_ALGORITHM = "numpy-pcg64"
TESTSET_FORMAT = "xmec-testset"
TESTSET_VERSION = 1

_ENTITY_KINDS = {
    "person_random": "person",
    "psg": "person",
    "psc": "person",
    "pscg": "person",
    "location_random": "location",
    "location_gcd_band": "location",
    "event_random": "event",
    "esp": "event",
}
_CONTEXT_KINDS = {"context_random_image", "context_similar_image"}


@dataclass(frozen=True)
class TamperStrategy:
    """One substitution strategy plus its parameters."""

    kind: str
    dmin_km: float | None = None
    dmax_km: float | None = None
    require_shared_parent: bool = True
    top_fraction: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in _ENTITY_KINDS and self.kind not in _CONTEXT_KINDS:
            raise ValueError(f"unknown tamper strategy {self.kind!r}")
        if self.kind == "location_gcd_band":
            if self.dmin_km is None or self.dmax_km is None:
                raise ValueError("gcd band needs dmin_km and dmax_km")
            if not 0 < self.dmin_km < self.dmax_km:
                raise ValueError("gcd band requires 0 < dmin_km < dmax_km")
        if self.kind == "context_similar_image":
            if self.top_fraction is None or not 0 < self.top_fraction < 1:
                raise ValueError("top_fraction must lie in (0, 1)")

    @property
    def entity_type(self) -> str:
        return _ENTITY_KINDS.get(self.kind, "context")

    @classmethod
    def parse(cls, entity_type: str, text: str) -> "TamperStrategy":
        """Parse the CLI form, e.g. ('location', 'gcd:25:200') or
        ('context', 'similar:0.25')."""
        parts = text.lower().split(":")
        head = parts[0]
        if entity_type in ("person", "location", "event") and head == "random":
            return cls(kind=f"{entity_type}_random")
        if entity_type == "person" and head in ("psg", "psc", "pscg"):
            return cls(kind=head)
        if entity_type == "location" and head == "gcd":
            if len(parts) not in (3, 4):
                raise ValueError("gcd strategy takes gcd:DMIN:DMAX[:noparent]")
            require = True
            if len(parts) == 4:
                if parts[3] != "noparent":
                    raise ValueError(f"unknown gcd option {parts[3]!r}")
                require = False
            return cls(
                kind="location_gcd_band",
                dmin_km=float(parts[1]),
                dmax_km=float(parts[2]),
                require_shared_parent=require,
            )
        if entity_type == "event" and head == "esp":
            return cls(kind="esp")
        if entity_type == "context":
            if head == "random":
                return cls(kind="context_random_image")
            if head == "similar":
                if len(parts) != 2:
                    raise ValueError("similar strategy takes similar:FRACTION")
                return cls(kind="context_similar_image", top_fraction=float(parts[1]))
        raise ValueError(f"strategy {text!r} does not apply to type {entity_type!r}")

    def spec(self) -> str:
        if self.kind == "location_gcd_band":
            dmin = _trim_number(self.dmin_km)
            dmax = _trim_number(self.dmax_km)
            suffix = "" if self.require_shared_parent else ":noparent"
            return f"gcd:{dmin}:{dmax}{suffix}"
        if self.kind == "context_similar_image":
            return f"similar:{_trim_number(self.top_fraction)}"
        if self.kind.endswith("_random"):
            return "random"
        return self.kind

    def to_payload(self) -> dict[str, object]:
        payload: dict[str, object] = {"kind": self.kind}
        if self.kind == "location_gcd_band":
            payload["dmin_km"] = self.dmin_km
            payload["dmax_km"] = self.dmax_km
            payload["require_shared_parent"] = self.require_shared_parent
        if self.kind == "context_similar_image":
            payload["top_fraction"] = self.top_fraction
        return payload

    @classmethod
    def from_payload(cls, payload: Mapping[str, object]) -> "TamperStrategy":
        return cls(
            kind=str(payload["kind"]),
            dmin_km=payload.get("dmin_km"),
            dmax_km=payload.get("dmax_km"),
            require_shared_parent=bool(payload.get("require_shared_parent", True)),
            top_fraction=payload.get("top_fraction"),
        )


def _trim_number(value: float | None) -> str:
    assert value is not None
    return f"{value:g}"


def strategy_constraints(
    strategy: TamperStrategy,
) -> tuple[tuple[str, Callable[[EntityRecord, EntityRecord], bool]], ...]:
    """The strategy's atomic constraints as named predicates over
    (original, candidate); random variants have none."""

    def same_gender(a: EntityRecord, b: EntityRecord) -> bool:
        return a.person is not None and b.person is not None and (
            a.person.gender == b.person.gender
        )

    def shared_citizenship(a: EntityRecord, b: EntityRecord) -> bool:
        return a.person is not None and b.person is not None and bool(
            a.person.citizenship & b.person.citizenship
        )

    def within_band(a: EntityRecord, b: EntityRecord) -> bool:
        assert a.location is not None and b.location is not None
        assert strategy.dmin_km is not None and strategy.dmax_km is not None
        d = haversine_km(
            (a.location.latitude, a.location.longitude),
            (b.location.latitude, b.location.longitude),
        )
        return strategy.dmin_km <= d <= strategy.dmax_km

    def shared_parent(a: EntityRecord, b: EntityRecord) -> bool:
        pa = a.location.parent_classes if a.location else (
            a.event.parent_classes if a.event else frozenset()
        )
        pb = b.location.parent_classes if b.location else (
            b.event.parent_classes if b.event else frozenset()
        )
        return bool(pa & pb)

    if strategy.kind == "psg":
        return (("same_gender", same_gender),)
    if strategy.kind == "psc":
        return (("shared_citizenship", shared_citizenship),)
    if strategy.kind == "pscg":
        return (("same_gender", same_gender), ("shared_citizenship", shared_citizenship))
    if strategy.kind == "location_gcd_band":
        constraints = [("distance_band", within_band)]
        if strategy.require_shared_parent:
            constraints.append(("shared_parent", shared_parent))
        return tuple(constraints)
    if strategy.kind == "esp":
        return (("shared_parent", shared_parent),)
    return ()


def candidate_pool(
    original: EntityRecord, corpus: CorpusManifest, strategy: TamperStrategy
) -> list[str]:
    """Ids of all same-type entities (excluding the original) that meet
    every constraint of the strategy, sorted."""
    if strategy.entity_type != original.entity_type:
        raise ValueError(
            f"strategy {strategy.spec()!r} targets {strategy.entity_type}, "
            f"entity {original.entity_id!r} is a {original.entity_type}"
        )
    constraints = strategy_constraints(strategy)
    pool = []
    for candidate in corpus.entities_of_type(original.entity_type):
        if candidate.entity_id == original.entity_id:
            continue
        if all(check(original, candidate) for _, check in constraints):
            pool.append(candidate.entity_id)
    return sorted(pool)


def select_replacement(
    original: EntityRecord,
    corpus: CorpusManifest,
    strategy: TamperStrategy,
    rng: np.random.Generator,
) -> tuple[str, bool]:
    """Draw a replacement entity; falls back to the candidates satisfying
    the most atomic constraints when the full pool is empty."""
    pool = candidate_pool(original, corpus, strategy)
    if pool:
        return pool[int(rng.integers(len(pool)))], False
    same_type = sorted(
        c.entity_id
        for c in corpus.entities_of_type(original.entity_type)
        if c.entity_id != original.entity_id
    )
    if not same_type:
        raise NoCandidates(
            f"no other {original.entity_type} entity besides {original.entity_id!r}"
        )
    constraints = strategy_constraints(strategy)
    scores = {
        cid: sum(
            1 for _, check in constraints if check(original, corpus.entity(cid))
        )
        for cid in same_type
    }
    best = max(scores.values())
    finalists = [cid for cid in same_type if scores[cid] == best]
    return finalists[int(rng.integers(len(finalists)))], True


@dataclass(frozen=True)
class FallbackRecord:
    doc_id: str
    original: str
    replacement: str


@dataclass(frozen=True)
class SkipRecord:
    doc_id: str
    entity_id: str
    error: str


@dataclass(frozen=True)
class TamperedTestSet:
    """A reproducible tampering run over one corpus.

    ``substitutions`` maps doc_id to {original: replacement} for entity
    strategies and to the donor doc_id for context strategies.
    """

    corpus_id: str
    entity_type: str
    strategy: TamperStrategy
    seed: int
    substitutions: Mapping[str, Mapping[str, str] | str]
    fallback_log: tuple[FallbackRecord, ...] = ()
    skipped: tuple[SkipRecord, ...] = ()
    rng_algorithm: str = RNG_ALGORITHM

    def doc_ids(self) -> list[str]:
        return sorted(self.substitutions)

    def to_payload(self) -> dict[str, object]:
        subs: dict[str, object] = {}
        for doc_id in self.doc_ids():
            value = self.substitutions[doc_id]
            subs[doc_id] = dict(value) if isinstance(value, Mapping) else value
        return {
            "format": TESTSET_FORMAT,
            "version": TESTSET_VERSION,
            "corpus_id": self.corpus_id,
            "entity_type": self.entity_type,
            "strategy": self.strategy.to_payload(),
            "seed": self.seed,
            "rng_algorithm": self.rng_algorithm,
            "substitutions": subs,
            "fallback_log": [
                {"doc_id": r.doc_id, "original": r.original, "replacement": r.replacement}
                for r in self.fallback_log
            ],
            "skipped": [
                {"doc_id": r.doc_id, "entity_id": r.entity_id, "error": r.error}
                for r in self.skipped
            ],
        }

    def to_json(self) -> str:
        return canonical_json(self.to_payload())


def _check_seed(seed: int) -> int:
    if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2**64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    return seed


def tamper_entities(
    corpus: CorpusManifest,
    entity_type: str,
    strategy: TamperStrategy,
    seed: int,
) -> TamperedTestSet:
    """Replace every mentioned entity of *entity_type* in every document
    that mentions one.

    Each distinct entity gets one consistent replacement per document.
    Documents with no mention of the type are excluded; documents where
    a substitution is impossible (single entity of its type corpus-wide)
    are dropped and recorded in ``skipped``.
    """
    if strategy.entity_type != entity_type:
        raise ValueError(
            f"strategy {strategy.spec()!r} targets {strategy.entity_type}, "
            f"requested type is {entity_type!r}"
        )
    _check_seed(seed)
    rng = np.random.Generator(np.random.PCG64(seed))
    substitutions: dict[str, dict[str, str]] = {}
    fallback_log: list[FallbackRecord] = []
    skipped: list[SkipRecord] = []
    for doc_id in corpus.sorted_doc_ids():
        doc = corpus.documents[doc_id]
        mentioned = sorted(set(doc.mentions(entity_type)))
        if not mentioned:
            continue
        mapping: dict[str, str] = {}
        failed = None
        for entity_id in mentioned:
            try:
                replacement, used_fallback = select_replacement(
                    corpus.entity(entity_id), corpus, strategy, rng
                )
            except NoCandidates:
                failed = SkipRecord(doc_id, entity_id, "no_candidates")
                break
            mapping[entity_id] = replacement
            if used_fallback:
                fallback_log.append(FallbackRecord(doc_id, entity_id, replacement))
        if failed is not None:
            skipped.append(failed)
            fallback_log = [r for r in fallback_log if r.doc_id != doc_id]
            continue
        substitutions[doc_id] = mapping
    return TamperedTestSet(
        corpus_id=corpus.corpus_id,
        entity_type=entity_type,
        strategy=strategy,
        seed=seed,
        substitutions=substitutions,
        fallback_log=tuple(fallback_log),
        skipped=tuple(skipped),
    )


def tamper_context(
    corpus: CorpusManifest, strategy: TamperStrategy, seed: int
) -> TamperedTestSet:
    """Swap each document's image for another document's image, either
    uniformly or from the most visually similar fraction."""
    if strategy.entity_type != "context":
        raise ValueError(f"strategy {strategy.spec()!r} is not a context strategy")
    _check_seed(seed)
    doc_ids = corpus.sorted_doc_ids()
    if len(doc_ids) < 2:
        raise NoCandidates("context tampering needs at least two documents")
    if strategy.kind == "context_similar_image":
        for doc_id in doc_ids:
            if corpus.documents[doc_id].image_similarity_embedding is None:
                raise MissingSimilarityEmbedding(
                    f"document {doc_id!r} has no image similarity embedding"
                )
    rng = np.random.Generator(np.random.PCG64(seed))
    substitutions: dict[str, str] = {}
    for doc_id in doc_ids:
        others = [d for d in doc_ids if d != doc_id]
        if strategy.kind == "context_random_image":
            donor = others[int(rng.integers(len(others)))]
        else:
            anchor = corpus.documents[doc_id].image_similarity_embedding
            ranked = sorted(
                others,
                key=lambda d: (
                    -cosine(anchor, corpus.documents[d].image_similarity_embedding),
                    d,
                ),
            )
            # round before ceil so 0.1 * 60 = 6.000000000000001 stays 6
            top = math.ceil(round(strategy.top_fraction * len(others), 9))
            donor = ranked[int(rng.integers(max(top, 1)))]
        substitutions[doc_id] = donor
    return TamperedTestSet(
        corpus_id=corpus.corpus_id,
        entity_type="context",
        strategy=strategy,
        seed=seed,
        substitutions=substitutions,
    )


def generate_testset(
    corpus: CorpusManifest, entity_type: str, strategy: TamperStrategy, seed: int
) -> TamperedTestSet:
    if entity_type == "context":
        return tamper_context(corpus, strategy, seed)
    return tamper_entities(corpus, entity_type, strategy, seed)


def tampered_document(
    corpus: CorpusManifest, testset: TamperedTestSet, doc_id: str
) -> DocumentRecord:
    """Build the tampered variant of one document covered by the test set."""
    entry = testset.substitutions[doc_id]
    doc = corpus.documents[doc_id]
    if testset.entity_type == "context":
        assert isinstance(entry, str)
        return doc.with_image_from(corpus.documents[entry])
    assert isinstance(entry, Mapping)

    def swap(mentions: tuple[str, ...]) -> tuple[str, ...]:
        return tuple(entry.get(m, m) for m in mentions)

    if testset.entity_type == "person":
        return replace(doc, person_mentions=swap(doc.person_mentions))
    if testset.entity_type == "location":
        return replace(doc, location_mentions=swap(doc.location_mentions))
    return replace(doc, event_mentions=swap(doc.event_mentions))


def save_testset(testset: TamperedTestSet, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(testset.to_json())
    return path


def load_testset(path: str | Path) -> TamperedTestSet:
    path = Path(path)
    try:
        payload = json.loads(path.read_text())
    except OSError as exc:
        raise MalformedManifest(f"cannot read testset {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise MalformedManifest(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(payload, dict) or payload.get("format") != TESTSET_FORMAT:
        raise MalformedManifest(f"{path}: not a {TESTSET_FORMAT} file")
    if payload.get("version") != TESTSET_VERSION:
        raise MalformedManifest(f"{path}: unsupported version {payload.get('version')!r}")
    try:
        strategy = TamperStrategy.from_payload(payload["strategy"])
        subs_raw = payload["substitutions"]
        substitutions: dict[str, dict[str, str] | str] = {}
        for doc_id, value in subs_raw.items():
            substitutions[doc_id] = dict(value) if isinstance(value, dict) else str(value)
        fallback = tuple(
            FallbackRecord(r["doc_id"], r["original"], r["replacement"])
            for r in payload.get("fallback_log", [])
        )
        skipped = tuple(
            SkipRecord(r["doc_id"], r["entity_id"], r["error"])
            for r in payload.get("skipped", [])
        )
        return TamperedTestSet(
            corpus_id=str(payload["corpus_id"]),
            entity_type=str(payload["entity_type"]),
            strategy=strategy,
            seed=int(payload["seed"]),
            substitutions=substitutions,
            fallback_log=fallback,
            skipped=skipped,
            rng_algorithm=str(payload.get("rng_algorithm", RNG_ALGORITHM)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedManifest(f"{path}: malformed testset: {exc}") from exc
