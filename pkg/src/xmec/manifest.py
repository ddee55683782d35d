"""Corpus persistence: packed vector blobs plus a JSON manifest.

Blob layout, all little-endian:

    bytes 0..3    magic ``XMEC``
    bytes 4..7    format version, u32 (currently 1)
    bytes 8..11   vector dimension, u32
    bytes 12..19  vector count, u64
    bytes 20..    count * dim IEEE-754 binary32 values, row-major

The manifest is canonical JSON (sorted keys, two-space indent, trailing
newline) so that identical corpora serialize byte-identically. Vectors
are stored as ``{"blob": <filename>, "index": <row>}`` references; the
loader additionally accepts inline float lists for hand-written
fixtures.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path
from typing import Any, Callable, Mapping

import numpy as np

from .exceptions import BlobError, MalformedManifest
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

BLOB_MAGIC = b"XMEC"
BLOB_VERSION = 1
_HEADER = struct.Struct("<4sIIQ")

MANIFEST_FORMAT = "xmec-corpus"
MANIFEST_VERSION = 1
MANIFEST_NAME = "manifest.json"


def canonical_json(payload: Any) -> str:
    """Single serialization canon used for every JSON artifact."""
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def write_blob(path: str | Path, vectors: np.ndarray) -> None:
    arr = np.asarray(vectors, dtype=np.float32)
    if arr.ndim != 2:
        raise BlobError("blob payload must be a 2-D (count, dim) array")
    count, dim = arr.shape
    if dim == 0:
        raise BlobError("blob dimension must be positive")
    header = _HEADER.pack(BLOB_MAGIC, BLOB_VERSION, dim, count)
    body = np.ascontiguousarray(arr).astype("<f4", copy=False).tobytes()
    Path(path).write_bytes(header + body)


def read_blob(path: str | Path) -> np.ndarray:
    """Read a blob into an immutable float32 array of shape (count, dim)."""
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise BlobError(f"cannot read blob {path}: {exc}") from exc
    if len(raw) < _HEADER.size:
        raise BlobError(f"{path}: truncated header")
    magic, version, dim, count = _HEADER.unpack_from(raw)
    if magic != BLOB_MAGIC:
        raise BlobError(f"{path}: bad magic {magic!r}")
    if version != BLOB_VERSION:
        raise BlobError(f"{path}: unsupported version {version}")
    if dim == 0:
        raise BlobError(f"{path}: zero dimension")
    expected = _HEADER.size + 4 * dim * count
    if len(raw) != expected:
        raise BlobError(
            f"{path}: payload holds {len(raw) - _HEADER.size} bytes, "
            f"header promises {expected - _HEADER.size}"
        )
    arr = np.frombuffer(raw, dtype="<f4", offset=_HEADER.size)
    arr = arr.astype(np.float32).reshape(count, dim)
    arr.setflags(write=False)
    return arr


class _BlobWriter:
    """Accumulates vectors per blob file and hands out references."""

    def __init__(self) -> None:
        self.pools: dict[str, list[np.ndarray]] = {}

    def ref(self, name: str, vector: np.ndarray) -> dict[str, Any]:
        rows = self.pools.setdefault(name, [])
        rows.append(np.asarray(vector, dtype=np.float32))
        return {"blob": f"{name}.blob", "index": len(rows) - 1}

    def flush(self, directory: Path) -> None:
        for name, rows in self.pools.items():
            write_blob(directory / f"{name}.blob", np.vstack(rows))


def _entity_payload(entity: EntityRecord, writer: _BlobWriter) -> dict[str, Any]:
    role = {"person": "face", "location": "geo", "event": "scene"}[entity.entity_type]
    payload: dict[str, Any] = {
        "entity_id": entity.entity_id,
        "entity_type": entity.entity_type,
        "label": entity.label,
        "references": [
            {"source": item.source, "vector": writer.ref(role, item.vector)}
            for item in entity.references.items
        ],
    }
    if entity.person is not None:
        payload["person"] = {
            "gender": entity.person.gender,
            "citizenship": sorted(entity.person.citizenship),
        }
    if entity.location is not None:
        payload["location"] = {
            "latitude": entity.location.latitude,
            "longitude": entity.location.longitude,
            "parent_classes": sorted(entity.location.parent_classes),
        }
    if entity.event is not None:
        payload["event"] = {
            "parent_classes": sorted(entity.event.parent_classes),
        }
    return payload


def _document_payload(doc: DocumentRecord, writer: _BlobWriter) -> dict[str, Any]:
    def maybe(name: str, vector: np.ndarray | None) -> dict[str, Any] | None:
        return None if vector is None else writer.ref(name, vector)

    return {
        "doc_id": doc.doc_id,
        "person_mentions": list(doc.person_mentions),
        "location_mentions": list(doc.location_mentions),
        "event_mentions": list(doc.event_mentions),
        "noun_context": [
            {"noun": item.noun, "vector": writer.ref("word", item.vector)}
            for item in doc.noun_context
        ],
        "face_embeddings": [writer.ref("face", v) for v in doc.face_embeddings],
        "geo_embedding": maybe("geo", doc.geo_embedding),
        "scene_embedding": maybe("scene", doc.scene_embedding),
        "scene_probabilities": maybe("prob", doc.scene_probabilities),
        "image_similarity_embedding": maybe("image", doc.image_similarity_embedding),
        "scene_kind": doc.scene_kind,
    }


def save_manifest(corpus: CorpusManifest, directory: str | Path) -> Path:
    """Write ``manifest.json`` and the referenced blobs into *directory*.

    Output is deterministic: entities and documents are emitted sorted by
    id, so saving the same corpus twice produces identical bytes.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    writer = _BlobWriter()

    payload = {
        "format": MANIFEST_FORMAT,
        "version": MANIFEST_VERSION,
        "corpus_id": corpus.corpus_id,
        "embedding_dims": dict(corpus.embedding_dims),
        "per_source_cap": corpus.per_source_cap,
        "scene_vocabulary": [
            {
                "class_id": cls.class_id,
                "label": cls.label,
                "vector": writer.ref("word", cls.vector),
            }
            for cls in corpus.scene_vocabulary.classes
        ],
        "entities": [
            _entity_payload(corpus.entities[eid], writer)
            for eid in sorted(corpus.entities)
        ],
        "documents": [
            _document_payload(corpus.documents[did], writer)
            for did in corpus.sorted_doc_ids()
        ],
    }
    writer.flush(directory)
    target = directory / MANIFEST_NAME
    target.write_text(canonical_json(payload))
    return target


def _require(
    payload: Mapping[str, Any], key: str, kind: type | tuple[type, ...], where: str
) -> Any:
    if key not in payload:
        raise MalformedManifest(f"{where}: missing key {key!r}")
    value = payload[key]
    if not isinstance(value, kind):
        names = kind.__name__ if isinstance(kind, type) else "/".join(
            k.__name__ for k in kind
        )
        raise MalformedManifest(
            f"{where}: key {key!r} should be {names}, got {type(value).__name__}"
        )
    return value


def _make_resolver(directory: Path) -> Callable[[Any, str], np.ndarray]:
    cache: dict[str, np.ndarray] = {}

    def resolve(ref: Any, where: str) -> np.ndarray:
        if isinstance(ref, list):
            return np.asarray(ref, dtype=np.float32)
        if not isinstance(ref, dict):
            raise MalformedManifest(f"{where}: vector must be a reference or list")
        name = _require(ref, "blob", str, where)
        index = _require(ref, "index", int, where)
        if name not in cache:
            cache[name] = read_blob(directory / name)
        table = cache[name]
        if not 0 <= index < len(table):
            raise BlobError(
                f"{where}: index {index} out of range for {name} "
                f"({len(table)} vectors)"
            )
        return table[index]

    return resolve


def _entity_from_payload(
    payload: Mapping[str, Any], resolve: Callable[[Any, str], np.ndarray]
) -> EntityRecord:
    where = f"entity {payload.get('entity_id')!r}"
    entity_id = _require(payload, "entity_id", str, where)
    entity_type = _require(payload, "entity_type", str, where)
    label = _require(payload, "label", str, where)
    refs = []
    for i, item in enumerate(_require(payload, "references", list, where)):
        if not isinstance(item, dict):
            raise MalformedManifest(f"{where}: reference[{i}] must be an object")
        refs.append(
            ReferenceImage(
                source=_require(item, "source", str, f"{where} reference[{i}]"),
                vector=resolve(item.get("vector"), f"{where} reference[{i}]"),
            )
        )
    person = location = event = None
    if "person" in payload:
        block = _require(payload, "person", dict, where)
        person = PersonAttrs(
            gender=_require(block, "gender", str, where),
            citizenship=frozenset(block.get("citizenship", [])),
        )
    if "location" in payload:
        block = _require(payload, "location", dict, where)
        location = LocationAttrs(
            latitude=float(_require(block, "latitude", (int, float), where)),
            longitude=float(_require(block, "longitude", (int, float), where)),
            parent_classes=frozenset(block.get("parent_classes", [])),
        )
    if "event" in payload:
        block = _require(payload, "event", dict, where)
        event = EventAttrs(parent_classes=frozenset(block.get("parent_classes", [])))
    return EntityRecord(
        entity_id=entity_id,
        entity_type=entity_type,
        label=label,
        references=ReferenceImageSet(tuple(refs)),
        person=person,
        location=location,
        event=event,
    )


def _document_from_payload(
    payload: Mapping[str, Any], resolve: Callable[[Any, str], np.ndarray]
) -> DocumentRecord:
    where = f"document {payload.get('doc_id')!r}"
    doc_id = _require(payload, "doc_id", str, where)

    def mention_list(key: str) -> tuple[str, ...]:
        raw = payload.get(key, [])
        if not isinstance(raw, list) or not all(isinstance(m, str) for m in raw):
            raise MalformedManifest(f"{where}: {key} must be a list of entity ids")
        return tuple(raw)

    def maybe(key: str) -> np.ndarray | None:
        raw = payload.get(key)
        return None if raw is None else resolve(raw, f"{where} {key}")

    nouns = []
    for i, item in enumerate(payload.get("noun_context", [])):
        if not isinstance(item, dict):
            raise MalformedManifest(f"{where}: noun_context[{i}] must be an object")
        nouns.append(
            ContextNoun(
                noun=_require(item, "noun", str, f"{where} noun_context[{i}]"),
                vector=resolve(item.get("vector"), f"{where} noun_context[{i}]"),
            )
        )
    faces = tuple(
        resolve(item, f"{where} face_embeddings[{i}]")
        for i, item in enumerate(payload.get("face_embeddings", []))
    )
    scene_kind = payload.get("scene_kind")
    if scene_kind is not None and not isinstance(scene_kind, str):
        raise MalformedManifest(f"{where}: scene_kind must be a string or null")
    return DocumentRecord(
        doc_id=doc_id,
        person_mentions=mention_list("person_mentions"),
        location_mentions=mention_list("location_mentions"),
        event_mentions=mention_list("event_mentions"),
        noun_context=tuple(nouns),
        face_embeddings=faces,
        geo_embedding=maybe("geo_embedding"),
        scene_embedding=maybe("scene_embedding"),
        scene_probabilities=maybe("scene_probabilities"),
        image_similarity_embedding=maybe("image_similarity_embedding"),
        scene_kind=scene_kind,
    )


def load_manifest(path: str | Path) -> CorpusManifest:
    """Load and fully validate a corpus from ``manifest.json``.

    *path* may be the manifest file or its directory. Structural problems
    raise :class:`MalformedManifest`, blob problems :class:`BlobError`,
    semantic ones :class:`IntegrityError`.
    """
    path = Path(path)
    if path.is_dir():
        path = path / MANIFEST_NAME
    try:
        payload = json.loads(path.read_text())
    except OSError as exc:
        raise MalformedManifest(f"cannot read manifest {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise MalformedManifest(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise MalformedManifest(f"{path}: top level must be an object")
    if payload.get("format") != MANIFEST_FORMAT:
        raise MalformedManifest(f"{path}: not a {MANIFEST_FORMAT} manifest")
    if payload.get("version") != MANIFEST_VERSION:
        raise MalformedManifest(
            f"{path}: unsupported manifest version {payload.get('version')!r}"
        )
    corpus_id = _require(payload, "corpus_id", str, str(path))
    dims_raw = payload.get("embedding_dims", {})
    if not isinstance(dims_raw, dict):
        raise MalformedManifest(f"{path}: embedding_dims must be an object")
    per_source_cap = payload.get("per_source_cap", 10)
    if not isinstance(per_source_cap, int) or per_source_cap < 1:
        raise MalformedManifest(f"{path}: per_source_cap must be a positive integer")

    resolve = _make_resolver(path.parent)
    vocab_classes = []
    for i, item in enumerate(payload.get("scene_vocabulary", [])):
        if not isinstance(item, dict):
            raise MalformedManifest(f"{path}: scene_vocabulary[{i}] must be an object")
        where = f"scene_vocabulary[{i}]"
        vocab_classes.append(
            SceneClass(
                class_id=_require(item, "class_id", str, where),
                label=_require(item, "label", str, where),
                vector=resolve(item.get("vector"), where),
            )
        )
    entities = [
        _entity_from_payload(item, resolve)
        for item in _require(payload, "entities", list, str(path))
        if isinstance(item, dict)
        or _raise_malformed(f"{path}: entities must hold objects")
    ]
    documents = [
        _document_from_payload(item, resolve)
        for item in _require(payload, "documents", list, str(path))
        if isinstance(item, dict)
        or _raise_malformed(f"{path}: documents must hold objects")
    ]
    return make_corpus(
        corpus_id,
        entities,
        documents,
        SceneVocabulary(tuple(vocab_classes)),
        embedding_dims={k: v for k, v in dims_raw.items()},
        per_source_cap=per_source_cap,
    )


def _raise_malformed(message: str) -> bool:
    raise MalformedManifest(message)
