"""Cross-modal entity consistency: measures, tampering, evaluation.

The package scores news documents for agreement between their image and
the entities named in their text, generates constrained tampered
counterparts, and evaluates how well the measures separate clean from
tampered documents.
"""

from .config import DEFAULT_COLOR_INTERVALS, EngineConfig
from .clustering import DEFAULT_TAU_P, cluster_references, person_reference_vector
from .datasets import (
    make_attribute_fixture,
    make_overlapping_corpus,
    make_separable_corpus,
)
from .evaluation import (
    EvaluationReport,
    collection_retrieval,
    load_report,
    reports_to_csv,
    save_report,
    topk_subset,
)
from .exceptions import (
    BlobError,
    DimMismatch,
    EmptyInput,
    EmptyReferences,
    EngineError,
    InsufficientRelevant,
    IntegrityError,
    InvalidCoordinate,
    MalformedManifest,
    MissingSimilarityEmbedding,
    NoCandidates,
)
from .geo import EARTH_RADIUS_KM, haversine_km
from .manifest import load_manifest, read_blob, save_manifest, write_blob
from .measures import (
    MEASURES,
    MeasureResult,
    ScoredDocument,
    ScoringConfig,
    cmcs,
    cmes,
    cmls,
    cmps,
    entity_image_similarity,
    score_document,
)
from .metrics import (
    RankedCollection,
    RankEntry,
    ap_at_recall,
    roc_auc,
    verification_accuracy,
)
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
    corpus_stats,
    filter_by_document_frequency,
    make_corpus,
)
from .scorer import ConsistencyScorer
from .similarity import Aggregator, aggregate, cosine, normalized_cosine
from .tamper import (
    RNG_ALGORITHM,
    TamperedTestSet,
    TamperStrategy,
    candidate_pool,
    generate_testset,
    load_testset,
    save_testset,
    select_replacement,
    tamper_context,
    tamper_entities,
    tampered_document,
)

__version__ = "0.1.0"

__all__ = [
    "Aggregator",
    "BlobError",
    "ConsistencyScorer",
    "ContextNoun",
    "CorpusManifest",
    "DEFAULT_COLOR_INTERVALS",
    "DEFAULT_TAU_P",
    "DimMismatch",
    "DocumentRecord",
    "EARTH_RADIUS_KM",
    "EmptyInput",
    "EmptyReferences",
    "EngineConfig",
    "EngineError",
    "EntityRecord",
    "EvaluationReport",
    "EventAttrs",
    "InsufficientRelevant",
    "IntegrityError",
    "InvalidCoordinate",
    "LocationAttrs",
    "MEASURES",
    "MalformedManifest",
    "MeasureResult",
    "MissingSimilarityEmbedding",
    "NoCandidates",
    "PersonAttrs",
    "RNG_ALGORITHM",
    "RankEntry",
    "RankedCollection",
    "ReferenceImage",
    "ReferenceImageSet",
    "SceneClass",
    "SceneVocabulary",
    "ScoredDocument",
    "ScoringConfig",
    "TamperStrategy",
    "TamperedTestSet",
    "aggregate",
    "ap_at_recall",
    "candidate_pool",
    "cluster_references",
    "cmcs",
    "cmes",
    "cmls",
    "cmps",
    "collection_retrieval",
    "corpus_stats",
    "cosine",
    "entity_image_similarity",
    "filter_by_document_frequency",
    "generate_testset",
    "haversine_km",
    "load_manifest",
    "load_report",
    "load_testset",
    "make_attribute_fixture",
    "make_corpus",
    "make_overlapping_corpus",
    "make_separable_corpus",
    "normalized_cosine",
    "person_reference_vector",
    "read_blob",
    "reports_to_csv",
    "roc_auc",
    "save_manifest",
    "save_report",
    "save_testset",
    "score_document",
    "select_replacement",
    "tamper_context",
    "tamper_entities",
    "tampered_document",
    "topk_subset",
    "verification_accuracy",
    "write_blob",
]
