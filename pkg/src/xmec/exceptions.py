"""Typed errors raised by ingestion, scoring, tampering, and evaluation."""


class EngineError(Exception):
    """Base class for all errors raised by this package."""


class MalformedManifest(EngineError):
    """manifest.json is syntactically broken or structurally invalid."""


class IntegrityError(EngineError, ValueError):
    """Corpus content violates an ingestion invariant (dangling ids,
    dimension mismatches, bad probability vectors, degenerate vectors)."""


class BlobError(EngineError):
    """An embedding blob sidecar is missing, truncated, or has the wrong
    magic/version."""


class DimMismatch(EngineError, ValueError):
    """Vectors of different dimensionality were combined."""


class EmptyInput(EngineError, ValueError):
    """An operation that requires at least one element received none."""


class EmptyReferences(EngineError):
    """An entity has no reference images to compare against."""


class InvalidCoordinate(EngineError, ValueError):
    """Latitude or longitude outside the valid range."""


class NoCandidates(EngineError):
    """No other entity of the required type exists to substitute."""


class MissingSimilarityEmbedding(EngineError):
    """Similar-image tampering requires the image-similarity feature on
    every document."""


class InsufficientRelevant(EngineError):
    """The ranking holds fewer relevant documents than the recall level
    demands."""
