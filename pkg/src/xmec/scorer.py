"""Estimator-style front end over the measure functions.

``ConsistencyScorer`` follows the scikit-learn protocol: constructor
arguments are stored verbatim, ``fit`` binds a corpus, ``transform``
maps documents to :class:`~xmec.measures.ScoredDocument` results, and
``get_params``/``clone`` behave as usual. The measure functions remain
directly importable for callers that do not want the estimator shape.
"""

from __future__ import annotations

from typing import Iterable

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .clustering import DEFAULT_TAU_P
from .measures import PERSON_MODES, ScoredDocument, ScoringConfig, score_document
from .model import CorpusManifest, DocumentRecord
from .similarity import Aggregator, parse_aggregator


class ConsistencyScorer(BaseEstimator, TransformerMixin):
    """Scores documents of a fitted corpus for cross-modal consistency.

    Parameters may be aggregator objects or their string forms ("max",
    "q90", ...), so the estimator remains grid-searchable.
    """

    def __init__(
        self,
        tau_p: float = DEFAULT_TAU_P,
        person_mode: str = "cluster",
        person_aggregator: str | float | Aggregator = "max",
        location_aggregator: str | float | Aggregator = "max",
        event_aggregator: str | float | Aggregator = "max",
    ):
        self.tau_p = tau_p
        self.person_mode = person_mode
        self.person_aggregator = person_aggregator
        self.location_aggregator = location_aggregator
        self.event_aggregator = event_aggregator

    def _build_config(self) -> ScoringConfig:
        if self.person_mode not in PERSON_MODES:
            raise ValueError(f"person_mode must be one of {PERSON_MODES}")
        return ScoringConfig(
            tau_p=self.tau_p,
            person_mode=self.person_mode,
            person_aggregator=parse_aggregator(self.person_aggregator),
            location_aggregator=parse_aggregator(self.location_aggregator),
            event_aggregator=parse_aggregator(self.event_aggregator),
        )

    def fit(self, X: CorpusManifest, y=None) -> "ConsistencyScorer":
        if not isinstance(X, CorpusManifest):
            raise TypeError("fit expects a CorpusManifest")
        self.config_ = self._build_config()
        self.corpus_ = X
        return self

    def transform(self, X: Iterable[str | DocumentRecord]) -> list[ScoredDocument]:
        """Score the given documents, passed as ids or full records."""
        check_is_fitted(self, "corpus_")
        docs = []
        for item in X:
            if isinstance(item, DocumentRecord):
                docs.append(item)
            else:
                docs.append(self.corpus_.document(item))
        return [score_document(doc, self.corpus_, self.config_) for doc in docs]

    def score_all(self) -> list[ScoredDocument]:
        """Score every document of the fitted corpus in sorted id order."""
        check_is_fitted(self, "corpus_")
        return self.transform(self.corpus_.sorted_doc_ids())

    def score_document(
        self, doc: str | DocumentRecord, *, exclude: Iterable[str] = ()
    ) -> ScoredDocument:
        check_is_fitted(self, "corpus_")
        record = doc if isinstance(doc, DocumentRecord) else self.corpus_.document(doc)
        return score_document(record, self.corpus_, self.config_, exclude=exclude)
