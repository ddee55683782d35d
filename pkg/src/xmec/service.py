"""Read-only HTTP facade over one loaded corpus.

Endpoints (all JSON, canonical serialization for determinism):

    GET  /corpus/stats               per-type document/entity counts
    GET  /config                     engine config incl. color intervals
    GET  /documents/{id}/scores      four measures, optional config override
    GET  /documents/{id}/detail      breakdowns + metadata + color intervals
    GET  /rank                       paginated ranking, clean or clean+tampered
    GET  /testsets                   names of generated test sets
    POST /testsets                   generate a tampered test set
    POST /score                      what-if rescoring (config + exclusions)
    POST /evaluate                   full retrieval evaluation report

The corpus is immutable; every response is a pure function of (corpus,
request), so concurrent access needs no coordination beyond the score
cache lock.
"""

from __future__ import annotations

import threading
from typing import Any, Mapping

from fastapi import FastAPI, HTTPException, Query, Response
from pydantic import BaseModel, Field

from .config import EngineConfig
from .evaluation import EvaluationReport, collection_retrieval
from .manifest import canonical_json
from .measures import (
    MEASURE_FOR_TYPE,
    ScoredDocument,
    ScoringConfig,
    score_document,
)
from .metrics import RankedCollection, RankEntry
from .model import CorpusManifest, corpus_stats
from .tamper import (
    TamperedTestSet,
    TamperStrategy,
    generate_testset,
    tampered_document,
)
from .exceptions import EngineError, NoCandidates

SUBSET_LABELS = {"all": None, "top25": 0.25, "top50": 0.5}


class ApiSession:
    """Mutable service state: the corpus handle, generated test sets,
    and a score cache keyed by (doc_id, config fingerprint)."""

    def __init__(
        self,
        corpus: CorpusManifest | None = None,
        config: EngineConfig | None = None,
    ):
        self.corpus = corpus
        self.config = config or EngineConfig()
        self._scores: dict[tuple[str, str], ScoredDocument] = {}
        self._testsets: dict[str, TamperedTestSet] = {}
        self._rankings: dict[tuple[str, str, str, str], RankedCollection] = {}
        self._lock = threading.Lock()

    def require_corpus(self) -> CorpusManifest:
        if self.corpus is None:
            raise HTTPException(status_code=409, detail="corpus not loaded")
        return self.corpus

    def scored(
        self,
        doc_id: str,
        config: ScoringConfig,
        exclude: tuple[str, ...] = (),
    ) -> ScoredDocument:
        corpus = self.require_corpus()
        if doc_id not in corpus.documents:
            raise HTTPException(status_code=404, detail=f"unknown document {doc_id!r}")
        key = (doc_id, config.fingerprint(exclude))
        with self._lock:
            cached = self._scores.get(key)
        if cached is not None:
            return cached
        result = score_document(
            corpus.documents[doc_id], corpus, config, exclude=exclude
        )
        with self._lock:
            self._scores[key] = result
        return result

    def testset(self, name: str) -> TamperedTestSet:
        ts = self._testsets.get(name)
        if ts is None:
            raise HTTPException(status_code=404, detail=f"unknown testset {name!r}")
        return ts

    def add_testset(self, name: str, testset: TamperedTestSet) -> None:
        with self._lock:
            self._testsets[name] = testset
            self._rankings = {
                k: v for k, v in self._rankings.items() if k[0] != name
            }

    def testset_names(self) -> list[str]:
        with self._lock:
            return sorted(self._testsets)

    def ranking(
        self, testset_name: str, entity_type: str, config: ScoringConfig, order: str
    ) -> RankedCollection:
        key = (testset_name, entity_type, config.fingerprint(), order)
        with self._lock:
            cached = self._rankings.get(key)
        if cached is not None:
            return cached
        corpus = self.require_corpus()
        testset = self.testset(testset_name)
        measure = MEASURE_FOR_TYPE[entity_type]
        entries = []
        for doc_id in testset.doc_ids():
            clean = self.scored(doc_id, config).measure(measure).value
            tampered = (
                score_document(
                    tampered_document(corpus, testset, doc_id), corpus, config
                )
                .measure(measure)
                .value
            )
            if clean is None or tampered is None:
                continue
            entries.append(RankEntry(doc_id, "clean", clean))
            entries.append(RankEntry(doc_id, "tampered", tampered))
        ranking = RankedCollection.build(entries, order)
        with self._lock:
            self._rankings[key] = ranking
        return ranking


def _json_response(payload: Any, status_code: int = 200) -> Response:
    return Response(
        content=canonical_json(payload),
        status_code=status_code,
        media_type="application/json",
    )


def _config_override(
    session: ApiSession, overrides: Mapping[str, Any] | None
) -> ScoringConfig:
    base = session.config.scoring
    if not overrides:
        return base
    merged = dict(base.to_mapping())
    merged.update(overrides)
    try:
        return ScoringConfig.from_mapping(merged)
    except (TypeError, ValueError) as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


def _query_config(
    session: ApiSession,
    tau_p: float | None,
    person_mode: str | None,
    person_aggregator: str | None,
    location_aggregator: str | None,
    event_aggregator: str | None,
) -> ScoringConfig:
    overrides = {
        key: value
        for key, value in {
            "tau_p": tau_p,
            "person_mode": person_mode,
            "person_aggregator": person_aggregator,
            "location_aggregator": location_aggregator,
            "event_aggregator": event_aggregator,
        }.items()
        if value is not None
    }
    return _config_override(session, overrides)


class ScoreRequest(BaseModel):
    doc_id: str
    config: dict[str, Any] | None = None
    exclude: list[str] = Field(default_factory=list)


class TestsetRequest(BaseModel):
    entity_type: str
    strategy: str
    seed: int = Field(ge=0, lt=2**64)
    name: str | None = None


class EvaluateRequest(BaseModel):
    entity_type: str
    strategy: str
    seed: int = Field(ge=0, lt=2**64)
    subset: str = "all"
    config: dict[str, Any] | None = None


def create_app(
    corpus: CorpusManifest | None = None, config: EngineConfig | None = None
) -> FastAPI:
    app = FastAPI(title="xmec", docs_url=None, redoc_url=None)
    session = ApiSession(corpus=corpus, config=config)
    app.state.session = session

    @app.get("/corpus/stats")
    def get_stats() -> Response:
        corpus = session.require_corpus()
        stats = corpus_stats(corpus)
        return _json_response(
            {
                "corpus_id": corpus.corpus_id,
                "n_documents": len(corpus.documents),
                "n_entities": len(corpus.entities),
                "stats": {
                    name: {
                        "documents": s.documents,
                        "unique_entities": s.unique_entities,
                        "mean_unique": s.mean_unique,
                    }
                    for name, s in stats.items()
                },
            }
        )

    @app.get("/config")
    def get_config() -> Response:
        return _json_response(session.config.to_payload())

    @app.get("/documents/{doc_id}/scores")
    def get_scores(
        doc_id: str,
        tau_p: float | None = Query(default=None),
        person_mode: str | None = Query(default=None),
        person_aggregator: str | None = Query(default=None),
        location_aggregator: str | None = Query(default=None),
        event_aggregator: str | None = Query(default=None),
    ) -> Response:
        cfg = _query_config(
            session,
            tau_p,
            person_mode,
            person_aggregator,
            location_aggregator,
            event_aggregator,
        )
        scored = session.scored(doc_id, cfg)
        payload = scored.to_payload()
        payload["config_fingerprint"] = cfg.fingerprint()
        return _json_response(payload)

    @app.get("/documents/{doc_id}/detail")
    def get_detail(doc_id: str) -> Response:
        corpus = session.require_corpus()
        if doc_id not in corpus.documents:
            raise HTTPException(status_code=404, detail=f"unknown document {doc_id!r}")
        doc = corpus.documents[doc_id]
        scored = session.scored(doc_id, session.config.scoring)
        payload = scored.to_payload()
        payload["color_intervals"] = {
            measure: list(interval)
            for measure, interval in sorted(session.config.color_intervals.items())
        }
        payload["metadata"] = {
            "person_mentions": sorted(set(doc.person_mentions)),
            "location_mentions": sorted(set(doc.location_mentions)),
            "event_mentions": sorted(set(doc.event_mentions)),
            "n_faces": len(doc.face_embeddings),
            "n_nouns": len(doc.noun_context),
            "scene_kind": doc.scene_kind,
            "entity_labels": {
                entity_id: corpus.entity(entity_id).label
                for entity_id in sorted(
                    set(doc.person_mentions)
                    | set(doc.location_mentions)
                    | set(doc.event_mentions)
                )
            },
        }
        return _json_response(payload)

    @app.get("/rank")
    def get_rank(
        type: str = Query(...),
        testset: str | None = Query(default=None),
        order: str = Query(default="asc"),
        page: int = Query(default=1, ge=1),
        page_size: int = Query(default=50, ge=1, le=500),
    ) -> Response:
        if type not in MEASURE_FOR_TYPE:
            raise HTTPException(status_code=422, detail=f"unknown type {type!r}")
        if order not in ("asc", "desc"):
            raise HTTPException(status_code=422, detail="order must be asc or desc")
        corpus = session.require_corpus()
        direction = "ascending" if order == "asc" else "descending"
        measure = MEASURE_FOR_TYPE[type]
        if testset is not None:
            ranking = session.ranking(
                testset, type, session.config.scoring, direction
            )
            entries = ranking.entries
        else:
            collected = []
            for doc_id in corpus.sorted_doc_ids():
                value = (
                    session.scored(doc_id, session.config.scoring)
                    .measure(measure)
                    .value
                )
                if value is not None:
                    collected.append(RankEntry(doc_id, "clean", value))
            entries = RankedCollection.build(collected, direction).entries
        start = (page - 1) * page_size
        window = entries[start : start + page_size]
        return _json_response(
            {
                "type": type,
                "measure": measure,
                "order": order,
                "page": page,
                "page_size": page_size,
                "total": len(entries),
                "entries": [
                    {
                        "rank": start + i + 1,
                        "doc_id": e.doc_id,
                        "variant": e.variant,
                        "score": e.score,
                    }
                    for i, e in enumerate(window)
                ],
            }
        )

    @app.get("/testsets")
    def list_testsets() -> Response:
        return _json_response({"testsets": session.testset_names()})

    @app.post("/testsets")
    def post_testset(request: TestsetRequest) -> Response:
        corpus = session.require_corpus()
        try:
            strategy = TamperStrategy.parse(request.entity_type, request.strategy)
            testset = generate_testset(
                corpus, request.entity_type, strategy, request.seed
            )
        except (ValueError, NoCandidates, EngineError) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        name = request.name or (
            f"{request.entity_type}-{strategy.spec()}-{request.seed}"
        )
        session.add_testset(name, testset)
        return _json_response(
            {
                "name": name,
                "entity_type": testset.entity_type,
                "strategy": testset.strategy.spec(),
                "seed": testset.seed,
                "n_documents": len(testset.substitutions),
                "n_fallbacks": len(testset.fallback_log),
            },
            status_code=201,
        )

    @app.post("/score")
    def post_score(request: ScoreRequest) -> Response:
        cfg = _config_override(session, request.config)
        exclude = tuple(sorted(set(request.exclude)))
        scored = session.scored(request.doc_id, cfg, exclude)
        payload = scored.to_payload()
        payload["config_fingerprint"] = cfg.fingerprint(exclude)
        payload["excluded"] = list(exclude)
        return _json_response(payload)

    @app.post("/evaluate")
    def post_evaluate(request: EvaluateRequest) -> Response:
        corpus = session.require_corpus()
        if request.subset not in SUBSET_LABELS:
            raise HTTPException(
                status_code=422,
                detail=f"subset must be one of {sorted(SUBSET_LABELS)}",
            )
        cfg = _config_override(session, request.config)
        try:
            strategy = TamperStrategy.parse(request.entity_type, request.strategy)
            testset = generate_testset(
                corpus, request.entity_type, strategy, request.seed
            )
            report: EvaluationReport = collection_retrieval(
                corpus,
                testset,
                cfg,
                subset=SUBSET_LABELS[request.subset],
                recall_levels=session.config.recall_levels,
            )
        except (ValueError, NoCandidates, EngineError) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return Response(content=report.to_json(), media_type="application/json")

    return app
