"""HTTP API for the human annotation loop.

Endpoints (all JSON responses carry schema_version):

    GET  /api/next?annotator=ID   next task for this annotator, with an
                                  optional model suggestion
    POST /api/labels              {tweet_id, label, annotator} -> accepted/duplicate
    GET  /api/agreement           doubly-annotated count + Cohen's kappa
    GET  /api/stats               split x label counts for the live corpus
    POST /api/classify            {text} -> label + per-class scores
    GET  /api/export              full labeled corpus as JSON Lines

Static UI files are served at / when a directory is supplied."""

from __future__ import annotations

import io
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query
from fastapi.responses import PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import models as model_lib
from .analytics import cohen_kappa
from .annotations import AnnotationStore
from .corpus import LABELS, Label, Tweet, dump_corpus, load_corpus
from .errors import CorpusError
from .features import FeatureSpace, vectorize
from .harvest import tokenize

SCHEMA_VERSION = 1

MIN_DOUBLE_ANNOTATIONS = 2


class LabelSubmissionIn(BaseModel):
    tweet_id: str
    label: str
    annotator: str


class ClassifyIn(BaseModel):
    text: str


def classify_text(text: str, model: model_lib.Model, space: FeatureSpace) -> tuple[Label, dict[Label, float]]:
    """Tokenize, vectorize against the model's space, and predict."""
    vec = vectorize((tokenize(text), text), space)
    return model_lib.predict(model, vec)


def _score_payload(scores: dict[Label, float]) -> dict[str, float | None]:
    # All four labels always appear; labels the model never saw are null.
    return {label.value: scores.get(label) for label in LABELS}


def _tweet_payload(tweet: Tweet) -> dict:
    return {
        "id": tweet.id,
        "text": tweet.text,
        "matched_terms": list(tweet.matched_terms),
        "source": tweet.source,
    }


def build_app(
    store: AnnotationStore,
    model: model_lib.Model | None = None,
    space: FeatureSpace | None = None,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="nordial annotation service")

    def suggestion_for(tweet: Tweet) -> dict | None:
        if model is None or space is None:
            return None
        label, scores = classify_text(tweet.text, model, space)
        return {"label": label.value, "scores": _score_payload(scores)}

    @app.get("/api/next")
    def next_task(annotator: str = Query(min_length=1)):
        tweet = store.next_for(annotator)
        if tweet is None:
            return {"schema_version": SCHEMA_VERSION, "status": "empty", "task": None}
        return {
            "schema_version": SCHEMA_VERSION,
            "status": "ok",
            "task": {"tweet": _tweet_payload(tweet), "suggestion": suggestion_for(tweet)},
        }

    @app.post("/api/labels")
    def submit_label(submission: LabelSubmissionIn):
        try:
            label = Label.parse(submission.label)
        except CorpusError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        if not submission.annotator.strip():
            raise HTTPException(status_code=400, detail="annotator id must be nonempty")
        try:
            status = store.submit(submission.tweet_id, label, submission.annotator)
        except CorpusError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from None
        return {"schema_version": SCHEMA_VERSION, "status": status}

    @app.get("/api/agreement")
    def agreement():
        records = store.agreement_records()
        if len(records) < MIN_DOUBLE_ANNOTATIONS:
            return {
                "schema_version": SCHEMA_VERSION,
                "status": "insufficient",
                "n_doubly_annotated": len(records),
                "kappa": None,
            }
        return {
            "schema_version": SCHEMA_VERSION,
            "status": "ok",
            "n_doubly_annotated": len(records),
            "kappa": cohen_kappa(records),
        }

    @app.get("/api/stats")
    def stats():
        return {
            "schema_version": SCHEMA_VERSION,
            "n_labeled": store.n_labeled(),
            **store.stats().to_dict(),
        }

    @app.post("/api/classify")
    def classify(request: ClassifyIn):
        if model is None or space is None:
            raise HTTPException(status_code=503, detail="suggestions disabled: no model loaded")
        if not request.text.strip():
            raise HTTPException(status_code=400, detail="text must be nonempty")
        label, scores = classify_text(request.text, model, space)
        return {
            "schema_version": SCHEMA_VERSION,
            "label": label.value,
            "scores": _score_payload(scores),
        }

    @app.get("/api/export")
    def export():
        buffer = io.StringIO()
        dump_corpus(store.resolved_corpus(), buffer)
        # NDJSON has no envelope, so the schema version rides in a header
        return PlainTextResponse(
            buffer.getvalue(),
            media_type="application/x-ndjson",
            headers={"x-schema-version": str(SCHEMA_VERSION)},
        )

    if ui_dir is not None:
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")
    else:
        @app.get("/")
        def index():
            return {
                "schema_version": SCHEMA_VERSION,
                "service": "nordial annotation service",
                "endpoints": [
                    "/api/next", "/api/labels", "/api/agreement",
                    "/api/stats", "/api/classify", "/api/export",
                ],
            }

    return app


def build_app_from_paths(
    corpus_path: str | Path,
    log_path: str | Path,
    model_path: str | Path | None = None,
    overlap: float = 0.1,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    corpus = load_corpus(corpus_path)
    store = AnnotationStore(corpus, log_path, overlap=overlap)
    model = space = None
    if model_path is not None:
        model, space, _ = model_lib.load_model(model_path)
    return build_app(store, model=model, space=space, ui_dir=ui_dir)
