"""Multinomial Naive Bayes and linear hinge-loss SVM over sparse tf-idf vectors.

Both models predict by argmax over per-label scores; exact ties break by
canonical label order (Bokmal < Nynorsk < Dialect < Mixed), so prediction
is a total function. The SVM is trained one-vs-rest with a Pegasos-style
subgradient schedule (see kernels.py); MNB accepts fractional tf-idf
weights as counts, the usual practice when one feature pipeline feeds both
models.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import kernels
from .corpus import LABELS, Label, Tweet
from .errors import ModelError
from .evaluation import EvalReport, evaluate
from .features import FeatureConfig, FeatureSpace, FeatureVector, fit_feature_space, vectorize_all
from .harvest import tokenize


def _check_training_inputs(vectors: Sequence[FeatureVector], labels: Sequence[Label]) -> int:
    if len(vectors) != len(labels):
        raise ModelError(f"{len(vectors)} vectors but {len(labels)} labels")
    if not vectors:
        raise ModelError("cannot train on an empty example list")
    size = vectors[0].size
    if any(v.size != size for v in vectors):
        raise ModelError("all vectors must come from the same feature space")
    return size


def _present_labels(labels: Sequence[Label]) -> tuple[Label, ...]:
    present = set(labels)
    return tuple(l for l in LABELS if l in present)


def _stack_csr(vectors: Sequence[FeatureVector]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    indptr = np.zeros(len(vectors) + 1, dtype=np.int64)
    for i, v in enumerate(vectors):
        indptr[i + 1] = indptr[i] + v.nnz
    data = np.concatenate([v.values for v in vectors]) if vectors else np.empty(0)
    indices = np.concatenate([v.indices for v in vectors]) if vectors else np.empty(0, dtype=np.int64)
    return data.astype(np.float64), indices.astype(np.int64), indptr


def _check_query(x: FeatureVector, n_features: int) -> None:
    if x.size != n_features:
        raise ModelError(f"vector indexed against {x.size} features, model has {n_features}")


@dataclass(frozen=True)
class MnbModel:
    """Multinomial Naive Bayes parameters over a fitted feature space."""

    alpha: float
    labels: tuple[Label, ...]
    class_log_prior: np.ndarray
    feature_log_prob: np.ndarray
    space_fingerprint: str | None = None

    @property
    def n_features(self) -> int:
        return self.feature_log_prob.shape[1]

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "labels": [l.value for l in self.labels],
            "class_log_prior": [float(x) for x in self.class_log_prior],
            "feature_log_prob": [[float(x) for x in row] for row in self.feature_log_prob],
            "space_fingerprint": self.space_fingerprint,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MnbModel":
        return cls(
            alpha=d["alpha"],
            labels=tuple(Label(v) for v in d["labels"]),
            class_log_prior=np.asarray(d["class_log_prior"], dtype=np.float64),
            feature_log_prob=np.asarray(d["feature_log_prob"], dtype=np.float64),
            space_fingerprint=d.get("space_fingerprint"),
        )


def train_mnb(
    vectors: Sequence[FeatureVector],
    labels: Sequence[Label],
    alpha: float,
    space_fingerprint: str | None = None,
) -> MnbModel:
    """Fit MNB with Lidstone smoothing `alpha` over summed per-class weights."""
    if alpha <= 0:
        raise ModelError(f"alpha must be positive, got {alpha}")
    n_features = _check_training_inputs(vectors, labels)
    present = _present_labels(labels)
    row_of = {label: i for i, label in enumerate(present)}
    weight_sums = np.zeros((len(present), n_features))
    class_counts = np.zeros(len(present))
    for vec, label in zip(vectors, labels):
        weight_sums[row_of[label], vec.indices] += vec.values
        class_counts[row_of[label]] += 1
    class_log_prior = np.log(class_counts / len(vectors))
    totals = weight_sums.sum(axis=1, keepdims=True)
    feature_log_prob = np.log((weight_sums + alpha) / (totals + alpha * n_features))
    return MnbModel(
        alpha=alpha,
        labels=present,
        class_log_prior=class_log_prior,
        feature_log_prob=feature_log_prob,
        space_fingerprint=space_fingerprint,
    )


def predict_mnb(model: MnbModel, x: FeatureVector) -> tuple[Label, dict[Label, float]]:
    """Argmax of log prior + sum of weighted feature log-likelihoods."""
    _check_query(x, model.n_features)
    # fsum: exactly rounded accumulation, so classes whose term multisets
    # mirror each other score bit-equal and the canonical tie-break applies.
    terms = model.feature_log_prob[:, x.indices] * x.values
    scores = model.class_log_prior + np.array([math.fsum(row) for row in terms])
    best = int(np.argmax(scores))  # first max wins: labels are in canonical order
    return model.labels[best], {l: float(s) for l, s in zip(model.labels, scores)}


@dataclass(frozen=True)
class SvmModel:
    """One-vs-rest linear SVM: per-label weight vectors plus unregularized bias."""

    lam: float
    epochs: int
    seed: int
    labels: tuple[Label, ...]
    weights: np.ndarray
    bias: np.ndarray
    objective_history: np.ndarray = field(default_factory=lambda: np.empty((0, 0)))
    space_fingerprint: str | None = None

    @property
    def n_features(self) -> int:
        return self.weights.shape[1]

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "epochs": self.epochs,
            "seed": self.seed,
            "labels": [l.value for l in self.labels],
            "weights": [[float(x) for x in row] for row in self.weights],
            "bias": [float(x) for x in self.bias],
            "objective_history": [[float(x) for x in row] for row in self.objective_history],
            "space_fingerprint": self.space_fingerprint,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SvmModel":
        return cls(
            lam=d["lambda"],
            epochs=d["epochs"],
            seed=d["seed"],
            labels=tuple(Label(v) for v in d["labels"]),
            weights=np.asarray(d["weights"], dtype=np.float64),
            bias=np.asarray(d["bias"], dtype=np.float64),
            objective_history=np.asarray(d.get("objective_history", []), dtype=np.float64),
            space_fingerprint=d.get("space_fingerprint"),
        )


def train_svm(
    vectors: Sequence[FeatureVector],
    labels: Sequence[Label],
    lam: float,
    epochs: int = 20,
    seed: int = 0,
    space_fingerprint: str | None = None,
) -> SvmModel:
    """Train one-vs-rest hinge-loss SVMs by seeded subgradient descent.

    Step size is 1/(lam * t) over a global step counter; examples are
    visited in an order reshuffled once per epoch from `seed`, identical
    across the per-label subproblems, so retraining with the same inputs
    is bit-reproducible.
    """
    if lam <= 0:
        raise ModelError(f"lambda must be positive, got {lam}")
    if epochs < 1:
        raise ModelError(f"epochs must be >= 1, got {epochs}")
    n_features = _check_training_inputs(vectors, labels)
    present = _present_labels(labels)
    if len(present) < 2:
        raise ModelError("SVM training needs at least 2 distinct labels")
    data, indices, indptr = _stack_csr(vectors)
    n = len(vectors)
    rng = np.random.default_rng(seed)
    orders = np.stack([rng.permutation(n) for _ in range(epochs)]).astype(np.int64)
    weights = np.zeros((len(present), n_features))
    bias = np.zeros(len(present))
    objectives = np.zeros((len(present), epochs))
    for row, label in enumerate(present):
        y = np.where([l is label for l in labels], 1.0, -1.0)
        w, b, obj = kernels.pegasos(data, indices, indptr, y, lam, orders, n_features)
        weights[row] = w
        bias[row] = b
        objectives[row] = obj
    return SvmModel(
        lam=lam,
        epochs=epochs,
        seed=seed,
        labels=present,
        weights=weights,
        bias=bias,
        objective_history=objectives,
        space_fingerprint=space_fingerprint,
    )


def predict_svm(model: SvmModel, x: FeatureVector) -> tuple[Label, dict[Label, float]]:
    """Argmax of per-label margins w.x + b."""
    _check_query(x, model.n_features)
    margins = model.weights[:, x.indices] @ x.values + model.bias
    best = int(np.argmax(margins))
    return model.labels[best], {l: float(m) for l, m in zip(model.labels, margins)}


Model = MnbModel | SvmModel


def predict(model: Model, x: FeatureVector) -> tuple[Label, dict[Label, float]]:
    if isinstance(model, MnbModel):
        return predict_mnb(model, x)
    return predict_svm(model, x)


def svm_objective(
    weights: np.ndarray, bias: float, vectors: Sequence[FeatureVector], y: np.ndarray, lam: float
) -> float:
    """Full-dataset binary objective: lam/2 ||w||^2 + mean hinge loss."""
    hinge = 0.0
    for vec, yi in zip(vectors, y):
        margin = yi * (float(weights[vec.indices] @ vec.values) + bias)
        hinge += max(0.0, 1.0 - margin)
    return 0.5 * lam * float(weights @ weights) + hinge / len(vectors)


@dataclass(frozen=True)
class GridSpec:
    """Candidate lists whose Cartesian product grid search explores."""

    alphas: tuple[float, ...] = (0.01,)
    lambdas: tuple[float, ...] = (0.5,)
    word_ngram_ranges: tuple[tuple[int, int], ...] = ((1, 3),)
    char_ngram_ranges: tuple[tuple[int, int], ...] = ((1, 5),)
    word_min_dfs: tuple[int, ...] = (5,)
    char_min_dfs: tuple[int, ...] = (2,)
    use_words: tuple[bool, ...] = (True,)
    use_chars: tuple[bool, ...] = (True,)
    epochs: tuple[int, ...] = (20,)

    def __post_init__(self) -> None:
        for name in (
            "alphas", "lambdas", "word_ngram_ranges", "char_ngram_ranges",
            "word_min_dfs", "char_min_dfs", "use_words", "use_chars", "epochs",
        ):
            value = tuple(getattr(self, name))
            if not value:
                raise ModelError(f"grid list {name!r} must be nonempty")
            object.__setattr__(self, name, value)
        object.__setattr__(
            self, "word_ngram_ranges", tuple(tuple(r) for r in self.word_ngram_ranges)
        )
        object.__setattr__(
            self, "char_ngram_ranges", tuple(tuple(r) for r in self.char_ngram_ranges)
        )

    def feature_configs(self) -> list[FeatureConfig]:
        """Valid feature configs in fixed enumeration order; the all-disabled
        combination is skipped."""
        configs: list[FeatureConfig] = []
        for uw, uc, wr, cr, wdf, cdf in itertools.product(
            self.use_words, self.use_chars, self.word_ngram_ranges,
            self.char_ngram_ranges, self.word_min_dfs, self.char_min_dfs,
        ):
            if not (uw or uc):
                continue
            configs.append(FeatureConfig(
                word_ngram_range=wr, char_ngram_range=cr,
                word_min_df=wdf, char_min_df=cdf, use_words=uw, use_chars=uc,
            ))
        if not configs:
            raise ModelError("grid contains no valid feature configuration")
        return configs

    def to_dict(self) -> dict:
        return {
            "alphas": list(self.alphas),
            "lambdas": list(self.lambdas),
            "word_ngram_ranges": [list(r) for r in self.word_ngram_ranges],
            "char_ngram_ranges": [list(r) for r in self.char_ngram_ranges],
            "word_min_dfs": list(self.word_min_dfs),
            "char_min_dfs": list(self.char_min_dfs),
            "use_words": list(self.use_words),
            "use_chars": list(self.use_chars),
            "epochs": list(self.epochs),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GridSpec":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ModelError(f"unknown grid keys {sorted(unknown)}")
        kwargs = {k: tuple(v) if not isinstance(v, (int, float, bool)) else v for k, v in d.items()}
        return cls(**kwargs)


@dataclass(frozen=True)
class GridResult:
    """Winning grid point with its fitted artifacts and dev-set report."""

    config: dict
    space: FeatureSpace
    model: Model
    dev_report: EvalReport
    position: int
    n_points: int


def _as_docs(tweets: Sequence[Tweet]) -> list[tuple[list[str], str]]:
    return [(tokenize(t.text), t.text) for t in tweets]


def grid_search(
    train: Sequence[Tweet],
    dev: Sequence[Tweet],
    spec: GridSpec,
    model_kind: str,
    seed: int = 0,
    threads: int = 1,
) -> GridResult:
    """Exhaustive search over the grid, selecting max dev macro-F1.

    Enumeration order is fixed (feature configs, then alpha for MNB or
    (lambda, epochs) for SVM); ties keep the earliest point. Grid points
    are independent, so threads > 1 evaluates them in a pool; the winner
    is chosen by scanning results in enumeration order, so the outcome
    does not depend on the thread count.
    """
    if model_kind not in ("mnb", "svm"):
        raise ModelError(f"model_kind must be 'mnb' or 'svm', got {model_kind!r}")
    if not train or not dev:
        raise ModelError("train and dev sets must both be nonempty")
    overlap = {t.id for t in train} & {t.id for t in dev}
    if overlap:
        raise ModelError(f"train and dev overlap on ids: {sorted(overlap)[:5]}")
    for t in (*train, *dev):
        if t.label is None:
            raise ModelError(f"tweet {t.id!r} is unlabeled")

    train_docs = _as_docs(train)
    dev_docs = _as_docs(dev)
    train_labels = [t.label for t in train]
    dev_labels = [t.label for t in dev]

    points: list[dict] = []
    for fc in spec.feature_configs():
        if model_kind == "mnb":
            points.extend({"feature_config": fc, "alpha": a} for a in spec.alphas)
        else:
            points.extend(
                {"feature_config": fc, "lambda": lam, "epochs": ep}
                for lam in spec.lambdas for ep in spec.epochs
            )

    vectorized: dict[FeatureConfig, tuple[FeatureSpace, list, list]] = {}
    for point in points:
        fc = point["feature_config"]
        if fc not in vectorized:
            space = fit_feature_space(train_docs, fc)
            vectorized[fc] = (space, vectorize_all(train_docs, space), vectorize_all(dev_docs, space))

    def eval_point(point: dict) -> tuple[Model, FeatureSpace, EvalReport]:
        space, x_train, x_dev = vectorized[point["feature_config"]]
        if model_kind == "mnb":
            model: Model = train_mnb(x_train, train_labels, point["alpha"], space.fingerprint)
        else:
            model = train_svm(
                x_train, train_labels, point["lambda"], point["epochs"], seed, space.fingerprint
            )
        predicted = [predict(model, x)[0] for x in x_dev]
        return model, space, evaluate(dev_labels, predicted)

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(eval_point, points))
    else:
        results = [eval_point(point) for point in points]

    best: GridResult | None = None
    for position, (point, (model, space, report)) in enumerate(zip(points, results)):
        if best is None or report.macro_f1 > best.dev_report.macro_f1:
            config = dict(point)
            config["feature_config"] = point["feature_config"].to_dict()
            best = GridResult(
                config=config, space=space, model=model, dev_report=report,
                position=position, n_points=len(points),
            )
    assert best is not None
    return best


_MODEL_KINDS = {MnbModel: "mnb", SvmModel: "svm"}


def save_model(path: str | Path, model: Model, space: FeatureSpace, metadata: dict | None = None) -> None:
    """Write a versioned JSON bundle of feature space + parameters + metadata."""
    doc = {
        "format": "nordial-model",
        "version": 1,
        "kind": _MODEL_KINDS[type(model)],
        "feature_space": space.to_dict(),
        "model": model.to_dict(),
        "metadata": metadata or {},
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, ensure_ascii=False)
        fh.write("\n")


def load_model(path: str | Path) -> tuple[Model, FeatureSpace, dict]:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelError(f"{path}: invalid JSON ({exc.msg})") from None
    if doc.get("format") != "nordial-model" or doc.get("version") != 1:
        raise ModelError(f"{path}: not a recognized model file")
    space = FeatureSpace.from_dict(doc["feature_space"])
    if doc["kind"] == "mnb":
        model: Model = MnbModel.from_dict(doc["model"])
    elif doc["kind"] == "svm":
        model = SvmModel.from_dict(doc["model"])
    else:
        raise ModelError(f"{path}: unknown model kind {doc['kind']!r}")
    if model.n_features != len(space):
        raise ModelError(f"{path}: model dimensionality does not match its feature space")
    return model, space, doc.get("metadata", {})
