"""Tf-idf n-gram featurization over word and character n-grams.

Feature keys are namespaced strings: "w:" + space-joined word n-gram or
"c:" + character n-gram. Character n-grams run over the lowercased raw
text with whitespace collapsed to single spaces, so they cross token
boundaries through exactly one space and see original punctuation.
"""

from __future__ import annotations

import hashlib
import json
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import ModelError
from .harvest import normalize_text

# A document, for featurization purposes: (tokens, raw_text).
Doc = tuple[list[str], str]


@dataclass(frozen=True)
class FeatureConfig:
    """N-gram ranges and document-frequency floors for the two namespaces."""

    word_ngram_range: tuple[int, int] = (1, 3)
    char_ngram_range: tuple[int, int] = (1, 5)
    word_min_df: int = 5
    char_min_df: int = 2
    use_words: bool = True
    use_chars: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "word_ngram_range", tuple(self.word_ngram_range))
        object.__setattr__(self, "char_ngram_range", tuple(self.char_ngram_range))
        if not (self.use_words or self.use_chars):
            raise ModelError("at least one of use_words/use_chars must be enabled")
        for name, (lo, hi), enabled in (
            ("word_ngram_range", self.word_ngram_range, self.use_words),
            ("char_ngram_range", self.char_ngram_range, self.use_chars),
        ):
            if enabled and not (1 <= lo <= hi):
                raise ModelError(f"{name} must satisfy 1 <= lo <= hi, got ({lo}, {hi})")
        if self.word_min_df < 1 or self.char_min_df < 1:
            raise ModelError("min_df values must be >= 1")

    def to_dict(self) -> dict:
        return {
            "word_ngram_range": list(self.word_ngram_range),
            "char_ngram_range": list(self.char_ngram_range),
            "word_min_df": self.word_min_df,
            "char_min_df": self.char_min_df,
            "use_words": self.use_words,
            "use_chars": self.use_chars,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureConfig":
        return cls(
            word_ngram_range=tuple(d["word_ngram_range"]),
            char_ngram_range=tuple(d["char_ngram_range"]),
            word_min_df=d["word_min_df"],
            char_min_df=d["char_min_df"],
            use_words=d["use_words"],
            use_chars=d["use_chars"],
        )


def word_ngrams(tokens: list[str], lo: int, hi: int) -> list[str]:
    """Space-joined word n-grams for every n in [lo, hi]."""
    out: list[str] = []
    for n in range(lo, hi + 1):
        out.extend(" ".join(tokens[i : i + n]) for i in range(len(tokens) - n + 1))
    return out


def char_source(raw_text: str) -> str:
    """Normalized character stream: lowercase, single spaces between tokens."""
    return " ".join(normalize_text(raw_text).split())


def extract_ngrams(tokens: list[str], raw_text: str, config: FeatureConfig) -> Counter:
    """Multiset of namespaced feature keys for one document."""
    counts: Counter = Counter()
    if config.use_words:
        lo, hi = config.word_ngram_range
        counts.update("w:" + g for g in word_ngrams(tokens, lo, hi))
    if config.use_chars:
        lo, hi = config.char_ngram_range
        s = char_source(raw_text)
        for n in range(lo, hi + 1):
            counts.update("c:" + s[i : i + n] for i in range(len(s) - n + 1))
    return counts


@dataclass(frozen=True)
class FeatureSpace:
    """Fitted vocabulary with smoothed idf weights and deterministic indices."""

    vocabulary: dict[str, int]
    idf: np.ndarray
    config: FeatureConfig
    n_docs: int

    def __len__(self) -> int:
        return len(self.vocabulary)

    @property
    def fingerprint(self) -> str:
        """Stable identity of this space, for model files to reference."""
        payload = json.dumps(self.to_dict(), sort_keys=True).encode("utf-8")
        return hashlib.sha256(payload).hexdigest()[:16]

    def to_dict(self) -> dict:
        return {
            "format": "nordial-feature-space",
            "version": 1,
            "config": self.config.to_dict(),
            "n_docs": self.n_docs,
            "vocabulary": self.vocabulary,
            "idf": [float(x) for x in self.idf],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureSpace":
        if d.get("format") != "nordial-feature-space" or d.get("version") != 1:
            raise ModelError("not a recognized feature-space document")
        vocab = dict(d["vocabulary"])
        idf = np.asarray(d["idf"], dtype=np.float64)
        if len(idf) != len(vocab):
            raise ModelError("feature-space idf length does not match vocabulary size")
        if sorted(vocab.values()) != list(range(len(vocab))):
            raise ModelError("feature-space indices must be a permutation of 0..V-1")
        if len(idf) and not (np.all(np.isfinite(idf)) and np.all(idf > 0)):
            raise ModelError("feature-space idf values must be finite and positive")
        return cls(vocabulary=vocab, idf=idf, config=FeatureConfig.from_dict(d["config"]), n_docs=d["n_docs"])


@dataclass(frozen=True)
class FeatureVector:
    """Sparse document vector: ascending indices with nonnegative weights.

    `size` is the vocabulary size the indices are valid against.
    """

    indices: np.ndarray
    values: np.ndarray
    size: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "indices", np.asarray(self.indices, dtype=np.int64))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64))
        if self.indices.shape != self.values.shape:
            raise ModelError("indices and values must have equal length")
        if len(self.indices) and (self.indices[-1] >= self.size or self.indices[0] < 0):
            raise ModelError("feature index out of range for vocabulary size")

    @property
    def nnz(self) -> int:
        return len(self.indices)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.values**2)))

    def as_dict(self) -> dict[int, float]:
        return {int(i): float(v) for i, v in zip(self.indices, self.values)}


def fit_feature_space(docs: list[Doc], config: FeatureConfig) -> FeatureSpace:
    """Fit vocabulary and idf over documents.

    A feature enters the vocabulary when its document frequency reaches its
    namespace's min_df. idf is the smoothed ln((1 + N) / (1 + df)) + 1.
    Indices follow lexicographic key order, so fits are order-independent.
    """
    if not docs:
        raise ModelError("cannot fit a feature space on an empty document list")
    df: Counter = Counter()
    for tokens, raw in docs:
        df.update(set(extract_ngrams(tokens, raw, config)))
    min_df = {"w": config.word_min_df, "c": config.char_min_df}
    kept = sorted(key for key, d in df.items() if d >= min_df[key[0]])
    vocabulary = {key: i for i, key in enumerate(kept)}
    n = len(docs)
    idf = np.array([math.log((1 + n) / (1 + df[key])) + 1.0 for key in kept], dtype=np.float64)
    return FeatureSpace(vocabulary=vocabulary, idf=idf, config=config, n_docs=n)


def vectorize(doc: Doc, space: FeatureSpace) -> FeatureVector:
    """L2-normalized tf-idf vector; out-of-vocabulary features are ignored."""
    tokens, raw = doc
    counts = extract_ngrams(tokens, raw, space.config)
    entries = sorted(
        (space.vocabulary[key], tf * space.idf[space.vocabulary[key]])
        for key, tf in counts.items()
        if key in space.vocabulary
    )
    if not entries:
        return FeatureVector(np.empty(0, dtype=np.int64), np.empty(0, dtype=np.float64), len(space))
    indices = np.array([i for i, _ in entries], dtype=np.int64)
    values = np.array([v for _, v in entries], dtype=np.float64)
    norm = np.sqrt(np.sum(values**2))
    if norm > 0:
        values = values / norm
    return FeatureVector(indices, values, len(space))


def vectorize_all(docs: list[Doc], space: FeatureSpace) -> list[FeatureVector]:
    return [vectorize(doc, space) for doc in docs]
