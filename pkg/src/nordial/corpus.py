"""Core data model: variety labels, splits, tweets, and the JSON Lines corpus format.

A corpus is an ordered list of tweets. On disk it is UTF-8 JSON Lines, one
object per line with keys ``id``, ``text`` and optional ``label``, ``split``,
``matched_terms``, ``source``. Unknown keys are rejected so that format drift
is caught early; line order is significant and preserved.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .errors import CorpusError


class Label(Enum):
    """The four written-variety classes, in canonical order."""

    BOKMAL = "bokmal"
    NYNORSK = "nynorsk"
    DIALECT = "dialect"
    MIXED = "mixed"

    @classmethod
    def parse(cls, value: str) -> "Label":
        try:
            return cls(value)
        except ValueError:
            known = ", ".join(m.value for m in cls)
            raise CorpusError(f"unknown label {value!r} (expected one of: {known})") from None

    def __lt__(self, other: "Label") -> bool:
        return LABELS.index(self) < LABELS.index(other)


class Split(Enum):
    """Experiment partitions."""

    TRAIN = "train"
    DEV = "dev"
    TEST = "test"

    @classmethod
    def parse(cls, value: str) -> "Split":
        try:
            return cls(value)
        except ValueError:
            known = ", ".join(m.value for m in cls)
            raise CorpusError(f"unknown split {value!r} (expected one of: {known})") from None


LABELS: tuple[Label, ...] = tuple(Label)
SPLITS: tuple[Split, ...] = tuple(Split)


@dataclass(frozen=True)
class Tweet:
    """One text sample with optional gold label and split assignment."""

    id: str
    text: str
    label: Label | None = None
    split: Split | None = None
    matched_terms: tuple[str, ...] = ()
    source: str | None = None

    def __post_init__(self) -> None:
        if not self.id:
            raise CorpusError("tweet id must be a nonempty string")
        if not self.text.strip():
            raise CorpusError(f"tweet {self.id!r} has empty text")
        object.__setattr__(self, "matched_terms", tuple(self.matched_terms))


@dataclass(frozen=True)
class Corpus:
    """An ordered, duplicate-free collection of tweets."""

    tweets: tuple[Tweet, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "tweets", tuple(self.tweets))
        seen: set[str] = set()
        for tweet in self.tweets:
            if tweet.id in seen:
                raise CorpusError(f"duplicate tweet id {tweet.id!r}")
            seen.add(tweet.id)
            if tweet.split is not None and tweet.label is None:
                raise CorpusError(
                    f"tweet {tweet.id!r} has a split but no label; "
                    "annotation precedes split assignment"
                )

    def __len__(self) -> int:
        return len(self.tweets)

    def __iter__(self) -> Iterator[Tweet]:
        return iter(self.tweets)

    def __getitem__(self, i: int) -> Tweet:
        return self.tweets[i]

    def with_split(self, split: Split) -> "Corpus":
        """Sub-corpus containing only tweets assigned to `split`."""
        return Corpus(tuple(t for t in self.tweets if t.split is split))


_RECORD_KEYS = ("id", "text", "label", "split", "matched_terms", "source")


def _tweet_from_record(record: dict, lineno: int) -> Tweet:
    if not isinstance(record, dict):
        raise CorpusError(f"line {lineno}: expected a JSON object, got {type(record).__name__}")
    unknown = set(record) - set(_RECORD_KEYS)
    if unknown:
        raise CorpusError(f"line {lineno}: unknown keys {sorted(unknown)}")
    for key in ("id", "text"):
        if key not in record:
            raise CorpusError(f"line {lineno}: missing required key {key!r}")
        if not isinstance(record[key], str):
            raise CorpusError(f"line {lineno}: {key!r} must be a string")
    matched = record.get("matched_terms", [])
    if not isinstance(matched, list) or not all(isinstance(m, str) for m in matched):
        raise CorpusError(f"line {lineno}: 'matched_terms' must be an array of strings")
    source = record.get("source")
    if source is not None and not isinstance(source, str):
        raise CorpusError(f"line {lineno}: 'source' must be a string")
    try:
        label = Label.parse(record["label"]) if record.get("label") is not None else None
        split = Split.parse(record["split"]) if record.get("split") is not None else None
        return Tweet(
            id=record["id"],
            text=record["text"],
            label=label,
            split=split,
            matched_terms=tuple(matched),
            source=source,
        )
    except CorpusError as exc:
        raise CorpusError(f"line {lineno}: {exc}") from None


def load_corpus(path: str | Path) -> Corpus:
    """Read a JSON Lines corpus file, validating every record.

    Raises CorpusError with the offending line number on malformed input,
    and on duplicate ids or a split assignment without a label.
    """
    tweets: list[Tweet] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped:
                raise CorpusError(f"line {lineno}: blank line in corpus file")
            try:
                record = json.loads(stripped)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"line {lineno}: invalid JSON ({exc.msg})") from None
            tweets.append(_tweet_from_record(record, lineno))
    return Corpus(tuple(tweets))


def dump_corpus(corpus: Corpus, fh) -> None:
    """Write corpus records as JSON Lines to an open text stream."""
    for tweet in corpus:
        record: dict = {"id": tweet.id, "text": tweet.text}
        if tweet.label is not None:
            record["label"] = tweet.label.value
        if tweet.split is not None:
            record["split"] = tweet.split.value
        if tweet.matched_terms:
            record["matched_terms"] = list(tweet.matched_terms)
        if tweet.source is not None:
            record["source"] = tweet.source
        fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    """Write a corpus as JSON Lines; load_corpus(save_corpus(c)) == c."""
    with open(path, "w", encoding="utf-8") as fh:
        dump_corpus(corpus, fh)


def _floor_counts(n: int, ratios: tuple[float, float, float]) -> list[int]:
    # Floor each share, then hand leftovers to train, then dev. The 1e-9 nudge
    # guards against n*ratio landing just below an exact integer in floats.
    counts = [math.floor(n * r + 1e-9) for r in ratios]
    leftover = n - sum(counts)
    for i in range(leftover):
        counts[i] += 1
    return counts


def _validate_ratios(ratios: tuple[float, float, float]) -> None:
    if len(ratios) != 3:
        raise CorpusError(f"expected 3 split ratios (train, dev, test), got {len(ratios)}")
    if any(r <= 0 for r in ratios):
        raise CorpusError(f"split ratios must be positive, got {ratios}")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise CorpusError(f"split ratios must sum to 1.0, got {sum(ratios)!r}")


def split_corpus(
    corpus: Corpus,
    ratios: tuple[float, float, float],
    seed: int,
    stratified: bool = False,
) -> Corpus:
    """Assign every tweet to train/dev/test, overwriting prior assignments.

    Counts per split are floor(n * ratio) with leftovers going to train,
    then dev. Assignment is a seeded shuffle, deterministic in
    (seed, corpus order). With stratified=True the floor rule is applied
    within each label group, keeping per-label proportions within one
    tweet of the global ratios.
    """
    _validate_ratios(ratios)
    for tweet in corpus:
        if tweet.label is None:
            raise CorpusError(f"tweet {tweet.id!r} is unlabeled; label all tweets before splitting")

    rng = np.random.default_rng(seed)
    assignment: dict[int, Split] = {}

    def assign(indices: list[int]) -> None:
        order = [indices[j] for j in rng.permutation(len(indices))]
        n_train, n_dev, _ = _floor_counts(len(indices), ratios)
        for pos, idx in enumerate(order):
            if pos < n_train:
                assignment[idx] = Split.TRAIN
            elif pos < n_train + n_dev:
                assignment[idx] = Split.DEV
            else:
                assignment[idx] = Split.TEST

    if stratified:
        for label in LABELS:
            assign([i for i, t in enumerate(corpus) if t.label is label])
    else:
        assign(list(range(len(corpus))))

    return Corpus(tuple(replace(t, split=assignment[i]) for i, t in enumerate(corpus)))


_STAT_ROWS: tuple[Split | None, ...] = (*SPLITS, None)
_STAT_COLS: tuple[Label | None, ...] = (*LABELS, None)

_ROW_NAMES = {Split.TRAIN: "train", Split.DEV: "dev", Split.TEST: "test", None: "unsplit"}
_COL_NAMES = {**{label: label.value for label in LABELS}, None: "unlabeled"}


@dataclass(frozen=True)
class CorpusStats:
    """Tweet counts per (split x label) cell, including unassigned rows."""

    counts: dict[tuple[Split | None, Label | None], int] = field(default_factory=dict)

    def cell(self, split: Split | None, label: Label | None) -> int:
        return self.counts.get((split, label), 0)

    @property
    def n(self) -> int:
        return sum(self.counts.values())

    def row_total(self, split: Split | None) -> int:
        return sum(self.cell(split, c) for c in _STAT_COLS)

    def col_total(self, label: Label | None) -> int:
        return sum(self.cell(r, label) for r in _STAT_ROWS)

    def to_dict(self) -> dict:
        rows = {}
        for split in _STAT_ROWS:
            row = {_COL_NAMES[label]: self.cell(split, label) for label in _STAT_COLS}
            row["total"] = self.row_total(split)
            rows[_ROW_NAMES[split]] = row
        totals = {_COL_NAMES[label]: self.col_total(label) for label in _STAT_COLS}
        totals["total"] = self.n
        return {"rows": rows, "totals": totals, "n": self.n}

    def render_text(self) -> str:
        headers = [_COL_NAMES[c] for c in _STAT_COLS] + ["total"]
        lines = [["", *headers]]
        for split in _STAT_ROWS:
            lines.append(
                [_ROW_NAMES[split]]
                + [str(self.cell(split, c)) for c in _STAT_COLS]
                + [str(self.row_total(split))]
            )
        lines.append(["total"] + [str(self.col_total(c)) for c in _STAT_COLS] + [str(self.n)])
        widths = [max(len(row[i]) for row in lines) for i in range(len(lines[0]))]
        return "\n".join(
            "  ".join(cell.rjust(w) for cell, w in zip(row, widths)).rstrip() for row in lines
        )


def corpus_stats(corpus: Corpus) -> CorpusStats:
    """Count tweets per (split x label); cells always sum to len(corpus)."""
    counts: dict[tuple[Split | None, Label | None], int] = {}
    for tweet in corpus:
        key = (tweet.split, tweet.label)
        counts[key] = counts.get(key, 0) + 1
    return CorpusStats(counts)
