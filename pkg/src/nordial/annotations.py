"""Append-only label log and the annotation queue state built from it.

The store's single source of truth is a JSON Lines log of label
submissions ({tweet_id, label, annotator, timestamp}); replaying the log
reconstructs the exact in-memory state, so the service is crash-safe by
construction. Writes are serialized and fsynced before they are
acknowledged.
"""

from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import dataclass
from pathlib import Path

from .analytics import AgreementRecord
from .corpus import Corpus, CorpusStats, Label, Tweet, corpus_stats
from .errors import CorpusError


@dataclass(frozen=True)
class LabelEntry:
    tweet_id: str
    label: Label
    annotator: str
    timestamp: float


def _parse_log_line(line: str, lineno: int) -> LabelEntry:
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        raise CorpusError(f"label log line {lineno}: invalid JSON ({exc.msg})") from None
    try:
        return LabelEntry(
            tweet_id=record["tweet_id"],
            label=Label.parse(record["label"]),
            annotator=record["annotator"],
            timestamp=float(record.get("timestamp", 0.0)),
        )
    except KeyError as exc:
        raise CorpusError(f"label log line {lineno}: missing key {exc}") from None


def read_label_log(path: str | Path) -> list[LabelEntry]:
    entries: list[LabelEntry] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if line.strip():
                entries.append(_parse_log_line(line.strip(), lineno))
    return entries


def agreement_records(entries: list[LabelEntry]) -> list[AgreementRecord]:
    """Doubly-annotated tweets as agreement records (latest label per annotator).

    Annotator roles follow first-submission order per tweet; only tweets
    with exactly two distinct annotators qualify.
    """
    latest: dict[str, dict[str, Label]] = {}
    first_seen: dict[str, list[str]] = {}
    for entry in entries:
        by_annotator = latest.setdefault(entry.tweet_id, {})
        if entry.annotator not in by_annotator:
            first_seen.setdefault(entry.tweet_id, []).append(entry.annotator)
        by_annotator[entry.annotator] = entry.label
    records = []
    for tweet_id, by_annotator in latest.items():
        if len(by_annotator) == 2:
            a, b = first_seen[tweet_id]
            records.append(AgreementRecord(tweet_id, by_annotator[a], by_annotator[b]))
    return records


class AnnotationStore:
    """Candidate corpus plus live label state backed by the append-only log.

    Every overlap_every-th tweet (by corpus position) has capacity for two
    distinct annotators, sustaining the agreement subset; the rest are
    single-annotator. Routing capacity is derived from persisted labels
    only, so restarts lose nothing.
    """

    def __init__(self, corpus: Corpus, log_path: str | Path, overlap: float = 0.1):
        if not 0.0 <= overlap <= 1.0:
            raise CorpusError(f"overlap fraction must be in [0, 1], got {overlap}")
        self.corpus = corpus
        self.log_path = Path(log_path)
        self.overlap_every = round(1.0 / overlap) if overlap > 0 else 0
        self._position = {t.id: i for i, t in enumerate(corpus)}
        self._labels: dict[str, dict[str, Label]] = {}
        self._first_seen: dict[str, list[str]] = {}
        self._lock = threading.Lock()
        if self.log_path.exists():
            for entry in read_label_log(self.log_path):
                self._apply(entry)

    def _apply(self, entry: LabelEntry) -> str:
        if entry.tweet_id not in self._position:
            raise CorpusError(f"unknown tweet id {entry.tweet_id!r}")
        by_annotator = self._labels.setdefault(entry.tweet_id, {})
        status = "duplicate" if entry.annotator in by_annotator else "accepted"
        if status == "accepted":
            self._first_seen.setdefault(entry.tweet_id, []).append(entry.annotator)
        by_annotator[entry.annotator] = entry.label
        return status

    def capacity(self, tweet_id: str) -> int:
        if self.overlap_every and self._position[tweet_id] % self.overlap_every == 0:
            return 2
        return 1

    def labels_for(self, tweet_id: str) -> dict[str, Label]:
        with self._lock:
            return dict(self._labels.get(tweet_id, {}))

    def next_for(self, annotator: str) -> Tweet | None:
        """Lowest-position tweet this annotator may still label, or None."""
        with self._lock:
            for tweet in self.corpus:
                by_annotator = self._labels.get(tweet.id, {})
                if annotator in by_annotator:
                    continue
                if len(by_annotator) >= self.capacity(tweet.id):
                    continue
                return tweet
        return None

    def submit(self, tweet_id: str, label: Label, annotator: str,
               timestamp: float | None = None) -> str:
        """Append to the log (fsync) and update state; returns accepted/duplicate."""
        if not annotator:
            raise CorpusError("annotator id must be nonempty")
        if tweet_id not in self._position:
            raise CorpusError(f"unknown tweet id {tweet_id!r}")
        entry = LabelEntry(tweet_id, label, annotator,
                           time.time() if timestamp is None else timestamp)
        line = json.dumps(
            {"tweet_id": entry.tweet_id, "label": entry.label.value,
             "annotator": entry.annotator, "timestamp": entry.timestamp},
            ensure_ascii=False,
        )
        with self._lock:
            with open(self.log_path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")
                fh.flush()
                os.fsync(fh.fileno())
            return self._apply(entry)

    def agreement_records(self) -> list[AgreementRecord]:
        with self._lock:
            records = []
            for tweet_id, by_annotator in self._labels.items():
                if len(by_annotator) == 2:
                    a, b = self._first_seen[tweet_id]
                    records.append(AgreementRecord(tweet_id, by_annotator[a], by_annotator[b]))
            return records

    def resolved_label(self, tweet_id: str) -> Label | None:
        """Consensus label: single annotator's choice, or the unanimous one;
        disagreements stay unresolved."""
        labels = set(self._labels.get(tweet_id, {}).values())
        if len(labels) == 1:
            return next(iter(labels))
        return None

    def resolved_corpus(self) -> Corpus:
        """Corpus with consensus labels attached, in original order."""
        with self._lock:
            tweets = []
            for tweet in self.corpus:
                label = self.resolved_label(tweet.id)
                if label is not None and tweet.label is not label:
                    tweet = Tweet(tweet.id, tweet.text, label=label, split=tweet.split,
                                  matched_terms=tweet.matched_terms, source=tweet.source)
                tweets.append(tweet)
            return Corpus(tuple(tweets))

    def stats(self) -> CorpusStats:
        return corpus_stats(self.resolved_corpus())

    def n_labeled(self) -> int:
        with self._lock:
            return sum(1 for labels in self._labels.values() if labels)
