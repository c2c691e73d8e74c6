"""Candidate harvesting: tokenization, term-lexicon matching, length filtering.

The harvester turns a raw (id, text) stream into an unlabeled corpus by
keeping texts that are long enough and contain at least one lexicon term.
Lexicon terms are two-token phrases matched against consecutive token
bigrams, never against substrings, so "eg har" cannot fire inside "legg hard".
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable

from .corpus import Corpus, Label, Tweet
from .errors import CorpusError, LexiconError

# Zero-width and variation characters that would otherwise end up glued to
# tokens or floating as invisible one-character tokens.
_INVISIBLES = dict.fromkeys(map(ord, "­​‌‍⁠︎️﻿"))

# Codepoint ranges treated as emoji: each one becomes its own token.
_EMOJI_RANGES = (
    (0x1F000, 0x1FAFF),  # emoticons, pictographs, transport, extended symbols
    (0x2600, 0x27BF),    # miscellaneous symbols and dingbats
    (0x2B00, 0x2BFF),    # stars and heavy arrows used as emoji
)

# '@' and '#' stay attached so mentions and hashtags survive as single tokens.
_KEEP_AT_EDGE = frozenset("@#")


def _is_emoji(ch: str) -> bool:
    cp = ord(ch)
    return any(lo <= cp <= hi for lo, hi in _EMOJI_RANGES)


def _is_detachable(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P") and ch not in _KEEP_AT_EDGE


def normalize_text(text: str) -> str:
    """Lowercase NFC form with invisible formatting characters removed."""
    return unicodedata.normalize("NFC", text).lower().translate(_INVISIBLES)


def _split_segment(segment: str) -> list[str]:
    # Detach leading/trailing punctuation marks as their own tokens;
    # punctuation inside the segment (apostrophes, hyphens, URL chars) stays.
    i, j = 0, len(segment)
    lead: list[str] = []
    while i < j and _is_detachable(segment[i]):
        lead.append(segment[i])
        i += 1
    trail: list[str] = []
    while j > i and _is_detachable(segment[j - 1]):
        trail.append(segment[j - 1])
        j -= 1
    middle = [segment[i:j]] if j > i else []
    return lead + middle + list(reversed(trail))


def tokenize(text: str) -> list[str]:
    """Lowercase, whitespace-split, edge-punctuation-aware tokenization.

    Diacritics stay inside tokens, every emoji is its own token, and
    apostrophes internal to a token are kept. Idempotent on its own
    space-joined output.
    """
    tokens: list[str] = []
    for chunk in normalize_text(text).split():
        segment: list[str] = []
        for ch in chunk:
            if _is_emoji(ch):
                if segment:
                    tokens.extend(_split_segment("".join(segment)))
                    segment = []
                tokens.append(ch)
            else:
                segment.append(ch)
        if segment:
            tokens.extend(_split_segment("".join(segment)))
    return tokens


_LEXICON_LABELS = (Label.BOKMAL, Label.NYNORSK, Label.DIALECT)


@dataclass(frozen=True)
class TermLexicon:
    """Two-token search terms per variety (Mixed has no terms of its own).

    A term may appear under several labels ("eg har" is both Nynorsk and
    Dialect); within one label the terms are unique.
    """

    entries: dict[Label, tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        entries: dict[Label, tuple[str, ...]] = {}
        for label, terms in self.entries.items():
            if label not in _LEXICON_LABELS:
                raise LexiconError(f"lexicon label must be bokmal/nynorsk/dialect, got {label.value!r}")
            seen: set[str] = set()
            kept: list[str] = []
            for term in terms:
                if len(tokenize(term)) != 2:
                    raise LexiconError(f"term {term!r} must tokenize to exactly 2 tokens")
                if term in seen:
                    raise LexiconError(f"duplicate term {term!r} under label {label.value!r}")
                seen.add(term)
                kept.append(term)
            entries[label] = tuple(kept)
        object.__setattr__(self, "entries", entries)

    def bigram_index(self) -> dict[tuple[str, str], list[tuple[str, Label]]]:
        """Map (token1, token2) -> [(term, label), ...] in canonical label order."""
        index: dict[tuple[str, str], list[tuple[str, Label]]] = {}
        for label in _LEXICON_LABELS:
            for term in self.entries.get(label, ()):
                t1, t2 = tokenize(term)
                index.setdefault((t1, t2), []).append((term, label))
        return index

    @property
    def n_terms(self) -> int:
        return sum(len(v) for v in self.entries.values())


_SECTION_HEADERS = {f"[{label.value}]": label for label in _LEXICON_LABELS}


def load_lexicon(path: str | Path) -> TermLexicon:
    """Parse a lexicon file: [bokmal]/[nynorsk]/[dialect] sections, one term
    per line, '#' comments. Repeated terms within a section are collapsed."""
    entries: dict[Label, list[str]] = {}
    current: Label | None = None
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("["):
                try:
                    current = _SECTION_HEADERS[line]
                except KeyError:
                    raise LexiconError(f"line {lineno}: unknown section {line!r}") from None
                entries.setdefault(current, [])
                continue
            if current is None:
                raise LexiconError(f"line {lineno}: term {line!r} before any section header")
            if line not in entries[current]:
                entries[current].append(line)
    if not entries:
        raise LexiconError(f"no lexicon sections found in {path}")
    return TermLexicon({label: tuple(terms) for label, terms in entries.items()})


def default_lexicon() -> TermLexicon:
    """The bundled seed lexicon shipped with the package."""
    with resources.as_file(resources.files("nordial.data").joinpath("lexicon.txt")) as p:
        return load_lexicon(p)


def match_terms(tokens: list[str], lexicon: TermLexicon) -> list[tuple[str, Label]]:
    """Every (term, label) whose two tokens occur consecutively in `tokens`.

    Each distinct pair is reported once, ordered by first occurrence,
    ties by canonical label order.
    """
    index = lexicon.bigram_index()
    out: list[tuple[str, Label]] = []
    seen: set[tuple[str, Label]] = set()
    for i in range(len(tokens) - 1):
        for pair in index.get((tokens[i], tokens[i + 1]), ()):
            if pair not in seen:
                seen.add(pair)
                out.append(pair)
    return out


def filter_candidates(
    stream: Iterable[tuple[str, str]] | Iterable[tuple[str, str, str | None]],
    lexicon: TermLexicon,
    min_tokens: int = 10,
) -> Corpus:
    """Keep texts with >= min_tokens tokens and at least one lexicon match.

    Exact duplicates (identical token sequences) are dropped, first
    occurrence wins. matched_terms records each matched term string once,
    in match order. Accepts (id, text) or (id, text, source) items.
    """
    if min_tokens < 1:
        raise CorpusError(f"min_tokens must be >= 1, got {min_tokens}")
    kept: list[Tweet] = []
    seen_sequences: set[tuple[str, ...]] = set()
    for item in stream:
        tweet_id, text = item[0], item[1]
        source = item[2] if len(item) > 2 else None
        tokens = tokenize(text)
        if len(tokens) < min_tokens:
            continue
        matches = match_terms(tokens, lexicon)
        if not matches:
            continue
        key = tuple(tokens)
        if key in seen_sequences:
            continue
        seen_sequences.add(key)
        terms: list[str] = []
        for term, _ in matches:
            if term not in terms:
                terms.append(term)
        kept.append(Tweet(id=tweet_id, text=text, matched_terms=tuple(terms), source=source))
    return Corpus(tuple(kept))
