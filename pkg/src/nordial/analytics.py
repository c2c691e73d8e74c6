"""Statistics for corpus analysis: chi-squared trait ranking and Cohen's kappa.

The chi-squared p-value (1 degree of freedom) comes from the regularized
upper incomplete gamma function Q(1/2, x/2), implemented here with the
classic power series / continued fraction pair so the package carries no
statistics dependency. Accuracy is well below 1e-8 over the statistic
range [0, 50].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .corpus import Corpus, Label
from .errors import AnalyticsError
from .features import word_ngrams
from .harvest import tokenize

_EPS = 1e-16
_MAX_ITER = 500


def _lower_gamma_series(a: float, x: float) -> float:
    # P(a, x) via the power series  gamma(a,x) = e^-x x^a sum_n x^n / (a (a+1) ... (a+n))
    term = 1.0 / a
    total = term
    n = 0
    while n < _MAX_ITER:
        n += 1
        term *= x / (a + n)
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _upper_gamma_contfrac(a: float, x: float) -> float:
    # Q(a, x) via the continued fraction, evaluated with Lentz's method.
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b if b != 0 else 1.0 / tiny
    h = d
    for i in range(1, _MAX_ITER + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return h * math.exp(-x + a * math.log(x) - math.lgamma(a))


def reg_gamma_q(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x)."""
    if a <= 0:
        raise AnalyticsError(f"gamma shape parameter must be positive, got {a}")
    if x < 0:
        raise AnalyticsError(f"gamma argument must be nonnegative, got {x}")
    if x == 0.0:
        return 1.0
    # The series converges fast left of a+1, the continued fraction right of it.
    if x < a + 1.0:
        return 1.0 - _lower_gamma_series(a, x)
    return _upper_gamma_contfrac(a, x)


def chi2_sf(statistic: float, df: int = 1) -> float:
    """Survival function of the chi-squared distribution."""
    return reg_gamma_q(df / 2.0, statistic / 2.0)


ContingencyTable = Sequence[Sequence[int]]


def chi2_score(table: ContingencyTable) -> tuple[float, float]:
    """Pearson chi-squared statistic and p-value for a 2x2 table.

    Rows are the two classes, columns presence/absence. No continuity
    correction. A zero row or column marginal makes an expected cell zero
    and is rejected rather than returning NaN.
    """
    if len(table) != 2 or any(len(row) != 2 for row in table):
        raise AnalyticsError("contingency table must be 2x2")
    cells = [[table[i][j] for j in range(2)] for i in range(2)]
    for row in cells:
        for v in row:
            if v != int(v) or v < 0:
                raise AnalyticsError(f"table counts must be nonnegative integers, got {v!r}")
    rows = [cells[0][0] + cells[0][1], cells[1][0] + cells[1][1]]
    cols = [cells[0][0] + cells[1][0], cells[0][1] + cells[1][1]]
    total = rows[0] + rows[1]
    if total <= 0:
        raise AnalyticsError("contingency table total must be positive")
    if 0 in rows or 0 in cols:
        raise AnalyticsError("degenerate contingency table (zero marginal)")
    statistic = 0.0
    for i in range(2):
        for j in range(2):
            expected = rows[i] * cols[j] / total
            statistic += (cells[i][j] - expected) ** 2 / expected
    return statistic, chi2_sf(statistic, df=1)


@dataclass(frozen=True)
class TraitScore:
    feature: str
    chi2: float
    p_value: float


@dataclass(frozen=True)
class TraitRanking:
    """Salient features for a label pair, sorted by statistic descending."""

    pair: tuple[Label, Label]
    entries: tuple[TraitScore, ...]

    def __iter__(self):
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)


def chi2_rank(
    corpus: Corpus,
    pair: tuple[Label, Label],
    ngram_range: tuple[int, int] = (1, 3),
    p_threshold: float = 0.05,
    top_k: int = 10,
) -> TraitRanking:
    """Rank word n-grams by chi-squared over per-tweet presence in two classes.

    Features present in every tweet of both classes are skipped (degenerate
    table, zero signal). Ties in the statistic break lexicographically.
    """
    label_a, label_b = pair
    if label_a is label_b:
        raise AnalyticsError("chi2_rank needs two distinct labels")
    lo, hi = ngram_range
    df_a: dict[str, int] = {}
    df_b: dict[str, int] = {}
    n_a = n_b = 0
    for tweet in corpus:
        if tweet.label is label_a:
            df, = (df_a,)
            n_a += 1
        elif tweet.label is label_b:
            df, = (df_b,)
            n_b += 1
        else:
            continue
        for gram in set(word_ngrams(tokenize(tweet.text), lo, hi)):
            df[gram] = df.get(gram, 0) + 1
    if n_a == 0 or n_b == 0:
        empty = label_a.value if n_a == 0 else label_b.value
        raise AnalyticsError(f"no tweets labeled {empty!r} in the corpus")

    scored: list[TraitScore] = []
    for gram in set(df_a) | set(df_b):
        a = df_a.get(gram, 0)
        c = df_b.get(gram, 0)
        if a == n_a and c == n_b:  # present everywhere: zero absence marginal
            continue
        statistic, p = chi2_score(((a, n_a - a), (c, n_b - c)))
        if p <= p_threshold:
            scored.append(TraitScore(gram, statistic, p))
    scored.sort(key=lambda s: (-s.chi2, s.feature))
    return TraitRanking(pair=pair, entries=tuple(scored[:top_k]))


@dataclass(frozen=True)
class AgreementRecord:
    """One doubly-annotated item."""

    item_id: str
    label_a: Label
    label_b: Label


def cohen_kappa(records: Sequence[AgreementRecord]) -> float:
    """Chance-corrected agreement (p_o - p_e) / (1 - p_e) between two annotators.

    When both annotators used one identical label throughout, p_e is 1 and
    kappa is defined as 1.0.
    """
    if not records:
        raise AnalyticsError("cohen_kappa requires at least one record")
    n = len(records)
    p_o = sum(1 for r in records if r.label_a is r.label_b) / n
    p_e = 0.0
    for label in Label:
        marginal_a = sum(1 for r in records if r.label_a is label) / n
        marginal_b = sum(1 for r in records if r.label_b is label) / n
        p_e += marginal_a * marginal_b
    if p_e == 1.0:
        return 1.0
    return (p_o - p_e) / (1.0 - p_e)
