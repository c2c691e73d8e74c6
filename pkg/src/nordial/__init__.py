"""nordial: corpus building and classification for written Norwegian varieties.

The toolkit covers the full loop: harvesting candidate texts with a term
lexicon, annotating them (HTTP service + browser UI), measuring annotator
agreement, mining variety-salient traits with chi-squared tests, and
training/evaluating tf-idf n-gram classifiers (Multinomial Naive Bayes and
a linear hinge-loss SVM).
"""

from .analytics import (
    AgreementRecord,
    TraitRanking,
    TraitScore,
    chi2_rank,
    chi2_score,
    chi2_sf,
    cohen_kappa,
)
from .corpus import (
    LABELS,
    SPLITS,
    Corpus,
    CorpusStats,
    Label,
    Split,
    Tweet,
    corpus_stats,
    load_corpus,
    save_corpus,
    split_corpus,
)
from .errors import AnalyticsError, CorpusError, LexiconError, ModelError, NordialError
from .evaluation import (
    EvalReport,
    evaluate,
    per_label_metrics,
    render_confusion,
    render_report,
)
from .features import (
    FeatureConfig,
    FeatureSpace,
    FeatureVector,
    extract_ngrams,
    fit_feature_space,
    vectorize,
    vectorize_all,
)
from .harvest import (
    TermLexicon,
    default_lexicon,
    filter_candidates,
    load_lexicon,
    match_terms,
    tokenize,
)
from .models import (
    GridResult,
    GridSpec,
    MnbModel,
    SvmModel,
    grid_search,
    load_model,
    predict,
    predict_mnb,
    predict_svm,
    save_model,
    train_mnb,
    train_svm,
)

__version__ = "0.1.0"

__all__ = [
    "AgreementRecord", "AnalyticsError", "Corpus", "CorpusError", "CorpusStats",
    "EvalReport", "FeatureConfig", "FeatureSpace", "FeatureVector", "GridResult",
    "GridSpec", "LABELS", "Label", "LexiconError", "MnbModel", "ModelError",
    "NordialError", "SPLITS", "Split", "SvmModel", "TermLexicon", "TraitRanking",
    "TraitScore", "Tweet", "chi2_rank", "chi2_score", "chi2_sf", "cohen_kappa",
    "corpus_stats", "default_lexicon", "evaluate", "extract_ngrams",
    "filter_candidates", "fit_feature_space", "grid_search", "load_corpus",
    "load_lexicon", "load_model", "match_terms", "per_label_metrics", "predict",
    "predict_mnb", "predict_svm", "render_confusion", "render_report",
    "save_corpus", "save_model", "split_corpus", "tokenize", "train_mnb",
    "train_svm", "vectorize", "vectorize_all",
]
