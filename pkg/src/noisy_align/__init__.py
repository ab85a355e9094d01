"""Noise-aware linear alignment between embedding spaces.

Learns a translation matrix Q mapping source vectors to target vectors
(y = Qx) from a lexicon of aligned pairs that may contain noisy entries.
Provides closed-form Orthogonal Procrustes, an SGD least-squares baseline,
and a two-component Gaussian-mixture EM that jointly learns Q and labels
each lexicon pair as aligned or noise.
"""

from .io import (
    EmbeddingSet,
    Lexicon,
    DataError,
    load_embeddings,
    save_embeddings,
    load_lexicon,
    build_identity_lexicon,
    gather_pairs,
    load_stoplist,
    load_frequency_table,
)
from .align import (
    TranslationMatrix,
    SgdConfig,
    procrustes,
    weighted_procrustes,
    sgd_align,
    random_orthogonal,
    alignment_error,
    save_matrix,
    load_matrix,
)
from .mixture import (
    AlignmentModel,
    Responsibilities,
    EmConfig,
    EmTrace,
    log_gaussian_iso,
    posterior,
    log_likelihood,
    initialize,
    em_fit,
    sample_generative,
    save_model,
    load_model,
    write_responsibilities_tsv,
)
from .evaluation import (
    NnIndex,
    EvalReport,
    build_index,
    nearest_neighbor,
    precision_at_1,
    rank_semantic_shift,
    refine_lexicon,
)
from .synthetic import SyntheticProblem, make_noisy_problem

__all__ = [
    "EmbeddingSet",
    "Lexicon",
    "DataError",
    "load_embeddings",
    "save_embeddings",
    "load_lexicon",
    "build_identity_lexicon",
    "gather_pairs",
    "load_stoplist",
    "load_frequency_table",
    "TranslationMatrix",
    "SgdConfig",
    "procrustes",
    "weighted_procrustes",
    "sgd_align",
    "random_orthogonal",
    "alignment_error",
    "save_matrix",
    "load_matrix",
    "AlignmentModel",
    "Responsibilities",
    "EmConfig",
    "EmTrace",
    "log_gaussian_iso",
    "posterior",
    "log_likelihood",
    "initialize",
    "em_fit",
    "sample_generative",
    "save_model",
    "load_model",
    "write_responsibilities_tsv",
    "NnIndex",
    "EvalReport",
    "build_index",
    "nearest_neighbor",
    "precision_at_1",
    "rank_semantic_shift",
    "refine_lexicon",
    "SyntheticProblem",
    "make_noisy_problem",
]
