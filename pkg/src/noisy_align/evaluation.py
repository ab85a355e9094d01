"""Retrieval evaluation, semantic-shift ranking and lexicon refinement.

Nearest-neighbor retrieval is an exact brute-force scan over the target
vocabulary under cosine similarity (Euclidean available behind a flag),
with ties broken deterministically by ascending token index.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict

import numpy as np

from .align import _as_matrix
from .io import EmbeddingSet, Lexicon
from .mixture import Responsibilities


@dataclass
class NnIndex:
    """Brute-force retrieval index over one embedding set.

    Columns are unit-normalized; zero vectors are excluded and their
    indices recorded.
    """

    emb: EmbeddingSet
    unit: np.ndarray
    excluded: list[int] = field(default_factory=list)


@dataclass
class EvalReport:
    """Summary metrics for one alignment run."""

    p_at_1: float = 0.0
    n_queries: int = 0
    test_error: float = 0.0
    iterations: int = 0
    noise_rate: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.p_at_1 <= 1.0:
            raise ValueError("p_at_1 must lie in [0, 1]")

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def build_index(emb: EmbeddingSet) -> NnIndex:
    """Precompute unit-normalized target columns for cosine retrieval."""
    norms = np.linalg.norm(emb.vectors, axis=0)
    excluded = [int(i) for i in np.flatnonzero(norms == 0)]
    safe = np.where(norms == 0, 1.0, norms)
    return NnIndex(emb=emb, unit=emb.vectors / safe, excluded=excluded)


def nearest_neighbor(index: NnIndex, q: np.ndarray, k: int,
                     metric: str = "cosine") -> list[tuple[str, float]]:
    """Top-k target tokens for a query vector, exact brute-force.

    Returns (token, score) pairs: cosine similarity (descending) or, with
    metric="euclidean", negative distance. Ties break toward the lower
    token index.
    """
    q = np.asarray(q, dtype=np.float64)
    if not np.isfinite(q).all():
        raise ValueError("query vector has non-finite entries")
    if metric == "cosine":
        qn = np.linalg.norm(q)
        if qn == 0:
            raise ValueError("zero query vector")
        scores = (q / qn) @ index.unit
        if index.excluded:
            scores[index.excluded] = -np.inf
    elif metric == "euclidean":
        scores = -np.linalg.norm(index.emb.vectors - q[:, None], axis=0)
    else:
        raise ValueError(f"unknown metric {metric!r}")
    # stable sort on -score keeps index order among ties
    order = np.argsort(-scores, kind="stable")[:k]
    return [(index.emb.tokens[i], float(scores[i])) for i in order]


def precision_at_1(Q, test_lex: Lexicon, src: EmbeddingSet, tgt: EmbeddingSet,
                   metric: str = "cosine") -> tuple[float, int]:
    """Precision@1 of mapped source words against their gold translations.

    Queries are the unique source indices of the test lexicon; a query is
    correct iff its retrieved top-1 token is any of its gold targets.

    Returns:
        (p_at_1, n_queries)
    """
    if not test_lex.pairs:
        raise ValueError("empty test lexicon")
    Qm = _as_matrix(Q)
    gold: dict[int, set[str]] = {}
    for s, t in test_lex.pairs:
        gold.setdefault(s, set()).add(tgt.tokens[t])
    index = build_index(tgt)
    correct = 0
    for s, targets in gold.items():
        pred = nearest_neighbor(index, Qm @ src.vectors[:, s], k=1, metric=metric)
        if pred and pred[0][0] in targets:
            correct += 1
    return correct / len(gold), len(gold)


def rank_semantic_shift(Q, identity_lex: Lexicon, src: EmbeddingSet,
                        tgt: EmbeddingSet,
                        src_freqs: dict[str, float] | None = None,
                        tgt_freqs: dict[str, float] | None = None,
                        threshold: float | None = None,
                        responsibilities: Responsibilities | None = None):
    """Rank shared-vocabulary tokens by post-alignment cosine distance.

    distance(token) = 1 - cos(Q x_token, y_token), sorted descending.
    With a frequency threshold, tokens below it in either table (or
    missing from one) are dropped after ranking.

    Returns:
        (ranking, n_dropped) where ranking is a list of
        (token, distance, label) and label comes from the hard EM
        decisions when responsibilities are given, else "".
    """
    Qm = _as_matrix(Q)
    rows = []
    dropped = 0
    for t, (i, j) in enumerate(identity_lex.pairs):
        token = identity_lex.src_tokens[t] if identity_lex.src_tokens else src.tokens[i]
        if threshold is not None:
            fs = (src_freqs or {}).get(token)
            ft = (tgt_freqs or {}).get(token)
            if fs is None or ft is None or fs < threshold or ft < threshold:
                dropped += 1
                continue
        x = Qm @ src.vectors[:, i]
        y = tgt.vectors[:, j]
        nx, ny = np.linalg.norm(x), np.linalg.norm(y)
        if nx == 0 or ny == 0:
            dist = 1.0
        else:
            dist = 1.0 - float(np.dot(x, y) / (nx * ny))
        label = ""
        if responsibilities is not None:
            label = "Aligned" if responsibilities.h[t] else "Noise"
        rows.append((token, dist, label))
    rows.sort(key=lambda r: (-r[1], r[0]))
    return rows, dropped


def shift_ranking_to_json(ranking) -> str:
    return json.dumps([[t, d, l] for t, d, l in ranking], indent=2)


def write_shift_ranking_tsv(ranking, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("token\tcosine_distance\tlabel\n")
        for token, dist, label in ranking:
            fh.write(f"{token}\t{dist:.6g}\t{label}\n")


def refine_lexicon(Q, src: EmbeddingSet, tgt: EmbeddingSet,
                   size_cap: int, metric: str = "cosine") -> Lexicon:
    """Induce a lexicon by nearest-neighbor translation of frequent words.

    Pairs each of the first size_cap source tokens (vocabulary order as a
    frequency proxy) with its nearest target under Q. Deterministic.
    """
    if size_cap < 1:
        raise ValueError("size_cap must be >= 1")
    Qm = _as_matrix(Q)
    index = build_index(tgt)
    pairs = []
    src_tokens = []
    tgt_tokens = []
    for i in range(min(size_cap, src.n)):
        pred = nearest_neighbor(index, Qm @ src.vectors[:, i], k=1, metric=metric)
        token = pred[0][0]
        pairs.append((i, tgt.token_index[token]))
        src_tokens.append(src.tokens[i])
        tgt_tokens.append(token)
    return Lexicon(pairs=pairs, src_tokens=src_tokens, tgt_tokens=tgt_tokens)
