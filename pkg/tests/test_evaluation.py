import numpy as np
import pytest

from noisy_align.align import random_orthogonal
from noisy_align.evaluation import (
    EvalReport,
    build_index,
    nearest_neighbor,
    precision_at_1,
    rank_semantic_shift,
    refine_lexicon,
)
from noisy_align.io import EmbeddingSet, Lexicon, build_identity_lexicon
from noisy_align.mixture import Responsibilities


def make_set(tokens, vectors):
    vectors = np.asarray(vectors, dtype=float)
    return EmbeddingSet(dim=vectors.shape[0], tokens=list(tokens), vectors=vectors)


def random_set(n_tokens, d, seed, prefix="w"):
    rng = np.random.default_rng(seed)
    return make_set([f"{prefix}{i}" for i in range(n_tokens)],
                    rng.standard_normal((d, n_tokens)))


class TestNearestNeighbor:
    def test_exact_column_is_top(self):
        emb = random_set(8, 4, seed=0)
        index = build_index(emb)
        out = nearest_neighbor(index, emb.vectors[:, 3], k=2)
        assert out[0] == ("w3", pytest.approx(1.0))

    def test_tie_break_by_index_order(self):
        emb = make_set(["a", "b", "c"],
                       np.array([[1.0, 1.0, 1.0], [0.0, 0.0, 0.0]]))
        out = nearest_neighbor(build_index(emb), np.array([0.0, 1.0]), k=3)
        assert [t for t, _ in out] == ["a", "b", "c"]
        assert all(s == pytest.approx(0.0) for _, s in out)

    @pytest.mark.parametrize("seed", range(10))
    def test_full_sort_oracle(self, seed):
        rng = np.random.default_rng(seed)
        emb = random_set(30, 5, seed=seed)
        q = rng.standard_normal(5)
        got = nearest_neighbor(build_index(emb), q, k=30)
        sims = emb.vectors.T @ (q / np.linalg.norm(q))
        sims = sims / np.linalg.norm(emb.vectors, axis=0)
        order = sorted(range(30), key=lambda i: (-sims[i], i))
        assert [t for t, _ in got] == [emb.tokens[i] for i in order]

    def test_zero_query_rejected(self):
        with pytest.raises(ValueError, match="zero"):
            nearest_neighbor(build_index(random_set(3, 2, 0)), np.zeros(2), k=1)

    def test_zero_target_column_excluded(self):
        emb = make_set(["zero", "x"], np.array([[0.0, 1.0], [0.0, 0.0]]))
        index = build_index(emb)
        assert index.excluded == [0]
        out = nearest_neighbor(index, np.array([1.0, 0.0]), k=2)
        assert out[0][0] == "x"

    def test_euclidean_metric(self):
        emb = make_set(["near", "far"], np.array([[1.0, 10.0], [0.0, 0.0]]))
        out = nearest_neighbor(build_index(emb), np.array([2.0, 0.0]), k=1,
                               metric="euclidean")
        assert out[0][0] == "near"


class TestPrecisionAt1:
    def test_identity_alignment(self):
        emb = random_set(10, 4, seed=1)
        lex = build_identity_lexicon(emb, emb)
        p, n = precision_at_1(np.eye(4), lex, emb, emb)
        assert p == 1.0 and n == 10

    def test_multi_translation_credit(self):
        src = make_set(["dog"], np.array([[1.0], [0.0]]))
        tgt = make_set(["cane", "cani", "altro"],
                       np.array([[1.0, 0.9, -1.0], [0.0, 0.1, 0.0]]))
        lex = Lexicon(pairs=[(0, 0), (0, 1)])
        p, n = precision_at_1(np.eye(2), lex, src, tgt)
        assert p == 1.0 and n == 1  # "cane" retrieved, counts once

    def test_hand_enumeration_three_words(self):
        src = make_set(["a", "b", "c"], np.eye(3))
        tgt = make_set(["ta", "tb", "tc"],
                       np.array([[1.0, 0.0, 0.0],
                                 [0.0, 0.0, 1.0],
                                 [0.0, 1.0, 0.0]]))
        lex = Lexicon(pairs=[(0, 0), (1, 1), (2, 2)])
        # identity map: a->ta correct, b retrieves tc, c retrieves tb
        p, n = precision_at_1(np.eye(3), lex, src, tgt)
        assert p == pytest.approx(1 / 3) and n == 3

    def test_invariant_to_target_rescaling_and_order(self):
        rng = np.random.default_rng(2)
        src = random_set(8, 3, seed=2)
        tgt = random_set(8, 3, seed=3, prefix="t")
        Q = random_orthogonal(3, 4).Q
        pairs = [(i, (i * 3) % 8) for i in range(8)]
        base, _ = precision_at_1(Q, Lexicon(pairs=pairs), src, tgt)
        scaled = make_set(tgt.tokens, tgt.vectors * rng.uniform(0.1, 5.0, 8))
        shuffled = Lexicon(pairs=[pairs[i] for i in rng.permutation(8)])
        assert precision_at_1(Q, shuffled, src, scaled)[0] == base

    def test_empty_lexicon(self):
        emb = random_set(3, 2, 0)
        with pytest.raises(ValueError, match="empty"):
            precision_at_1(np.eye(2), Lexicon(pairs=[]), emb, emb)


class TestRankSemanticShift:
    def test_exact_token_ranks_last_with_zero_distance(self):
        emb = random_set(6, 4, seed=5)
        Q = random_orthogonal(4, 6)
        tgt = make_set(emb.tokens, Q.Q @ emb.vectors)
        tgt.vectors[:, 2] = np.random.default_rng(7).standard_normal(4)
        lex = build_identity_lexicon(emb, tgt)
        ranking, dropped = rank_semantic_shift(Q, lex, emb, tgt)
        assert dropped == 0
        assert ranking[0][0] == "w2"
        assert ranking[-1][1] == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("seed", range(10))
    def test_planted_shift_tops_ranking(self, seed):
        rng = np.random.default_rng(seed)
        src = random_set(1000, 10, seed=seed)
        Q = random_orthogonal(10, seed)
        vectors = Q.Q @ src.vectors
        planted = int(rng.integers(1000))
        vectors[:, planted] = rng.standard_normal(10)
        tgt = make_set(src.tokens, vectors)
        ranking, _ = rank_semantic_shift(Q, build_identity_lexicon(src, tgt),
                                         src, tgt)
        assert ranking[0][0] == f"w{planted}"

    def test_frequency_filter_drops_missing_and_rare(self):
        emb = random_set(4, 3, seed=8)
        lex = build_identity_lexicon(emb, emb)
        freqs = {"w0": 0.1, "w1": 1e-7, "w2": 0.2}  # w3 missing
        ranking, dropped = rank_semantic_shift(
            np.eye(3), lex, emb, emb, src_freqs=freqs, tgt_freqs=freqs,
            threshold=1e-5)
        assert dropped == 2
        assert {t for t, _, _ in ranking} == {"w0", "w2"}

    def test_noise_labels_attached(self):
        emb = random_set(3, 2, seed=9)
        lex = build_identity_lexicon(emb, emb)
        resp = Responsibilities(w=np.array([0.9, 0.1, 0.8]),
                                h=np.array([True, False, True]), n1=2)
        ranking, _ = rank_semantic_shift(np.eye(2), lex, emb, emb,
                                         responsibilities=resp)
        labels = {t: l for t, _, l in ranking}
        assert labels["w1"] == "Noise" and labels["w0"] == "Aligned"

    def test_distances_rotation_invariant(self):
        src = random_set(20, 5, seed=10)
        tgt = random_set(20, 5, seed=11, prefix="w")
        Q = random_orthogonal(5, 12)
        R = random_orthogonal(5, 13).Q
        lex = build_identity_lexicon(src, tgt)
        base, _ = rank_semantic_shift(Q, lex, src, tgt)
        rot_src = make_set(src.tokens, src.vectors)
        rot_tgt = make_set(tgt.tokens, R @ tgt.vectors)
        rotated, _ = rank_semantic_shift(R @ Q.Q, lex, rot_src, rot_tgt)
        for (t1, d1, _), (t2, d2, _) in zip(base, rotated):
            assert t1 == t2
            assert d1 == pytest.approx(d2, abs=1e-9)


class TestRefineLexicon:
    def test_identity_spaces_give_identity_pairs(self):
        emb = random_set(10, 4, seed=14)
        lex = refine_lexicon(np.eye(4), emb, emb, size_cap=10)
        assert lex.pairs == [(i, i) for i in range(10)]

    def test_size_cap_one(self):
        emb = random_set(5, 3, seed=15)
        lex = refine_lexicon(np.eye(3), emb, emb, size_cap=1)
        assert lex.pairs == [(0, 0)]

    def test_brute_force_table(self):
        rng = np.random.default_rng(16)
        src = random_set(20, 4, seed=16)
        tgt = random_set(25, 4, seed=17, prefix="t")
        Q = random_orthogonal(4, 18).Q
        lex = refine_lexicon(Q, src, tgt, size_cap=20)
        unit = tgt.vectors / np.linalg.norm(tgt.vectors, axis=0)
        for i, (s, t) in enumerate(lex.pairs):
            q = Q @ src.vectors[:, i]
            sims = (q / np.linalg.norm(q)) @ unit
            assert t == int(np.argmax(sims))

    def test_invalid_cap(self):
        emb = random_set(3, 2, seed=19)
        with pytest.raises(ValueError):
            refine_lexicon(np.eye(2), emb, emb, size_cap=0)


def test_eval_report_json_keys():
    report = EvalReport(p_at_1=0.5, n_queries=10, test_error=1.25,
                        iterations=7, noise_rate=0.1)
    import json
    data = json.loads(report.to_json())
    assert set(data) == {"p_at_1", "n_queries", "test_error", "iterations",
                         "noise_rate"}


def test_eval_report_validates_range():
    with pytest.raises(ValueError):
        EvalReport(p_at_1=1.5)
