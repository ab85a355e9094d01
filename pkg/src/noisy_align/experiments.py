"""End-to-end experiment drivers shared by the CLI and the demo scripts."""

from __future__ import annotations

import numpy as np

from .align import (
    SgdConfig,
    TranslationMatrix,
    alignment_error,
    procrustes,
    sgd_align,
)
from .mixture import EmConfig, em_fit
from .synthetic import make_noisy_problem

METHODS = ("op", "sgd", "em-hard", "em-soft")


def stable_sgd_config(X: np.ndarray, epochs: int = 200, seed: int = 0) -> SgdConfig:
    """Full-batch config with a step size safely below the divergence limit.

    Gradient descent on ||QX - Y||_F^2 contracts iff the step is below
    1 / (2 * lambda_max(X X^T)); 0.4 / lambda_max leaves a wide margin.
    """
    lam = float(np.linalg.norm(X @ X.T, ord=2))
    lr = 0.4 / max(lam, 1e-12)
    return SgdConfig(learning_rate=lr, epochs=epochs, batch_size=X.shape[1], seed=seed)


def fit_translation(method: str, X: np.ndarray, Y: np.ndarray,
                    sgd_cfg: SgdConfig | None = None,
                    em_cfg: EmConfig | None = None):
    """Fit one of the four methods.

    Returns:
        (TranslationMatrix, model, resp, trace); the last three are None
        for the non-EM methods.
    """
    if method == "op":
        return procrustes(X, Y), None, None, None
    if method == "sgd":
        cfg = sgd_cfg or stable_sgd_config(X)
        return sgd_align(X, Y, cfg), None, None, None
    if method in ("em-hard", "em-soft"):
        cfg = em_cfg or EmConfig()
        cfg = EmConfig(epsilon=cfg.epsilon, max_iters=cfg.max_iters,
                       mode="hard" if method == "em-hard" else "soft",
                       seed=cfg.seed)
        model, resp, trace = em_fit(X, Y, cfg)
        return model.Q, model, resp, trace
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def run_synthetic_2d(seed: int = 0, sgd_epochs: int = 3000) -> dict:
    """The 2D experiment: n=10 points, noise-free vs a single noisy pair.

    Fits op, sgd and em-hard on both variants and reports the alignment
    error restricted to the clean pairs, plus true/predicted coordinates
    of every point in the noisy variant for plotting.
    """
    report: dict = {"seed": seed, "n": 10, "d": 2}
    for variant, p in (("noise_free", 0.0), ("noisy", 0.1)):
        prob = make_noisy_problem(n=10, d=2, p=p, seed=seed)
        entry: dict = {"clean_error": {}, "noisy_index": [
            int(i) for i in np.flatnonzero(~prob.clean_mask)]}
        preds = {}
        for method in ("op", "sgd", "em-hard"):
            sgd_cfg = stable_sgd_config(prob.X, epochs=sgd_epochs, seed=seed)
            Q, _, resp, _ = fit_translation(method, prob.X, prob.Y, sgd_cfg=sgd_cfg)
            entry["clean_error"][method] = alignment_error(
                Q, prob.X, prob.Y, mask=prob.clean_mask)
            preds[method] = (Q.Q @ prob.X).tolist()
            if method == "em-hard" and resp is not None:
                entry["em_labels"] = [bool(b) for b in resp.h]
        entry["points"] = {"true": prob.Y.tolist(), "predicted": preds}
        report[variant] = entry
    return report


def run_noise_curve(n: int = 1000, d: int = 50,
                    levels=(0.0, 0.1, 0.2, 0.3, 0.4, 0.5),
                    test_n: int = 300, seeds=range(10),
                    methods=("op", "sgd", "em-hard")) -> list[tuple]:
    """Train/test error of each method as a function of the noise level.

    For every (level, seed) cell a planted noisy training problem and a
    clean test set under the same gold transform are built; train error
    is restricted to the clean training pairs.

    Returns:
        rows (method, p, seed, train_error, test_error), sorted.
    """
    for p in levels:
        if not 0.0 <= p < 1.0:
            raise ValueError(f"invalid noise level {p}")
    rows = []
    for p in levels:
        for seed in seeds:
            prob = make_noisy_problem(n=n, d=d, p=p, seed=seed)
            test_rng = np.random.default_rng([seed, 9173])
            X_test = test_rng.standard_normal((d, test_n))
            Y_test = prob.Q_gold.Q @ X_test
            for method in methods:
                Q, _, _, _ = fit_translation(method, prob.X, prob.Y)
                train_err = alignment_error(Q, prob.X, prob.Y, mask=prob.clean_mask)
                test_err = alignment_error(Q, X_test, Y_test)
                rows.append((method, float(p), int(seed), train_err, test_err))
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    return rows


def write_noise_curve_csv(rows, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("method,p,seed,train_error,test_error\n")
        for method, p, seed, tr, te in rows:
            fh.write(f"{method},{p},{seed},{tr:.10g},{te:.10g}\n")
