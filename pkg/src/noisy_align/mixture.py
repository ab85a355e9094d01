"""Noise-aware alignment via a two-component Gaussian mixture and EM.

Each lexicon pair (x_t, y_t) is modeled as drawn from an aligned component
N(Qx_t, sigma2*I) with prior alpha, or a noise component N(mu_y, sigma_y2*I)
with prior 1-alpha. EM (hard or soft assignments) jointly fits the
orthogonal map Q, the component parameters, and per-pair responsibilities.
All densities are evaluated in log space; at d=300 the linear-space
Gaussian underflows.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .align import (
    TranslationMatrix,
    alignment_error,
    procrustes,
    weighted_procrustes,
    _as_matrix,
)
from .io import Lexicon

VAR_FLOOR = 1e-12
LOG_2PI = float(np.log(2.0 * np.pi))


@dataclass
class AlignmentModel:
    """Fitted mixture: orthogonal map Q plus component parameters."""

    Q: TranslationMatrix
    sigma2: float
    mu_y: np.ndarray
    sigma_y2: float
    alpha: float

    def __post_init__(self):
        self.mu_y = np.asarray(self.mu_y, dtype=np.float64)
        if self.sigma2 <= 0 or self.sigma_y2 <= 0:
            raise ValueError("component variances must be positive")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if not self.Q.orthogonal:
            raise ValueError("Q must be orthogonal")

    @property
    def dim(self) -> int:
        return self.Q.dim


@dataclass
class Responsibilities:
    """Per-pair posterior weights, hard labels and aligned count."""

    w: np.ndarray
    h: np.ndarray
    n1: int

    def __post_init__(self):
        self.w = np.asarray(self.w, dtype=np.float64)
        self.h = np.asarray(self.h, dtype=bool)
        if self.w.shape != self.h.shape:
            raise ValueError("w and h must have the same length")
        if np.any(self.w < 0) or np.any(self.w > 1):
            raise ValueError("responsibilities must lie in [0, 1]")
        if self.n1 != int(self.h.sum()):
            raise ValueError("n1 must equal the number of true hard labels")


@dataclass
class EmConfig:
    """EM driver settings; epsilon=None selects max(1/(2n), 1e-4)."""

    epsilon: float | None = None
    max_iters: int = 100
    mode: str = "hard"
    seed: int = 0

    def __post_init__(self):
        if self.epsilon is not None and self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.mode not in ("hard", "soft"):
            raise ValueError(f"mode must be 'hard' or 'soft', got {self.mode!r}")


@dataclass
class EmTrace:
    """Per-iteration (alpha, objective, n1) records."""

    steps: list[tuple[float, float, int]] = field(default_factory=list)
    converged: bool = False
    degenerate_iters: list[int] = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return len(self.steps)


def log_gaussian_iso(y: np.ndarray, mean: np.ndarray, var: float) -> float:
    """Log density of an isotropic Gaussian N(mean, var*I) at y."""
    if var <= 0:
        raise ValueError("variance must be positive")
    y = np.asarray(y, dtype=np.float64)
    mean = np.asarray(mean, dtype=np.float64)
    d = y.shape[0]
    sq = float(np.sum((y - mean) ** 2))
    return -0.5 * d * (LOG_2PI + float(np.log(var))) - sq / (2.0 * var)


def _component_logdensities(model: AlignmentModel, X: np.ndarray, Y: np.ndarray):
    """Per-column log densities of both components, vectorized."""
    d = X.shape[0]
    r_aligned = np.sum((model.Q.Q @ X - Y) ** 2, axis=0)
    r_noise = np.sum((Y - model.mu_y[:, None]) ** 2, axis=0)
    la = -0.5 * d * (LOG_2PI + np.log(model.sigma2)) - r_aligned / (2.0 * model.sigma2)
    ln = -0.5 * d * (LOG_2PI + np.log(model.sigma_y2)) - r_noise / (2.0 * model.sigma_y2)
    return la, ln


def _posterior_weights(model: AlignmentModel, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Posterior aligned probabilities w_t for every column pair."""
    n = X.shape[1]
    if model.alpha == 0.0:
        return np.zeros(n)
    if model.alpha == 1.0:
        return np.ones(n)
    la, ln = _component_logdensities(model, X, Y)
    la = la + np.log(model.alpha)
    ln = ln + np.log1p(-model.alpha)
    return np.exp(la - np.logaddexp(la, ln))


def posterior(model: AlignmentModel, x: np.ndarray, y: np.ndarray) -> float:
    """Posterior probability that the pair (x, y) is aligned."""
    x = np.asarray(x, dtype=np.float64).reshape(-1, 1)
    y = np.asarray(y, dtype=np.float64).reshape(-1, 1)
    return float(_posterior_weights(model, x, y)[0])


def log_likelihood(model: AlignmentModel, X: np.ndarray, Y: np.ndarray) -> float:
    """Marginal log-likelihood sum_t log f(y_t | x_t) of the mixture."""
    la, ln = _component_logdensities(model, X, Y)
    if model.alpha == 0.0:
        return float(np.sum(ln))
    if model.alpha == 1.0:
        return float(np.sum(la))
    return float(np.sum(np.logaddexp(la + np.log(model.alpha),
                                     ln + np.log1p(-model.alpha))))


def initialize(X: np.ndarray, Y: np.ndarray) -> AlignmentModel:
    """Initial model: Procrustes on the full lexicon, dataset moments, alpha=0.5.

    sigma2 is the mean squared residual per coordinate of the initial Q;
    the noise component takes the mean and (isotropic) variance of Y.
    Variances are floored at VAR_FLOOR so perfect-fit data stays defined.
    """
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    d, n = X.shape
    if n < 2:
        raise ValueError("need at least 2 pairs to initialize the mixture")
    Q = procrustes(X, Y)
    sigma2 = max(alignment_error(Q, X, Y) / (n * d), VAR_FLOOR)
    mu_y = Y.mean(axis=1)
    sigma_y2 = max(float(np.sum((Y - mu_y[:, None]) ** 2)) / (n * d), VAR_FLOOR)
    return AlignmentModel(Q=Q, sigma2=sigma2, mu_y=mu_y, sigma_y2=sigma_y2, alpha=0.5)


def _complete_data_objective(model: AlignmentModel, X, Y, h: np.ndarray) -> float:
    """Joint log-likelihood of data and hard assignments h."""
    la, ln = _component_logdensities(model, X, Y)
    n1 = int(h.sum())
    n0 = h.size - n1
    obj = float(la[h].sum() + ln[~h].sum())
    if n1 and model.alpha > 0:
        obj += n1 * float(np.log(model.alpha))
    if n0 and model.alpha < 1:
        obj += n0 * float(np.log1p(-model.alpha))
    return obj


def em_fit(X: np.ndarray, Y: np.ndarray, cfg: EmConfig | None = None):
    """Fit the noise-aware mixture by EM.

    Hard mode thresholds posteriors at 0.5 (ties count as noise) and
    refits Q by Procrustes on the aligned subset; soft mode keeps the
    posterior weights and uses weighted Procrustes and weighted moments.
    Iterates until |alpha_curr - alpha_prev| <= epsilon or max_iters.

    When an iteration leaves a component empty (n1=0 or n1=n, or all
    weight on one side in soft mode), that component's parameters are
    frozen at their previous values and the iteration is recorded in
    trace.degenerate_iters.

    Returns:
        (AlignmentModel, Responsibilities, EmTrace)
    """
    cfg = cfg or EmConfig()
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    d, n = X.shape
    if n < 2:
        raise ValueError("need at least 2 pairs")
    eps = cfg.epsilon if cfg.epsilon is not None else max(1.0 / (2 * n), 1e-4)

    model = initialize(X, Y)
    trace = EmTrace()
    resp = Responsibilities(w=np.ones(n), h=np.ones(n, dtype=bool), n1=n)
    alpha_prev = np.inf
    for it in range(cfg.max_iters):
        if abs(model.alpha - alpha_prev) <= eps:
            trace.converged = True
            break
        alpha_prev = model.alpha

        w = _posterior_weights(model, X, Y)
        h = w > 0.5
        n1 = int(h.sum())
        resp = Responsibilities(w=w, h=h, n1=n1)

        if cfg.mode == "hard":
            degenerate = n1 == 0 or n1 == n
            Q, sigma2 = model.Q, model.sigma2
            mu_y, sigma_y2 = model.mu_y, model.sigma_y2
            if n1 > 0:
                Q = procrustes(X[:, h], Y[:, h])
                sigma2 = max(alignment_error(Q, X[:, h], Y[:, h]) / (d * n1), VAR_FLOOR)
            if n1 < n:
                mu_y = Y[:, ~h].mean(axis=1)
                sigma_y2 = max(
                    float(np.sum((Y[:, ~h] - mu_y[:, None]) ** 2)) / (d * (n - n1)),
                    VAR_FLOOR,
                )
            alpha = n1 / n
            model = AlignmentModel(Q=Q, sigma2=sigma2, mu_y=mu_y,
                                   sigma_y2=sigma_y2, alpha=alpha)
            objective = _complete_data_objective(model, X, Y, h)
        else:
            s1, s0 = float(w.sum()), float((1.0 - w).sum())
            degenerate = s1 <= VAR_FLOOR or s0 <= VAR_FLOOR
            Q, sigma2 = model.Q, model.sigma2
            mu_y, sigma_y2 = model.mu_y, model.sigma_y2
            if s1 > VAR_FLOOR:
                Q = weighted_procrustes(X, Y, w)
                r = np.sum((Q.Q @ X - Y) ** 2, axis=0)
                sigma2 = max(float(np.dot(w, r)) / (d * s1), VAR_FLOOR)
            if s0 > VAR_FLOOR:
                mu_y = (Y @ (1.0 - w)) / s0
                r0 = np.sum((Y - mu_y[:, None]) ** 2, axis=0)
                sigma_y2 = max(float(np.dot(1.0 - w, r0)) / (d * s0), VAR_FLOOR)
            alpha = s1 / n
            model = AlignmentModel(Q=Q, sigma2=sigma2, mu_y=mu_y,
                                   sigma_y2=sigma_y2, alpha=alpha)
            objective = log_likelihood(model, X, Y)

        if degenerate:
            trace.degenerate_iters.append(it)
        trace.steps.append((model.alpha, objective, n1))
    else:
        trace.converged = abs(model.alpha - alpha_prev) <= eps

    return model, resp, trace


def sample_generative(model: AlignmentModel, X: np.ndarray, seed: int):
    """Sample Y columns from the generative mixture given source columns X.

    Returns:
        (Y, z) where z[t] is True when column t came from the aligned
        component. Deterministic per seed.
    """
    X = np.asarray(X, dtype=np.float64)
    d, n = X.shape
    rng = np.random.default_rng(seed)
    z = rng.random(n) < model.alpha
    Y = np.empty((d, n))
    mapped = model.Q.Q @ X
    noise = rng.standard_normal((d, n))
    sig_a = float(np.sqrt(model.sigma2))
    sig_n = float(np.sqrt(model.sigma_y2))
    Y[:, z] = mapped[:, z] + sig_a * noise[:, z]
    Y[:, ~z] = model.mu_y[:, None] + sig_n * noise[:, ~z]
    return Y, z


def save_model(model: AlignmentModel, path) -> None:
    """Persist a fitted model as text (Q block, then scalar/vector lines)."""
    d = model.dim
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{d}\n")
        for row in model.Q.Q:
            fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")
        fh.write(f"sigma2 {model.sigma2:.17g}\n")
        fh.write("mu_y " + " ".join(f"{v:.17g}" for v in model.mu_y) + "\n")
        fh.write(f"sigma_y2 {model.sigma_y2:.17g}\n")
        fh.write(f"alpha {model.alpha:.17g}\n")


def load_model(path) -> AlignmentModel:
    """Load a model saved by `save_model`."""
    with open(path, encoding="utf-8") as fh:
        d = int(fh.readline().split()[0])
        Q = np.stack([np.array(fh.readline().split(), dtype=np.float64)
                      for _ in range(d)])
        fields = {}
        for line in fh:
            parts = line.split()
            if parts:
                fields[parts[0]] = np.array(parts[1:], dtype=np.float64)
    return AlignmentModel(
        Q=TranslationMatrix(Q, orthogonal=True),
        sigma2=float(fields["sigma2"][0]),
        mu_y=fields["mu_y"],
        sigma_y2=float(fields["sigma_y2"][0]),
        alpha=float(fields["alpha"][0]),
    )


def write_responsibilities_tsv(resp: Responsibilities, lex: Lexicon | None, path) -> None:
    """Export per-pair decisions as TSV: index, tokens, weight, Aligned/Noise."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("pair_index\tsrc_token\ttgt_token\tw\tlabel\n")
        for t in range(resp.w.size):
            if lex is not None and lex.src_tokens and lex.tgt_tokens:
                s, g = lex.src_tokens[t], lex.tgt_tokens[t]
            elif lex is not None:
                s, g = str(lex.pairs[t][0]), str(lex.pairs[t][1])
            else:
                s, g = str(t), str(t)
            label = "Aligned" if resp.h[t] else "Noise"
            fh.write(f"{t}\t{s}\t{g}\t{resp.w[t]:.6g}\t{label}\n")
