"""Support vector machines trained by sequential minimal optimization.

The binary solver works on the dual

    min  f(a) = 1/2 a'Qa - e'a,   0 <= a_t <= C,   y'a = 0,   Q_st = y_s y_t K(x_s, x_t)

and picks each working pair with second-order information: ``i`` maximizes
``-y_t grad_t`` over the "up" set and ``j`` maximizes the guaranteed
objective decrease among the "low" candidates. It stops when the maximal
KKT violation ``m(a) - M(a)`` drops below ``tol``.

Multiclass problems are reduced one-vs-one.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.spatial.distance import cdist

logger = logging.getLogger(__name__)

TAU = 1e-12


def kernel_matrix(A: np.ndarray, B: np.ndarray, kind: str, gamma: float) -> np.ndarray:
    if kind == "linear":
        return A @ B.T
    if kind == "rbf":
        return np.exp(-gamma * cdist(A, B, "sqeuclidean"))
    raise ValueError(f"unknown kernel {kind!r}")


@dataclass
class SMOResult:
    alpha: np.ndarray
    rho: float
    iterations: int
    converged: bool
    gap: float
    objective: list[float] = field(default_factory=list)  # dual objective per iteration, if recorded


def smo(K: np.ndarray, y: np.ndarray, C: float = 1.0, tol: float = 1e-3,
        max_iter: int | None = None, record: bool = False) -> SMOResult:
    """Solve the binary soft-margin dual for labels ``y`` in {-1, +1}.

    ``objective`` (when ``record``) holds ``e'a - 1/2 a'Qa`` after every
    update; it never decreases.
    """
    y = np.asarray(y, dtype=float)
    n = len(y)
    if max_iter is None:
        max_iter = max(10_000_000, 100 * n)
    diag = np.diag(K).copy()
    alpha = np.zeros(n)
    grad = -np.ones(n)
    history = [0.0] if record else []
    pos = y > 0
    it = 0
    gap = np.inf
    converged = False
    while it < max_iter:
        at_upper = alpha >= C
        at_lower = alpha <= 0
        up = np.where(pos, ~at_upper, ~at_lower)
        low = np.where(pos, ~at_lower, ~at_upper)
        score = -y * grad
        if not up.any() or not low.any():
            gap = 0.0
            converged = True
            break
        up_score = np.where(up, score, -np.inf)
        i = int(np.argmax(up_score))
        m_val = up_score[i]
        low_score = np.where(low, score, np.inf)
        gap = m_val - low_score.min()
        if gap < tol:
            converged = True
            break
        b = m_val - score
        cand = low & (b > 0)
        a = diag[i] + diag - 2.0 * K[i]
        a = np.where(a > 0, a, TAU)
        gain = np.where(cand, b * b / a, -np.inf)
        j = int(np.argmax(gain))
        # direction d_i = y_i, d_j = -y_j keeps y'a fixed
        room_i = C - alpha[i] if y[i] > 0 else alpha[i]
        room_j = alpha[j] if y[j] > 0 else C - alpha[j]
        step = min(b[j] / a[j], room_i, room_j)
        old_i, old_j = alpha[i], alpha[j]
        if step >= room_i:
            alpha[i] = C if y[i] > 0 else 0.0
        else:
            alpha[i] = old_i + step * y[i]
        if step >= room_j:
            alpha[j] = 0.0 if y[j] > 0 else C
        else:
            alpha[j] = old_j - step * y[j]
        di, dj = alpha[i] - old_i, alpha[j] - old_j
        grad += y * (K[i] * (y[i] * di) + K[j] * (y[j] * dj))
        it += 1
        if record:
            history.append(float(-0.5 * alpha @ (grad - 1.0)))
    if not converged:
        logger.warning("SMO stopped after %d iterations with KKT gap %.3g", it, gap)
    return SMOResult(alpha, _rho(alpha, grad, y, C), it, converged, float(gap), history)


def _rho(alpha, grad, y, C) -> float:
    yg = y * grad
    free = (alpha > 0) & (alpha < C)
    if free.any():
        return float(yg[free].mean())
    at_upper = alpha >= C
    at_lower = alpha <= 0
    pos = y > 0
    ub_mask = (pos & at_lower) | (~pos & at_upper)
    lb_mask = (pos & at_upper) | (~pos & at_lower)
    ub = yg[ub_mask].min() if ub_mask.any() else np.inf
    lb = yg[lb_mask].max() if lb_mask.any() else -np.inf
    if not np.isfinite(ub) or not np.isfinite(lb):
        return float(ub if np.isfinite(ub) else lb)
    return float((ub + lb) / 2)


def kkt_violation(K: np.ndarray, y: np.ndarray, alpha: np.ndarray, C: float) -> float:
    """Maximal violating-pair gap ``m(a) - M(a)`` recomputed from scratch."""
    y = np.asarray(y, dtype=float)
    grad = y * (K @ (alpha * y)) - 1.0
    pos = y > 0
    up = np.where(pos, alpha < C, alpha > 0)
    low = np.where(pos, alpha > 0, alpha < C)
    score = -y * grad
    if not up.any() or not low.any():
        return 0.0
    return float(score[up].max() - score[low].min())


@dataclass(frozen=True)
class BinarySVM:
    support: np.ndarray  # support vectors (rows)
    coef: np.ndarray  # alpha_t * y_t for each support vector
    rho: float

    def decision(self, K_query: np.ndarray) -> np.ndarray:
        return K_query @ self.coef - self.rho


@dataclass(frozen=True)
class SVMModel:
    kernel: str
    gamma: float
    n_classes: int
    pairs: tuple[tuple[int, int], ...]
    machines: tuple[BinarySVM, ...]

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        """One column per class pair; positive favours the first class."""
        cols = []
        for svm in self.machines:
            if len(svm.coef) == 0:
                cols.append(np.full(len(X), -svm.rho))
            else:
                cols.append(svm.decision(kernel_matrix(X, svm.support, self.kernel, self.gamma)))
        return np.column_stack(cols)

    def predict_codes(self, X: np.ndarray) -> np.ndarray:
        """One-vs-one voting; vote ties go to the larger summed decision value."""
        dec = self.decision_function(X)
        votes = np.zeros((len(X), self.n_classes))
        margin = np.zeros((len(X), self.n_classes))
        for col, (a, b) in enumerate(self.pairs):
            d = dec[:, col]
            win_a = d > 0
            votes[:, a] += win_a
            votes[:, b] += ~win_a
            margin[:, a] += d
            margin[:, b] -= d
        tied = votes == votes.max(axis=1, keepdims=True)
        return np.argmax(np.where(tied, margin, -np.inf), axis=1)

    def to_dict(self) -> dict:
        return {
            "kernel": self.kernel,
            "gamma": self.gamma,
            "n_classes": self.n_classes,
            "pairs": [list(p) for p in self.pairs],
            "machines": [
                {"support": m.support.tolist(), "coef": m.coef.tolist(), "rho": m.rho}
                for m in self.machines
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SVMModel":
        machines = []
        for m in d["machines"]:
            coef = np.array(m["coef"], dtype=float)
            support = np.array(m["support"], dtype=float).reshape(len(coef), -1)
            machines.append(BinarySVM(support, coef, m["rho"]))
        return cls(d["kernel"], d["gamma"], d["n_classes"],
                   tuple(tuple(p) for p in d["pairs"]), tuple(machines))


def resolve_gamma(gamma, X: np.ndarray) -> float:
    """``"scale"`` means ``1 / (n_features * X.var())``."""
    if gamma == "scale":
        var = X.var()
        return 1.0 / (X.shape[1] * var) if var > 0 else 1.0
    gamma = float(gamma)
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    return gamma


def fit_svm(X: np.ndarray, codes: np.ndarray, n_classes: int, kernel: str = "rbf",
            C: float = 1.0, gamma="scale", tol: float = 1e-3,
            max_iter: int | None = None) -> SVMModel:
    gamma_value = resolve_gamma(gamma, X) if kernel == "rbf" else 0.0
    pairs = tuple(combinations(range(n_classes), 2))
    machines = []
    for a, b in pairs:
        mask = (codes == a) | (codes == b)
        Xp = X[mask]
        yp = np.where(codes[mask] == a, 1.0, -1.0)
        K = kernel_matrix(Xp, Xp, kernel, gamma_value)
        res = smo(K, yp, C=C, tol=tol, max_iter=max_iter)
        sv = res.alpha > 0
        machines.append(BinarySVM(Xp[sv], (res.alpha * yp)[sv], res.rho))
    return SVMModel(kernel, gamma_value, n_classes, pairs, tuple(machines))
