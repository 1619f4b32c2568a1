"""Classifiers: a linear SVM trained from scratch, a bagged ensemble of
decision trees, and the one-dimensional logistic curve the remaining-count
estimator fits.

The SVM minimizes the L2-regularized hinge loss

    f(w, b) = 0.5 * (||w||^2 + b^2) + C * sum_i max(0, 1 - y_i (w.x_i + b))

by dual coordinate descent over an implicit bias-augmented design (the bias
is regularized like any other weight). The optimizer is deterministic given
the shuffle seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from numba import njit
from sklearn.tree import DecisionTreeClassifier


class DegenerateTrainingError(ValueError):
    """Training labels contain a single class."""


# ---------------------------------------------------------------------------
# linear SVM


@dataclass
class SvmConfig:
    C: float = 1.0
    tol: float = 1e-4
    max_passes: int = 1000
    seed: int = 0


@dataclass
class LinearModel:
    weights: np.ndarray  # one weight per vocabulary column
    bias: float
    config: SvmConfig
    passes: int = 0
    # dual variables, kept so survey iterations can warm-start retraining
    alpha: np.ndarray | None = field(default=None, repr=False)


@njit(cache=True)
def _dcd_epochs(indptr, indices, data, y, order, alpha, w, C, tol, max_passes):
    """Dual coordinate descent for the L1-loss (hinge) SVM, with active-set
    shrinking so tight tolerances stay cheap once most duals are at bounds.

    ``w`` has one extra trailing component: the regularized bias, paired
    with an implicit constant feature of value 1 on every row.
    """
    n = order.shape[0]
    nv = w.shape[0] - 1
    act = order.copy()
    n_active = n
    pgmax_old = 1e300
    pgmin_old = -1e300
    passes = 0
    while passes < max_passes:
        passes += 1
        pgmax = -1e300
        pgmin = 1e300
        k = 0
        while k < n_active:
            i = act[k]
            s = w[nv]  # implicit bias feature
            for j in range(indptr[i], indptr[i + 1]):
                s += w[indices[j]] * data[j]
            G = y[i] * s - 1.0
            a = alpha[i]
            if a <= 0.0:
                if G > pgmax_old:
                    n_active -= 1
                    act[k] = act[n_active]
                    act[n_active] = i
                    continue
                pg = G if G < 0.0 else 0.0
            elif a >= C:
                if G < pgmin_old:
                    n_active -= 1
                    act[k] = act[n_active]
                    act[n_active] = i
                    continue
                pg = G if G > 0.0 else 0.0
            else:
                pg = G
            if pg > pgmax:
                pgmax = pg
            if pg < pgmin:
                pgmin = pg
            if pg > 1e-12 or pg < -1e-12:
                q = 1.0  # bias feature contributes 1 to the row norm
                for j in range(indptr[i], indptr[i + 1]):
                    q += data[j] * data[j]
                anew = a - G / q
                if anew < 0.0:
                    anew = 0.0
                elif anew > C:
                    anew = C
                d = (anew - a) * y[i]
                if d != 0.0:
                    for j in range(indptr[i], indptr[i + 1]):
                        w[indices[j]] += d * data[j]
                    w[nv] += d
                    alpha[i] = anew
            k += 1
        if pgmax - pgmin <= tol:
            if n_active == n:
                break
            # optimum reached on the active set: confirm with everyone back in
            n_active = n
            pgmax_old = 1e300
            pgmin_old = -1e300
            continue
        pgmax_old = pgmax if pgmax > 0.0 else 1e300
        pgmin_old = pgmin if pgmin < 0.0 else -1e300
    return passes


def train_linear_svm(
    X: sp.csr_matrix,
    y,
    config: SvmConfig | None = None,
    warm: LinearModel | None = None,
) -> LinearModel:
    """Fit the linear SVM. ``y`` may be bools or {0,1}/{-1,+1} ints.

    ``warm`` restarts from a previous model whose training rows form a
    prefix of ``X`` with unchanged labels (the survey loop only appends).
    """
    config = config or SvmConfig()
    X = sp.csr_matrix(X)
    yy = np.where(np.asarray(y) > 0, 1.0, -1.0)
    if X.shape[0] != yy.shape[0]:
        raise ValueError(f"X has {X.shape[0]} rows but y has {yy.shape[0]} labels")
    if np.all(yy > 0) or np.all(yy < 0):
        raise DegenerateTrainingError("training data contains a single class")

    n, nv = X.shape
    w = np.zeros(nv + 1)
    alpha = np.zeros(n)
    if warm is not None and warm.alpha is not None and warm.alpha.shape[0] <= n:
        alpha[: warm.alpha.shape[0]] = warm.alpha
        w[:nv] = warm.weights
        w[nv] = warm.bias
    order = np.random.RandomState(config.seed % 2**32).permutation(n).astype(np.int64)
    passes = _dcd_epochs(
        X.indptr,
        X.indices,
        np.asarray(X.data, dtype=np.float64),
        yy,
        order,
        alpha,
        w,
        config.C,
        config.tol,
        config.max_passes,
    )
    return LinearModel(weights=w[:nv].copy(), bias=float(w[nv]), config=config, passes=int(passes), alpha=alpha)


def decision_function(model: LinearModel, X: sp.csr_matrix) -> np.ndarray:
    """Signed distance surrogate w.x + b, positive on the debt side."""
    if X.shape[1] != model.weights.shape[0]:
        raise ValueError(
            f"feature dimension mismatch: X has {X.shape[1]}, model has {model.weights.shape[0]}"
        )
    return np.asarray(X @ model.weights).ravel() + model.bias


def hinge_objective(model: LinearModel, X: sp.csr_matrix, y) -> float:
    """Primal objective value; used by tests to compare against oracles."""
    yy = np.where(np.asarray(y) > 0, 1.0, -1.0)
    margins = 1.0 - yy * decision_function(model, X)
    reg = 0.5 * (model.weights @ model.weights + model.bias**2)
    return float(reg + model.config.C * np.maximum(margins, 0.0).sum())


# ---------------------------------------------------------------------------
# bagged decision trees


class _ConstantTree:
    """Stand-in when a bagged sample holds a single class."""

    def __init__(self, label: int):
        self.label = int(label)

    def predict(self, X):
        return np.full(X.shape[0], self.label, dtype=np.int64)


@dataclass
class TreeEnsemble:
    trees: list
    sample_seeds: list[int]
    sample_fraction: float

    @property
    def k(self) -> int:
        return len(self.trees)


def train_ensemble(
    X: sp.csr_matrix,
    y,
    k: int = 9,
    sample_fraction: float = 0.9,
    seed: int = 0,
) -> TreeEnsemble:
    """Train ``k`` CART trees, each on an independent uniform sample
    (without replacement) of ``ceil(sample_fraction * rows)`` rows.

    Per-tree seeds are derived from the master seed by index, so trees can
    be reproduced (or trained concurrently) independently.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if not 0.0 < sample_fraction <= 1.0:
        raise ValueError("sample_fraction must be in (0, 1]")
    # single-class input is allowed: every tree simply becomes constant
    yy = np.asarray(y).astype(np.int64)
    X = sp.csr_matrix(X)
    n = X.shape[0]
    n_sample = math.ceil(sample_fraction * n)
    trees = []
    seeds = []
    for i in range(k):
        tree_seed = (seed * 1009 + i) % 2**32
        seeds.append(tree_seed)
        rng = np.random.RandomState(tree_seed)
        idx = rng.choice(n, size=n_sample, replace=False)
        ys = yy[idx]
        if ys.min() == ys.max():
            trees.append(_ConstantTree(ys[0]))
            continue
        tree = DecisionTreeClassifier(
            criterion="gini",
            max_depth=None,
            min_samples_split=2,
            random_state=tree_seed,
        )
        tree.fit(X[idx], ys)
        trees.append(tree)
    return TreeEnsemble(trees=trees, sample_seeds=seeds, sample_fraction=sample_fraction)


def ensemble_votes(ens: TreeEnsemble, X: sp.csr_matrix) -> np.ndarray:
    """Per-row count of ensemble members voting for the debt class."""
    votes = np.zeros(X.shape[0], dtype=np.int64)
    for tree in ens.trees:
        votes += np.asarray(tree.predict(X), dtype=np.int64)
    return votes


def ensemble_classify(ens: TreeEnsemble, X: sp.csr_matrix) -> np.ndarray:
    """Strict majority vote; split votes classify negative."""
    return ensemble_votes(ens, X) * 2 > ens.k


# ---------------------------------------------------------------------------
# scalar logistic curve


@dataclass
class LogisticCurve:
    slope: float
    intercept: float

    def predict(self, x) -> np.ndarray:
        z = np.clip(self.slope * np.asarray(x, dtype=np.float64) + self.intercept, -500, 500)
        p = 1.0 / (1.0 + np.exp(-z))
        return np.clip(p, 1e-12, 1.0 - 1e-12)


def fit_logistic(
    x,
    y,
    tol: float = 1e-6,
    max_iter: int = 100,
    slope_cap: float = 50.0,
) -> LogisticCurve:
    """Maximum-likelihood fit of sigmoid(slope*x + intercept) by Newton/IRLS.

    Perfectly separated inputs would send the slope to infinity; it is
    capped at ``slope_cap`` (the intercept keeps being optimized under the
    cap). Single-class input yields a near-constant curve at the clamped
    observed rate.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape[0] != y.shape[0]:
        raise ValueError("x and y lengths differ")
    if x.shape[0] < 2:
        raise ValueError("fit_logistic needs at least 2 points")
    eps = 1e-6
    rate = float(np.clip(y.mean(), eps, 1.0 - eps))
    if y.min() == y.max() or np.all(x == x[0]):
        return LogisticCurve(slope=0.0, intercept=float(np.log(rate / (1.0 - rate))))

    def nll(s: float, b: float) -> float:
        z = s * x + b
        return float(np.sum(np.logaddexp(0.0, z) - y * z))

    slope, intercept = 0.0, float(np.log(rate / (1.0 - rate)))
    current = nll(slope, intercept)
    for _ in range(max_iter):
        z = np.clip(slope * x + intercept, -500, 500)
        p = 1.0 / (1.0 + np.exp(-z))
        r = y - p
        g = np.array([r @ x, r.sum()])
        wgt = p * (1.0 - p) + 1e-12
        h11 = (wgt * x) @ x
        h12 = wgt @ x
        h22 = wgt.sum()
        pinned = (slope >= slope_cap and g[0] > 0) or (slope <= -slope_cap and g[0] < 0)
        if pinned:
            # likelihood pushes the slope past the cap: step the intercept only
            if abs(g[1]) <= tol:
                break
            ds, db = 0.0, g[1] / h22
        else:
            if float(np.linalg.norm(g)) <= tol:
                break
            det = h11 * h22 - h12 * h12
            if det <= 1e-300:
                h11 += 1e-8
                h22 += 1e-8
                det = h11 * h22 - h12 * h12
            ds = (h22 * g[0] - h12 * g[1]) / det
            db = (h11 * g[1] - h12 * g[0]) / det
        # damped Newton: halve the step until the likelihood stops worsening
        t = 1.0
        for _ in range(40):
            cand_s = float(np.clip(slope + t * ds, -slope_cap, slope_cap))
            cand_b = intercept + t * db
            cand = nll(cand_s, cand_b)
            if cand <= current + 1e-12:
                slope, intercept, current = cand_s, cand_b, cand
                break
            t *= 0.5
        else:
            break  # no productive step left
    return LogisticCurve(slope=float(slope), intercept=float(intercept))


def logistic_log_likelihood(curve: LogisticCurve, x, y) -> float:
    """Bernoulli log-likelihood; the test oracle compares fits with this."""
    p = curve.predict(x)
    y = np.asarray(y, dtype=np.float64)
    return float(np.sum(y * np.log(p) + (1.0 - y) * np.log(1.0 - p)))
