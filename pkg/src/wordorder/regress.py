"""Linear and logistic predictors of gradient word-order values.

Language-vector dimensions usually exceed the number of languages, so
the least-squares fit returns the minimum-norm solution rather than
inverting a singular normal matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from .dataset import discretize
from .vectors import RegressionDataset

LINEAR = "linear"
LOGISTIC = "logistic"
LOGISTIC_DISCRETE = "logistic-discrete"

REPORT_HEADER = "feature\tvector_source\tmodel\tmse\tr2\tn_train\tn_test\tseed"

_P_LO = np.finfo(float).tiny
_P_HI = np.nextafter(1.0, 0.0)


class RegressionError(ValueError):
    pass


@dataclass
class LinearModel:
    beta: np.ndarray
    intercept: float


@dataclass
class LogisticModel:
    beta: np.ndarray
    beta0: float
    lam: float
    iterations_run: int
    converged: bool
    loss_history: list[float] = field(default_factory=list, repr=False)


@dataclass(frozen=True)
class LogisticParams:
    lam: float = 1.0
    max_iter: int = 10_000
    tol: float = 1e-6


@dataclass(frozen=True)
class SplitConfig:
    train_fraction: float = 0.8
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise RegressionError(f"train_fraction must be in (0, 1), got {self.train_fraction}")


@dataclass(frozen=True)
class EvalReport:
    feature: str
    vector_source: str
    model_kind: str
    mse: float
    r2: float | None
    n_train: int
    n_test: int
    seed: int

    def tsv_line(self) -> str:
        r2 = "-" if self.r2 is None else format(self.r2, ".10g")
        return "\t".join([self.feature, self.vector_source, self.model_kind, format(self.mse, ".10g"),
                          r2, str(self.n_train), str(self.n_test), str(self.seed)])


def _check_xy(X, y) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2:
        raise RegressionError("X must be a 2-d matrix")
    if X.shape[0] == 0:
        raise RegressionError("empty training set")
    if y.shape != (X.shape[0],):
        raise RegressionError(f"y has shape {y.shape}, expected ({X.shape[0]},)")
    if not (np.isfinite(X).all() and np.isfinite(y).all()):
        raise RegressionError("non-finite entries in training data")
    return X, y


def train_linear(X, y, ridge: float = 0.0) -> LinearModel:
    """Least-squares fit of ``y ~ X @ beta + intercept``.

    The intercept is left unpenalised: columns are centred, then the
    minimum-norm ``beta`` is found by SVD-based least squares, so a
    constant target gives ``beta = 0``. ``ridge > 0`` adds an L2 penalty
    on ``beta``.
    """
    X, y = _check_xy(X, y)
    if ridge < 0:
        raise RegressionError("ridge must be non-negative")
    x_mean = X.mean(axis=0)
    y_mean = y.mean()
    Xc = X - x_mean
    yc = y - y_mean
    d = X.shape[1]
    if ridge > 0:
        Xc = np.vstack([Xc, math.sqrt(ridge) * np.eye(d)])
        yc = np.concatenate([yc, np.zeros(d)])
    beta, *_ = np.linalg.lstsq(Xc, yc, rcond=None)
    intercept = float(y_mean - x_mean @ beta)
    return LinearModel(beta, intercept)


def _check_predict(beta: np.ndarray, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.shape[1] != beta.shape[0]:
        raise RegressionError(f"X has {X.shape[1]} columns, model expects {beta.shape[0]}")
    return X


def predict_linear(model: LinearModel, X) -> np.ndarray:
    X = _check_predict(model.beta, X)
    return X @ model.beta + model.intercept


def logistic_loss_grad(params: np.ndarray, X: np.ndarray, y: np.ndarray,
                       lam: float) -> tuple[float, np.ndarray]:
    """Penalised negative log-likelihood and its gradient.

    ``params`` is ``[beta..., beta0]``. The loss is summed over samples
    (not averaged) and only ``beta`` is penalised, by ``lam / 2 * |beta|^2``.
    """
    beta, beta0 = params[:-1], params[-1]
    z = X @ beta + beta0
    loss = float(np.sum(np.logaddexp(0.0, z) - y * z) + 0.5 * lam * (beta @ beta))
    resid = expit(z) - y
    grad = np.empty_like(params)
    grad[:-1] = X.T @ resid + lam * beta
    grad[-1] = resid.sum()
    return loss, grad


def train_logistic(X, y01, lam: float = 1.0, max_iter: int = 10_000, tol: float = 1e-6) -> LogisticModel:
    """Fit L2-penalised logistic regression by gradient descent.

    Steps follow Armijo backtracking, so the objective never increases
    between accepted iterates. Stops once the gradient's max-norm is at
    most ``tol``. With a single class present the unpenalised intercept has
    no finite optimum, so the model is never reported as converged; the
    iteration cap bounds how far it drifts.
    """
    X, y = _check_xy(X, y01)
    if not np.isin(y, (0.0, 1.0)).all():
        raise RegressionError("logistic targets must be 0 or 1")
    if lam < 0:
        raise RegressionError("lambda must be non-negative")
    if max_iter < 0:
        raise RegressionError("max_iter must be non-negative")

    n, d = X.shape
    params = np.zeros(d + 1)
    loss, grad = logistic_loss_grad(params, X, y, lam)
    history = [loss]
    # 1/L for the smooth part: |[X 1]|_2^2 / 4 + lam
    lipschitz = np.linalg.norm(np.hstack([X, np.ones((n, 1))]), 2) ** 2 / 4.0 + lam
    step = 1.0 / lipschitz
    converged = False
    it = 0
    while True:
        if np.max(np.abs(grad)) <= tol:
            converged = True
            break
        if it >= max_iter:
            break
        g2 = grad @ grad
        t = step * 2.0
        while True:
            cand = params - t * grad
            cand_loss, cand_grad = logistic_loss_grad(cand, X, y, lam)
            if cand_loss <= loss - 0.5 * t * g2 or t < 1e-20:
                break
            t *= 0.5
        if cand_loss > loss:
            # no decrease is representable any more
            break
        params, loss, grad, step = cand, cand_loss, cand_grad, t
        history.append(loss)
        it += 1

    if np.unique(y).size < 2:
        converged = False
    return LogisticModel(params[:-1].copy(), float(params[-1]), lam, it, converged, history)


def predict_logistic(model: LogisticModel, X) -> np.ndarray:
    """Probabilities of class 1, kept strictly inside (0, 1)."""
    X = _check_predict(model.beta, X)
    return np.clip(expit(X @ model.beta + model.beta0), _P_LO, _P_HI)


def _check_pair(y_true, y_pred, min_len: int) -> tuple[np.ndarray, np.ndarray]:
    y_true = np.asarray(y_true, dtype=float)
    y_pred = np.asarray(y_pred, dtype=float)
    if y_true.ndim != 1 or y_true.shape != y_pred.shape:
        raise RegressionError("y_true and y_pred must be 1-d and of equal length")
    if y_true.size < min_len:
        raise RegressionError(f"need at least {min_len} values")
    return y_true, y_pred


def mse(y_true, y_pred) -> float:
    y_true, y_pred = _check_pair(y_true, y_pred, 1)
    return float(np.mean((y_true - y_pred) ** 2))


def r2(y_true, y_pred) -> float:
    """Coefficient of determination; negative when worse than the mean."""
    y_true, y_pred = _check_pair(y_true, y_pred, 2)
    ss_tot = float(np.sum((y_true - y_true.mean()) ** 2))
    if ss_tot == 0.0:
        raise RegressionError("r2 is undefined for a constant y_true")
    ss_res = float(np.sum((y_true - y_pred) ** 2))
    return 1.0 - ss_res / ss_tot


def split(dataset: RegressionDataset, config: SplitConfig) -> tuple[RegressionDataset, RegressionDataset]:
    """Seeded shuffle, then the first round(fraction * n) rows train."""
    n = len(dataset)
    n_train = math.floor(config.train_fraction * n + 0.5)
    if n_train < 1 or n_train >= n:
        raise RegressionError(f"train fraction {config.train_fraction} leaves an empty side for n={n}")
    perm = np.random.default_rng(config.seed).permutation(n)
    return dataset.subset(np.sort(perm[:n_train])), dataset.subset(np.sort(perm[n_train:]))


def standardize(train_X: np.ndarray, test_X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Scale columns with training-split statistics; constant columns are only centred."""
    mean = train_X.mean(axis=0)
    std = train_X.std(axis=0)
    std[std == 0] = 1.0
    return (train_X - mean) / std, (test_X - mean) / std


def _r2_or_none(y_true, y_pred) -> float | None:
    try:
        return r2(y_true, y_pred)
    except RegressionError:
        return None


def evaluate_feature(dataset: RegressionDataset, config: SplitConfig,
                     logistic: LogisticParams = LogisticParams(), ridge: float = 0.0,
                     standardize_columns: bool = False,
                     score_discrete: bool = False) -> list[EvalReport]:
    """Train both model kinds on one split and score them on the held-out rows.

    The logistic model learns from discretized training targets but is
    scored, like the linear model, against the continuous test values.
    ``score_discrete`` adds a third report scoring the same logistic
    predictions against discretized test labels. r2 is None when it is
    undefined (constant test targets) or when the discretized training
    labels hold a single class.
    """
    train, test = split(dataset, config)
    X_tr, X_te = train.X, test.X
    if standardize_columns:
        X_tr, X_te = standardize(X_tr, X_te)

    def report(kind, y_true, y_pred, r2_value):
        return EvalReport(dataset.feature, dataset.source, kind, mse(y_true, y_pred), r2_value,
                          len(train), len(test), config.seed)

    lin = train_linear(X_tr, train.y, ridge=ridge)
    lin_pred = predict_linear(lin, X_te)
    reports = [report(LINEAR, test.y, lin_pred, _r2_or_none(test.y, lin_pred))]

    y01 = np.array([discretize(p) for p in train.y], dtype=float)
    log = train_logistic(X_tr, y01, lam=logistic.lam, max_iter=logistic.max_iter, tol=logistic.tol)
    log_pred = predict_logistic(log, X_te)
    degenerate = np.unique(y01).size < 2
    reports.append(report(LOGISTIC, test.y, log_pred,
                          None if degenerate else _r2_or_none(test.y, log_pred)))
    if score_discrete:
        test01 = np.array([discretize(p) for p in test.y], dtype=float)
        reports.append(report(LOGISTIC_DISCRETE, test01, log_pred,
                              None if degenerate else _r2_or_none(test01, log_pred)))
    return reports
