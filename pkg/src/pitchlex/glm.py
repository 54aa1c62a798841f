"""Binary-outcome logistic regression by Newton/IRLS, with Wald inference,
McFadden's pseudo-R-squared, and variance inflation factors.

Implemented from scratch on numpy linear algebra: the estimator is plain
maximum likelihood with step-halving to keep the ascent monotone, standard
errors come from the observed information matrix, and separation is
detected (diverging coefficients) instead of silently returning huge
estimates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CollinearityError, DegenerateOutcomeError, InfiniteVIFError, SeparationError

INTERCEPT = "intercept"

#: Probability clamp keeping the log-likelihood finite near separation.
PROB_EPS = 1e-12

#: Coefficient magnitude treated as evidence of complete/quasi-separation.
SEPARATION_BOUND = 30.0

STAR_LEVELS = ((0.01, "***"), (0.05, "**"), (0.1, "*"))


@dataclass
class DesignMatrix:
    """Named predictor columns (including an all-ones intercept) plus outcomes."""

    columns: list[str]
    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        if self.X.ndim != 2:
            raise ValueError("X must be a 2-d array")
        n, p = self.X.shape
        if len(self.columns) != p:
            raise ValueError(f"{len(self.columns)} column names for {p} columns")
        if len(set(self.columns)) != p:
            raise ValueError("column names must be unique")
        if self.y.shape != (n,):
            raise ValueError("y length must match the number of rows")
        if not np.isfinite(self.X).all() or not np.isfinite(self.y).all():
            raise ValueError("design contains non-finite values")
        if not np.isin(self.y, (0.0, 1.0)).all():
            raise ValueError("y must be binary (0/1)")
        if INTERCEPT not in self.columns:
            raise ValueError("design must include an 'intercept' column")
        if not np.all(self.X[:, self.columns.index(INTERCEPT)] == 1.0):
            raise ValueError("intercept column must be all ones")

    @property
    def n(self) -> int:
        return self.X.shape[0]


@dataclass
class FitResult:
    columns: list[str]
    coefficients: np.ndarray
    standard_errors: np.ndarray
    z_scores: np.ndarray
    p_values: np.ndarray
    log_likelihood: float
    null_log_likelihood: float
    pseudo_r2: float
    n: int
    converged: bool
    iterations: int
    cov: np.ndarray = field(repr=False, default=None)

    def coef(self, name: str) -> float:
        return float(self.coefficients[self.columns.index(name)])

    def to_dict(self) -> dict:
        """JSON-ready form with fixed field names."""
        return {
            "columns": list(self.columns),
            "coefficients": [float(v) for v in self.coefficients],
            "standard_errors": [float(v) for v in self.standard_errors],
            "z_scores": [float(v) for v in self.z_scores],
            "p_values": [float(v) for v in self.p_values],
            "log_likelihood": self.log_likelihood,
            "null_log_likelihood": self.null_log_likelihood,
            "pseudo_r2": self.pseudo_r2,
            "n": self.n,
            "converged": self.converged,
            "iterations": self.iterations,
        }


def _sigmoid(eta: np.ndarray) -> np.ndarray:
    out = np.empty_like(eta)
    pos = eta >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-eta[pos]))
    ez = np.exp(eta[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def log_likelihood(beta: np.ndarray, design: DesignMatrix) -> float:
    """Bernoulli log-likelihood, with probabilities clamped to [eps, 1-eps]."""
    p = np.clip(_sigmoid(design.X @ np.asarray(beta, dtype=float)), PROB_EPS, 1.0 - PROB_EPS)
    return float(design.y @ np.log(p) + (1.0 - design.y) @ np.log(1.0 - p))


def score(beta: np.ndarray, design: DesignMatrix) -> np.ndarray:
    """Gradient of the log-likelihood: X'(y - p)."""
    p = _sigmoid(design.X @ np.asarray(beta, dtype=float))
    return design.X.T @ (design.y - p)


def null_log_likelihood(y: np.ndarray) -> float:
    """Intercept-only maximized log-likelihood (closed form at p = mean(y))."""
    n = len(y)
    k = float(np.sum(y))
    if k == 0 or k == n:
        raise DegenerateOutcomeError("outcome contains a single class")
    ybar = k / n
    return k * math.log(ybar) + (n - k) * math.log(1.0 - ybar)


def _solve_information(H: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    # Cholesky doubles as the singularity check: X'WX is PD iff X has full rank.
    try:
        L = np.linalg.cholesky(H)
    except np.linalg.LinAlgError:
        raise CollinearityError("information matrix is singular (collinear predictors)") from None
    z = np.linalg.solve(L, rhs)
    return np.linalg.solve(L.T, z)


def fit_logistic(
    design: DesignMatrix,
    max_iter: int = 50,
    tol: float = 1e-8,
    separation_bound: float = SEPARATION_BOUND,
) -> FitResult:
    """Maximum-likelihood logistic fit by Newton iteration from beta = 0.

    Converged when the largest score component falls below ``tol``. Each
    Newton step is halved until the log-likelihood does not decrease, so
    the ascent is monotone. Coefficients passing ``separation_bound`` in
    magnitude raise SeparationError naming the offending columns.
    """
    X, y = design.X, design.y
    n, p = X.shape
    if n <= p:
        raise ValueError(f"need more observations ({n}) than parameters ({p})")
    if y.min() == y.max():
        raise DegenerateOutcomeError("outcome contains a single class")

    beta = np.zeros(p)
    ll = log_likelihood(beta, design)
    converged = False
    iterations = 0
    for _ in range(max_iter):
        mu = _sigmoid(X @ beta)
        g = X.T @ (y - mu)
        if np.max(np.abs(g)) < tol:
            converged = True
            break
        W = mu * (1.0 - mu)
        H = (X * W[:, None]).T @ X
        delta = _solve_information(H, g)
        lam = 1.0
        accepted = False
        while lam > 1e-10:
            cand = beta + lam * delta
            cll = log_likelihood(cand, design)
            if cll >= ll - 1e-12:
                beta, ll = cand, cll
                accepted = True
                break
            lam /= 2.0
        iterations += 1
        if not accepted:
            break
        if np.max(np.abs(beta)) > separation_bound:
            offending = [c for c, b in zip(design.columns, beta) if abs(b) > separation_bound]
            raise SeparationError(
                "complete or quasi-separation detected: coefficients diverging for "
                + ", ".join(offending),
                columns=offending,
            )
    else:
        mu = _sigmoid(X @ beta)
        g = X.T @ (y - mu)
        converged = bool(np.max(np.abs(g)) < tol)

    mu = _sigmoid(X @ beta)
    W = mu * (1.0 - mu)
    H = (X * W[:, None]).T @ X
    cov = _solve_information(H, np.eye(p))
    se = np.sqrt(np.diag(cov))
    with np.errstate(divide="ignore", invalid="ignore"):
        z = beta / se
    pvals = np.array([math.erfc(abs(v) / math.sqrt(2.0)) for v in z])

    null_ll = null_log_likelihood(y)
    return FitResult(
        columns=list(design.columns),
        coefficients=beta,
        standard_errors=se,
        z_scores=z,
        p_values=pvals,
        log_likelihood=ll,
        null_log_likelihood=null_ll,
        pseudo_r2=mcfadden_r2(ll, null_ll),
        n=n,
        converged=converged,
        iterations=iterations,
        cov=cov,
    )


def mcfadden_r2(full_ll: float, null_ll: float) -> float:
    """McFadden's pseudo-R-squared: 1 - ll(full) / ll(intercept-only)."""
    if null_ll >= 0:
        raise ValueError("null log-likelihood must be negative")
    return 1.0 - full_ll / null_ll


def stars(p_value: float) -> str:
    """Significance stars: *** p<0.01, ** p<0.05, * p<0.1."""
    for threshold, mark in STAR_LEVELS:
        if p_value < threshold:
            return mark
    return ""


@dataclass
class WaldRow:
    column: str
    coefficient: float
    se: float
    z: float
    p: float
    stars: str


def wald_stats(fit: FitResult) -> list[WaldRow]:
    """Per-column Wald inference from the inverse observed information."""
    if fit.cov is None:
        raise CollinearityError("fit carries no covariance matrix")
    se = np.sqrt(np.diag(fit.cov))
    rows = []
    for i, name in enumerate(fit.columns):
        b = float(fit.coefficients[i])
        s = float(se[i])
        z = b / s
        p = math.erfc(abs(z) / math.sqrt(2.0))
        rows.append(WaldRow(name, b, s, z, p, stars(p)))
    return rows


def vif(design: DesignMatrix) -> dict[str, float]:
    """Variance inflation factor per non-intercept predictor.

    VIF_j = 1 / (1 - R2_j) with R2_j from the least-squares regression of
    column j on all other predictors plus the intercept. Exact collinearity
    (R2 within 1e-12 of 1) raises InfiniteVIFError naming the column.
    """
    idx = [i for i, c in enumerate(design.columns) if c != INTERCEPT]
    if len(idx) < 2:
        raise ValueError("VIF needs at least two non-intercept predictors")
    X = design.X
    out: dict[str, float] = {}
    for j in idx:
        name = design.columns[j]
        xj = X[:, j]
        centered = xj - xj.mean()
        sst = float(centered @ centered)
        if sst <= 0.0:
            raise ValueError(f"predictor '{name}' has zero variance")
        others = X[:, [k for k in range(X.shape[1]) if k != j]]
        coef, _, _, _ = np.linalg.lstsq(others, xj, rcond=None)
        resid = xj - others @ coef
        r2 = 1.0 - float(resid @ resid) / sst
        if r2 >= 1.0 - 1e-12:
            raise InfiniteVIFError(
                f"predictor '{name}' is an exact linear combination of the others",
                column=name,
            )
        out[name] = 1.0 / (1.0 - r2)
    return out
