"""Reduced-form VAR estimation by equation-by-equation least squares.

The model for the k endogenous columns x_t of a panel is

    x_t = c + Gamma_1 x_{t-1} + ... + Gamma_p x_{t-p} + D z_t + u_t

with z_t the exogenous columns entering contemporaneously. All equations
share the same regressors, so the coefficients solve a single multi-target
least-squares problem.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DofError, RankError, SampleSizeError, ShapeError
from .ingest import TransformedPanel

# relative tolerance on the diagonal of R in the QR factorisation
RANK_RTOL = 1e-10


@dataclass(frozen=True)
class VarEstimate:
    """Least-squares estimate of a VAR(p) with exogenous regressors.

    ``gammas`` stacks the lag matrices as shape (p, k, k), ``exog_coef`` is
    (k, m), ``residuals`` is (T - p, k) aligned to the regression sample.
    """

    p: int
    k: int
    intercept: np.ndarray
    gammas: np.ndarray
    exog_coef: np.ndarray
    residuals: np.ndarray
    sigma: np.ndarray
    sample_size: int

    def __post_init__(self):
        for name in ("intercept", "gammas", "exog_coef", "residuals", "sigma"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.gammas.shape != (self.p, self.k, self.k):
            raise ShapeError(f"gammas shape {self.gammas.shape} != {(self.p, self.k, self.k)}")
        if self.sigma.shape != (self.k, self.k):
            raise ShapeError("sigma must be k x k")
        if self.intercept.shape != (self.k,):
            raise ShapeError("intercept must have length k")

    @property
    def n_regressors(self) -> int:
        return 1 + self.p * self.k + self.exog_coef.shape[1]

    def companion(self) -> np.ndarray:
        return companion_matrix(self.gammas)


def companion_matrix(gammas: np.ndarray) -> np.ndarray:
    """Stack lag matrices into the (k*p) x (k*p) companion form.

    The top block row is [Gamma_1 ... Gamma_p]; below sits a shifted
    identity so that powers of the result propagate the lag state.
    """
    gammas = np.asarray(gammas, dtype=float)
    if gammas.ndim != 3 or gammas.shape[1] != gammas.shape[2]:
        raise ShapeError(f"gammas must be (p, k, k), got {gammas.shape}")
    p, k, _ = gammas.shape
    F = np.zeros((k * p, k * p))
    F[:k] = gammas.transpose(1, 0, 2).reshape(k, k * p)
    if p > 1:
        F[k:, :-k] = np.eye(k * (p - 1))
    return F


def lagged_design(panel: TransformedPanel, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Build the response block Y (T-p, k) and regressor block W.

    W columns: constant, then lag 1 through lag p of X (each lag keeps the
    panel's column order), then the contemporaneous exogenous columns.
    """
    if p < 1:
        raise ShapeError("lag order must be >= 1")
    X, Z = panel.X, panel.Z
    T, k = X.shape
    if T <= p:
        raise SampleSizeError(f"need more than {p} rows to form lags, have {T}")
    Y = X[p:]
    blocks = [np.ones((T - p, 1))]
    for lag in range(1, p + 1):
        blocks.append(X[p - lag:T - lag])
    blocks.append(Z[p:])
    return Y, np.hstack(blocks)


def estimate_var(panel: TransformedPanel, p: int = 4) -> VarEstimate:
    """Fit the VAR(p) by QR-based least squares.

    Raises :class:`SampleSizeError` when there are not strictly more usable
    rows than regressors, and :class:`RankError` when the regressor matrix
    is numerically rank-deficient.
    """
    Y, W = lagged_design(panel, p)
    T_eff, n_reg = W.shape
    k = Y.shape[1]
    if T_eff <= n_reg:
        raise SampleSizeError(
            f"{T_eff} usable rows for {n_reg} regressors; need T - p > n_regressors"
        )

    Q, R = np.linalg.qr(W)
    diag = np.abs(np.diag(R))
    if diag.min() < RANK_RTOL * diag.max():
        raise RankError(
            f"regressor matrix is rank deficient (min |R_ii| = {diag.min():.3e})"
        )
    coef = np.linalg.solve(R, Q.T @ Y)  # (n_reg, k)

    residuals = Y - W @ coef
    sigma = residual_cov(residuals, n_reg)

    m = panel.Z.shape[1]
    B = coef.T  # (k, n_reg)
    intercept = B[:, 0]
    gammas = np.stack(
        [B[:, 1 + lag * k: 1 + (lag + 1) * k] for lag in range(p)]
    )
    exog_coef = B[:, 1 + p * k:]
    assert exog_coef.shape == (k, m)

    return VarEstimate(
        p=p,
        k=k,
        intercept=intercept,
        gammas=gammas,
        exog_coef=exog_coef,
        residuals=residuals,
        sigma=sigma,
        sample_size=T_eff,
    )


def residual_cov(residuals: np.ndarray, n_regressors: int) -> np.ndarray:
    """Degrees-of-freedom adjusted residual covariance U'U / (T_eff - n_reg).

    The result is explicitly symmetrised so downstream factorisations never
    see rounding-level asymmetry.
    """
    U = np.asarray(residuals, dtype=float)
    if U.ndim != 2:
        raise ShapeError("residuals must be 2-d")
    T_eff = U.shape[0]
    dof = T_eff - n_regressors
    if dof <= 0:
        raise DofError(f"non-positive degrees of freedom: {T_eff} rows, {n_regressors} regressors")
    sigma = (U.T @ U) / dof
    return (sigma + sigma.T) / 2.0


def stability(estimate: VarEstimate) -> tuple[float, bool]:
    """Largest companion eigenvalue modulus and whether it is below one.

    Reported only; estimation never rejects an explosive fit.
    """
    eigvals = np.linalg.eigvals(estimate.companion())
    top = float(np.max(np.abs(eigvals)))
    return top, top < 1.0
