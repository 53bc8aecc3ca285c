"""Recursive identification, impulse responses, and cumulative multipliers.

Structural shocks are recovered from reduced-form residuals through
u_t = B eps_t with B lower triangular, i.e. the Cholesky factor of the
residual covariance in the panel's column order. A shock ordered earlier
moves every later variable on impact but not vice versa.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DecompositionError,
    DegenerateDenominatorError,
    ShapeError,
)
from .var import VarEstimate

# a pivot this far below zero is treated as a hard failure, not noise
PIVOT_CLAMP = -1e-10


@dataclass(frozen=True)
class StructuralModel:
    """A reduced-form estimate together with its impact matrix B."""

    estimate: VarEstimate
    B: np.ndarray
    ordering: tuple[str, ...]

    def __post_init__(self):
        B = np.array(self.B, dtype=float)
        k = self.estimate.k
        if B.shape != (k, k):
            raise ShapeError(f"B must be {k} x {k}")
        if len(self.ordering) != k:
            raise ShapeError("ordering length must equal k")
        B.setflags(write=False)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "ordering", tuple(self.ordering))


@dataclass(frozen=True)
class IrfSet:
    """Responses of every variable to one structural shock, horizons 0..H."""

    shock: str
    ordering: tuple[str, ...]
    responses: np.ndarray  # (H + 1, k)

    def __post_init__(self):
        resp = np.array(self.responses, dtype=float)
        if resp.ndim != 2 or resp.shape[1] != len(self.ordering):
            raise ShapeError("responses must be (H + 1, k)")
        resp.setflags(write=False)
        object.__setattr__(self, "responses", resp)
        object.__setattr__(self, "ordering", tuple(self.ordering))

    @property
    def horizons(self) -> int:
        return self.responses.shape[0] - 1

    def series(self, variable: str) -> np.ndarray:
        return self.responses[:, self.ordering.index(variable)]

    def cumulative(self, variable: str) -> np.ndarray:
        return np.cumsum(self.series(variable))


@dataclass(frozen=True)
class MultiplierPath:
    """Cumulative multiplier estimates by horizon (1-based quarters)."""

    values: np.ndarray  # (H,)

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.ndim != 1 or vals.shape[0] == 0:
            raise ShapeError("values must be a non-empty vector")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return self.values.shape[0]

    def at_quarter(self, q: int) -> float:
        if not 1 <= q <= len(self):
            raise IndexError(f"quarter {q} outside 1..{len(self)}")
        return float(self.values[q - 1])


def lower_cholesky(sigma: np.ndarray) -> np.ndarray:
    """Lower-triangular Cholesky factor of a symmetric PD matrix.

    Fails with :class:`DecompositionError` naming the 1-based pivot when a
    diagonal entry is non-positive. Values within rounding of zero are not
    repaired; a covariance that close to singular has no usable ordering.
    """
    A = np.asarray(sigma, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ShapeError("sigma must be square")
    n = A.shape[0]
    L = np.zeros((n, n))
    for j in range(n):
        pivot = A[j, j] - L[j, :j] @ L[j, :j]
        if pivot <= 0.0 or pivot <= PIVOT_CLAMP:
            raise DecompositionError(
                f"pivot {j + 1} is non-positive ({pivot:.6e}); covariance is not PD",
                pivot=j + 1,
            )
        L[j, j] = np.sqrt(pivot)
        for i in range(j + 1, n):
            L[i, j] = (A[i, j] - L[i, :j] @ L[j, :j]) / L[j, j]
    return L


def identify_cholesky(estimate: VarEstimate, ordering: tuple[str, ...]) -> StructuralModel:
    """Impact matrix from the Cholesky factor of the residual covariance.

    The estimate's columns must already be arranged in ``ordering``; this
    function does not permute, it only factorises.
    """
    if len(ordering) != estimate.k:
        raise ShapeError(f"ordering has {len(ordering)} names for k = {estimate.k}")
    B = lower_cholesky(estimate.sigma)
    return StructuralModel(estimate=estimate, B=B, ordering=ordering)


def propagate_impulse(F: np.ndarray, impact: np.ndarray, horizons: int) -> np.ndarray:
    """Iterate the companion map: row h is the top k entries of F^h applied
    to the impact vector. Avoids forming explicit matrix powers.
    """
    impact = np.asarray(impact, dtype=float)
    k = impact.shape[0]
    if F.shape[0] != F.shape[1] or F.shape[0] % k != 0:
        raise ShapeError(f"companion shape {F.shape} incompatible with k = {k}")
    responses = np.empty((horizons + 1, k))
    state = np.zeros(F.shape[0])
    state[:k] = impact
    responses[0] = state[:k]
    for h in range(1, horizons + 1):
        state = F @ state
        responses[h] = state[:k]
    return responses


def irf(model: StructuralModel, shock: str, horizons: int) -> IrfSet:
    """Responses to a one-standard-deviation structural shock.

    Horizon h response is the top-left k x k block of F^h applied to the
    shock's column of B.
    """
    if shock not in model.ordering:
        raise ShapeError(f"unknown shock '{shock}', ordering is {model.ordering}")
    if horizons < 0:
        raise ShapeError("horizons must be >= 0")
    F = model.estimate.companion()
    impact = model.B[:, model.ordering.index(shock)]
    responses = propagate_impulse(F, impact, horizons)
    return IrfSet(shock=shock, ordering=model.ordering, responses=responses)


def multiplier_path(
    irfs: IrfSet,
    response: str = "Y",
    shock_variable: str = "G",
    horizons: int = 20,
) -> MultiplierPath:
    """Cumulative multiplier: summed output response over summed G response.

    Quarter h covers impact through horizon h - 1, so quarter 1 is the
    impact ratio alone. A denominator within 1e-12 of zero at any quarter
    aborts with the 1-based quarter attached.
    """
    if horizons < 1:
        raise ShapeError("need at least one quarter")
    if irfs.horizons < horizons - 1:
        raise ShapeError(
            f"IRF covers horizons 0..{irfs.horizons}, need 0..{horizons - 1}"
        )
    cum_y = irfs.cumulative(response)[:horizons]
    cum_g = irfs.cumulative(shock_variable)[:horizons]
    small = np.abs(cum_g) <= 1e-12
    if np.any(small):
        q = int(np.argmax(small)) + 1
        raise DegenerateDenominatorError(
            f"cumulative {shock_variable} response is {cum_g[q - 1]:.3e} at quarter {q}",
            horizon=q,
        )
    return MultiplierPath(values=cum_y / cum_g)
