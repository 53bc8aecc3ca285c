"""Residual-resampling inference for IRFs and cumulative multipliers.

Each replication resamples whole residual rows with replacement, rebuilds
an artificial panel from the estimated coefficients (initial observations
and exogenous values held at their actual values), re-estimates and
re-identifies, and records the replication's IRF and multiplier path.
Percentile bands are read off the pooled replication draws.

Determinism contract: every replication draws from a substream derived by
hashing (master seed, replication index), and aggregation sorts by index,
so results are bitwise independent of worker count and completion order.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DecompositionError,
    DegenerateDenominatorError,
    DomainError,
    InferenceError,
    RankError,
    SampleSizeError,
    ShapeError,
)
from .ingest import TransformedPanel
from .series import Quarter
from .svar import IrfSet, MultiplierPath, identify_cholesky, irf, multiplier_path
from .var import VarEstimate, estimate_var, stability

FAILURE_KINDS = (
    RankError,
    SampleSizeError,
    DecompositionError,
    DegenerateDenominatorError,
    ShapeError,
    FloatingPointError,
)

MAX_FAILURE_SHARE = 0.05


def derive_seed(*parts: int) -> int:
    """Collapse integer parts into one substream seed via seed hashing.

    Wraps :class:`numpy.random.SeedSequence` so that (master, index) pairs
    map to well-separated streams regardless of scheduling.
    """
    state = np.random.SeedSequence(list(parts)).generate_state(2, np.uint64)
    return int(state[0]) ^ (int(state[1]) << 64)


@dataclass(frozen=True)
class ModelSpec:
    """What to estimate: lag order, identification ordering, shock pair."""

    lags: int = 4
    ordering: tuple[str, ...] = ("G", "T", "Y", "i")
    shock: str = "G"
    response: str = "Y"

    def __post_init__(self):
        object.__setattr__(self, "ordering", tuple(self.ordering))
        if self.lags < 1:
            raise DomainError("lag order must be >= 1")
        if self.shock not in self.ordering or self.response not in self.ordering:
            raise DomainError(
                f"shock '{self.shock}' and response '{self.response}' must be in {self.ordering}"
            )


@dataclass(frozen=True)
class BootstrapConfig:
    replications: int = 1000
    seed: int = 0
    levels: tuple[int, ...] = (68, 90)
    horizons: int = 20

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(sorted(self.levels)))
        if self.replications < 1:
            raise DomainError("replications must be >= 1")
        if self.seed < 0:
            raise DomainError("seed must be non-negative")
        if not self.levels or any(not 0 < lv < 100 for lv in self.levels):
            raise DomainError(f"band levels must lie strictly in (0, 100): {self.levels}")
        if self.horizons < 1:
            raise DomainError("horizons must be >= 1")


@dataclass(frozen=True)
class BootstrapResult:
    """Point estimates, per-replication draws, bands, and bookkeeping.

    ``multipliers`` holds one row per successful replication (sorted by
    replication index); band dicts map level -> array with rows
    (lower, upper). ``stars`` follows the two-tier marking convention.
    """

    point_irf: IrfSet
    point_multipliers: MultiplierPath
    multipliers: np.ndarray  # (S, H)
    irf_draws: np.ndarray  # (S, H + 1, k)
    replication_index: np.ndarray  # (S,)
    multiplier_bands: dict[int, np.ndarray]  # level -> (2, H)
    irf_bands: dict[int, np.ndarray]  # level -> (2, H + 1, k)
    stars: tuple[str, ...]
    replications: int
    failed: dict[int, str] = field(default_factory=dict)
    unstable: int = 0

    def __post_init__(self):
        for name in ("multipliers", "irf_draws", "replication_index"):
            arr = np.asarray(getattr(self, name))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if len(self.failed) + self.multipliers.shape[0] != self.replications:
            raise ShapeError("failure count plus success count must equal replications")

    @property
    def n_failed(self) -> int:
        return len(self.failed)


def resample_residuals(residuals: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Draw residual rows i.i.d. with replacement, keeping rows intact.

    Whole rows preserve the contemporaneous covariance the identification
    step factorises.
    """
    U = np.asarray(residuals, dtype=float)
    if U.ndim != 2 or U.shape[0] < 1:
        raise ShapeError("residuals must have at least one row")
    idx = rng.integers(0, U.shape[0], size=U.shape[0])
    return U[idx]


def simulate_bootstrap_series(
    estimate: VarEstimate,
    resampled: np.ndarray,
    initial: np.ndarray,
    exog: np.ndarray,
    *,
    start: Quarter = Quarter(2000, 1),
    x_labels: tuple[str, ...] = ("G", "T", "Y", "i"),
    z_labels: tuple[str, ...] | None = None,
) -> TransformedPanel:
    """Rebuild an artificial panel from coefficients and resampled rows.

    The recursion x*_t = c + sum Gamma_i x*_{t-i} + D z_t + u*_t starts
    from the actual first p observations; ``exog`` must cover the full
    panel (p initial rows plus one per resampled row).
    """
    p, k = estimate.p, estimate.k
    resampled = np.asarray(resampled, dtype=float)
    initial = np.asarray(initial, dtype=float)
    exog = np.asarray(exog, dtype=float)
    m = estimate.exog_coef.shape[1]
    if resampled.ndim != 2 or resampled.shape[1] != k:
        raise ShapeError(f"resampled must be (T_eff, {k})")
    if initial.shape != (p, k):
        raise ShapeError(f"initial must be ({p}, {k}), got {initial.shape}")
    T_eff = resampled.shape[0]
    if exog.shape != (p + T_eff, m):
        raise ShapeError(f"exog must be ({p + T_eff}, {m}), got {exog.shape}")

    base = resampled + estimate.intercept
    if m:
        base = base + exog[p:] @ estimate.exog_coef.T
    g_stack = estimate.companion()[:k]  # (k, k*p)

    X = np.empty((p + T_eff, k))
    X[:p] = initial
    # state layout: [x_{t-1}, x_{t-2}, ..., x_{t-p}]
    state = initial[::-1].reshape(-1)
    for t in range(T_eff):
        x = base[t] + g_stack @ state
        X[p + t] = x
        state = np.concatenate([x, state[:-k]])

    if z_labels is None:
        z_labels = tuple(f"z{j}" for j in range(m))
    return TransformedPanel(start, X, exog, x_labels, z_labels)


def quantile_bands(samples: np.ndarray, levels: tuple[int, ...]) -> dict[int, np.ndarray]:
    """Percentile band per level: lower at (100-L)/2 %, upper at (100+L)/2 %.

    Quantiles interpolate linearly between order statistics at position
    q*(n-1)+1, i.e. numpy's default rule.
    """
    a = np.asarray(samples, dtype=float)
    if a.size == 0 or a.shape[0] == 0:
        raise ShapeError("no samples to take quantiles over")
    bands = {}
    for level in levels:
        lo = (100 - level) / 200.0
        hi = (100 + level) / 200.0
        bands[level] = np.quantile(a, [lo, hi], axis=0, method="linear")
    return bands


def significance_flags(
    bands: dict[int, np.ndarray], point: np.ndarray | MultiplierPath
) -> tuple[str, ...]:
    """Two-tier stars: '**' when the widest band excludes zero, '*' when
    only the narrowest does, '' otherwise. Exclusion is strict.
    """
    if not bands:
        raise ShapeError("need at least one band level")
    values = point.values if isinstance(point, MultiplierPath) else np.asarray(point)
    strong = bands[max(bands)]
    weak = bands[min(bands)]
    if strong.shape[-1] != values.shape[-1]:
        raise ShapeError("bands and point estimate disagree on horizon count")

    def excludes_zero(band, h):
        return band[0, h] > 0.0 or band[1, h] < 0.0

    flags = []
    for h in range(values.shape[-1]):
        if excludes_zero(strong, h):
            flags.append("**")
        elif excludes_zero(weak, h):
            flags.append("*")
        else:
            flags.append("")
    return tuple(flags)


def _one_replication(r, estimate, initial, exog, model, config, panel):
    rng = np.random.default_rng(np.random.SeedSequence([config.seed, r]))
    with np.errstate(over="raise", invalid="raise"):
        u_star = resample_residuals(estimate.residuals, rng)
        panel_star = simulate_bootstrap_series(
            estimate,
            u_star,
            initial,
            exog,
            start=panel.start,
            x_labels=panel.x_labels,
            z_labels=panel.z_labels,
        )
        est_star = estimate_var(panel_star, model.lags)
        structural = identify_cholesky(est_star, model.ordering)
        irfs = irf(structural, model.shock, config.horizons)
        m_star = multiplier_path(irfs, model.response, model.shock, config.horizons)
    _, stable = stability(est_star)
    return irfs.responses, m_star.values, stable


def bootstrap_inference(
    panel: TransformedPanel,
    config: BootstrapConfig,
    model: ModelSpec = ModelSpec(),
    workers: int = 1,
) -> BootstrapResult:
    """Full resampling loop around the point pipeline.

    Failed replications (rank loss, covariance not PD, degenerate
    denominator, numeric overflow) are recorded and excluded; more than
    5% failures aborts. Unstable re-estimates are kept and counted.
    """
    if panel.x_labels != model.ordering:
        panel = panel.reordered(model.ordering)
    estimate = estimate_var(panel, model.lags)
    structural = identify_cholesky(estimate, model.ordering)
    point_irf = irf(structural, model.shock, config.horizons)
    point_m = multiplier_path(point_irf, model.response, model.shock, config.horizons)

    initial = panel.X[: model.lags]
    exog = panel.Z

    draws: dict[int, tuple[np.ndarray, np.ndarray, bool]] = {}
    failed: dict[int, str] = {}

    def run(r):
        try:
            return r, _one_replication(r, estimate, initial, exog, model, config, panel)
        except FAILURE_KINDS as exc:
            return r, exc

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run, range(config.replications), chunksize=32))
    else:
        outcomes = [run(r) for r in range(config.replications)]

    for r, outcome in outcomes:
        if isinstance(outcome, Exception):
            failed[r] = f"{type(outcome).__name__}: {outcome}"
        else:
            draws[r] = outcome

    if len(failed) > MAX_FAILURE_SHARE * config.replications:
        raise InferenceError(
            f"{len(failed)} of {config.replications} replications failed "
            f"(limit {MAX_FAILURE_SHARE:.0%}); first: {next(iter(failed.values()))}"
        )
    if not draws:
        raise InferenceError("no successful replications")

    order = np.array(sorted(draws), dtype=int)
    irf_draws = np.stack([draws[r][0] for r in order])
    multipliers = np.stack([draws[r][1] for r in order])
    unstable = sum(1 for r in order if not draws[r][2])

    m_bands = quantile_bands(multipliers, config.levels)
    i_bands = quantile_bands(irf_draws, config.levels)
    stars = significance_flags(m_bands, point_m)

    return BootstrapResult(
        point_irf=point_irf,
        point_multipliers=point_m,
        multipliers=multipliers,
        irf_draws=irf_draws,
        replication_index=order,
        multiplier_bands=m_bands,
        irf_bands=i_bands,
        stars=stars,
        replications=config.replications,
        failed=failed,
        unstable=unstable,
    )
