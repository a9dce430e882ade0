# -*- coding: utf-8 -*-
"""
Inference Module
Bayesian estimation of SIR/SIRI parameters for one occurrence: uniform priors,
Gaussian count likelihood with a sampled noise scale, ensemble MCMC.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from emcee.autocorr import integrated_time

from config import (
    CREDIBLE_HIGH,
    CREDIBLE_LOW,
    DEFAULT_BURN_IN,
    DEFAULT_SEED,
    DEFAULT_STRETCH_A,
    DEFAULT_TOTAL_SAMPLES,
    INIT_MAX_RETRIES,
    MIN_CHAIN_LENGTH,
    MIN_WALKERS,
    PARAM_NAMES,
    PRIOR_BETA_MAX,
    PRIOR_DECAY_MAX,
    PRIOR_S0_MIN,
    PRIOR_S0_SCALE,
    PRIOR_SIGMA_FLOOR,
)
from dynamics import ModelSpec, ParamVector, Trajectory, integrate, reproduction_numbers
from sampler import Ensemble, run_ensemble, walker_streams
from series import Occurrence
from validators import (
    ChainTooShort,
    ConfigValidationError,
    DegenerateFit,
    IntegrationFailure,
    check_fit_health,
    check_positive,
    check_walker_count,
)

logger = logging.getLogger(__name__)

_LOG_2PI = math.log(2.0 * math.pi)
_PRIOR_KEYS = ("beta_max", "decay_max", "s0_min", "s0_max", "i0_max", "sigma_max")


@dataclass(frozen=True)
class PriorBox:
    """
    Uniform prior support.

    beta in (0, beta_max], decay in (0, decay_max], s0 in [s0_min, s0_max],
    i0 in [1, i0_max], sigma in (0, sigma_max].
    """

    beta_max: float = PRIOR_BETA_MAX
    decay_max: float = PRIOR_DECAY_MAX
    s0_min: float = PRIOR_S0_MIN
    s0_max: float = 1e7
    i0_max: float = 1e5
    sigma_max: float = 1e5

    def __post_init__(self):
        for name in _PRIOR_KEYS:
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"prior bound {name} must be finite")
        if self.s0_min < 0:
            raise ValueError("prior lower bounds must be non-negative")
        pairs = [
            ("beta", 0.0, self.beta_max),
            ("decay", 0.0, self.decay_max),
            ("s0", self.s0_min, self.s0_max),
            ("i0", 1.0, self.i0_max),
            ("sigma", 0.0, self.sigma_max),
        ]
        for name, lower, upper in pairs:
            if not lower < upper:
                raise ValueError(f"prior for {name} needs lower < upper, got [{lower}, {upper}]")

    @property
    def lower(self) -> np.ndarray:
        return np.array([0.0, 0.0, self.s0_min, 1.0, 0.0])

    @property
    def upper(self) -> np.ndarray:
        return np.array([self.beta_max, self.decay_max, self.s0_max, self.i0_max, self.sigma_max])

    def contains(self, theta: np.ndarray) -> bool:
        beta, decay, s0, i0, sigma = theta
        return (
            0.0 < beta <= self.beta_max
            and 0.0 < decay <= self.decay_max
            and self.s0_min <= s0 <= self.s0_max
            and 1.0 <= i0 <= self.i0_max
            and 0.0 < sigma <= self.sigma_max
        )

    @classmethod
    def for_occurrence(cls, occ: Occurrence, overrides: Optional[Dict[str, float]] = None) -> "PriorBox":
        """
        Data-informed default box, with explicit overrides taking precedence.

        Args:
            occ (Occurrence): Occurrence being fitted
            overrides (Optional[Dict[str, float]]): Any of the bound names

        Returns:
            PriorBox: Prior support
        """
        counts = occ.counts
        peak_count = max(float(counts.max()), 1.0)
        total_count = max(float(counts.sum()), 1.0)
        bounds = {
            "beta_max": PRIOR_BETA_MAX,
            "decay_max": PRIOR_DECAY_MAX,
            "s0_min": PRIOR_S0_MIN,
            "s0_max": max(PRIOR_S0_SCALE * total_count, 10.0 * peak_count),
            "i0_max": max(peak_count, 2.0),
            "sigma_max": max(peak_count, PRIOR_SIGMA_FLOOR),
        }
        for key, value in (overrides or {}).items():
            if key not in bounds:
                raise ConfigValidationError(f"unknown prior bound '{key}'")
            if value is not None:
                bounds[key] = float(value)
        return cls(**bounds)


@dataclass
class FitConfig:
    """Sampler settings for one fit."""

    total_samples: int = DEFAULT_TOTAL_SAMPLES
    burn_in_fraction: float = DEFAULT_BURN_IN
    walkers: Optional[int] = None
    stretch_a: float = DEFAULT_STRETCH_A
    seed: int = DEFAULT_SEED
    prior: Dict[str, float] = field(default_factory=dict)

    def validate(self) -> "FitConfig":
        check_positive(self.total_samples, "total_samples", ConfigValidationError)
        if not 0.0 <= self.burn_in_fraction < 1.0:
            raise ConfigValidationError(f"burn_in_fraction must be in [0, 1), got {self.burn_in_fraction}")
        if self.stretch_a <= 1:
            raise ConfigValidationError(f"stretch_a must exceed 1, got {self.stretch_a}")
        if self.walkers is not None:
            try:
                check_walker_count(int(self.walkers), len(PARAM_NAMES))
            except ValueError as exc:
                raise ConfigValidationError(str(exc))
        unknown = set(self.prior) - set(_PRIOR_KEYS)
        if unknown:
            raise ConfigValidationError(f"unknown prior bounds: {sorted(unknown)}")
        return self

    def resolved_walkers(self, dim: int) -> int:
        """Walker count: configured value, else max(2*dim + 2, 50) rounded up to even."""
        if self.walkers is not None:
            return check_walker_count(int(self.walkers), dim)
        count = max(2 * dim + 2, MIN_WALKERS)
        return count + (count % 2)


@dataclass
class ChainSummary:
    """Per-parameter (median, q2.5, q97.5) and the Pearson correlation matrix."""

    names: Sequence[str]
    quantiles: Dict[str, Tuple[float, float, float]]
    correlations: np.ndarray
    degenerate: bool


@dataclass
class FitResult:
    """Posterior of one occurrence under one model."""

    spec: ModelSpec
    chain: np.ndarray
    log_posts: np.ndarray
    map_params: ParamVector
    summaries: Dict[str, Tuple[float, float, float]]
    correlations: np.ndarray
    r_chain: np.ndarray
    r_number: float
    r_interval: Tuple[float, float]
    diagnostics: Dict[str, Any]
    hashtag: str = ""
    location: Optional[str] = None

    @property
    def acceptance_fraction(self) -> float:
        return float(self.diagnostics["accept_frac"])

    @property
    def low_information(self) -> bool:
        return bool(self.diagnostics.get("low_information", False))

    def summary_row(self) -> Dict[str, Any]:
        """One row of the summary CSV."""
        beta, decay = self.summaries["beta"], self.summaries["decay"]
        return {
            "hashtag": self.hashtag,
            "location": self.location or "",
            "model": self.spec.kind,
            "beta_med": beta[0],
            "beta_lo": beta[1],
            "beta_hi": beta[2],
            "decay_med": decay[0],
            "decay_lo": decay[1],
            "decay_hi": decay[2],
            "s0_med": self.summaries["s0"][0],
            "i0_med": self.summaries["i0"][0],
            "sigma_med": self.summaries["sigma"][0],
            "R_med": self.r_number,
            "R_lo": self.r_interval[0],
            "R_hi": self.r_interval[1],
            "accept_frac": self.acceptance_fraction,
            "n_samples": int(len(self.chain)),
        }

    def chain_frame(self) -> pd.DataFrame:
        """Full post-burn-in chain, one column per parameter plus ℛ and the log-posterior."""
        frame = pd.DataFrame(self.chain, columns=PARAM_NAMES)
        frame["R"] = self.r_chain
        frame["log_post"] = self.log_posts
        return frame


class PosteriorTarget:
    """Log-posterior of a parameter array for one occurrence; picklable."""

    def __init__(self, occ: Occurrence, spec: ModelSpec, prior: PriorBox):
        self.spec = spec
        self.prior = prior
        self.times = occ.times - occ.t1
        self.counts = occ.counts.copy()
        self.n_points = len(self.counts)

    def __call__(self, theta: np.ndarray) -> float:
        theta = np.asarray(theta, dtype=float)
        if not self.prior.contains(theta):
            return -np.inf
        try:
            trajectory = integrate(self.spec, ParamVector.from_array(theta), self.times)
        except (IntegrationFailure, ValueError) as exc:
            logger.debug("integration failure treated as -inf: %s", exc)
            return -np.inf
        sigma = theta[4]
        residuals = self.counts - trajectory.I
        return float(
            -0.5 * np.dot(residuals, residuals) / sigma ** 2
            - self.n_points * math.log(sigma)
            - 0.5 * self.n_points * _LOG_2PI
        )


def log_posterior(
    params: Union[ParamVector, Sequence[float]],
    occ: Occurrence,
    spec: ModelSpec,
    prior: PriorBox,
) -> float:
    """
    Log-posterior under uniform priors (up to the prior's constant).

    sum_i [-(y_i - I(t_i))^2 / (2 sigma^2) - ln sigma] - (n/2) ln(2 pi), with y_i the
    occurrence counts, t_i the occurrence times rebased to t1 = 0, and -inf outside
    the prior box or when integration fails.
    """
    theta = params.as_array() if isinstance(params, ParamVector) else np.asarray(params, dtype=float)
    return PosteriorTarget(occ, spec, prior)(theta)


def initial_walkers(
    occ: Occurrence,
    prior: PriorBox,
    n_walkers: int,
    rng: np.random.Generator,
    target: Callable[[np.ndarray], float],
) -> Ensemble:
    """
    Draw walkers uniformly from a data-informed sub-box of the prior.

    beta, decay in (0, 10/dt_peak]; s0 in [peak, 100 x total]; i0 in [1, peak];
    sigma in (0, peak], each clipped to the prior. Walkers landing on -inf are redrawn.

    Raises:
        DegenerateFit: If some walker never reaches a finite log-posterior
    """
    counts = occ.counts
    peak_count = max(float(counts.max()), 1.0)
    total_count = max(float(counts.sum()), 1.0)
    dt_peak = occ.peak_time - occ.t1
    if dt_peak <= 0:
        dt_peak = occ.parent.step
    rate_high = 10.0 / dt_peak

    sub_low = np.array([0.0, 0.0, peak_count, 1.0, 0.0])
    sub_high = np.array([rate_high, rate_high, 100.0 * total_count, peak_count, peak_count])
    low = np.maximum(sub_low, prior.lower)
    high = np.minimum(sub_high, prior.upper)
    collapsed = low >= high
    low[collapsed] = prior.lower[collapsed]
    high[collapsed] = prior.upper[collapsed]

    walkers = np.empty((n_walkers, len(low)))
    log_posts = np.empty(n_walkers)
    for k in range(n_walkers):
        for _ in range(INIT_MAX_RETRIES):
            theta = rng.uniform(low, high)
            lp = target(theta)
            if np.isfinite(lp):
                walkers[k], log_posts[k] = theta, lp
                break
        else:
            raise DegenerateFit(f"walker {k} found no finite log-posterior after {INIT_MAX_RETRIES} draws")

    return Ensemble(walkers=walkers, log_posts=log_posts)


def _credible(values: np.ndarray) -> Tuple[float, float, float]:
    median, low, high = np.quantile(
        values, [0.5, CREDIBLE_LOW / 100.0, CREDIBLE_HIGH / 100.0], method="hazen"
    )
    return float(median), float(low), float(high)


def summarize(chain: np.ndarray, names: Optional[Sequence[str]] = None) -> ChainSummary:
    """
    Posterior medians, central 95% intervals and pairwise correlations.

    Args:
        chain (np.ndarray): Samples, shape (n,) or (n, dim)
        names (Optional[Sequence[str]]): Parameter names (default: PARAM_NAMES or p0..)

    Returns:
        ChainSummary: Quantiles per parameter; correlations of zero-variance
        parameters are reported as 0 and flag the summary as degenerate

    Raises:
        ChainTooShort: If the chain has fewer than 100 samples
    """
    chain = np.asarray(chain, dtype=float)
    if chain.ndim == 1:
        chain = chain[:, None]
    n_samples, dim = chain.shape
    if n_samples < MIN_CHAIN_LENGTH:
        raise ChainTooShort(f"need at least {MIN_CHAIN_LENGTH} samples, got {n_samples}")

    if names is None:
        names = PARAM_NAMES if dim == len(PARAM_NAMES) else [f"p{i}" for i in range(dim)]

    quantiles = {name: _credible(chain[:, i]) for i, name in enumerate(names)}

    spread = np.ptp(chain, axis=0)
    degenerate = bool(np.any(spread == 0))
    with np.errstate(all="ignore"):
        correlations = np.atleast_2d(np.corrcoef(chain, rowvar=False))
    correlations = np.nan_to_num(correlations, nan=0.0)
    flat = spread == 0
    correlations[flat, :] = 0.0
    correlations[:, flat] = 0.0

    return ChainSummary(names=list(names), quantiles=quantiles, correlations=correlations, degenerate=degenerate)


def _autocorrelation(chain: np.ndarray) -> Dict[str, float]:
    """Integrated autocorrelation time per parameter, in sweeps."""
    with np.errstate(all="ignore"):
        tau = integrated_time(chain, quiet=True)
    return {name: float(value) for name, value in zip(PARAM_NAMES, tau)}


def fit(
    occ: Occurrence,
    spec: ModelSpec,
    config: Optional[FitConfig] = None,
    map_fn=map,
) -> FitResult:
    """
    Sample the posterior of one occurrence.

    Runs ceil(total_samples / W) sweeps, drops the burn-in share, summarizes
    the flattened chain and maps ℛ over it.

    Args:
        occ (Occurrence): Occurrence to fit
        spec (ModelSpec): Model kind
        config (Optional[FitConfig]): Sampler settings
        map_fn: map-like callable for half-ensemble evaluations

    Returns:
        FitResult: Posterior summary

    Raises:
        DegenerateFit: If acceptance < 2% or the chain collapsed
        ChainTooShort: If too few samples are kept
    """
    config = (config or FitConfig()).validate()
    dim = len(PARAM_NAMES)
    n_walkers = config.resolved_walkers(dim)
    prior = PriorBox.for_occurrence(occ, config.prior)
    target = PosteriorTarget(occ, spec, prior)

    init_seq, walker_seq = np.random.SeedSequence(config.seed).spawn(2)
    streams = walker_streams(walker_seq, n_walkers)
    ensemble = initial_walkers(occ, prior, n_walkers, np.random.default_rng(init_seq), target)

    n_sweeps = max(int(math.ceil(config.total_samples / n_walkers)), 1)
    burn_in = int(n_sweeps * config.burn_in_fraction)
    checkpoint = max(n_sweeps // 10, 1)

    def progress(sweep: int, total: int) -> None:
        if sweep % checkpoint == 0:
            logger.debug("%s/%s: sweep %d/%d", occ.parent.hashtag, spec.kind, sweep, total)

    state, chain, log_posts = run_ensemble(
        ensemble, target, n_sweeps, streams,
        a=config.stretch_a, burn_in=burn_in, map_fn=map_fn, progress=progress,
    )

    flat_chain = chain.reshape(-1, dim)
    flat_log_posts = log_posts.reshape(-1)
    check_fit_health(state.acceptance_fraction, flat_chain)

    summary = summarize(flat_chain)
    map_params = ParamVector.from_array(flat_chain[int(np.argmax(flat_log_posts))])
    r_chain = reproduction_numbers(spec, flat_chain)
    r_median, r_low, r_high = _credible(r_chain)

    diagnostics = {
        "accept_frac": state.acceptance_fraction,
        "autocorr": _autocorrelation(chain),
        "n_walkers": n_walkers,
        "n_sweeps": n_sweeps,
        "burn_in_sweeps": burn_in,
        "low_information": occ.low_information,
        "degenerate_correlation": summary.degenerate,
    }

    return FitResult(
        spec=spec,
        chain=flat_chain,
        log_posts=flat_log_posts,
        map_params=map_params,
        summaries=summary.quantiles,
        correlations=summary.correlations,
        r_chain=r_chain,
        r_number=r_median,
        r_interval=(r_low, r_high),
        diagnostics=diagnostics,
        hashtag=occ.parent.hashtag,
        location=occ.parent.location,
    )


def best_fit_trajectory(result: FitResult, occ: Occurrence) -> Trajectory:
    """Trajectory of the highest-posterior sample on the occurrence grid (times rebased to t1 = 0)."""
    return integrate(result.spec, result.map_params, occ.times - occ.t1)
