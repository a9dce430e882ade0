# -*- coding: utf-8 -*-
"""
Sampler Module
Affine-invariant ensemble MCMC with the stretch move.

Randomness comes from one generator per walker, so the half-ensemble
log-posterior evaluations can run in any order (or concurrently) without
changing the chain.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Union

import numpy as np

from config import DEFAULT_STRETCH_A
from validators import check_positive

logger = logging.getLogger(__name__)

LogDensity = Callable[[np.ndarray], float]
MapFunction = Callable[..., object]


@dataclass
class Ensemble:
    """Walker positions with their cached log-posterior values and move counters."""

    walkers: np.ndarray
    log_posts: np.ndarray
    step_count: int = 0
    accept_count: int = 0

    @property
    def n_walkers(self) -> int:
        return self.walkers.shape[0]

    @property
    def dim(self) -> int:
        return self.walkers.shape[1]

    @property
    def acceptance_fraction(self) -> float:
        proposed = self.step_count * self.n_walkers
        return self.accept_count / proposed if proposed else 0.0

    @classmethod
    def create(cls, walkers: np.ndarray, target: LogDensity, map_fn: MapFunction = map) -> "Ensemble":
        """
        Build an ensemble, evaluating the target at every walker.

        Args:
            walkers (np.ndarray): Initial positions, shape (W, dim), W even
            target (LogDensity): Log-posterior function
            map_fn (MapFunction): map-like callable for the evaluations

        Returns:
            Ensemble: Fresh ensemble with zero counters
        """
        walkers = np.array(walkers, dtype=float)
        if walkers.ndim != 2 or walkers.shape[0] % 2 != 0:
            raise ValueError(f"walkers must be a 2-D array with an even row count, got {walkers.shape}")
        log_posts = np.fromiter(map_fn(target, list(walkers)), dtype=float, count=walkers.shape[0])
        return cls(walkers=walkers, log_posts=log_posts)

    def copy(self) -> "Ensemble":
        return Ensemble(
            walkers=self.walkers.copy(),
            log_posts=self.log_posts.copy(),
            step_count=self.step_count,
            accept_count=self.accept_count,
        )


def walker_streams(seed: Union[int, np.random.SeedSequence], n_walkers: int) -> List[np.random.Generator]:
    """
    Derive one independent generator per walker from a seed.

    Args:
        seed (int | SeedSequence): Root seed of the fit
        n_walkers (int): Number of streams

    Returns:
        List[np.random.Generator]: Per-walker generators
    """
    root = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return [np.random.default_rng(child) for child in root.spawn(n_walkers)]


def _streams_for(rng, n_walkers: int) -> Sequence:
    if isinstance(rng, (list, tuple)):
        if len(rng) != n_walkers:
            raise ValueError(f"expected {n_walkers} walker streams, got {len(rng)}")
        return rng
    # a single generator is shared by every walker, consumed in walker order
    return [rng] * n_walkers


def stretch_move(
    ensemble: Ensemble,
    target: LogDensity,
    a: float = DEFAULT_STRETCH_A,
    rng=None,
    map_fn: MapFunction = map,
) -> Ensemble:
    """
    One full stretch-move sweep over both halves of the ensemble.

    For each walker k of the active half a complementary walker j is drawn
    from the other half, z from g(z) ~ 1/sqrt(z) on [1/a, a], and
    Y = X_j + z (X_k - X_j) is accepted with probability
    min(1, z^(dim-1) exp(logp(Y) - logp(X_k))). The second half moves against
    the already-updated first half.

    Args:
        ensemble (Ensemble): Current state (left untouched)
        target (LogDensity): Log-posterior function
        a (float): Stretch scale, > 1
        rng: Sequence of per-walker generators, or one shared generator
        map_fn (MapFunction): map-like callable for the proposals' evaluations

    Returns:
        Ensemble: State after the sweep
    """
    a = check_positive(a, "stretch scale")
    if a <= 1:
        raise ValueError(f"stretch scale must exceed 1, got {a}")
    if rng is None:
        raise ValueError("stretch_move needs an rng")

    state = ensemble.copy()
    n_walkers, dim = state.walkers.shape
    streams = _streams_for(rng, n_walkers)
    half = n_walkers // 2
    halves = (np.arange(0, half), np.arange(half, n_walkers))

    accepted = 0
    for active, complement in (halves, halves[::-1]):
        others = state.walkers[complement]
        proposals = []
        log_z = np.empty(len(active))
        for i, k in enumerate(active):
            stream = streams[k]
            j = int(stream.integers(len(complement)))
            z = ((a - 1.0) * stream.random() + 1.0) ** 2 / a
            log_z[i] = math.log(z)
            proposals.append(others[j] + z * (state.walkers[k] - others[j]))

        new_log_posts = np.fromiter(map_fn(target, proposals), dtype=float, count=len(active))

        for i, k in enumerate(active):
            u = streams[k].random()
            new_lp = new_log_posts[i]
            if new_lp == -np.inf:
                continue
            log_ratio = (dim - 1) * log_z[i] + new_lp - state.log_posts[k]
            if log_ratio >= 0 or u < math.exp(log_ratio):
                state.walkers[k] = proposals[i]
                state.log_posts[k] = new_lp
                accepted += 1

    state.step_count += 1
    state.accept_count += accepted
    return state


def run_ensemble(
    ensemble: Ensemble,
    target: LogDensity,
    n_sweeps: int,
    rng,
    a: float = DEFAULT_STRETCH_A,
    burn_in: int = 0,
    map_fn: MapFunction = map,
    progress: Optional[Callable[[int, int], None]] = None,
):
    """
    Run repeated sweeps and keep the post-burn-in states.

    Args:
        ensemble (Ensemble): Starting ensemble
        target (LogDensity): Log-posterior function
        n_sweeps (int): Total sweeps
        rng: Per-walker generators
        a (float): Stretch scale
        burn_in (int): Leading sweeps to discard
        map_fn (MapFunction): map-like callable for evaluations
        progress (Optional[Callable]): Called as progress(sweep, n_sweeps)

    Returns:
        tuple: (final Ensemble, chain (kept, W, dim), log_posts (kept, W))
    """
    kept = max(n_sweeps - burn_in, 0)
    chain = np.empty((kept, ensemble.n_walkers, ensemble.dim))
    log_posts = np.empty((kept, ensemble.n_walkers))

    state = ensemble
    for sweep in range(n_sweeps):
        state = stretch_move(state, target, a=a, rng=rng, map_fn=map_fn)
        if sweep >= burn_in:
            chain[sweep - burn_in] = state.walkers
            log_posts[sweep - burn_in] = state.log_posts
        if progress is not None:
            progress(sweep + 1, n_sweeps)

    return state, chain, log_posts
