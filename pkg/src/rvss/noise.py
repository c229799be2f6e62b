"""Seed-noise characterization: exact scalar-product law vs sampled data.

The theoretical pmf combines the overlap law with the per-overlap scalar law:
P(s) = sum_v p_overlap(v) * p_scalar(v, s), supported on integer steps
s in [-2m, 2m] with scalar value s/(2m). Its standard deviation is 1/sqrt(dim)
(variance 1/dim), independent of m.

Sampling is chunked with per-chunk derived RNG streams, so the result is a
single deterministic function of (config, n_samples, rng_seed) no matter how
chunks would be scheduled.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .seeds import SpaceConfig, p_overlap, p_scalar
from .space import SemanticSpace

BIN_WIDTH = 0.002  # composite/tail histogram resolution
GAUSSIAN_REFERENCE_STD = 0.063  # figure-overlay reference only, never pass/fail
_CHUNK = 16384
_COMPOSITE_COMPONENTS = 5


@dataclass(frozen=True)
class ScalarPmf:
    """Exact distribution of seed scalar products on the s/(2m) lattice."""

    dim: int
    m: int
    steps: np.ndarray  # integer s from -2m to 2m
    probs: np.ndarray

    @property
    def values(self) -> np.ndarray:
        return self.steps / (2.0 * self.m)

    @property
    def std(self) -> float:
        mean = float(np.dot(self.values, self.probs))
        var = float(np.dot(self.values**2, self.probs)) - mean**2
        return math.sqrt(max(var, 0.0))


@dataclass(frozen=True)
class SeedHistogram:
    """Counts of sampled seed dot products, indexed by integer step s."""

    dim: int
    m: int
    steps: np.ndarray
    counts: np.ndarray
    sample_count: int

    @property
    def values(self) -> np.ndarray:
        return self.steps / (2.0 * self.m)

    @property
    def frequencies(self) -> np.ndarray:
        if self.sample_count == 0:
            return np.zeros_like(self.counts, dtype=np.float64)
        return self.counts / self.sample_count

    @property
    def std(self) -> float:
        if self.sample_count == 0:
            return 0.0
        mean = float(np.dot(self.values, self.counts)) / self.sample_count
        msq = float(np.dot(self.values**2, self.counts)) / self.sample_count
        return math.sqrt(max(msq - mean**2, 0.0))


@dataclass(frozen=True)
class BinnedHistogram:
    """Fixed-width histogram for continuous-valued samples."""

    edges: np.ndarray
    counts: np.ndarray
    sample_count: int
    mean: float
    std: float

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    @property
    def frequencies(self) -> np.ndarray:
        if self.sample_count == 0:
            return np.zeros_like(self.counts, dtype=np.float64)
        return self.counts / self.sample_count


def theoretical_pmf(config: SpaceConfig) -> ScalarPmf:
    nnz = config.nnz
    steps = np.arange(-nnz, nnz + 1, dtype=np.int64)
    overlaps = [p_overlap(v, config) for v in range(nnz + 1)]
    probs = np.zeros(len(steps), dtype=np.float64)
    for i, s in enumerate(steps):
        probs[i] = sum(
            overlaps[v] * p_scalar(v, int(s)) for v in range(abs(int(s)), nnz + 1)
        )
    return ScalarPmf(dim=config.dim, m=config.m, steps=steps, probs=probs)


def _chunk_rngs(rng_seed: int, n_chunks: int) -> list[np.random.Generator]:
    children = np.random.SeedSequence(rng_seed).spawn(n_chunks)
    return [np.random.default_rng(c) for c in children]


def _random_sign_rows(rng: np.random.Generator, n: int, config: SpaceConfig) -> np.ndarray:
    """n random seed vectors as dense ±1 rows (unnormalized), int8.

    Index sets are drawn by redrawing duplicate positions until each row is
    distinct, which is the sequential without-replacement scheme and hence an
    exactly uniform 2m-subset; signs are assigned by a per-row random
    permutation. Work is O(n * 2m) per pass rather than O(n * dim).
    """
    dim, m, nnz = config.dim, config.m, config.nnz
    idx = rng.integers(0, dim, size=(n, nnz), dtype=np.int64)
    while True:
        idx.sort(axis=1)
        dup = np.zeros(idx.shape, dtype=bool)
        dup[:, 1:] = idx[:, 1:] == idx[:, :-1]
        n_dup = int(dup.sum())
        if n_dup == 0:
            break
        idx[dup] = rng.integers(0, dim, size=n_dup, dtype=np.int64)
    order = np.argsort(rng.random((n, nnz)), axis=1, kind="stable")
    chosen = np.take_along_axis(idx, order, axis=1)
    rows = np.zeros((n, dim), dtype=np.int8)
    np.put_along_axis(rows, chosen[:, :m], 1, axis=1)
    np.put_along_axis(rows, chosen[:, m:], -1, axis=1)
    return rows


def sample_seed_noise(
    config: SpaceConfig,
    n_samples: int,
    rng_seed: int,
    mode: str = "seed",
) -> SeedHistogram | BinnedHistogram:
    """Sample dot products of random vector pairs.

    ``seed`` mode pairs two raw seed vectors; every value lands exactly on a
    multiple of 1/(2m). ``composite`` mode pairs two normalized sums of 5
    random seeds and bins the continuous values at width 0.002.
    """
    if n_samples < 0:
        raise DomainError(f"n_samples must be >= 0, got {n_samples}")
    if mode not in ("seed", "composite"):
        raise DomainError(f"unknown sampling mode: {mode!r}")
    nnz = config.nnz
    n_chunks = max(1, -(-n_samples // _CHUNK))
    rngs = _chunk_rngs(rng_seed, n_chunks)

    if mode == "seed":
        counts = np.zeros(2 * nnz + 1, dtype=np.int64)
        done = 0
        for rng in rngs:
            take = min(_CHUNK, n_samples - done)
            if take <= 0:
                break
            a = _random_sign_rows(rng, take, config)
            b = _random_sign_rows(rng, take, config)
            s_int = np.einsum("ij,ij->i", a, b, dtype=np.int64)
            counts += np.bincount(s_int + nnz, minlength=2 * nnz + 1)
            done += take
        return SeedHistogram(
            dim=config.dim,
            m=config.m,
            steps=np.arange(-nnz, nnz + 1, dtype=np.int64),
            counts=counts,
            sample_count=n_samples,
        )

    edges = np.arange(-1.0, 1.0 + BIN_WIDTH, BIN_WIDTH)
    counts = np.zeros(len(edges) - 1, dtype=np.int64)
    total = 0.0
    total_sq = 0.0
    done = 0
    for rng in rngs:
        take = min(_CHUNK, n_samples - done)
        if take <= 0:
            break
        sides = []
        for _ in range(2):
            acc = np.zeros((take, config.dim), dtype=np.int16)
            for _ in range(_COMPOSITE_COMPONENTS):
                acc += _random_sign_rows(rng, take, config)
            dense = acc.astype(np.float64)
            norms = np.linalg.norm(dense, axis=1)
            norms[norms == 0.0] = 1.0
            sides.append(dense / norms[:, None])
        vals = np.einsum("ij,ij->i", sides[0], sides[1])
        counts += np.histogram(np.clip(vals, -1.0, 1.0), bins=edges)[0]
        total += float(vals.sum())
        total_sq += float(np.dot(vals, vals))
        done += take
    mean = total / n_samples if n_samples else 0.0
    var = total_sq / n_samples - mean**2 if n_samples else 0.0
    return BinnedHistogram(
        edges=edges,
        counts=counts,
        sample_count=n_samples,
        mean=mean,
        std=math.sqrt(max(var, 0.0)),
    )


def tail_noise(space: SemanticSpace, term: str, start_rank: int, count: int) -> BinnedHistogram:
    """Histogram of a term's neighbor similarities at ranks [start, start+count).

    Ranks are 0-based positions in the descending similarity order over all
    non-degenerate terms (the query term included, at rank 0).
    """
    if start_rank < 0 or count < 1:
        raise DomainError(f"need start_rank >= 0 and count >= 1, got {start_rank}, {count}")
    tid = space.queryable_id(term)
    scores = space.matvec(space.vector(tid))
    scores = scores[~space.degenerate]
    if start_rank + count > len(scores):
        raise DomainError(
            f"rank range [{start_rank}, {start_rank + count}) exceeds "
            f"{len(scores)} scoreable terms"
        )
    ordered = np.sort(scores)[::-1]
    vals = ordered[start_rank : start_rank + count]
    edges = np.arange(-1.0, 1.0 + BIN_WIDTH, BIN_WIDTH)
    # float32 rows can push |similarity| a hair past 1; keep those in the edge bins
    counts = np.histogram(np.clip(vals, -1.0, 1.0), bins=edges)[0]
    return BinnedHistogram(
        edges=edges,
        counts=counts,
        sample_count=count,
        mean=float(vals.mean()),
        std=float(vals.std()),
    )


@dataclass(frozen=True)
class DeviationReport:
    """Per-step comparison of an empirical seed histogram against the pmf."""

    steps: np.ndarray
    theoretical: np.ndarray
    empirical: np.ndarray
    deviations: np.ndarray
    bands: np.ndarray  # 4 binomial standard errors per step
    max_abs_deviation: float
    passed: bool


def compare(theoretical: ScalarPmf, empirical: SeedHistogram | ScalarPmf) -> DeviationReport:
    """Check an empirical distribution against the pmf, point by point.

    A point passes when |p_hat - p| <= 4 * sqrt(p(1-p)/n). Comparing a pmf
    against itself yields zero deviation everywhere.
    """
    if isinstance(empirical, ScalarPmf):
        if len(empirical.steps) != len(theoretical.steps):
            raise DomainError("support mismatch between the two distributions")
        freqs = empirical.probs
        n = None
    else:
        if len(empirical.steps) != len(theoretical.steps):
            raise DomainError(
                f"support mismatch: theory has {len(theoretical.steps)} steps, "
                f"histogram has {len(empirical.steps)}"
            )
        freqs = empirical.frequencies
        n = empirical.sample_count
    p = theoretical.probs
    dev = np.abs(freqs - p)
    if n:
        bands = 4.0 * np.sqrt(p * (1.0 - p) / n)
    else:
        bands = np.zeros_like(p)
    return DeviationReport(
        steps=theoretical.steps.copy(),
        theoretical=p.copy(),
        empirical=np.asarray(freqs, dtype=np.float64).copy(),
        deviations=dev,
        bands=bands,
        max_abs_deviation=float(dev.max()) if len(dev) else 0.0,
        passed=bool(np.all(dev <= bands + 1e-15)),
    )


@dataclass(frozen=True)
class NoiseReport:
    """Config echo + theory vs experiment, ready for CSV/JSON emission."""

    dim: int
    m: int
    mode: str
    theoretical: ScalarPmf | None
    empirical: SeedHistogram | BinnedHistogram
    sample_count: int
    empirical_std: float
    theoretical_std: float
    max_abs_deviation: float | None
    passed: bool | None
    gaussian_reference_std: float = GAUSSIAN_REFERENCE_STD

    def csv_rows(self) -> list[tuple]:
        if isinstance(self.empirical, SeedHistogram):
            assert self.theoretical is not None
            return [
                ("value", "theoretical_p", "empirical_p"),
                *(
                    (float(v), float(p), float(f))
                    for v, p, f in zip(
                        self.theoretical.values,
                        self.theoretical.probs,
                        self.empirical.frequencies,
                    )
                ),
            ]
        # composite/tail: per-bin probability plus the figure's Gaussian overlay
        centers = self.empirical.centers
        sd = self.gaussian_reference_std
        gauss = (
            BIN_WIDTH
            * np.exp(-0.5 * (centers / sd) ** 2)
            / (sd * math.sqrt(2.0 * math.pi))
        )
        return [
            ("bin_center", "empirical_p", "gaussian_reference_p"),
            *(
                (float(c), float(f), float(g))
                for c, f, g in zip(centers, self.empirical.frequencies, gauss)
            ),
        ]

    def summary(self) -> dict:
        return {
            "dim": self.dim,
            "m": self.m,
            "mode": self.mode,
            "sample_count": self.sample_count,
            "empirical_std": self.empirical_std,
            "theoretical_std": self.theoretical_std,
            "max_abs_deviation": self.max_abs_deviation,
            "passed": self.passed,
        }


def make_report(
    config: SpaceConfig,
    empirical: SeedHistogram | BinnedHistogram,
    mode: str,
) -> NoiseReport:
    theory = theoretical_pmf(config)
    if isinstance(empirical, SeedHistogram):
        report = compare(theory, empirical)
        max_dev: float | None = report.max_abs_deviation
        passed: bool | None = report.passed
    else:
        max_dev = None
        passed = None
    return NoiseReport(
        dim=config.dim,
        m=config.m,
        mode=mode,
        theoretical=theory,
        empirical=empirical,
        sample_count=empirical.sample_count,
        empirical_std=empirical.std,
        theoretical_std=theory.std,
        max_abs_deviation=max_dev,
        passed=passed,
    )
