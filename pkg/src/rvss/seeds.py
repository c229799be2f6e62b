"""Sparse ternary seed vectors and their exact combinatorics.

A seed vector has ``dim`` coordinates: ``m`` equal to +1/sqrt(2m), ``m``
equal to -1/sqrt(2m) and the rest zero, so it has unit norm by construction
and the dot product of two seeds moves in steps of 1/(2m).

Seed generation is a pure function of (term bytes, global_seed, dim, m,
salt): a blake2b digest keys a splitmix64 stream from which 2m distinct
coordinates are drawn by unbiased rejection. No numpy RNG is involved, so
the index sets are bit-identical across processes and platforms.
"""
from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass
from fractions import Fraction
from math import comb, sqrt

import numpy as np

from .errors import DomainError

WEIGHTING_SCHEMES = ("tf-idf", "uniform")

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class SpaceConfig:
    """Build parameters: dimension, seed half-count, reproducibility seed, weighting."""

    dim: int
    m: int
    global_seed: int = 0
    weighting: str = "tf-idf"

    def __post_init__(self):
        if self.dim < 2 or self.m < 1:
            raise DomainError(f"need dim >= 2 and m >= 1, got dim={self.dim}, m={self.m}")
        # seeds must stay much sparser than the dimension
        if 4 * self.m > self.dim:
            raise DomainError(f"need 2m <= dim/2, got dim={self.dim}, m={self.m}")
        if not 0 <= self.global_seed < 1 << 64:
            raise DomainError(f"global_seed must fit in 64 bits, got {self.global_seed}")
        if self.weighting not in WEIGHTING_SCHEMES:
            raise DomainError(f"unknown weighting scheme: {self.weighting!r}")

    @property
    def nnz(self) -> int:
        return 2 * self.m

    @property
    def magnitude(self) -> float:
        return 1.0 / sqrt(2 * self.m)


@dataclass(frozen=True)
class SeedVector:
    """Index-set representation of one sparse ternary seed."""

    dim: int
    pos: np.ndarray  # sorted, size m
    neg: np.ndarray  # sorted, size m, disjoint from pos

    @property
    def m(self) -> int:
        return len(self.pos)

    @property
    def magnitude(self) -> float:
        return 1.0 / sqrt(2 * self.m)

    def to_dense(self, dtype=np.float64) -> np.ndarray:
        out = np.zeros(self.dim, dtype=dtype)
        out[self.pos] = self.magnitude
        out[self.neg] = -self.magnitude
        return out

    def index_key(self) -> bytes:
        """Hashable identity of the index sets, used for collision scans."""
        return self.pos.tobytes() + b"|" + self.neg.tobytes()


def _splitmix64(state: int) -> tuple[int, int]:
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, z ^ (z >> 31)


def make_seed(term: str, config: SpaceConfig, salt: int = 0) -> SeedVector:
    """Deterministically derive the seed vector of a term.

    The first m distinct coordinates drawn become positive, the next m
    negative. ``salt`` is bumped by the build's collision repair and stored
    alongside the term.
    """
    if not term:
        raise DomainError("term must be non-empty")
    key = struct.pack("<QLLL", config.global_seed, salt & 0xFFFFFFFF, config.dim, config.m)
    digest = hashlib.blake2b(term.encode("utf-8"), key=key, digest_size=8).digest()
    state = int.from_bytes(digest, "little")
    # reject draws >= the largest multiple of dim so idx = u % dim is unbiased
    limit = (1 << 64) - ((1 << 64) % config.dim)
    chosen: list[int] = []
    seen: set[int] = set()
    want = config.nnz
    while len(chosen) < want:
        state, u = _splitmix64(state)
        if u >= limit:
            continue
        idx = u % config.dim
        if idx in seen:
            continue
        seen.add(idx)
        chosen.append(idx)
    m = config.m
    return SeedVector(
        dim=config.dim,
        pos=np.sort(np.asarray(chosen[:m], dtype=np.int32)),
        neg=np.sort(np.asarray(chosen[m:], dtype=np.int32)),
    )


def n_seed(dim: int, m: int) -> int:
    """Exact count of distinct seed vectors: C(dim, 2m) * C(2m, m).

    Arbitrary-precision: values reach 10^255 at (2500, 50).
    """
    if m < 1 or dim < 1:
        raise DomainError(f"need dim >= 1 and m >= 1, got dim={dim}, m={m}")
    if 2 * m > dim:
        raise DomainError(f"need 2m <= dim, got dim={dim}, m={m}")
    return comb(dim, 2 * m) * comb(2 * m, m)


def p_overlap(v: int, config: SpaceConfig) -> float:
    """Probability of overlap v between two randomly selected seed vectors.

    Binomial form with p = 2m/dim, evaluated exactly in rationals before the
    final float conversion so large (dim, m) cannot overflow.
    """
    nnz = config.nnz
    if not 0 <= v <= nnz:
        raise DomainError(f"overlap must lie in [0, {nnz}], got {v}")
    p = Fraction(nnz, config.dim)
    return float(comb(nnz, v) * p**v * (1 - p) ** (nnz - v))


def p_scalar(v: int, s: int) -> float:
    """Probability that an overlap of v coordinates yields the scalar s/(2m).

    Zero when v + s is odd (the scalar lives on integer steps only).
    """
    if v < 0:
        raise DomainError(f"overlap must be >= 0, got {v}")
    if abs(s) > v:
        raise DomainError(f"scalar step must lie in [-{v}, {v}], got {s}")
    if (v + s) % 2:
        return 0.0
    return float(Fraction(comb(v, (v + s) // 2), 1 << v))


def seed_dot(a: SeedVector, b: SeedVector) -> float:
    """Exact sparse dot product; always an integer multiple of 1/(2m)."""
    if a.dim != b.dim or a.m != b.m:
        raise DomainError(
            f"mismatched seed shapes: dim {a.dim} vs {b.dim}, m {a.m} vs {b.m}"
        )
    ap, an = set(a.pos.tolist()), set(a.neg.tolist())
    bp, bn = set(b.pos.tolist()), set(b.neg.tolist())
    agree = len(ap & bp) + len(an & bn)
    disagree = len(ap & bn) + len(an & bp)
    return (agree - disagree) / (2 * a.m)
