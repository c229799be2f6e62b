"""Semantic space construction and incremental update.

Two build routes exist on purpose. ``build_clique_vector`` and
``build_term_vector`` implement the construction definitionally, one vector
at a time; ``build_space`` assembles the same result through sparse matrix
products for throughput. The incremental path (``add_clique``) rebuilds only
the terms whose neighborhood the new clique touches and leaves every other
stored row bit-identical.

Accumulation happens in float64, storage is float32.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .errors import DegenerateTermError, DomainError
from .lexicon import Lexicon
from .seeds import SeedVector, SpaceConfig, make_seed

# raw sums below this norm are treated as zero vectors
DEGENERATE_NORM = 1e-9
_CHUNK_ROWS = 4096


def compute_idf(lexicon: Lexicon) -> np.ndarray:
    """Natural-log inverse clique frequency per term: ln(n_cliques / df)."""
    df = np.array([len(m) for m in lexicon.membership], dtype=np.float64)
    if lexicon.n_cliques == 0:
        return np.zeros(0, dtype=np.float64)
    return np.log(lexicon.n_cliques / df)


def weight(t_i: int, c_k: int, lexicon: Lexicon, scheme: str = "tf-idf") -> float:
    """Weight of term ``t_i`` inside clique ``c_k``.

    tf-idf form: (1 + ln tf) * ln(n_cliques / df). tf is the occurrence count
    of the term within the clique, which is always 1 after within-clique
    dedup, so the first factor collapses to 1.
    """
    if c_k < 0 or c_k >= lexicon.n_cliques or t_i not in lexicon.cliques[c_k]:
        raise DomainError(f"term {t_i} is not a member of clique {c_k}")
    if scheme == "uniform":
        return 1.0
    tf = 1
    df = len(lexicon.membership[t_i])
    return (1.0 + math.log(tf)) * math.log(lexicon.n_cliques / df)


class SeedProvider:
    """Lazily derives and caches per-term seed vectors from (term, salt)."""

    def __init__(self, lexicon: Lexicon, config: SpaceConfig, salts: np.ndarray):
        self._lexicon = lexicon
        self._config = config
        self._salts = salts
        self._cache: dict[int, SeedVector] = {}

    def __getitem__(self, term_id: int) -> SeedVector:
        seed = self._cache.get(term_id)
        if seed is None:
            seed = make_seed(
                self._lexicon.terms[term_id], self._config, int(self._salts[term_id])
            )
            self._cache[term_id] = seed
        return seed


@dataclass
class SpaceInputs:
    """Everything needed to materialize vectors: lexicon, config, seeds, idf."""

    lexicon: Lexicon
    config: SpaceConfig
    seeds: SeedProvider
    idf: np.ndarray  # float64 weight factor per term (ones for uniform)

    @classmethod
    def derive(cls, lexicon: Lexicon, config: SpaceConfig) -> tuple["SpaceInputs", np.ndarray, dict[bytes, int]]:
        """Derive seeds (with collision repair) and weights for a whole lexicon.

        Returns the inputs, the per-term salt array and the index-set registry
        used to detect collisions.
        """
        salts = np.zeros(lexicon.n_terms, dtype=np.uint32)
        registry: dict[bytes, int] = {}
        provider = SeedProvider(lexicon, config, salts)
        for tid, term in enumerate(lexicon.terms):
            salt = 0
            seed = make_seed(term, config, salt)
            while seed.index_key() in registry:
                salt += 1
                seed = make_seed(term, config, salt)
            salts[tid] = salt
            registry[seed.index_key()] = tid
            provider._cache[tid] = seed
        idf = _idf_for(lexicon, config)
        return cls(lexicon, config, provider, idf), salts, registry


def _idf_for(lexicon: Lexicon, config: SpaceConfig) -> np.ndarray:
    if config.weighting == "uniform":
        return np.ones(lexicon.n_terms, dtype=np.float64)
    return compute_idf(lexicon)


def build_clique_vector(inputs: SpaceInputs, c_k: int) -> np.ndarray:
    """Weighted sum of the member seed vectors; dense float64, not normalized."""
    if c_k < 0 or c_k >= inputs.lexicon.n_cliques:
        raise DomainError(f"no such clique: {c_k}")
    out = np.zeros(inputs.config.dim, dtype=np.float64)
    for tid in inputs.lexicon.cliques[c_k]:
        seed = inputs.seeds[tid]
        w = inputs.idf[tid] * seed.magnitude
        out[seed.pos] += w
        out[seed.neg] -= w
    return out


def build_term_vector(
    inputs: SpaceInputs, t_i: int, _clique_cache: dict[int, np.ndarray] | None = None
) -> np.ndarray:
    """Unit-normalized sum of the clique vectors containing the term.

    Raises DegenerateTermError when every contribution is zero-weighted.
    ``_clique_cache`` lets batch rebuilds share clique vectors.
    """
    inputs.lexicon.check_id(t_i)
    raw = np.zeros(inputs.config.dim, dtype=np.float64)
    for k in inputs.lexicon.membership[t_i]:
        if _clique_cache is not None:
            vec = _clique_cache.get(k)
            if vec is None:
                vec = _clique_cache[k] = build_clique_vector(inputs, k)
        else:
            vec = build_clique_vector(inputs, k)
        raw += vec
    norm = float(np.linalg.norm(raw))
    if norm < DEGENERATE_NORM:
        raise DegenerateTermError(inputs.lexicon.terms[t_i])
    return raw / norm


@dataclass(frozen=True)
class BuildReport:
    n_terms: int
    n_cliques: int
    degenerate_terms: tuple[str, ...]
    salted_terms: tuple[tuple[str, int], ...]
    seconds: float

    @property
    def vectors_per_second(self) -> float:
        return self.n_terms / self.seconds if self.seconds > 0 else float("inf")


@dataclass(frozen=True)
class UpdateReport:
    """What one add_clique touched: the new clique id, created terms and every
    term id whose vector was recomputed (created terms included)."""

    clique_id: int
    created_terms: tuple[str, ...]
    touched_terms: tuple[int, ...]
    degenerate_terms: tuple[str, ...]


class SemanticSpace:
    """Config + lexicon + one normalized float32 vector per term.

    Immutable by convention: queries never mutate it, and the update path
    returns a fresh instance sharing no mutable state.
    """

    def __init__(
        self,
        config: SpaceConfig,
        lexicon: Lexicon,
        vectors: np.ndarray,
        salts: np.ndarray,
        degenerate: np.ndarray,
        idf: np.ndarray,
        report: BuildReport | None = None,
        seed_registry: dict[bytes, int] | None = None,
    ):
        if vectors.shape != (lexicon.n_terms, config.dim):
            raise DomainError(
                f"vector block shape {vectors.shape} does not match "
                f"{lexicon.n_terms} terms x dim {config.dim}"
            )
        self.config = config
        self.lexicon = lexicon
        self.vectors = vectors  # float32, row order = term id order
        self.salts = salts
        self.degenerate = degenerate
        self.idf = idf
        self.report = report
        self._seed_registry = seed_registry

    @property
    def n_terms(self) -> int:
        return self.lexicon.n_terms

    def inputs(self) -> SpaceInputs:
        return SpaceInputs(
            self.lexicon, self.config, SeedProvider(self.lexicon, self.config, self.salts), self.idf
        )

    def queryable_id(self, term: str) -> int:
        """Resolve a term string, rejecting unknown and degenerate terms."""
        tid = self.lexicon.term_id(term)
        if self.degenerate[tid]:
            raise DegenerateTermError(term)
        return tid

    def vector(self, term_id: int) -> np.ndarray:
        """Stored row as float64 (exact cast)."""
        return self.vectors[term_id].astype(np.float64)

    def matvec(self, q: np.ndarray) -> np.ndarray:
        """Scores of every stored vector against q, accumulated in float64."""
        q64 = np.asarray(q, dtype=np.float64)
        out = np.empty(self.n_terms, dtype=np.float64)
        for lo in range(0, self.n_terms, _CHUNK_ROWS):
            hi = min(lo + _CHUNK_ROWS, self.n_terms)
            out[lo:hi] = self.vectors[lo:hi].astype(np.float64) @ q64
        return out

    def seed_registry(self) -> dict[bytes, int]:
        """index-set -> term id map, derived on first use (seeds are re-derivable)."""
        if self._seed_registry is None:
            registry: dict[bytes, int] = {}
            seeds = SeedProvider(self.lexicon, self.config, self.salts)
            for tid in range(self.n_terms):
                registry[seeds[tid].index_key()] = tid
            self._seed_registry = registry
        return self._seed_registry


def _assemble(inputs: SpaceInputs) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized build of all term vectors.

    T = B @ (W @ S): S holds seed rows, W the per-clique member weights and
    B the term/clique incidence. Returns (float32 vectors, degenerate mask).
    """
    lex, config = inputs.lexicon, inputs.config
    n, dim, nnz = lex.n_terms, config.dim, config.nnz
    mag = config.magnitude

    # S: one sorted sparse row per seed
    s_indices = np.empty(n * nnz, dtype=np.int32)
    s_data = np.empty(n * nnz, dtype=np.float64)
    for tid in range(n):
        seed = inputs.seeds[tid]
        row = np.concatenate([seed.pos, seed.neg])
        vals = np.concatenate(
            [np.full(config.m, mag), np.full(config.m, -mag)]
        )
        order = np.argsort(row, kind="stable")
        s_indices[tid * nnz : (tid + 1) * nnz] = row[order]
        s_data[tid * nnz : (tid + 1) * nnz] = vals[order]
    s_indptr = np.arange(0, (n + 1) * nnz, nnz, dtype=np.int64)
    S = sparse.csr_matrix((s_data, s_indices, s_indptr), shape=(n, dim))

    # W: clique rows of member weights; B: its unweighted transpose pattern
    member_counts = np.fromiter((len(c) for c in lex.cliques), dtype=np.int64, count=lex.n_cliques)
    w_indptr = np.concatenate([[0], np.cumsum(member_counts)])
    w_indices = np.fromiter(
        (tid for c in lex.cliques for tid in c), dtype=np.int32, count=int(w_indptr[-1])
    )
    w_data = inputs.idf[w_indices]
    W = sparse.csr_matrix((w_data, w_indices, w_indptr), shape=(lex.n_cliques, n))
    B = sparse.csr_matrix(
        (np.ones(len(w_indices)), w_indices, w_indptr), shape=(lex.n_cliques, n)
    ).T.tocsr()

    C = (W @ S).tocsr()

    vectors = np.zeros((n, dim), dtype=np.float32)
    degenerate = np.zeros(n, dtype=bool)
    for lo in range(0, n, _CHUNK_ROWS):
        hi = min(lo + _CHUNK_ROWS, n)
        block = (B[lo:hi] @ C).toarray()
        norms = np.linalg.norm(block, axis=1)
        degen = norms < DEGENERATE_NORM
        norms[degen] = 1.0
        block /= norms[:, None]
        block[degen] = 0.0
        vectors[lo:hi] = block.astype(np.float32)
        degenerate[lo:hi] = degen
    return vectors, degenerate


def build_space(lexicon: Lexicon, config: SpaceConfig) -> SemanticSpace:
    """Build the whole space: seeds (collision-repaired), weights, vectors."""
    t0 = time.perf_counter()
    inputs, salts, registry = SpaceInputs.derive(lexicon, config)
    vectors, degenerate = _assemble(inputs)
    seconds = time.perf_counter() - t0
    report = BuildReport(
        n_terms=lexicon.n_terms,
        n_cliques=lexicon.n_cliques,
        degenerate_terms=tuple(lexicon.terms[i] for i in np.flatnonzero(degenerate)),
        salted_terms=tuple(
            (lexicon.terms[i], int(s)) for i, s in enumerate(salts) if s
        ),
        seconds=seconds,
    )
    return SemanticSpace(
        config, lexicon, vectors, salts, degenerate, inputs.idf, report, registry
    )


def _rebuild_rows(
    inputs: SpaceInputs, term_ids: list[int]
) -> tuple[np.ndarray, np.ndarray]:
    """Recompute the given term vectors definitionally, sharing clique vectors."""
    cache: dict[int, np.ndarray] = {}
    rows = np.zeros((len(term_ids), inputs.config.dim), dtype=np.float32)
    degen = np.zeros(len(term_ids), dtype=bool)
    for j, t in enumerate(term_ids):
        try:
            rows[j] = build_term_vector(inputs, t, _clique_cache=cache).astype(np.float32)
        except DegenerateTermError:
            degen[j] = True
    return rows, degen


def add_clique(space: SemanticSpace, terms: list[str]) -> tuple[SemanticSpace, UpdateReport]:
    """Insert one clique and rebuild exactly the touched neighborhood.

    New terms get fresh seeds (collision-checked) and idf values computed
    against the post-insertion clique count; existing terms keep their frozen
    idf, so the result matches a frozen-idf full rebuild. Vectors of terms
    outside the union of the new clique members' neighborhoods are
    bit-unchanged. Requires exclusive access to the space.
    """
    lex2, clique_id, created = space.lexicon.with_clique(terms)

    registry = dict(space.seed_registry())
    new_salts = np.zeros(len(created), dtype=np.uint32)
    config = space.config
    for j, tid in enumerate(created):
        salt = 0
        seed = make_seed(lex2.terms[tid], config, salt)
        while seed.index_key() in registry:
            salt += 1
            seed = make_seed(lex2.terms[tid], config, salt)
        new_salts[j] = salt
        registry[seed.index_key()] = tid

    salts2 = np.concatenate([space.salts, new_salts])
    if config.weighting == "uniform":
        new_idf = np.ones(len(created), dtype=np.float64)
    else:
        new_idf = np.array(
            [math.log(lex2.n_cliques / len(lex2.membership[tid])) for tid in created],
            dtype=np.float64,
        )
    idf2 = np.concatenate([space.idf, new_idf])

    inputs2 = SpaceInputs(lex2, config, SeedProvider(lex2, config, salts2), idf2)
    touched: set[int] = set()
    for tid in lex2.cliques[clique_id]:
        touched.update(lex2.neighborhood(tid))
    touched_list = sorted(touched)

    rows, degen = _rebuild_rows(inputs2, touched_list)
    vectors2 = np.concatenate(
        [space.vectors, np.zeros((len(created), config.dim), dtype=np.float32)]
    )
    degenerate2 = np.concatenate([space.degenerate, np.zeros(len(created), dtype=bool)])
    vectors2[touched_list] = rows
    degenerate2[touched_list] = degen

    report = UpdateReport(
        clique_id=clique_id,
        created_terms=tuple(lex2.terms[t] for t in created),
        touched_terms=tuple(touched_list),
        degenerate_terms=tuple(
            lex2.terms[t] for t, d in zip(touched_list, degen) if d
        ),
    )
    space2 = SemanticSpace(
        config, lex2, vectors2, salts2, degenerate2, idf2,
        report=space.report, seed_registry=registry,
    )
    return space2, report


def rebuild(space: SemanticSpace) -> SemanticSpace:
    """Full rebuild with freshly computed weights (periodic re-weighting)."""
    return build_space(space.lexicon, space.config)


def build_space_frozen_idf(
    lexicon: Lexicon, config: SpaceConfig, salts: np.ndarray, idf: np.ndarray
) -> SemanticSpace:
    """Full rebuild with an externally supplied idf table and salts.

    This is the oracle counterpart of add_clique: rebuilding everything from
    scratch with the frozen weights must agree with the incremental result.
    """
    inputs = SpaceInputs(lexicon, config, SeedProvider(lexicon, config, salts), idf)
    vectors, degenerate = _assemble(inputs)
    return SemanticSpace(config, lexicon, vectors, salts, degenerate, idf)
