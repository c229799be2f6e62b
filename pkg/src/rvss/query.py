"""Similarity, distance, homonym sense subtraction and neighborhood queries.

Sense subtraction orthonormalizes the subtracted term vectors in the given
order (classical Gram-Schmidt with one re-orthogonalization pass), then
removes each projection from the base vector. The residual is deliberately
NOT renormalized: reported similarities of a subtracted query drop below 1,
which is the honest reading of post-subtraction dot products. Pass
``renormalize=True`` for cosine semantics on the residual.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DependentMinusError, DomainError
from .space import SemanticSpace

# residual norm below which a subtrahend is linearly dependent on the others
DEPENDENT_NORM = 1e-6


@dataclass(frozen=True)
class NeighborList:
    query_term: str
    subtracted_terms: tuple[str, ...]
    k: int
    entries: tuple[tuple[str, float], ...]  # sorted by non-increasing similarity


@dataclass(frozen=True)
class Cluster:
    label: tuple[str, ...]  # terms of the seeding clique(s), id order
    centroid_similarity: float  # centroid vs (possibly subtracted) query vector
    members: tuple[tuple[str, float], ...]


@dataclass(frozen=True)
class ClusterSet:
    query_term: str
    subtracted_terms: tuple[str, ...]
    clusters: tuple[Cluster, ...]


def similarity(space: SemanticSpace, a: str, b: str) -> float:
    """Inner product of the two unit term vectors, in [-1, 1]."""
    va = space.vector(space.queryable_id(a))
    vb = space.vector(space.queryable_id(b))
    return float(np.dot(va, vb))


def distance(sigma: float) -> float:
    """Euclidean distance between unit vectors of similarity sigma: sqrt(2(1-sigma))."""
    if not -1.0 - 1e-6 <= sigma <= 1.0 + 1e-6:
        raise DomainError(f"similarity out of range [-1, 1]: {sigma}")
    return math.sqrt(2.0 * (1.0 - min(1.0, max(-1.0, sigma))))


def _orthonormal_minus_basis(space: SemanticSpace, minus: tuple[str, ...]) -> np.ndarray:
    """Orthonormalize the minus-term vectors in order; rows form the basis."""
    basis = np.zeros((len(minus), space.config.dim), dtype=np.float64)
    for j, term in enumerate(minus):
        v = space.vector(space.queryable_id(term))
        u = v.copy()
        for _ in range(2):  # second pass for numerical hygiene
            u -= basis[:j].T @ (basis[:j] @ u)
        norm = float(np.linalg.norm(u))
        if norm < DEPENDENT_NORM:
            raise DependentMinusError(term)
        basis[j] = u / norm
    return basis


def _subtract(vec: np.ndarray, basis: np.ndarray) -> np.ndarray:
    if len(basis) == 0:
        return vec
    return vec - basis.T @ (basis @ vec)


def orthogonalize(
    space: SemanticSpace,
    base: str,
    minus: tuple[str, ...] | list[str] = (),
    renormalize: bool = False,
) -> np.ndarray:
    """Base term vector with the subtracted terms' components removed.

    The result is orthogonal to every minus-term vector. Subtracting the base
    itself is rejected; a minus term linearly dependent on the preceding ones
    raises DependentMinusError naming it.
    """
    minus = tuple(minus)
    if base in minus:
        raise DomainError(f"cannot subtract the query term itself: {base}")
    base_vec = space.vector(space.queryable_id(base))
    basis = _orthonormal_minus_basis(space, minus)
    out = _subtract(base_vec, basis)
    if renormalize:
        norm = float(np.linalg.norm(out))
        if norm < DEPENDENT_NORM:
            raise DependentMinusError(base)
        out = out / norm
    return out


def _ranked(space: SemanticSpace, q: np.ndarray, k: int) -> tuple[tuple[str, float], ...]:
    scores = space.matvec(q)
    scores[space.degenerate] = -np.inf
    # stable sort on the negated scores: ties break by ascending term id
    order = np.argsort(-scores, kind="stable")
    n_scoreable = int(np.count_nonzero(~space.degenerate))
    top = order[: min(k, n_scoreable)]
    return tuple((space.lexicon.terms[i], float(scores[i])) for i in top)


def neighbors(
    space: SemanticSpace,
    term: str,
    k: int,
    minus: tuple[str, ...] | list[str] = (),
    renormalize: bool = False,
) -> NeighborList:
    """Top-k terms by similarity to the (possibly subtracted) query vector.

    Subtracted terms stay scoreable; their similarity is ~0 by construction,
    so they drop out of the head of the list on their own.
    """
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    minus = tuple(minus)
    q = orthogonalize(space, term, minus, renormalize=renormalize)
    return NeighborList(
        query_term=term,
        subtracted_terms=minus,
        k=k,
        entries=_ranked(space, q, k),
    )


def clusters(
    space: SemanticSpace,
    term: str,
    minus: tuple[str, ...] | list[str] = (),
    merge_threshold: float = 0.9,
    max_members: int = 20,
) -> ClusterSet:
    """Group the query term's neighborhood by its cliques.

    One cluster per clique containing the term; cliques whose centroids agree
    beyond ``merge_threshold`` fuse into one cluster. Each centroid is the
    normalized sum of the member term vectors; members are the centroid's top
    neighbors after applying the same sense subtraction as the query.
    """
    minus = tuple(minus)
    tid = space.queryable_id(term)
    if term in minus:
        raise DomainError(f"cannot subtract the query term itself: {term}")
    lex = space.lexicon

    clique_ids = list(lex.membership[tid])
    centroids = []
    kept_ids = []
    for k_id in clique_ids:
        raw = np.zeros(space.config.dim, dtype=np.float64)
        for member in lex.cliques[k_id]:
            raw += space.vector(member)
        norm = float(np.linalg.norm(raw))
        if norm < DEPENDENT_NORM:
            continue  # clique of all-degenerate members carries no signal
        centroids.append(raw / norm)
        kept_ids.append(k_id)

    # union-find merge of near-duplicate cliques
    parent = list(range(len(kept_ids)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(len(kept_ids)):
        for j in range(i + 1, len(kept_ids)):
            if float(np.dot(centroids[i], centroids[j])) > merge_threshold:
                parent[find(j)] = find(i)

    groups: dict[int, list[int]] = {}
    for i in range(len(kept_ids)):
        groups.setdefault(find(i), []).append(i)

    basis = _orthonormal_minus_basis(space, minus)
    query_vec = _subtract(space.vector(tid), basis)

    built = []
    for members_idx in groups.values():
        group_cliques = [kept_ids[i] for i in members_idx]
        member_ids = sorted({t for k_id in group_cliques for t in lex.cliques[k_id]})
        raw = np.zeros(space.config.dim, dtype=np.float64)
        for t in member_ids:
            raw += space.vector(t)
        centroid = raw / float(np.linalg.norm(raw))
        centroid_sub = _subtract(centroid, basis)
        built.append(
            (
                min(group_cliques),
                Cluster(
                    label=tuple(lex.terms[t] for t in member_ids),
                    centroid_similarity=float(np.dot(centroid_sub, query_vec)),
                    members=_ranked(space, centroid_sub, max_members),
                ),
            )
        )
    built.sort(key=lambda pair: (-pair[1].centroid_similarity, pair[0]))
    return ClusterSet(
        query_term=term,
        subtracted_terms=minus,
        clusters=tuple(c for _, c in built),
    )
