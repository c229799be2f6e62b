"""Euclidean semantic spaces from synonym cliques via sparse ternary random indexing."""

from .errors import (
    DegenerateTermError,
    DependentMinusError,
    DomainError,
    ParseError,
    RvssError,
    StoreCorruptionError,
    TermNotFoundError,
)
from .lexicon import Lexicon, load_cliques, parse_cliques
from .noise import (
    compare,
    make_report,
    sample_seed_noise,
    tail_noise,
    theoretical_pmf,
)
from .query import (
    ClusterSet,
    NeighborList,
    clusters,
    distance,
    neighbors,
    orthogonalize,
    similarity,
)
from .seeds import SeedVector, SpaceConfig, make_seed, n_seed, p_overlap, p_scalar, seed_dot
from .space import (
    SemanticSpace,
    add_clique,
    build_clique_vector,
    build_space,
    build_term_vector,
    rebuild,
    weight,
)
from .store import load, loads, save, dumps

__version__ = "0.1.0"

__all__ = [
    "Lexicon",
    "SpaceConfig",
    "SeedVector",
    "SemanticSpace",
    "NeighborList",
    "ClusterSet",
    "parse_cliques",
    "load_cliques",
    "make_seed",
    "n_seed",
    "p_overlap",
    "p_scalar",
    "seed_dot",
    "weight",
    "build_clique_vector",
    "build_term_vector",
    "build_space",
    "add_clique",
    "rebuild",
    "save",
    "load",
    "dumps",
    "loads",
    "similarity",
    "distance",
    "orthogonalize",
    "neighbors",
    "clusters",
    "theoretical_pmf",
    "sample_seed_noise",
    "tail_noise",
    "compare",
    "make_report",
    "RvssError",
    "ParseError",
    "TermNotFoundError",
    "DomainError",
    "DegenerateTermError",
    "DependentMinusError",
    "StoreCorruptionError",
]
