"""Binary vector-store serialization (RVSS format, little-endian throughout).

Layout:

    offset  size        field
    0       4           magic "RVSS"
    4       4           format version (u32) = 1
    8       4           dim (u32)
    12      4           m (u32)
    16      8           global_seed (u64)
    24      1           weighting (u8): 0 = uniform, 1 = tf-idf
    25      4           n_terms (u32)
    29      4           n_cliques (u32)
    33      ...         term table:   n_terms x { len u32, utf-8 bytes, salt u32, degenerate u8 }
    ...     ...         clique table: n_cliques x { count u32, count x term-id u32 }
    ...     n*dim*4     coordinate block, float32 rows in term-id order

``load(save(x))`` reproduces x's serialized form byte for byte. Structural
problems (bad magic, unknown version, truncation, trailing bytes, invalid
ids, norm drift beyond 1e-4 on non-degenerate rows) raise
StoreCorruptionError.
"""
from __future__ import annotations

import io
import struct

import numpy as np

from .errors import StoreCorruptionError
from .lexicon import Lexicon
from .seeds import SpaceConfig
from .space import SemanticSpace, _idf_for

MAGIC = b"RVSS"
FORMAT_VERSION = 1
HEADER_SIZE = 33
LOAD_NORM_TOLERANCE = 1e-4

_WEIGHTING_CODE = {"uniform": 0, "tf-idf": 1}
_WEIGHTING_NAME = {v: k for k, v in _WEIGHTING_CODE.items()}


def dumps(space: SemanticSpace) -> bytes:
    buf = io.BytesIO()
    save(space, buf)
    return buf.getvalue()


def save(space: SemanticSpace, sink) -> None:
    """Write the store to a path or binary file object."""
    if hasattr(sink, "write"):
        _write(space, sink)
    else:
        with open(sink, "wb") as fh:
            _write(space, fh)


def _write(space: SemanticSpace, fh) -> None:
    cfg, lex = space.config, space.lexicon
    fh.write(MAGIC)
    fh.write(
        struct.pack(
            "<LLLQBLL",
            FORMAT_VERSION,
            cfg.dim,
            cfg.m,
            cfg.global_seed,
            _WEIGHTING_CODE[cfg.weighting],
            lex.n_terms,
            lex.n_cliques,
        )
    )
    for tid, term in enumerate(lex.terms):
        raw = term.encode("utf-8")
        fh.write(struct.pack("<L", len(raw)))
        fh.write(raw)
        fh.write(struct.pack("<LB", int(space.salts[tid]), int(space.degenerate[tid])))
    for clique in lex.cliques:
        fh.write(struct.pack("<L", len(clique)))
        fh.write(struct.pack(f"<{len(clique)}L", *clique))
    coords = np.ascontiguousarray(space.vectors, dtype="<f4")
    fh.write(coords.tobytes())


def predicted_size(lexicon: Lexicon, dim: int) -> int:
    """Exact byte size a store for this lexicon will occupy."""
    size = HEADER_SIZE
    for term in lexicon.terms:
        size += 4 + len(term.encode("utf-8")) + 4 + 1
    for clique in lexicon.cliques:
        size += 4 + 4 * len(clique)
    size += lexicon.n_terms * dim * 4
    return size


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise StoreCorruptionError(
                f"truncated store: wanted {n} bytes at offset {self.pos}, "
                f"have {len(self.data) - self.pos}"
            )
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))


def loads(data: bytes) -> SemanticSpace:
    r = _Reader(data)
    if r.take(4) != MAGIC:
        raise StoreCorruptionError("bad magic: not an RVSS store")
    (version,) = r.unpack("<L")
    if version != FORMAT_VERSION:
        raise StoreCorruptionError(
            f"unsupported store version {version} (expected {FORMAT_VERSION})"
        )
    dim, m, global_seed, wcode, n_terms, n_cliques = r.unpack("<LLQBLL")
    if wcode not in _WEIGHTING_NAME:
        raise StoreCorruptionError(f"unknown weighting code {wcode}")
    config = SpaceConfig(dim=dim, m=m, global_seed=global_seed, weighting=_WEIGHTING_NAME[wcode])

    terms: list[str] = []
    salts = np.zeros(n_terms, dtype=np.uint32)
    degenerate = np.zeros(n_terms, dtype=bool)
    for tid in range(n_terms):
        (length,) = r.unpack("<L")
        try:
            term = r.take(length).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise StoreCorruptionError(f"term {tid} is not valid UTF-8") from exc
        salt, flag = r.unpack("<LB")
        if flag not in (0, 1):
            raise StoreCorruptionError(f"term {tid}: bad degenerate flag {flag}")
        terms.append(term)
        salts[tid] = salt
        degenerate[tid] = bool(flag)
    if len(set(terms)) != n_terms:
        raise StoreCorruptionError("duplicate term strings in store")

    cliques: list[tuple[int, ...]] = []
    for _ in range(n_cliques):
        (count,) = r.unpack("<L")
        ids = r.unpack(f"<{count}L")
        if any(i >= n_terms for i in ids):
            raise StoreCorruptionError("clique references a term id out of range")
        cliques.append(tuple(int(i) for i in ids))

    coords = r.take(n_terms * dim * 4)
    if r.pos != len(data):
        raise StoreCorruptionError(f"{len(data) - r.pos} trailing bytes after coordinate block")
    vectors = np.frombuffer(coords, dtype="<f4").reshape(n_terms, dim).copy()

    membership: list[list[int]] = [[] for _ in range(n_terms)]
    for k, clique in enumerate(cliques):
        for i in clique:
            membership[i].append(k)
    lexicon = Lexicon(
        terms=tuple(terms),
        cliques=tuple(cliques),
        membership=tuple(tuple(mm) for mm in membership),
    )

    norms = np.linalg.norm(vectors.astype(np.float64), axis=1)
    bad = ~degenerate & (np.abs(norms - 1.0) > LOAD_NORM_TOLERANCE)
    if bad.any():
        worst = int(np.argmax(np.abs(norms - 1.0) * ~degenerate))
        raise StoreCorruptionError(
            f"norm check failed for term {terms[worst]!r}: |v| = {norms[worst]:.6f}"
        )

    return SemanticSpace(
        config, lexicon, vectors, salts, degenerate, _idf_for(lexicon, config)
    )


def load(source) -> SemanticSpace:
    """Read a store from a path or binary file object."""
    if hasattr(source, "read"):
        return loads(source.read())
    with open(source, "rb") as fh:
        return loads(fh.read())
