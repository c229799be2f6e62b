"""HTTP JSON facade over a loaded space.

Readers always see one immutable snapshot: every handler captures the
current (space, checksum) pair once, so a request begun before an update
completes is served entirely from the old snapshot, and every response
carries the checksum of the snapshot that produced it. Updates are
serialized through a non-blocking writer lock; a concurrent POST gets 409
instead of queueing.
"""
from __future__ import annotations

import hashlib
import threading
from bisect import bisect_left
from dataclasses import dataclass, field

from fastapi import FastAPI, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import query as query_mod
from . import store as store_mod
from .errors import (
    DegenerateTermError,
    DependentMinusError,
    DomainError,
    ParseError,
    TermNotFoundError,
)
from .noise import theoretical_pmf
from .seeds import SpaceConfig, n_seed
from .space import SemanticSpace, add_clique

MAX_TERMS_LIMIT = 1000


@dataclass(frozen=True)
class Snapshot:
    space: SemanticSpace
    checksum: str
    sorted_terms: tuple[str, ...] = field(default=())

    @classmethod
    def of(cls, space: SemanticSpace) -> "Snapshot":
        digest = hashlib.sha256(store_mod.dumps(space)).hexdigest()
        return cls(space=space, checksum=digest, sorted_terms=tuple(sorted(space.lexicon.terms)))


class SpaceSession:
    """Holds the active snapshot and serializes updates through one lock."""

    def __init__(self, space: SemanticSpace):
        self._snapshot = Snapshot.of(space)
        self._update_lock = threading.Lock()

    def snapshot(self) -> Snapshot:
        return self._snapshot

    def apply_clique(self, terms: list[str]):
        if not self._update_lock.acquire(blocking=False):
            raise HTTPException(status_code=409, detail="another update is in flight")
        try:
            space2, report = add_clique(self._snapshot.space, terms)
            snap2 = Snapshot.of(space2)
            self._snapshot = snap2  # atomic swap; in-flight readers keep the old one
            return report, snap2
        finally:
            self._update_lock.release()


class CliqueBody(BaseModel):
    terms: list[str]


def _parse_minus(raw: str) -> tuple[str, ...]:
    return tuple(t for t in (part.strip() for part in raw.split(",")) if t)


def create_app(space_source, cors_origins: tuple[str, ...] = ("*",)) -> FastAPI:
    """Build the API over a SemanticSpace instance or a store path."""
    space = space_source if isinstance(space_source, SemanticSpace) else store_mod.load(space_source)
    session = SpaceSession(space)
    app = FastAPI(title="rvss", docs_url=None, redoc_url=None)
    app.state.session = session
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(cors_origins),
        allow_methods=["GET", "POST"],
        allow_headers=["*"],
    )

    @app.exception_handler(TermNotFoundError)
    async def _not_found(request: Request, exc: TermNotFoundError):
        return JSONResponse(status_code=404, content={"detail": str(exc)})

    @app.exception_handler(DegenerateTermError)
    async def _degenerate(request: Request, exc: DegenerateTermError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.exception_handler(DependentMinusError)
    async def _dependent(request: Request, exc: DependentMinusError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.exception_handler(DomainError)
    async def _domain(request: Request, exc: DomainError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(ParseError)
    async def _parse(request: Request, exc: ParseError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/terms")
    def terms(prefix: str = "", limit: int = 100):
        if limit < 1 or limit > MAX_TERMS_LIMIT:
            raise HTTPException(status_code=400, detail=f"limit must be in [1, {MAX_TERMS_LIMIT}]")
        snap = session.snapshot()
        ordered = snap.sorted_terms
        out = []
        for i in range(bisect_left(ordered, prefix), len(ordered)):
            if not ordered[i].startswith(prefix):
                break
            out.append(ordered[i])
            if len(out) == limit:
                break
        return {"terms": out, "checksum": snap.checksum}

    @app.get("/neighbors")
    def neighbors(term: str, k: int = 100, minus: str = ""):
        snap = session.snapshot()
        result = query_mod.neighbors(snap.space, term, k, _parse_minus(minus))
        return {
            "query_term": result.query_term,
            "subtracted_terms": list(result.subtracted_terms),
            "k": result.k,
            "entries": [{"term": t, "similarity": s} for t, s in result.entries],
            "checksum": snap.checksum,
        }

    @app.get("/clusters")
    def clusters(term: str, minus: str = "", merge_threshold: float = 0.9, max_members: int = 20):
        snap = session.snapshot()
        result = query_mod.clusters(
            snap.space,
            term,
            _parse_minus(minus),
            merge_threshold=merge_threshold,
            max_members=max_members,
        )
        return {
            "query_term": result.query_term,
            "subtracted_terms": list(result.subtracted_terms),
            "clusters": [
                {
                    "label": list(c.label),
                    "centroid_similarity": c.centroid_similarity,
                    "members": [{"term": t, "similarity": s} for t, s in c.members],
                }
                for c in result.clusters
            ],
            "checksum": snap.checksum,
        }

    @app.get("/similarity")
    def similarity(a: str, b: str):
        snap = session.snapshot()
        sigma = query_mod.similarity(snap.space, a, b)
        return {
            "a": a,
            "b": b,
            "similarity": sigma,
            "distance": query_mod.distance(sigma),
            "checksum": snap.checksum,
        }

    @app.get("/noise/pmf")
    def noise_pmf(d: int, m: int):
        snap = session.snapshot()
        pmf = theoretical_pmf(SpaceConfig(dim=d, m=m))
        return {
            "d": d,
            "m": m,
            "values": pmf.values.tolist(),
            "probs": pmf.probs.tolist(),
            "std": pmf.std,
            "n_seed": str(n_seed(d, m)),
            "checksum": snap.checksum,
        }

    @app.post("/cliques")
    def post_clique(body: CliqueBody):
        report, snap = session.apply_clique(body.terms)
        return {
            "clique_id": report.clique_id,
            "created_terms": list(report.created_terms),
            "touched_terms": list(report.touched_terms),
            "degenerate_terms": list(report.degenerate_terms),
            "checksum": snap.checksum,
        }

    return app
