"""Synonym-clique lexicon: the term/clique bipartite graph and its brute-force
similarity queries.

Source format: one clique per line, terms separated by ``;``. Lines starting
with ``#`` are comments, blank lines are skipped, multiword terms are joined
with ``_`` (``train_de_maison``). Terms are matched exactly after trimming
surrounding whitespace; no case folding or accent stripping. Duplicate clique
lines are kept as distinct cliques because weighting is frequency-sensitive.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import BinaryIO, Iterable, Union

from .errors import ParseError, TermNotFoundError

CliqueSource = Union[str, bytes, BinaryIO, Iterable[str]]

COMMENT_PREFIX = "#"
SEPARATOR = ";"


@dataclass(frozen=True)
class Lexicon:
    """Immutable term/clique incidence structure.

    ``cliques[k]`` is an ascending tuple of term ids (each of size >= 2, no
    duplicates); ``membership[i]`` is the ascending tuple of clique ids
    containing term ``i`` (the exact transpose of ``cliques``). ``warnings``
    records skipped input lines and is not part of structural equality.
    """

    terms: tuple[str, ...]
    cliques: tuple[tuple[int, ...], ...]
    membership: tuple[tuple[int, ...], ...]
    warnings: tuple[str, ...] = field(default=(), compare=False)

    @property
    def n_terms(self) -> int:
        return len(self.terms)

    @property
    def n_cliques(self) -> int:
        return len(self.cliques)

    def term_id(self, term: str) -> int:
        try:
            return self._ids[term]
        except KeyError:
            raise TermNotFoundError(term) from None

    def __contains__(self, term: str) -> bool:
        return term in self._ids

    def __post_init__(self):
        object.__setattr__(self, "_ids", {t: i for i, t in enumerate(self.terms)})

    def check_id(self, term_id: int) -> int:
        if not 0 <= term_id < self.n_terms:
            raise TermNotFoundError(f"#{term_id}")
        return term_id

    def neighborhood(self, term_id: int) -> frozenset[int]:
        """All distinct terms sharing at least one clique with ``term_id``,
        including the term itself."""
        self.check_id(term_id)
        out = {term_id}
        for k in self.membership[term_id]:
            out.update(self.cliques[k])
        return frozenset(out)

    def diameter(self, term_id: int) -> int:
        return len(self.neighborhood(term_id))

    def overlap_similarity(self, t_i: int, t_k: int) -> int:
        """Cardinality of the intersection of the two neighborhoods."""
        return len(self.neighborhood(t_i) & self.neighborhood(t_k))

    def degree_of_separation(self, t_i: int, t_k: int) -> int | None:
        """Minimum number of clique hops between two terms.

        Terms sharing a clique are at separation 1. Returns None when the
        terms lie in disconnected components (islands); never a sentinel
        number. Separation of a term with itself is 0.
        """
        self.check_id(t_i)
        self.check_id(t_k)
        if t_i == t_k:
            return 0
        # BFS over the bipartite graph, expanding one clique hop at a time.
        seen_terms = {t_i}
        seen_cliques: set[int] = set()
        frontier = {t_i}
        hops = 0
        while frontier:
            hops += 1
            nxt: set[int] = set()
            for t in frontier:
                for k in self.membership[t]:
                    if k in seen_cliques:
                        continue
                    seen_cliques.add(k)
                    nxt.update(self.cliques[k])
            nxt -= seen_terms
            if t_k in nxt:
                return hops
            seen_terms.update(nxt)
            frontier = nxt
        return None

    def to_clique_text(self) -> str:
        """Serialize back to the clique file format (round-trips exactly)."""
        lines = [SEPARATOR.join(self.terms[i] for i in c) for c in self.cliques]
        return "\n".join(lines) + ("\n" if lines else "")

    def with_clique(self, terms: Iterable[str]) -> tuple["Lexicon", int, tuple[int, ...]]:
        """Return a new lexicon with one clique appended.

        New terms are assigned ids after the existing ones, in order of first
        appearance. Returns (lexicon, clique id, ids of newly created terms).
        Cliques of fewer than 2 distinct terms are rejected.
        """
        cleaned = _clean_clique([str(t) for t in terms])
        if len(cleaned) < 2:
            raise ParseError(0, f"clique needs >= 2 distinct terms, got {cleaned}")
        new_terms = list(self.terms)
        ids = dict(self._ids)
        created = []
        for t in cleaned:
            if t not in ids:
                ids[t] = len(new_terms)
                new_terms.append(t)
                created.append(ids[t])
        clique = tuple(sorted(ids[t] for t in cleaned))
        clique_id = self.n_cliques
        membership = [list(m) for m in self.membership] + [[] for _ in created]
        for i in clique:
            membership[i].append(clique_id)
        return (
            Lexicon(
                terms=tuple(new_terms),
                cliques=self.cliques + (clique,),
                membership=tuple(tuple(m) for m in membership),
                warnings=self.warnings,
            ),
            clique_id,
            tuple(created),
        )


def _clean_clique(tokens: list[str]) -> list[str]:
    """Trim, drop empties, dedup preserving first appearance."""
    seen: dict[str, None] = {}
    for tok in tokens:
        t = tok.strip()
        if t:
            seen.setdefault(t)
    return list(seen)


def _iter_decoded_lines(source: CliqueSource) -> Iterable[str]:
    if isinstance(source, str):
        yield from source.splitlines()
        return
    if isinstance(source, bytes):
        raw_lines: Iterable[bytes] = source.splitlines()
    elif hasattr(source, "read"):  # binary stream
        raw_lines = source.read().splitlines()  # type: ignore[union-attr]
    else:
        yield from source
        return
    for n, raw in enumerate(raw_lines, start=1):
        try:
            yield raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(n, f"malformed UTF-8 ({exc.reason})") from exc


def parse_cliques(source: CliqueSource) -> Lexicon:
    """Parse clique lines into a Lexicon.

    Accepts a string, UTF-8 bytes, a binary stream, or an iterable of decoded
    lines. Undersized cliques are skipped with a recorded warning; malformed
    UTF-8 is fatal with the offending line number.
    """
    terms: list[str] = []
    ids: dict[str, int] = {}
    cliques: list[tuple[int, ...]] = []
    warnings: list[str] = []
    for n, line in enumerate(_iter_decoded_lines(source), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith(COMMENT_PREFIX):
            continue
        members = _clean_clique(stripped.split(SEPARATOR))
        if len(members) < 2:
            warnings.append(f"line {n}: clique has fewer than 2 distinct terms, skipped")
            continue
        for t in members:
            if t not in ids:
                ids[t] = len(terms)
                terms.append(t)
        cliques.append(tuple(sorted(ids[t] for t in members)))
    membership: list[list[int]] = [[] for _ in terms]
    for k, clique in enumerate(cliques):
        for i in clique:
            membership[i].append(k)
    return Lexicon(
        terms=tuple(terms),
        cliques=tuple(cliques),
        membership=tuple(tuple(m) for m in membership),
        warnings=tuple(warnings),
    )


def load_cliques(path) -> Lexicon:
    """Parse a clique file from disk (read as bytes so UTF-8 errors carry line numbers)."""
    with open(path, "rb") as fh:
        return parse_cliques(fh)


def diameter_stats(lexicon: Lexicon) -> dict:
    """min/mean/max of the neighborhood sizes, for comparison against a known corpus."""
    if lexicon.n_terms == 0:
        return {"n_terms": 0, "n_cliques": 0, "d_min": None, "d_mean": None, "d_max": None}
    sizes = [lexicon.diameter(i) for i in range(lexicon.n_terms)]
    return {
        "n_terms": lexicon.n_terms,
        "n_cliques": lexicon.n_cliques,
        "d_min": min(sizes),
        "d_mean": sum(sizes) / len(sizes),
        "d_max": max(sizes),
    }
