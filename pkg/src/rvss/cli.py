"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 data error (unknown term, parse or
domain problem), 3 store corruption. All randomness is governed by explicit
``--seed`` / ``--rng-seed`` flags, so identical argv + inputs produce
identical bytes on stdout; timing diagnostics go to stderr.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys

from . import lexicon as lexicon_mod
from . import noise as noise_mod
from . import query as query_mod
from . import space as space_mod
from . import store as store_mod
from .errors import (
    DegenerateTermError,
    DependentMinusError,
    DomainError,
    ParseError,
    RvssError,
    StoreCorruptionError,
    TermNotFoundError,
)
from .seeds import SpaceConfig, make_seed, n_seed, p_overlap, p_scalar, seed_dot

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_CORRUPT = 3

# subcommand -> library operations it reaches (coverage-tested)
DISPATCH = {
    "build": (lexicon_mod.load_cliques, lexicon_mod.parse_cliques, make_seed,
              space_mod.weight, space_mod.build_space, store_mod.save),
    "rebuild": (store_mod.load, space_mod.rebuild, store_mod.save),
    "add-clique": (store_mod.load, space_mod.add_clique,
                   space_mod.build_clique_vector, space_mod.build_term_vector,
                   store_mod.save),
    "neighbors": (store_mod.load, query_mod.orthogonalize, query_mod.neighbors),
    "clusters": (store_mod.load, query_mod.clusters),
    "similarity": (store_mod.load, query_mod.similarity, query_mod.distance),
    "separation": (store_mod.load, lexicon_mod.Lexicon.degree_of_separation),
    "overlap": (store_mod.load, lexicon_mod.Lexicon.overlap_similarity,
                lexicon_mod.Lexicon.neighborhood),
    "seed-dot": (make_seed, seed_dot),
    "noise": (n_seed, p_overlap, p_scalar, noise_mod.theoretical_pmf,
              noise_mod.sample_seed_noise, noise_mod.compare,
              noise_mod.make_report, noise_mod.tail_noise),
    "lexicon-stats": (lexicon_mod.load_cliques, lexicon_mod.diameter_stats),
    "serve": (store_mod.load,),
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _add_format(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("table", "json", "csv"), default="table")


def _add_minus(p: argparse.ArgumentParser) -> None:
    p.add_argument("--minus", default="", help="comma-separated terms to subtract")


def build_parser() -> _Parser:
    parser = _Parser(prog="rvss", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="compile a vector store from a clique file")
    p.add_argument("--cliques", required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--seed", type=int, default=0, help="64-bit global seed")
    p.add_argument("--weighting", choices=("tf-idf", "uniform"), default="tf-idf")
    p.add_argument("--out", required=True)

    p = sub.add_parser("rebuild", help="rebuild a store with fresh weights")
    p.add_argument("--space", required=True)
    p.add_argument("--out", help="defaults to overwriting --space")

    p = sub.add_parser("add-clique", help="insert one clique incrementally")
    p.add_argument("--space", required=True)
    p.add_argument("--terms", required=True, help="semicolon-separated terms")
    p.add_argument("--out", help="defaults to overwriting --space")

    p = sub.add_parser("neighbors", help="ranked nearest terms")
    p.add_argument("--space", required=True)
    p.add_argument("--term", required=True)
    p.add_argument("--k", type=int, default=100)
    _add_minus(p)
    p.add_argument("--renormalize", action="store_true")
    _add_format(p)

    p = sub.add_parser("clusters", help="clique-seeded neighborhood clusters")
    p.add_argument("--space", required=True)
    p.add_argument("--term", required=True)
    _add_minus(p)
    p.add_argument("--merge-threshold", type=float, default=0.9)
    p.add_argument("--max-members", type=int, default=20)
    _add_format(p)

    p = sub.add_parser("similarity", help="similarity and distance of two terms")
    p.add_argument("--space", required=True)
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    _add_format(p)

    p = sub.add_parser("separation", help="degree of separation of two terms")
    p.add_argument("--space", required=True)
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    _add_format(p)

    p = sub.add_parser("overlap", help="neighborhood-overlap similarity (integer oracle)")
    p.add_argument("--space", required=True)
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    _add_format(p)

    p = sub.add_parser("seed-dot", help="exact dot product of two terms' seed vectors")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    _add_format(p)

    p = sub.add_parser("noise", help="seed-noise pmf, sampling and tail statistics")
    noise_sub = p.add_subparsers(dest="noise_cmd")
    p.add_argument("--dim", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--mode", choices=("seed", "composite"), default="seed")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--rng-seed", type=int, default=0)
    p.add_argument("--out", help="CSV report path")
    t = noise_sub.add_parser("tail", help="similarity histogram of a neighbor-rank window")
    t.add_argument("--space", required=True)
    t.add_argument("--term", required=True)
    t.add_argument("--start", type=int, required=True)
    t.add_argument("--count", type=int, required=True)
    t.add_argument("--out", help="CSV report path")

    p = sub.add_parser("lexicon-stats", help="term/clique counts and diameter stats")
    p.add_argument("--cliques", required=True)
    _add_format(p)

    p = sub.add_parser("serve", help="HTTP JSON API over a store")
    p.add_argument("--space", required=True)
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")

    return parser


def _emit(payload: dict, fmt: str, table_lines: list[str], csv_rows: list[tuple]) -> None:
    if fmt == "json":
        sys.stdout.write(json.dumps(payload, ensure_ascii=False) + "\n")
    elif fmt == "csv":
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerows(csv_rows)
    else:
        sys.stdout.write("\n".join(table_lines) + ("\n" if table_lines else ""))


def _neighbor_payload(result) -> dict:
    return {
        "query_term": result.query_term,
        "subtracted_terms": list(result.subtracted_terms),
        "k": result.k,
        "entries": [{"term": t, "similarity": s} for t, s in result.entries],
    }


def _cluster_payload(result) -> dict:
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
    }


def _parse_minus(raw: str) -> tuple[str, ...]:
    return tuple(t for t in (part.strip() for part in raw.split(",")) if t)


def _cmd_build(args) -> int:
    lex = lexicon_mod.load_cliques(args.cliques)
    config = SpaceConfig(dim=args.dim, m=args.m, global_seed=args.seed, weighting=args.weighting)
    space = space_mod.build_space(lex, config)
    store_mod.save(space, args.out)
    report = space.report
    print(
        f"built {report.n_terms} terms in {report.seconds:.2f}s "
        f"({report.vectors_per_second:.0f} vectors/s)",
        file=sys.stderr,
    )
    sys.stdout.write(
        json.dumps(
            {
                "n_terms": report.n_terms,
                "n_cliques": report.n_cliques,
                "degenerate_terms": list(report.degenerate_terms),
                "salted_terms": [[t, s] for t, s in report.salted_terms],
                "parse_warnings": list(lex.warnings),
                "store": args.out,
            },
            ensure_ascii=False,
        )
        + "\n"
    )
    return EXIT_OK


def _cmd_rebuild(args) -> int:
    space = store_mod.load(args.space)
    fresh = space_mod.rebuild(space)
    store_mod.save(fresh, args.out or args.space)
    sys.stdout.write(
        json.dumps({"n_terms": fresh.n_terms, "store": args.out or args.space}) + "\n"
    )
    return EXIT_OK


def _cmd_add_clique(args) -> int:
    space = store_mod.load(args.space)
    terms = [t for t in (part.strip() for part in args.terms.split(";")) if t]
    space2, report = space_mod.add_clique(space, terms)
    store_mod.save(space2, args.out or args.space)
    sys.stdout.write(
        json.dumps(
            {
                "clique_id": report.clique_id,
                "created_terms": list(report.created_terms),
                "touched_terms": list(report.touched_terms),
                "degenerate_terms": list(report.degenerate_terms),
                "store": args.out or args.space,
            },
            ensure_ascii=False,
        )
        + "\n"
    )
    return EXIT_OK


def _cmd_neighbors(args) -> int:
    space = store_mod.load(args.space)
    result = query_mod.neighbors(
        space, args.term, args.k, _parse_minus(args.minus), renormalize=args.renormalize
    )
    lines = [
        f"{rank}\t{sim:.3f}\t{term}"
        for rank, (term, sim) in enumerate(result.entries, start=1)
    ]
    rows = [("term", "similarity")] + [(t, repr(s)) for t, s in result.entries]
    _emit(_neighbor_payload(result), args.format, lines, rows)
    return EXIT_OK


def _cmd_clusters(args) -> int:
    space = store_mod.load(args.space)
    result = query_mod.clusters(
        space,
        args.term,
        _parse_minus(args.minus),
        merge_threshold=args.merge_threshold,
        max_members=args.max_members,
    )
    lines = []
    rows = [("cluster", "label", "term", "similarity")]
    for idx, c in enumerate(result.clusters):
        label = ";".join(c.label)
        lines.append(f"[{idx}] {c.centroid_similarity:.3f}\t{label}")
        for term, sim in c.members:
            lines.append(f"\t{sim:.3f}\t{term}")
            rows.append((str(idx), label, term, repr(sim)))
    _emit(_cluster_payload(result), args.format, lines, rows)
    return EXIT_OK


def _cmd_similarity(args) -> int:
    space = store_mod.load(args.space)
    sigma = query_mod.similarity(space, args.a, args.b)
    dist = query_mod.distance(sigma)
    payload = {"a": args.a, "b": args.b, "similarity": sigma, "distance": dist}
    _emit(
        payload,
        args.format,
        [f"{sigma:.3f}"],
        [("a", "b", "similarity", "distance"), (args.a, args.b, repr(sigma), repr(dist))],
    )
    return EXIT_OK


def _cmd_separation(args) -> int:
    space = store_mod.load(args.space)
    lex = space.lexicon
    hops = lex.degree_of_separation(lex.term_id(args.a), lex.term_id(args.b))
    shown = "unreachable" if hops is None else str(hops)
    payload = {"a": args.a, "b": args.b, "separation": hops}
    _emit(payload, args.format, [shown], [("a", "b", "separation"), (args.a, args.b, shown)])
    return EXIT_OK


def _cmd_overlap(args) -> int:
    space = store_mod.load(args.space)
    lex = space.lexicon
    value = lex.overlap_similarity(lex.term_id(args.a), lex.term_id(args.b))
    payload = {"a": args.a, "b": args.b, "overlap": value}
    _emit(payload, args.format, [str(value)], [("a", "b", "overlap"), (args.a, args.b, str(value))])
    return EXIT_OK


def _cmd_seed_dot(args) -> int:
    config = SpaceConfig(dim=args.dim, m=args.m, global_seed=args.seed)
    value = seed_dot(make_seed(args.a, config), make_seed(args.b, config))
    payload = {"a": args.a, "b": args.b, "dot": value}
    _emit(payload, args.format, [repr(value)], [("a", "b", "dot"), (args.a, args.b, repr(value))])
    return EXIT_OK


def _write_csv(path: str, rows: list[tuple]) -> None:
    with open(path, "w", newline="") as fh:
        csv.writer(fh, lineterminator="\n").writerows(rows)


def _cmd_noise(args) -> int:
    if args.noise_cmd == "tail":
        space = store_mod.load(args.space)
        hist = noise_mod.tail_noise(space, args.term, args.start, args.count)
        summary = {
            "term": args.term,
            "start": args.start,
            "count": args.count,
            "mean": hist.mean,
            "std": hist.std,
        }
        if args.out:
            centers = hist.centers
            rows = [("bin_center", "empirical_p")] + [
                (float(c), float(f)) for c, f in zip(centers, hist.frequencies)
            ]
            _write_csv(args.out, rows)
            summary["csv"] = args.out
        sys.stdout.write(json.dumps(summary) + "\n")
        return EXIT_OK

    if args.dim is None or args.m is None:
        raise _UsageError("noise requires --dim and --m")
    config = SpaceConfig(dim=args.dim, m=args.m)
    empirical = noise_mod.sample_seed_noise(config, args.samples, args.rng_seed, mode=args.mode)
    report = noise_mod.make_report(config, empirical, mode=args.mode)
    if args.out:
        _write_csv(args.out, report.csv_rows())
    summary = report.summary()
    summary["n_seed"] = str(n_seed(args.dim, args.m))
    if args.out:
        summary["csv"] = args.out
    sys.stdout.write(json.dumps(summary) + "\n")
    return EXIT_OK


def _cmd_lexicon_stats(args) -> int:
    lex = lexicon_mod.load_cliques(args.cliques)
    stats = lexicon_mod.diameter_stats(lex)
    stats["parse_warnings"] = len(lex.warnings)
    lines = [f"{k}\t{v}" for k, v in stats.items()]
    rows = [tuple(stats.keys()), tuple(str(v) for v in stats.values())]
    _emit(stats, args.format, lines, rows)
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    app = create_app(args.space)
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


_HANDLERS = {
    "build": _cmd_build,
    "rebuild": _cmd_rebuild,
    "add-clique": _cmd_add_clique,
    "neighbors": _cmd_neighbors,
    "clusters": _cmd_clusters,
    "similarity": _cmd_similarity,
    "separation": _cmd_separation,
    "overlap": _cmd_overlap,
    "seed-dot": _cmd_seed_dot,
    "noise": _cmd_noise,
    "lexicon-stats": _cmd_lexicon_stats,
    "serve": _cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"rvss: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return _HANDLERS[args.command](args)
    except _UsageError as exc:
        print(f"rvss: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StoreCorruptionError as exc:
        print(f"rvss: {exc}", file=sys.stderr)
        return EXIT_CORRUPT
    except (
        TermNotFoundError,
        ParseError,
        DomainError,
        DegenerateTermError,
        DependentMinusError,
        FileNotFoundError,
        IsADirectoryError,
    ) as exc:
        print(f"rvss: {exc}", file=sys.stderr)
        return EXIT_DATA
    except RvssError as exc:
        print(f"rvss: {exc}", file=sys.stderr)
        return EXIT_DATA


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
