import csv
import io
import json

import pytest

import rvss
from rvss import cli
from rvss.cli import DISPATCH, main

from conftest import BANK_TEXT


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    cliques = root / "cliques.txt"
    cliques.write_text(BANK_TEXT, encoding="utf-8")
    store = root / "bank.rvss"
    rc = main(
        ["build", "--cliques", str(cliques), "--dim", "256", "--m", "4",
         "--seed", "3", "--weighting", "tf-idf", "--out", str(store)]
    )
    assert rc == 0
    return root


@pytest.fixture()
def store(workdir):
    return str(workdir / "bank.rvss")


def run(capsys, *argv):
    rc = main(list(argv))
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


def test_build_reports_counts(tmp_path, capsys):
    cliques = tmp_path / "c.txt"
    cliques.write_text("a;b;c\nb;d\nsolo\n", encoding="utf-8")
    rc, out, err = run(
        capsys, "build", "--cliques", str(cliques), "--dim", "64", "--m", "2",
        "--out", str(tmp_path / "s.rvss"),
    )
    assert rc == 0
    payload = json.loads(out)
    assert payload["n_terms"] == 4 and payload["n_cliques"] == 2
    assert payload["parse_warnings"]
    assert "vectors/s" in err  # timing stays off stdout


def test_stdout_reproducible(store, capsys):
    args = ("neighbors", "--space", store, "--term", "bank", "--k", "8")
    rc1, out1, _ = run(capsys, *args)
    rc2, out2, _ = run(capsys, *args)
    assert rc1 == rc2 == 0
    assert out1 == out2


def test_neighbors_table_format(store, capsys):
    rc, out, _ = run(capsys, "neighbors", "--space", store, "--term", "bank", "--k", "5")
    assert rc == 0
    lines = out.strip().split("\n")
    assert len(lines) == 5
    rank, sim, term = lines[0].split("\t")
    assert rank == "1" and term == "bank"
    assert sim == "1.000"  # three decimals, period separator
    for line in lines:
        assert len(line.split("\t")[1].split(".")[1]) == 3


def test_neighbors_json_csv_equivalence(store, capsys):
    rc, out_json, _ = run(
        capsys, "neighbors", "--space", store, "--term", "bank", "--k", "10",
        "--format", "json",
    )
    rc2, out_csv, _ = run(
        capsys, "neighbors", "--space", store, "--term", "bank", "--k", "10",
        "--format", "csv",
    )
    assert rc == rc2 == 0
    payload = json.loads(out_json)
    json_pairs = {(e["term"], e["similarity"]) for e in payload["entries"]}
    rows = list(csv.reader(io.StringIO(out_csv)))
    assert rows[0] == ["term", "similarity"]
    csv_pairs = {(t, float(s)) for t, s in rows[1:]}
    assert json_pairs == csv_pairs


def test_neighbors_with_minus(store, capsys):
    rc, out, _ = run(
        capsys, "neighbors", "--space", store, "--term", "bank", "--k", "12",
        "--minus", "river", "--format", "json",
    )
    assert rc == 0
    payload = json.loads(out)
    assert payload["subtracted_terms"] == ["river"]
    sims = {e["term"]: e["similarity"] for e in payload["entries"]}
    if "river" in sims:
        assert abs(sims["river"]) < 1e-4


def test_unknown_term_exits_2(store, capsys):
    rc, out, err = run(capsys, "neighbors", "--space", store, "--term", "zz", "--k", "3")
    assert rc == 2
    assert "term not found: zz" in err
    assert out == ""


def test_corrupt_store_exits_3(workdir, capsys):
    bad = workdir / "bad.rvss"
    bad.write_bytes(b"JUNKJUNKJUNK")
    rc, _, err = run(capsys, "neighbors", "--space", str(bad), "--term", "x", "--k", "1")
    assert rc == 3
    assert "magic" in err


def test_usage_errors_exit_1(capsys):
    rc, _, err = run(capsys, "neighbors", "--term", "x")  # missing --space
    assert rc == 1
    rc, _, _ = run(capsys, "frobnicate")
    assert rc == 1
    rc, _, _ = run(capsys, "noise")  # missing --dim/--m
    assert rc == 1


def test_similarity_and_distance(store, capsys):
    rc, out, _ = run(
        capsys, "similarity", "--space", store, "--a", "bank", "--b", "bank",
        "--format", "json",
    )
    assert rc == 0
    payload = json.loads(out)
    assert payload["similarity"] == pytest.approx(1.0, abs=1e-5)
    assert payload["distance"] == pytest.approx(0.0, abs=1e-2)
    rc, out, _ = run(capsys, "similarity", "--space", store, "--a", "bank", "--b", "money")
    assert rc == 0
    assert len(out.strip().split(".")[1]) == 3


def test_separation(store, capsys):
    rc, out, _ = run(capsys, "separation", "--space", store, "--a", "bank", "--b", "money")
    assert rc == 0 and out.strip() == "1"
    rc, out, _ = run(capsys, "separation", "--space", store, "--a", "bank", "--b", "pencil")
    assert rc == 0 and out.strip() == "unreachable"
    rc, out, _ = run(
        capsys, "separation", "--space", store, "--a", "bank", "--b", "pencil",
        "--format", "json",
    )
    assert json.loads(out)["separation"] is None


def test_overlap(store, capsys):
    rc, out, _ = run(capsys, "overlap", "--space", store, "--a", "bank", "--b", "money")
    assert rc == 0
    assert int(out.strip()) >= 2  # shares the money clique


def test_seed_dot(capsys):
    rc, out, _ = run(
        capsys, "seed-dot", "--dim", "250", "--m", "4", "--seed", "7",
        "--a", "maison", "--b", "maison",
    )
    assert rc == 0 and float(out.strip()) == 1.0
    rc, out, _ = run(
        capsys, "seed-dot", "--dim", "250", "--m", "4", "--seed", "7",
        "--a", "maison", "--b", "demeure", "--format", "json",
    )
    stepped = json.loads(out)["dot"] * 8
    assert abs(stepped - round(stepped)) < 1e-9


def test_add_clique_roundtrip(workdir, store, capsys):
    out_store = workdir / "updated.rvss"
    rc, out, _ = run(
        capsys, "add-clique", "--space", store, "--terms", "bank;vault;safe",
        "--out", str(out_store),
    )
    assert rc == 0
    payload = json.loads(out)
    assert set(payload["created_terms"]) == {"vault", "safe"}
    updated = rvss.load(out_store)
    assert "vault" in updated.lexicon


def test_rebuild(workdir, store, capsys):
    out_store = workdir / "rebuilt.rvss"
    rc, out, _ = run(capsys, "rebuild", "--space", store, "--out", str(out_store))
    assert rc == 0
    assert rvss.load(out_store).n_terms == rvss.load(store).n_terms


def test_noise_sampling_writes_csv(tmp_path, capsys):
    report = tmp_path / "report.csv"
    rc, out, _ = run(
        capsys, "noise", "--dim", "250", "--m", "4", "--mode", "seed",
        "--samples", "20000", "--rng-seed", "5", "--out", str(report),
    )
    assert rc == 0
    summary = json.loads(out)
    assert summary["sample_count"] == 20000
    assert summary["n_seed"] == str(rvss.n_seed(250, 4))
    rows = list(csv.reader(report.open()))
    assert rows[0] == ["value", "theoretical_p", "empirical_p"]
    assert len(rows) == 1 + 17


def test_noise_tail(store, capsys, tmp_path):
    rc, out, _ = run(
        capsys, "noise", "tail", "--space", store, "--term", "bank",
        "--start", "5", "--count", "10", "--out", str(tmp_path / "tail.csv"),
    )
    assert rc == 0
    summary = json.loads(out)
    assert summary["count"] == 10
    assert (tmp_path / "tail.csv").exists()


def test_lexicon_stats(workdir, capsys):
    rc, out, _ = run(
        capsys, "lexicon-stats", "--cliques", str(workdir / "cliques.txt"),
        "--format", "json",
    )
    assert rc == 0
    stats = json.loads(out)
    assert stats["n_cliques"] == 11
    assert stats["d_min"] >= 2


def test_dispatch_covers_every_operation():
    reachable = {f for ops in DISPATCH.values() for f in ops}
    required = [
        rvss.parse_cliques,
        rvss.Lexicon.neighborhood,
        rvss.Lexicon.overlap_similarity,
        rvss.Lexicon.degree_of_separation,
        rvss.make_seed,
        rvss.n_seed,
        rvss.p_overlap,
        rvss.p_scalar,
        rvss.seed_dot,
        rvss.weight,
        rvss.build_clique_vector,
        rvss.build_term_vector,
        rvss.build_space,
        rvss.add_clique,
        rvss.save,
        rvss.load,
        rvss.similarity,
        rvss.distance,
        rvss.orthogonalize,
        rvss.neighbors,
        rvss.clusters,
        rvss.theoretical_pmf,
        rvss.sample_seed_noise,
        rvss.tail_noise,
        rvss.compare,
    ]
    for op in required:
        assert op in reachable, f"{op.__qualname__} unreachable from the CLI"
    # and every advertised subcommand exists in the parser
    parser = cli.build_parser()
    actions = next(
        a for a in parser._actions if isinstance(a, type(parser._actions[-1]))
    )
    assert set(DISPATCH) <= set(actions.choices)
