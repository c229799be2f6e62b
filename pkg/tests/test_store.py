import io
import struct

import numpy as np
import pytest

import rvss
from rvss.errors import StoreCorruptionError
from rvss.seeds import SpaceConfig
from rvss.store import HEADER_SIZE, dumps, load, loads, predicted_size, save


@pytest.fixture()
def tiny_space():
    lex = rvss.parse_cliques("ab;cd;e\ncd;fg\ne;fg")
    return rvss.build_space(lex, SpaceConfig(dim=32, m=2, global_seed=4))


def test_roundtrip_byte_identical(tiny_space):
    blob = dumps(tiny_space)
    again = dumps(loads(blob))
    assert blob == again


def test_roundtrip_preserves_everything(tiny_space):
    other = loads(dumps(tiny_space))
    assert other.config == tiny_space.config
    assert other.lexicon == tiny_space.lexicon
    assert np.array_equal(other.vectors, tiny_space.vectors)
    assert np.array_equal(other.salts, tiny_space.salts)
    assert np.array_equal(other.degenerate, tiny_space.degenerate)


def test_path_save_load(tiny_space, tmp_path):
    path = tmp_path / "space.rvss"
    save(tiny_space, path)
    assert load(path).lexicon == tiny_space.lexicon
    with open(path, "rb") as fh:
        assert load(fh).lexicon == tiny_space.lexicon


def test_predicted_size_exact(tiny_space):
    blob = dumps(tiny_space)
    assert len(blob) == predicted_size(tiny_space.lexicon, tiny_space.config.dim)
    # header + per-term records + per-clique records + coordinate block
    lex = tiny_space.lexicon
    expected = (
        HEADER_SIZE
        + sum(4 + len(t.encode()) + 5 for t in lex.terms)
        + sum(4 + 4 * len(c) for c in lex.cliques)
        + lex.n_terms * 32 * 4
    )
    assert len(blob) == expected


def test_bad_magic_rejected(tiny_space):
    blob = bytearray(dumps(tiny_space))
    blob[:4] = b"JUNK"
    with pytest.raises(StoreCorruptionError, match="magic"):
        loads(bytes(blob))


def test_version_bump_rejected(tiny_space):
    blob = bytearray(dumps(tiny_space))
    struct.pack_into("<L", blob, 4, 99)
    with pytest.raises(StoreCorruptionError, match="version 99"):
        loads(bytes(blob))


def test_truncation_rejected(tiny_space):
    blob = dumps(tiny_space)
    for cut in (10, HEADER_SIZE + 3, len(blob) - 7):
        with pytest.raises(StoreCorruptionError, match="truncated"):
            loads(blob[:cut])


def test_trailing_garbage_rejected(tiny_space):
    with pytest.raises(StoreCorruptionError, match="trailing"):
        loads(dumps(tiny_space) + b"\x00")


def test_norm_corruption_rejected(tiny_space):
    blob = bytearray(dumps(tiny_space))
    # scale the last row's first coordinate way up
    coord_block = len(blob) - tiny_space.n_terms * 32 * 4
    struct.pack_into("<f", blob, coord_block, 5.0)
    with pytest.raises(StoreCorruptionError, match="norm check"):
        loads(bytes(blob))


def test_degenerate_flag_persists():
    lex = rvss.parse_cliques("a;b")  # single clique -> all idf zero -> degenerate
    space = rvss.build_space(lex, SpaceConfig(dim=32, m=2))
    other = loads(dumps(space))
    assert other.degenerate.all()


def test_out_of_range_clique_id_rejected(tiny_space):
    blob = bytearray(dumps(tiny_space))
    # first clique record sits right after the term table
    offset = HEADER_SIZE + sum(
        4 + len(t.encode()) + 5 for t in tiny_space.lexicon.terms
    )
    struct.pack_into("<L", blob, offset + 4, 10_000)
    with pytest.raises(StoreCorruptionError, match="out of range"):
        loads(bytes(blob))
