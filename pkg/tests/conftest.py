from __future__ import annotations

import numpy as np
import pytest

import rvss

# Two-sense homonym fixture: "bank" sits in a money clique and a river clique.
# The anchors "money" and "river" appear in exactly one clique each, so their
# vectors are the pure sense directions and subtracting one wipes that whole
# clique's component; satellite cliques give the other side enough terms to
# fill a top-10 on its own.
BANK_TEXT = """\
bank;money;loan;deposit;credit
bank;river;shore;water;stream
loan;credit;mortgage
deposit;savings;account
credit;cash;currency
savings;funds;account
shore;coast;beach
water;lake;pond
stream;brook;creek
pencil;paper;eraser
chair;table;desk
"""

MONEY_CLIQUE = ("bank", "money", "loan", "deposit", "credit")
RIVER_CLIQUE = ("bank", "river", "shore", "water", "stream")


def bank_lexicon() -> rvss.Lexicon:
    return rvss.parse_cliques(BANK_TEXT)


def community_text(
    seed: int,
    n_communities: int = 10,
    terms_per: int = 20,
    cliques_per: int = 10,
) -> str:
    """Synthetic lexicon with planted communities plus a few bridges.

    Community structure gives the overlap oracle a real signal to correlate
    against; bridges keep the graph connected.
    """
    rng = np.random.default_rng(seed)
    lines = []
    names = [
        [f"w{c * terms_per + j:03d}" for j in range(terms_per)]
        for c in range(n_communities)
    ]
    for group in names:
        # ring cliques guarantee every named term appears at least once
        for j in range(0, terms_per, 2):
            lines.append(";".join([group[j], group[(j + 1) % terms_per], group[(j + 2) % terms_per]]))
        for _ in range(cliques_per):
            size = int(rng.integers(3, 7))
            members = rng.choice(group, size=size, replace=False)
            lines.append(";".join(members))
    for c in range(n_communities - 1):
        a = rng.choice(names[c], size=2, replace=False)
        b = rng.choice(names[c + 1])
        lines.append(";".join([*a, b]))
    return "\n".join(lines) + "\n"


@pytest.fixture(scope="session")
def bank_space() -> rvss.SemanticSpace:
    return rvss.build_space(
        bank_lexicon(), rvss.SpaceConfig(dim=2500, m=50, global_seed=3)
    )


@pytest.fixture(scope="session")
def community_space() -> rvss.SemanticSpace:
    lex = rvss.parse_cliques(community_text(seed=5))
    return rvss.build_space(lex, rvss.SpaceConfig(dim=2500, m=50, global_seed=11))


@pytest.fixture(scope="session")
def small_space() -> rvss.SemanticSpace:
    lex = rvss.parse_cliques("a;b;c\nb;d\ne;f;a\nc;d;f\n")
    return rvss.build_space(lex, rvss.SpaceConfig(dim=64, m=2, global_seed=1))
