import hypothesis
import pytest

from looseends.graphs import UGraph, validate_dgraph, validate_ugraph

hypothesis.settings.register_profile("ci", max_examples=60, deadline=None)
hypothesis.settings.load_profile("ci")


def star_pairs(n):
    return [(str(i), f"{i}*") for i in range(1, n + 1)]


@pytest.fixture
def example18() -> UGraph:
    """Four vertices u,v,w,x; nine edges; a loop at w and one free edge."""
    pairs = [(str(i), f"{i}*") for i in range(1, 10)]
    incidence = [
        ("u", ["1*"]),
        ("v", ["3*", "4", "6*", "8", "7"]),
        ("w", ["4*", "5", "5*", "6"]),
        ("x", ["8*", "9"]),
    ]
    return validate_ugraph("example18", pairs, incidence)


@pytest.fixture
def four_cycle():
    """Square: vertices a,b,c,d in a cycle, no loose ends."""
    pairs = [(e, f"{e}*") for e in ("ab", "bc", "cd", "da")]
    incidence = [
        ("a", ["ab", "da*"]),
        ("b", ["ab*", "bc"]),
        ("c", ["bc*", "cd"]),
        ("d", ["cd*", "da"]),
    ]
    return validate_ugraph("four_cycle", pairs, incidence)


@pytest.fixture
def theta():
    """Two vertices joined by three parallel edges, one leg at each vertex."""
    pairs = [(x, f"{x}*") for x in ("e", "f", "g", "p", "q")]
    incidence = [
        ("u", ["e", "f", "g", "p*"]),
        ("v", ["e*", "f*", "g*", "q*"]),
    ]
    return validate_ugraph("theta", pairs, incidence)


@pytest.fixture
def loop_with_legs():
    """One vertex with a loop and two legs."""
    pairs = [("l", "l*"), ("p", "p*"), ("q", "q*")]
    incidence = [("v", ["l", "l*", "p*", "q*"])]
    return validate_ugraph("loop_with_legs", pairs, incidence)


@pytest.fixture
def diamond():
    """u -> v by two parallel edges, a global input at u and output at v."""
    return validate_dgraph(
        "diamond",
        ["e0", "e1", "e2", "e3"],
        [("u", ["e0"], ["e1", "e2"]), ("v", ["e1", "e2"], ["e3"])],
    )
