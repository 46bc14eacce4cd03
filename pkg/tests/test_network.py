from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from passnet.model import Roster
from passnet.network import (
    EdgeBand,
    PassCountMatrix,
    build_network,
    classify_band,
    empirical_emission,
    empirical_initial,
    empirical_transition,
    player_subnetwork,
    to_dot,
    to_edge_csv,
    to_graphml,
)

GOLDEN = Path(__file__).parent / "golden"


def two_players(counts):
    return PassCountMatrix(Roster.from_ids(["P", "Q"]), counts)


def test_transition_row_c(cavaliers_counts):
    A = empirical_transition(cavaliers_counts)
    row = cavaliers_counts.counts[2]
    assert row.sum() == 103
    assert A[2, 4] == 17 / 103
    assert A[2, 4] == pytest.approx(0.16505, abs=5e-6)


def test_transition_row_e(cavaliers_counts):
    A = empirical_transition(cavaliers_counts)
    assert cavaliers_counts.counts[4].sum() == 931
    assert A[4, 5] == 99 / 931
    assert A[4, 5] == pytest.approx(0.10634, abs=5e-6)


def test_identity_counts():
    c = PassCountMatrix(Roster.from_ids("ABC"), np.diag([4, 1, 9]))
    np.testing.assert_array_equal(empirical_transition(c), np.eye(3))


def test_transition_rows_are_exact(cavaliers_counts):
    A = empirical_transition(cavaliers_counts)
    np.testing.assert_allclose(A.sum(axis=1), 1.0, atol=1e-12)
    for i, row in enumerate(cavaliers_counts.counts):
        total = int(row.sum())
        for j, c in enumerate(row):
            assert A[i, j] == float(Fraction(int(c), total))


def test_emission_examples():
    np.testing.assert_array_equal(empirical_emission([[6, 1, 2, 1]]), [[0.6, 0.1, 0.2, 0.1]])
    np.testing.assert_array_equal(empirical_emission([[0, 0, 0, 0]]), [[0.25] * 4])


def test_emission_reproduces_season_opener_ratios():
    row = empirical_emission([[63, 10, 29, 9]])[0]
    np.testing.assert_allclose(row, [0.5676, 0.0901, 0.2613, 0.0811], atol=0.005)


def test_initial_examples():
    np.testing.assert_array_equal(empirical_initial([5, 0, 0]), [1, 0, 0])
    np.testing.assert_array_equal(empirical_initial([1, 1, 1, 1]), [0.25] * 4)
    np.testing.assert_array_equal(empirical_initial([3, 1, 1]), [0.6, 0.2, 0.2])
    with pytest.raises(ValueError):
        empirical_initial([0, 0])


@pytest.mark.parametrize("pct, band", [
    (1.0, EdgeBand.RED), (0.25, EdgeBand.RED), (0.20, EdgeBand.RED),
    (0.1999, EdgeBand.ORANGE), (99 / 931, EdgeBand.ORANGE), (0.10, EdgeBand.ORANGE),
    (79 / 931, EdgeBand.BLUE), (0.05, EdgeBand.BLUE), (0.049, EdgeBand.GREEN),
    (0.01, EdgeBand.GREEN), (0.0099, EdgeBand.GREY), (1e-9, EdgeBand.GREY), (0.0, EdgeBand.NONE),
])
def test_classify_band(pct, band):
    assert classify_band(pct) is band


def test_classify_band_range():
    for bad in (-0.01, 1.01):
        with pytest.raises(ValueError):
            classify_band(bad)


@settings(max_examples=300)
@given(st.floats(0, 1), st.floats(0, 1))
def test_classify_band_monotone(a, b):
    hi, lo = max(a, b), min(a, b)
    assert classify_band(hi) >= classify_band(lo)


def test_full_network(cavaliers_counts):
    net = build_network(cavaliers_counts)
    assert len(net.roster) == 13
    [ef] = [e for e in net.edges if (e.source, e.target) == ("E", "F")]
    assert ef.band is EdgeBand.ORANGE
    assert ef.count == 99
    assert net.sender_totals[4] == 931
    assert net.retained[4] == 411


def test_diagonal_only_has_no_edges():
    net = build_network(PassCountMatrix(Roster.from_ids("AB"), [[3, 0], [0, 2]]))
    assert net.edges == ()


def test_two_player_network():
    net = build_network(two_players([[0, 4], [1, 0]]))
    assert [(e.source, e.target, e.pct, e.band) for e in net.edges] == [
        ("P", "Q", 1.0, EdgeBand.RED), ("Q", "P", 1.0, EdgeBand.RED)]


def test_shares_sum_with_diagonal(cavaliers_counts):
    net = build_network(cavaliers_counts)
    for i, pid in enumerate(net.roster.ids):
        total = net.sender_totals[i]
        shares = sum(e.pct for e in net.out_edges(pid)) + net.retained[i] / total
        assert shares == pytest.approx(1.0, abs=1e-9)


def test_subnetworks(cavaliers_counts):
    net = build_network(cavaliers_counts)
    out_c = player_subnetwork(net, "C", "outgoing")
    assert [e.target for e in out_c.edges] == ["A", "D", "E", "F", "G", "H", "J"]
    assert all(e.source == "C" for e in out_c.edges)
    lonely = build_network(PassCountMatrix(Roster.from_ids("AB"), [[1, 0], [0, 0]]))
    assert player_subnetwork(lonely, "B", "outgoing").edges == ()
    with pytest.raises(KeyError):
        player_subnetwork(net, "Z", "incoming")

    outgoing, incoming = [], []
    for pid in net.roster.ids:
        outgoing += player_subnetwork(net, pid, "outgoing").edges
        incoming += player_subnetwork(net, pid, "incoming").edges
    assert sorted(outgoing, key=repr) == sorted(net.edges, key=repr)
    assert sorted(incoming, key=repr) == sorted(net.edges, key=repr)


count_matrices = st.integers(1, 6).flatmap(
    lambda k: arrays(np.int64, (k, k), elements=st.integers(0, 500)))


@settings(max_examples=100, deadline=None)
@given(count_matrices, st.randoms())
def test_permutation_equivariance(counts, rnd):
    m = counts.shape[0]
    base = PassCountMatrix(Roster.from_ids([f"p{i}" for i in range(m)]), counts)
    order = list(range(m))
    rnd.shuffle(order)
    moved = base.permuted(order)
    np.testing.assert_array_equal(empirical_transition(moved),
                                  empirical_transition(base)[np.ix_(order, order)])
    key = lambda e: (e.source, e.target)  # noqa: E731
    a = sorted(build_network(base).edges, key=key)
    b = sorted(build_network(moved).edges, key=key)
    assert a == b


@settings(max_examples=100, deadline=None)
@given(count_matrices)
def test_network_conserves_counts(counts):
    m = counts.shape[0]
    net = build_network(PassCountMatrix(Roster.from_ids([f"p{i}" for i in range(m)]), counts))
    assert sum(e.count for e in net.edges) + sum(net.retained) == counts.sum()


def test_dot_empty_network():
    net = build_network(PassCountMatrix(Roster.from_ids("AB"), [[0, 0], [0, 0]]))
    text = to_dot(net)
    assert text.startswith('digraph "passing" {')
    assert '"A" [label="A"];' in text
    assert "->" not in text


def test_dot_two_red_edges():
    text = to_dot(build_network(two_players([[0, 4], [1, 0]])))
    assert text.count("color=red") == 2
    assert '"P" -> "Q"' in text and '"Q" -> "P"' in text
    assert "penwidth=8.000" in text and "penwidth=2.000" in text


def test_dot_golden(cavaliers_counts):
    text = to_dot(build_network(cavaliers_counts))
    assert text == to_dot(build_network(cavaliers_counts))
    assert text == (GOLDEN / "cavaliers_network.dot").read_text()


def test_graphml_and_csv(cavaliers_counts):
    net = build_network(cavaliers_counts)
    gml = to_graphml(net)
    assert gml.count("<node ") == 13
    assert gml.count("<edge ") == len(net.edges)
    assert 'attr.name="band"' in gml
    rows = to_edge_csv(net).splitlines()
    assert rows[0] == "from,to,count,pct,band"
    assert len(rows) == len(net.edges) + 1
    assert "E,F,99," in to_edge_csv(net)
