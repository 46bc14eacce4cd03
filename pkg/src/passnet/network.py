"""Empirical matrices from counts, and passing networks with colour bands."""

from __future__ import annotations

import enum
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .model import Roster, ZeroRowPolicy, renormalize_rows


class EdgeBand(enum.IntEnum):
    """Colour class of a pass edge, ordered by share of the sender's passes."""

    NONE = 0
    GREY = 1
    GREEN = 2
    BLUE = 3
    ORANGE = 4
    RED = 5

    @property
    def color(self) -> str:
        return self.name.lower()


# lower bounds, inclusive
BAND_THRESHOLDS = (
    (0.20, EdgeBand.RED),
    (0.10, EdgeBand.ORANGE),
    (0.05, EdgeBand.BLUE),
    (0.01, EdgeBand.GREEN),
)


def classify_band(pct: float) -> EdgeBand:
    if not 0.0 <= pct <= 1.0:
        raise ValueError(f"share {pct!r} outside [0, 1]")
    for lower, band in BAND_THRESHOLDS:
        if pct >= lower:
            return band
    return EdgeBand.GREY if pct > 0 else EdgeBand.NONE


@dataclass(frozen=True, eq=False)
class PassCountMatrix:
    """Pass counts; ``counts[i, j]`` passes from player i to j, diagonal = kept possession."""

    roster: Roster
    counts: np.ndarray

    def __post_init__(self):
        counts = np.array(self.counts, dtype=np.int64, copy=True)
        m = len(self.roster)
        if counts.shape != (m, m):
            raise ValueError(f"counts have shape {counts.shape}, roster has {m} players")
        neg = np.argwhere(counts < 0)
        if neg.size:
            r, c = (int(v) for v in neg[0])
            raise ValueError(f"negative count at row {r}, column {c}")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PassCountMatrix):
            return NotImplemented
        return self.roster == other.roster and np.array_equal(self.counts, other.counts)

    __hash__ = None

    def permuted(self, order: Sequence[int]) -> PassCountMatrix:
        order = list(order)
        roster = Roster(tuple(self.roster.players[i] for i in order))
        return PassCountMatrix(roster, self.counts[np.ix_(order, order)])


def empirical_transition(counts: PassCountMatrix, zero_row_policy: ZeroRowPolicy = "uniform") -> np.ndarray:
    return renormalize_rows(counts.counts, zero_row_policy).matrix


def empirical_emission(outcome_counts, zero_row_policy: ZeroRowPolicy = "uniform") -> np.ndarray:
    return renormalize_rows(outcome_counts, zero_row_policy).matrix


def empirical_initial(organizer_counts) -> np.ndarray:
    counts = np.asarray(organizer_counts, dtype=float)
    if (counts < 0).any():
        raise ValueError("organizer counts must be non-negative")
    total = counts.sum()
    if total <= 0:
        raise ValueError("no rounds observed: organizer counts are all zero")
    return counts / total


@dataclass(frozen=True)
class PassEdge:
    source: str
    target: str
    count: int
    pct: float
    band: EdgeBand


@dataclass(frozen=True)
class PassingNetwork:
    roster: Roster
    edges: tuple[PassEdge, ...]
    sender_totals: tuple[int, ...]
    retained: tuple[int, ...]

    def out_edges(self, player: str) -> list[PassEdge]:
        return [e for e in self.edges if e.source == player]

    def in_edges(self, player: str) -> list[PassEdge]:
        return [e for e in self.edges if e.target == player]


def build_network(counts: PassCountMatrix) -> PassingNetwork:
    """One edge per positive off-diagonal count, sorted by (sender, receiver) roster order.

    Shares are relative to the sender's total including the diagonal.
    """
    ids = counts.roster.ids
    c = counts.counts
    totals = c.sum(axis=1)
    edges = []
    for i, j in zip(*np.nonzero(c)):
        if i == j:
            continue
        pct = float(c[i, j]) / float(totals[i])
        edges.append(PassEdge(ids[i], ids[j], int(c[i, j]), pct, classify_band(pct)))
    return PassingNetwork(
        counts.roster,
        tuple(edges),
        tuple(int(t) for t in totals),
        tuple(int(v) for v in np.diag(c)),
    )


def player_subnetwork(net: PassingNetwork, player: str,
                      direction: Literal["incoming", "outgoing"]) -> PassingNetwork:
    net.roster.index(player)
    if direction == "outgoing":
        edges = net.out_edges(player)
    elif direction == "incoming":
        edges = net.in_edges(player)
    else:
        raise ValueError(f"direction must be 'incoming' or 'outgoing', not {direction!r}")
    return PassingNetwork(net.roster, tuple(edges), net.sender_totals, net.retained)


# --- exports -------------------------------------------------------------

MIN_PENWIDTH = 1.0
MAX_PENWIDTH = 8.0


def _penwidth(count: int, max_count: int) -> float:
    return max(MIN_PENWIDTH, MAX_PENWIDTH * count / max_count)


def _dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(net: PassingNetwork, name: str = "passing") -> str:
    lines = [f"digraph {_dot_quote(name)} {{",
             "  node [shape=circle, style=filled, fillcolor=lightblue];"]
    for p in net.roster.players:
        lines.append(f"  {_dot_quote(p.id)} [label={_dot_quote(p.name)}];")
    max_count = max((e.count for e in net.edges), default=1)
    for e in net.edges:
        lines.append(
            f"  {_dot_quote(e.source)} -> {_dot_quote(e.target)} "
            f"[color={e.band.color}, penwidth={_penwidth(e.count, max_count):.3f}, "
            f"weight={e.count}, label=\"{e.pct * 100:.1f}%\"];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_graphml(net: PassingNetwork) -> str:
    ns = "http://graphml.graphdrawing.org/xmlns"
    root = ET.Element("graphml", xmlns=ns)
    keys = [("name", "node", "string"), ("count", "edge", "int"),
            ("pct", "edge", "double"), ("band", "edge", "string")]
    for key, domain, typ in keys:
        ET.SubElement(root, "key", {"id": key, "for": domain,
                                    "attr.name": key, "attr.type": typ})
    graph = ET.SubElement(root, "graph", id="passing", edgedefault="directed")
    for p in net.roster.players:
        node = ET.SubElement(graph, "node", id=p.id)
        ET.SubElement(node, "data", key="name").text = p.name
    for k, e in enumerate(net.edges):
        edge = ET.SubElement(graph, "edge", id=f"e{k}", source=e.source, target=e.target)
        ET.SubElement(edge, "data", key="count").text = str(e.count)
        ET.SubElement(edge, "data", key="pct").text = repr(e.pct)
        ET.SubElement(edge, "data", key="band").text = e.band.color
    ET.indent(root)
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(root, encoding="unicode") + "\n"


def to_edge_csv(net: PassingNetwork) -> str:
    rows = ["from,to,count,pct,band"]
    rows += [f"{e.source},{e.target},{e.count},{e.pct!r},{e.band.color}" for e in net.edges]
    return "\n".join(rows) + "\n"
