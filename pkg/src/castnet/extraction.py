"""Computer-detected interaction networks and time-ordered event streams.

Within each text unit, a pair of characters whose aliases both occur
interacts with importance f_i * f_j (the product of their per-unit alias
frequencies), optionally plus one. The network weight of a pair is the sum
of its per-unit importances over the whole story.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .corpus import CharacterRegistry, MentionCounts, TextUnit, count_mentions
from .errors import FormatError


@dataclass(frozen=True)
class InteractionEvent:
    """One time-ordered interaction observation.

    `pair` is lexicographically ordered; `position` is the unit index for
    the computer arm and the entry order for survey Task 1 entries.
    """

    pair: tuple[str, str]
    weight: float
    position: int
    source: str  # "computer" or "task1"

    def __post_init__(self):
        a, b = self.pair
        if a == b:
            raise ValueError(f"self-interaction for {a!r}")
        if a > b:
            object.__setattr__(self, "pair", (b, a))
        if not self.weight > 0:
            raise ValueError(f"event weight must be positive, got {self.weight}")


def pair_key(a: str, b: str) -> tuple[str, str]:
    """Canonical (lexicographically ordered) form of an unordered pair."""
    if a == b:
        raise ValueError(f"pair members must be distinct, got {a!r} twice")
    return (a, b) if a < b else (b, a)


class WeightedNetwork:
    """Undirected, loop-free, non-negative weighted graph over a fixed node set.

    Absent pairs have weight 0; storing a weight of 0 removes the pair, so
    the two representations never diverge. Node order is fixed at
    construction and defines the pair order used when networks are
    flattened to vectors or matrices.
    """

    def __init__(self, nodes: Iterable[str], provenance: str = ""):
        self.nodes: tuple[str, ...] = tuple(nodes)
        if len(set(self.nodes)) != len(self.nodes):
            raise ValueError("node names must be unique")
        self.provenance = provenance
        self._index = {name: i for i, name in enumerate(self.nodes)}
        self._weights: dict[tuple[str, str], float] = {}

    def _check(self, a: str, b: str) -> tuple[str, str]:
        if a not in self._index:
            raise KeyError(f"unknown node {a!r}")
        if b not in self._index:
            raise KeyError(f"unknown node {b!r}")
        return pair_key(a, b)

    def weight(self, a: str, b: str) -> float:
        return self._weights.get(self._check(a, b), 0.0)

    def set_weight(self, a: str, b: str, w: float) -> None:
        key = self._check(a, b)
        if w < 0:
            raise ValueError(f"negative weight {w} for {key}")
        if w == 0:
            self._weights.pop(key, None)
        else:
            self._weights[key] = float(w)

    def add_weight(self, a: str, b: str, w: float) -> None:
        self.set_weight(a, b, self.weight(a, b) + w)

    def pairs(self) -> Iterator[tuple[str, str]]:
        """All unordered node pairs in fixed (node index) order."""
        for i in range(len(self.nodes)):
            for j in range(i + 1, len(self.nodes)):
                yield self.nodes[i], self.nodes[j]

    def links(self) -> list[tuple[tuple[str, str], float]]:
        """Positive-weight pairs in fixed pair order."""
        out = []
        for a, b in self.pairs():
            w = self._weights.get(pair_key(a, b))
            if w:
                out.append(((a, b), w))
        return out

    def n_links(self) -> int:
        return len(self._weights)

    def total(self) -> float:
        return float(sum(self._weights.values()))

    def max_link(self) -> tuple[tuple[str, str], float]:
        """The strongest link (first in pair order on ties). Errors if all weights are 0."""
        best = None
        for (a, b), w in self.links():
            if best is None or w > best[1]:
                best = ((a, b), w)
        if best is None:
            raise ValueError("network has no positive weights")
        return best

    def vector(self) -> np.ndarray:
        """Weights over all unordered pairs, zeros included, in fixed pair order."""
        return np.array([self._weights.get(pair_key(a, b), 0.0) for a, b in self.pairs()])

    def to_matrix(self) -> np.ndarray:
        n = len(self.nodes)
        mat = np.zeros((n, n))
        for (a, b), w in self._weights.items():
            i, j = self._index[a], self._index[b]
            mat[i, j] = w
            mat[j, i] = w
        return mat

    @classmethod
    def from_matrix(cls, nodes: Iterable[str], matrix: np.ndarray,
                    provenance: str = "") -> "WeightedNetwork":
        net = cls(nodes, provenance)
        n = len(net.nodes)
        matrix = np.asarray(matrix, dtype=float)
        if matrix.shape != (n, n):
            raise ValueError(f"matrix shape {matrix.shape} does not match {n} nodes")
        if not np.array_equal(matrix, matrix.T):
            raise ValueError("matrix is not symmetric")
        if np.any(np.diag(matrix) != 0):
            raise ValueError("matrix has nonzero diagonal entries")
        for i in range(n):
            for j in range(i + 1, n):
                if matrix[i, j]:
                    net.set_weight(net.nodes[i], net.nodes[j], float(matrix[i, j]))
        return net

    def copy(self, provenance: str | None = None) -> "WeightedNetwork":
        out = WeightedNetwork(self.nodes, self.provenance if provenance is None else provenance)
        out._weights = dict(self._weights)
        return out

    def scaled(self, factor: float) -> "WeightedNetwork":
        if factor < 0:
            raise ValueError("scale factor must be non-negative")
        out = self.copy()
        out._weights = {k: w * factor for k, w in self._weights.items() if w * factor != 0}
        return out

    def same_nodes(self, other: "WeightedNetwork") -> bool:
        return self.nodes == other.nodes

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeightedNetwork):
            return NotImplemented
        return self.nodes == other.nodes and self._weights == other._weights

    def __repr__(self) -> str:
        return (f"WeightedNetwork({len(self.nodes)} nodes, {self.n_links()} links, "
                f"provenance={self.provenance!r})")


def unit_interactions(counts: MentionCounts, plus_one: bool = True) -> list[InteractionEvent]:
    """Interaction events for every character pair co-occurring in one unit.

    Weight is f_i * f_j, plus one when `plus_one` is set. Characters absent
    from the unit contribute nothing.
    """
    present = sorted(counts.counts)
    events = []
    for i in range(len(present)):
        for j in range(i + 1, len(present)):
            a, b = present[i], present[j]
            w = counts.counts[a] * counts.counts[b]
            if plus_one:
                w += 1
            events.append(InteractionEvent((a, b), float(w), counts.unit_index, "computer"))
    return events


def extract_network(
    units: list[TextUnit],
    registry: CharacterRegistry,
    plus_one: bool = True,
) -> tuple[WeightedNetwork, list[InteractionEvent]]:
    """Build the computer-detected network and its event stream.

    The node set is the full registry, so characters never co-occurring
    remain as isolates. Network weights are the per-pair sums of the
    returned events' weights.
    """
    if len(registry) == 0:
        raise ValueError("registry has no characters; nothing to extract")
    kind = units[0].kind if units else "paragraph"
    provenance = f"computer:{kind}:{registry.story_id}:plus_one={str(plus_one).lower()}"
    net = WeightedNetwork(registry.names, provenance)
    events: list[InteractionEvent] = []
    for unit in units:
        for event in unit_interactions(count_mentions(unit, registry), plus_one):
            events.append(event)
            net.add_weight(event.pair[0], event.pair[1], event.weight)
    return net, events


# --- file formats ---------------------------------------------------------
#
# Edge list (tab-separated):
#     # castnet-network<TAB>nodes=13<TAB>provenance=...
#     # node<TAB>George Willard          (one line per node, in node order)
#     George Willard<TAB>Helen White<TAB>12.0
# Matrix (tab-separated, row/column order = node order, zero diagonal):
#     # castnet-matrix<TAB>nodes=13<TAB>provenance=...
#     <TAB>George Willard<TAB>Helen White ...
#     George Willard<TAB>0.0<TAB>12.0 ...
#
# Weights are written with repr(), which round-trips floats bit-exactly.

EDGELIST_MAGIC = "# castnet-network"
MATRIX_MAGIC = "# castnet-matrix"


def _parse_header(path: Path, line: str, magic: str) -> tuple[int, str]:
    parts = line.rstrip("\n").split("\t")
    if len(parts) != 3 or parts[0] != magic:
        raise FormatError(path, 1, f"expected header {magic!r}")
    if not parts[1].startswith("nodes=") or not parts[2].startswith("provenance="):
        raise FormatError(path, 1, "header must carry nodes= and provenance=")
    try:
        n = int(parts[1][len("nodes="):])
    except ValueError:
        raise FormatError(path, 1, f"bad node count {parts[1]!r}") from None
    return n, parts[2][len("provenance="):]


def write_edgelist(net: WeightedNetwork, path: str | Path) -> None:
    path = Path(path)
    lines = [f"{EDGELIST_MAGIC}\tnodes={len(net.nodes)}\tprovenance={net.provenance}"]
    lines += [f"# node\t{name}" for name in net.nodes]
    lines += [f"{a}\t{b}\t{w!r}" for (a, b), w in net.links()]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_edgelist(path: str | Path) -> WeightedNetwork:
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise FormatError(path, 1, "empty file")
    n, provenance = _parse_header(path, lines[0], EDGELIST_MAGIC)
    nodes: list[str] = []
    body_start = 1
    for lineno, line in enumerate(lines[1:], start=2):
        if line.startswith("# node\t"):
            nodes.append(line[len("# node\t"):])
            body_start = lineno
        else:
            break
    if len(nodes) != n:
        raise FormatError(path, 1, f"header says {n} nodes but {len(nodes)} node lines found")
    net = WeightedNetwork(nodes, provenance)
    for lineno, line in enumerate(lines[body_start:], start=body_start + 1):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise FormatError(path, lineno, f"expected 3 tab-separated fields, got {len(fields)}")
        a, b, raw_w = fields
        try:
            w = float(raw_w)
        except ValueError:
            raise FormatError(path, lineno, f"bad weight {raw_w!r}") from None
        if a not in net._index or b not in net._index:
            raise FormatError(path, lineno, f"edge references unknown node in {a!r}/{b!r}")
        if w <= 0:
            raise FormatError(path, lineno, f"edge weight must be positive, got {raw_w}")
        if net.weight(a, b) != 0:
            raise FormatError(path, lineno, f"duplicate pair {a!r}/{b!r}")
        net.set_weight(a, b, w)
    return net


def write_matrix(net: WeightedNetwork, path: str | Path) -> None:
    path = Path(path)
    lines = [f"{MATRIX_MAGIC}\tnodes={len(net.nodes)}\tprovenance={net.provenance}"]
    lines.append("\t" + "\t".join(net.nodes))
    for a in net.nodes:
        row = [a] + [repr(net.weight(a, b)) if a != b else repr(0.0) for b in net.nodes]
        lines.append("\t".join(row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_matrix(path: str | Path) -> WeightedNetwork:
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if len(lines) < 2:
        raise FormatError(path, 1, "truncated matrix file")
    n, provenance = _parse_header(path, lines[0], MATRIX_MAGIC)
    header = lines[1].split("\t")
    if header[0] != "" or len(header) != n + 1:
        raise FormatError(path, 2, f"expected empty corner cell plus {n} node columns")
    nodes = header[1:]
    if len(lines) != n + 2:
        raise FormatError(path, len(lines), f"expected {n} data rows")
    mat = np.zeros((n, n))
    for i, line in enumerate(lines[2:]):
        lineno = i + 3
        fields = line.split("\t")
        if len(fields) != n + 1:
            raise FormatError(path, lineno, f"expected {n + 1} fields, got {len(fields)}")
        if fields[0] != nodes[i]:
            raise FormatError(path, lineno, f"row label {fields[0]!r} does not match column order")
        try:
            mat[i] = [float(v) for v in fields[1:]]
        except ValueError:
            raise FormatError(path, lineno, "bad weight value") from None
    try:
        return WeightedNetwork.from_matrix(nodes, mat, provenance)
    except ValueError as exc:
        raise FormatError(path, None, str(exc)) from None


def write_events(events: list[InteractionEvent], path: str | Path) -> None:
    """Time-ordered event stream as tab-separated (position, a, b, weight, source)."""
    path = Path(path)
    lines = ["# castnet-events\tcolumns=position,character_a,character_b,weight,source"]
    lines += [f"{e.position}\t{e.pair[0]}\t{e.pair[1]}\t{e.weight!r}\t{e.source}" for e in events]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_events(path: str | Path) -> list[InteractionEvent]:
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].startswith("# castnet-events"):
        raise FormatError(path, 1, "expected '# castnet-events' header")
    events = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 5:
            raise FormatError(path, lineno, f"expected 5 fields, got {len(fields)}")
        try:
            events.append(InteractionEvent(
                (fields[1], fields[2]), float(fields[3]), int(fields[0]), fields[4]
            ))
        except ValueError as exc:
            raise FormatError(path, lineno, str(exc)) from None
    return events
