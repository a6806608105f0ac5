"""Network cleaning, binarization, descriptive metrics, and cross-network
correlation.

Density is reported as n_edges / (n_nodes * (n_nodes - 1)). The networks are
undirected, so the textbook undirected density would be twice that, but the
deployed tooling used the directed-denominator convention and all published
reference figures follow it; `undirected_density` exposes the alternative.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import CastnetError, FormatError
from .extraction import WeightedNetwork, pair_key


class ConstantNetworkError(CastnetError):
    """Correlation is undefined because a weight vector has zero variance."""


@dataclass(frozen=True)
class NetworkMetrics:
    n_nodes: int
    n_edges: int
    density: float
    average_degree: float


@dataclass(frozen=True)
class BinaryNetwork:
    """Unweighted undirected network: links either exist or do not."""

    nodes: tuple[str, ...]
    edges: frozenset[tuple[str, str]]

    def __post_init__(self):
        index = {name: i for i, name in enumerate(self.nodes)}
        for a, b in self.edges:
            if a == b:
                raise ValueError(f"self-loop on {a!r}")
            if a not in index or b not in index:
                raise ValueError(f"edge ({a!r}, {b!r}) uses unknown node")
            if (a, b) != pair_key(a, b):
                raise ValueError(f"edge ({a!r}, {b!r}) not in canonical pair order")

    def has_edge(self, a: str, b: str) -> bool:
        return pair_key(a, b) in self.edges

    def n_edges(self) -> int:
        return len(self.edges)

    def to_weighted(self, provenance: str = "binary") -> WeightedNetwork:
        net = WeightedNetwork(self.nodes, provenance)
        for a, b in self.edges:
            net.set_weight(a, b, 1.0)
        return net


def graph_metrics(net: WeightedNetwork | BinaryNetwork) -> NetworkMetrics:
    """Node/edge counts plus density and average degree.

    A weighted input counts an edge wherever the weight is positive.
    """
    n = len(net.nodes)
    if n < 2:
        raise ValueError(f"metrics need at least 2 nodes, got {n}")
    m = net.n_links() if isinstance(net, WeightedNetwork) else net.n_edges()
    return NetworkMetrics(
        n_nodes=n,
        n_edges=m,
        density=m / (n * (n - 1)),
        average_degree=2 * m / n,
    )


def undirected_density(metrics: NetworkMetrics) -> float:
    """The conventional undirected density 2m / (n(n-1))."""
    return 2 * metrics.density


def sigma_correct(net: WeightedNetwork, k: float) -> WeightedNetwork:
    """Delete links whose weight sits more than k standard deviations from
    the mean link weight.

    Mean and population standard deviation are computed over the positive
    links only (a zero weight means "no link", not an observation of 0), in
    a single pass: the statistics come from the input network and are not
    recomputed as links are removed. Deletion is strict (distance > k*sigma)
    and two-sided. Surviving weights are unchanged.
    """
    if k <= 0:
        raise ValueError(f"k must be positive, got {k}")
    weights = [w for _, w in net.links()]
    if len(weights) < 2:
        warnings.warn(
            f"sigma_correct needs at least 2 links to estimate spread, "
            f"got {len(weights)}; returning the network unchanged"
        )
        return net.copy()
    mu = float(np.mean(weights))
    sigma = float(np.std(weights))  # population, not sample
    out = net.copy()
    for (a, b), w in net.links():
        if abs(w - mu) > k * sigma:
            out.set_weight(a, b, 0.0)
    return out


def threshold_binarize(net: WeightedNetwork, t: float = 11.0) -> BinaryNetwork:
    """Keep a link iff its weight reaches t; drop the weights.

    The default 11 exceeds the single-respondent maximum of 10, so a
    surviving link was reported by at least two respondents.
    """
    if t < 0:
        raise ValueError(f"threshold must be non-negative, got {t}")
    edges = frozenset(pair_key(a, b) for (a, b), w in net.links() if w >= t)
    return BinaryNetwork(net.nodes, edges)


_PAIR_MODES = ("all", "union", "intersection")


def _pair_vectors(a: WeightedNetwork, b: WeightedNetwork, pairs: str):
    if not a.same_nodes(b):
        raise ValueError("correlation requires identical node lists")
    if pairs not in _PAIR_MODES:
        raise ValueError(f"pairs must be one of {_PAIR_MODES}, got {pairs!r}")
    va = a.vector()
    vb = b.vector()
    if pairs == "union":
        mask = (va > 0) | (vb > 0)
    elif pairs == "intersection":
        mask = (va > 0) & (vb > 0)
    else:
        mask = np.ones(len(va), dtype=bool)
    va, vb = va[mask], vb[mask]
    if len(va) < 2:
        raise ConstantNetworkError(
            f"only {len(va)} pair(s) left under pairs={pairs!r}; correlation undefined"
        )
    return va, vb


def _check_variance(va: np.ndarray, vb: np.ndarray) -> None:
    flat = [name for name, v in (("first", va), ("second", vb)) if np.ptp(v) == 0]
    if flat:
        raise ConstantNetworkError(
            f"{' and '.join(flat)} network weight vector(s) constant; "
            f"correlation undefined"
        )


def _pearson(va: np.ndarray, vb: np.ndarray) -> float:
    xa = va - va.mean()
    xb = vb - vb.mean()
    return float(xa @ xb / np.sqrt((xa @ xa) * (xb @ xb)))


def pearson_correlation(
    a: WeightedNetwork, b: WeightedNetwork, pairs: str = "all"
) -> float:
    """Pearson coefficient between two networks' weight vectors.

    By default every unordered node pair contributes, zeros included, since
    extraction methods disagree precisely on which links exist. pairs="union"
    restricts to pairs positive in either network, "intersection" to pairs
    positive in both.
    """
    va, vb = _pair_vectors(a, b, pairs)
    _check_variance(va, vb)
    return _pearson(va, vb)


def permutation_significance(
    a: WeightedNetwork, b: WeightedNetwork, n_perm: int = 1000, seed: int = 0
) -> float:
    """QAP permutation p-value for the correlation between two networks.

    Repeatedly relabels b's nodes with a random permutation, recomputes the
    all-pairs correlation, and returns the fraction of permuted |r| that
    reach the observed |r|. Each permutation draws from its own spawned
    generator, so the result is reproducible for a given seed regardless of
    evaluation order or parallelism.
    """
    if n_perm < 100:
        raise ValueError(f"n_perm must be at least 100, got {n_perm}")
    va, vb = _pair_vectors(a, b, "all")
    _check_variance(va, vb)
    r_obs = _pearson(va, vb)

    n = len(a.nodes)
    mat_b = b.to_matrix()
    iu = np.triu_indices(n, 1)
    children = np.random.SeedSequence(seed).spawn(n_perm)
    permuted = np.empty((n_perm, len(vb)))
    for i, child in enumerate(children):
        perm = np.random.default_rng(child).permutation(n)
        permuted[i] = mat_b[np.ix_(perm, perm)][iu]

    xa = va - va.mean()
    xp = permuted - permuted.mean(axis=1, keepdims=True)
    denom = np.sqrt((xa @ xa) * (xp * xp).sum(axis=1))
    r_perm = (xp @ xa) / denom
    return float(np.count_nonzero(np.abs(r_perm) >= abs(r_obs)) / n_perm)


# --- report formats -------------------------------------------------------
#
# Structured reports are tab-separated key/value lines under a magic header;
# floats use repr so reading a report back loses nothing.

METRICS_MAGIC = "# castnet-metrics"
CORRELATION_MAGIC = "# castnet-correlation"


def _write_kv(path, magic: str, items: list[tuple[str, object]]) -> None:
    lines = [magic]
    for key, value in items:
        rendered = repr(value) if isinstance(value, float) else str(value)
        lines.append(f"{key}\t{rendered}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _read_kv(path, magic: str) -> dict[str, str]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != magic:
        raise FormatError(path, 1, f"expected header {magic!r}")
    out: dict[str, str] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise FormatError(path, lineno, "expected key<TAB>value")
        if fields[0] in out:
            raise FormatError(path, lineno, f"duplicate key {fields[0]!r}")
        out[fields[0]] = fields[1]
    return out


def write_metrics_report(metrics: NetworkMetrics, path) -> None:
    _write_kv(path, METRICS_MAGIC, [
        ("n_nodes", metrics.n_nodes),
        ("n_edges", metrics.n_edges),
        ("density", metrics.density),
        ("average_degree", metrics.average_degree),
        ("undirected_density", undirected_density(metrics)),
    ])


def read_metrics_report(path) -> NetworkMetrics:
    kv = _read_kv(path, METRICS_MAGIC)
    return NetworkMetrics(
        n_nodes=int(kv["n_nodes"]),
        n_edges=int(kv["n_edges"]),
        density=float(kv["density"]),
        average_degree=float(kv["average_degree"]),
    )


def format_metrics_table(metrics: NetworkMetrics) -> str:
    rows = [
        ("Nodes", f"{metrics.n_nodes}"),
        ("Links", f"{metrics.n_edges}"),
        ("Density", f"{metrics.density:.7f}"),
        ("Average degree", f"{metrics.average_degree:.7f}"),
        ("Undirected density", f"{undirected_density(metrics):.7f}"),
    ]
    width = max(len(label) for label, _ in rows)
    return "\n".join(f"{label:<{width}}  {value}" for label, value in rows)


def write_correlation_report(
    path, r: float, n_pairs: int, pairs: str,
    p_value: float | None = None, n_perm: int | None = None, seed: int | None = None,
) -> None:
    items: list[tuple[str, object]] = [("r", r), ("n_pairs", n_pairs), ("pairs", pairs)]
    if p_value is not None:
        items += [("p_value", p_value), ("n_perm", n_perm), ("seed", seed)]
    _write_kv(path, CORRELATION_MAGIC, items)


def read_correlation_report(path) -> dict:
    kv = _read_kv(path, CORRELATION_MAGIC)
    out: dict = {"r": float(kv["r"]), "n_pairs": int(kv["n_pairs"]), "pairs": kv["pairs"]}
    if "p_value" in kv:
        out["p_value"] = float(kv["p_value"])
        out["n_perm"] = int(kv["n_perm"])
        out["seed"] = int(kv["seed"])
    return out
