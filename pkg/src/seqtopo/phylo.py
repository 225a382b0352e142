"""Distances between feature curves and agglomerative trees over them."""

from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

DEFAULT_FAMILY = "spectral_gap_dim1"
METRICS = ("manhattan", "euclidean", "chebyshev", "minkowski")
LINKAGES = ("average", "single", "complete")


@dataclass
class FeatureCurveSet:
    """Curves per sequence id, all on one shared grid.

    ``curves[id][family]`` is a list of floats, where a family name such as
    ``spectral_gap_dim1`` or ``betti_dim0`` identifies the feature.
    """

    ids: List[str]
    grid: List[object]
    curves: Dict[str, Dict[str, List[float]]]

    def __post_init__(self):
        if len(set(self.ids)) != len(self.ids):
            raise ValueError("sequence ids must be unique")
        n = len(self.grid)
        for i in self.ids:
            for fam, c in self.curves.get(i, {}).items():
                if len(c) != n:
                    raise ValueError(f"curve {fam} of {i} has {len(c)} points, grid has {n}")

    def get(self, i: str, family: str) -> List[float]:
        try:
            return self.curves[i][family]
        except KeyError:
            raise KeyError(f"sequence {i!r} has no curve {family!r}") from None


def hold_extend(values: Sequence[float], length: int) -> List[float]:
    """Pad by repeating the last value (curves are constant after saturation)."""
    values = list(values)
    if not values:
        raise ValueError("cannot extend an empty curve")
    if len(values) >= length:
        return values[:length]
    return values + [values[-1]] * (length - len(values))


def unify_curves(
    per_id: Mapping[str, Mapping[str, Sequence[float]]],
    grid: Sequence,
    ids: Optional[Sequence[str]] = None,
) -> FeatureCurveSet:
    """Bring curves of different lengths onto ``grid`` by last-value hold.

    ``grid`` should run to the largest saturation step in the dataset; each
    curve is assumed to start at ``grid[0]``.
    """
    ids = list(ids) if ids is not None else sorted(per_id)
    curves = {i: {fam: hold_extend(c, len(grid)) for fam, c in per_id[i].items()} for i in ids}
    return FeatureCurveSet(ids, list(grid), curves)


def _parse_metric(metric: str, p: Optional[float]) -> Tuple[str, Optional[float]]:
    m = re.fullmatch(r"minkowski\(([^)]*)\)", metric.strip())
    if m:
        metric, p = "minkowski", float(m.group(1))
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; choose from {', '.join(METRICS)}")
    if metric == "minkowski":
        if p is None or not p >= 1:
            raise ValueError("minkowski distance needs p >= 1")
    return metric, p


def curve_distance(
    x: Sequence[float],
    y: Sequence[float],
    metric: str = "manhattan",
    p: Optional[float] = None,
    grid_x: Optional[Sequence] = None,
    grid_y: Optional[Sequence] = None,
) -> float:
    """Distance between two curves sampled on the same grid.

    ``metric`` may also be written ``minkowski(p)``.
    """
    metric, p = _parse_metric(metric, p)
    if grid_x is not None and grid_y is not None and list(grid_x) != list(grid_y):
        raise ValueError("curves are sampled on different grids")
    if len(x) != len(y):
        raise ValueError(f"curves have different lengths ({len(x)} and {len(y)})")
    diff = np.abs(np.asarray(x, dtype=float) - np.asarray(y, dtype=float))
    if diff.size == 0:
        return 0.0
    if metric == "manhattan":
        return float(diff.sum())
    if metric == "euclidean":
        return float(math.sqrt(float((diff * diff).sum())))
    if metric == "chebyshev":
        return float(diff.max())
    return float((diff ** p).sum() ** (1.0 / p))


@dataclass
class DistanceMatrix:
    ids: List[str]
    values: np.ndarray

    def __post_init__(self):
        v = self.values
        if v.shape != (len(self.ids), len(self.ids)):
            raise ValueError("distance matrix shape does not match the id list")
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise ValueError("distances must be finite and non-negative")
        if not np.array_equal(v, v.T) or np.any(np.diag(v) != 0):
            raise ValueError("distance matrix must be symmetric with zero diagonal")

    def __getitem__(self, pair: Tuple[str, str]) -> float:
        a, b = pair
        return float(self.values[self.ids.index(a), self.ids.index(b)])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([""] + self.ids)
        for i, row in zip(self.ids, self.values):
            w.writerow([i] + [repr(float(x)) for x in row])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "DistanceMatrix":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows:
            raise ValueError("empty distance matrix file")
        ids = rows[0][1:]
        body = rows[1:]
        if [r[0] for r in body] != ids:
            raise ValueError("row labels do not match the header")
        return cls(ids, np.array([[float(x) for x in r[1:]] for r in body]).reshape(len(ids), len(ids)))

    def to_phylip(self) -> str:
        lines = [f"{len(self.ids):>5}"]
        for i, row in zip(self.ids, self.values):
            lines.append(" ".join([i] + [f"{x:.10f}" for x in row]))
        return "\n".join(lines) + "\n"


def distance_matrix(
    C: FeatureCurveSet,
    metric: str = "manhattan",
    families: Union[str, Sequence[str]] = DEFAULT_FAMILY,
    p: Optional[float] = None,
) -> DistanceMatrix:
    """Pairwise curve distances; several families are summed."""
    families = [families] if isinstance(families, str) else list(families)
    if not families:
        raise ValueError("select at least one curve family")
    metric, p = _parse_metric(metric, p)
    missing = [f"{i}:{fam}" for i in C.ids for fam in families if fam not in C.curves.get(i, {})]
    if missing:
        raise KeyError("missing curves " + ", ".join(missing))
    n = len(C.ids)
    out = np.zeros((n, n))
    for a in range(n):
        for b in range(a + 1, n):
            d = sum(curve_distance(C.curves[C.ids[a]][f], C.curves[C.ids[b]][f], metric, p) for f in families)
            out[a, b] = out[b, a] = d
    return DistanceMatrix(list(C.ids), out)


@dataclass
class Node:
    """A dendrogram node; leaves have ``name`` and height 0."""

    height: float
    children: Tuple["Node", ...] = ()
    name: Optional[str] = None

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def leaves(self) -> List[str]:
        if self.is_leaf:
            return [self.name]
        return [x for c in self.children for x in c.leaves()]

    def clades(self) -> List[frozenset]:
        out = [frozenset(self.leaves())]
        for c in self.children:
            out.extend(c.clades())
        return out


@dataclass
class Dendrogram:
    root: Node
    merges: List[Tuple[frozenset, frozenset, float]]

    def clades(self) -> set:
        return set(self.root.clades())

    def is_monophyletic(self, group) -> bool:
        return frozenset(group) in self.clades()


def cluster_upgma(D: DistanceMatrix, linkage: str = "average") -> Dendrogram:
    """Agglomerative clustering; merge heights are half the linkage distance.

    Among equal closest pairs the one whose clusters have the
    lexicographically smallest (first id, second id) wins, where a cluster is
    named by its smallest member id.
    """
    if linkage not in LINKAGES:
        raise ValueError(f"unknown linkage {linkage!r}; choose from {', '.join(LINKAGES)}")
    n = len(D.ids)
    if n < 2:
        raise ValueError("need at least two sequences to build a tree")
    nodes: Dict[int, Node] = {k: Node(0.0, name=i) for k, i in enumerate(D.ids)}
    label = {k: i for k, i in enumerate(D.ids)}
    size = {k: 1 for k in range(n)}
    dist: Dict[Tuple[int, int], float] = {(a, b): float(D.values[a, b]) for a in range(n) for b in range(a + 1, n)}
    merges = []
    next_id = n
    while len(nodes) > 1:
        def rank(item):
            (a, b), d = item
            return (d,) + tuple(sorted((label[a], label[b])))

        (a, b), d = min(dist.items(), key=rank)
        if label[b] < label[a]:
            a, b = b, a
        h = d / 2.0
        node = Node(h, (nodes[a], nodes[b]))
        merges.append((frozenset(nodes[a].leaves()), frozenset(nodes[b].leaves()), h))
        new = next_id
        next_id += 1
        for k in list(nodes):
            if k in (a, b):
                continue
            da = dist[(min(a, k), max(a, k))]
            db = dist[(min(b, k), max(b, k))]
            if linkage == "average":
                dn = (size[a] * da + size[b] * db) / (size[a] + size[b])
            elif linkage == "single":
                dn = min(da, db)
            else:
                dn = max(da, db)
            dist[(k, new)] = dn
        dist = {key: v for key, v in dist.items() if a not in key and b not in key}
        del nodes[a], nodes[b]
        nodes[new] = node
        size[new] = size.pop(a) + size.pop(b)
        label[new] = min(label[a], label[b])
    return Dendrogram(next(iter(nodes.values())), merges)


_RESERVED = re.compile(r"[\s()\[\]':;,]")


def newick_name(name: str) -> str:
    if _RESERVED.search(name):
        return "'" + name.replace("'", "''") + "'"
    return name


def _length(x: float) -> str:
    return format(x, ".10g")


def to_newick(T: Dendrogram | Node) -> str:
    root = T.root if isinstance(T, Dendrogram) else T

    def walk(node: Node, parent: float) -> str:
        if node.is_leaf:
            body = newick_name(node.name)
        else:
            body = "(" + ",".join(walk(c, node.height) for c in node.children) + ")"
        return f"{body}:{_length(parent - node.height)}"

    if root.is_leaf:
        return newick_name(root.name) + ";"
    return "(" + ",".join(walk(c, root.height) for c in root.children) + ");"
