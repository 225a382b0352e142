"""Path complexes cut out by substring counts, and their path homology.

A path complex keeps, in each grade, the tuples whose count (or frequency)
is at least a threshold.  Its chain complex is the Omega tower: allowed
chains whose boundary is again allowed.  Omega spaces are not spanned by
single tuples, so persistence tracks an explicit incrementally grown basis.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Dict, List, Optional, Sequence as Seq, Tuple

from .complex_core import tuple_faces
from .filtration import (
    Direction,
    FiltrationTable,
    frequency_table,
    substring_count_table,
)
from .linalg import EchelonBasis, Field, Vector, make_vector, nullspace, rank
from .persistence import Barcode, build_barcode, reduce_filtered
from .seq_io import Sequence

Path = Tuple[int, ...]


@dataclass
class PathComplex:
    """Allowed paths by grade; ``paths[n]`` holds tuples of length ``n + 1``."""

    alphabet_size: int
    paths: List[List[Path]]
    symbols: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        self.paths = [sorted(set(g)) for g in self.paths]
        self._sets = [set(g) for g in self.paths]

    @property
    def dmax(self) -> int:
        return len(self.paths) - 1

    def allowed(self, p: Path) -> bool:
        n = len(p) - 1
        return 0 <= n <= self.dmax and p in self._sets[n]

    def validate(self) -> None:
        for n in range(1, self.dmax + 1):
            for p in self.paths[n]:
                for t in (p[:-1], p[1:]):
                    if t not in self._sets[n - 1]:
                        raise ValueError(f"truncation {t!r} of allowed path {p!r} is not allowed")


@dataclass
class OmegaChain:
    """Bases of the Omega spaces and the boundary maps between them.

    ``bases[n]`` is a list of sparse vectors keyed by n-tuples.
    ``boundaries[n]`` (n >= 1) expresses the boundary of each basis vector
    of grade n in the coordinates of ``bases[n - 1]``.
    """

    field: Field
    bases: List[List[Dict[Path, object]]]
    boundaries: List[List[Vector]]

    def dim(self, n: int) -> int:
        return len(self.bases[n]) if 0 <= n < len(self.bases) else 0


def _chain_boundary(chain: Dict[Path, object], field: Field) -> Dict[Path, object]:
    out: Dict[Path, object] = {}
    for p, c in chain.items():
        if len(p) == 1:
            continue
        for i, q in enumerate(tuple_faces(p)):
            out[q] = out.get(q, 0) + (-c if i % 2 else c)
    if field is Field.GF2:
        return {q: 1 for q, c in out.items() if c % 2}
    return {q: c for q, c in out.items() if c != 0}


def superlevel_path_complex(f: FiltrationTable, a) -> PathComplex:
    """Tuples with ``f >= a``.  ``a`` must be positive; use the full tuple set for 0."""
    if not a > 0:
        raise ValueError("threshold must be positive; the full tuple set is the a = 0 endpoint")
    return _threshold(f, a)


def _threshold(f: FiltrationTable, a) -> PathComplex:
    grades: List[List[Path]] = [[] for _ in range(f.dmax + 1)]
    for t, v in f.values.items():
        if v >= a:
            grades[len(t) - 1].append(t)
    return PathComplex(f.alphabet_size, grades, f.symbols)


def _omega_basis(P: PathComplex, n: int, field: Field) -> List[Dict[Path, object]]:
    allowed = P.paths[n]
    if n == 0:
        return [{p: 1} for p in allowed]
    columns = []
    outside: Dict[Path, int] = {}
    for p in allowed:
        entries = []
        for i, q in enumerate(tuple_faces(p)):
            if not P.allowed(q):
                entries.append((outside.setdefault(q, len(outside)), -1 if i % 2 else 1))
        columns.append(make_vector(entries, field))
    if not outside:
        return [{p: 1} for p in allowed]
    return [{allowed[j]: c for j, c in sorted(v.items())} for v in nullspace(columns, field)]


def omega_complex(P: PathComplex, field: Field | str = Field.Q) -> OmegaChain:
    field = Field.parse(field)
    bases = [_omega_basis(P, n, field) for n in range(P.dmax + 1)]
    boundaries: List[List[Vector]] = [[]]
    for n in range(1, P.dmax + 1):
        key = {p: i for i, p in enumerate(P.paths[n - 1])}
        below = EchelonBasis(field)
        for u in bases[n - 1]:
            below.add(make_vector(((key[p], c) for p, c in u.items()), field))
        cols = []
        for u in bases[n]:
            bd = _chain_boundary(u, field)
            cols.append(below.coordinates(make_vector(((key[p], c) for p, c in bd.items()), field)))
        boundaries.append(cols)
    return OmegaChain(field, bases, boundaries)


def path_betti(P: PathComplex, n: int, field: Field | str = Field.Q, omega: Optional[OmegaChain] = None) -> int:
    """``dim Omega_n - rank d_n - rank d_{n+1}``; needs grade ``n + 1``."""
    field = Field.parse(field)
    if n < 0:
        raise ValueError("dimension must be non-negative")
    if n + 1 > P.dmax:
        raise ValueError(f"path Betti number in dimension {n} needs paths up to dimension {n + 1}")
    omega = omega or omega_complex(P, field)
    down = rank(omega.boundaries[n], field) if n >= 1 else 0
    up = rank(omega.boundaries[n + 1], field)
    return omega.dim(n) - down - up


def path_table(seq: Sequence, fn: str = "count", dmax: int = 3) -> FiltrationTable:
    if fn in ("count", "N"):
        return substring_count_table(seq, dmax)
    if fn in ("freq", "p"):
        return frequency_table(seq, dmax)
    raise ValueError(f"path homology needs a count or frequency function, not {fn!r}")


def persistent_path_homology(
    source: Sequence | FiltrationTable,
    fn: str = "count",
    field: Field | str = Field.Q,
    dmax: int = 3,
) -> Barcode:
    """Barcode of the Omega tower over decreasing thresholds.

    Thresholds are the distinct positive table values in descending order
    followed by 0, where every tuple is allowed.  Bars are reported in
    dimensions below the top grade.
    """
    field = Field.parse(field)
    f = source if isinstance(source, FiltrationTable) else path_table(source, fn, dmax)
    top = f.dmax
    thresholds = sorted({v for v in f.values.values() if v > 0}, reverse=True) + [0]
    tuples = [list(product(range(f.alphabet_size), repeat=n + 1)) for n in range(top + 1)]
    coords = [{t: i for i, t in enumerate(g)} for g in tuples]
    bases = [EchelonBasis(field) for _ in range(top + 1)]
    cells: List[Tuple[int, int, int]] = []  # (threshold index, dim, basis index)
    previous: List[Optional[List[Path]]] = [None] * (top + 1)
    for k, a in enumerate(thresholds):
        P = _threshold(f, a)
        for n in range(top + 1):
            sig = (P.paths[n], P.paths[n - 1] if n else None)
            if previous[n] == sig:
                continue
            previous[n] = sig
            for u in _omega_basis(P, n, field):
                idx = bases[n].add(make_vector(((coords[n][p], c) for p, c in u.items()), field))
                if idx is not None:
                    cells.append((k, n, idx))
    cells.sort()
    position = {(n, i): pos for pos, (_, n, i) in enumerate(cells)}
    columns: List[Vector] = []
    for k, n, i in cells:
        if n == 0:
            columns.append({})
            continue
        u = {tuples[n][j]: c for j, c in bases[n].vectors[i].items()}
        bd = _chain_boundary(u, field)
        local = bases[n - 1].coordinates(make_vector(((coords[n - 1][p], c) for p, c in bd.items()), field))
        columns.append({position[(n - 1, j)]: c for j, c in local.items()})
    dims = [n for _, n, _ in cells]
    values = [thresholds[k] for k, _, _ in cells]
    keys = [k for k, _, _ in cells]
    maxdim = top - 1
    pairs, _, essential = reduce_filtered(dims, columns, field, maxdim)
    return build_barcode(dims, values, keys, pairs, essential, Direction.SUPERLEVEL, field, maxdim)
