"""Delta-complexes built from symbol tuples.

A simplex of the tuple complex is a tuple of alphabet codes, repeats allowed;
its i-th face deletes position i.  :class:`DeltaComplex` also accepts an
explicit face map so that quotient complexes and hand-built examples (such as
the two-triangle sphere) share the same boundary and homology code.
"""

from __future__ import annotations

import json
from typing import Callable, Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .linalg import Field, Vector, make_vector, rank

Simplex = Tuple[int, ...]
FaceFn = Callable[[Hashable], Tuple[Hashable, ...]]


def face(simplex: Sequence, i: int) -> tuple:
    """Delete position ``i``: ``d_i(x0,...,xn) = (x0,..,x_{i-1},x_{i+1},..,xn)``."""
    n = len(simplex) - 1
    if n < 1:
        raise ValueError("a vertex has no faces")
    if not 0 <= i <= n:
        raise IndexError(f"face index {i} out of range for a {n}-simplex")
    return tuple(simplex[:i]) + tuple(simplex[i + 1:])


def tuple_faces(simplex: Sequence) -> tuple:
    if len(simplex) <= 1:
        return ()
    return tuple(face(simplex, i) for i in range(len(simplex)))


def tuple_dim(simplex: Sequence) -> int:
    return len(simplex) - 1


def delta_closure(simplices: Iterable[Sequence]) -> "DeltaComplex":
    """Smallest tuple Delta-complex containing ``simplices``."""
    seen = set()
    stack = [tuple(s) for s in simplices]
    for s in stack:
        if not s:
            raise ValueError("empty tuple is not a simplex")
    while stack:
        s = stack.pop()
        if s in seen:
            continue
        seen.add(s)
        if len(s) > 1:
            stack.extend(tuple_faces(s))
    return DeltaComplex.from_tuples(seen)


class DeltaComplex:
    """Graded simplex sets with face maps.

    ``faces(s)`` returns ``(d_0 s, ..., d_n s)``.  Within each grade
    simplices are kept in sorted (lexicographic) order and indexed by
    position.
    """

    def __init__(
        self,
        simplices: Iterable[Hashable],
        faces: FaceFn = tuple_faces,
        dim: Callable[[Hashable], int] = tuple_dim,
        check: bool = True,
    ):
        self.faces = faces
        self._dim = dim
        grades: Dict[int, list] = {}
        for s in set(simplices):
            grades.setdefault(dim(s), []).append(s)
        top = max(grades) if grades else -1
        self.grades: List[List[Hashable]] = [sorted(grades.get(n, [])) for n in range(top + 1)]
        self.index: List[Dict[Hashable, int]] = [{s: i for i, s in enumerate(g)} for g in self.grades]
        if check:
            self.validate()

    @classmethod
    def from_tuples(cls, simplices: Iterable[Sequence], check: bool = True) -> "DeltaComplex":
        return cls((tuple(s) for s in simplices), check=check)

    @classmethod
    def from_face_map(cls, face_map: Mapping[Hashable, Sequence[Hashable]], dims: Mapping[Hashable, int]) -> "DeltaComplex":
        fm = {k: tuple(v) for k, v in face_map.items()}
        return cls(dims.keys(), faces=lambda s: fm.get(s, ()), dim=dims.__getitem__)

    @property
    def dmax(self) -> int:
        return len(self.grades) - 1

    def __len__(self) -> int:
        return sum(len(g) for g in self.grades)

    def __contains__(self, s) -> bool:
        try:
            n = self._dim(s)
        except Exception:
            return False
        return 0 <= n <= self.dmax and s in self.index[n]

    def __iter__(self):
        for g in self.grades:
            yield from g

    def dim_of(self, s) -> int:
        return self._dim(s)

    def simplex_set(self) -> set:
        return set(self)

    def count(self, n: int) -> int:
        return len(self.grades[n]) if 0 <= n <= self.dmax else 0

    def validate(self) -> None:
        """Check face closure and the identity ``d_i d_j = d_{j-1} d_i`` (i < j)."""
        for n in range(1, self.dmax + 1):
            below = self.index[n - 1]
            for s in self.grades[n]:
                fs = self.faces(s)
                if len(fs) != n + 1:
                    raise ValueError(f"simplex {s!r} of dim {n} has {len(fs)} faces")
                for f in fs:
                    if f not in below:
                        raise ValueError(f"face {f!r} of {s!r} is missing from the complex")
                if n >= 2:
                    for j in range(n + 1):
                        fj = self.faces(fs[j])
                        for i in range(j):
                            if fj[i] != self.faces(fs[i])[j - 1]:
                                raise ValueError(f"face maps of {s!r} violate d_i d_j = d_(j-1) d_i")

    def boundary_columns(self, n: int, field: Field) -> List[Vector]:
        """Sparse columns of the n-th boundary matrix (rows: grade n-1, cols: grade n)."""
        if n < 1:
            raise ValueError("boundary matrices start at n = 1")
        if n > self.dmax + 1:
            raise ValueError(f"n = {n} exceeds the top grade {self.dmax}")
        if n == self.dmax + 1:
            return []
        rows = self.index[n - 1]
        return [
            make_vector(((rows[f], -1 if i % 2 else 1) for i, f in enumerate(self.faces(s))), field)
            for s in self.grades[n]
        ]

    def to_json(self, symbols: Optional[Sequence[str]] = None) -> str:
        """Debug dump: one ``{"dim": n, "simplices": [...]}`` object per grade."""

        def label(s):
            if symbols is not None and isinstance(s, tuple):
                return "".join(symbols[c] for c in s)
            return str(s)

        return json.dumps([{"dim": n, "simplices": [label(s) for s in g]} for n, g in enumerate(self.grades)])


def boundary_matrix(K: DeltaComplex, n: int, field: Field | str) -> List[Vector]:
    if n > K.dmax:
        raise ValueError(f"n = {n} exceeds the top grade {K.dmax}")
    return K.boundary_columns(n, Field.parse(field))


def dense_boundary(K: DeltaComplex, n: int) -> np.ndarray:
    """Real boundary matrix as a dense float array (shape ``|K_{n-1}| x |K_n|``)."""
    rows = K.count(n - 1)
    cols = K.count(n)
    out = np.zeros((rows, cols))
    if n < 1 or cols == 0:
        return out
    for j, col in enumerate(K.boundary_columns(n, Field.Q)):
        for i, c in col.items():
            out[i, j] = float(c)
    return out


def betti(K: DeltaComplex, n: int, field: Field | str = Field.Q) -> int:
    """``dim ker d_n - rank d_{n+1}``; grades above the top have zero boundary."""
    field = Field.parse(field)
    if n < 0 or n > K.dmax:
        return 0
    cells = K.count(n)
    rank_n = rank(K.boundary_columns(n, field), field) if n >= 1 else 0
    rank_up = rank(K.boundary_columns(n + 1, field), field) if n + 1 <= K.dmax else 0
    return cells - rank_n - rank_up


def betti_numbers(K: DeltaComplex, field: Field | str = Field.Q) -> List[int]:
    field = Field.parse(field)
    ranks = [0] + [rank(K.boundary_columns(n, field), field) for n in range(1, K.dmax + 1)] + [0]
    return [K.count(n) - ranks[n] - ranks[n + 1] for n in range(K.dmax + 1)]


def full_tuple_complex(alphabet_size: int, dmax: int) -> DeltaComplex:
    """Every tuple over ``range(alphabet_size)`` of dimension at most ``dmax``."""
    from itertools import product

    simplices = [t for k in range(dmax + 1) for t in product(range(alphabet_size), repeat=k + 1)]
    return DeltaComplex.from_tuples(simplices, check=False)


def sphere_complex() -> DeltaComplex:
    """Two triangles glued along their boundary: the minimal Delta-complex 2-sphere."""
    faces = {
        "sigma": ("e0", "e1", "e1"),
        "tau": ("e0", "e2", "e2"),
        "e0": ("v0", "v0"),
        "e1": ("v0", "v1"),
        "e2": ("v0", "v2"),
    }
    dims = {"v0": 0, "v1": 0, "v2": 0, "e0": 1, "e1": 1, "e2": 1, "sigma": 2, "tau": 2}
    return DeltaComplex.from_face_map(faces, dims)
