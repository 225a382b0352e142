"""Exact sparse linear algebra over GF(2) and the rationals.

Vectors are plain ``dict[int, coefficient]`` maps with zero entries removed.
Over GF(2) every stored coefficient is ``1``; over Q coefficients are ints or
:class:`fractions.Fraction`.  Matrices are lists of such column vectors.

Everything here is exact.  Ranks, kernels and persistence pairings must never
depend on a floating point threshold.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence

Vector = Dict[int, object]


class Field(str, enum.Enum):
    GF2 = "gf2"
    Q = "q"

    @classmethod
    def parse(cls, value: "str | Field") -> "Field":
        if isinstance(value, Field):
            return value
        key = str(value).strip().lower()
        aliases = {"gf2": cls.GF2, "z2": cls.GF2, "z/2": cls.GF2, "q": cls.Q, "r": cls.Q, "rational": cls.Q}
        if key not in aliases:
            raise ValueError(f"unknown coefficient field {value!r}; expected 'gf2' or 'q'")
        return aliases[key]


def coerce(value, field: Field):
    """Map an integer/rational coefficient into ``field`` (``0`` if it vanishes)."""
    if field is Field.GF2:
        if isinstance(value, Fraction):
            if value.denominator % 2 == 0:
                raise ZeroDivisionError("coefficient has even denominator; undefined over GF(2)")
            value = value.numerator
        return int(value) & 1
    return value if isinstance(value, Fraction) else Fraction(value)


def make_vector(entries: Iterable, field: Field) -> Vector:
    """Accumulate ``(index, coefficient)`` pairs into a reduced sparse vector."""
    out: Vector = {}
    if field is Field.GF2:
        for idx, c in entries:
            if coerce(c, field):
                if idx in out:
                    del out[idx]
                else:
                    out[idx] = 1
        return out
    for idx, c in entries:
        out[idx] = out.get(idx, 0) + c
    return {k: Fraction(v) for k, v in out.items() if v != 0}


def axpy(y: Vector, a, x: Vector, field: Field) -> None:
    """In place ``y += a * x``."""
    if field is Field.GF2:
        if not a & 1:
            return
        for k in x:
            if k in y:
                del y[k]
            else:
                y[k] = 1
        return
    for k, v in x.items():
        s = y.get(k, 0) + a * v
        if s == 0:
            y.pop(k, None)
        else:
            y[k] = s


def low(v: Vector) -> int:
    return max(v)


def inverse(c, field: Field):
    if field is Field.GF2:
        return 1
    return 1 / Fraction(c)


@dataclass
class Reduction:
    """Outcome of a column reduction ``R = M V``.

    ``pivots`` maps a pivot row (the lowest nonzero row of a reduced column)
    to the column that owns it.  ``transforms`` is only filled when tracking
    was requested.
    """

    reduced: List[Vector]
    pivots: Dict[int, int]
    transforms: Optional[List[Vector]] = None
    zero_columns: List[int] = dc_field(default_factory=list)


def column_reduce(
    columns: Sequence[Vector],
    field: Field,
    track: bool = False,
    skip: Optional[Iterable[int]] = None,
) -> Reduction:
    """Standard left-to-right column reduction with unique pivots.

    Columns listed in ``skip`` are treated as already zero (the clearing
    optimisation).  Input vectors are not modified.
    """
    skip = set(skip or ())
    reduced: List[Vector] = []
    transforms: Optional[List[Vector]] = [] if track else None
    pivots: Dict[int, int] = {}
    zero_columns: List[int] = []
    for j, col in enumerate(columns):
        if j in skip:
            r: Vector = {}
            v: Vector = {j: 1 if field is Field.GF2 else Fraction(1)}
        else:
            r = dict(col)
            v = {j: 1 if field is Field.GF2 else Fraction(1)}
            while r:
                p = low(r)
                k = pivots.get(p)
                if k is None:
                    break
                a = -r[p] * inverse(reduced[k][p], field) if field is Field.Q else 1
                axpy(r, a, reduced[k], field)
                if track:
                    axpy(v, a, transforms[k], field)
        if r:
            pivots[low(r)] = j
        else:
            zero_columns.append(j)
        reduced.append(r)
        if track:
            transforms.append(v)
    return Reduction(reduced, pivots, transforms, zero_columns)


def rank(columns: Sequence[Vector], field: Field) -> int:
    return len(column_reduce(columns, field).pivots)


def nullspace(columns: Sequence[Vector], field: Field) -> List[Vector]:
    """Basis of ``{x : sum_j x_j columns[j] = 0}`` as sparse vectors over column indices."""
    red = column_reduce(columns, field, track=True)
    return [red.transforms[j] for j in red.zero_columns]


class EchelonBasis:
    """Incrementally grown basis that can express members of its span.

    Basis vectors keep their insertion index.  ``coordinates`` returns the
    unique combination of inserted vectors equal to a given vector, which is
    the bookkeeping needed to run persistence on chain complexes whose cells
    are not single simplices.
    """

    def __init__(self, field: Field):
        self.field = field
        self.vectors: List[Vector] = []
        self._rows: Dict[int, tuple] = {}

    def __len__(self) -> int:
        return len(self.vectors)

    def _reduce(self, vec: Vector):
        field = self.field
        r = dict(vec)
        combo: Vector = {}
        while r:
            p = low(r)
            entry = self._rows.get(p)
            if entry is None:
                break
            red, comb = entry
            a = -r[p] * inverse(red[p], field) if field is Field.Q else 1
            axpy(r, a, red, field)
            axpy(combo, a, comb, field)
        return r, combo

    def contains(self, vec: Vector) -> bool:
        return not self._reduce(vec)[0]

    def add(self, vec: Vector) -> Optional[int]:
        """Insert ``vec`` if it is independent; return its index or ``None``."""
        r, combo = self._reduce(vec)
        if not r:
            return None
        idx = len(self.vectors)
        one = 1 if self.field is Field.GF2 else Fraction(1)
        axpy(combo, one, {idx: one}, self.field)
        self.vectors.append(dict(vec))
        self._rows[low(r)] = (r, combo)
        return idx

    def coordinates(self, vec: Vector) -> Vector:
        """Coefficients ``c`` with ``vec == sum_i c_i * vectors[i]``."""
        r, combo = self._reduce(vec)
        if r:
            raise ValueError("vector is not in the span of the basis")
        out: Vector = {}
        axpy(out, -1 if self.field is Field.Q else 1, combo, self.field)
        return out
