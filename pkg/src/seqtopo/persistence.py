"""Persistent homology of filtered complexes by exact column reduction."""

from __future__ import annotations

import csv
import io
import json
import math
from collections import defaultdict
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .filtration import Direction, FilteredComplex, format_value, parse_value
from .linalg import Field, Vector, column_reduce, make_vector

INF = math.inf


@dataclass(frozen=True)
class Interval:
    """A bar in native parameter units.

    An essential class has ``death = inf`` for increasing filtrations and
    ``-inf`` for decreasing ones.  ``representative`` is a tuple of
    ``(simplex, coefficient)`` pairs when requested.
    """

    dim: int
    birth: object
    death: object
    representative: Optional[Tuple[Tuple[object, object], ...]] = None

    @property
    def essential(self) -> bool:
        return self.death in (INF, -INF)


@dataclass
class Barcode:
    intervals: List[Interval]
    direction: Direction = Direction.SUBLEVEL
    field: Field = Field.Q
    zero_length: List[Interval] = dc_field(default_factory=list)

    def key(self, value):
        return value if self.direction is Direction.SUBLEVEL else -value

    def of_dim(self, n: int) -> List[Interval]:
        return [iv for iv in self.intervals if iv.dim == n]

    def pairs(self, n: Optional[int] = None) -> List[Tuple[object, object]]:
        """Sorted ``(birth, death)`` multiset, optionally for one dimension."""
        ivs = self.intervals if n is None else self.of_dim(n)
        return sorted(((iv.birth, iv.death) for iv in ivs), key=lambda p: (self.key(p[0]), self.key(p[1])))

    def multiset(self) -> List[Tuple[int, object, object]]:
        return sorted(
            ((iv.dim, iv.birth, iv.death) for iv in self.intervals),
            key=lambda t: (t[0], self.key(t[1]), self.key(t[2])),
        )

    def to_records(self, label=str) -> List[dict]:
        out = []
        for iv in sorted(self.intervals, key=lambda i: (i.dim, self.key(i.birth), self.key(i.death))):
            rec = {"dim": iv.dim, "birth": _json_value(iv.birth), "death": _json_value(iv.death)}
            if iv.representative is not None:
                rec["representative"] = [_term(label(s), c) for s, c in iv.representative]
            out.append(rec)
        return out

    def to_json(self, label=str, **extra) -> str:
        doc = {
            "field": self.field.value,
            "parameter_direction": self.direction.value,
            "intervals": self.to_records(label),
            "zero_length_count": len(self.zero_length),
        }
        doc.update(extra)
        return json.dumps(doc, indent=1, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["dim", "birth", "death"])
        for rec in self.to_records():
            w.writerow([rec["dim"], format_value(_from_json(rec["birth"])), format_value(_from_json(rec["death"]))])
        return buf.getvalue()

    @classmethod
    def from_json(cls, text: str) -> "Barcode":
        doc = json.loads(text)
        intervals = [Interval(r["dim"], _from_json(r["birth"]), _from_json(r["death"])) for r in doc["intervals"]]
        return cls(intervals, Direction(doc.get("parameter_direction", "increasing")), Field.parse(doc.get("field", "q")))


def _term(label: str, coef) -> str:
    if coef == 1:
        return label
    if coef == -1:
        return "-" + label
    return f"{format_value(Fraction(coef))}*{label}"


def _json_value(v):
    if v in (INF, -INF):
        return format_value(v)
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else format_value(v)
    return v


def _from_json(v):
    if isinstance(v, str):
        return -INF if v.strip() == "-inf" else parse_value(v)
    return v


def boundary_columns(F: FilteredComplex, field: Field) -> List[Vector]:
    """Boundary of every simplex in filtration order, rows indexed by filtration position."""
    cols = []
    for i, s in enumerate(F.simplices):
        entries = []
        for k, f in enumerate(F.faces(s)):
            j = F.position.get(f)
            if j is None:
                raise ValueError(f"face {F.label(f)} of simplex {F.label(s)} is missing from the filtration")
            if j >= i:
                raise ValueError(f"face {F.label(f)} enters after simplex {F.label(s)}")
            entries.append((j, -1 if k % 2 else 1))
        cols.append(make_vector(entries, field))
    return cols


def reduce_filtered(
    dims: Sequence[int],
    columns: Sequence[Vector],
    field: Field,
    maxdim: int,
    representatives: bool = False,
):
    """Pair the cells of a filtered chain complex given in filtration order.

    ``columns[i]`` is the boundary of cell ``i`` in terms of earlier cells.
    Dimensions are reduced from the top down; a column whose cell already
    appears as a pivot of the dimension above is cleared without work.
    Returns ``(pairs, killers, essential)`` where ``pairs`` maps birth cell
    to death cell, ``killers`` maps a death cell to its reduced column (the
    cycle that dies) and ``essential`` maps unpaired cells to their cycle.
    """
    by_dim: Dict[int, List[int]] = defaultdict(list)
    for i, d in enumerate(dims):
        by_dim[d].append(i)
    top = max(by_dim, default=-1)
    pairs: Dict[int, int] = {}
    killers: Dict[int, Vector] = {}
    essential: Dict[int, Vector] = {}
    cleared: set = set()
    for d in range(min(top, maxdim + 1), -1, -1):
        idx = by_dim.get(d, [])
        if not idx:
            continue
        local = {g: k for k, g in enumerate(idx)}
        skip = [local[g] for g in idx if g in cleared]
        red = column_reduce([columns[g] for g in idx], field, track=representatives, skip=skip)
        for row, k in red.pivots.items():
            pairs[row] = idx[k]
            cleared.add(row)
            if representatives:
                killers[idx[k]] = red.reduced[k]
        if d <= maxdim:
            for k in red.zero_columns:
                g = idx[k]
                if g in cleared:
                    continue
                vec = {idx[c]: v for c, v in red.transforms[k].items()} if representatives else {}
                essential[g] = vec
    return pairs, killers, essential


def build_barcode(
    dims: Sequence[int],
    values: Sequence,
    keys: Sequence,
    pairs: Dict[int, int],
    essential: Dict[int, Vector],
    direction: Direction,
    field: Field,
    maxdim: int,
    rep=None,
) -> Barcode:
    open_end = INF if direction is Direction.SUBLEVEL else -INF
    intervals: List[Interval] = []
    zero: List[Interval] = []
    for b, d in pairs.items():
        if dims[b] > maxdim:
            continue
        iv = Interval(dims[b], values[b], values[d], rep(d, True) if rep else None)
        (zero if keys[b] == keys[d] else intervals).append(iv)
    for g in essential:
        intervals.append(Interval(dims[g], values[g], open_end, rep(g, False) if rep else None))
    sign = 1 if direction is Direction.SUBLEVEL else -1
    order = lambda iv: (iv.dim, sign * iv.birth, sign * iv.death)
    return Barcode(sorted(intervals, key=order), direction, field, sorted(zero, key=order))


def persistent_homology(
    F: FilteredComplex,
    field: Field | str = Field.Q,
    maxdim: Optional[int] = None,
    representatives: bool = False,
) -> Barcode:
    """Barcode of ``F`` over ``field`` by column reduction with clearing.

    Zero-length bars (birth and death at the same parameter) are moved to
    ``Barcode.zero_length``.  With ``representatives`` each bar carries a
    cycle: the reduced killing column for finite bars, the reduction
    transform for essential ones.
    """
    field = Field.parse(field)
    if maxdim is None:
        maxdim = F.max_dim()
    cols = boundary_columns(F, field)
    dims = [F.dim(s) for s in F.simplices]
    pairs, killers, essential = reduce_filtered(dims, cols, field, maxdim, representatives)

    def rep(cell, finite):
        vec = killers[cell] if finite else essential[cell]
        return tuple((F.simplices[p], vec[p]) for p in sorted(vec))

    return build_barcode(
        dims, F.values, F.keys, pairs, essential, F.direction, field, maxdim, rep if representatives else None
    )


def persistent_betti(B: Barcode, n: int, a, b, strict: bool = False) -> int:
    """Number of dimension-``n`` classes alive from parameter ``a`` through ``b``.

    ``a`` must not come after ``b`` in filtration order (``a <= b`` for
    increasing filtrations, ``a >= b`` for decreasing ones).  By default this
    is the rank of ``H(K_a) -> H(K_b)``.  With ``strict=True`` and ``a``
    strictly before ``b`` the target is the open level set (everything that
    entered strictly before ``b``), so a class dying exactly at ``b`` still
    counts, so four separate primer vertices give ``beta_0^{0,1} = 4`` even
    though they are joined at 1.
    """
    ka, kb = B.key(a), B.key(b)
    if ka > kb:
        raise ValueError(f"parameter {a} comes after {b} in the filtration order")
    if strict and ka < kb:
        alive = lambda d: d >= kb
    else:
        alive = lambda d: d > kb
    return sum(1 for iv in B.intervals if iv.dim == n and B.key(iv.birth) <= ka and alive(B.key(iv.death)))


@dataclass
class BettiCurve:
    dim: int
    grid: List[object]
    values: List[int]


def betti_curve(B: Barcode, grid: Sequence, n: int) -> BettiCurve:
    values = [persistent_betti(B, n, t, t) for t in grid]
    return BettiCurve(n, list(grid), values)
