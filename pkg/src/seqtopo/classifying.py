"""Classifying-space quotient of the tuple complex under a cyclic group.

Symbols are identified with residues mod ``m``; the group acts on tuples by
adding the same residue to every entry.  Each orbit is represented by the
translate whose first entry is ``0``.  Filtration values descend to the
quotient by averaging over the orbit.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Dict, Mapping, Optional, Sequence, Tuple

from .complex_core import DeltaComplex
from .filtration import INF, Direction, FilteredComplex, FiltrationTable, NotFacePreservingError
from .linalg import Field
from .persistence import Barcode, persistent_homology

QuotientSimplex = Tuple[int, ...]


@dataclass(frozen=True)
class CyclicGroupStructure:
    """``residue[code]`` gives the group element carried by alphabet symbol ``code``."""

    modulus: int
    residue: Tuple[int, ...]

    def __post_init__(self):
        if sorted(self.residue) != list(range(self.modulus)):
            raise ValueError("symbol-to-residue map must be a bijection onto Z/m")

    @classmethod
    def dna(cls) -> "CyclicGroupStructure":
        # A -> 0, C -> 1, T -> 2, G -> 3 with DNA codes A=0, C=1, G=2, T=3
        return cls(4, (0, 1, 3, 2))

    @classmethod
    def identity(cls, m: int) -> "CyclicGroupStructure":
        return cls(m, tuple(range(m)))

    @property
    def code_of(self) -> Tuple[int, ...]:
        inv = [0] * self.modulus
        for code, r in enumerate(self.residue):
            inv[r] = code
        return tuple(inv)

    def to_residues(self, simplex: Sequence[int]) -> Tuple[int, ...]:
        return tuple(self.residue[c] for c in simplex)


def canonical(residues: Sequence[int], m: int) -> QuotientSimplex:
    """Orbit representative: translate so that the first entry is 0."""
    g = residues[0]
    return tuple((r - g) % m for r in residues)


def quotient_face(q: QuotientSimplex, i: int, m: int) -> QuotientSimplex:
    n = len(q) - 1
    if n < 1 or not 0 <= i <= n:
        raise IndexError(f"face index {i} out of range for quotient simplex {q!r}")
    return canonical(q[:i] + q[i + 1:], m)


def quotient_faces(m: int):
    def faces(q):
        if len(q) <= 1:
            return ()
        return tuple(canonical(q[:i] + q[i + 1:], m) for i in range(len(q)))

    return faces


def quotient_simplices(m: int, dmax: int):
    return [(0,) + t for k in range(dmax + 1) for t in product(range(m), repeat=k)]


def classifying_complex(m: int, dmax: int) -> DeltaComplex:
    """The quotient complex ``BG`` for ``G = Z/m`` truncated at ``dmax``."""
    return DeltaComplex(quotient_simplices(m, dmax), faces=quotient_faces(m), check=True)


def orbit_average(f: FiltrationTable, group: CyclicGroupStructure, residues: Sequence[int]):
    """Average of ``f`` over every translate of ``residues`` (inf if any translate is inf)."""
    m = group.modulus
    code_of = group.code_of
    total = Fraction(0)
    for g in range(m):
        v = f.values[tuple(code_of[(r + g) % m] for r in residues)]
        if v == INF:
            return INF
        total += v
    total /= m
    return int(total) if total.denominator == 1 else total


def classifying_average(f: FiltrationTable, group: CyclicGroupStructure) -> Dict[QuotientSimplex, object]:
    """Orbit-averaged values of ``f`` on every quotient simplex up to ``f.dmax``."""
    if f.alphabet_size != group.modulus:
        raise ValueError(f"alphabet of size {f.alphabet_size} cannot carry Z/{group.modulus}")
    return {q: orbit_average(f, group, q) for q in quotient_simplices(group.modulus, f.dmax)}


def classifying_filtered_complex(fbar: Mapping[QuotientSimplex, object], m: int) -> FilteredComplex:
    faces = quotient_faces(m)
    for q, v in fbar.items():
        for t in faces(q):
            if fbar[t] > v:
                raise NotFacePreservingError(f"quotient values decrease from face {t!r} to {q!r}")
    entries = [(q, v) for q, v in fbar.items() if v != INF]
    return FilteredComplex(entries, Direction.SUBLEVEL, faces=faces)


def classifying_barcodes(
    fbar: Mapping[QuotientSimplex, object],
    group: CyclicGroupStructure | int,
    field: Field | str,
    maxdim: Optional[int] = None,
    representatives: bool = False,
) -> Barcode:
    """Persistence of the sublevel filtration of the quotient complex.

    The coefficient field matters here: identifications in the quotient put
    coefficients like 2 into boundaries, so GF(2) and Q barcodes differ.
    """
    m = group if isinstance(group, int) else group.modulus
    F = classifying_filtered_complex(fbar, m)
    return persistent_homology(F, field, maxdim=maxdim, representatives=representatives)


def format_quotient(q: QuotientSimplex) -> str:
    return "".join(str(r) for r in q)
