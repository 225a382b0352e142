"""Filtration functions on tuples of a sequence and the filtered complexes they induce.

Four functions are provided:

* ``min_window_table``       shortest in-order (gapped) occurrence span
* ``first_occurrence_table`` span of the greedy left-to-right embedding
* ``substring_count_table``  number of contiguous (overlapping) occurrences
* ``frequency_table``        occurrence count divided by the sequence length

The first two are read as sublevel filtrations.  The last two are not
monotone on faces and are read as superlevel filtrations whose level sets
are closed under faces (Delta-closure).  Superlevel filtrations are turned
into increasing ones internally by negating the parameter; values are always
stored in the function's own units.
"""

from __future__ import annotations

import bisect
import csv
import enum
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Dict, Hashable, Iterable, List, Optional, Sequence as Seq, Tuple

import numpy as np

from .complex_core import DeltaComplex, tuple_dim, tuple_faces
from .seq_io import Sequence

INF = math.inf


class Direction(str, enum.Enum):
    SUBLEVEL = "increasing"
    SUPERLEVEL = "decreasing"


class NotFacePreservingError(ValueError):
    pass


def all_tuples(alphabet_size: int, dmax: int) -> List[Tuple[int, ...]]:
    """All tuples of dimension 0..dmax in (dim, lexicographic) order."""
    return [t for k in range(dmax + 1) for t in product(range(alphabet_size), repeat=k + 1)]


def cofaces(simplex: Tuple[int, ...], alphabet_size: int) -> set:
    """Tuples one dimension up having ``simplex`` as a face (insert one symbol anywhere)."""
    out = set()
    for pos in range(len(simplex) + 1):
        for c in range(alphabet_size):
            out.add(simplex[:pos] + (c,) + simplex[pos:])
    return out


def parse_value(text: str):
    text = text.strip()
    if text.lower() in ("inf", "+inf", "infinity"):
        return INF
    v = Fraction(text)
    return int(v) if v.denominator == 1 else v


def format_value(v) -> str:
    if v == INF:
        return "inf"
    if v == -INF:
        return "-inf"
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return str(v)


@dataclass
class FiltrationTable:
    """Values of a filtration function on every tuple up to ``dmax``."""

    alphabet_size: int
    dmax: int
    values: Dict[Tuple[int, ...], object]
    face_preserving: bool
    direction: Direction = Direction.SUBLEVEL
    symbols: Optional[Tuple[str, ...]] = None
    name: str = ""

    def __getitem__(self, key):
        if isinstance(key, str):
            key = self.encode(key)
        return self.values[tuple(key)]

    def encode(self, word: str) -> Tuple[int, ...]:
        if self.symbols is None:
            raise ValueError("table has no symbol names")
        idx = {s: i for i, s in enumerate(self.symbols)}
        return tuple(idx[c] for c in word)

    def label(self, simplex: Seq[int]) -> str:
        if self.symbols is None:
            return "".join(str(c) for c in simplex) if self.alphabet_size <= 10 else ".".join(map(str, simplex))
        return "".join(self.symbols[c] for c in simplex)

    def keys(self):
        return self.values.keys()

    def finite_values(self) -> List:
        return sorted({v for v in self.values.values() if v != INF})

    def face_violations(self, direction: Optional[Direction] = None) -> List[Tuple[tuple, tuple]]:
        """Pairs ``(face, simplex)`` breaking monotonicity for ``direction``."""
        direction = Direction(direction or self.direction)
        bad = []
        for s, v in self.values.items():
            for f in tuple_faces(s):
                fv = self.values[f]
                if (fv > v) if direction is Direction.SUBLEVEL else (fv < v):
                    bad.append((f, s))
        return bad

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["tuple", "value"])
        for s in sorted(self.values, key=lambda t: (len(t), t)):
            w.writerow([self.label(s), format_value(self.values[s])])
        return buf.getvalue()

    @classmethod
    def from_csv(
        cls,
        text: str,
        symbols: Seq[str],
        direction: Direction | str = Direction.SUBLEVEL,
        name: str = "",
    ) -> "FiltrationTable":
        """Read a ``tuple,value`` table.  Face preservation is recomputed, not trusted."""
        symbols = tuple(symbols)
        idx = {s: i for i, s in enumerate(symbols)}
        values = {}
        rows = csv.reader(io.StringIO(text))
        header = next(rows, None)
        if header is None or [h.strip() for h in header[:2]] != ["tuple", "value"]:
            raise ValueError("filtration CSV must start with the header 'tuple,value'")
        for row in rows:
            if not row:
                continue
            try:
                key = tuple(idx[c] for c in row[0].strip())
            except KeyError as exc:
                raise ValueError(f"unknown symbol {exc.args[0]!r} in tuple {row[0]!r}") from None
            values[key] = parse_value(row[1])
        dmax = max(len(k) for k in values) - 1
        missing = [t for t in all_tuples(len(symbols), dmax) if t not in values]
        if missing:
            raise ValueError(f"table is missing {len(missing)} tuples, e.g. {missing[0]!r}")
        table = cls(len(symbols), dmax, values, False, Direction(direction), symbols, name)
        table.face_preserving = not table.face_violations()
        return table


# ---------------------------------------------------------------------------
# filtration functions


def _min_windows(codes: np.ndarray, k: int, dmax: int) -> Dict[Tuple[int, ...], object]:
    """Shortest span of an in-order embedding for every tuple, all patterns in one sweep.

    For a prefix ``p`` the array ``S_p[j]`` holds the latest start position of
    an embedding of ``p`` that finishes at or before ``j`` (``-1`` if none).
    Appending symbol ``c`` gives ``S_pc[j] = S_p[j' - 1]`` where ``j'`` is the
    last occurrence of ``c`` at or before ``j``; the window of ``pc`` ending
    at an occurrence ``j`` of ``c`` spans ``j - S_p[j - 1]``.  Every prefix of
    the tuple trie is evaluated once, vectorised over positions.
    """
    n = codes.size
    idx_dtype = np.int32 if n < 2**31 - 1 else np.int64
    positions = [np.flatnonzero(codes == c).astype(idx_dtype) for c in range(k)]
    after_first = [p[p >= 1] for p in positions]
    out: Dict[Tuple[int, ...], object] = {}

    def fill_absent(prefix):
        for extra in range(1, dmax + 2 - len(prefix)):
            for tail in product(range(k), repeat=extra):
                out[prefix + tail] = INF

    def visit(prefix, latest):
        for c in range(k):
            child = prefix + (c,)
            p = after_first[c]
            starts = latest[p - 1]
            ok = starts >= 0
            if not ok.any():
                out[child] = INF
                if len(child) <= dmax:
                    fill_absent(child)
                continue
            ends = p[ok]
            starts = starts[ok]
            out[child] = int((ends - starts).min())
            if len(child) <= dmax:
                nxt = np.full(n, -1, dtype=idx_dtype)
                nxt[ends] = starts
                np.maximum.accumulate(nxt, out=nxt)
                visit(child, nxt)

    for c in range(k):
        root = (c,)
        if positions[c].size == 0:
            out[root] = INF
            fill_absent(root)
            continue
        out[root] = 0
        if dmax >= 1:
            latest = np.full(n, -1, dtype=idx_dtype)
            latest[positions[c]] = positions[c]
            np.maximum.accumulate(latest, out=latest)
            visit(root, latest)
    return out


def min_window_table(seq: Sequence, dmax: int = 3, value_cap: Optional[int] = None) -> FiltrationTable:
    """Minimal window length of every tuple (values above ``value_cap`` become inf)."""
    if dmax < 0:
        raise ValueError("dmax must be non-negative")
    k = len(seq.alphabet)
    values = _min_windows(seq.codes, k, dmax)
    if value_cap is not None:
        values = {t: (INF if v != INF and v > value_cap else v) for t, v in values.items()}
    return FiltrationTable(k, dmax, values, True, Direction.SUBLEVEL, seq.alphabet.symbols, "ell")


def first_occurrence_table(seq: Sequence, dmax: int = 3, value_cap: Optional[int] = None) -> FiltrationTable:
    """Span of the greedy first embedding of every tuple.

    The greedy embedding of a prefix is a prefix of the greedy embedding, so
    the tuple trie is walked once.  This function is *not* monotone on the
    first face in general (a later first symbol can shorten the span), so the
    ``face_preserving`` flag reflects the values actually computed.
    """
    if dmax < 0:
        raise ValueError("dmax must be non-negative")
    k = len(seq.alphabet)
    data = seq.codes.tobytes()
    values: Dict[Tuple[int, ...], object] = {}

    def visit(prefix, first, last):
        for c in range(k):
            child = prefix + (c,)
            pos = data.find(c, last + 1) if last >= 0 else -1
            values[child] = INF if pos < 0 else pos - first
            if len(child) <= dmax:
                visit(child, first, pos)

    for c in range(k):
        pos = data.find(c)
        values[(c,)] = INF if pos < 0 else 0
        if dmax >= 1:
            visit((c,), pos, pos)
    if value_cap is not None:
        values = {t: (INF if v != INF and v > value_cap else v) for t, v in values.items()}
    table = FiltrationTable(k, dmax, values, False, Direction.SUBLEVEL, seq.alphabet.symbols, "ell1")
    table.face_preserving = not table.face_violations()
    return table


def _substring_counts(codes: np.ndarray, k: int, dmax: int) -> Dict[Tuple[int, ...], int]:
    n = codes.size
    out = {}
    window = np.zeros(n, dtype=np.int64)
    for length in range(1, dmax + 2):
        m = n - length + 1
        if m > 0:
            window = window[:m] * k + codes[length - 1:length - 1 + m]
            counts = np.bincount(window, minlength=k**length)
        else:
            counts = np.zeros(k**length, dtype=np.int64)
        for code, t in enumerate(product(range(k), repeat=length)):
            out[t] = int(counts[code])
    return out


def substring_count_table(seq: Sequence, dmax: int = 3) -> FiltrationTable:
    """Contiguous occurrence counts (overlaps counted) of every tuple."""
    k = len(seq.alphabet)
    values = _substring_counts(seq.codes, k, dmax)
    return FiltrationTable(k, dmax, values, False, Direction.SUPERLEVEL, seq.alphabet.symbols, "count")


def frequency_table(seq: Sequence, dmax: int = 3) -> FiltrationTable:
    """Occurrence count divided by the sequence length (elements minus one)."""
    if seq.span < 1:
        raise ValueError("frequency needs a sequence of at least two symbols")
    k = len(seq.alphabet)
    counts = _substring_counts(seq.codes, k, dmax)
    values = {t: Fraction(c, seq.span) for t, c in counts.items()}
    return FiltrationTable(k, dmax, values, False, Direction.SUPERLEVEL, seq.alphabet.symbols, "freq")


def face_preserving_modification(f: FiltrationTable, direction: Direction | str = Direction.SUBLEVEL) -> FiltrationTable:
    """Smallest pointwise upper bound of ``f`` that is monotone for ``direction``.

    SUBLEVEL: ``max(f(s), max over faces)``, computed bottom-up, so faces never
    exceed their cofaces.  SUPERLEVEL: ``max(f(s), max over cofaces within
    dmax)``, computed top-down, so superlevel sets are closed under faces and
    coincide with the Delta-closure of the raw superlevel sets.
    """
    direction = Direction(direction)
    order = sorted(f.values, key=len, reverse=direction is Direction.SUPERLEVEL)
    out: Dict[Tuple[int, ...], object] = {}
    for s in order:
        v = f.values[s]
        if direction is Direction.SUBLEVEL:
            neighbours = tuple_faces(s)
        else:
            neighbours = cofaces(s, f.alphabet_size) if len(s) <= f.dmax else ()
        for t in neighbours:
            if out[t] > v:
                v = out[t]
        out[s] = v
    return FiltrationTable(f.alphabet_size, f.dmax, out, True, direction, f.symbols, f.name)


# ---------------------------------------------------------------------------
# filtered complexes


class FilteredComplex:
    """Simplices with entry values, ordered by (internal key, dim, label).

    ``values`` are in the native units of the filtration function.  The
    internal key is the value itself for increasing filtrations and its
    negation for decreasing ones, so that one reduction engine serves both.
    """

    def __init__(
        self,
        entries: Iterable[Tuple[Hashable, object]],
        direction: Direction = Direction.SUBLEVEL,
        faces: Callable = tuple_faces,
        dim: Callable = tuple_dim,
        symbols: Optional[Seq[str]] = None,
    ):
        self.direction = Direction(direction)
        self.faces = faces
        self.dim = dim
        self.symbols = tuple(symbols) if symbols is not None else None
        sign = 1 if self.direction is Direction.SUBLEVEL else -1
        ordered = sorted(entries, key=lambda e: (sign * e[1], dim(e[0]), e[0]))
        self.simplices: List[Hashable] = [s for s, _ in ordered]
        self.values: List[object] = [v for _, v in ordered]
        self.keys: List[object] = [sign * v for v in self.values]
        self.position = {s: i for i, s in enumerate(self.simplices)}
        if len(self.position) != len(self.simplices):
            raise ValueError("duplicate simplex in filtration")
        seen = []
        for v in self.values:
            if not seen or seen[-1] != v:
                seen.append(v)
        self.grid: List[object] = seen

    def __len__(self) -> int:
        return len(self.simplices)

    def key(self, value):
        return value if self.direction is Direction.SUBLEVEL else -value

    def value_of(self, simplex) -> object:
        return self.values[self.position[simplex]]

    def count_at(self, a) -> int:
        """Number of simplices present at parameter ``a`` (a prefix length)."""
        return bisect.bisect_right(self.keys, self.key(a))

    def simplices_at(self, a) -> List[Hashable]:
        return self.simplices[: self.count_at(a)]

    def complex_at(self, a) -> DeltaComplex:
        return DeltaComplex(self.simplices_at(a), faces=self.faces, dim=self.dim, check=False)

    def max_dim(self) -> int:
        return max((self.dim(s) for s in self.simplices), default=-1)

    def validate(self) -> None:
        """Every simplex must be preceded by all of its faces."""
        for i, s in enumerate(self.simplices):
            for f in self.faces(s):
                j = self.position.get(f)
                if j is None:
                    raise ValueError(f"face {f!r} of {s!r} is missing from the filtration")
                if j > i:
                    raise ValueError(f"face {f!r} enters after {s!r}")

    def label(self, simplex) -> str:
        if self.symbols is not None and isinstance(simplex, tuple):
            return "".join(self.symbols[c] for c in simplex)
        if isinstance(simplex, tuple):
            return "".join(str(c) for c in simplex)
        return str(simplex)


def sublevel_filtered_complex(f: FiltrationTable) -> FilteredComplex:
    """Sublevel filtration ``{s : f(s) <= a}`` of a face-preserving table."""
    if not f.face_preserving or f.face_violations(Direction.SUBLEVEL):
        raise NotFacePreservingError(
            f"table {f.name or ''!s} is not face-preserving; apply face_preserving_modification "
            "or use superlevel_filtered_complex (Delta-closure) instead"
        )
    entries = [(s, v) for s, v in f.values.items() if v != INF]
    return FilteredComplex(entries, Direction.SUBLEVEL, symbols=f.symbols)


def superlevel_filtered_complex(f: FiltrationTable) -> FilteredComplex:
    """Delta-closure of the superlevel sets ``{s : f(s) >= a}`` as a decreasing filtration.

    A simplex enters at the largest ``a`` for which it lies in the closure,
    i.e. the maximum of ``f`` over the simplex and all of its cofaces within
    ``dmax``.
    """
    if any(v == INF or v == -INF for v in f.values.values()):
        raise ValueError("superlevel filtrations need finite values")
    closed = face_preserving_modification(f, Direction.SUPERLEVEL)
    return FilteredComplex(closed.values.items(), Direction.SUPERLEVEL, symbols=f.symbols)


def filtered_complex(f: FiltrationTable) -> FilteredComplex:
    """Dispatch on the table's direction."""
    if f.direction is Direction.SUPERLEVEL:
        return superlevel_filtered_complex(f)
    return sublevel_filtered_complex(f)


def delta_closure_superlevel_set(f: FiltrationTable, a) -> set:
    """Explicit Delta-closure of ``{s : f(s) >= a}`` (reference construction)."""
    out = set()
    stack = [s for s, v in f.values.items() if v >= a]
    while stack:
        s = stack.pop()
        if s not in out:
            out.add(s)
            stack.extend(tuple_faces(s))
    return out
