"""Reading FASTA / plain-text sequences and mapping them onto a fixed alphabet."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence as Seq, Tuple, Union

import numpy as np


class SequenceError(ValueError):
    """Raised for unusable sequence input."""


class ParseError(SequenceError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class AmbiguityPolicy(str, enum.Enum):
    SKIP = "skip"
    REJECT = "reject"


@dataclass(frozen=True)
class Alphabet:
    symbols: Tuple[str, ...]

    def __post_init__(self):
        syms = tuple(self.symbols)
        object.__setattr__(self, "symbols", syms)
        if not 1 <= len(syms) <= 64:
            raise ValueError("alphabet must have between 1 and 64 symbols")
        if any(len(s) != 1 for s in syms):
            raise ValueError("alphabet symbols must be single characters")
        if len(set(syms)) != len(syms):
            raise ValueError(f"duplicate symbols in alphabet {''.join(syms)!r}")

    @classmethod
    def from_string(cls, text: str) -> "Alphabet":
        return cls(tuple(text))

    def __len__(self) -> int:
        return len(self.symbols)

    @property
    def index(self) -> Dict[str, int]:
        return {s: i for i, s in enumerate(self.symbols)}

    def encode(self, text: str) -> Tuple[int, ...]:
        idx = self.index
        return tuple(idx[c] for c in text)

    def decode(self, codes: Iterable[int]) -> str:
        return "".join(self.symbols[int(c)] for c in codes)


DNA = Alphabet(("A", "C", "G", "T"))


@dataclass(frozen=True, eq=False)
class Sequence:
    """A validated sequence; ``codes`` is a read-only ``uint8`` array."""

    id: str
    codes: np.ndarray
    alphabet: Alphabet = DNA

    def __post_init__(self):
        codes = np.ascontiguousarray(self.codes, dtype=np.uint8)
        if codes.ndim != 1 or codes.size == 0:
            raise SequenceError(f"sequence {self.id!r} is empty")
        if int(codes.max()) >= len(self.alphabet):
            raise SequenceError(f"sequence {self.id!r} has codes outside the alphabet")
        codes.setflags(write=False)
        object.__setattr__(self, "codes", codes)

    def __len__(self) -> int:
        return int(self.codes.size)

    @property
    def span(self) -> int:
        # Number of steps between the first and last symbol.
        return len(self) - 1

    @property
    def text(self) -> str:
        table = np.frombuffer("".join(self.alphabet.symbols).encode("ascii"), dtype=np.uint8)
        return table[self.codes].tobytes().decode("ascii")

    def __eq__(self, other) -> bool:
        if not isinstance(other, Sequence):
            return NotImplemented
        return (
            self.id == other.id
            and self.alphabet == other.alphabet
            and np.array_equal(self.codes, other.codes)
        )

    def __hash__(self) -> int:
        return hash((self.id, self.alphabet, self.codes.tobytes()))


def _as_text(data: Union[bytes, str]) -> str:
    if isinstance(data, bytes):
        try:
            return data.decode("ascii")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not ASCII text (byte offset {exc.start})") from None
    return data


def parse_fasta(data: Union[bytes, str]) -> List[Tuple[str, str]]:
    """Split FASTA text into ``(id, raw_sequence)`` records.

    The id is the header up to the first whitespace.  Sequence lines are
    concatenated with all whitespace removed.  Blank lines are ignored.
    """
    text = _as_text(data)
    records: List[Tuple[str, List[str], int]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith(">"):
            header = stripped[1:].strip()
            ident = header.split()[0] if header else ""
            if not ident:
                raise ParseError("empty FASTA header", lineno)
            records.append((ident, [], lineno))
        elif stripped.startswith(";"):
            continue
        else:
            if not records:
                raise ParseError("sequence data before the first '>' header", lineno)
            records[-1][1].append("".join(stripped.split()))
    out = []
    for ident, chunks, lineno in records:
        seq = "".join(chunks)
        if not seq:
            raise ParseError(f"record {ident!r} has no sequence", lineno)
        out.append((ident, seq))
    return out


def parse_plain(data: Union[bytes, str]) -> List[Tuple[str, str]]:
    """One sequence per non-blank line, ids ``seq0``, ``seq1``, ..."""
    text = _as_text(data)
    lines = ["".join(l.split()) for l in text.splitlines()]
    return [(f"seq{i}", s) for i, s in enumerate(l for l in lines if l)]


def parse_records(data: Union[bytes, str], fmt: str = "auto") -> List[Tuple[str, str]]:
    if fmt == "auto":
        text = _as_text(data)
        first = next((l.strip() for l in text.splitlines() if l.strip()), "")
        fmt = "fasta" if first.startswith((">", ";")) else "plain"
        data = text
    if fmt == "fasta":
        return parse_fasta(data)
    if fmt == "plain":
        return parse_plain(data)
    raise ValueError(f"unknown input format {fmt!r}")


def _lookup_table(alphabet: Alphabet) -> np.ndarray:
    table = np.full(256, 255, dtype=np.uint8)
    for i, s in enumerate(alphabet.symbols):
        table[ord(s)] = i
        table[ord(s.upper())] = i
        table[ord(s.lower())] = i
    if alphabet == DNA:
        table[ord("U")] = table[ord("u")] = alphabet.index["T"]
    return table


def normalize(
    raw: str,
    policy: AmbiguityPolicy | str = AmbiguityPolicy.SKIP,
    alphabet: Alphabet = DNA,
    id: str = "seq",
) -> Sequence:
    """Case-fold, fold RNA ``U`` onto ``T`` and drop or reject foreign characters.

    Positions in error messages are 1-based.
    """
    policy = AmbiguityPolicy(policy)
    try:
        buf = np.frombuffer(raw.encode("ascii"), dtype=np.uint8)
    except UnicodeEncodeError as exc:
        raise SequenceError(f"{id}: non-ASCII character at position {exc.start + 1}") from None
    codes = _lookup_table(alphabet)[buf]
    bad = codes == 255
    if bad.any():
        if policy is AmbiguityPolicy.REJECT:
            pos = int(np.flatnonzero(bad)[0])
            raise SequenceError(f"{id}: character {raw[pos]!r} at position {pos + 1} is not in the alphabet")
        codes = codes[~bad]
    if codes.size == 0:
        raise SequenceError(f"{id}: no alphabet symbols left after normalization")
    return Sequence(id, codes, alphabet)


def dedupe_ids(ids: Seq[str]) -> List[str]:
    """Make ids unique by suffixing repeats with ``_2``, ``_3``, ..."""
    seen: Dict[str, int] = {}
    taken = set(ids)
    out = []
    for ident in ids:
        if ident not in seen:
            seen[ident] = 1
            out.append(ident)
            continue
        n = seen[ident]
        while True:
            n += 1
            cand = f"{ident}_{n}"
            if cand not in taken:
                break
        seen[ident] = n
        taken.add(cand)
        out.append(cand)
    return out


def read_sequences(
    data: Union[bytes, str],
    fmt: str = "auto",
    policy: AmbiguityPolicy | str = AmbiguityPolicy.SKIP,
    alphabet: Alphabet = DNA,
) -> List[Sequence]:
    records = parse_records(data, fmt)
    ids = dedupe_ids([r[0] for r in records])
    return [normalize(raw, policy, alphabet, id=i) for i, (_, raw) in zip(ids, records)]
