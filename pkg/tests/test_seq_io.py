import numpy as np
import pytest
from hypothesis import given, strategies as st

from seqtopo.seq_io import (
    DNA,
    Alphabet,
    ParseError,
    SequenceError,
    dedupe_ids,
    normalize,
    parse_fasta,
    parse_plain,
    parse_records,
    read_sequences,
)


def test_fasta_concatenates_lines():
    assert parse_fasta(">s1\nACGT\nAC\n") == [("s1", "ACGTAC")]


def test_fasta_keeps_record_order():
    assert [r[0] for r in parse_fasta(">a\nAC\n>b\nGG\n")] == ["a", "b"]


def test_fasta_id_stops_at_whitespace_and_accepts_bytes():
    assert parse_fasta(b">N-China-F some primer\r\nGG GG\r\n") == [("N-China-F", "GGGG")]


def test_fasta_without_header_reports_line():
    with pytest.raises(ParseError) as err:
        parse_fasta("\nACGT")
    assert err.value.line == 2
    assert "line 2" in str(err.value)


def test_fasta_empty_record_names_id():
    with pytest.raises(ParseError, match="'b'"):
        parse_fasta(">a\nAC\n>b\n>c\nGG\n")


def test_fasta_empty_header():
    with pytest.raises(ParseError):
        parse_fasta(">\nACGT\n")


def test_plain_mode_ids():
    assert parse_plain("ACGT\n\nGG\n") == [("seq0", "ACGT"), ("seq1", "GG")]
    assert parse_records("ACGT\nTT\n")[1] == ("seq1", "TT")
    assert parse_records(">x\nA\n")[0] == ("x", "A")


def test_normalize_case_and_rna():
    s = normalize("acgu")
    assert s.text == "ACGT"
    assert list(s.codes) == [0, 1, 2, 3]


def test_normalize_skip_and_reject():
    assert normalize("ACNNGT").text == "ACGT"
    with pytest.raises(SequenceError, match="position 3"):
        normalize("ACNNGT", "reject")


def test_normalize_empty_after_skip():
    with pytest.raises(SequenceError):
        normalize("NNNN")


def test_sequence_span_and_immutability():
    s = normalize("GGGGAACTTCTCCTGCTAGAAT")
    assert len(s) == 22 and s.span == 21
    with pytest.raises(ValueError):
        s.codes[0] = 1


def test_alphabet_validation():
    with pytest.raises(ValueError):
        Alphabet(("A", "A"))
    with pytest.raises(ValueError):
        Alphabet(tuple())
    with pytest.raises(ValueError):
        Alphabet.from_string("".join(chr(40 + i) for i in range(65)))
    ab = Alphabet.from_string("01")
    assert ab.encode("0110") == (0, 1, 1, 0)
    assert ab.decode([1, 0]) == "10"
    assert normalize("0210", alphabet=ab).text == "010"


def test_dedupe_ids():
    assert dedupe_ids(["a", "b", "a", "a"]) == ["a", "b", "a_2", "a_3"]
    assert dedupe_ids(["a", "a_2", "a"]) == ["a", "a_2", "a_3"]


def test_read_sequences_dedupes():
    seqs = read_sequences(">x\nAC\n>x\nGT\n")
    assert [s.id for s in seqs] == ["x", "x_2"]


@given(st.text(alphabet="ACGTUacgtunNRY- \t", min_size=1, max_size=60))
def test_normalize_idempotent_and_in_range(raw):
    try:
        s = normalize(raw)
    except SequenceError:
        assert not any(c in "ACGTUacgtu" for c in raw)
        return
    assert int(s.codes.max()) < len(DNA)
    again = normalize(s.text)
    assert np.array_equal(again.codes, s.codes)


@given(st.binary(max_size=200))
def test_parse_then_normalize_never_out_of_range(data):
    try:
        seqs = read_sequences(data)
    except (SequenceError, ValueError):
        return
    for s in seqs:
        assert int(s.codes.max()) < 4
