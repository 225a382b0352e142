from fractions import Fraction as Fr
from itertools import product

import numpy as np
import pytest

from seqtopo.classifying import (
    CyclicGroupStructure,
    canonical,
    classifying_average,
    classifying_barcodes,
    classifying_complex,
    orbit_average,
    quotient_face,
)
from seqtopo.complex_core import betti_numbers
from seqtopo.filtration import INF, FiltrationTable, min_window_table
from seqtopo.linalg import Field

# Reference quotient values for the primer under A->0, C->1, T->2, G->3 (dims <= 2).
# Three entries disagree with the ell table; RECOMPUTED holds the corrected ones.
REFERENCE = {
    "0": 0, "00": 1, "01": 1, "02": Fr(5, 4), "03": Fr(3, 2),
    "000": Fr(11, 4), "001": Fr(5, 2), "002": Fr(7, 2), "003": Fr(11, 2),
    "010": Fr(21, 4), "011": Fr(13, 4), "012": Fr(5, 2), "013": 4,
    "020": 6, "021": Fr(13, 4), "022": Fr(9, 2), "023": INF,
    "030": INF, "031": Fr(23, 4), "032": 2, "033": Fr(17, 4),
}
# Entries recomputed from the ell table; each is the mean over the four translates.
RECOMPUTED = {
    "002": Fr(13, 4),  # AAT 2, CCG 3, TTA 4, GGC 4
    "032": Fr(17, 4),  # AGT 4, CAG 3, TCA 4, GTC 6
    "033": 6,          # AGG 13, CAA 4, TCC 2, GTT 5
}


def q(word):
    return tuple(int(c) for c in word)


@pytest.fixture(scope="module")
def fbar(primer):
    return classifying_average(min_window_table(primer), CyclicGroupStructure.dna())


def test_dna_group_structure():
    g = CyclicGroupStructure.dna()
    assert g.to_residues((0, 1, 2, 3)) == (0, 1, 3, 2)  # A C G T
    with pytest.raises(ValueError):
        CyclicGroupStructure(4, (0, 1, 1, 2))


def test_quotient_face_examples():
    assert quotient_face((0, 3, 2), 0, 4) == (0, 3)
    assert quotient_face((0, 1), 1, 4) == (0,)
    with pytest.raises(IndexError):
        quotient_face((0, 1), 2, 4)


def test_quotient_identity_all_z4_tuples():
    for k in range(2, 5):
        for rest in product(range(4), repeat=k - 1):
            t = (0,) + rest
            n = len(t) - 1
            for j in range(n + 1):
                for i in range(j):
                    lhs = quotient_face(quotient_face(t, j, 4), i, 4) if n >= 2 else None
                    rhs = quotient_face(quotient_face(t, i, 4), j - 1, 4) if n >= 2 else None
                    assert lhs == rhs


def test_fbar_values_against_reference(fbar):
    for word, v in REFERENCE.items():
        if word in RECOMPUTED:
            assert fbar[q(word)] == RECOMPUTED[word]
        else:
            assert fbar[q(word)] == v, word


def test_orbit_average_well_defined(primer):
    f = min_window_table(primer)
    g = CyclicGroupStructure.dna()
    for t in product(range(4), repeat=3):
        assert orbit_average(f, g, t) == orbit_average(f, g, canonical(t, 4))


def test_constant_table_averages_to_constant():
    vals = {t: 3 for k in range(1, 4) for t in product(range(4), repeat=k)}
    f = FiltrationTable(4, 2, vals, True)
    assert set(classifying_average(f, CyclicGroupStructure.identity(4)).values()) == {3}
    with pytest.raises(ValueError):
        classifying_average(f, CyclicGroupStructure.identity(2))


def test_boundary_of_032_depends_on_field():
    K = classifying_complex(4, 2)
    for field, expected in ((Field.Q, {q("03"): 2, q("02"): -1}), (Field.GF2, {q("02"): 1})):
        col = K.boundary_columns(2, field)[K.index[2][q("032")]]
        assert {K.grades[1][i]: c for i, c in col.items()} == expected


def test_rp_infinity_truncated():
    K = classifying_complex(2, 3)
    assert betti_numbers(K, Field.GF2)[:3] == [1, 1, 1]
    assert betti_numbers(K, Field.Q)[:3] == [1, 0, 0]


def test_barcodes_from_recomputed_values(fbar):
    gf2 = classifying_barcodes(fbar, 4, "gf2", maxdim=1)
    rat = classifying_barcodes(fbar, 4, "q", maxdim=1)
    assert gf2.pairs(1) == [(1, Fr(5, 2)), (1, INF), (Fr(5, 4), Fr(5, 2)), (Fr(3, 2), Fr(13, 4))]
    assert rat.pairs(1) == [(1, Fr(5, 2)), (1, 4), (Fr(5, 4), Fr(5, 2)), (Fr(3, 2), Fr(13, 4))]
    assert gf2.pairs(0) == rat.pairs(0) == [(0, INF)]


def test_reference_table_shows_field_divergence():
    fb = {q(w): v for w, v in REFERENCE.items()}
    gf2 = classifying_barcodes(fb, 4, "gf2", maxdim=1)
    rat = classifying_barcodes(fb, 4, "q", maxdim=1)
    assert (Fr(5, 4), 2) in gf2.pairs(1)
    assert (Fr(5, 4), Fr(5, 2)) in rat.pairs(1)
