from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from seqtopo.filtration import substring_count_table
from seqtopo.linalg import EchelonBasis, Field, make_vector
from seqtopo.path_homology import (
    PathComplex,
    omega_complex,
    path_betti,
    path_table,
    persistent_path_homology,
    superlevel_path_complex,
)
from seqtopo.persistence import persistent_betti
from seqtopo.seq_io import normalize

A, B, C = 0, 1, 2


def full_paths(k, dmax):
    return PathComplex(k, [list(product(range(k), repeat=n + 1)) for n in range(dmax + 1)])


@pytest.fixture(scope="module")
def counts(primer):
    return substring_count_table(primer)


def test_threshold_three(counts):
    P = superlevel_path_complex(counts, 3)
    assert P.paths[0] == [(0,), (1,), (2,), (3,)]
    assert [counts.label(p) for p in P.paths[1]] == ["CT", "GG"]
    assert P.paths[2] == [] and P.paths[3] == []
    assert [path_betti(P, n) for n in range(3)] == [3, 1, 0]


def test_threshold_above_maximum(counts):
    P = superlevel_path_complex(counts, 100)
    assert all(not g for g in P.paths)


def test_nonpositive_threshold_rejected(counts):
    for a in (0, -1):
        with pytest.raises(ValueError):
            superlevel_path_complex(counts, a)


def test_truncation_closure_on_random_sequences():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        seq = normalize("".join(rng.choice(list("ACGT"), size=int(rng.integers(5, 40)))))
        f = substring_count_table(seq)
        for a in range(1, max(f.values.values()) + 1):
            superlevel_path_complex(f, a).validate()


def test_validate_catches_missing_truncation():
    with pytest.raises(ValueError):
        PathComplex(2, [[(A,)], [(A, B)]]).validate()


def test_full_complex_omega_and_betti():
    for k in (1, 2, 3):
        P = full_paths(k, 3)
        om = omega_complex(P)
        assert [om.dim(n) for n in range(4)] == [k ** (n + 1) for n in range(4)]
        assert [path_betti(P, n, omega=om) for n in range(3)] == [1, 0, 0]


def test_single_arrow():
    P = PathComplex(2, [[(A,), (B,)], [(A, B)]])
    om = omega_complex(P)
    assert om.bases[1] == [{(A, B): 1}]
    assert path_betti(P, 0) == 1


def test_directed_triangle():
    P = PathComplex(3, [[(A,), (B,), (C,)], [(A, B), (B, C), (A, C)], [(A, B, C)]])
    om = omega_complex(P)
    assert om.bases[2] == [{(A, B, C): 1}]
    assert path_betti(P, 1) == 0
    P2 = PathComplex(3, [[(A,), (B,), (C,)], [(A, B), (B, C), (A, C)], []])
    assert path_betti(P2, 1) == 1


def test_square_needs_both_halves():
    # ABC and ADC each have the disallowed face AC; only their difference is in Omega
    D = 3
    P = PathComplex(4, [[(A,), (B,), (C,), (D,)], [(A, B), (B, C), (A, D), (D, C)], [(A, B, C), (A, D, C)]])
    om = omega_complex(P)
    assert len(om.bases[2]) == 1
    (u,) = om.bases[2]
    assert set(u) == {(A, B, C), (A, D, C)} and u[(A, B, C)] == -u[(A, D, C)]
    assert path_betti(P, 1) == 0


def test_betti_needs_next_grade():
    P = full_paths(2, 2)
    with pytest.raises(ValueError):
        path_betti(P, 2)


def _compose(outer, inner, field):
    out = {}
    for i, c in inner.items():
        for j, d in outer[i].items():
            out[j] = out.get(j, 0) + c * d
    if field is Field.GF2:
        return {j: v for j, v in out.items() if v % 2}
    return {j: v for j, v in out.items() if v != 0}


@pytest.mark.parametrize("field", [Field.Q, Field.GF2])
def test_boundary_squares_to_zero(counts, field):
    for a in range(1, 7):
        om = omega_complex(superlevel_path_complex(counts, a), field)
        for n in range(2, 4):
            for col in om.boundaries[n]:
                assert _compose(om.boundaries[n - 1], col, field) == {}


@pytest.mark.parametrize("field", [Field.Q, Field.GF2])
def test_omega_grows_as_threshold_drops(counts, field):
    tuples = [list(product(range(4), repeat=n + 1)) for n in range(4)]
    key = [{t: i for i, t in enumerate(g)} for g in tuples]
    oms = {a: omega_complex(superlevel_path_complex(counts, a), field) for a in range(1, 7)}
    for lo in range(1, 7):
        for hi in range(lo, 7):
            for n in range(4):
                span = EchelonBasis(field)
                for u in oms[lo].bases[n]:
                    span.add(make_vector(((key[n][p], c) for p, c in u.items()), field))
                for u in oms[hi].bases[n]:
                    assert span.contains(make_vector(((key[n][p], c) for p, c in u.items()), field))


@pytest.mark.parametrize("field", ["q", "gf2"])
def test_primer_barcode(primer, field):
    B = persistent_path_homology(primer, "count", field)
    assert sorted(B.pairs(0), reverse=True) == [(6, 1), (6, -float("inf")), (5, 4), (5, 2)]
    assert B.pairs(1) == [(3, 2), (2, 1), (1, 0)]
    assert B.pairs(2) == []
    assert B.direction.value == "decreasing"


@pytest.mark.parametrize("field", ["q", "gf2"])
def test_barcode_counts_match_betti_at_each_threshold(primer, counts, field):
    B = persistent_path_homology(primer, "count", field)
    for a in range(1, 8):
        P = superlevel_path_complex(counts, a)
        for n in range(3):
            assert persistent_betti(B, n, a, a) == path_betti(P, n, field)
    full = full_paths(4, 3)
    assert [persistent_betti(B, n, 0, 0) for n in range(3)] == [path_betti(full, n, field) for n in range(3)]


def test_frequency_function_rescales_counts(primer):
    by_count = persistent_path_homology(primer, "count")
    by_freq = persistent_path_homology(primer, "freq")
    scale = Fraction(1, 21)
    expect = sorted((d, b * scale, x * scale) for d, b, x in by_count.multiset())
    assert sorted(by_freq.multiset()) == expect


def test_constant_sequence():
    B = persistent_path_homology(normalize("AAAAAA"), "count")
    assert B.pairs(1) == [(5, 4)]
    assert [p for p in B.pairs(0) if p[0] > 0] == [(6, -float("inf"))]


def test_unknown_function(primer):
    with pytest.raises(ValueError):
        path_table(primer, "ell")
