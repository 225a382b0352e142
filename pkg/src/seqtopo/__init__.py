"""Topological features of symbol sequences.

Tuple Delta-complexes filtered by sequence statistics, their persistent
homology and Laplacian spectra, path homology of count filtrations, and
tree building from the resulting feature curves.
"""

__version__ = "0.1.0"

from .linalg import Field
from .seq_io import DNA, Alphabet, Sequence, normalize, read_sequences
from .complex_core import DeltaComplex, betti, betti_numbers, delta_closure
from .filtration import (
    Direction,
    FilteredComplex,
    FiltrationTable,
    face_preserving_modification,
    first_occurrence_table,
    frequency_table,
    min_window_table,
    substring_count_table,
    sublevel_filtered_complex,
    superlevel_filtered_complex,
)
from .persistence import Barcode, Interval, betti_curve, persistent_betti, persistent_homology
from .spectral import combinatorial_laplacian, persistent_laplacian, spectral_gap_curve, spectrum
from .path_homology import omega_complex, path_betti, persistent_path_homology, superlevel_path_complex
from .phylo import cluster_upgma, curve_distance, distance_matrix, to_newick

__all__ = [name for name in dir() if not name.startswith("_")]
