"""Combinatorial and persistent Laplacians of filtered Delta-complexes."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from .complex_core import DeltaComplex, dense_boundary
from .filtration import FilteredComplex
from .linalg import Field, make_vector, nullspace

ZERO_TOL = 1e-9
SYMMETRY_TOL = 1e-12


@dataclass
class LaplacianMatrix:
    matrix: np.ndarray
    n: int
    a: object
    b: object
    simplices: List[object]


@dataclass
class SpectrumResult:
    eigenvalues: np.ndarray
    zero_count: int
    spectral_gap: float

    @property
    def positive_count(self) -> int:
        return len(self.eigenvalues) - self.zero_count


@dataclass
class SpectralGapCurve:
    dim: int
    grid: List[object]
    values: List[float]


def _check_dim(F: FilteredComplex, n: int) -> None:
    if n < 0:
        raise ValueError("Laplacian dimension must be non-negative")
    if n > F.max_dim():
        raise ValueError(f"dimension {n} exceeds the top dimension {F.max_dim()} of the filtration")


def laplacian_of_complex(K: DeltaComplex, n: int) -> np.ndarray:
    """``B_n^T B_n + B_{n+1} B_{n+1}^T`` on the n-simplices of ``K``."""
    size = K.count(n)
    out = np.zeros((size, size))
    if size == 0:
        return out
    if n >= 1:
        down = dense_boundary(K, n)
        out += down.T @ down
    if n + 1 <= K.dmax:
        up = dense_boundary(K, n + 1)
        out += up @ up.T
    return out


def combinatorial_laplacian(F: FilteredComplex, n: int, a) -> LaplacianMatrix:
    _check_dim(F, n)
    K = F.complex_at(a)
    grade = K.grades[n] if n <= K.dmax else []
    return LaplacianMatrix(laplacian_of_complex(K, n), n, a, a, list(grade))


def orthonormal_basis(vectors: np.ndarray, method: str = "mgs") -> np.ndarray:
    """Orthonormal basis for the column span of ``vectors``.

    ``mgs``: modified Gram-Schmidt, picking the largest remaining column at
    each step and re-orthogonalising once.  ``svd``: left singular vectors,
    used as an independent cross-check.
    """
    if vectors.size == 0:
        return np.zeros((vectors.shape[0], 0))
    if method == "svd":
        u, s, _ = np.linalg.svd(vectors, full_matrices=False)
        keep = s > max(vectors.shape) * np.finfo(float).eps * (s[0] if s.size else 1.0)
        return u[:, keep]
    if method != "mgs":
        raise ValueError(f"unknown orthonormalisation {method!r}")
    work = np.array(vectors, dtype=float, copy=True)
    scale = np.linalg.norm(work, axis=0).max()
    basis = []
    remaining = list(range(work.shape[1]))
    while remaining:
        norms = np.linalg.norm(work[:, remaining], axis=0)
        k = int(np.argmax(norms))
        if norms[k] <= 1e-12 * max(scale, 1.0):
            break
        col = remaining.pop(k)
        q = work[:, col] / norms[k]
        for prev in basis:
            q -= (prev @ q) * prev
        q /= np.linalg.norm(q)
        basis.append(q)
        for j in remaining:
            work[:, j] -= (q @ work[:, j]) * q
    return np.column_stack(basis) if basis else np.zeros((vectors.shape[0], 0))


def persistent_laplacian(F: FilteredComplex, n: int, a, b, orthonormalize: str = "mgs") -> LaplacianMatrix:
    """``(a, b)``-persistent Laplacian on the n-chains present at ``a``.

    The up-term uses the (n+1)-chains at ``b`` whose boundary lies in the
    n-chains at ``a``.  That subspace is the kernel of the boundary rows that
    fall outside ``a``; its basis comes from an exact rational nullspace and
    is orthonormalised in floating point.
    """
    _check_dim(F, n)
    if F.key(a) > F.key(b):
        raise ValueError(f"parameter {a} comes after {b} in the filtration order")
    Ka = F.complex_at(a)
    Kb = F.complex_at(b)
    inside = Ka.grades[n] if n <= Ka.dmax else []
    size = len(inside)
    out = np.zeros((size, size))
    if size == 0:
        return LaplacianMatrix(out, n, a, b, [])
    if n >= 1:
        down = dense_boundary(Ka, n)
        out += down.T @ down
    if n + 1 <= Kb.dmax and Kb.count(n + 1):
        rows_b = Kb.index[n]
        inside_set = Ka.index[n]
        bd = dense_boundary(Kb, n + 1)
        in_rows = [rows_b[s] for s in inside]
        out_rows = [i for s, i in rows_b.items() if s not in inside_set]
        d_in = bd[in_rows, :]
        if out_rows:
            d_out_cols = Kb.boundary_columns(n + 1, Field.Q)
            out_pos = {r: k for k, r in enumerate(out_rows)}
            restricted = [
                make_vector(((out_pos[r], c) for r, c in col.items() if r in out_pos), Field.Q)
                for col in d_out_cols
            ]
            kernel = nullspace(restricted, Field.Q)
            basis = np.zeros((bd.shape[1], len(kernel)))
            for j, vec in enumerate(kernel):
                for i, c in vec.items():
                    basis[i, j] = float(c)
            Z = orthonormal_basis(basis, orthonormalize)
            up = d_in @ Z
        else:
            up = d_in
        out += up @ up.T
    return LaplacianMatrix(out, n, a, b, list(inside))


def spectrum(M, tol: float = ZERO_TOL) -> SpectrumResult:
    """Eigenvalues of a symmetric PSD matrix with a relative zero threshold."""
    mat = M.matrix if isinstance(M, LaplacianMatrix) else np.asarray(M, dtype=float)
    if mat.size == 0:
        return SpectrumResult(np.zeros(0), 0, 0.0)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError("Laplacian must be square")
    if np.max(np.abs(mat - mat.T)) > SYMMETRY_TOL * max(1.0, float(np.max(np.abs(mat)))):
        raise ValueError("matrix is not symmetric")
    vals = np.linalg.eigvalsh(mat)
    cutoff = tol * max(1.0, float(vals[-1]))
    if vals[0] < -cutoff:
        raise ArithmeticError(f"negative eigenvalue {vals[0]:.3e}: Laplacian is not positive semidefinite")
    zero = vals < cutoff
    positive = vals[~zero]
    return SpectrumResult(vals, int(zero.sum()), float(positive[0]) if positive.size else 0.0)


def spectral_gap_curve(F: FilteredComplex, n: int, grid: Sequence, tol: float = ZERO_TOL) -> SpectralGapCurve:
    """Smallest positive eigenvalue of the n-th Laplacian at each grid value.

    Grid points that see the same set of simplices share one eigensolve.
    """
    cache: Dict[int, float] = {}
    values = []
    for t in grid:
        count = F.count_at(t)
        if count not in cache:
            if n > F.max_dim():
                cache[count] = 0.0
            else:
                K = DeltaComplex(F.simplices[:count], faces=F.faces, dim=F.dim, check=False)
                cache[count] = spectrum(laplacian_of_complex(K, n), tol).spectral_gap if n <= K.dmax else 0.0
        values.append(cache[count])
    return SpectralGapCurve(n, list(grid), values)
