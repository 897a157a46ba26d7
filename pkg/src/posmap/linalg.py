"""Dense complex linear algebra with explicit tolerances.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Indices that
reach users (index pairs, matrix units) are 1-based; a pair ``(i, k)`` inside
blocks of size ``n`` flattens to ``(i - 1) * n + (k - 1)``, which is the
lexicographic order used by :func:`numpy.kron`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Tuple

import numpy as np


class DimensionError(ValueError):
    """Raised when matrix shapes are incompatible with an operation."""


@dataclass(frozen=True)
class Tolerance:
    """Numerical thresholds.

    ``rank_tol`` is relative: singular values below ``rank_tol * sigma_max``
    count as zero. ``entry_tol`` is an absolute threshold for entrywise and
    sign decisions.
    """

    rank_tol: float = 1e-9
    entry_tol: float = 1e-9

    def __post_init__(self):
        if self.rank_tol < 0 or self.entry_tol < 0:
            raise ValueError("tolerances must be nonnegative")


DEFAULT_TOL = Tolerance()


def as_matrix(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise DimensionError(f"expected a 2-d matrix, got shape {a.shape}")
    return a


def matrix_unit(i: int, j: int, rows: int, cols: int | None = None) -> np.ndarray:
    """The matrix unit |i><j| (1-based) of shape rows x cols."""
    cols = rows if cols is None else cols
    if not (1 <= i <= rows and 1 <= j <= cols):
        raise IndexError(f"matrix unit ({i},{j}) out of range for {rows}x{cols}")
    e = np.zeros((rows, cols), dtype=complex)
    e[i - 1, j - 1] = 1.0
    return e


def is_hermitian(a, tol: Tolerance = DEFAULT_TOL) -> bool:
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        return False
    return bool(np.max(np.abs(a - a.conj().T), initial=0.0) <= tol.entry_tol)


def pairing(a, b) -> complex:
    """Bilinear trace pairing Tr(a b^T), with a plain (unconjugated) transpose."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape:
        raise DimensionError(f"pairing needs equal shapes, got {a.shape} and {b.shape}")
    return complex(np.sum(a * b))


def kron(a, b) -> np.ndarray:
    """Kronecker product; block (i, j) of the result is a[i, j] * b."""
    return np.kron(as_matrix(a), as_matrix(b))


def flat_index(i: int, k: int, block_size: int) -> int:
    """0-based position of the 1-based pair (i, k) in lexicographic order."""
    return (i - 1) * block_size + (k - 1)


def principal_submatrix(rho, pairs: Iterable[Tuple[int, int]], block_size: int) -> np.ndarray:
    """Rows and columns of ``rho`` picked out by 1-based index pairs, in the given order."""
    rho = as_matrix(rho)
    side = rho.shape[0]
    if rho.shape[1] != side or block_size <= 0 or side % block_size:
        raise DimensionError(f"cannot split {rho.shape} into blocks of size {block_size}")
    outer = side // block_size
    idx = []
    for i, k in pairs:
        if not (1 <= i <= outer and 1 <= k <= block_size):
            raise IndexError(f"index pair ({i},{k}) out of range for {outer} blocks of size {block_size}")
        idx.append(flat_index(i, k, block_size))
    return rho[np.ix_(idx, idx)]


def _rank_from_singular_values(s: np.ndarray, rank_tol: float, scale: float = 0.0) -> int:
    ref = max(s[0] if s.size else 0.0, scale)
    if ref == 0.0:
        return 0
    return int(np.sum(s > rank_tol * ref))


def numerical_rank(a, tol: Tolerance = DEFAULT_TOL) -> int:
    a = np.asarray(a)
    if a.size == 0:
        return 0
    return _rank_from_singular_values(np.linalg.svd(a, compute_uv=False), tol.rank_tol)


def kernel_basis(a, tol: Tolerance = DEFAULT_TOL, scale: float = 0.0) -> np.ndarray:
    """Orthonormal basis of the numerical right null space, as columns.

    The result has shape ``(cols, cols - rank)``; an empty second axis means
    the kernel is trivial. Singular values count as zero below
    ``rank_tol * max(sigma_max, scale)``; pass ``scale`` when ``a`` is a
    piece of a larger problem whose size sets what "small" means.
    """
    a = np.asarray(a)
    cols = a.shape[1]
    if a.shape[0] == 0:
        return np.eye(cols, dtype=a.dtype if np.iscomplexobj(a) else float)
    _, s, vh = np.linalg.svd(a, full_matrices=True)
    rank = _rank_from_singular_values(s, tol.rank_tol, scale)
    return vh[rank:].conj().T


def orthonormal_span(vectors, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (columns) for the span of the given columns."""
    vectors = np.asarray(vectors)
    if vectors.size == 0:
        return np.zeros((vectors.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(vectors, full_matrices=False)
    return u[:, : _rank_from_singular_values(s, tol.rank_tol)]


def projection_residual(basis, vectors) -> float:
    """Largest norm of a column of ``vectors`` left after projecting onto ``basis``."""
    vectors = np.asarray(vectors)
    if vectors.size == 0:
        return 0.0
    rest = vectors - basis @ (basis.conj().T @ vectors)
    return float(np.max(np.linalg.norm(rest, axis=0)))


def eig_hermitian_min(a) -> Tuple[float, np.ndarray]:
    """Smallest eigenvalue and a unit eigenvector of the Hermitian part of ``a``."""
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"eigenvalues need a square matrix, got {a.shape}")
    w, v = np.linalg.eigh((a + a.conj().T) / 2)
    return float(w[0]), v[:, 0]


def random_unit_vectors(rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
    """Rows drawn uniformly from the complex unit sphere."""
    z = rng.standard_normal((count, dim)) + 1j * rng.standard_normal((count, dim))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def random_matrix(rng: np.random.Generator, rows: int, cols: int, rank: int | None = None) -> np.ndarray:
    """Complex Gaussian matrix, optionally forced to a given rank."""
    if rank is None:
        return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    left = random_matrix(rng, rows, rank)
    right = random_matrix(rng, rank, cols)
    return left @ right


# Hermitian coordinates ------------------------------------------------------
#
# An N x N Hermitian matrix has N^2 real coordinates against the orthonormal
# basis {E_aa} u {(E_ab + E_ba)/sqrt2} u {i(E_ab - E_ba)/sqrt2}, a < b.


def _upper_pairs(n: int):
    return np.triu_indices(n, k=1)


def hermitian_coordinates(x) -> np.ndarray:
    x = as_matrix(x)
    n = x.shape[0]
    a, b = _upper_pairs(n)
    return np.concatenate([
        np.real(np.diag(x)),
        np.sqrt(2) * np.real(x[a, b]),
        np.sqrt(2) * np.imag(x[a, b]),
    ])


def hermitian_from_coordinates(h: Sequence[float], n: int) -> np.ndarray:
    h = np.asarray(h, dtype=float)
    if h.shape != (n * n,):
        raise DimensionError(f"expected {n * n} coordinates, got {h.shape}")
    a, b = _upper_pairs(n)
    k = a.size
    x = np.diag(h[:n]).astype(complex)
    off = (h[n:n + k] + 1j * h[n + k:]) / np.sqrt(2)
    x[a, b] = off
    x[b, a] = off.conj()
    return x


def functional_rows(w: np.ndarray) -> np.ndarray:
    """Real rows of the complex functionals X -> sum(W * X) on Hermitian X.

    ``w`` has shape ``(..., N, N)``. Each functional contributes its real and
    imaginary parts, in that order, as rows over the Hermitian coordinates.
    """
    n = w.shape[-1]
    w = w.reshape(-1, n, n)
    a, b = _upper_pairs(n)
    diag = np.diagonal(w, axis1=1, axis2=2)
    sym = (w[:, a, b] + w[:, b, a]) / np.sqrt(2)
    anti = 1j * (w[:, a, b] - w[:, b, a]) / np.sqrt(2)
    values = np.concatenate([diag, sym, anti], axis=1)
    return np.stack([values.real, values.imag], axis=1).reshape(-1, n * n)
