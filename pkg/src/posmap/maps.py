"""Linear maps M_m -> M_n stored by their Choi matrices.

The Choi matrix of ``phi`` is ``sum_ij |i><j| (x) phi(|i><j|)``, so entry
``((i, k), (j, l))`` is the ``(k, l)`` entry of ``phi(|i><j|)``. Reshaped to
``(m, n, m, n)`` it reads ``C[i, k, j, l]``.

All pairings are the bilinear trace pairing ``<a, b> = Tr(a b^T)``. Note
that under this pairing the adjoint of ``Ad_s`` is ``Ad_{s^T}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    DimensionError,
    Tolerance,
    as_matrix,
    is_hermitian,
    matrix_unit,
    numerical_rank,
    pairing,
)


class DegenerateInputError(ValueError):
    """Raised for inputs with no meaningful reduction, such as a zero matrix."""


@dataclass(frozen=True, eq=False)
class MapRep:
    """A linear map M_m -> M_n, held as its (m n) x (m n) Choi matrix."""

    m: int
    n: int
    choi: np.ndarray

    def __post_init__(self):
        choi = as_matrix(self.choi)
        side = self.m * self.n
        if self.m < 1 or self.n < 1 or choi.shape != (side, side):
            raise DimensionError(
                f"Choi matrix of a map M_{self.m} -> M_{self.n} must be {side}x{side}, got {choi.shape}")
        choi = choi.copy()
        choi.setflags(write=False)
        object.__setattr__(self, "choi", choi)

    @property
    def tensor(self) -> np.ndarray:
        """Choi matrix as an (m, n, m, n) array indexed [i, k, j, l]."""
        return self.choi.reshape(self.m, self.n, self.m, self.n)

    def is_hermiticity_preserving(self, tol: Tolerance = DEFAULT_TOL) -> bool:
        return is_hermitian(self.choi, tol)

    def __call__(self, a) -> np.ndarray:
        return apply(self, a)

    def __add__(self, other: "MapRep") -> "MapRep":
        _check_same_dims(self, other)
        return MapRep(self.m, self.n, self.choi + other.choi)

    def __sub__(self, other: "MapRep") -> "MapRep":
        _check_same_dims(self, other)
        return MapRep(self.m, self.n, self.choi - other.choi)

    def __neg__(self) -> "MapRep":
        return MapRep(self.m, self.n, -self.choi)

    def __mul__(self, c) -> "MapRep":
        return MapRep(self.m, self.n, complex(c) * self.choi)

    __rmul__ = __mul__

    def __repr__(self):
        return f"MapRep(M_{self.m} -> M_{self.n})"


def _check_same_dims(a: MapRep, b: MapRep):
    if (a.m, a.n) != (b.m, b.n):
        raise DimensionError(f"maps M_{a.m}->M_{a.n} and M_{b.m}->M_{b.n} are not comparable")


def map_of_choi(rho, m: int, n: int) -> MapRep:
    return MapRep(m, n, rho)


def choi_of(m: int, n: int, apply_fn: Callable[[np.ndarray], np.ndarray]) -> MapRep:
    """Choi matrix of a linear map given as a function on m x m matrices."""
    c = np.zeros((m, n, m, n), dtype=complex)
    for i in range(m):
        for j in range(m):
            image = np.asarray(apply_fn(matrix_unit(i + 1, j + 1, m)), dtype=complex)
            if image.shape != (n, n):
                raise DimensionError(f"map returned shape {image.shape}, expected {(n, n)}")
            c[i, :, j, :] = image
    return MapRep(m, n, c.reshape(m * n, m * n))


def apply(phi: MapRep, a) -> np.ndarray:
    """phi(a), read off the Choi matrix: phi(a)[k, l] = sum_ij a[i, j] C[i, k, j, l]."""
    a = as_matrix(a)
    if a.shape != (phi.m, phi.m):
        raise DimensionError(f"map on M_{phi.m} cannot act on shape {a.shape}")
    return np.einsum("ij,ikjl->kl", a, phi.tensor)


def flip(rho, m: int, n: int) -> np.ndarray:
    """Swap the tensor factors of rho in M_m (x) M_n: (i,k),(j,l) -> (k,i),(l,j)."""
    rho = as_matrix(rho)
    if rho.shape != (m * n, m * n):
        raise DimensionError(f"expected {(m * n, m * n)}, got {rho.shape}")
    return rho.reshape(m, n, m, n).transpose(1, 0, 3, 2).reshape(m * n, m * n)


def adjoint(phi: MapRep) -> MapRep:
    """Adjoint M_n -> M_m for the bilinear pairing; its Choi matrix is the flip."""
    return MapRep(phi.n, phi.m, flip(phi.choi, phi.m, phi.n))


def compose(phi2: MapRep, phi1: MapRep) -> MapRep:
    """phi2 o phi1 (phi1 acts first)."""
    if phi1.n != phi2.m:
        raise DimensionError(f"cannot compose M_{phi2.m}->M_{phi2.n} after M_{phi1.m}->M_{phi1.n}")
    return choi_of(phi1.m, phi2.n, lambda a: apply(phi2, apply(phi1, a)))


def ad(s) -> MapRep:
    """Ad_s : x -> s^* x s, for an m x n matrix s."""
    s = as_matrix(s)
    m, n = s.shape
    # C[i,k,j,l] = conj(s[i,k]) * s[j,l]
    c = np.einsum("ik,jl->ikjl", s.conj(), s)
    return MapRep(m, n, c.reshape(m * n, m * n))


def identity_map(r: int) -> MapRep:
    return ad(np.eye(r))


def transpose_map(r: int) -> MapRep:
    return choi_of(r, r, lambda a: a.T)


def corner_projection(r: int, n: int) -> np.ndarray:
    """sigma = sum_{i <= r} |i><i| as an r x n matrix."""
    if not 1 <= r <= n:
        raise ValueError(f"need 1 <= r <= n, got r={r}, n={n}")
    return np.eye(r, n, dtype=complex)


def st_maps(r: int, n: int) -> Tuple[MapRep, MapRep]:
    """Corner embedding S: M_r -> M_n and corner compression T: M_n -> M_r."""
    if r > n:
        raise ValueError(f"S and T need r <= n, got r={r}, n={n}")
    sigma = corner_projection(r, n)
    return ad(sigma), ad(sigma.T)


def lambda_embed(i: int, j: int, r: int) -> MapRep:
    """M_2 -> M_r sending [[a11, a12], [a21, a22]] onto the rows/cols {i, j} (1-based)."""
    if i == j:
        raise ValueError("lambda_embed needs two distinct indices")
    if not (1 <= i <= r and 1 <= j <= r):
        raise IndexError(f"indices ({i},{j}) out of range for M_{r}")
    w = matrix_unit(1, i, 2, r) + matrix_unit(2, j, 2, r)
    return ad(w)


def lambda_compress(k: int, l: int, r: int) -> MapRep:
    """M_r -> M_2 extracting the {k, l} principal 2 x 2 block."""
    return adjoint(lambda_embed(k, l, r))


def pairing_maps(psi: MapRep, phi: MapRep) -> complex:
    _check_same_dims(psi, phi)
    return pairing(psi.choi, phi.choi)


def pairing_state_map(rho, phi: MapRep) -> complex:
    rho = as_matrix(rho)
    if rho.shape != phi.choi.shape:
        raise DimensionError(f"state of shape {rho.shape} cannot pair with Choi matrix {phi.choi.shape}")
    return pairing(rho, phi.choi)


def svd_reduce(s, tol: Tolerance = DEFAULT_TOL):
    """Write s = u sigma v^* with u, v nonsingular and sigma = sum_{i<=r} |i><i|.

    Singular values are absorbed into the first r columns of u, so u is
    nonsingular but not unitary; v is unitary. Returns ``(u, sigma, v, r)``.
    """
    s = as_matrix(s)
    m, n = s.shape
    rank = numerical_rank(s, tol)
    if rank == 0:
        raise DegenerateInputError("svd_reduce needs a nonzero matrix")
    left, values, vh = np.linalg.svd(s)
    scale = np.ones(m)
    scale[:rank] = values[:rank]
    u = left * scale
    sigma = np.zeros((m, n), dtype=complex)
    sigma[np.arange(rank), np.arange(rank)] = 1.0
    return u, sigma, vh.conj().T, rank
