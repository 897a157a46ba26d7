"""Numerical bi-dual faces in the cone of positive maps.

A rank-one ``s = |xi><eta|`` with ``<Ad_s, phi> = 0`` corresponds to the
product vector ``z = xi (x) conj(eta)`` with ``<z| C_phi |z> = 0``. Every
psi in the bi-dual face of phi is positive and vanishes at the same product
vectors, and because ``C_psi`` is block-positive it must vanish there to
first order as well:

    (<xi| (x) I) C_psi z = 0     and     (I (x) <conj eta|) C_psi z = 0.

These are real linear equations on the Hermitian Choi matrix of psi. Their
solution space contains the span of the bi-dual face, so a one-dimensional
solution space certifies that phi spans an exposed ray. A larger solution
space is only evidence (at the sampling budget) that the ray is not exposed.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    Tolerance,
    functional_rows,
    hermitian_coordinates,
    hermitian_from_coordinates,
    kernel_basis,
    random_unit_vectors,
)
from .maps import MapRep, apply
from .zeros import find_product_zeros

THETAS = 2 * np.pi * np.arange(16) / 16
DRAWS_PER_ROUND = 16
DESCENT_STARTS_PER_ROUND = 8
_CHUNK = 512


class EmptyVarietyWarning(UserWarning):
    pass


@dataclass(frozen=True, eq=False)
class ZeroVarietySample:
    """A rank-one s = |xi><eta| with <Ad_s, phi> = 0 (up to ``residual``)."""

    xi: np.ndarray
    eta: np.ndarray
    residual: float

    @property
    def s(self) -> np.ndarray:
        return np.outer(self.xi, self.eta.conj())

    @property
    def product_vector(self) -> Tuple[np.ndarray, np.ndarray]:
        """Factors (x, y) of the product vector at which C_phi vanishes."""
        return self.xi, self.eta.conj()


def default_budget(m: int, n: int) -> int:
    return 40 * (m * n) ** 2


def _residual_scale(phi: MapRep) -> float:
    return max(1.0, float(np.linalg.norm(phi.choi, 2)))


def _sample(phi: MapRep, x: np.ndarray, y: np.ndarray) -> ZeroVarietySample:
    x = x / np.linalg.norm(x)
    y = y / np.linalg.norm(y)
    z = np.kron(x, y)
    # equals |<Ad_s, phi>| for s = |x><conj y|
    residual = abs(np.vdot(z, phi.choi @ z))
    return ZeroVarietySample(x, y.conj(), residual)


def _random_unitary(rng: np.random.Generator, k: int) -> np.ndarray:
    z = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _kernel_samples(phi: MapRep, x: np.ndarray, rng: np.random.Generator, tol: Tolerance):
    """One sample per vector of a randomly rotated kernel basis of phi(|conj x><conj x|)."""
    xbar = x.conj()
    block = apply(phi, np.outer(xbar, xbar.conj()))
    basis = kernel_basis(block, tol, scale=_residual_scale(phi))
    if basis.shape[1] == 0:
        return []
    basis = basis @ _random_unitary(rng, basis.shape[1])
    return [_sample(phi, x, basis[:, k]) for k in range(basis.shape[1])]


def structured_samples(phi: MapRep, tol: Tolerance = DEFAULT_TOL) -> List[ZeroVarietySample]:
    """Matrix units |i><k| and the two-level family s = [[1, e^{it}], [-e^{-it}, -1]]
    embedded on rows {i, j} and columns {k, l}, kept when they lie on the variety."""
    m, n = phi.m, phi.n
    limit = tol.entry_tol * _residual_scale(phi)
    out = []
    for i in range(m):
        for k in range(n):
            out.append(_sample(phi, np.eye(m)[i], np.eye(n)[k]))
    for i in range(m):
        for j in range(i + 1, m):
            for k in range(n):
                for l in range(k + 1, n):
                    for theta in THETAS:
                        xi = np.zeros(m, dtype=complex)
                        eta = np.zeros(n, dtype=complex)
                        xi[i], xi[j] = 1.0, -np.exp(-1j * theta)
                        eta[k], eta[l] = 1.0, np.exp(-1j * theta)
                        out.append(_sample(phi, xi, eta.conj()))
    return [smp for smp in out if smp.residual <= limit]


def _stream(phi: MapRep, seed: int, max_rounds: int, tol: Tolerance) -> Iterator[Tuple[int, ZeroVarietySample]]:
    """Deterministic sample stream tagged with round numbers.

    Round 0 is the structured family; each later round draws random xi and
    also runs a few descent starts, with generators spawned from ``seed``
    by round index, so a shorter stream is always a prefix of a longer one.
    """
    limit = tol.entry_tol * _residual_scale(phi)
    for smp in structured_samples(phi, tol):
        yield 0, smp
    seq = np.random.SeedSequence(seed)
    children = seq.spawn(max_rounds)
    for rnd, child in enumerate(children, start=1):
        rng = np.random.default_rng(child)
        for x in random_unit_vectors(rng, DRAWS_PER_ROUND, phi.m):
            for smp in _kernel_samples(phi, x, rng, tol):
                if smp.residual <= limit:
                    yield rnd, smp
        for x, _ in find_product_zeros(phi.choi, phi.m, phi.n, DESCENT_STARTS_PER_ROUND, rng):
            for smp in _kernel_samples(phi, x, rng, tol):
                if smp.residual <= limit:
                    yield rnd, smp


def _max_rounds(count: int) -> int:
    return max(4, math.ceil(count / DRAWS_PER_ROUND))


def _collect(phi: MapRep, count: int, seed: int, tol: Tolerance) -> List[Tuple[int, ZeroVarietySample]]:
    out = []
    for tagged in _stream(phi, seed, _max_rounds(count), tol):
        out.append(tagged)
        if len(out) >= count:
            break
    return out


def sample_zero_variety(phi: MapRep, count: int, seed: int = 42,
                        tol: Tolerance = DEFAULT_TOL) -> List[ZeroVarietySample]:
    """Up to ``count`` rank-one points of the zero variety of phi (phi positive).

    Structured samples come first, then random xi with one sample per kernel
    vector of phi(|conj xi><conj xi|), interleaved with descent-located zeros
    that reach components random xi miss. Returns an empty list, with an
    :class:`EmptyVarietyWarning`, when nothing is found.
    """
    samples = [smp for _, smp in _collect(phi, count, seed, tol)]
    if not samples:
        warnings.warn("no zeros found: the zero variety looks empty", EmptyVarietyWarning, stacklevel=2)
    return samples


@dataclass(eq=False)
class FaceConstraintSystem:
    """Real linear equations on Hermitian (mn) x (mn) matrices cutting out the bi-dual span.

    Per sample: the pairing functional X -> <C_{Ad_s}, X>, and, when
    ``first_order`` is set, the two contraction conditions at the product
    zero. Rows are produced on demand from the stored samples.
    """

    dims: Tuple[int, int]
    samples: List[ZeroVarietySample]
    first_order: bool = True
    solution_dim: Optional[int] = None
    _reduced: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def side(self) -> int:
        return self.dims[0] * self.dims[1]

    def _factors(self, samples):
        x = np.array([smp.xi for smp in samples])
        y = np.array([smp.eta.conj() for smp in samples])
        z = np.einsum("ri,rk->rik", x, y).reshape(len(samples), -1)
        return x, y, z

    def _functionals(self, samples) -> np.ndarray:
        """Complex coefficient matrices W with functional X -> sum(W * X)."""
        m, n = self.dims
        x, y, z = self._factors(samples)
        pair = np.einsum("ra,rb->rab", z.conj(), z)[:, None]
        if not self.first_order:
            return pair
        eye_n, eye_m = np.eye(n), np.eye(m)
        # rows u = x (x) e_k and u = e_i (x) y; functional X -> u^* X z
        u1 = np.einsum("ri,kl->rkil", x, eye_n).reshape(len(samples), n, m * n)
        u2 = np.einsum("ij,rk->rijk", eye_m, y).reshape(len(samples), m, m * n)
        u = np.concatenate([u1, u2], axis=1)
        tangent = np.einsum("rua,rb->ruab", u.conj(), z)
        return np.concatenate([pair, tangent], axis=1)

    def rows(self, samples: Optional[Sequence[ZeroVarietySample]] = None) -> np.ndarray:
        samples = self.samples if samples is None else samples
        if not samples:
            return np.zeros((0, self.side ** 2))
        return functional_rows(self._functionals(samples))

    def pairing_values(self, x) -> np.ndarray:
        """Value of the pairing functional of each sample at the matrix x."""
        _, _, z = self._factors(self.samples)
        return np.einsum("ra,ab,rb->r", z.conj(), np.asarray(x), z)

    def evaluate(self, x) -> float:
        """Largest absolute constraint value at the Hermitian matrix x."""
        x = np.asarray(x, dtype=complex)
        worst = 0.0
        for start in range(0, len(self.samples), _CHUNK):
            w = self._functionals(self.samples[start:start + _CHUNK])
            vals = np.einsum("ruab,ab->ru", w, x)
            worst = max(worst, float(np.max(np.abs(vals.real))), float(np.max(np.abs(vals.imag))))
        return worst

    def reduced(self) -> np.ndarray:
        """Square-or-shorter matrix with the same row space and singular values."""
        if self._reduced is None:
            self._reduced = _reduce_rows(self.rows(s) for s in _chunks(self.samples))
        return self._reduced

    def solve(self, tol: Tolerance = DEFAULT_TOL):
        """Numerical solution space: (dimension, list of Hermitian basis matrices)."""
        dim, coords = _null_space(self.reduced(), self.side ** 2, tol)
        self.solution_dim = dim
        return dim, [hermitian_from_coordinates(c, self.side) for c in coords]


def _chunks(seq, size=_CHUNK):
    for start in range(0, len(seq), size):
        yield seq[start:start + size]


def _reduce_rows(blocks) -> np.ndarray:
    acc = None
    for block in blocks:
        acc = block if acc is None else np.vstack([acc, block])
        if acc.shape[0] > 2 * acc.shape[1]:
            acc = np.linalg.qr(acc, mode="r")
    if acc is None:
        return np.zeros((0, 0))
    if acc.shape[0] > acc.shape[1]:
        acc = np.linalg.qr(acc, mode="r")
    return acc


def _null_space(reduced: np.ndarray, dim: int, tol: Tolerance):
    if reduced.size == 0:
        return dim, list(np.eye(dim))
    _, s, vh = np.linalg.svd(reduced, full_matrices=True)
    rank = int(np.sum(s > tol.rank_tol * s[0])) if s[0] > 0 else 0
    return dim - rank, list(vh[rank:])


def build_constraints(samples: Sequence[ZeroVarietySample], dims: Tuple[int, int],
                      first_order: bool = True) -> FaceConstraintSystem:
    return FaceConstraintSystem(tuple(dims), list(samples), first_order)


@dataclass(frozen=True, eq=False)
class BidualProbe:
    dimension: int
    basis: List[np.ndarray]
    sample_count: int
    budget: int
    empty_variety: bool
    stable: Optional[bool] = None
    dimension_at_double: Optional[int] = None

    @property
    def exposed(self) -> bool:
        return self.dimension == 1


def probe_bidual(phi: MapRep, budget: Optional[int] = None, seed: int = 42,
                 tol: Tolerance = DEFAULT_TOL, first_order: bool = True,
                 check_stability: bool = False) -> BidualProbe:
    """Bi-dual solution space of phi from ``budget`` samples.

    With ``check_stability`` the stream is drawn to twice the budget and the
    dimension is computed at both sizes; the budget-sized system is exactly
    the one a plain call would build.
    """
    m, n = phi.m, phi.n
    budget = default_budget(m, n) if budget is None else budget
    count = 2 * budget if check_stability else budget
    tagged = _collect(phi, count, seed, tol)
    base_rounds = _max_rounds(budget)
    base = [smp for rnd, smp in tagged if rnd <= base_rounds][:budget]

    system = build_constraints(base, (m, n), first_order)
    dim, basis = system.solve(tol)
    if not check_stability:
        return BidualProbe(dim, basis, len(base), budget, not base)
    full = build_constraints([smp for _, smp in tagged], (m, n), first_order)
    dim2, _ = full.solve(tol)
    return BidualProbe(dim, basis, len(base), budget, not base, dim == dim2, dim2)


def bidual_dimension(phi: MapRep, budget: Optional[int] = None, seed: int = 42,
                     tol: Tolerance = DEFAULT_TOL):
    """(dimension, basis) of the bi-dual solution space; dimension 1 certifies exposedness."""
    probe = probe_bidual(phi, budget, seed, tol)
    return probe.dimension, probe.basis


def bidual_membership(psi: MapRep, system: FaceConstraintSystem, atol: float = 1e-8) -> bool:
    scale = max(1.0, float(np.abs(psi.choi).max(initial=0.0)))
    return system.evaluate(psi.choi) <= atol * scale


def angle_to_solution(phi: MapRep, basis: Sequence[np.ndarray]) -> float:
    """Angle between C_phi and the span of the solution basis (radians)."""
    target = hermitian_coordinates(phi.choi)
    target = target / np.linalg.norm(target)
    if not basis:
        return np.pi / 2
    q = np.array([hermitian_coordinates(b) for b in basis]).T
    q, _ = np.linalg.qr(q)
    cos = min(1.0, float(np.linalg.norm(q.T @ target)))
    return float(np.arccos(cos))
