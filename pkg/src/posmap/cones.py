"""Membership tests for the cones of positive, completely positive and
superpositive maps.

Block-positivity (equivalently, positivity of the map) is decided by a
multi-start alternating minimization of <xi (x) eta| rho |xi (x) eta> over
unit product vectors. It is one-sided: a negative value comes with a
violating product vector and is conclusive; a nonnegative minimum is
trusted only at the given restart budget.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .linalg import DEFAULT_TOL, Tolerance, as_matrix, eig_hermitian_min, is_hermitian, random_unit_vectors
from .maps import MapRep

DEFAULT_RESTARTS = 64
DEFAULT_MAX_ITERS = 200
CONVERGENCE_TOL = 1e-12


class UnsupportedDimensionError(ValueError):
    """Raised when a test is only implemented for certain dimensions."""


class Method(str, enum.Enum):
    CLOSED_FORM = "closed_form"
    ALTERNATING_MINIMIZATION = "alternating_minimization"
    PSD_CHECK = "psd_check"
    PPT_CHECK = "ppt_check"


@dataclass(frozen=True, eq=False)
class ConeVerdict:
    member: bool
    margin: float
    method: Method
    certificate: Optional[np.ndarray] = None

    def __post_init__(self):
        if not self.member and self.certificate is None:
            raise ValueError("a negative verdict must carry a certificate")


@dataclass(frozen=True)
class SpecialWitnessForm:
    """Parameters of the 4 x 4 matrix with a, b on the corners of the
    diagonal, alpha at ((1,1),(2,2)) and beta at ((1,2),(2,1))."""

    a: float
    b: float
    alpha: complex
    beta: complex

    def matrix(self) -> np.ndarray:
        a, b, al, be = self.a, self.b, complex(self.alpha), complex(self.beta)
        return np.array([
            [a, 0, 0, al],
            [0, 0, be, 0],
            [0, np.conj(be), 0, 0],
            [np.conj(al), 0, 0, b],
        ], dtype=complex)

    def slack(self) -> float:
        return float(np.sqrt(self.a * self.b) - abs(self.alpha) - abs(self.beta))


def block_positive_special(w: SpecialWitnessForm, tol: Tolerance = DEFAULT_TOL) -> ConeVerdict:
    """Closed-form block-positivity test: member iff |alpha| + |beta| <= sqrt(ab)."""
    if w.a < 0 or w.b < 0:
        raise ValueError("diagonal entries a, b must be nonnegative")
    margin = w.slack()
    if margin >= -tol.entry_tol:
        return ConeVerdict(True, margin, Method.CLOSED_FORM)
    return ConeVerdict(False, margin, Method.CLOSED_FORM, _special_violator(w))


def _special_violator(w: SpecialWitnessForm) -> np.ndarray:
    # Product vector (p, q e^{i(theta-tau)}) (x) (1, e^{i tau}); the phases
    # align alpha and beta e^{-2 i tau}, then (p, q) minimizes
    # p^2 a + q^2 b - 2 p q (|alpha| + |beta|).
    alpha, beta = complex(w.alpha), complex(w.beta)
    tau = (np.angle(beta) - np.angle(alpha)) / 2
    theta = np.pi - np.angle(alpha)
    c = abs(alpha) + abs(beta)
    _, vec = np.linalg.eigh(np.array([[w.a, -c], [-c, w.b]]))
    p, q = vec[:, 0]
    if p * q < 0:
        q = -q
    xi = np.array([p, q * np.exp(1j * (theta - tau))])
    eta = np.array([1.0, np.exp(1j * tau)]) / np.sqrt(2)
    return np.kron(xi, eta)


def _contract_first(rho4: np.ndarray, xi: np.ndarray) -> np.ndarray:
    """(<xi| (x) I) rho (|xi> (x) I) for a batch of xi (rows)."""
    return np.einsum("ri,ikjl,rj->rkl", xi.conj(), rho4, xi)


def _contract_second(rho4: np.ndarray, eta: np.ndarray) -> np.ndarray:
    """(I (x) <eta|) rho (I (x) |eta>) for a batch of eta (rows)."""
    return np.einsum("rk,ikjl,rl->rij", eta.conj(), rho4, eta)


def _min_eigvecs(mats: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    herm = (mats + mats.conj().transpose(0, 2, 1)) / 2
    w, v = np.linalg.eigh(herm)
    return w[:, 0], v[:, :, 0]


def alternating_descent(rho, m: int, n: int, xi: np.ndarray, eta: np.ndarray,
                        max_iters: int = DEFAULT_MAX_ITERS, atol: float = CONVERGENCE_TOL):
    """Alternating eigenvector descent from a batch of starting product vectors.

    Each half-step replaces one factor by the minimal eigenvector of the
    matrix obtained by contracting rho with the other factor, so the
    objective never increases. Returns ``(values, xi, eta, history)`` where
    ``history[t]`` holds the batch objective after step t.
    """
    rho4 = np.asarray(rho).reshape(m, n, m, n)
    xi = np.atleast_2d(np.asarray(xi, dtype=complex))
    eta = np.atleast_2d(np.asarray(eta, dtype=complex))
    values = np.real(np.einsum("ri,rk,ikjl,rj,rl->r", xi.conj(), eta.conj(), rho4, xi, eta))
    history = [values]
    active = np.ones(len(values), dtype=bool)
    for _ in range(max_iters):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        _, new_eta = _min_eigvecs(_contract_first(rho4, xi[idx]))
        eta[idx] = new_eta
        new_values, new_xi = _min_eigvecs(_contract_second(rho4, eta[idx]))
        xi[idx] = new_xi
        updated = values.copy()
        updated[idx] = new_values
        active[idx] = values[idx] - new_values > atol
        values = updated
        history.append(values)
    return values, xi, eta, np.array(history)


def _start_vectors(seed: int, restarts: int, m: int, n: int):
    children = np.random.SeedSequence(seed).spawn(restarts)
    xi = np.empty((restarts, m), dtype=complex)
    eta = np.empty((restarts, n), dtype=complex)
    for r, child in enumerate(children):
        rng = np.random.default_rng(child)
        xi[r] = random_unit_vectors(rng, 1, m)[0]
        eta[r] = random_unit_vectors(rng, 1, n)[0]
    return xi, eta


def min_product_expectation(rho, m: int, n: int, restarts: int = DEFAULT_RESTARTS,
                            max_iters: int = DEFAULT_MAX_ITERS, seed: int = 0,
                            tol: Tolerance = DEFAULT_TOL):
    """Upper bound on the minimum of <zeta|rho|zeta> over unit product vectors.

    Returns ``(value, (xi, eta))`` for the best of ``restarts`` starts. Each
    start draws from its own generator spawned from ``seed``.
    """
    rho = as_matrix(rho)
    if rho.shape != (m * n, m * n):
        raise ValueError(f"expected a {m * n}x{m * n} matrix, got {rho.shape}")
    scale = max(1.0, float(np.abs(rho).max(initial=0.0)))
    if not is_hermitian(rho, Tolerance(tol.rank_tol, tol.entry_tol * scale)):
        raise ValueError("min_product_expectation needs a Hermitian matrix")
    xi, eta = _start_vectors(seed, restarts, m, n)
    values, xi, eta, _ = alternating_descent(rho, m, n, xi, eta, max_iters=max_iters)
    best = int(np.argmin(values))
    return float(values[best]), (xi[best], eta[best])


def is_positive_map(phi: MapRep, restarts: int = DEFAULT_RESTARTS, seed: int = 0,
                    tol: Tolerance = DEFAULT_TOL) -> ConeVerdict:
    value, (xi, eta) = min_product_expectation(phi.choi, phi.m, phi.n, restarts=restarts, seed=seed, tol=tol)
    member = value >= -tol.entry_tol
    return ConeVerdict(member, value, Method.ALTERNATING_MINIMIZATION,
                       None if member else np.kron(xi, eta))


def is_completely_positive(phi: MapRep, tol: Tolerance = DEFAULT_TOL) -> ConeVerdict:
    value, vec = eig_hermitian_min(phi.choi)
    member = value >= -tol.entry_tol
    return ConeVerdict(member, value, Method.PSD_CHECK, None if member else vec)


def partial_transpose(rho, m: int, n: int) -> np.ndarray:
    """Transpose on the second tensor factor of rho in M_m (x) M_n."""
    return np.asarray(rho).reshape(m, n, m, n).transpose(0, 3, 2, 1).reshape(m * n, m * n)


def is_superpositive_2x2(phi: MapRep, tol: Tolerance = DEFAULT_TOL) -> ConeVerdict:
    """PPT test, exact for maps M_2 -> M_2 only."""
    if (phi.m, phi.n) != (2, 2):
        raise UnsupportedDimensionError(
            f"superpositivity is only decided for M_2 -> M_2, got M_{phi.m} -> M_{phi.n}")
    w1, v1 = eig_hermitian_min(phi.choi)
    w2, v2 = eig_hermitian_min(partial_transpose(phi.choi, 2, 2))
    margin = min(w1, w2)
    member = margin >= -tol.entry_tol
    certificate = None if member else (v1 if w1 <= w2 else v2)
    return ConeVerdict(member, margin, Method.PPT_CHECK, certificate)
