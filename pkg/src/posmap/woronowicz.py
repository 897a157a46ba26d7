"""Kernel criterion for exposedness via the hat map.

For phi: M_m -> M_n the hat map sends ``a (x) eta`` to ``phi(a) eta``. With
``|xi><xi| (x) eta`` identified with ``xi (x) conj(xi) (x) eta`` the matrix
unit ``|i><j| (x) e_k`` becomes the basis vector ``|i j k>``, and the hat map
is an n x (m^2 n) matrix. N_phi is spanned by ``xi (x) conj(xi) (x) eta``
with ``phi(|xi><xi|) eta = 0``; it always sits inside the kernel of the hat
map. When the two coincide and phi is unital with trivial commutant, phi
spans an exposed ray.

Only rank-one ``a`` are sampled for N_phi. That loses nothing: if
``a = sum_i |xi_i><xi_i|`` and ``phi(a) eta = 0`` then each positive term
``<eta|phi(|xi_i><xi_i|)|eta>`` vanishes, hence so does each
``phi(|xi_i><xi_i|) eta``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    Tolerance,
    kernel_basis,
    numerical_rank,
    orthonormal_span,
    random_unit_vectors,
)
from .maps import MapRep, apply
from .zeros import find_product_zeros


class Verdict(str, enum.Enum):
    EXPOSED_BY_THEOREM = "exposed_by_theorem"
    CONDITION_FAILS = "condition_fails"
    HYPOTHESES_FAIL = "not_unital_or_irreducible_but_condition_holds"


@dataclass(frozen=True, eq=False)
class HatMap:
    matrix: np.ndarray
    dims: Tuple[int, int]

    @property
    def kernel_dim(self) -> int:
        return self.matrix.shape[1] - numerical_rank(self.matrix)


def hat_matrix(phi: MapRep) -> HatMap:
    m, n = phi.m, phi.n
    # column (i, j, k) is phi(|i><j|) e_k, i.e. C[i, :, j, k]
    mat = phi.tensor.transpose(1, 0, 2, 3).reshape(n, m * m * n)
    return HatMap(mat, (m, n))


def simple_tensor(xi: np.ndarray, eta: np.ndarray) -> np.ndarray:
    """Vector of |xi><xi| (x) eta, i.e. xi (x) conj(xi) (x) eta."""
    return np.kron(np.kron(xi, xi.conj()), eta)


def _draw_vectors(phi: MapRep, xi: np.ndarray, tol: Tolerance) -> np.ndarray:
    scale = max(1.0, float(np.linalg.norm(phi.choi, 2)))
    kern = kernel_basis(apply(phi, np.outer(xi, xi.conj())), tol, scale=scale)
    return np.array([simple_tensor(xi, kern[:, k]) for k in range(kern.shape[1])]).reshape(-1, phi.m * phi.m * phi.n)


class _SpanTracker:
    def __init__(self, ambient: int, tol: Tolerance):
        self.basis = np.zeros((ambient, 0), dtype=complex)
        self.tol = tol

    def add(self, vectors: np.ndarray) -> bool:
        if vectors.size == 0:
            return False
        before = self.basis.shape[1]
        self.basis = orthonormal_span(np.hstack([self.basis, vectors.T]), self.tol)
        return self.basis.shape[1] > before


def n_phi_basis(phi: MapRep, sampler_budget: Optional[int] = None, seed: int = 42,
                tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of N_phi for positive phi.

    Random xi are drawn until the span has not grown for ``10 m``
    consecutive draws (at most ``sampler_budget``, default ``100 m^2 n``).
    The same rule then runs over descent-located zeros, which reach the
    components of the zero set that generic xi never hit.
    """
    m, n = phi.m, phi.n
    cap = 100 * m * m * n if sampler_budget is None else sampler_budget
    patience = 10 * m
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    span = _SpanTracker(m * m * n, tol)

    quiet, draws = 0, 0
    while quiet < patience and draws < cap:
        xi = random_unit_vectors(rng, 1, m)[0]
        quiet = 0 if span.add(_draw_vectors(phi, xi, tol)) else quiet + 1
        draws += 1

    quiet = 0
    while quiet < patience and draws < cap:
        zeros = find_product_zeros(phi.choi, m, n, 8, rng)
        draws += 8
        for x, _ in zeros:
            quiet = 0 if span.add(_draw_vectors(phi, x.conj(), tol)) else quiet + 1
        if not zeros:
            quiet += 8
    return span.basis


# Explicit generating families ----------------------------------------------

class FamilyKind(str, enum.Enum):
    IDENTITY = "identity_r"
    EMBED_S = "embed_S"
    COMPRESS_T = "compress_T"


@dataclass(frozen=True)
class GeneratingFamily:
    """Parametrized generators xi (x) conj(xi) (x) eta_i of N_phi.

    ``xi = (1, alpha_2, ..., alpha_p)`` lives in C^p and ``eta_i`` in C^q has
    ``conj(alpha_i)`` first, ``-1`` at slot i, and (for the embedding) free
    parameters beta on slots r+1..n. Slots i run over 2..r.
    """

    kind: FamilyKind
    params: Dict[str, int]

    @property
    def xi_dim(self) -> int:
        return self.params["m"] if self.kind is FamilyKind.COMPRESS_T else self.params["r"]

    @property
    def eta_dim(self) -> int:
        return self.params["n"] if self.kind is FamilyKind.EMBED_S else self.params["r"]

    @property
    def slots(self) -> List[int]:
        return list(range(2, self.params["r"] + 1))

    @property
    def ambient_dim(self) -> int:
        return self.xi_dim ** 2 * self.eta_dim

    def slot_dim(self) -> int:
        """Number of distinct monomials in one generator, the expected dim V_i."""
        p = self.params
        if self.kind is FamilyKind.IDENTITY:
            return p["r"] * (2 * p["r"] - 1)
        if self.kind is FamilyKind.EMBED_S:
            r, n = p["r"], p["n"]
            return r * ((2 + n - r) * r - 1)
        return p["m"] * (2 * p["m"] - 1)

    def span_dim(self) -> int:
        """Expected dimension of the joint span over all slots."""
        p = self.params
        if self.kind is FamilyKind.IDENTITY:
            return p["r"] ** 3 - p["r"]
        if self.kind is FamilyKind.EMBED_S:
            return p["r"] ** 2 * p["n"] - p["r"]
        return p["m"] ** 2 * p["r"] - p["m"]

    def generator(self, slot: int, alpha: np.ndarray, beta: Optional[np.ndarray] = None) -> np.ndarray:
        """Generator for slot i at parameters alpha = (alpha_2..alpha_p) and beta."""
        if slot not in self.slots:
            raise ValueError(f"slot {slot} not in {self.slots}")
        xi = np.concatenate([[1.0], alpha]).astype(complex)
        eta = np.zeros(self.eta_dim, dtype=complex)
        eta[0] = np.conj(xi[slot - 1])
        eta[slot - 1] = -1.0
        if self.kind is FamilyKind.EMBED_S:
            eta[self.params["r"]:] = beta
        return simple_tensor(xi, eta)

    def instantiate(self, slot: int, count: int, rng: np.random.Generator) -> np.ndarray:
        """``count`` generators at random parameters, as rows."""
        extra = self.eta_dim - self.params["r"] if self.kind is FamilyKind.EMBED_S else 0
        rows = []
        for _ in range(count):
            alpha = rng.uniform(-1, 1, self.xi_dim - 1) + 1j * rng.uniform(-1, 1, self.xi_dim - 1)
            beta = rng.uniform(-1, 1, extra) + 1j * rng.uniform(-1, 1, extra)
            rows.append(self.generator(slot, alpha, beta))
        return np.array(rows)


def explicit_family(kind, **params) -> GeneratingFamily:
    kind = FamilyKind(kind)
    required = {FamilyKind.IDENTITY: ("r",), FamilyKind.EMBED_S: ("r", "n"), FamilyKind.COMPRESS_T: ("m", "r")}[kind]
    if set(params) != set(required):
        raise ValueError(f"{kind.value} takes parameters {required}, got {sorted(params)}")
    r = params["r"]
    if r < 2:
        raise ValueError("generating families need r >= 2")
    if kind is FamilyKind.EMBED_S and r > params["n"]:
        raise ValueError("embed_S needs r <= n")
    if kind is FamilyKind.COMPRESS_T and r > params["m"]:
        raise ValueError("compress_T needs r <= m")
    return GeneratingFamily(kind, dict(params))


def family_vectors(family: GeneratingFamily, probe_count: Optional[int] = None,
                   slots: Optional[Sequence[int]] = None, seed: int = 0) -> np.ndarray:
    probe_count = 3 * family.ambient_dim if probe_count is None else probe_count
    rng = np.random.default_rng(seed)
    slots = family.slots if slots is None else slots
    return np.vstack([family.instantiate(i, probe_count, rng) for i in slots])


def family_basis(family: GeneratingFamily, probe_count: Optional[int] = None,
                 slots: Optional[Sequence[int]] = None, seed: int = 0,
                 tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    return orthonormal_span(family_vectors(family, probe_count, slots, seed).T, tol)


def family_span_dim(family: GeneratingFamily, probe_count: Optional[int] = None,
                    slots: Optional[Sequence[int]] = None, seed: int = 0,
                    tol: Tolerance = DEFAULT_TOL) -> int:
    return numerical_rank(family_vectors(family, probe_count, slots, seed), tol)


def zeta_vectors(ks: Sequence[int], first: int, middle: int, last: int) -> np.ndarray:
    """Columns zeta_k = sum_{j <= last} |k j j> in C^first (x) C^middle (x) C^last (1-based k)."""
    out = np.zeros((first * middle * last, len(ks)), dtype=complex)
    for col, k in enumerate(ks):
        for j in range(min(middle, last)):
            out[((k - 1) * middle + j) * last + j, col] = 1.0
    return out


# Hypotheses ------------------------------------------------------------------

def is_unital(phi: MapRep, tol: Tolerance = DEFAULT_TOL) -> bool:
    image = apply(phi, np.eye(phi.m))
    return bool(np.max(np.abs(image - np.eye(phi.n))) <= tol.entry_tol)


def commutant_dimension(phi: MapRep, tol: Tolerance = DEFAULT_TOL) -> int:
    """Dimension of {X : X phi(a) = phi(a) X for every a}."""
    n = phi.n
    eye = np.eye(n)
    blocks = []
    for i in range(phi.m):
        for j in range(phi.m):
            a = phi.tensor[i, :, j, :]
            # row-major vec: vec(XA) = (I (x) A^T) vec X, vec(AX) = (A (x) I) vec X
            blocks.append(np.kron(eye, a.T) - np.kron(a, eye))
    return int(kernel_basis(np.vstack(blocks), tol).shape[1])


@dataclass(frozen=True)
class WoronowiczReport:
    dim_ker_hat: int
    dim_N: int
    condition_holds: bool
    unital: bool
    commutant_dim: int
    verdict: Verdict
    n_in_kernel_residual: float

    @property
    def irreducible(self) -> bool:
        return self.commutant_dim == 1

    @property
    def gap(self) -> int:
        return self.dim_ker_hat - self.dim_N

    def as_dict(self) -> dict:
        return {
            "dim_ker_hat": self.dim_ker_hat,
            "dim_N": self.dim_N,
            "gap": self.gap,
            "condition_holds": self.condition_holds,
            "unital": self.unital,
            "commutant_dim": self.commutant_dim,
            "irreducible": self.irreducible,
            "verdict": self.verdict.value,
        }


def woronowicz_verdict(phi: MapRep, budget: Optional[int] = None, seed: int = 42,
                       tol: Tolerance = DEFAULT_TOL) -> WoronowiczReport:
    hat = hat_matrix(phi)
    basis = n_phi_basis(phi, budget, seed, tol)
    residual = float(np.max(np.linalg.norm(hat.matrix @ basis, axis=0), initial=0.0))
    dim_ker, dim_n = hat.kernel_dim, basis.shape[1]
    holds = dim_ker == dim_n and residual <= 1e-8
    unital = is_unital(phi, tol)
    comm = commutant_dimension(phi, tol)
    if not holds:
        verdict = Verdict.CONDITION_FAILS
    elif unital and comm == 1:
        verdict = Verdict.EXPOSED_BY_THEOREM
    else:
        verdict = Verdict.HYPOTHESES_FAIL
    return WoronowiczReport(dim_ker, dim_n, holds, unital, comm, verdict, residual)


# Factoring one hat map through another --------------------------------------

def kernel_inclusion_witness(psi: MapRep, phi: MapRep, tol: Tolerance = DEFAULT_TOL,
                             atol: float = 1e-8) -> Optional[np.ndarray]:
    """A vector in ker hat(phi) but not in ker hat(psi), or None if the inclusion holds."""
    if (psi.m, psi.n) != (phi.m, phi.n):
        raise ValueError("psi and phi must have the same dimensions")
    kern = kernel_basis(hat_matrix(phi).matrix, tol)
    if kern.shape[1] == 0:
        return None
    images = hat_matrix(psi).matrix @ kern
    norms = np.linalg.norm(images, axis=0)
    scale = max(1.0, float(np.abs(psi.choi).max(initial=0.0)))
    worst = int(np.argmax(norms))
    return kern[:, worst] if norms[worst] > atol * scale else None


def factor_through(psi: MapRep, phi: MapRep, tol: Tolerance = DEFAULT_TOL,
                   atol: float = 1e-8) -> Optional[np.ndarray]:
    """X with psi(a) = X phi(a) for all a, or None when ker hat(phi) is not inside ker hat(psi)."""
    if kernel_inclusion_witness(psi, phi, tol, atol) is not None:
        return None
    hp, hq = hat_matrix(phi).matrix, hat_matrix(psi).matrix
    xt, *_ = np.linalg.lstsq(hp.T, hq.T, rcond=None)
    x = xt.T
    scale = max(1.0, float(np.abs(psi.choi).max(initial=0.0)))
    if np.max(np.abs(x @ hp - hq), initial=0.0) > atol * scale:
        return None
    return x
