"""Independent reference computations used by the tests.

These avoid the package's own index bookkeeping: Choi matrices are built as
explicit sums of Kronecker products, block-positivity of 4 x 4 forms is
checked on a grid over the first factor, and commutants are solved with a
different vectorization convention through scipy.
"""

import numpy as np
from scipy.linalg import null_space

GRID_STEP = np.pi / 200


def choi_by_sum(fn, m, n):
    """sum_ij E_ij (x) fn(E_ij), written out directly."""
    out = np.zeros((m * n, m * n), dtype=complex)
    for i in range(m):
        for j in range(m):
            e = np.zeros((m, m))
            e[i, j] = 1
            out += np.kron(e, np.asarray(fn(e), dtype=complex))
    return out


def bloch_grid(step=GRID_STEP):
    """Unit vectors (cos t/2, e^{ip} sin t/2) for t in [0, pi], p in [0, 2 pi)."""
    theta = np.arange(0, np.pi + step / 2, step)
    phase = np.arange(0, 2 * np.pi, step)
    t, p = np.meshgrid(theta, phase, indexing="ij")
    return np.stack([np.cos(t / 2), np.exp(1j * p) * np.sin(t / 2)], axis=-1).reshape(-1, 2)


def grid_min_2x2(rho, step=GRID_STEP):
    """min over grid xi and all unit eta of <xi eta| rho |xi eta>.

    For fixed xi the minimum over eta is the smallest eigenvalue of a 2 x 2
    Hermitian matrix, taken in closed form.
    """
    xi = bloch_grid(step)
    r4 = np.asarray(rho).reshape(2, 2, 2, 2)
    blocks = np.einsum("ri,ikjl,rj->rkl", xi.conj(), r4, xi)
    a = blocks[:, 0, 0].real
    d = blocks[:, 1, 1].real
    b = np.abs(blocks[:, 0, 1])
    lam = (a + d) / 2 - np.sqrt(((a - d) / 2) ** 2 + b ** 2)
    return float(lam.min())


def commutant_dim_scipy(images):
    """dim {X : X A = A X for all A in images}, column-major vec and scipy null_space."""
    n = images[0].shape[0]
    eye = np.eye(n)
    # column-major vec: vec(XA) = (A^T (x) I) vec X, vec(AX) = (I (x) A) vec X
    rows = np.vstack([np.kron(a.T, eye) - np.kron(eye, a) for a in images])
    return null_space(rows, rcond=1e-10).shape[1]


def special_pairing_formula(a, b, alpha, beta, theta):
    return a + b - 2 * np.real(alpha + beta * np.exp(-2j * theta))
