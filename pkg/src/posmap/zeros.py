"""Product vectors on which a block-positive form vanishes.

For block-positive rho, a unit product vector x (x) y is a zero of
f(x, y) = <x (x) y| rho |x (x) y> exactly when both contractions vanish:

    (<x| (x) I) rho (|x> (x) |y>) = 0   and   (I (x) <y|) rho (|x> (x) |y>) = 0.

Zeros are located by alternating descent from random starts, choosing each
factor at random inside the near-minimal eigenspace so that flat components
of the zero set get explored, then polished by Gauss-Newton on the two
contraction equations so that they hold to working precision.
"""

from __future__ import annotations

from typing import List, Tuple

import numpy as np

from .linalg import random_unit_vectors

DESCENT_STEPS = 60
POLISH_STEPS = 30


def contraction_residual(rho4: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    first = np.einsum("i,ikjl,j,l->k", x.conj(), rho4, x, y)
    second = np.einsum("k,ikjl,j,l->i", y.conj(), rho4, x, y)
    return np.concatenate([first, second])


def _pick_in_min_space(mats: np.ndarray, threshold: float, rng: np.random.Generator) -> np.ndarray:
    herm = (mats + mats.conj().transpose(0, 2, 1)) / 2
    w, v = np.linalg.eigh(herm)
    near = w <= w[:, :1] + threshold
    coeff = rng.standard_normal(w.shape) + 1j * rng.standard_normal(w.shape)
    coeff = np.where(near, coeff, 0.0)
    vec = np.einsum("rij,rj->ri", v, coeff)
    return vec / np.linalg.norm(vec, axis=1, keepdims=True)


def randomized_descent(rho4: np.ndarray, x: np.ndarray, y: np.ndarray, x_first: np.ndarray,
                       rng: np.random.Generator, threshold: float, steps: int = DESCENT_STEPS):
    """Alternating descent on a batch; rows with ``x_first`` update x before y."""
    x = x.copy()
    y = y.copy()
    for step in range(2 * steps):
        if step % 4 == 2:
            values = np.real(np.einsum("ri,rk,ikjl,rj,rl->r", x.conj(), y.conj(), rho4, x, y))
            if np.all(values <= 1e-3 * threshold):
                break
        update_x = x_first if step % 2 == 0 else ~x_first
        if update_x.any():
            idx = np.flatnonzero(update_x)
            mats = np.einsum("rk,ikjl,rl->rij", y[idx].conj(), rho4, y[idx])
            x[idx] = _pick_in_min_space(mats, threshold, rng)
        if (~update_x).any():
            idx = np.flatnonzero(~update_x)
            mats = np.einsum("ri,ikjl,rj->rkl", x[idx].conj(), rho4, x[idx])
            y[idx] = _pick_in_min_space(mats, threshold, rng)
    return x, y


def _split(v: np.ndarray, m: int, n: int) -> Tuple[np.ndarray, np.ndarray]:
    x = v[:m] + 1j * v[m:2 * m]
    y = v[2 * m:2 * m + n] + 1j * v[2 * m + n:]
    return x, y


def _join(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.concatenate([x.real, x.imag, y.real, y.imag])


def _real_residual(rho4, v, m, n):
    x, y = _split(v, m, n)
    r = contraction_residual(rho4, x, y)
    return np.concatenate([r.real, r.imag])


def polish_zero(rho4: np.ndarray, x: np.ndarray, y: np.ndarray, target: float,
                steps: int = POLISH_STEPS, h: float = 1e-7):
    """Gauss-Newton on the contraction equations; returns (x, y, residual norm)."""
    m, n = x.size, y.size
    x = x / np.linalg.norm(x)
    y = y / np.linalg.norm(y)
    v = _join(x, y)
    res = _real_residual(rho4, v, m, n)
    norm = np.linalg.norm(res)
    for _ in range(steps):
        if norm <= target:
            break
        jac = np.empty((res.size, v.size))
        for k in range(v.size):
            dv = np.zeros_like(v)
            dv[k] = h
            jac[:, k] = (_real_residual(rho4, v + dv, m, n) - _real_residual(rho4, v - dv, m, n)) / (2 * h)
        step = np.linalg.lstsq(jac, -res, rcond=None)[0]
        x, y = _split(v + step, m, n)
        x = x / np.linalg.norm(x)
        y = y / np.linalg.norm(y)
        trial = _join(x, y)
        trial_res = _real_residual(rho4, trial, m, n)
        trial_norm = np.linalg.norm(trial_res)
        if trial_norm >= norm:
            break
        v, res, norm = trial, trial_res, trial_norm
    x, y = _split(v, m, n)
    return x, y, float(norm)


def find_product_zeros(rho, m: int, n: int, starts: int, rng: np.random.Generator,
                       scale: float | None = None, accept: float = 1e-12) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Unit product zeros (x, y) of a block-positive rho found from ``starts`` random starts.

    A zero is kept when its contraction residual is at most ``accept * scale``.
    """
    rho4 = np.asarray(rho).reshape(m, n, m, n)
    if scale is None:
        scale = max(1.0, float(np.linalg.norm(rho, 2)))
    x0 = random_unit_vectors(rng, starts, m)
    y0 = random_unit_vectors(rng, starts, n)
    x_first = np.arange(starts) % 2 == 1
    x, y = randomized_descent(rho4, x0, y0, x_first, rng, threshold=1e-10 * scale)
    values = np.real(np.einsum("ri,rk,ikjl,rj,rl->r", x.conj(), y.conj(), rho4, x, y))
    zeros = []
    for r in np.flatnonzero(values <= 1e-6 * scale):
        xr, yr, res = polish_zero(rho4, x[r], y[r], target=0.1 * accept * scale)
        if res <= accept * scale:
            zeros.append((xr, yr))
    return zeros
