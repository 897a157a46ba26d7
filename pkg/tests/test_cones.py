import numpy as np
import pytest

from posmap.cones import (
    SpecialWitnessForm,
    UnsupportedDimensionError,
    alternating_descent,
    block_positive_special,
    is_completely_positive,
    is_positive_map,
    is_superpositive_2x2,
    min_product_expectation,
    partial_transpose,
)
from posmap.maps import ad, compose, identity_map, map_of_choi, transpose_map

from conftest import random_complex
from oracles import grid_min_2x2


def test_identity_min_is_zero():
    value, _ = min_product_expectation(identity_map(2).choi, 2, 2)
    assert abs(value) < 1e-10
    assert abs(grid_min_2x2(identity_map(2).choi)) < 1e-12


def test_special_form_minimum_matches_grid():
    rho = SpecialWitnessForm(1, 1, 0.6, 0.5).matrix()
    value, (xi, eta) = min_product_expectation(rho, 2, 2)
    # hand derivation: min over (p, q) of (p^2 + q^2 - 2.2 p q) / 2 = -0.05
    assert value == pytest.approx(-0.05, abs=1e-9)
    assert grid_min_2x2(rho) == pytest.approx(-0.05, abs=1e-4)


def test_special_verdict_and_certificate():
    form = SpecialWitnessForm(1, 1, 0.6, 0.5)
    v = block_positive_special(form)
    assert not v.member
    assert v.margin == pytest.approx(-0.1)
    z = v.certificate
    assert np.isclose(np.linalg.norm(z), 1)
    assert np.vdot(z, form.matrix() @ z).real == pytest.approx(-0.05)
    # the certificate is a product vector
    assert np.linalg.matrix_rank(z.reshape(2, 2), tol=1e-10) == 1


@pytest.mark.parametrize("alpha,beta", [(0.3j, -0.2), (-0.5, 0.5j), (0.7 * np.exp(1j), 0.1)])
def test_certificate_with_phases(alpha, beta):
    form = SpecialWitnessForm(1.0, 1.0, alpha, beta)
    v = block_positive_special(form)
    if not v.member:
        z = v.certificate
        assert np.vdot(z, form.matrix() @ z).real < 0


def test_boundary_is_member():
    assert block_positive_special(SpecialWitnessForm(4, 1, 1.2, 0.8)).member


def test_special_rejects_negative_diagonal():
    with pytest.raises(ValueError):
        block_positive_special(SpecialWitnessForm(-1, 1, 0, 0))


def test_descent_is_monotone(rng):
    rho = random_complex(rng, 6, 6)
    rho = rho + rho.conj().T
    xi = random_complex(rng, 5, 2)
    eta = random_complex(rng, 5, 3)
    xi /= np.linalg.norm(xi, axis=1, keepdims=True)
    eta /= np.linalg.norm(eta, axis=1, keepdims=True)
    _, _, _, hist = alternating_descent(rho, 2, 3, xi, eta)
    assert np.all(np.diff(hist, axis=0) <= 1e-12)


def test_min_expectation_is_deterministic(rng):
    rho = random_complex(rng, 4, 4)
    rho = rho + rho.conj().T
    assert min_product_expectation(rho, 2, 2, seed=3)[0] == min_product_expectation(rho, 2, 2, seed=3)[0]


def test_min_expectation_rejects_non_hermitian():
    with pytest.raises(ValueError):
        min_product_expectation(np.triu(np.ones((4, 4))), 2, 2)


def test_transpose_positive_not_cp():
    t = transpose_map(2)
    assert is_positive_map(t).member
    v = is_completely_positive(t)
    assert not v.member and v.margin == pytest.approx(-1)
    assert np.vdot(v.certificate, t.choi @ v.certificate).real < 0


def test_positive_map_violation_has_certificate(rng):
    phi = map_of_choi(-identity_map(2).choi, 2, 2)
    v = is_positive_map(phi)
    assert not v.member
    z = v.certificate
    assert np.vdot(z, phi.choi @ z).real < 0


def test_cp_maps(rng):
    s = random_complex(rng, 2, 3)
    assert is_completely_positive(ad(s)).member
    assert is_positive_map(ad(s)).member


def test_superpositive_2x2():
    assert not is_superpositive_2x2(identity_map(2)).member
    rank_one = ad(np.outer([1, 1j], [1, 2]))
    assert is_superpositive_2x2(rank_one).member
    with pytest.raises(UnsupportedDimensionError):
        is_superpositive_2x2(identity_map(3))


def test_partial_transpose_of_identity_is_swap():
    assert np.allclose(partial_transpose(identity_map(2).choi, 2, 2), transpose_map(2).choi)


def test_transpose_composed_is_positive(rng):
    s = random_complex(rng, 3, 2)
    assert is_positive_map(compose(ad(s), transpose_map(3))).member
