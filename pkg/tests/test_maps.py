import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from posmap.linalg import DimensionError, pairing
from posmap.maps import (
    DegenerateInputError,
    MapRep,
    ad,
    adjoint,
    apply,
    choi_of,
    compose,
    flip,
    identity_map,
    lambda_compress,
    lambda_embed,
    map_of_choi,
    pairing_maps,
    st_maps,
    svd_reduce,
    transpose_map,
)

from conftest import random_complex
from oracles import choi_by_sum

ID2_CHOI = np.array([
    [1, 0, 0, 1],
    [0, 0, 0, 0],
    [0, 0, 0, 0],
    [1, 0, 0, 1],
])


def random_map(g, m, n):
    return map_of_choi(random_complex(g, m * n, m * n), m, n)


def test_identity_choi_exact():
    assert np.array_equal(identity_map(2).choi, ID2_CHOI)
    assert np.array_equal(choi_of(2, 2, lambda a: a).choi, ID2_CHOI)


def test_transpose_choi_is_swap():
    swap = np.eye(4)[[0, 2, 1, 3]]
    assert np.array_equal(transpose_map(2).choi, swap)


def test_choi_matches_sum_oracle(rng):
    s = random_complex(rng, 2, 3)
    fn = lambda a: s.conj().T @ a @ s
    assert np.allclose(ad(s).choi, choi_by_sum(fn, 2, 3))
    assert np.allclose(choi_of(2, 3, fn).choi, choi_by_sum(fn, 2, 3))


def test_apply_reads_choi(rng):
    s = random_complex(rng, 3, 2)
    a = random_complex(rng, 3, 3)
    assert np.allclose(apply(ad(s), a), s.conj().T @ a @ s)


def test_apply_dimension_error():
    with pytest.raises(DimensionError):
        apply(identity_map(2), np.eye(3))


def test_choi_rejects_wrong_shape():
    with pytest.raises(DimensionError):
        map_of_choi(np.eye(5), 2, 2)
    with pytest.raises(DimensionError):
        choi_of(2, 3, lambda a: a)


def test_choi_is_read_only():
    phi = identity_map(2)
    with pytest.raises(ValueError):
        phi.choi[0, 0] = 5


def test_compose_order(rng):
    # compose(f, g) applies g first
    s1, s2 = random_complex(rng, 2, 3), random_complex(rng, 3, 4)
    f, g = ad(s2), ad(s1)
    a = random_complex(rng, 2, 2)
    assert np.allclose(apply(compose(f, g), a), apply(f, apply(g, a)))
    assert np.allclose(compose(f, g).choi, ad(s1 @ s2).choi)
    with pytest.raises(DimensionError):
        compose(g, f)


def test_adjoint_of_ad_is_ad_of_transpose(rng):
    s = random_complex(rng, 2, 3)
    assert np.allclose(adjoint(ad(s)).choi, ad(s.T).choi)


def test_adjoint_of_ad_real_is_ad_of_conjugate_transpose(rng):
    s = rng.standard_normal((3, 2))
    assert np.allclose(adjoint(ad(s)).choi, ad(s.conj().T).choi)


def test_flip_involution(rng):
    rho = random_complex(rng, 6, 6)
    assert np.allclose(flip(flip(rho, 2, 3), 3, 2), rho)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 2**31 - 1))
def test_adjoint_pairing_identity(m, n, seed):
    g = np.random.default_rng(seed)
    phi = random_map(g, m, n)
    a, b = random_complex(g, m, m), random_complex(g, n, n)
    assert np.isclose(pairing(apply(phi, a), b), pairing(a, apply(adjoint(phi), b)))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 2**31 - 1))
def test_pairing_product_identity(m, n, seed):
    g = np.random.default_rng(seed)
    phi = random_map(g, m, n)
    a, b = random_complex(g, m, m), random_complex(g, n, n)
    assert np.isclose(pairing(np.kron(a, b), phi.choi), pairing(b, apply(phi, a)))


def test_pairing_with_ad_is_product_expectation(rng):
    # <Ad_{|x><y|}, phi> = <x (x) conj y| C_phi |x (x) conj y>
    phi = random_map(rng, 2, 3)
    x, y = random_complex(rng, 2), random_complex(rng, 3)
    z = np.kron(x, y.conj())
    assert np.isclose(pairing_maps(ad(np.outer(x, y.conj())), phi), np.vdot(z, phi.choi @ z))


def test_map_arithmetic(rng):
    f, g = random_map(rng, 2, 2), random_map(rng, 2, 2)
    a = random_complex(rng, 2, 2)
    assert np.allclose(apply(2 * f - g, a), 2 * apply(f, a) - apply(g, a))
    with pytest.raises(DimensionError):
        f + random_map(rng, 2, 3)


def test_st_maps():
    s, t = st_maps(2, 3)
    a = np.array([[1, 2], [3, 4]])
    assert np.array_equal(apply(s, a), [[1, 2, 0], [3, 4, 0], [0, 0, 0]])
    assert np.array_equal(apply(t, np.arange(9).reshape(3, 3)), [[0, 1], [3, 4]])
    with pytest.raises(ValueError):
        st_maps(3, 2)


def test_lambda_pair():
    big = np.arange(9).reshape(3, 3)
    assert np.array_equal(apply(lambda_compress(1, 3, 3), big), [[0, 2], [6, 8]])
    small = np.array([[1, 2], [3, 4]])
    assert np.array_equal(apply(lambda_embed(1, 3, 3), small), [[1, 0, 2], [0, 0, 0], [3, 0, 4]])
    with pytest.raises(ValueError):
        lambda_embed(2, 2, 3)
    with pytest.raises(IndexError):
        lambda_embed(1, 4, 3)


@pytest.mark.parametrize("shape,rank", [((2, 2), 1), ((2, 3), 2), ((3, 3), 3), ((3, 4), 2)])
def test_svd_reduce(rng, shape, rank):
    g = rng
    s = random_complex(g, shape[0], rank) @ random_complex(g, rank, shape[1])
    u, sigma, v, r = svd_reduce(s)
    assert r == rank
    assert np.allclose(u @ sigma @ v.conj().T, s)
    assert np.allclose(sigma, np.eye(*shape) * (np.arange(shape[1]) < rank))
    assert abs(np.linalg.det(u)) > 1e-8
    assert np.allclose(v.conj().T @ v, np.eye(shape[1]))
    # Ad_s is Ad_sigma conjugated by invertible pieces
    lhs = ad(s).choi
    rhs = compose(ad(v.conj().T), compose(ad(sigma), ad(u))).choi
    assert np.allclose(lhs, rhs)


def test_svd_reduce_zero():
    with pytest.raises(DegenerateInputError):
        svd_reduce(np.zeros((2, 3)))
