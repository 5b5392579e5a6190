import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plwe.errors import NumericError, PreconditionError
from plwe.geometry import (
    LEHMER,
    change_of_basis_monogenic,
    complex_roots,
    disc_check,
    embedding_matrix,
    mahler_measure,
    spectral_distortion,
)
from plwe.modarith import IntPolynomial, discriminant, parse_polynomial
from plwe.paramgen import cyclotomic_poly

SQ2 = math.sqrt(2)


def random_squarefree(rng, deg):
    while True:
        c = [int(v) for v in rng.integers(-5, 6, deg)] + [1]
        f = IntPolynomial(tuple(c))
        if discriminant(f) != 0:
            return f


# --- roots ---------------------------------------------------------------


def test_roots_quadratics():
    rs = complex_roots(parse_polynomial("x^2-2"))
    assert (rs.s1, rs.s2) == (2, 0)
    assert np.allclose(sorted(rs.roots.real), [-SQ2, SQ2], atol=1e-14)
    rs = complex_roots(parse_polynomial("x^2+1"))
    assert (rs.s1, rs.s2) == (0, 1)
    assert rs.roots[0] == pytest.approx(1j) and rs.roots[1] == pytest.approx(-1j)


def test_roots_cubic_residuals():
    rs = complex_roots(parse_polynomial("x^3-x+1"))
    assert (rs.s1, rs.s2) == (1, 1)
    assert rs.roots[0].real == pytest.approx(-1.324717957244746, abs=1e-12)
    assert np.all(rs.residuals() <= 1e-10)
    # Newton refinement oracle on the real root
    x = -1.3
    for _ in range(50):
        x -= (x**3 - x + 1) / (3 * x**2 - 1)
    assert rs.roots[0].real == pytest.approx(x, abs=1e-14)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 20))
def test_roots_match_lapack(seed, deg):
    f = random_squarefree(np.random.default_rng(seed), deg)
    rs = complex_roots(f)
    want = np.roots([float(c) for c in f.coefficients[::-1]])
    for z in want:
        assert np.min(np.abs(rs.roots - z)) <= 1e-6 * (1 + abs(z))
    assert rs.s1 + 2 * rs.s2 == deg
    k = rs.s1
    assert np.allclose(rs.roots[k + rs.s2 :], np.conj(rs.roots[k : k + rs.s2]))


def test_repeated_root_rejected():
    with pytest.raises(PreconditionError):
        complex_roots(parse_polynomial("x^2-2*x+1"))


def test_non_convergence_is_reported():
    with pytest.raises(NumericError):
        complex_roots(cyclotomic_poly(97), max_iter=1)


# --- embedding matrix -----------------------------------------------------


def test_embedding_examples():
    M = embedding_matrix(complex_roots(parse_polynomial("x^2-2")))
    assert np.allclose(M, [[1, SQ2], [1, -SQ2]], atol=1e-14)
    M = embedding_matrix(complex_roots(parse_polynomial("x^2+1")))
    assert np.allclose(M, np.eye(2), atol=1e-14)


@pytest.mark.parametrize("text", ["x^3-x+1", "x^4+1", "x^5-3*x+1", "x^6+x+1"])
def test_first_column_is_theta_of_one(text):
    rs = complex_roots(parse_polynomial(text))
    M = embedding_matrix(rs)
    want = np.r_[np.ones(rs.s1 + rs.s2), np.zeros(rs.s2)]
    assert np.allclose(M[:, 0], want)


# --- distortion and Mahler measure ---------------------------------------


@pytest.mark.parametrize(
    "f,dist,mahler",
    [
        (LEHMER, 3.214, 1.176),
        (cyclotomic_poly(11), 2.942, 1.0),
        (parse_polynomial("x^3-x+1"), 1.738, 1.324),
    ],
)
def test_distortion_regressions(f, dist, mahler):
    rep = spectral_distortion(f)
    assert rep.distortion == pytest.approx(dist, abs=1e-3)
    assert rep.mahler == pytest.approx(mahler, abs=1e-3)


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_power_of_two_cyclotomics_are_undistorted(k):
    rep = spectral_distortion(IntPolynomial((1,) + (0,) * (2**k - 1) + (1,)))
    assert rep.distortion == pytest.approx(1, abs=1e-9)
    assert rep.forward_distortion == pytest.approx(1, abs=1e-9)


def test_forward_and_inverse_distortion_relation():
    rep = spectral_distortion(LEHMER)
    sv = np.linalg.svd(rep.M, compute_uv=False)
    scale = rep.abs_det ** (1 / 10)
    assert rep.forward_distortion == pytest.approx(sv[0] / scale, rel=1e-9)
    assert rep.distortion == pytest.approx(scale / sv[-1], rel=1e-9)
    assert rep.condition_number == pytest.approx(sv[0] / sv[-1], rel=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 8))
def test_power_iteration_matches_svd(seed, deg):
    f = random_squarefree(np.random.default_rng(seed), deg)
    rep = spectral_distortion(f)
    sv = np.linalg.svd(rep.M, compute_uv=False)
    assert rep.spectral_norm == pytest.approx(sv[0], rel=1e-9)
    assert rep.inverse_spectral_norm == pytest.approx(1 / sv[-1], rel=1e-9)


def test_distortion_scale_invariance():
    rep = spectral_distortion(parse_polynomial("x^5-3*x+1"))
    for c in [0.001, 3.7, 1e4]:
        cM = c * rep.M
        sv = np.linalg.svd(cM, compute_uv=False)
        det = abs(np.linalg.det(cM)) ** (1 / 5)
        assert sv[0] / det == pytest.approx(rep.forward_distortion, rel=1e-9)
        assert det / sv[-1] == pytest.approx(rep.distortion, rel=1e-9)


def test_determinant_matches_discriminant_examples():
    for text in ["x^2+1", "x^2-2", "x^3-x+1", "x^4+1"]:
        f = parse_polynomial(text)
        lhs, disc = disc_check(f)
        assert math.exp(lhs) == pytest.approx(disc, rel=1e-9)


def test_degree_cap():
    f = IntPolynomial((1,) + (0,) * 129 + (1,))
    with pytest.raises(PreconditionError):
        spectral_distortion(f)
    assert spectral_distortion(f, max_degree=256).distortion == pytest.approx(1, abs=1e-9)


def test_mahler_examples():
    assert mahler_measure(parse_polynomial("x^2-x-1")) == pytest.approx((1 + math.sqrt(5)) / 2, rel=1e-12)
    assert mahler_measure(parse_polynomial("3*x^2-1")) == pytest.approx(3, rel=1e-12)
    assert mahler_measure(parse_polynomial("2*x-5")) == pytest.approx(5, rel=1e-12)


@pytest.mark.parametrize("m", range(3, 33))
def test_cyclotomic_mahler_and_stability(m):
    f = cyclotomic_poly(m)
    assert mahler_measure(f) == pytest.approx(1, abs=1e-9)
    if f.degree >= 2:
        assert spectral_distortion(f).distortion == spectral_distortion(f).distortion


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_mahler_multiplicative(seed):
    rng = np.random.default_rng(seed)
    f = random_squarefree(rng, int(rng.integers(1, 7)))
    g = random_squarefree(rng, int(rng.integers(1, 7)))
    fg = f * g
    if discriminant(fg) == 0:
        return
    assert mahler_measure(fg) == pytest.approx(mahler_measure(f) * mahler_measure(g), rel=1e-9)


# --- change of basis -------------------------------------------------------


def test_change_of_basis_gaussian_integers():
    cob = change_of_basis_monogenic(parse_polynomial("x^2+1"))
    assert cob.normalized_spectral_norm == pytest.approx(1, abs=1e-9)
    # gamma = 1/(2i) = -i/2 acts as a rotation by -pi/2 scaled by 1/2
    assert np.allclose(cob.D_gamma, [[0, 0.5], [-0.5, 0]])


def test_change_of_basis_sqrt_two_hand_computation():
    cob = change_of_basis_monogenic(parse_polynomial("x^2-2"))
    # roots +-sqrt2, gamma_j = 1/(2 alpha_j), M = [[1, s], [1, -s]]
    s = SQ2
    want = np.diag([1 / (2 * s), -1 / (2 * s)]) @ np.linalg.inv(np.array([[1, s], [1, -s]]))
    assert np.allclose(cob.N_alpha, want)
    # rows are orthogonal with norms 1/4 and 1/(4 sqrt2)
    assert cob.normalized_spectral_norm == pytest.approx(2**0.25, rel=1e-12)


@pytest.mark.parametrize("text", ["x^3-x+1", "x^5-3*x+1", "x^4+x+1", "x^6+x^3+1"])
def test_change_of_basis_determinant(text):
    f = parse_polynomial(text)
    cob = change_of_basis_monogenic(f)
    M = embedding_matrix(complex_roots(f))
    want = abs(np.linalg.det(cob.D_gamma)) / abs(np.linalg.det(M))
    assert math.exp(cob.log_abs_det) == pytest.approx(want, rel=1e-9)
