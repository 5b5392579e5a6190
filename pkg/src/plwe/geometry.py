"""Numerical geometry of Z[x]/(f): complex roots, the embedding theta,
spectral distortion, Mahler measure and the monogenic change of basis.

theta sends an element to (real embeddings, Re of one root per conjugate
pair, Im of the same roots), with no sqrt(2) weighting, so
|det M|^2 * 4^s2 = |disc f| for the power-basis matrix M.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import NumericError, PreconditionError
from .modarith import IntPolynomial, discriminant

SCHEMA = 1
DEFAULT_MAX_DEGREE = 128
LEHMER = IntPolynomial((1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1))


def _real_tol(z) -> float:
    return 1e-9 * (1 + abs(z))


@dataclass(frozen=True)
class RootSet:
    """Roots ordered as reals (descending), pair representatives (Im > 0), conjugates."""

    f: IntPolynomial
    roots: np.ndarray
    s1: int
    s2: int
    iterations: int

    @property
    def n(self) -> int:
        return self.s1 + 2 * self.s2

    @property
    def real_roots(self) -> np.ndarray:
        return self.roots[: self.s1].real

    @property
    def pair_roots(self) -> np.ndarray:
        return self.roots[self.s1 : self.s1 + self.s2]

    def residuals(self) -> np.ndarray:
        c = np.array([float(v) for v in self.f.coefficients[::-1]])
        return np.abs(np.polyval(c, self.roots))


def _horner(c_desc: np.ndarray, z: np.ndarray):
    p = np.full_like(z, c_desc[0])
    dp = np.zeros_like(z)
    for a in c_desc[1:]:
        dp = dp * z + p
        p = p * z + a
    return p, dp


def complex_roots(
    f: IntPolynomial,
    *,
    max_iter: int = 500,
    tol: float = 1e-15,
    seed: int = 1,
    check_squarefree: bool = True,
) -> RootSet:
    """All complex roots by Aberth-Ehrlich iteration, then Newton polishing.

    The start points lie on a circle of the Cauchy-bound radius with a
    fixed angular offset and a small seeded perturbation, which keeps the
    iteration deterministic.
    """
    n = f.degree
    if n < 1:
        raise PreconditionError("polynomial must have degree at least 1")
    if check_squarefree and n > 1 and discriminant(f) == 0:
        raise PreconditionError("polynomial has a repeated root")
    lead = f.leading
    c = np.array([v / lead for v in f.coefficients[::-1]], dtype=complex)
    if n == 1:
        z = np.array([-c[1]])
        iters = 0
    else:
        radius = max(abs(c[k]) ** (1.0 / k) for k in range(1, n + 1))
        radius = max(radius, 1e-3)
        rng = np.random.default_rng(seed)
        ang = 2 * np.pi * np.arange(n) / n + 0.4 + 1e-3 * rng.standard_normal(n)
        z = radius * np.exp(1j * ang)
        converged = False
        for iters in range(1, max_iter + 1):
            p, dp = _horner(c, z)
            with np.errstate(divide="ignore", invalid="ignore"):
                w = p / dp
                diff = z[:, None] - z[None, :]
                np.fill_diagonal(diff, 1.0)
                inv = 1.0 / diff
                np.fill_diagonal(inv, 0.0)
                corr = w / (1 - w * inv.sum(axis=1))
            corr = np.where(np.isfinite(corr), corr, 0.0)
            z = z - corr
            if np.all(np.abs(corr) <= tol * (1 + np.abs(z))):
                converged = True
                break
        for _ in range(2):
            p, dp = _horner(c, z)
            step = np.where(dp != 0, p / np.where(dp != 0, dp, 1), 0)
            z = z - step
        if not converged:
            # steps can stall at rounding level for large coefficients; accept
            # when every root is exact for a nearby polynomial
            p, _ = _horner(c, z)
            scale, _ = _horner(np.abs(c), np.abs(z).astype(complex))
            if not np.all(np.abs(p) <= 1e3 * n * np.finfo(float).eps * scale.real):
                raise NumericError("root finding did not converge in %d iterations" % max_iter)
    # classify and order
    real = [float(v.real) for v in z if abs(v.imag) <= _real_tol(v)]
    upper = [v for v in z if v.imag > _real_tol(v)]
    lower = [v for v in z if v.imag < -_real_tol(v)]
    if len(upper) != len(lower):
        raise NumericError("could not pair complex-conjugate roots")
    upper.sort(key=lambda v: (v.real, v.imag))
    conj = []
    remaining = list(lower)
    for u in upper:
        k = min(range(len(remaining)), key=lambda j: abs(remaining[j] - u.conjugate()))
        remaining.pop(k)
        # the representative's exact conjugate keeps the pairing invariant exact
        conj.append(u.conjugate())
    real.sort(reverse=True)
    roots = np.array([complex(v) for v in real] + upper + conj, dtype=complex)
    return RootSet(f, roots, len(real), len(upper), iters)


def embedding_matrix(rs: RootSet) -> np.ndarray:
    """M with column i equal to theta(alpha^i)."""
    n, s1, s2 = rs.n, rs.s1, rs.s2
    M = np.empty((n, n))
    re = rs.real_roots
    pr = rs.pair_roots
    for i in range(n):
        M[:s1, i] = re**i
        pw = pr**i
        M[s1 : s1 + s2, i] = pw.real
        M[s1 + s2 :, i] = pw.imag
    return M


def _power_norm(apply, n: int, seed: int, restarts: int = 3, tol: float = 1e-12, max_iter: int = 5000):
    """Largest singular value of a linear map given by ``apply(v) = A^T A v``.

    Returns (value, agreed) where ``agreed`` says whether the restarts
    agree to 1e-9 relative and all converged.
    """
    rng = np.random.default_rng(seed)
    vals = []
    ok = True
    for _ in range(restarts):
        v = rng.standard_normal(n)
        v /= np.linalg.norm(v)
        lam = 0.0
        done = False
        for _ in range(max_iter):
            w = apply(v)
            new = float(v @ w)
            nw = np.linalg.norm(w)
            if nw == 0:
                break
            v = w / nw
            if abs(new - lam) <= tol * abs(new):
                lam = new
                done = True
                break
            lam = new
        ok &= done
        vals.append(math.sqrt(max(lam, 0.0)))
    top = max(vals)
    agreed = ok and (max(vals) - min(vals)) <= 1e-9 * top
    return top, agreed


@dataclass(frozen=True)
class EmbeddingReport:
    """Geometry of the power basis under theta.

    ``distortion`` is ||M^-1||_2 * |det M|^(1/n), the power-basis distortion
    measured through the inverse map; ``forward_distortion`` is
    ||M||_2 / |det M|^(1/n).
    """

    f: IntPolynomial
    s1: int
    s2: int
    M: np.ndarray
    spectral_norm: float
    inverse_spectral_norm: float
    log_abs_det: float
    distortion: float
    forward_distortion: float
    mahler: float
    condition_number: float
    norm_method: str

    @property
    def abs_det(self) -> float:
        return math.exp(self.log_abs_det)

    @property
    def n(self) -> int:
        return self.s1 + 2 * self.s2

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "f": self.f.to_json(),
            "s1": self.s1,
            "s2": self.s2,
            "spectral_norm": self.spectral_norm,
            "inverse_spectral_norm": self.inverse_spectral_norm,
            "abs_det": self.abs_det,
            "log_abs_det": self.log_abs_det,
            "distortion": self.distortion,
            "forward_distortion": self.forward_distortion,
            "mahler": self.mahler,
            "condition_number": self.condition_number,
            "norm_method": self.norm_method,
        }


def spectral_distortion(
    f: IntPolynomial, *, max_degree: int = DEFAULT_MAX_DEGREE, seed: int = 7, roots: RootSet | None = None
) -> EmbeddingReport:
    """Embedding matrix, norms, determinant and distortion for f.

    Norms come from power iteration (three seeded restarts); when the
    restarts do not agree the LAPACK SVD value is used instead and
    ``norm_method`` says so.  The determinant is taken from an LU
    factorisation in log space.
    """
    import scipy.linalg as sla

    if f.degree > max_degree:
        raise PreconditionError("degree %d above the cap %d (raise max_degree to override)" % (f.degree, max_degree))
    rs = roots if roots is not None else complex_roots(f)
    M = embedding_matrix(rs)
    n = rs.n
    sign, logdet = np.linalg.slogdet(M)
    if sign == 0 or not np.isfinite(logdet):
        raise NumericError("embedding matrix is singular")
    lu = sla.lu_factor(M)
    MtM = M.T @ M
    fwd, ok1 = _power_norm(lambda v: MtM @ v, n, seed)
    inv, ok2 = _power_norm(lambda v: sla.lu_solve(lu, sla.lu_solve(lu, v, trans=1)), n, seed + 1)
    method = "power"
    if not (ok1 and ok2):
        sv = np.linalg.svd(M, compute_uv=False)
        fwd, inv = float(sv[0]), float(1 / sv[-1])
        method = "svd"
    scale = math.exp(logdet / n)
    return EmbeddingReport(
        f=f,
        s1=rs.s1,
        s2=rs.s2,
        M=M,
        spectral_norm=fwd,
        inverse_spectral_norm=inv,
        log_abs_det=float(logdet),
        distortion=inv * scale,
        forward_distortion=fwd / scale,
        mahler=mahler_measure(f, roots=rs),
        condition_number=fwd * inv,
        norm_method=method,
    )


def mahler_measure(f: IntPolynomial, *, roots: RootSet | None = None) -> float:
    """|lead| times the product of root moduli at least 1, summed in log space."""
    rs = roots if roots is not None else complex_roots(f)
    mods = np.abs(rs.roots)
    return math.exp(math.log(abs(f.leading)) + float(np.sum(np.log(np.maximum(mods, 1.0)))))


@dataclass(frozen=True)
class ChangeOfBasis:
    N_alpha: np.ndarray
    D_gamma: np.ndarray
    normalized_spectral_norm: float
    log_abs_det: float


def change_of_basis_monogenic(f: IntPolynomial, *, roots: RootSet | None = None) -> ChangeOfBasis:
    """N_alpha = D_gamma M^-1 with gamma = 1/f'(alpha).

    D_gamma is multiplication by gamma in theta coordinates: a scalar on
    each real coordinate and a rotation-scaling on each (Re, Im) pair.
    """
    rs = roots if roots is not None else complex_roots(f)
    n, s1, s2 = rs.n, rs.s1, rs.s2
    df = np.array([float(v) for v in f.derivative().coefficients[::-1]])
    gam = 1.0 / np.polyval(df, rs.roots)
    D = np.zeros((n, n))
    for j in range(s1):
        D[j, j] = gam[j].real
    for k in range(s2):
        g = gam[s1 + k]
        a, b = s1 + k, s1 + s2 + k
        D[a, a], D[a, b] = g.real, -g.imag
        D[b, a], D[b, b] = g.imag, g.real
    M = embedding_matrix(rs)
    N = D @ np.linalg.inv(M)
    sign, logdet = np.linalg.slogdet(N)
    norm = float(np.linalg.norm(N, 2))
    return ChangeOfBasis(N, D, norm / math.exp(logdet / n), float(logdet))


def disc_check(f: IntPolynomial, report: EmbeddingReport | None = None) -> tuple[float, int]:
    """(|det M|^2 4^s2 in log space, exact |disc f|) for cross-checking."""
    rep = report if report is not None else spectral_distortion(f)
    return 2 * rep.log_abs_det + rep.s2 * math.log(4), abs(discriminant(f))


def polynomial_family(coeff_lists: Sequence[Sequence[int]]) -> list[EmbeddingReport]:
    return [spectral_distortion(IntPolynomial(tuple(c))) for c in coeff_lists]
