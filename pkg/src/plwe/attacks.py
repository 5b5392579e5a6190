"""Distinguishing attacks that work through evaluation at a root of f mod q.

Three attacks are provided:

* :func:`attack_alpha_one`: elimination when a root has a small integer
  image (alpha = 1 is the classic case), where e(alpha) is a short sum of
  small coefficients;
* :func:`attack_small_order`: the same elimination for a root of small
  multiplicative order, against the enumerated set of possible e(alpha);
* :func:`residue_distinguisher`: the statistical threshold test for any
  root, with its advantage from :func:`residue_advantage` and its
  success probabilities from :func:`success_probability`.

None of the attacks look at a batch's provenance or metadata.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import CapacityError, PreconditionError
from .modarith import element_order, minimal_residue, poly_eval
from .sampling import GaussianSpec, SampleBatch

SCHEMA = 1
VALUE_SET_BUDGET = 10**8
DISTINGUISHER_MAX_Q = 1 << 22
EXACT_BINOMIAL_LIMIT = 10**6


def _check_root(batch: SampleBatch, alpha: int) -> int:
    q = batch.ring.q
    alpha %= q
    if poly_eval(batch.ring.f_mod_q, alpha, q) != 0:
        raise PreconditionError("%d is not a root of f mod %d" % (alpha, q))
    return alpha


def _evaluations(batch: SampleBatch, alpha: int) -> list[tuple[int, int]]:
    q = batch.ring.q
    return [(poly_eval(s.a, alpha, q), poly_eval(s.b, alpha, q)) for s in batch.samples]


def _hit_mask(x: np.ndarray, q: int) -> np.ndarray:
    """True where the minimal residue of x (given in [0, q)) lies in [-q/4, q/4)."""
    m = np.where(x > (q - 1) // 2, x - q, x)
    return (4 * m >= -q) & (4 * m < q)


# ---------------------------------------------------------------------------
# elimination attacks


@dataclass(frozen=True)
class EliminationResult:
    """Outcome of an elimination run.

    ``surviving_guesses`` is None when no sample constrained the guess
    (every a(alpha) was zero), meaning all of F_q survives.
    """

    attack: str
    q: int
    surviving_guesses: frozenset | None
    samples_consumed: int
    verdict: str
    zero_samples: int = 0
    wall_time_ms: float = 0.0

    @property
    def survivor_count(self) -> int:
        return self.q if self.surviving_guesses is None else len(self.surviving_guesses)

    def to_json(self) -> dict:
        surv = None if self.surviving_guesses is None else [str(g) for g in sorted(self.surviving_guesses)]
        return {
            "schema": SCHEMA,
            "attack": self.attack,
            "verdict": self.verdict,
            "surviving": surv,
            "survivor_count": str(self.survivor_count),
            "samples_consumed": self.samples_consumed,
            "zero_samples": self.zero_samples,
            "wall_time_ms": self.wall_time_ms,
        }


def _eliminate(attack, batch, alpha, accept_vals, accept_test):
    """Shared elimination loop.

    ``accept_vals`` lists every accepted error value (as residues); it is
    only used to seed S from the first informative sample.  ``accept_test``
    maps an int64 array of residues to a boolean mask.
    """
    t0 = time.perf_counter()
    q = batch.ring.q
    S = None
    consumed = zeros = 0
    for A, Bv in _evaluations(batch, alpha):
        consumed += 1
        if A == 0:
            # carries no information about s(alpha); only b(alpha) itself is tested
            zeros += 1
            if not accept_test(np.array([Bv], dtype=np.int64))[0]:
                S = frozenset()
        elif S is None:
            inv = pow(A, -1, q)
            S = frozenset((Bv - e) * inv % q for e in accept_vals)
        else:
            g = list(S)
            keep = accept_test(np.array([(Bv - x * A) % q for x in g], dtype=np.int64))
            S = frozenset(x for x, k in zip(g, keep) if k)
        if S is not None and not S:
            break
    verdict = "uniform" if S is not None and not S else "valid"
    ms = (time.perf_counter() - t0) * 1e3
    return EliminationResult(attack, q, S, consumed, verdict, zeros, ms)


def default_threshold(n: int, spec: GaussianSpec) -> int:
    """The hard bound n*B on |e(1)|; no valid sample can exceed it."""
    return n * spec.bound


def attack_alpha_one(
    batch: SampleBatch,
    alpha: int = 1,
    threshold_t: int | None = None,
    spec: GaussianSpec | None = None,
) -> EliminationResult:
    """Eliminate guesses g for s(alpha) whose error b(alpha) - g a(alpha) is large.

    Every sample is processed; the run stops early only once no guess
    survives.  Either ``threshold_t`` or ``spec`` (giving t = n*B) is needed.
    """
    alpha = _check_root(batch, alpha)
    q = batch.ring.q
    if threshold_t is None:
        if spec is None:
            raise PreconditionError("give threshold_t or an error spec")
        threshold_t = default_threshold(batch.ring.n, spec)
    t = int(threshold_t)
    if t < 0:
        raise PreconditionError("threshold must be nonnegative")
    if 2 * t + 1 > 10**7:
        raise CapacityError("threshold too wide to enumerate", "use residue_distinguisher")
    half = (q - 1) // 2

    def test(x):
        return np.array([abs(v - q if v > half else v) <= t for v in x.tolist()], dtype=bool)

    vals = range(-min(t, half), min(t, half) + 1)
    return _eliminate("alpha_one", batch, alpha, vals, test)


@dataclass(frozen=True)
class ValueSet:
    """All residues sum_j alpha^j s_j with |s_j| <= class bound."""

    alpha: int
    r: int
    q: int
    bound_B: int
    class_bounds: tuple
    values: tuple
    mask: np.ndarray = field(repr=False, compare=False)

    def __contains__(self, x: int) -> bool:
        return bool(self.mask[int(x) % self.q])

    def __len__(self) -> int:
        return len(self.values)


def build_value_set(
    alpha: int,
    r: int,
    n: int,
    spec: GaussianSpec | None,
    q: int,
    *,
    bound: int | None = None,
    budget: int = VALUE_SET_BUDGET,
) -> ValueSet:
    """Enumerate the possible values of e(alpha) for a root of order r.

    The coefficient classes i = j mod r have sizes ceil(n/r) or floor(n/r),
    so class j is bounded by size_j * B with B the hard truncation bound.
    Passing ``bound`` fixes the same per-class bound for every class.
    """
    alpha %= q
    if r < 1 or pow(alpha, r, q) != 1:
        raise PreconditionError("alpha^%d is not 1 mod %d" % (r, q))
    if bound is None:
        if spec is None:
            raise PreconditionError("give an error spec or an explicit bound")
        bounds = tuple(len(range(j, n, r)) * spec.bound for j in range(r))
    else:
        bounds = (int(bound),) * r
    size = 1
    for b in bounds:
        size *= 2 * b + 1
        if size > budget:
            raise CapacityError(
                "value set enumeration exceeds %d candidates" % budget,
                "use the residue distinguisher (attack --residue)",
            )
    if q > 1 << 27:
        raise CapacityError("value set bitmap needs q <= 2^27", "use the residue distinguisher")
    mask = np.zeros(q, dtype=bool)
    mask[0] = True
    w = 1
    for b in bounds:
        acc = np.zeros(q, dtype=bool)
        for s in range(-b, b + 1):
            acc |= np.roll(mask, (s * w) % q)
        mask = acc
        w = w * alpha % q
    values = tuple(int(v) for v in np.flatnonzero(mask))
    return ValueSet(alpha, r, q, max(bounds) if bounds else 0, bounds, values, mask)


def attack_small_order(batch: SampleBatch, vset: ValueSet) -> EliminationResult:
    """Elimination against the stored list of possible e(alpha) values."""
    alpha = _check_root(batch, vset.alpha)
    if vset.q != batch.ring.q:
        raise PreconditionError("value set built for a different modulus")
    mask = vset.mask

    def test(x):
        return mask[np.asarray(x, dtype=np.int64)]

    return _eliminate("small_order", batch, alpha, vset.values, test)


# ---------------------------------------------------------------------------
# advantage of the statistical attack


@dataclass(frozen=True)
class ResidueAttackPlan:
    alpha: int
    r: int
    n: int
    q: int
    case_id: str
    sigma_bar: float
    sigma_tilde: float | None
    epsilon: float
    raw_epsilon: float
    N_wraps: float
    representative: int
    method: str
    flag: str | None = None

    def to_json(self) -> dict:
        return {
            "alpha": str(self.alpha),
            "r": self.r,
            "n": self.n,
            "q": str(self.q),
            "case": self.case_id,
            "representative": str(self.representative),
            "sigma_bar": self.sigma_bar,
            "sigma_tilde": self.sigma_tilde,
            "epsilon": self.epsilon,
            "raw_epsilon": self.raw_epsilon,
            "N_wraps": self.N_wraps,
            "method": self.method,
            "flag": self.flag,
        }


def _triangle(u, q):
    """int_0^u (hit(x) - 1/2) dx for u in [0, q), hit = x mod q in [-q/4, q/4)."""
    if u <= q / 4:
        return u / 2
    if u <= 3 * q / 4:
        return q / 8 - (u - q / 4) / 2
    return -q / 8 + (u - 3 * q / 4) / 2


def _hit_probability(sigma_bar, q: int, max_intervals: int = 10_000):
    """P(E | valid) for a half-normal of width sigma_bar truncated at 2*sigma_bar.

    Hit intervals are [0, q/4) and [3q/4 + kq, 5q/4 + kq); the last one
    reached is clamped at 2*sigma_bar.  Returns (probability - 1/2, method).
    """
    import mpmath as mp

    T = 2 * sigma_bar
    qq = mp.mpf(q)
    if T <= qq / 4:
        return mp.mpf("0.5"), "exact"
    Phi = lambda x: mp.ncdf(x / sigma_bar)  # noqa: E731
    total = Phi(T) - mp.mpf("0.5")
    count = int(mp.floor((T - 3 * qq / 4) / qq)) + 1 if T > 3 * qq / 4 else 0
    if count <= max_intervals:
        hit = Phi(qq / 4) - mp.mpf("0.5")
        for k in range(count):
            lo = 3 * qq / 4 + k * qq
            hi = min(lo + qq / 2, T)
            hit += Phi(hi) - Phi(lo)
        return hit / total - mp.mpf("0.5"), "interval-sum"
    # many wraps: the density is almost flat on each period, the full periods
    # cancel and only the clamped end survives
    u = float(mp.fmod(T, qq))
    s = _triangle(u, q)
    return mp.npdf(2) * s / (sigma_bar * (mp.ncdf(2) - mp.mpf("0.5"))), "asymptotic"


def residue_advantage(
    n: int,
    q: int,
    spec: GaussianSpec,
    alpha: int,
    r: int | None = None,
    *,
    r_max: int = 64,
    representative: str = "given",
) -> ResidueAttackPlan:
    """Advantage epsilon = P(E | valid) - 1/2 of the statistical attack at alpha.

    The case split is: integer representative +-1 (case one), order at most
    ``r_max`` (case two), anything else (case three).  With
    ``representative="given"`` the integer alpha is used as passed (so
    alpha = q - 1 is an order-two root with a huge representative); with
    ``"minimal"`` its minimal residue is used.
    """
    import mpmath as mp

    if q < 3:
        raise PreconditionError("q must be an odd prime")
    if r is None:
        r = element_order(alpha % q, q)
    if representative == "given":
        rep = int(alpha)
    elif representative == "minimal":
        rep = minimal_residue(alpha, q)
    else:
        raise PreconditionError("representative must be 'given' or 'minimal'")
    sigma = mp.mpf(spec.sigma)
    if abs(rep) == 1:
        case, sq, sigma_tilde = "one", None, None
    elif r <= r_max:
        case, sigma_tilde = "two", float(sigma * mp.sqrt(mp.mpf(n) / r))
        sq = (rep ** (2 * r) - 1) // (rep * rep - 1)
    else:
        case, sigma_tilde = "three", None
        sq = (rep ** (2 * n) - 1) // (rep * rep - 1)
    # enough digits to resolve 2*sigma_bar mod q
    digits = 40 + len(str(q)) + (int(sq.bit_length() * 0.30103) // 2 + 1 if sq is not None else 0)
    with mp.workdps(digits):
        if case == "one":
            sb = sigma * mp.sqrt(n)
        elif case == "two":
            sb = sigma * mp.sqrt(mp.mpf(n) / r * sq)
        else:
            sb = sigma * mp.sqrt(mp.mpf(sq))
        raw, method = _hit_probability(sb, q)
        n_wraps = (2 * sb - mp.mpf(q) / 2) / q
        raw_f = float(raw)
        sigma_bar = float(sb) if sb < mp.mpf("1e308") else math.inf
        n_wraps_f = float(n_wraps) if n_wraps < mp.mpf("1e308") else math.inf
    flag = None
    eps = raw_f
    if raw_f < 0:
        eps, flag = 0.0, "negative raw advantage floored at 0"
    eps = min(eps, 0.5)
    return ResidueAttackPlan(
        alpha % q, r, n, q, case, sigma_bar, sigma_tilde, eps, raw_f, max(n_wraps_f, 0.0), rep, method, flag
    )


def empirical_advantage(
    n: int,
    q: int,
    spec: GaussianSpec,
    alpha: int,
    trials: int = 100_000,
    seed: int = 0,
) -> dict:
    """Monte Carlo estimate of P(E | valid) - 1/2 with e(alpha) reduced mod q.

    Errors are drawn from the same truncated rounded law as the samplers.
    Returns the estimate and its standard error.
    """
    from .sampling import sample_error_vector

    rng = np.random.default_rng(seed)
    alpha %= q
    pw = [pow(alpha, j, q) for j in range(n)]
    hits = 0
    chunk = max(1, min(trials, 4096))
    done = 0
    while done < trials:
        m = min(chunk, trials - done)
        e = sample_error_vector(spec, m * n, rng).reshape(m, n)
        for row in e:
            v = sum(int(c) * w for c, w in zip(row, pw)) % q
            mres = v - q if v > (q - 1) // 2 else v
            hits += -q <= 4 * mres < q
        done += m
    p = hits / trials
    return {"epsilon": p - 0.5, "stderr": math.sqrt(p * (1 - p) / trials), "trials": trials}


# ---------------------------------------------------------------------------
# threshold distinguisher


@dataclass(frozen=True)
class DistinguisherRun:
    ell: int
    q: int
    threshold_N: int
    count_C: int
    verdict: str
    mode: str
    epsilon: float
    per_guess_max: int | None = None
    flag: str | None = None
    wall_time_ms: float = 0.0

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "attack": "residue",
            "mode": self.mode,
            "verdict": self.verdict,
            "epsilon": self.epsilon,
            "C": str(self.count_C),
            "N": str(self.threshold_N),
            "ell": self.ell,
            "per_guess_max": self.per_guess_max,
            "flag": self.flag,
            "wall_time_ms": self.wall_time_ms,
        }


def threshold_N(ell: int, q: int, epsilon: float) -> int:
    return math.ceil((ell * q + epsilon * ell) / 2)


def per_guess_threshold(ell: int, q: int, false_alarm: float = 0.01) -> int:
    """Smallest t with q * P(Bin(ell, 1/2) >= t) <= false_alarm."""
    from scipy.stats import binom

    for t in range(ell + 2):
        if q * binom.sf(t - 1, ell, 0.5) <= false_alarm:
            return t
    return ell + 1


def _guess_hits(evals, q, lo, hi):
    """Per-guess hit counts for guesses g in [lo, hi)."""
    g = np.arange(lo, hi, dtype=np.int64)
    counts = np.zeros(hi - lo, dtype=np.int64)
    for A, Bv in evals:
        counts += _hit_mask((Bv - g * A) % q, q)
    return counts


def residue_distinguisher(
    batch: SampleBatch,
    alpha: int,
    plan: ResidueAttackPlan,
    *,
    mode: str = "literal",
    workers: int = 1,
    chunk: int = 1 << 16,
    false_alarm: float = 0.01,
) -> DistinguisherRun:
    """Count hits of b_i(alpha) - g a_i(alpha) in [-q/4, q/4) over all guesses.

    ``mode="literal"`` aggregates C over every (sample, guess) pair and
    compares with N = ceil((ell q + eps ell)/2).  ``mode="per_guess"`` keeps
    one count per guess and answers G when some guess reaches a
    Bonferroni threshold at false-alarm rate ``false_alarm``.
    """
    t0 = time.perf_counter()
    alpha = _check_root(batch, alpha)
    q = batch.ring.q
    if q > DISTINGUISHER_MAX_Q:
        raise CapacityError(
            "guess space of size %d exceeds 2^22" % q,
            "run the scaled experiment: success-prob or epsilon at full size",
        )
    if mode not in ("literal", "per_guess"):
        raise PreconditionError("mode must be 'literal' or 'per_guess'")
    evals = _evaluations(batch, alpha)
    ell = len(evals)
    ranges = [(lo, min(lo + chunk, q)) for lo in range(0, q, chunk)]
    if workers > 1 and len(ranges) > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(lambda r: _guess_hits(evals, q, *r), ranges))
    else:
        parts = [_guess_hits(evals, q, *r) for r in ranges]
    counts = np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)
    C = int(counts.sum())
    flag = "no samples" if ell == 0 else None
    ms = (time.perf_counter() - t0) * 1e3
    if mode == "literal":
        N = threshold_N(ell, q, plan.epsilon)
        verdict = "G" if C >= N else "U"
        return DistinguisherRun(ell, q, N, C, verdict, mode, plan.epsilon, int(counts.max()) if ell else 0, flag, ms)
    t = per_guess_threshold(ell, q, false_alarm)
    top = int(counts.max()) if ell else 0
    verdict = "G" if ell and top >= t else "U"
    return DistinguisherRun(ell, q, t, C, verdict, mode, plan.epsilon, top, flag, ms)


def success_probability(ell: int, q: int, epsilon: float) -> dict:
    """Probabilities that the threshold test answers correctly.

    p_given_U = F(N-1; ell q, 1/2) and
    p_given_G = sum_i (1 - F(N-i-1; ell q - ell, 1/2)) B(i; ell, 1/2 + eps),
    with overall their mean.  Exact binomials are used while ell*q <= 10^6,
    and a continuity-corrected normal approximation beyond.

    Writing X ~ Bin(ell q - ell, 1/2), the gap p_given_G - (1 - p_given_U)
    equals sum_i (B(i; ell, 1/2+eps) - B(i; ell, 1/2)) P(N-i <= X < N), a sum
    of small point masses.  It is evaluated in that form so the advantage
    survives even when it is far below the rounding error of either CDF.
    """
    from scipy.special import ndtr
    from scipy.stats import binom, norm

    if not 0 <= epsilon <= 0.5:
        raise PreconditionError("epsilon must lie in [0, 1/2]")
    N = threshold_N(ell, q, epsilon)
    trials = ell * q
    m = trials - ell
    i = np.arange(ell + 1)
    dw = binom.pmf(i, ell, 0.5 + epsilon) - binom.pmf(i, ell, 0.5)
    k = np.arange(N - ell, N)  # X values that can matter
    if trials <= EXACT_BINOMIAL_LIMIT:
        method = "exact"
        p_u = float(binom.cdf(N - 1, trials, 0.5))
        pk = binom.pmf(k, m, 0.5)
    else:
        method = "normal"
        p_u = float(ndtr((N - 0.5 - trials / 2) / (math.sqrt(trials) / 2)))
        sd = math.sqrt(m) / 2
        pk = norm.pdf((k - m / 2) / sd) / sd
    # window[i] = P(N - i <= X <= N - 1)
    window = np.concatenate([[0.0], np.cumsum(pk[::-1])])
    gap = float(np.sum(dw * window))
    p_g = 1.0 - p_u + gap
    return {
        "ell": ell,
        "q": str(q),
        "epsilon": epsilon,
        "N": str(N),
        "p_given_U": p_u,
        "p_given_G": p_g,
        "overall": 0.5 + gap / 2,
        "advantage": gap / 2,
        "method": method,
    }


# ---------------------------------------------------------------------------
# smearing


def box_image(n: int, lo: int, hi: int, alpha: int, q: int) -> np.ndarray:
    """Image mask of {sum c_j alpha^j : lo <= c_j <= hi} under evaluation."""
    if q > 1 << 27:
        raise CapacityError("image bitmap needs q <= 2^27")
    if (hi - lo + 1) * n > 10**9 // max(q, 1) + 10**4:
        raise CapacityError("box too large to scan")
    mask = np.zeros(q, dtype=bool)
    mask[0] = True
    w = 1
    for _ in range(n):
        acc = np.zeros(q, dtype=bool)
        width = min(hi - lo + 1, q)
        for c in range(lo, lo + width):
            acc |= np.roll(mask, (c * w) % q)
        mask = acc
        w = w * alpha % q
        if mask.all():
            break
    return mask


def check_smearing(
    source: Iterable | tuple,
    alpha: int,
    q: int,
    *,
    budget: int = 10**7,
    sampled: bool = False,
) -> dict:
    """Does pi_alpha(S) cover F_q?

    ``source`` is either a finite iterable of ResiduePolynomial (or
    coefficient sequences), or a box ``("box", n, lo, hi)`` handled by a
    sumset scan.  With ``sampled=True`` the iterable is treated as a random
    stream and read until coverage or a coupon-collector cutoff of
    q (ln q + 10) draws, after which the chance of a miss is below e^-10.
    """
    alpha %= q
    if isinstance(source, tuple) and source and source[0] == "box":
        _, n, lo, hi = source
        mask = box_image(n, lo, hi, alpha, q)
        size = int(mask.sum())
        return {"smears": size == q, "image_size": size, "method": "box"}
    if q > 1 << 27:
        raise CapacityError("image bitmap needs q <= 2^27")
    seen = np.zeros(q, dtype=bool)
    size = 0
    limit = math.ceil(q * (math.log(q) + 10)) if sampled else budget
    count = 0
    for s in source:
        count += 1
        if count > limit:
            if sampled:
                break
            raise CapacityError("more than %d elements to enumerate" % budget, "pass a box description")
        coeffs = getattr(s, "coefficients", s)
        v = poly_eval(list(coeffs), alpha, q)
        if not seen[v]:
            seen[v] = True
            size += 1
            if size == q:
                break
    return {"smears": size == q, "image_size": size, "method": "sampled" if sampled else "enumerated"}


def report_json(result) -> str:
    return json.dumps(result.to_json(), indent=2)
