"""Construction of PLWE parameter sets with a small root of small order.

The search starts from the desired multiplicative order r, looks for a prime
q = Phi_r(a) of the requested size, and then builds a monic polynomial that
splits mod q over a chosen set of small residues including a.
"""

from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from .errors import PreconditionError, SearchExhausted
from .modarith import (
    IntPolynomial,
    RingSpec,
    element_order,
    factorint,
    find_roots_mod_q,
    has_exact_order,
    irreducibility_check,
    is_prime,
    minimal_residue,
    poly_eval,
)

log = logging.getLogger(__name__)

__all__ = [
    "cyclotomic_poly",
    "euler_phi",
    "is_prime",
    "VulnerableInstance",
    "find_vulnerable_params",
    "split_polynomial",
    "OrderSearchResult",
    "smallest_residue_of_order",
    "verify_nrq_bound",
    "audit_conditions",
]


def euler_phi(r: int) -> int:
    out = r
    for p in factorint(r):
        out = out // p * (p - 1)
    return out


def _divide_monic(num: list[int], den: Sequence[int]) -> list[int]:
    num = list(num)
    d = len(den) - 1
    quo = [0] * (len(num) - d)
    for i in range(len(num) - 1, d - 1, -1):
        c = num[i]
        quo[i - d] = c
        if c:
            for j in range(d + 1):
                num[i - d + j] -= c * den[j]
    if any(num[:d]):
        raise ArithmeticError("division left a remainder")
    return quo


@lru_cache(maxsize=None)
def _cyclotomic_coeffs(r: int) -> tuple[int, ...]:
    num = [-1] + [0] * (r - 1) + [1]
    for d in range(1, r):
        if r % d == 0:
            num = _divide_monic(num, _cyclotomic_coeffs(d))
    return tuple(num)


def cyclotomic_poly(r: int) -> IntPolynomial:
    """Phi_r, obtained by dividing x^r - 1 by Phi_d for every proper divisor d."""
    if r < 1:
        raise PreconditionError("r must be positive")
    return IntPolynomial(_cyclotomic_coeffs(r))


# ---------------------------------------------------------------------------
# Algorithm: vulnerable parameter search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VulnerableInstance:
    f: IntPolynomial
    q: int
    a: int
    r: int
    i_used: int
    split_roots: tuple[int, ...]
    fallback: bool = False
    relaxed_bits: bool = False
    certificate: str = "irreducible"

    @property
    def n(self) -> int:
        return self.f.degree

    def ring(self) -> RingSpec:
        if self.fallback:
            raise PreconditionError("the (x-a)^n + q fallback does not split mod q")
        return RingSpec(self.f, self.q, tuple(s % self.q for s in self.split_roots))

    def to_json(self) -> dict:
        d = {
            "f": self.f.to_json(),
            "q": str(self.q),
            "roots": sorted({str(s % self.q) for s in self.split_roots}, key=int),
            "a": str(self.a),
            "r": self.r,
            "i": self.i_used,
            "split_residues": [str(s) for s in self.split_roots],
            "fallback": self.fallback,
            "relaxed_bits": self.relaxed_bits,
        }
        return d

    @classmethod
    def from_json(cls, data: dict) -> "VulnerableInstance":
        return cls(
            f=IntPolynomial.from_json(data["f"]),
            q=int(data["q"]),
            a=int(data["a"]),
            r=int(data["r"]),
            i_used=int(data["i"]),
            split_roots=tuple(int(s) for s in data.get("split_residues", data["roots"])),
            fallback=bool(data.get("fallback", False)),
            relaxed_bits=bool(data.get("relaxed_bits", False)),
        )

    def verify(self) -> None:
        """Re-check every invariant; raises AssertionError on violation."""
        q = self.q
        fq = self.f.mod(q)
        assert poly_eval(fq, self.a, q) == 0, "a is not a root of f mod q"
        assert element_order(self.a, q) == self.r, "a does not have exact order r"
        assert self.f.is_monic()
        if not self.fallback:
            assert len({s % q for s in self.split_roots}) == self.f.degree
            for s in self.split_roots:
                assert poly_eval(fq, s % q, q) == 0, "f does not vanish at %d" % s
        assert self.certificate == "irreducible"


def _first_a_reaching(r: int, bound: int) -> int:
    """Smallest a >= 1 with Phi_r(a) >= bound (Phi_r increases on [1, inf))."""
    phi = cyclotomic_poly(r)
    lo, hi = 1, 2
    while phi(hi) < bound:
        hi *= 2
    while lo < hi:
        mid = (lo + hi) // 2
        if phi(mid) >= bound:
            hi = mid
        else:
            lo = mid + 1
    return lo


def _scan_prime_value(r: int, lo_bits: int, hi_bits: int, a_limit: int) -> tuple[int, int] | None:
    phi = cyclotomic_poly(r)
    r_primes = list(factorint(r))
    a = _first_a_reaching(r, 1 << lo_bits)
    while a <= a_limit:
        v = phi(a)
        if v >= 1 << hi_bits:
            return None
        if is_prime(v) and v > 2 and has_exact_order(a, r, v, r_primes):
            return a, v
        a += 1
    return None


def default_residues(a: int, n: int, q: int) -> list[int]:
    """a together with the n - 1 nonzero residues of least absolute value."""
    out = [a]
    seen = {a % q}
    k = 1
    while len(out) < n:
        for s in (k, -k):
            if len(out) < n and s % q not in seen:
                out.append(s)
                seen.add(s % q)
        k += 1
        if k > q:
            raise PreconditionError("n exceeds the number of residues mod q")
    return out


def split_polynomial(
    q: int, residues: Sequence[int], i_budget: int = 10_000, start_i: int = 1
) -> tuple[IntPolynomial, int]:
    """Smallest i >= start_i with prod (x - s) + q*i certified irreducible."""
    base = IntPolynomial.from_roots(residues)
    for i in range(start_i, start_i + i_budget):
        f = base + q * i
        verdict = irreducibility_check(f)
        if verdict == "irreducible":
            return f, i
        log.debug("i=%d rejected (%s)", i, verdict)
    raise SearchExhausted("no certified irreducible polynomial within %d values of i" % i_budget)


def find_vulnerable_params(
    r: int,
    n: int,
    q0: int,
    rng: random.Random | None = None,
    *,
    fallback: bool = False,
    residues: Sequence[int] | None = None,
    i_budget: int = 10_000,
) -> VulnerableInstance:
    """Search for (f, q, a) with f(a) = 0 mod q, a of order r, f split mod q.

    q is the first prime value Phi_r(a), a = 1, 2, ..., lying in
    [2^q0, 2^(q0+1)).  If the values overshoot that window before a prime
    appears, the window is widened to [2^(q0-1), 2^(q0+2)) and the result is
    flagged ``relaxed_bits``.  ``rng`` is accepted for interface symmetry; the
    construction itself is deterministic.
    """
    if r <= 2:
        raise PreconditionError("the order r must exceed 2")
    if n < 1:
        raise PreconditionError("degree must be at least 1")
    if q0 <= math.log2(n):
        raise PreconditionError("q0 must exceed log2(n)")
    s = euler_phi(r)
    a_limit = 1 << (-(-q0 // s) + 8)
    relaxed = False
    found = _scan_prime_value(r, q0, q0 + 1, a_limit)
    if found is None:
        relaxed = True
        found = _scan_prime_value(r, max(q0 - 1, 2), q0 + 2, a_limit)
        if found is None:
            raise SearchExhausted("no prime value Phi_%d(a) of about %d bits with a <= %d" % (r, q0, a_limit))
        log.warning("accepted q outside [2^%d, 2^%d)", q0, q0 + 1)
    a, q = found
    S = list(residues) if residues is not None else default_residues(a, n, q)
    if len(S) != n or a not in S:
        raise PreconditionError("the residue set must have n elements and contain a")
    try:
        f, i = split_polynomial(q, S, i_budget)
        inst = VulnerableInstance(f, q, a, r, i, tuple(S), relaxed_bits=relaxed)
    except SearchExhausted:
        if not fallback:
            raise
        # (x - a)^n + q is Eisenstein at q, hence irreducible, but it has
        # only the single root a mod q
        log.warning("no split polynomial certified; using (x-a)^n + q")
        f = IntPolynomial.from_roots([a] * n) + q
        inst = VulnerableInstance(f, q, a, r, 0, (a,) * n, fallback=True, relaxed_bits=relaxed)
    inst.verify()
    return inst


# ---------------------------------------------------------------------------
# smallest residue of a given order
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OrderSearchResult:
    r: int
    q: int
    n_rq: int
    phi_r: int
    lower_bound: float
    is_minimal: bool


def smallest_residue_of_order(r: int, q: int) -> OrderSearchResult:
    """Scan 1, -1, 2, -2, ... for the first residue of exact order r mod q."""
    if r <= 2:
        raise PreconditionError("r must exceed 2")
    if (q - 1) % r:
        raise PreconditionError("no element of order %d exists mod %d" % (r, q))
    r_primes = list(factorint(r))
    phi = euler_phi(r)
    cyc = cyclotomic_poly(r)
    for k in range(1, q // 2 + 1):
        for x in (k, -k):
            if has_exact_order(x % q, r, q, r_primes):
                return OrderSearchResult(
                    r=r,
                    q=q,
                    n_rq=x,
                    phi_r=phi,
                    lower_bound=(q / phi) ** (1.0 / phi),
                    is_minimal=abs(cyc(x)) == q,
                )
    raise AssertionError("unreachable: an element of order r exists")


def nrq_bound_applies(r: int) -> bool:
    primes = list(factorint(r))
    return r > 2 and len(primes) <= 2 and all(p % 2 for p in primes)


def verify_nrq_bound(result: OrderSearchResult) -> bool | None:
    """Check |n_rq| >= (q/phi(r))^(1/phi(r)).

    Returns None when r does not have at most two distinct prime factors,
    all odd, which is where the bound is known to hold.
    """
    if not nrq_bound_applies(result.r):
        return None
    # compare |n|^phi * phi >= q exactly instead of via floating roots
    return abs(result.n_rq) ** result.phi_r * result.phi_r >= result.q


# ---------------------------------------------------------------------------
# vulnerability audit
# ---------------------------------------------------------------------------


@dataclass
class AuditReport:
    n: int
    q: int
    conditions: dict = field(default_factory=dict)
    roots: list = field(default_factory=list)
    best_root: int | None = None
    best_epsilon: float | None = None
    distortion: float | None = None

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "q": str(self.q),
            "conditions": self.conditions,
            "roots": self.roots,
            "best_root": None if self.best_root is None else str(self.best_root),
            "best_epsilon": self.best_epsilon,
            "distortion": self.distortion,
        }


def audit_conditions(
    ring: RingSpec,
    spec,
    r_max: int = 64,
    distortion_cap: float = 2.0,
    small_residue_bound: int = 1 << 16,
    max_geometry_degree: int = 128,
) -> AuditReport:
    """Check the decidable vulnerability conditions for a split ring.

    Conditions that need the maximal order or the Galois group (Galois,
    monogenic, q not dividing the index) are reported as not decided.
    """
    from .attacks import residue_advantage
    from .geometry import spectral_distortion

    q, n = ring.q, ring.n
    rep = AuditReport(n=n, q=q)
    fac = factorint(q - 1)
    best = None
    for root in ring.roots:
        order = element_order(root, q, fac)
        mres = minimal_residue(root, q)
        plan = residue_advantage(n, q, spec, root, order, r_max=r_max, representative="minimal")
        info = {
            "root": str(root),
            "minimal_residue": str(mres),
            "order": order,
            "case": plan.case_id,
            "epsilon": plan.epsilon,
        }
        rep.roots.append(info)
        if best is None or plan.epsilon > best[1]:
            best = (root, plan.epsilon)
    rep.best_root, rep.best_epsilon = best
    orders = [r["order"] for r in rep.roots]
    small = [r for r in rep.roots if abs(int(r["minimal_residue"])) <= small_residue_bound]
    if n <= max_geometry_degree:
        rep.distortion = spectral_distortion(ring.f).distortion
        dist_ok = rep.distortion <= distortion_cap
    else:
        dist_ok = "not computed (degree %d above cap %d)" % (n, max_geometry_degree)
    rep.conditions = {
        "galois": "not decided",
        "splits_completely": len(ring.roots) == n,
        "index_coprime_to_q": "not decided",
        "monogenic": "not decided",
        "distortion_below_cap": dist_ok,
        "root_one": poly_eval(ring.f_mod_q, 1, q) == 0,
        "small_order_root": any(o <= r_max for o in orders),
        "small_residue_root": bool(small),
        "q_bits": q.bit_length(),
    }
    return rep
