"""Exact arithmetic over Z, F_q and F_q[x]/(f).

Residues are stored in ``[0, q)``.  The signed "minimal residue" view is
computed on demand with :func:`minimal_residue`.

Polynomials over a field are plain lists of ints, constant term first, with
no trailing zeros (the zero polynomial is ``[]``).
"""

from __future__ import annotations

import json
import math
import random
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import CapacityError, DomainError, PreconditionError

# ---------------------------------------------------------------------------
# scalars
# ---------------------------------------------------------------------------


def mod_op(x: int, y: int, q: int, kind: str) -> int:
    """Apply ``kind`` (add, sub, mul, pow or inv) to residues mod ``q``.

    For ``inv`` the second operand is ignored.
    """
    if kind == "add":
        return (x + y) % q
    if kind == "sub":
        return (x - y) % q
    if kind == "mul":
        return (x * y) % q
    if kind == "pow":
        if y < 0:
            raise DomainError("negative exponent")
        return pow(x, y, q)
    if kind == "inv":
        if x % q == 0:
            raise DomainError("0 has no inverse mod %d" % q)
        return pow(x, -1, q)
    raise ValueError("unknown operation %r" % kind)


def minimal_residue(x: int, q: int) -> int:
    """Representative of ``x`` mod ``q`` of smallest absolute value."""
    x %= q
    return x if x <= (q - 1) // 2 else x - q


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
# the first 13 prime bases are a deterministic witness set below this bound
_MR_DETERMINISTIC_LIMIT = 3317044064679887385961981


def _mr_round(m: int, d: int, s: int, a: int) -> bool:
    x = pow(a, d, m)
    if x == 1 or x == m - 1:
        return True
    for _ in range(s - 1):
        x = x * x % m
        if x == m - 1:
            return True
    return False


def is_prime(m: int, rng: random.Random | None = None) -> bool:
    """Miller-Rabin primality test.

    Deterministic for ``m < 3.3e24``; above that 64 random bases are used,
    giving error probability below ``4**-64``.
    """
    if m < 2:
        return False
    for p in _MR_BASES:
        if m % p == 0:
            return m == p
    d, s = m - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    if m < _MR_DETERMINISTIC_LIMIT:
        bases: Iterable[int] = _MR_BASES
    else:
        rng = rng or random.Random(m)
        bases = [rng.randrange(2, m - 1) for _ in range(64)]
    return all(_mr_round(m, d, s, a) for a in bases)


def check_prime_modulus(q: int) -> int:
    q = int(q)
    if not (2 < q < 2**63) or not is_prime(q):
        raise DomainError("q must be a prime with 2 < q < 2^63, got %d" % q)
    return q


def _pollard_brent(m: int, rng: random.Random, budget: int) -> int | None:
    if m % 2 == 0:
        return 2
    y, c, g, r, qq = rng.randrange(1, m), rng.randrange(1, m), 1, 1, 1
    x = ys = y
    spent = 0
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % m
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(128, r - k)):
                y = (y * y + c) % m
                qq = qq * abs(x - y) % m
            g = math.gcd(qq, m)
            k += 128
        r *= 2
        spent += r
        if spent > budget:
            return None
    if g == m:
        while True:
            ys = (ys * ys + c) % m
            g = math.gcd(abs(x - ys), m)
            if g > 1:
                break
    return g if g != m else None


def factorint(m: int, budget: int = 2_000_000, seed: int = 0) -> dict[int, int]:
    """Prime factorisation by trial division to 10^6 followed by Pollard rho.

    Raises :class:`CapacityError` when a cofactor resists ``budget`` rho
    iterations.
    """
    if m < 1:
        raise DomainError("factorint expects a positive integer")
    out: dict[int, int] = {}
    for p in (2, 3, 5):
        while m % p == 0:
            out[p] = out.get(p, 0) + 1
            m //= p
    p, step = 7, 4
    steps = (4, 2, 4, 2, 4, 6, 2, 6)
    i = 0
    while p * p <= m and p < 10**6:
        while m % p == 0:
            out[p] = out.get(p, 0) + 1
            m //= p
        p += steps[i]
        i = (i + 1) % 8
    rng = random.Random(seed)
    stack = [m] if m > 1 else []
    while stack:
        c = stack.pop()
        if c == 1:
            continue
        if is_prime(c):
            out[c] = out.get(c, 0) + 1
            continue
        r = math.isqrt(c)
        if r * r == c:
            stack += [r, r]
            continue
        for _ in range(8):
            d = _pollard_brent(c, rng, budget)
            if d is not None and 1 < d < c:
                stack += [d, c // d]
                break
        else:
            raise CapacityError("could not factor %d within the rho budget" % c)
    return dict(sorted(out.items()))


def element_order(alpha: int, q: int, factors: dict[int, int] | None = None) -> int:
    """Exact multiplicative order of ``alpha`` modulo the prime ``q``."""
    alpha %= q
    if alpha == 0:
        raise DomainError("0 has no multiplicative order")
    if factors is None:
        factors = factorint(q - 1)
    r = q - 1
    for p in factors:
        while r % p == 0 and pow(alpha, r // p, q) == 1:
            r //= p
    return r


def has_exact_order(x: int, r: int, q: int, r_primes: Iterable[int]) -> bool:
    if pow(x, r, q) != 1:
        return False
    return all(pow(x, r // p, q) != 1 for p in r_primes)


# ---------------------------------------------------------------------------
# integer polynomials
# ---------------------------------------------------------------------------


def _trim(c: list[int]) -> list[int]:
    while c and c[-1] == 0:
        c.pop()
    return c


def _kronecker_mul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    """Signed integer polynomial product via one big-integer multiplication."""
    bits = max(abs(v) for v in a).bit_length() + max(abs(v) for v in b).bit_length()
    k = bits + min(len(a), len(b)).bit_length() + 2

    def pack(c, lo, hi):
        if hi - lo == 1:
            return c[lo]
        mid = (lo + hi) // 2
        return pack(c, lo, mid) + (pack(c, mid, hi) << (k * (mid - lo)))

    prod = pack(a, 0, len(a)) * pack(b, 0, len(b))
    out = [0] * (len(a) + len(b) - 1)

    def unpack(v, lo, hi):
        if hi - lo == 1:
            out[lo] = v
            return
        mid = (lo + hi) // 2
        w = k * (mid - lo)
        low = v & ((1 << w) - 1)
        if low >> (w - 1):
            low -= 1 << w
        unpack(low, lo, mid)
        unpack((v - low) >> w, mid, hi)

    unpack(prod, 0, len(out))
    return out


def int_poly_mul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    if not a or not b:
        return []
    if min(len(a), len(b)) <= 16:
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return _trim(out)
    return _trim(_kronecker_mul(a, b))


@dataclass(frozen=True)
class IntPolynomial:
    """Polynomial with arbitrary-precision integer coefficients, constant first."""

    coefficients: tuple[int, ...]

    def __post_init__(self):
        c = _trim([int(v) for v in self.coefficients])
        object.__setattr__(self, "coefficients", tuple(c))

    @classmethod
    def from_roots(cls, roots: Sequence[int]) -> "IntPolynomial":
        """Monic polynomial prod (x - r), built with a balanced product tree."""
        layer = [[-int(r), 1] for r in roots] or [[1]]
        while len(layer) > 1:
            layer = [
                int_poly_mul(layer[i], layer[i + 1]) if i + 1 < len(layer) else layer[i]
                for i in range(0, len(layer), 2)
            ]
        return cls(tuple(layer[0]))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def leading(self) -> int:
        return self.coefficients[-1] if self.coefficients else 0

    def is_monic(self) -> bool:
        return self.leading == 1

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def __add__(self, other: "IntPolynomial | int") -> "IntPolynomial":
        if isinstance(other, int):
            other = IntPolynomial((other,))
        a, b = list(self.coefficients), other.coefficients
        if len(a) < len(b):
            a += [0] * (len(b) - len(a))
        for i, v in enumerate(b):
            a[i] += v
        return IntPolynomial(tuple(a))

    def __neg__(self) -> "IntPolynomial":
        return IntPolynomial(tuple(-c for c in self.coefficients))

    def __sub__(self, other: "IntPolynomial | int") -> "IntPolynomial":
        return self + (-other)

    def __mul__(self, other: "IntPolynomial | int") -> "IntPolynomial":
        if isinstance(other, int):
            return IntPolynomial(tuple(other * c for c in self.coefficients))
        return IntPolynomial(tuple(int_poly_mul(self.coefficients, other.coefficients)))

    __rmul__ = __mul__

    def derivative(self) -> "IntPolynomial":
        return IntPolynomial(tuple(i * c for i, c in enumerate(self.coefficients))[1:])

    def taylor_shift(self, a: int) -> "IntPolynomial":
        """Coefficients of f(x + a)."""
        c = list(self.coefficients)
        n = len(c)
        for i in range(n):
            for j in range(n - 2, i - 1, -1):
                c[j] += a * c[j + 1]
        return IntPolynomial(tuple(c))

    def mod(self, q: int) -> list[int]:
        return _trim([c % q for c in self.coefficients])

    def to_json(self) -> list[str]:
        return [str(c) for c in self.coefficients]

    @classmethod
    def from_json(cls, data: Sequence) -> "IntPolynomial":
        return cls(tuple(int(v) for v in data))

    def __str__(self) -> str:
        return format_polynomial(self)


_TERM = re.compile(r"([+-]?)(\d*)(\*?)(x(?:\^(\d+))?)?")


def parse_polynomial(text: str) -> IntPolynomial:
    """Parse the inline grammar used on the command line, e.g. ``x^4+1``.

    Grammar (whitespace ignored)::

        poly  = term { ("+" | "-") term } ;
        term  = [ "-" ] ( int [ ["*"] mono ] | mono ) ;
        mono  = "x" [ "^" int ] ;
        int   = digit { digit } ;
    """
    s = re.sub(r"\s+", "", text)
    if not s:
        raise ValueError("empty polynomial")
    coeffs: dict[int, int] = {}
    pos = 0
    while pos < len(s):
        m = _TERM.match(s, pos)
        if m is None or m.end() == pos:
            raise ValueError("cannot parse polynomial near %r" % s[pos:])
        sign, digits, star, mono, power = m.groups()
        if pos > 0 and not sign:
            raise ValueError("missing operator near %r" % s[pos:])
        if not digits and not mono:
            raise ValueError("dangling sign near %r" % s[pos:])
        if star and not (digits and mono):
            raise ValueError("misplaced '*' near %r" % s[pos:])
        c = int(digits) if digits else 1
        if sign == "-":
            c = -c
        e = 0 if not mono else (int(power) if power is not None else 1)
        coeffs[e] = coeffs.get(e, 0) + c
        pos = m.end()
    deg = max(coeffs)
    return IntPolynomial(tuple(coeffs.get(i, 0) for i in range(deg + 1)))


def format_polynomial(f: IntPolynomial) -> str:
    parts = []
    for e in range(f.degree, -1, -1):
        c = f.coefficients[e]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if e == 0:
            body = str(a)
        else:
            mono = "x" if e == 1 else "x^%d" % e
            body = mono if a == 1 else "%d*%s" % (a, mono)
        parts.append((sign, body))
    if not parts:
        return "0"
    head = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    return head + "".join(sign + body for sign, body in parts[1:])


# ---------------------------------------------------------------------------
# F_q[x]
# ---------------------------------------------------------------------------


def pmul(a: list[int], b: list[int], q: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim([v % q for v in out])


def psub(a: list[int], b: list[int], q: int) -> list[int]:
    n = max(len(a), len(b))
    return _trim([((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % q for i in range(n)])


def pdivmod(a: list[int], b: list[int], q: int) -> tuple[list[int], list[int]]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(a)
    db = len(b) - 1
    inv = pow(b[-1], -1, q)
    quo = [0] * max(len(a) - db, 0)
    for i in range(len(r) - 1, db - 1, -1):
        c = r[i] * inv % q
        if c:
            quo[i - db] = c
            for j in range(db + 1):
                r[i - db + j] = (r[i - db + j] - c * b[j]) % q
    return _trim(quo), _trim(r[:db])


def pmod(a: list[int], b: list[int], q: int) -> list[int]:
    return pdivmod(a, b, q)[1]


def pgcd(a: list[int], b: list[int], q: int) -> list[int]:
    while b:
        a, b = b, pmod(a, b, q)
    if not a:
        return a
    inv = pow(a[-1], -1, q)
    return [c * inv % q for c in a]


def ppowmod(base: list[int], e: int, mod: list[int], q: int) -> list[int]:
    result = [1]
    base = pmod(base, mod, q)
    while e:
        if e & 1:
            result = pmod(pmul(result, base, q), mod, q)
        e >>= 1
        if e:
            base = pmod(pmul(base, base, q), mod, q)
    return result


def _as_field_coeffs(p, q: int) -> list[int]:
    if isinstance(p, IntPolynomial):
        return p.mod(q)
    if isinstance(p, ResiduePolynomial):
        return list(p.coefficients)
    return _trim([int(c) % q for c in p])


def poly_eval(p, alpha: int, q: int) -> int:
    """Horner evaluation p(alpha) mod q for integer or residue polynomials."""
    acc = 0
    for c in reversed(_as_field_coeffs(p, q)):
        acc = (acc * alpha + c) % q
    return acc


def _equal_degree_split(g: list[int], q: int, rng: random.Random, out: list[int]) -> None:
    """Collect the roots of a squarefree product of distinct linear factors."""
    d = len(g) - 1
    if d == 0:
        return
    if d == 1:
        out.append((-g[0]) * pow(g[1], -1, q) % q)
        return
    while True:
        delta = rng.randrange(q)
        h = ppowmod([delta, 1], (q - 1) // 2, g, q)
        h = psub(h, [1], q)
        u = pgcd(g, h, q)
        if 0 < len(u) - 1 < d:
            break
    _equal_degree_split(u, q, rng, out)
    _equal_degree_split(pdivmod(g, u, q)[0], q, rng, out)


def find_roots_mod_q(f, q: int, rng: random.Random | None = None) -> list[int]:
    """All distinct roots of ``f`` modulo the odd prime ``q``, sorted.

    Cantor-Zassenhaus: isolate the linear part with gcd(x^q - x, f), then
    split it by random gcds.  The result does not depend on the RNG.
    """
    fc = _as_field_coeffs(f, q)
    if len(fc) <= 1:
        if not fc:
            raise DomainError("the zero polynomial has every residue as a root")
        return []
    inv = pow(fc[-1], -1, q)
    fc = [c * inv % q for c in fc]
    xq = ppowmod([0, 1], q, fc, q)
    g = pgcd(fc, psub(xq, [0, 1], q), q)
    roots: list[int] = []
    _equal_degree_split(g, q, rng or random.Random(0x5EED), roots)
    return sorted(roots)


# ---------------------------------------------------------------------------
# resultants and discriminants
# ---------------------------------------------------------------------------


def _content(c: list[int]) -> int:
    g = 0
    for v in c:
        g = math.gcd(g, v)
    return g


def _prem(a: list[int], b: list[int]) -> list[int]:
    """Pseudo-remainder lc(b)^(deg a - deg b + 1) * a mod b over Z."""
    r = list(a)
    db = len(b) - 1
    lb = b[-1]
    e = len(a) - len(b) + 1
    while r and len(r) - 1 >= db:
        c = r[-1]
        shift = len(r) - 1 - db
        r = [v * lb for v in r]
        for j in range(db + 1):
            r[shift + j] -= c * b[j]
        _trim(r)
        e -= 1
    if e > 0:
        r = [v * lb**e for v in r]
    return r


def resultant(a: Sequence[int], b: Sequence[int]) -> int:
    """Res(a, b) over Z by the subresultant algorithm (exact)."""
    A, B = _trim(list(a)), _trim(list(b))
    if not A or not B:
        return 0
    s = 1
    if len(A) < len(B):
        A, B = B, A
        if (len(A) - 1) % 2 and (len(B) - 1) % 2:
            s = -s
    ca, cb = _content(A), _content(B)
    A = [v // ca for v in A]
    B = [v // cb for v in B]
    t = ca ** (len(B) - 1) * cb ** (len(A) - 1)
    g = h = 1
    while len(B) > 1:
        delta = len(A) - len(B)
        if (len(A) - 1) % 2 and (len(B) - 1) % 2:
            s = -s
        R = _prem(A, B)
        A = B
        if not R:
            return 0
        div = g * h**delta
        B = [v // div for v in R]
        g = A[-1]
        if delta == 0:
            pass
        elif delta == 1:
            h = g
        else:
            h = g**delta // h ** (delta - 1)
    da = len(A) - 1
    h = B[0] ** da // h ** (da - 1) if da > 0 else 1
    return s * t * h


def discriminant(f: IntPolynomial) -> int:
    """disc(f) = (-1)^(n(n-1)/2) Res(f, f') / lc(f)."""
    n = f.degree
    if n < 1:
        raise DomainError("discriminant needs degree >= 1")
    if n == 1:
        return 1
    r = resultant(f.coefficients, f.derivative().coefficients)
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return sign * r // f.leading


# ---------------------------------------------------------------------------
# irreducibility
# ---------------------------------------------------------------------------

SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47,
                53, 59, 61, 67, 71, 73, 79, 83, 89, 97)


def _eisenstein_shift(f: IntPolynomial) -> bool:
    """Eisenstein criterion on f(x + a) for small shifts a and the shift that kills x^(n-1)."""
    n = f.degree
    shifts = [0]
    if f.coefficients[n - 1] % n == 0:
        shifts.append(-f.coefficients[n - 1] // n)
    if n <= 64:
        shifts += [1, -1, 2, -2, 3, -3]
    for a in dict.fromkeys(shifts):
        g = f.taylor_shift(a) if a else f
        d = _content(list(g.coefficients[:-1]))
        if d <= 1:
            continue
        c0 = g.coefficients[0]
        candidates = [d] if is_prime(d) else [p for p in SMALL_PRIMES if d % p == 0]
        for p in candidates:
            if c0 % (p * p) and g.leading % p:
                return True
    return False


def _small_integer_root(f: IntPolynomial, bound: int = 1000) -> bool:
    c0 = f.coefficients[0]
    if c0 == 0:
        return True
    if abs(c0) <= 10**12:
        try:
            fac = factorint(abs(c0), budget=50_000)
        except CapacityError:
            fac = None
        if fac is not None:
            divs = [1]
            for p, e in fac.items():
                divs = [d * p**k for d in divs for k in range(e + 1)]
            return any(f(d) == 0 or f(-d) == 0 for d in divs)
    return any(f(x) == 0 for x in range(-bound, bound + 1))


def irreducibility_check(f: IntPolynomial, primes: Sequence[int] = SMALL_PRIMES) -> str:
    """Sufficient irreducibility test over Z for monic ``f``.

    Returns ``"irreducible"``, ``"composite"`` or ``"unknown"``.

    A certificate of irreducibility is either the Eisenstein criterion after
    the natural shift, or the factor-degree patterns of ``f`` modulo small
    primes: any factor over Z has a degree that is a subset sum of the
    degree pattern modulo every good prime, so an empty intersection of
    those subset sums (apart from 0 and n) proves irreducibility.
    """
    from . import _gfp

    if not f.is_monic():
        raise PreconditionError("irreducibility_check expects a monic polynomial")
    n = f.degree
    if n < 1:
        raise PreconditionError("degree must be at least 1")
    if n == 1:
        return "irreducible"
    if _small_integer_root(f):
        return "composite"
    if _eisenstein_shift(f):
        return "irreducible"
    full = (1 << n) | 1
    possible = (1 << (n + 1)) - 1
    for p in primes:
        fp = _gfp.reduce(f.coefficients, p)
        if not _gfp.is_squarefree(fp, p):
            continue
        degrees = _gfp.ddf_degrees(fp, p)
        sums = 1
        for d in degrees:
            sums |= sums << d
        possible &= sums
        if possible == full:
            return "irreducible"
    # for n <= 3 any factorisation has a linear factor, i.e. an integer root
    if n <= 3 and abs(f.coefficients[0]) <= 10**12:
        return "irreducible"
    return "unknown"


# ---------------------------------------------------------------------------
# rings and residue polynomials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RingSpec:
    """A monic f over Z that splits into distinct linear factors mod q."""

    f: IntPolynomial
    q: int
    roots: tuple[int, ...]

    def __post_init__(self):
        check_prime_modulus(self.q)
        if not self.f.is_monic() or self.f.degree < 1:
            raise PreconditionError("f must be monic of degree >= 1")
        roots = tuple(sorted(int(r) % self.q for r in self.roots))
        object.__setattr__(self, "roots", roots)
        if len(set(roots)) != len(roots):
            raise PreconditionError("roots must be pairwise distinct")
        if len(roots) != self.f.degree:
            raise PreconditionError(
                "f does not split completely mod q: %d roots for degree %d" % (len(roots), self.f.degree)
            )
        fq = self.f.mod(self.q)
        for r in roots:
            if poly_eval(fq, r, self.q):
                raise PreconditionError("%d is not a root of f mod q" % r)

    @classmethod
    def from_polynomial(cls, f: IntPolynomial, q: int) -> "RingSpec":
        check_prime_modulus(q)
        return cls(f, q, tuple(find_roots_mod_q(f, q)))

    @property
    def n(self) -> int:
        return self.f.degree

    @property
    def f_mod_q(self) -> list[int]:
        return self._fq()

    def _fq(self) -> list[int]:
        cached = self.__dict__.get("_fq_cache")
        if cached is None:
            cached = self.f.mod(self.q)
            object.__setattr__(self, "_fq_cache", cached)
        return cached

    def to_json(self) -> dict:
        return {"f": self.f.to_json(), "q": str(self.q), "roots": [str(r) for r in self.roots]}

    @classmethod
    def from_json(cls, data: dict) -> "RingSpec":
        return cls(IntPolynomial.from_json(data["f"]), int(data["q"]), tuple(int(r) for r in data["roots"]))

    def dumps(self) -> str:
        return json.dumps(self.to_json())


@dataclass(frozen=True)
class ResiduePolynomial:
    """An element of P_q = F_q[x]/(f), stored as n coefficients in [0, q)."""

    ring: RingSpec = field(repr=False)
    coefficients: tuple[int, ...]

    def __post_init__(self):
        n, q = self.ring.n, self.ring.q
        c = tuple(int(v) for v in self.coefficients)
        if len(c) != n:
            raise PreconditionError("expected %d coefficients, got %d" % (n, len(c)))
        if any(not 0 <= v < q for v in c):
            raise PreconditionError("coefficients must lie in [0, q)")
        object.__setattr__(self, "coefficients", c)

    @classmethod
    def from_ints(cls, ring: RingSpec, values: Sequence[int]) -> "ResiduePolynomial":
        q = ring.q
        vals = [int(v) % q for v in values]
        if len(vals) > ring.n:
            vals = pmod(_trim(vals), ring.f_mod_q, q)
        vals += [0] * (ring.n - len(vals))
        return cls(ring, tuple(vals))

    def __add__(self, other: "ResiduePolynomial") -> "ResiduePolynomial":
        q = self.ring.q
        return ResiduePolynomial(self.ring, tuple((a + b) % q for a, b in zip(self.coefficients, other.coefficients)))

    def __sub__(self, other: "ResiduePolynomial") -> "ResiduePolynomial":
        q = self.ring.q
        return ResiduePolynomial(self.ring, tuple((a - b) % q for a, b in zip(self.coefficients, other.coefficients)))

    def __mul__(self, other: "ResiduePolynomial") -> "ResiduePolynomial":
        q = self.ring.q
        prod = pmul(_trim(list(self.coefficients)), _trim(list(other.coefficients)), q)
        return ResiduePolynomial.from_ints(self.ring, pmod(prod, self.ring.f_mod_q, q))

    def __call__(self, alpha: int) -> int:
        return poly_eval(self, alpha, self.ring.q)

    def minimal(self) -> list[int]:
        q = self.ring.q
        return [minimal_residue(c, q) for c in self.coefficients]
