"""Dense polynomial arithmetic over small prime fields, vectorised with numpy.

Only used for irreducibility certificates, where f can have degree in the
thousands but the prime p is tiny.  Arrays are int64, constant term first,
with no trailing zeros.  Matrix products run in float64 through BLAS; they
are exact while ``n * p**2 < 2**53``.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np


def reduce(coeffs: Sequence[int], p: int) -> np.ndarray:
    return trim(np.array([c % p for c in coeffs], dtype=np.int64))


def trim(a: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(a)
    return a[: nz[-1] + 1] if nz.size else a[:0]


def monic(a: np.ndarray, p: int) -> np.ndarray:
    return a * pow(int(a[-1]), -1, p) % p


def sub(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    n = max(a.size, b.size)
    out = np.zeros(n, dtype=np.int64)
    out[: a.size] += a
    out[: b.size] -= b
    return trim(out % p)


def divmod_(a: np.ndarray, b: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    r = a.copy()
    db = b.size - 1
    inv = pow(int(b[-1]), -1, p)
    quo = np.zeros(max(a.size - db, 0), dtype=np.int64)
    for i in range(r.size - 1, db - 1, -1):
        c = int(r[i]) * inv % p
        if c:
            quo[i - db] = c
            seg = r[i - db : i + 1]
            seg -= c * b
            seg %= p
    return trim(quo), trim(r[:db])


def gcd(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    while b.size:
        a, b = b, divmod_(a, b, p)[1]
    return monic(a, p) if a.size else a


def derivative(a: np.ndarray, p: int) -> np.ndarray:
    return trim(a[1:] * np.arange(1, a.size, dtype=np.int64) % p)


def is_squarefree(f: np.ndarray, p: int) -> bool:
    df = derivative(f, p)
    if not df.size:
        return False
    return gcd(f, df, p).size == 1


class FrobeniusContext:
    """Precomputed reduction data for F_p[x]/(f), f monic of degree n."""

    def __init__(self, f: np.ndarray, p: int):
        self.f, self.p, self.n = f, p, f.size - 1
        n = self.n
        tail = (-f[:n]) % p
        # rows: x^(n+j) mod f, j = 0 .. n-2
        red = np.zeros((max(n - 1, 0), n), dtype=np.int64)
        v = tail.copy()
        for j in range(n - 1):
            red[j] = v
            v = self._times_x(v)
        self.reduction = red.astype(np.float64)
        # rows: x^(i p) mod f, so that h(x)^p = h(x^p) becomes a matvec
        frob = np.zeros((n, n), dtype=np.int64)
        v = np.zeros(n, dtype=np.int64)
        v[0] = 1
        for i in range(n):
            frob[i] = v
            if i + 1 < n:
                for _ in range(p):
                    v = self._times_x(v)
        self.frobenius = frob.astype(np.float64)

    def _times_x(self, v: np.ndarray) -> np.ndarray:
        top = v[-1]
        out = np.empty_like(v)
        out[0] = 0
        out[1:] = v[:-1]
        if top:
            out = (out - top * self.f[: self.n]) % self.p
        return out

    def pad(self, a: np.ndarray) -> np.ndarray:
        out = np.zeros(self.n, dtype=np.int64)
        out[: a.size] = a
        return out

    def frobenius_step(self, h: np.ndarray) -> np.ndarray:
        return (h @ self.frobenius).astype(np.int64) % self.p

    def mulmod(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        c = np.convolve(a, b) % self.p
        if c.size <= self.n:
            return self.pad(c)
        high = c[self.n :]
        return (c[: self.n] + (high @ self.reduction[: high.size]).astype(np.int64)) % self.p


def ddf_degrees(f: np.ndarray, p: int, block: int = 16) -> list[int]:
    """Degrees of the irreducible factors of squarefree monic f over F_p.

    Distinct-degree factorisation; gcds are batched over ``block``
    consecutive degrees by accumulating the product of (x^(p^k) - x).
    """
    n = f.size - 1
    if n <= 1:
        return [n] if n == 1 else []
    ctx = FrobeniusContext(f, p)
    x = ctx.pad(np.array([0, 1], dtype=np.int64))
    h = x.copy()
    rem = f
    degrees: list[int] = []
    k = 0
    while rem.size - 1 >= 2 * (k + 1):
        start = k
        hs = []
        acc = ctx.pad(np.array([1], dtype=np.int64))
        while len(hs) < block and rem.size - 1 >= 2 * (k + 1):
            k += 1
            h = ctx.frobenius_step(h)
            diff = (h - x) % p
            hs.append(diff)
            acc = ctx.mulmod(acc, diff)
        g = gcd(rem, divmod_(trim(acc), rem, p)[1], p)
        if g.size <= 1:
            continue
        # refine inside the block
        for offset, diff in enumerate(hs, start=start + 1):
            gk = gcd(g, divmod_(trim(diff), g, p)[1], p)
            if gk.size > 1:
                degrees += [offset] * ((gk.size - 1) // offset)
                g = divmod_(g, gk, p)[0]
                rem = divmod_(rem, gk, p)[0]
            if g.size <= 1:
                break
    if rem.size > 1:
        degrees.append(rem.size - 1)
    return sorted(degrees)
