"""Error distributions and PLWE / RLWE sample generation.

Discretisation is round-to-nearest of a continuous normal deviate.  PLWE
coefficients are additionally truncated: anything beyond
``floor(truncation_multiplier * sigma)`` is rejected and redrawn.

Every batch is generated from an integer seed.  Sample ``i`` draws from its
own stream ``default_rng([seed, i])``, so batches can be produced in any
order (or in parallel) and still be bit-identical.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import NumericError, PreconditionError
from .modarith import ResiduePolynomial, RingSpec

SCHEMA = 1


@dataclass(frozen=True)
class GaussianSpec:
    sigma: float
    truncation_multiplier: float = 2.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise PreconditionError("sigma must be positive")
        if not self.truncation_multiplier > 0:
            raise PreconditionError("truncation multiplier must be positive")

    @property
    def bound(self) -> int:
        """Hard bound B on |e_j|."""
        return math.floor(self.truncation_multiplier * self.sigma)

    def to_json(self) -> dict:
        return {"sigma": self.sigma, "truncation_multiplier": self.truncation_multiplier}


def sample_error_vector(spec: GaussianSpec, size: int, rng: np.random.Generator) -> np.ndarray:
    """``size`` independent rounded, truncated normal deviates."""
    B = spec.bound
    out = np.rint(rng.normal(0.0, spec.sigma, size)).astype(np.int64)
    bad = np.flatnonzero(np.abs(out) > B)
    while bad.size:
        out[bad] = np.rint(rng.normal(0.0, spec.sigma, bad.size)).astype(np.int64)
        bad = bad[np.abs(out[bad]) > B]
    return out


def sample_error_coeff(spec: GaussianSpec, rng: np.random.Generator) -> int:
    return int(sample_error_vector(spec, 1, rng)[0])


def truncated_rounded_pmf(spec: GaussianSpec) -> dict[int, float]:
    """Exact law of :func:`sample_error_coeff` (used for variance checks)."""
    from scipy.special import ndtr

    B, s = spec.bound, spec.sigma
    k = np.arange(-B, B + 1)
    w = ndtr((k + 0.5) / s) - ndtr((k - 0.5) / s)
    w = w / w.sum()
    return dict(zip(k.tolist(), w.tolist()))


@dataclass(frozen=True)
class PlweSample:
    a: ResiduePolynomial
    b: ResiduePolynomial

    def __post_init__(self):
        if self.a.ring is not self.b.ring and self.a.ring != self.b.ring:
            raise PreconditionError("a and b must live in the same ring")


@dataclass
class SampleBatch:
    ring: RingSpec
    samples: list[PlweSample]
    provenance: str
    seed: int | None
    # description of the error model; never consulted by the attacks
    metadata: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.samples)

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "ring": self.ring.to_json(),
            "seed": self.seed,
            "provenance": self.provenance,
            "metadata": self.metadata,
            "samples": [
                {"a": [str(c) for c in s.a.coefficients], "b": [str(c) for c in s.b.coefficients]}
                for s in self.samples
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, data: dict) -> "SampleBatch":
        ring = RingSpec.from_json(data["ring"])
        samples = [
            PlweSample(
                ResiduePolynomial(ring, tuple(int(c) for c in s["a"])),
                ResiduePolynomial(ring, tuple(int(c) for c in s["b"])),
            )
            for s in data["samples"]
        ]
        return cls(ring, samples, data["provenance"], data.get("seed"), dict(data.get("metadata", {})))

    def to_csv(self) -> str:
        n = self.ring.n
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["index"] + ["a%d" % j for j in range(n)] + ["b%d" % j for j in range(n)])
        for i, s in enumerate(self.samples):
            w.writerow([i, *s.a.coefficients, *s.b.coefficients])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, ring: RingSpec, provenance: str = "unknown", seed=None) -> "SampleBatch":
        n = ring.n
        rows = list(csv.reader(io.StringIO(text)))[1:]
        samples = [
            PlweSample(
                ResiduePolynomial(ring, tuple(int(v) for v in row[1 : n + 1])),
                ResiduePolynomial(ring, tuple(int(v) for v in row[n + 1 : 2 * n + 1])),
            )
            for row in rows
        ]
        return cls(ring, samples, provenance, seed)


def _stream(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed & (2**64 - 1), index])


def uniform_element(ring: RingSpec, rng: np.random.Generator) -> ResiduePolynomial:
    vals = rng.integers(0, ring.q, size=ring.n, dtype=np.int64)
    return ResiduePolynomial(ring, tuple(int(v) for v in vals))


def random_secret(ring: RingSpec, seed: int) -> ResiduePolynomial:
    return uniform_element(ring, np.random.default_rng([seed & (2**64 - 1), 2**32]))


def gen_plwe_batch(
    ring: RingSpec, secret: ResiduePolynomial, spec: GaussianSpec, count: int, seed: int
) -> SampleBatch:
    """Valid samples (a, a*s + e) with coefficient-wise truncated errors."""
    if secret.ring != ring:
        raise PreconditionError("secret does not belong to the ring")
    q = ring.q
    samples = []
    for i in range(count):
        rng = _stream(seed, i)
        a = uniform_element(ring, rng)
        e = sample_error_vector(spec, ring.n, rng)
        prod = a * secret
        b = ResiduePolynomial(ring, tuple((c + int(ej)) % q for c, ej in zip(prod.coefficients, e)))
        samples.append(PlweSample(a, b))
    meta = {"error_model": "plwe-rounded-truncated", **spec.to_json()}
    return SampleBatch(ring, samples, "valid", seed, meta)


def gen_uniform_batch(ring: RingSpec, count: int, seed: int) -> SampleBatch:
    samples = []
    for i in range(count):
        rng = _stream(seed, i)
        samples.append(PlweSample(uniform_element(ring, rng), uniform_element(ring, rng)))
    return SampleBatch(ring, samples, "uniform", seed, {"error_model": "none"})


def gen_rlwe_batch_monogenic(
    ring: RingSpec,
    embedding,
    secret: ResiduePolynomial,
    sigma: float,
    count: int,
    seed: int,
    max_condition: float = 1e12,
) -> SampleBatch:
    """Valid samples whose error is spherical in Minkowski coordinates.

    The error is a continuous spherical normal in theta-coordinates, pulled
    back to the power basis with M^-1 and rounded coordinate-wise.
    """
    M = np.asarray(embedding.M, dtype=float)
    if M.shape != (ring.n, ring.n):
        raise PreconditionError("embedding matrix does not match the ring degree")
    if not embedding.condition_number <= max_condition:
        raise NumericError("embedding matrix is ill-conditioned (cond = %.3g)" % embedding.condition_number)
    Minv = np.linalg.inv(M)
    q = ring.q
    samples = []
    for i in range(count):
        rng = _stream(seed, i)
        a = uniform_element(ring, rng)
        z = rng.normal(0.0, sigma, ring.n)
        e = np.rint(Minv @ z).astype(np.int64)
        prod = a * secret
        b = ResiduePolynomial(ring, tuple((c + int(ej)) % q for c, ej in zip(prod.coefficients, e)))
        samples.append(PlweSample(a, b))
    meta = {"error_model": "rlwe-monogenic-power-basis-rounding", "sigma": sigma}
    return SampleBatch(ring, samples, "valid", seed, meta)


def error_of(sample: PlweSample, secret: ResiduePolynomial) -> list[int]:
    """b - a*s as minimal residues."""
    return (sample.b - sample.a * secret).minimal()


def minimal_residues(values: Sequence[int], q: int) -> list[int]:
    h = (q - 1) // 2
    return [v % q if v % q <= h else v % q - q for v in values]
