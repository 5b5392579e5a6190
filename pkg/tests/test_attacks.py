import itertools
import math

import mpmath as mp
import numpy as np
import pytest
from scipy import integrate
from scipy.stats import binom, norm

from plwe.attacks import (
    ResidueAttackPlan,
    attack_alpha_one,
    attack_small_order,
    box_image,
    build_value_set,
    check_smearing,
    empirical_advantage,
    per_guess_threshold,
    residue_advantage,
    residue_distinguisher,
    success_probability,
    threshold_N,
)
from plwe.errors import CapacityError, PreconditionError
from plwe.modarith import IntPolynomial, ResiduePolynomial, RingSpec, poly_eval
from plwe.sampling import GaussianSpec, PlweSample, SampleBatch, gen_plwe_batch, gen_uniform_batch, random_secret

from conftest import desk_ring

P50 = 1125901148356951


def one_sample_batch(q, a, b):
    ring = RingSpec(IntPolynomial((-1, 1)), q, (1,))
    s = PlweSample(ResiduePolynomial(ring, (a,)), ResiduePolynomial(ring, (b,)))
    return SampleBatch(ring, [s], "unknown", None)


# --- elimination at alpha = 1 -----------------------------------------------


def test_single_noiseless_sample():
    res = attack_alpha_one(one_sample_batch(17, 3, 6), 1, threshold_t=0)
    assert res.surviving_guesses == frozenset({2})
    assert res.verdict == "valid"


def test_non_root_is_rejected(ring_alpha_one):
    batch = gen_uniform_batch(ring_alpha_one, 1, 0)
    with pytest.raises(PreconditionError):
        attack_alpha_one(batch, 9999, threshold_t=1)
    with pytest.raises(PreconditionError):
        attack_alpha_one(batch)


def test_valid_batch_keeps_true_value(ring_alpha_one):
    spec = GaussianSpec(2)
    s = random_secret(ring_alpha_one, 11)
    batch = gen_plwe_batch(ring_alpha_one, s, spec, 20, seed=11)
    res = attack_alpha_one(batch, 1, spec=spec)
    assert res.verdict == "valid"
    assert s(1) in res.surviving_guesses


def test_uniform_batches_are_rejected(ring_alpha_one):
    spec = GaussianSpec(2)
    verdicts = [attack_alpha_one(gen_uniform_batch(ring_alpha_one, 20, seed), 1, spec=spec).verdict for seed in range(100)]
    assert verdicts.count("uniform") >= 99


def test_soundness_over_many_batches():
    ring = desk_ring(40961, 8, 1)
    spec = GaussianSpec(1)
    t = 8 * spec.bound
    for seed in range(10_000):
        s = random_secret(ring, seed)
        batch = gen_plwe_batch(ring, s, spec, 2, seed)
        res = attack_alpha_one(batch, 1, threshold_t=t)
        assert s(1) in res.surviving_guesses


def test_zero_evaluation_samples():
    q = 17
    ring = RingSpec(IntPolynomial((-1, 1)), q, (1,))
    z = ResiduePolynomial(ring, (0,))
    small = SampleBatch(ring, [PlweSample(z, ResiduePolynomial(ring, (1,)))], "unknown", None)
    res = attack_alpha_one(small, 1, threshold_t=2)
    assert res.verdict == "valid" and res.surviving_guesses is None and res.zero_samples == 1
    big = SampleBatch(ring, [PlweSample(z, ResiduePolynomial(ring, (8,)))], "unknown", None)
    assert attack_alpha_one(big, 1, threshold_t=2).verdict == "uniform"


def test_does_not_stop_at_a_single_survivor():
    # first sample pins one guess, the second kills it: the batch is not valid
    q = 17
    ring = RingSpec(IntPolynomial((-1, 1)), q, (1,))
    e = lambda v: ResiduePolynomial(ring, (v % q,))  # noqa: E731
    batch = SampleBatch(ring, [PlweSample(e(3), e(6)), PlweSample(e(1), e(9))], "unknown", None)
    res = attack_alpha_one(batch, 1, threshold_t=0)
    assert res.verdict == "uniform" and res.samples_consumed == 2


# --- value sets and the small-order attack ----------------------------------


def test_value_set_examples():
    assert build_value_set(6, 2, 2, None, 7, bound=1).values == (0, 1, 2, 5, 6)
    assert build_value_set(1, 1, 1, None, 101, bound=3).values == (0, 1, 2, 3, 98, 99, 100)
    assert build_value_set(5, 6, 12, None, 7, bound=0).values == (0,)


def test_value_set_brute_force():
    q, alpha, r, B = 1009, 374, 3, 2  # 374 has order 3 mod 1009
    assert pow(alpha, 3, q) == 1
    want = {
        sum(s * pow(alpha, j, q) for j, s in enumerate(c)) % q for c in itertools.product(range(-B, B + 1), repeat=r)
    }
    assert set(build_value_set(alpha, r, 3, None, q, bound=B).values) == want


def test_value_set_uneven_classes():
    # n = 5, r = 2: classes of sizes 3 and 2
    vs = build_value_set(1008, 2, 5, GaussianSpec(1), 1009)
    assert vs.class_bounds == (6, 4)
    assert len(vs) == 2 * 10 + 1


def test_value_set_errors():
    with pytest.raises(PreconditionError):
        build_value_set(2, 2, 4, None, 7, bound=1)
    with pytest.raises(CapacityError) as exc:
        build_value_set(1, 1, 1, None, 10007, bound=10**8)
    assert exc.value.suggestion


def test_small_order_noiseless(ring_order_three):
    ring, alpha = ring_order_three
    s = random_secret(ring, 1)
    batch = gen_plwe_batch(ring, s, GaussianSpec(1e-4), 5, seed=1)
    vset = build_value_set(alpha, 3, ring.n, None, ring.q, bound=0)
    res = attack_small_order(batch, vset)
    assert res.surviving_guesses == frozenset({s(alpha)})
    for smp in batch.samples:
        assert s(alpha) * smp.a(alpha) % ring.q == smp.b(alpha)


def test_small_order_equals_alpha_one_when_r_is_one(ring_alpha_one):
    spec = GaussianSpec(1)
    vset = build_value_set(1, 1, ring_alpha_one.n, spec, ring_alpha_one.q)
    t = ring_alpha_one.n * spec.bound
    for seed in range(30):
        if seed % 2:
            batch = gen_uniform_batch(ring_alpha_one, 4, seed)
        else:
            batch = gen_plwe_batch(ring_alpha_one, random_secret(ring_alpha_one, seed), spec, 4, seed)
        a = attack_alpha_one(batch, 1, threshold_t=t)
        b = attack_small_order(batch, vset)
        assert (a.verdict, a.surviving_guesses, a.samples_consumed) == (b.verdict, b.surviving_guesses, b.samples_consumed)


def test_small_order_valid_and_uniform(ring_order_three):
    ring, alpha = ring_order_three
    spec = GaussianSpec(1)
    vset = build_value_set(alpha, 3, ring.n, spec, ring.q)
    s = random_secret(ring, 5)
    res = attack_small_order(gen_plwe_batch(ring, s, spec, 20, seed=5), vset)
    assert res.verdict == "valid" and s(alpha) in res.surviving_guesses
    verdicts = [attack_small_order(gen_uniform_batch(ring, 20, seed), vset).verdict for seed in range(100)]
    assert verdicts.count("uniform") >= 99


# --- advantage -------------------------------------------------------------


def oracle_hit_probability(sigma_bar, q):
    """P(E | valid) by adaptive quadrature of the half-normal over the hit set."""
    T = 2 * sigma_bar
    pdf = lambda x: norm.pdf(x, scale=sigma_bar)  # noqa: E731
    pieces = [(0, min(q / 4, T))]
    k = 0
    while 3 * q / 4 + k * q < T:
        pieces.append((3 * q / 4 + k * q, min(5 * q / 4 + k * q, T)))
        k += 1
    hit = sum(integrate.quad(pdf, lo, hi, epsabs=0, epsrel=1e-12)[0] for lo, hi in pieces)
    return hit / (norm.cdf(2) - 0.5)


@pytest.mark.parametrize("sigma_bar_over_q", [0.2, 0.3, 0.45, 0.8, 1.37, 3.3, 9.9])
def test_interval_sum_matches_quadrature(sigma_bar_over_q):
    q = 10007
    n = 1
    sigma = sigma_bar_over_q * q  # case one with n = 1: sigma_bar = sigma
    plan = residue_advantage(n, q, GaussianSpec(sigma), 1)
    assert plan.method in ("exact", "interval-sum")
    assert plan.raw_epsilon == pytest.approx(oracle_hit_probability(sigma, q) - 0.5, abs=1e-9)


def test_asymptotic_branch_agrees_with_interval_sum():
    import plwe.attacks as A

    q = 10007
    for sb in [q * 4000.3, q * 4500.71, q * 4999.1]:
        with mp.workdps(40):
            exact, m1 = A._hit_probability(mp.mpf(sb), q)
            approx, m2 = A._hit_probability(mp.mpf(sb), q, max_intervals=0)
        assert (m1, m2) == ("interval-sum", "asymptotic")
        assert float(approx) == pytest.approx(float(exact), rel=1e-3, abs=1e-12)


def test_degenerate_case_is_exactly_half():
    for sigma in [0.5, 1, 8, 100]:
        q = 40961
        plan = residue_advantage(16, q, GaussianSpec(sigma), 1)
        if q / 4 >= 2 * plan.sigma_bar:
            assert plan.epsilon == 0.5


def test_case_formulas():
    q, n, sigma = P50, 512, 8.0
    one = residue_advantage(1024, q, GaussianSpec(sigma), 1)
    assert one.case_id == "one" and one.sigma_bar == pytest.approx(8 * 32)
    two = residue_advantage(n, q, GaussianSpec(sigma), q - 1)
    alpha = q - 1
    want = math.sqrt((n / 2) * sigma**2 * (alpha**4 - 1) / (alpha**2 - 1))
    assert two.case_id == "two" and two.r == 2
    assert two.sigma_bar == pytest.approx(want, rel=1e-12)
    assert two.sigma_tilde == pytest.approx(sigma * math.sqrt(n / 2))
    three = residue_advantage(64, 1152921504606846883, GaussianSpec(sigma), 2)
    assert three.case_id == "three"
    assert three.sigma_bar == pytest.approx(sigma * math.sqrt((2**128 - 1) / 3), rel=1e-12)
    minimal = residue_advantage(n, q, GaussianSpec(sigma), q - 1, representative="minimal")
    assert minimal.case_id == "one" and minimal.epsilon == 0.5


def test_huge_powers_stay_finite():
    plan = residue_advantage(1024, P50, GaussianSpec(8), 33554450, r=10**9)
    assert plan.case_id == "three" and plan.method == "asymptotic"
    assert 0 <= plan.epsilon <= 0.5 and math.isinf(plan.sigma_bar)


def test_epsilon_is_never_negative():
    for sigma in np.linspace(1000, 40000, 60):
        plan = residue_advantage(1, 10007, GaussianSpec(float(sigma)), 1)
        assert 0 <= plan.epsilon <= 0.5
        if plan.raw_epsilon < 0:
            assert plan.flag


def test_monotone_before_the_first_wrap():
    q = 100003
    eps = [residue_advantage(1, q, GaussianSpec(s), 1).epsilon for s in np.linspace(1, 3 * q / 8, 80)]
    assert all(a >= b for a, b in zip(eps, eps[1:]))


def test_empirical_matches_closed_form_without_wrap():
    # q/4 < 2 sigma_bar < 3q/4: no wrap, the closed form is exact for a
    # continuous half-normal; the discrete truncated law is close to it
    q, n, sigma = 401, 16, 20.0
    plan = residue_advantage(n, q, GaussianSpec(sigma), 1)
    emp = empirical_advantage(n, q, GaussianSpec(sigma), 1, trials=40_000, seed=3)
    assert 0 < plan.epsilon < 0.5
    assert abs(emp["epsilon"] - plan.epsilon) < 0.02


# --- threshold distinguisher -----------------------------------------------


def hit(x, q):
    m = x % q
    m = m - q if m > (q - 1) // 2 else m
    return -q <= 4 * m < q


def test_distinguisher_counts_match_brute_force():
    ring = desk_ring(257, 8, 1)
    batch = gen_uniform_batch(ring, 7, 1)
    plan = residue_advantage(8, 257, GaussianSpec(1), 1)
    run = residue_distinguisher(batch, 1, plan)
    want = sum(hit(s.b(1) - g * s.a(1), 257) for s in batch.samples for g in range(257))
    assert run.count_C == want
    assert run.threshold_N == math.ceil((7 * 257 + plan.epsilon * 7) / 2)
    threaded = residue_distinguisher(batch, 1, plan, workers=4, chunk=64)
    assert threaded.count_C == want


def test_distinguisher_empty_input():
    ring = desk_ring(257, 8, 1)
    plan = residue_advantage(8, 257, GaussianSpec(1), 1)
    run = residue_distinguisher(gen_uniform_batch(ring, 0, 0), 1, plan)
    assert (run.count_C, run.threshold_N, run.verdict) == (0, 0, "G") and run.flag


def test_distinguisher_capacity():
    q = 4194319  # first prime above 2^22
    ring = RingSpec(IntPolynomial((-1, 1)), q, (1,))
    batch = SampleBatch(ring, [], "unknown", None)
    plan = residue_advantage(1, q, GaussianSpec(1), 1)
    with pytest.raises(CapacityError):
        residue_distinguisher(batch, 1, plan)


def test_distinguisher_valid_case_one():
    ring = desk_ring(12289, 64, 1)
    spec = GaussianSpec(1)
    plan = residue_advantage(64, 12289, spec, 1)
    assert plan.epsilon == 0.5
    wins = 0
    for seed in range(100):
        batch = gen_plwe_batch(ring, random_secret(ring, seed), spec, 50, seed)
        wins += residue_distinguisher(batch, 1, plan).verdict == "G"
    assert wins >= 95


def test_per_guess_mode():
    ring = desk_ring(257, 8, 1)
    spec = GaussianSpec(1)
    plan = residue_advantage(8, 257, spec, 1)
    t = per_guess_threshold(20, 257, 0.01)
    assert 257 * binom.sf(t - 1, 20, 0.5) <= 0.01 < 257 * binom.sf(t - 2, 20, 0.5)
    false_alarms = sum(
        residue_distinguisher(gen_uniform_batch(ring, 20, seed), 1, plan, mode="per_guess").verdict == "G"
        for seed in range(300)
    )
    assert false_alarms <= 300 * 0.01 + 3 * math.sqrt(300 * 0.01)
    hits = sum(
        residue_distinguisher(gen_plwe_batch(ring, random_secret(ring, s), spec, 20, s), 1, plan, mode="per_guess").verdict
        == "G"
        for s in range(50)
    )
    assert hits == 50


# --- success probabilities --------------------------------------------------


def enumerate_success(ell, q, eps):
    N = threshold_N(ell, q, eps)
    m = ell * q
    p_u = p_g = 0.0
    for bits in itertools.product((0, 1), repeat=m):
        c = sum(bits)
        p_u += (c < N) * 0.5**m
        # the first ell trials are the correct guess of each sample
        good = sum(bits[:ell])
        pg = (0.5 + eps) ** good * (0.5 - eps) ** (ell - good) * 0.5 ** (m - ell)
        p_g += (c >= N) * pg
    return p_u, p_g


@pytest.mark.parametrize("eps", [0.0, 0.1, 0.25, 0.5])
def test_success_probability_enumeration_oracle(eps):
    got = success_probability(2, 3, eps)
    p_u, p_g = enumerate_success(2, 3, eps)
    assert got["p_given_U"] == pytest.approx(p_u, abs=1e-12)
    assert got["p_given_G"] == pytest.approx(p_g, abs=1e-12)
    assert got["overall"] == pytest.approx((p_u + p_g) / 2, abs=1e-12)


def test_success_probability_literal_sum_small():
    ell, q, eps = 10, 257, 0.2
    N = threshold_N(ell, q, eps)
    lit = sum((1 - binom.cdf(N - i - 1, ell * q - ell, 0.5)) * binom.pmf(i, ell, 0.5 + eps) for i in range(ell + 1))
    assert success_probability(ell, q, eps)["p_given_G"] == pytest.approx(lit, abs=1e-12)


def test_success_probability_normal_branch():
    got = success_probability(100, 20011, 0.3)
    assert got["method"] == "normal"
    exact_u = binom.cdf(int(got["N"]) - 1, 100 * 20011, 0.5)
    assert got["p_given_U"] == pytest.approx(exact_u, abs=1e-4)


def test_success_probability_bounds():
    with pytest.raises(PreconditionError):
        success_probability(10, 257, 0.6)


# --- smearing --------------------------------------------------------------


def test_smearing_examples():
    q = 257
    assert check_smearing(("box", 4, 0, q - 1), 3, q)["smears"]
    res = check_smearing(("box", 6, 0, 1), 1, q)
    assert not res["smears"] and res["image_size"] == 7
    assert set(np.flatnonzero(box_image(6, 0, 1, 1, q))) == set(range(7))


def test_smearing_order_four_brute_force():
    q = 257
    alpha = next(a for a in range(2, q) if pow(a, 4, q) == 1 and pow(a, 2, q) != 1)
    polys = list(itertools.product(range(-2, 3), repeat=4))
    brute = {poly_eval(list(c), alpha, q) for c in polys}
    enum = check_smearing(iter(polys), alpha, q)
    box = check_smearing(("box", 4, -2, 2), alpha, q)
    assert enum["image_size"] == box["image_size"] == len(brute)
    assert enum["smears"] == (len(brute) == q)


def test_smearing_budget():
    with pytest.raises(CapacityError):
        check_smearing(iter([(i,) for i in range(100)]), 1, 257, budget=10)


def test_sampled_smearing_stream():
    rng = np.random.default_rng(0)
    q = 101
    stream = ((int(rng.integers(0, q)),) for _ in itertools.count())
    assert check_smearing(stream, 1, q, sampled=True)["smears"]
