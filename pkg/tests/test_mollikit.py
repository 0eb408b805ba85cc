import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mollicrit.errors import ConfigError, DomainError
from mollicrit.mollikit import (
    ArithmeticTables,
    DirichletPolynomial,
    RealPolynomial,
    calibrate_epsilon1,
    elementary_symmetric,
    evaluate_dirichlet,
    feng_polynomials_default,
    g_dirichlet_poly,
    g_dirichlet_poly_translated,
    mollifier_coefficients,
    q_big_limit,
    q_big_poly,
    q_one_limit,
    q_one_poly,
    tanh_part,
    tilde_q_symmetry_defect,
)

GRID = np.linspace(0.0, 1.0, 1001)


@pytest.fixture(scope="module")
def cfg():
    return feng_polynomials_default(2000.0)


def trial_mu(n):
    mu, m, p = 1, n, 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            mu = -mu
        p += 1
    return -mu if m > 1 else mu


def trial_primes(n):
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    return out + ([n] if n > 1 else [])


# -- polynomials -------------------------------------------------------------


def test_real_polynomial_trims_and_evaluates():
    p = RealPolynomial((1.0, -2.0, 3.0, 0.0, 0.0))
    assert p.degree == 2
    assert p(2.0) == 1 - 4 + 12
    assert np.allclose(p(np.array([0.0, 1.0])), [1.0, 2.0])
    assert RealPolynomial((0.0, 0.0)).is_zero


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=1, max_size=8), st.lists(st.floats(-5, 5), min_size=1, max_size=8),
       st.floats(-1, 1), st.floats(-2, 2))
def test_real_polynomial_algebra_property(a, b, c, x):
    p, q = RealPolynomial(a), RealPolynomial(b, c)
    scale = 1 + sum(abs(v) for v in a) * 3 ** len(a) + sum(abs(v) for v in b) * 4 ** len(b)
    assert abs((p + q)(x) - (p(x) + q(x))) <= 1e-12 * scale
    assert abs((p - q)(x) - (p(x) - q(x))) <= 1e-12 * scale
    assert abs((p * q)(x) - p(x) * q(x)) <= 1e-12 * scale ** 2
    assert abs(q.recenter(0.3)(x) - q(x)) <= 1e-12 * scale
    assert abs(RealPolynomial(q.monomial())(x) - q(x)) <= 1e-12 * scale


def test_feng_defaults(cfg):
    assert cfg.R == 1.3025 and cfg.I == 5 and cfg.alpha == 0.1 and cfg.K == 5
    assert cfg.theta == 4 / 7 and cfg.theta1 == 0.5
    assert cfg.P[1](1.0) == pytest.approx(0.733262, abs=1e-12)
    assert cfg.P[0](1.0) == pytest.approx(1.0, abs=1e-12)
    assert cfg.P[0](0.0) == 0.0
    assert cfg.Q_tilde(0.0) == pytest.approx(1.0, abs=1e-12)
    cfg.validate()


def test_feng_p1_shape(cfg):
    # P1(x) = x + sum_j w_j x (1 - x)^j with the printed weights
    w = (0.138173, -0.445606, -4.039834, 7.506942, -3.239261)
    for x in (0.1, 0.37, 0.8):
        ref = x + sum(wj * x * (1 - x) ** j for j, wj in enumerate(w, start=1))
        assert cfg.P[0](x) == pytest.approx(ref, abs=1e-14)


def test_tilde_q_symmetry_defect():
    assert tilde_q_symmetry_defect(RealPolynomial((1.0, -1.0))) == 0.0
    assert tilde_q_symmetry_defect(RealPolynomial((0.0, 0.0, 1.0))) > 0.1
    d = tilde_q_symmetry_defect(feng_polynomials_default().Q_tilde)
    assert math.isfinite(d) and d <= 1e-12


# -- Q families --------------------------------------------------------------


def test_q_big_at_half(cfg):
    assert q_big_poly(0.5, cfg) == 0.5


def test_partition_of_unity(cfg):
    eps = cfg.epsilon1_resolved
    lhs = q_one_poly(GRID, cfg) - eps * cfg.Q0_resolved(GRID) + q_big_poly(GRID, cfg)
    assert np.max(np.abs(lhs - 1.0)) <= 1e-12


def test_q_big_limit_value():
    target = 0.5 - 0.5 * math.tanh(0.1 / 4)
    assert target == pytest.approx(0.4875026, abs=1e-7)
    assert abs(0.5 - tanh_part(0.1, 41)(0.0) - target) <= 1e-6
    assert abs(q_big_limit(0.0, feng_polynomials_default()) - target) <= 1e-15


def test_q_one_normalised(cfg):
    assert abs(q_one_poly(0.0, cfg) - 1.0) <= 1e-12
    assert abs(q_one_limit(0.0, cfg) - 1.0) <= 1e-12


def test_q_one_zero_alpha(cfg):
    c = cfg.with_(alpha=0.0)
    eps = c.epsilon1_resolved
    assert eps * c.Q0_resolved(0.0) == pytest.approx(0.5, abs=1e-15)
    assert np.allclose(q_one_poly(GRID, c), 0.5 + eps * c.Q0_resolved(GRID), atol=1e-15, rtol=0)


def test_q_one_limit_at_one(cfg):
    eps_inf = (0.5 - 0.5 * math.tanh(0.025)) / cfg.Q0_resolved(0.0)
    ref = 0.5 - 0.5 * math.tanh(0.025) + eps_inf * cfg.Q0_resolved(1.0)
    assert q_one_limit(1.0, cfg) == pytest.approx(ref, abs=1e-15)


@pytest.mark.parametrize("alpha", [0.1, 3.0])
def test_q_one_converges_to_limit(cfg, alpha):
    devs = []
    for K in (5, 11, 21, 41):
        c = cfg.with_(K=K, K0=K, alpha=alpha)
        devs.append(np.max(np.abs(q_one_poly(GRID, c) - q_one_limit(GRID, c))))
    # at alpha = 0.1 the deviation hits rounding level by K = 7
    floor = 8 * np.finfo(float).eps
    assert all(b <= max(a, floor) for a, b in zip(devs, devs[1:]))
    if alpha == 3.0:
        assert all(b < a for a, b in zip(devs, devs[1:]))


def test_tanh_part_matches_tanh_series():
    from mollicrit.shiftcalc import tanh_series_sum

    for alpha in (0.1, 2.0, -3.0):
        S = tanh_part(alpha, 21)
        # 1/2 - S_K(x) tends to 1/2 + tanh(alpha/2 (x - 1/2)) / 2
        assert np.allclose(-2 * S(GRID), tanh_series_sum(GRID, alpha, 21), atol=1e-14, rtol=0)


def test_epsilon_calibration_needs_q0(cfg):
    c = cfg.with_(Q0=RealPolynomial((0.0, 1.0)))
    with pytest.raises(DomainError):
        calibrate_epsilon1(c)


def test_explicit_epsilon_used(cfg):
    c = cfg.with_(epsilon1=0.25)
    assert c.epsilon1_resolved == 0.25


@pytest.mark.parametrize("kw", [dict(theta=0.6), dict(theta1=0.51), dict(K=4), dict(alpha=7.0), dict(T=2.0),
                                dict(P=(RealPolynomial((0.1, 1.0)),) * 2), dict(Q_tilde=RealPolynomial((0.9,))),
                                dict(kind="other"), dict(R=-1.0)])
def test_config_validation(cfg, kw):
    with pytest.raises(ConfigError):
        cfg.with_(**kw).validate()


# -- arithmetic tables -------------------------------------------------------


def test_tables_mu_against_trial_division(backend):
    t = ArithmeticTables.build(3000)
    assert [int(v) for v in t.mu[1:]] == [trial_mu(n) for n in range(1, 3001)]


def test_tables_factorization():
    t = ArithmeticTables.build(5000)
    for n in range(1, 5001):
        f = t.factorize(n)
        assert math.prod(p ** e for p, e in f) == n
        assert [p for p, _ in f] == trial_primes(n)


def test_tables_mu_multiplicative():
    t = ArithmeticTables.build(10000)
    for m, n in [(3, 7), (10, 33), (14, 15), (77, 13), (2, 4)]:
        if math.gcd(m, n) == 1:
            assert t.mu[m * n] == t.mu[m] * t.mu[n]
        else:
            assert t.mu[m * n] == 0


def test_tables_limits():
    with pytest.raises(DomainError):
        ArithmeticTables.build(0)
    with pytest.raises(DomainError):
        ArithmeticTables.build(10 ** 7 + 1)
    with pytest.raises(DomainError):
        ArithmeticTables.build(10).factorize(11)


def test_elementary_symmetric():
    assert elementary_symmetric([1.0, 2.0, 3.0], 3) == [1.0, 6.0, 11.0, 6.0]
    assert elementary_symmetric([], 2) == [1.0, 0.0, 0.0]


# -- mollifier coefficients --------------------------------------------------


def brute_coefficient(cfg, m, mu):
    y, y1, L = cfg.y, cfg.y1, cfg.log_T
    c = cfg.P[0](math.log(y / m) / math.log(y))
    if m <= y1:
        primes = trial_primes(m)
        u = math.log(y1 / m) / math.log(y1)
        for j in range(2, cfg.I + 1):
            # ordered tuples of distinct primes dividing m
            for tup in itertools.permutations(primes, j):
                c += math.prod(math.log(p) for p in tup) / math.log(y1) ** j * cfg.P[j - 1](u)
    return mu * c * m ** (-cfg.R / L)


def test_mollifier_first_coefficient(cfg):
    M = mollifier_coefficients(cfg)
    assert M.coefficient(1) == pytest.approx(1.0, abs=1e-15)
    assert M.length == int(cfg.y)


def test_mollifier_prime_coefficients(cfg):
    M = mollifier_coefficients(cfg)
    for p in (2, 3, 5, 43):
        only_p1 = -cfg.P[0](math.log(cfg.y / p) / math.log(cfg.y)) * p ** (-cfg.R / cfg.log_T)
        assert M.coefficient(p) == pytest.approx(only_p1, abs=1e-15)


def test_mollifier_six_with_two_polynomials(cfg):
    c = cfg.with_(P=cfg.P[:2])
    M = mollifier_coefficients(c)
    y1 = c.y1
    p2 = 2 * math.log(2) * math.log(3) / math.log(y1) ** 2 * c.P[1](math.log(y1 / 6) / math.log(y1))
    p1 = c.P[0](math.log(c.y / 6) / math.log(c.y))
    assert M.coefficient(6).real == pytest.approx((p1 + p2) * 6 ** (-c.R / c.log_T), rel=1e-13)
    assert M.coefficient(6).real == pytest.approx(brute_coefficient(c, 6, 1), rel=1e-13)


def test_mollifier_against_brute_force(cfg):
    t = ArithmeticTables.build(int(cfg.y))
    M = mollifier_coefficients(cfg, t)
    for m in range(1, M.length + 1):
        ref = brute_coefficient(cfg, m, trial_mu(m))
        assert M.coefficient(m).real == pytest.approx(ref, rel=1e-12, abs=1e-15)
    assert np.all(M.a.imag == 0)


def test_mollifier_vanishes_off_squarefree(cfg):
    M = mollifier_coefficients(cfg)
    for m in range(1, M.length + 1):
        if trial_mu(m) == 0:
            assert M.coefficient(m) == 0


def test_mollifier_reduces_to_classical(cfg):
    zero = RealPolynomial((0.0,))
    c = cfg.with_(P=(cfg.P[0],) + (zero,) * 4)
    M = mollifier_coefficients(c)
    for m in range(1, M.length + 1):
        ref = trial_mu(m) * c.P[0](math.log(c.y / m) / math.log(c.y)) * m ** (-c.R / c.log_T)
        assert M.coefficient(m).real == ref or M.coefficient(m).real == pytest.approx(ref, rel=1e-15)


def test_mollifier_table_too_small(cfg):
    with pytest.raises(DomainError):
        mollifier_coefficients(cfg, ArithmeticTables.build(10))


def test_identity_mollifier(cfg):
    M = mollifier_coefficients(cfg.with_(kind="identity"))
    assert M.length == 1 and M.coefficient(1) == 1


# -- G -----------------------------------------------------------------------


def test_g_endpoints(cfg):
    G = g_dirichlet_poly(cfg)
    assert G.length == 2000
    assert G.coefficient(1) == pytest.approx(1.0, abs=1e-12)
    assert G.coefficient(2000).real == pytest.approx(q_one_poly(math.log(2000) / cfg.log_T, cfg), abs=1e-15)


def test_g_evaluation_vs_loop(cfg):
    G = g_dirichlet_poly(cfg)
    s = 2 + 1j * cfg.T
    terms = [G.coefficient(n) * n ** (-s) for n in range(1, G.length + 1)]
    loop = complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))
    assert abs(evaluate_dirichlet(G, s) - loop) <= 1e-12 * abs(loop)


def test_g_translated_close(cfg):
    a, b = g_dirichlet_poly(cfg), g_dirichlet_poly_translated(cfg)
    assert np.max(np.abs(a.a - b.a)) <= 1e-10
    assert g_dirichlet_poly(cfg.with_(g_kind="translated")).length == a.length


def test_g_midpoint_shift(cfg):
    G = g_dirichlet_poly(cfg.with_(delta_mode="midpoint"))
    assert G.length == 2000
    # the midpoint shift moves the argument by O(1 / log T)
    assert np.max(np.abs(G.a - g_dirichlet_poly(cfg).a)) < 0.5


# -- Dirichlet polynomials ---------------------------------------------------


def test_dirichlet_constant():
    dp = DirichletPolynomial(np.array([1.0]))
    for s in (0.3, 2 + 5j, -1 - 100j):
        assert evaluate_dirichlet(dp, s) == 1


def test_dirichlet_partial_zeta(backend):
    N = 5000
    dp = DirichletPolynomial(np.ones(N))
    direct = math.fsum(n ** -2.0 for n in range(N, 0, -1))
    assert abs(evaluate_dirichlet(dp, 2.0) - direct) <= 1e-14


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 300), st.integers(0, 2 ** 32 - 1), st.floats(0.3, 3), st.floats(-500, 500))
def test_dirichlet_linearity_property(n, seed, sigma, t):
    rng = np.random.default_rng(seed)
    a = DirichletPolynomial(rng.standard_normal(n) + 1j * rng.standard_normal(n))
    b = DirichletPolynomial(rng.standard_normal(n + 7))
    s = complex(sigma, t)
    lhs = evaluate_dirichlet(a + b, s)
    rhs = evaluate_dirichlet(a, s) + evaluate_dirichlet(b, s)
    scale = np.sum(np.abs(a.a)) + np.sum(np.abs(b.a))
    assert abs(lhs - rhs) <= 1e-13 * scale


def test_grid_matches_pointwise(backend):
    rng = np.random.default_rng(3)
    dp = DirichletPolynomial(rng.standard_normal(4000) + 1j * rng.standard_normal(4000))
    sigma, t0, dt, n_t = 0.35, 1000.0, 0.0137, 3000
    grid = dp.evaluate_tgrid(sigma, t0, dt, n_t)
    idx = rng.choice(n_t, 20, replace=False)
    pts = evaluate_dirichlet(dp, sigma + 1j * (t0 + dt * idx))
    scale = np.sum(np.abs(dp.a) * np.arange(1, 4001) ** -sigma)
    assert np.max(np.abs(grid[idx] - pts)) <= 1e-12 * scale


def test_binary_round_trip():
    rng = np.random.default_rng(5)
    dp = DirichletPolynomial(rng.standard_normal(17) + 1j * rng.standard_normal(17))
    data = dp.to_bytes()
    assert data[:8] == b"MOLLDP1\x00"
    assert int.from_bytes(data[8:16], "little") == 17
    assert len(data) == 16 + 17 * 16
    back = DirichletPolynomial.from_bytes(data)
    assert np.array_equal(back.a, dp.a)


def test_binary_rejects_garbage():
    with pytest.raises(DomainError):
        DirichletPolynomial.from_bytes(b"NOTMAGIC" + bytes(8))
    good = DirichletPolynomial(np.ones(3)).to_bytes()
    with pytest.raises(DomainError):
        DirichletPolynomial.from_bytes(good[:-8])


def test_csv_export():
    dp = DirichletPolynomial(np.array([1.0, 0.1 + 0.2j]))
    assert dp.to_csv() == "n,re,im\r\n1,1,0\r\n2,0.10000000000000001,0.20000000000000001\r\n"


def test_dirichlet_validation():
    with pytest.raises(DomainError):
        DirichletPolynomial(np.array([]))
    with pytest.raises(DomainError):
        DirichletPolynomial(np.array([1.0, np.nan]))


def test_trim_and_constant():
    dp = DirichletPolynomial(np.array([2.0, 0.0, 0.0]))
    assert dp.is_constant()
    assert dp.trimmed().length == 1
    assert not DirichletPolynomial(np.array([1.0, 1.0])).is_constant()
