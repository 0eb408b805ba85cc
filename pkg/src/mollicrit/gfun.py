"""The tanh-weighted Dirichlet series

    g(s) = -1/2 sum_{l >= 1} tanh(alpha/2 (log l / log T - 1/2)) l^-s,

its analytic continuation to Re s > 0, a three-term approximate equation,
the sine expansion of tanh(alpha x / 2) on (0, pi), the odd polynomial q
built from it, and the comparison of 2 H(s) sum q(.) l^-s with a combination
of odd xi-derivatives.

Writing tanh = 1 - 2 / (e^y + 1), the sine coefficients of tanh(alpha x/2)
on (0, pi) split into the coefficients 2 (1 - (-1)^k) / (pi k) of the
constant 1 and the incomplete-beta part

    beta_k = -(4 / (pi alpha)) Im[B_{1/2}(1 - ik/alpha, ik/alpha)
                                  - B_{x0}(1 - ik/alpha, ik/alpha)],
    x0 = 1 / (e^{alpha pi} + 1),

which equals -(4/pi) int_0^pi sin(kx) / (e^{alpha x} + 1) dx.
"""

import cmath
import csv
import io
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import kernels
from .constants import DEFAULT
from .errors import DomainError, NumericalWarning
from .mollikit import RealPolynomial
from .specfun import HypergeometricQuery, hyp2f1, incomplete_beta
from .zetakernel import h_factor, xi_derivative

__all__ = [
    "GFunParams",
    "GDirectResult",
    "GApproxResult",
    "FourierTanhExpansion",
    "XiMatch",
    "g_direct",
    "g_direct_reversed",
    "s1_symmetry_defect",
    "g_analytic",
    "g_approx",
    "fourier_beta_part",
    "fourier_beta_part_quadrature",
    "fourier_tanh_coefficients",
    "fourier_reconstruction",
    "fourier_tanh_expansion",
    "q_poly_from_expansion",
    "xi_dictionary_coefficients",
    "xi_odd_derivative_match",
    "gfun_table_csv",
    "bk_table_csv",
]

MAX_SINE_TERMS = 256
MAX_XI_ORDER = 12
PSI_MAX_PIECES = 2_000_000
_GL16 = np.polynomial.legendre.leggauss(DEFAULT.psi_gauss_nodes)


@dataclass(frozen=True)
class GFunParams:
    alpha: float
    T: float
    N_truncation: int = None

    def __post_init__(self):
        if self.alpha == 0 or not math.isfinite(self.alpha):
            raise DomainError("alpha must be a nonzero finite real")
        if not self.T >= 1:
            raise DomainError(f"T must be >= 1, got {self.T}")
        if self.N_truncation is None:
            object.__setattr__(self, "N_truncation", int(math.ceil(self.T)))
        if int(self.N_truncation) != self.N_truncation or self.N_truncation < self.T:
            raise DomainError(f"N_truncation must be an integer >= T, got {self.N_truncation}")
        object.__setattr__(self, "N_truncation", int(self.N_truncation))

    @property
    def log_T(self):
        return math.log(self.T)

    def with_N(self, n):
        return GFunParams(self.alpha, self.T, n)

    def weight(self, u):
        """tanh(alpha/2 (log u / log T - 1/2)) for u >= 1; T = 1 reads log u / log T as 0."""
        lu = np.log(u)
        x = lu / self.log_T if self.T > 1 else np.zeros_like(lu)
        return np.tanh(0.5 * self.alpha * (x - 0.5))


# ---------------------------------------------------------------------------
# direct summation
# ---------------------------------------------------------------------------

DIRECT_TERMS = 10000


@dataclass(frozen=True)
class GDirectResult:
    """``value = partial_sum + tail_estimate``.

    ``tail_bound`` is the crude bound 1/2 int_N^inf u^-Re s du on the
    discarded terms; ``tail_estimate`` replaces them by their
    Euler-Maclaurin approximation.
    """

    value: complex
    partial_sum: complex
    tail_estimate: complex
    tail_bound: float
    n_terms: int


def _log_integral(p, s, v0, v1):
    """int_{v0}^{v1} tanh(alpha/2 (v / L - 1/2)) e^{(1-s) v} dv, v1 may be inf."""
    s = complex(s)
    L = p.log_T
    a = 1.0 - s.real
    t = s.imag

    def amp(v):
        return math.tanh(0.5 * p.alpha * (v / L - 0.5)) * math.exp(a * v)

    # weight e^{-i t v} = cos(t v) - i sin(t v)
    if t == 0.0:
        re, _ = integrate.quad(amp, v0, v1, epsabs=1e-14, epsrel=1e-12, limit=400)
        return complex(re, 0.0)
    if math.isinf(v1):
        # tanh(y/2) = sgn(alpha) (1 - 2/(e^|y| + 1)); the constant integrates
        # exactly and the rest decays faster than e^{(1-sigma) v}
        sg = math.copysign(1.0, p.alpha)
        exact = sg * cmath.exp((1.0 - s) * v0) / (s - 1.0)
        aa = abs(p.alpha)

        def rest(v):
            v = v + v0
            return -2.0 * sg * math.exp(a * v) / (math.exp(aa * (v / L - 0.5)) + 1.0)

        # QAWF wants the oscillation to start at 0
        c, c_err = _qawf(rest, "cos", t)
        s_, s_err = _qawf(rest, "sin", t)
        if max(c_err, s_err) > 1e-10:
            warnings.warn(f"tail integral error estimate {max(c_err, s_err):.1e}", NumericalWarning, stacklevel=3)
        # cos(t(v + v0)) = cos(tv)cos(tv0) - sin(tv)sin(tv0), sin likewise
        cv, sv = math.cos(t * v0), math.sin(t * v0)
        re = c * cv - s_ * sv
        im = -(s_ * cv + c * sv)
        return exact + complex(re, im)
    c, _ = integrate.quad(amp, v0, v1, weight="cos", wvar=t, epsabs=DEFAULT.middle_quad_abs * 1e-2, limit=400)
    s_, _ = integrate.quad(amp, v0, v1, weight="sin", wvar=t, epsabs=DEFAULT.middle_quad_abs * 1e-2, limit=400)
    return complex(c, -s_)


def _qawf(f, weight, t):
    out = integrate.quad(f, 0.0, np.inf, weight=weight, wvar=t, epsabs=1e-14, limlst=200, full_output=1)
    return out[0], out[1]


def _weight_derivative(p, u, s):
    """d/du [tanh(.) u^-s]."""
    L = p.log_T
    w = p.weight(u)
    return (0.5 * p.alpha / (L * u)) * (1.0 - w * w) * u ** (-s) - s * w * u ** (-s - 1.0)


def g_direct(s, p, n_terms=DIRECT_TERMS, margin=0.1):
    """Direct evaluation of g on Re s >= 1 + margin.

    The first ``n_terms`` terms are summed; the rest is replaced by
    int_N^inf - f(N)/2 - f'(N)/12 with the integral done by an oscillatory
    Fourier quadrature in v = log u.

    Raises:
        DomainError: Re s below 1 + margin (or <= 1).
    """
    s = complex(s)
    if s.real <= 1.0 or s.real < 1.0 + margin:
        raise DomainError(f"direct summation needs Re s >= {1.0 + margin}, got {s.real}")
    N = int(n_terms)
    n = np.arange(1, N + 1, dtype=np.float64)
    coeff = -0.5 * p.weight(n)
    partial = complex(kernels.dirichlet_eval(coeff.astype(np.complex128), np.array([s]))[0])
    fN = -0.5 * p.weight(float(N)) * N ** (-s)
    dfN = -0.5 * _weight_derivative(p, float(N), s)
    integral = -0.5 * _log_integral(p, s, math.log(N), math.inf)
    tail = integral - 0.5 * fN - dfN / 12.0
    bound = 0.5 * N ** (1.0 - s.real) / (s.real - 1.0)
    return GDirectResult(partial + tail, partial, tail, bound, N)


def g_direct_reversed(s, p, n_terms=DIRECT_TERMS, margin=0.1):
    """Same truncation as ``g_direct`` but summed from the largest term down,
    in plain Python, as a reordering oracle."""
    ref = g_direct(s, p, n_terms, margin)
    acc = 0j
    for n in range(int(n_terms), 0, -1):
        acc += -0.5 * float(p.weight(float(n))) * complex(n) ** (-s)
    return acc + ref.tail_estimate


def s1_symmetry_defect(u, alpha):
    """|2 e^{a/2} / ((e^{-a(u-1/2)} + 1) e^{a u}) - 2 / (e^{a(u-1/2)} + 1)|.

    The two closed forms are the translated and untranslated weights of a
    single term; they agree identically.
    """
    u = np.asarray(u, dtype=np.float64)
    alpha = np.asarray(alpha, dtype=np.float64)
    lhs = 2.0 * np.exp(alpha / 2.0) / ((np.exp(-alpha * (u - 0.5)) + 1.0) * np.exp(alpha * u))
    rhs = 2.0 / (np.exp(alpha * (u - 0.5)) + 1.0)
    out = np.abs(lhs - rhs)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# analytic continuation
# ---------------------------------------------------------------------------


def _check_strip(s, p, t0):
    if s.real <= 0:
        raise DomainError(f"continuation needs Re s > 0, got {s.real}")
    if not t0 <= abs(s.imag) <= 2.0 * p.T:
        raise DomainError(f"continuation needs {t0} <= |Im s| <= 2T = {2 * p.T}, got {s.imag}")


def _hyp_term(s, p):
    """-2 T^{1-s} L / (alpha (e^{alpha/2}+1) z) F(1, 1; 1 + z; 1/(e^{alpha/2}+1)),
    z = 1 - (1-s) L / alpha."""
    L, a = p.log_T, p.alpha
    z = 1.0 - (1.0 - s) * L / a
    x = 1.0 / (math.exp(a / 2.0) + 1.0)
    F = hyp2f1(HypergeometricQuery(1.0, 1.0, 1.0 + z, x))
    return -2.0 * p.T ** (1.0 - s) * L / (a * (math.exp(a / 2.0) + 1.0) * z) * F


def _psi_integrals(s, p, u_extra=2000):
    """int_{N+1/2}^inf psi(u) d/du[tanh(.) u^-s] du, psi(u) = u - [u] - 1/2.

    Gauss-Legendre on each piece between consecutive integers, where psi is
    linear, up to U, then the Euler-Maclaurin tail -h(U)/12 + h''(U)/720.
    Returns (value, size of the last tail correction).
    """
    N = p.N_truncation
    # next correction ~ |s|^3 U^-(sigma+3) / 720; aim well below 1e-12
    need = 2.0 * (abs(s) ** 3 / (720.0 * 1e-13)) ** (1.0 / (s.real + 3.0))
    U = int(min(max(N + 1 + u_extra, math.ceil(need)), N + PSI_MAX_PIECES))
    x, w = _GL16
    # first piece [N + 1/2, N + 1]
    lo = np.concatenate(([N + 0.5], np.arange(N + 1, U, dtype=np.float64)))
    hi = np.concatenate(([N + 1.0], np.arange(N + 2, U + 1, dtype=np.float64)))
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    u = mid[:, None] + half[:, None] * x[None, :]
    psi = u - np.floor(lo)[:, None] - 0.5
    h = _weight_derivative(p, u, s)
    body = np.sum(half[:, None] * w[None, :] * psi * h)
    hU = _weight_derivative(p, float(U), s)
    d2 = (_weight_derivative(p, U + 1.0, s) - 2.0 * hU + _weight_derivative(p, U - 1.0, s))
    c2 = d2 / 720.0
    return complex(body - hU / 12.0 + c2), abs(c2)


def g_analytic(s, p, t0=1e-3, u_extra=2000, tail_tol=1e-12):
    """g(s) for Re s > 0, t0 <= |Im s| <= 2T, through the five-part
    continuation formula with truncation N = ``p.N_truncation``.

    Negative alpha is handled through g_{-alpha} = -g_alpha.

    Raises:
        DomainError: s outside the admissible strip.
    Warns:
        NumericalWarning: the last Euler-Maclaurin correction of the
            sawtooth integrals exceeds ``tail_tol``.
    """
    s = complex(s)
    _check_strip(s, p, t0)
    if p.alpha < 0:
        return -g_analytic(s, GFunParams(-p.alpha, p.T, p.N_truncation), t0, u_extra, tail_tol)
    N = p.N_truncation
    L = p.log_T
    n = np.arange(1, N + 1, dtype=np.float64)
    head = complex(kernels.dirichlet_eval(p.weight(n).astype(np.complex128), np.array([s]))[0])
    hyp = _hyp_term(s, p)
    pole = p.T ** (1.0 - s) / (s - 1.0)
    middle = _log_integral(p, s, L, math.log(N + 0.5))
    psi_part, last = _psi_integrals(s, p, u_extra)
    if last > tail_tol:
        warnings.warn(f"sawtooth-integral tail correction {last:.2e} exceeds {tail_tol:.0e}", NumericalWarning, stacklevel=2)
    return -0.5 * (head + hyp + pole - middle + psi_part)


@dataclass(frozen=True)
class GApproxResult:
    value: complex
    analytic: complex
    deviation: float
    constant: float  # deviation * T^Re s


def g_approx(s, p, t0=1e-3):
    """Three-term approximation: sum to T, the 2F1 term and T^{1-s}/(s-1).

    The deviation from ``g_analytic`` is recorded together with the
    empirical constant deviation * T^Re s.  As alpha -> 0 the tanh sum
    vanishes and the 2F1 term tends to -T^{1-s}/(s-1), so the result tends
    to 0; alpha = 0 itself is rejected by GFunParams.
    """
    s = complex(s)
    _check_strip(s, p, t0)
    if p.alpha < 0:
        r = g_approx(s, GFunParams(-p.alpha, p.T, p.N_truncation), t0)
        return GApproxResult(-r.value, -r.analytic, r.deviation, r.constant)
    n = np.arange(1, int(math.floor(p.T)) + 1, dtype=np.float64)
    head = complex(kernels.dirichlet_eval(p.weight(n).astype(np.complex128), np.array([s]))[0])
    value = -0.5 * (head + _hyp_term(s, p) + p.T ** (1.0 - s) / (s - 1.0))
    ref = g_analytic(s, p, t0)
    dev = abs(value - ref)
    return GApproxResult(value, ref, dev, dev * p.T ** s.real)


# ---------------------------------------------------------------------------
# sine expansion of tanh(alpha x / 2) on (0, pi)
# ---------------------------------------------------------------------------


def _check_terms(K):
    if int(K) != K or not 1 <= K <= MAX_SINE_TERMS:
        raise DomainError(f"number of sine terms must lie in [1, {MAX_SINE_TERMS}], got {K}")
    return int(K)


def _odd_indicator(k):
    return (1 - (-1) ** k) / k


def fourier_beta_part(alpha, K):
    """beta_k = -(4/pi) int_0^pi sin(kx) / (e^{alpha x} + 1) dx, k = 1..K,
    through the incomplete-beta closed form."""
    K = _check_terms(K)
    if alpha == 0:
        raise DomainError("alpha must be nonzero")
    if alpha < 0:
        # 1/(e^{-a x}+1) = 1 - 1/(e^{a x}+1)
        pos = fourier_beta_part(-alpha, K)
        return np.array([-4.0 / math.pi * _odd_indicator(k) for k in range(1, K + 1)]) - pos
    x0 = 1.0 / (math.exp(alpha * math.pi) + 1.0)
    out = np.empty(K)
    for k in range(1, K + 1):
        a = complex(1.0, -k / alpha)
        b = complex(0.0, k / alpha)
        diff = incomplete_beta(0.5, a, b) - incomplete_beta(x0, a, b)
        out[k - 1] = -4.0 / (math.pi * alpha) * diff.imag
    return out


def fourier_beta_part_quadrature(alpha, K):
    """Oracle for ``fourier_beta_part`` by adaptive oscillatory quadrature."""
    K = _check_terms(K)
    f = lambda x: 1.0 / (math.exp(alpha * x) + 1.0)  # noqa: E731
    out = np.empty(K)
    for k in range(1, K + 1):
        v, _ = integrate.quad(f, 0.0, math.pi, weight="sin", wvar=k, epsabs=1e-14, epsrel=1e-13, limit=200)
        out[k - 1] = -4.0 / math.pi * v
    return out


def fourier_tanh_coefficients(alpha, K):
    """Sine coefficients b_1..b_K of tanh(alpha x / 2) on (0, pi)."""
    K = _check_terms(K)
    if alpha == 0:
        return np.zeros(K)
    ones = np.array([2.0 / math.pi * _odd_indicator(k) for k in range(1, K + 1)])
    return ones + fourier_beta_part(alpha, K)


def fourier_reconstruction(b, x):
    """sum_k b_k sin(k x)."""
    x = np.asarray(x, dtype=np.float64)
    k = np.arange(1, len(b) + 1, dtype=np.float64)
    return np.sin(np.multiply.outer(x, k)) @ np.asarray(b)


@dataclass(frozen=True)
class FourierTanhExpansion:
    """b_1..b_K and the degree 2M-1 odd polynomial q in (x - 1/2)."""

    alpha: float
    K: int
    M: int
    b: np.ndarray
    q: RealPolynomial

    def __post_init__(self):
        if self.q.center != 0.5 or any(self.q.coeffs[0::2]):
            raise DomainError("q must be odd in (x - 1/2)")


def q_poly_from_expansion(alpha, K, M, b=None):
    """q(x) = -1/2 sum_k b_k sum_{m<=M} (-1)^{m-1} k^{2m-1} / (2m-1)! (x - 1/2)^{2m-1}.

    Returned in powers of (x - 1/2); ``.monomial()`` gives powers of x.
    The factors k^{2m-1} / (2m-1)! are formed in log space.
    """
    K = _check_terms(K)
    if int(M) != M or M < 1:
        raise DomainError(f"M must be a positive integer, got {M}")
    M = int(M)
    b = fourier_tanh_coefficients(alpha, K) if b is None else np.asarray(b, dtype=np.float64)
    logk = np.log(np.arange(1, K + 1, dtype=np.float64))
    coeffs = np.zeros(2 * M)
    for m in range(1, M + 1):
        d = 2 * m - 1
        fac = np.exp(d * logk - math.lgamma(d + 1))
        coeffs[d] = -0.5 * (-1.0) ** (m - 1) * math.fsum(b * fac)
    return RealPolynomial(tuple(coeffs), 0.5)


def fourier_tanh_expansion(alpha, K, M):
    b = fourier_tanh_coefficients(alpha, K)
    return FourierTanhExpansion(alpha, int(K), int(M), b, q_poly_from_expansion(alpha, K, M, b))


# ---------------------------------------------------------------------------
# odd xi-derivatives
# ---------------------------------------------------------------------------


def xi_dictionary_coefficients(q, log_T):
    """Real g_{2m-1} with sum_m g_{2m-1} xi^{(2m-1)} matching 2 H sum q(.) l^-s.

    Differentiating H(s) l^-s k times multiplies it, to leading order, by
    (log(s/2pi)/2 - log l)^k = (-log T)^k (x_l + delta - 1/2)^k, so a term
    c (x - 1/2)^k of q pairs with 2 c (-1/log T)^k times the k-th derivative.
    """
    if q.center != 0.5:
        q = q.recenter(0.5)
    c = q.coeffs
    return {k: 2.0 * c[k] * (-1.0 / log_T) ** k for k in range(1, len(c), 2)}


@dataclass(frozen=True)
class XiMatch:
    lhs: complex
    rhs: complex
    rel_error: float
    coefficients: dict


def xi_odd_derivative_match(s, alpha, T, M, K=None, A=3.0):
    """Compare 2 H(s) sum_{l<=T} q(log l / log T + delta(s)) l^-s with
    sum_m g_{2m-1} xi^{(2m-1)}(s), delta(s) = log(2 pi T / s) / (2 log T).

    ``K`` defaults to 2M - 1 sine terms: the degree 2M - 1 Taylor polynomial
    of sin(kx) is only faithful on |x| <= 1/2 for k of that order, and larger
    K loads q onto high derivative orders where the l = T boundary of the
    truncated sum (size ~ T^(1/2 - Re s) log^k T) dominates the mismatch.

    Raises:
        DomainError: s outside 1/3 <= Re s <= A, T <= Im s <= 2T, or T < 2A,
            or M > 12.
    """
    s = complex(s)
    if int(M) != M or not 1 <= M <= MAX_XI_ORDER:
        raise DomainError(f"M must lie in [1, {MAX_XI_ORDER}], got {M}")
    if A < 3 or T < 2 * A:
        raise DomainError("need A >= 3 and T >= 2A")
    if not (1.0 / 3.0 <= s.real <= A and T <= s.imag <= 2.0 * T):
        raise DomainError(f"s = {s} outside the rectangle 1/3 <= Re s <= {A}, {T} <= Im s <= {2 * T}")
    K = 2 * int(M) - 1 if K is None else K
    L = math.log(T)
    if alpha == 0:
        q = RealPolynomial((0.0,), 0.5)
    else:
        q = q_poly_from_expansion(alpha, K, M)
    coeffs = xi_dictionary_coefficients(q, L)
    if q.is_zero:
        return XiMatch(0j, 0j, 0.0, coeffs)
    delta = np.log(2.0 * math.pi * T / s) / (2.0 * L)
    n = np.arange(1, int(math.floor(T)) + 1, dtype=np.float64)
    a = q(np.log(n) / L + delta).astype(np.complex128)
    lhs = 2.0 * h_factor(s) * complex(kernels.dirichlet_eval(a, np.array([s]))[0])
    rhs = 0j
    for k, g in coeffs.items():
        if g != 0.0:
            rhs += g * xi_derivative(s, k)
    scale = max(abs(lhs), abs(rhs))
    return XiMatch(lhs, rhs, abs(lhs - rhs) / scale if scale else 0.0, coeffs)


# ---------------------------------------------------------------------------
# tables
# ---------------------------------------------------------------------------


def _fmt(x):
    return format(float(x), ".17g")


def gfun_table_csv(points, p):
    """One row per s: continuation, approximate equation and, where
    Re s >= 1.1, the direct sum."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(("re_s", "im_s", "analytic_re", "analytic_im", "approx_re", "approx_im",
                "approx_constant", "direct_re", "direct_im", "rel_diff_direct"))
    for s in points:
        s = complex(s)
        ap = g_approx(s, p)
        ga = ap.analytic
        row = [_fmt(s.real), _fmt(s.imag), _fmt(ga.real), _fmt(ga.imag), _fmt(ap.value.real),
               _fmt(ap.value.imag), _fmt(ap.constant)]
        if s.real >= 1.1:
            gd = g_direct(s, p).value
            row += [_fmt(gd.real), _fmt(gd.imag), _fmt(abs(gd - ga) / abs(gd))]
        else:
            row += ["", "", ""]
        w.writerow(row)
    return buf.getvalue()


def bk_table_csv(alpha, K):
    """k, b_k, the incomplete-beta part and its quadrature oracle."""
    beta = fourier_beta_part(alpha, K)
    quad = fourier_beta_part_quadrature(alpha, K)
    full = fourier_tanh_coefficients(alpha, K)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(("k", "b_k", "beta_part", "beta_part_quadrature", "abs_diff"))
    for k in range(K):
        w.writerow((k + 1, _fmt(full[k]), _fmt(beta[k]), _fmt(quad[k]), _fmt(abs(beta[k] - quad[k]))))
    return buf.getvalue()
