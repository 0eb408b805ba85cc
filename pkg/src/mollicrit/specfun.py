"""Complex special functions: Gamma, log-Gamma, 2F1, incomplete beta,
Bernoulli numbers and zeta at even integers.

Double precision throughout.  Bernoulli numbers are generated exactly with
``fractions.Fraction`` and rounded once.
"""

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

from .constants import DEFAULT
from .errors import ConvergenceError, DomainError, PoleError

__all__ = [
    "BernoulliTable",
    "HypergeometricQuery",
    "bernoulli_table",
    "bernoulli",
    "gamma_complex",
    "loggamma_complex",
    "hyp2f1",
    "incomplete_beta",
    "beta_complex",
    "zeta_even",
]

BERNOULLI_MAX = 80

# Godfrey's Lanczos coefficients, g = 607/128, 15 terms
_LANCZOS_G = 607.0 / 128.0
_LANCZOS_C = (
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


@dataclass(frozen=True)
class BernoulliTable:
    """B_0..B_max with the B_1 = -1/2 convention.

    ``exact`` holds the rationals, ``values`` their nearest doubles.
    """

    exact: tuple
    values: tuple

    @property
    def max_index(self):
        return len(self.values) - 1

    def __getitem__(self, m):
        return self.values[m]

    def recurrence_defect(self, m):
        """Relative size of sum_{j<=m} C(m+1, j) B_j evaluated in floats."""
        terms = [comb(m + 1, j) * self.values[j] for j in range(m + 1)]
        scale = max(abs(t) for t in terms)
        return abs(math.fsum(terms)) / scale


@lru_cache(maxsize=None)
def bernoulli_table(max_index=BERNOULLI_MAX):
    B = [Fraction(1)]
    for m in range(1, max_index + 1):
        acc = sum((comb(m + 1, j) * B[j] for j in range(m)), Fraction(0))
        B.append(-acc / (m + 1))
    return BernoulliTable(exact=tuple(B), values=tuple(float(b) for b in B))


def bernoulli(m):
    if m < 0:
        raise DomainError("Bernoulli index must be non-negative")
    table = bernoulli_table(max(BERNOULLI_MAX, m))
    return table.values[m]


@dataclass(frozen=True)
class HypergeometricQuery:
    a: complex
    b: complex
    c: complex
    z: complex

    def __post_init__(self):
        if _is_nonpositive_integer(self.c):
            raise DomainError(f"2F1 parameter c={self.c} is a non-positive integer")
        if abs(self.z) >= 1.0:
            raise ConvergenceError(f"2F1 series needs |z| < 1, got |z|={abs(self.z)}")


def _is_nonpositive_integer(x):
    x = complex(x)
    return x.imag == 0.0 and x.real <= 0.0 and x.real == math.floor(x.real)


# ---------------------------------------------------------------------------
# Gamma
# ---------------------------------------------------------------------------


def log_sin_pi(z):
    """log(sin(pi z)) without overflow for large |Im z| (branch mod 2 pi i)."""
    y = z.imag
    if abs(y) < 20.0:
        return cmath.log(cmath.sin(math.pi * z))
    if y > 0:
        # sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 i pi z})
        return cmath.log(0.5j) - 1j * math.pi * z + cmath.log(1.0 - cmath.exp(2j * math.pi * z))
    return cmath.log(-0.5j) + 1j * math.pi * z + cmath.log(1.0 - cmath.exp(-2j * math.pi * z))


def _lanczos_log(z):
    # log Gamma(z) for Re z >= 1/2, branch irrelevant to callers that exponentiate
    z = z - 1.0
    x = _LANCZOS_C[0]
    for k in range(1, len(_LANCZOS_C)):
        x += _LANCZOS_C[k] / (z + k)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * cmath.log(t) - t + cmath.log(x)


def gamma_complex(s):
    """Gamma(s) by the Lanczos approximation, reflected for Re s < 1/2.

    Raises:
        PoleError: s is 0, -1, -2, ...
    """
    s = complex(s)
    if _is_nonpositive_integer(s):
        raise PoleError(f"Gamma has a pole at {s.real:g}")
    if s.real < 0.5:
        return cmath.exp(math.log(math.pi) - log_sin_pi(s) - _lanczos_log(1.0 - s))
    if s.imag == 0.0 and s.real < 171.0:
        # keep real results real
        return complex(math.exp(_lanczos_log(s).real), 0.0)
    return cmath.exp(_lanczos_log(s))


_STIRLING = None


def _stirling_coeffs():
    global _STIRLING
    if _STIRLING is None:
        tab = bernoulli_table()
        _STIRLING = tuple(tab.values[2 * j] / (2 * j * (2 * j - 1)) for j in range(1, 13))
    return _STIRLING


def loggamma_complex(z):
    """Principal-branch log Gamma(z): continuous off the negative real axis
    and satisfying loggamma(z + 1) = log z + loggamma(z).

    Independent of ``gamma_complex``: upward recurrence followed by the
    Stirling series with 12 Bernoulli corrections.
    """
    z = complex(z)
    if _is_nonpositive_integer(z):
        raise PoleError(f"Gamma has a pole at {z.real:g}")
    target = 15.0 if abs(z.imag) < 15.0 else 0.0
    shift = 0.0
    n = max(0, math.ceil(target - z.real))
    for k in range(n):
        shift += cmath.log(z + k)
    w = z + n
    inv = 1.0 / w
    inv2 = inv * inv
    series = 0.0
    p = inv
    for c in _stirling_coeffs():
        series += c * p
        p *= inv2
    return (w - 0.5) * cmath.log(w) - w + _HALF_LOG_2PI + series - shift


def beta_complex(a, b):
    """Complete beta B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b)."""
    a, b = complex(a), complex(b)
    return cmath.exp(loggamma_complex(a) + loggamma_complex(b) - loggamma_complex(a + b))


# ---------------------------------------------------------------------------
# 2F1 and incomplete beta
# ---------------------------------------------------------------------------


def hyp2f1(q, tol=None, max_terms=None):
    """Gauss 2F1(a, b; c; z) by its power series, |z| < 1.

    The sum stops once the geometric bound |term| rho / (1 - rho) on the
    remaining tail falls below ``tol`` times the running sum, where rho
    bounds all later term ratios.
    """
    if not isinstance(q, HypergeometricQuery):
        q = HypergeometricQuery(*q)
    tol = DEFAULT.hyp2f1_tail if tol is None else tol
    max_terms = DEFAULT.hyp2f1_max_terms if max_terms is None else max_terms
    a, b, c, z = complex(q.a), complex(q.b), complex(q.c), complex(q.z)
    if z == 0:
        return 1.0 + 0.0j
    az = abs(z)
    total = 1.0 + 0.0j
    term = 1.0 + 0.0j
    n_mono = abs(a) + abs(b) + abs(c) + 2.0
    for n in range(max_terms):
        ratio = (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z
        term = term * ratio
        total += term
        if term == 0:
            return total
        if n + 1 > n_mono:
            r_next = abs((a + n + 1) * (b + n + 1) / ((c + n + 1) * (n + 2.0))) * az
            rho = max(r_next, az)
            if rho < 1.0 and abs(term) * rho / (1.0 - rho) <= tol * max(abs(total), 1e-300):
                return total
    raise ConvergenceError(f"2F1 series did not converge in {max_terms} terms (a={a}, b={b}, c={c}, z={z})")


def incomplete_beta(x, a, b):
    """B_x(a, b) = integral_0^x w^(a-1) (1-w)^(b-1) dw for complex a, b.

    Uses B_x(a, b) = x^a (1-x)^b / a * 2F1(a+b, 1; a+1; x) for x <= 1/2 and
    for x > 1/2 the complement B(a, b) - B_{1-x}(b, a) when Re a, Re b > 0.

    Raises:
        DomainError: x outside [0, 1], or a combination with a divergent
            defining integral.
    """
    x = float(x)
    a, b = complex(a), complex(b)
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"incomplete beta needs x in [0, 1], got {x}")
    if x == 0.0:
        if a.real <= 0:
            raise DomainError("B_0(a, b) diverges for Re a <= 0")
        return 0.0j
    if x == 1.0:
        if a.real <= 0 or b.real <= 0:
            raise DomainError("complete beta needs Re a > 0 and Re b > 0")
        return beta_complex(a, b)
    if x > 0.5 and a.real > 0 and b.real > 0:
        return beta_complex(a, b) - _beta_series(1.0 - x, b, a)
    return _beta_series(x, a, b)


def _beta_series(x, a, b):
    if _is_nonpositive_integer(a):
        raise DomainError(f"incomplete beta undefined for a={a}")
    pref = cmath.exp(a * math.log(x) + b * math.log1p(-x)) / a
    return pref * hyp2f1(HypergeometricQuery(a + b, 1.0, a + 1.0, x))


# ---------------------------------------------------------------------------
# zeta at even integers
# ---------------------------------------------------------------------------


def zeta_even(k):
    """zeta(k) = (-1)^(k/2+1) B_k (2 pi)^k / (2 k!) for even 2 <= k <= 66."""
    if int(k) != k or k % 2 or not 2 <= k <= 66:
        raise DomainError(f"zeta_even needs an even integer in [2, 66], got {k}")
    k = int(k)
    tab = bernoulli_table()
    sign = -1 if (k // 2) % 2 == 0 else 1
    return sign * tab.values[k] * (2.0 * math.pi) ** k / (2.0 * math.factorial(k))
