"""Odd-derivative shift calculus.

f(s + ds) = f(s) + sum_{k odd <= K} g_k(ds) (f^(k)(s) + f^(k)(s + ds)) + remainder,

with g_k(ds) = -(ds/2)^k (2^(k+1) - 4^(k+1)) B_(k+1) / (k+1)! and the
remainder an integral of f^(K+2) against a sine series along [s, s + ds].
Also: the tanh limit of the g_k series and the ratio H(s + ds) / H(s).
"""

import cmath
import csv
import math
import warnings
from dataclasses import dataclass
from math import factorial
from typing import Callable

import numpy as np

from .constants import DEFAULT
from .errors import DomainError, MollicritError, NumericalWarning
from .specfun import bernoulli_table, zeta_even
from .zetakernel import cauchy_derivative, log_h_factor, zeta_array

__all__ = [
    "ShiftParams",
    "AnalyticProbe",
    "ProbeInconsistency",
    "ShiftIdentityTerms",
    "HRatioReport",
    "g_coefficient",
    "g_coefficient_series",
    "shift_identity_terms",
    "shift_identity_residual",
    "tanh_series_sum",
    "tanh_series_in_disk",
    "h_ratio_check",
    "residual_sweep",
    "write_residual_csv",
    "probe_constant",
    "probe_linear",
    "probe_exp",
    "probe_sin",
    "probe_zeta",
]


class ProbeInconsistency(MollicritError):
    """An AnalyticProbe's derivative does not match its values."""


@dataclass(frozen=True)
class ShiftParams:
    """alpha, T and the odd truncation order K; delta_sigma = alpha / log T."""

    alpha: float
    T: float
    K: int = 1

    def __post_init__(self):
        if not self.T > math.e:
            raise DomainError(f"T must exceed e, got {self.T}")
        if int(self.K) != self.K or self.K < 1 or self.K % 2 == 0:
            raise DomainError(f"K must be an odd positive integer, got {self.K}")

    @property
    def log_T(self):
        return math.log(self.T)

    @property
    def delta_sigma(self):
        return self.alpha / math.log(self.T)

    @classmethod
    def from_delta_sigma(cls, ds, T=math.e ** 2, K=1):
        """Parameters whose delta_sigma equals ``ds`` (default log T = 2)."""
        return cls(alpha=ds * math.log(T), T=T, K=K)


# ---------------------------------------------------------------------------
# coefficients
# ---------------------------------------------------------------------------


def _check_odd(k):
    if int(k) != k or k < 1 or k % 2 == 0:
        raise DomainError(f"k must be an odd positive integer, got {k}")
    if k > 63:
        raise DomainError(f"k <= 63 supported, got {k}")
    return int(k)


def g_coefficient(k, ds):
    """Closed form -(ds/2)^k (2^(k+1) - 4^(k+1)) B_(k+1) / (k+1)!; g_1 = ds/2."""
    k = _check_odd(k)
    B = bernoulli_table().values[k + 1]
    return -((ds / 2.0) ** k) * (2.0 ** (k + 1) - 4.0 ** (k + 1)) * B / factorial(k + 1)


def g_coefficient_series(k, ds):
    """4 (-1)^((k-1)/2) ds^k / pi^(k+1) * sum_{n odd} n^-(k+1), the odd sum
    taken as (1 - 2^-(k+1)) zeta(k+1)."""
    k = _check_odd(k)
    sign = -1.0 if ((k - 1) // 2) % 2 else 1.0
    odd_sum = zeta_even(k + 1) * (1.0 - 2.0 ** -(k + 1))
    return 4.0 * sign * ds ** k / math.pi ** (k + 1) * odd_sum


# ---------------------------------------------------------------------------
# probes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AnalyticProbe:
    """An analytic test function with exact (or contour) derivatives.

    ``evaluator`` and ``derivative_evaluator`` accept complex numpy arrays.
    """

    evaluator: Callable
    derivative_evaluator: Callable
    description: str

    def __call__(self, s):
        return self.evaluator(s)

    def derivative(self, s, order):
        return self.derivative_evaluator(s, order)

    def check(self, points, h=1e-5, rtol=1e-6):
        """Verify order-0 agreement and a central-difference first derivative.

        Raises:
            ProbeInconsistency: either check fails at some point.
        """
        pts = np.atleast_1d(np.asarray(points, dtype=np.complex128))
        f0 = np.asarray(self.evaluator(pts), dtype=np.complex128)
        d0 = np.asarray(self.derivative_evaluator(pts, 0), dtype=np.complex128)
        if not np.allclose(f0, d0, rtol=1e-12, atol=1e-300):
            raise ProbeInconsistency(f"{self.description}: derivative of order 0 differs from the function")
        d1 = np.asarray(self.derivative_evaluator(pts, 1), dtype=np.complex128)
        fd = (np.asarray(self.evaluator(pts + h)) - np.asarray(self.evaluator(pts - h))) / (2 * h)
        scale = np.maximum(np.abs(d1), np.abs(f0))
        bad = np.abs(fd - d1) > rtol * np.maximum(scale, 1e-300)
        if np.any(bad & (scale > 0)):
            raise ProbeInconsistency(f"{self.description}: first derivative fails the finite-difference check")


def probe_constant(c=5.0):
    def f(s):
        return np.full(np.shape(s), complex(c))

    def d(s, k):
        return f(s) if k == 0 else np.zeros(np.shape(s), dtype=np.complex128)

    return AnalyticProbe(f, d, f"constant {c}")


def probe_linear(a=1.0, b=0.0):
    def f(s):
        return a * np.asarray(s, dtype=np.complex128) + b

    def d(s, k):
        if k == 0:
            return f(s)
        return np.full(np.shape(s), complex(a) if k == 1 else 0j)

    return AnalyticProbe(f, d, f"linear {a}*s+{b}")


def probe_exp(scale=1.0):
    def f(s):
        return np.exp(scale * np.asarray(s, dtype=np.complex128))

    def d(s, k):
        return scale ** k * f(s)

    return AnalyticProbe(f, d, f"exp({scale}*s)")


def probe_sin():
    def f(s):
        return np.sin(np.asarray(s, dtype=np.complex128))

    def d(s, k):
        s = np.asarray(s, dtype=np.complex128)
        return (np.sin, np.cos, lambda x: -np.sin(x), lambda x: -np.cos(x))[k % 4](s)

    return AnalyticProbe(f, d, "sin(s)")


def probe_zeta(shift=2.0, radius=0.25):
    """zeta(s + shift); derivatives by contour integration."""

    def f(s):
        return zeta_array(np.asarray(s, dtype=np.complex128) + shift)

    def d(s, k):
        s = np.atleast_1d(np.asarray(s, dtype=np.complex128))
        if k == 0:
            return f(s)
        return np.array([cauchy_derivative(f, x, k, radius) for x in s])

    return AnalyticProbe(f, d, f"zeta(s+{shift})")


# ---------------------------------------------------------------------------
# shift identity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ShiftIdentityTerms:
    lhs: complex          # f(s + ds)
    head: complex         # f(s) + odd-derivative sum
    remainder: complex    # sine-series integral term, fine quadrature
    remainder_coarse: complex
    sine_tail_bound: float

    @property
    def residual(self):
        return abs(self.lhs - self.head - self.remainder)

    @property
    def truncation(self):
        """|f(s + ds) - head|: what the finite derivative sum leaves out."""
        return abs(self.lhs - self.head)

    @property
    def quadrature_change(self):
        return abs(self.remainder - self.remainder_coarse)


def _sine_kernel(u, p, n_terms):
    # sum_{n<=N} sin((2n-1) pi (1-u)) / (2n-1)^p
    m = 2.0 * np.arange(1, n_terms + 1) - 1.0
    return np.sin(np.outer(1.0 - u, m) * np.pi) @ (m ** -p)


def _remainder(f, s, ds, K, n_terms, nodes):
    x, w = np.polynomial.legendre.leggauss(nodes)
    u = 0.5 * (x + 1.0)
    w = 0.5 * w
    pts = s + ds * u
    fk = np.asarray(f.derivative(pts, K + 2), dtype=np.complex128)
    ker = _sine_kernel(u, K + 2, n_terms)
    sign = -1.0 if ((K + 1) // 2) % 2 else 1.0
    pref = 4.0 * sign * ds ** (K + 1) / math.pi ** (K + 2)
    return pref * ds * np.sum(w * fk * ker)


def shift_identity_terms(f, s, p, n_sin=None, nodes=None):
    """All pieces of the shift identity for probe ``f`` at ``s``.

    The remainder integral uses Gauss-Legendre quadrature on ``nodes`` and
    ``2 * nodes`` points with the sine series cut at ``n_sin`` terms.
    """
    n_sin = DEFAULT.sine_terms if n_sin is None else n_sin
    nodes = DEFAULT.gauss_nodes if nodes is None else nodes
    s = complex(s)
    ds = p.delta_sigma
    K = p.K
    both = np.array([s, s + ds])
    lhs = complex(np.asarray(f(np.array([s + ds])))[0])
    head = complex(np.asarray(f(np.array([s])))[0])
    for k in range(1, K + 1, 2):
        dk = np.asarray(f.derivative(both, k), dtype=np.complex128)
        head += g_coefficient(k, ds) * (dk[0] + dk[1])
    if ds == 0:
        rem = rem_c = 0j
    else:
        rem = complex(_remainder(f, s, ds, K, n_sin, 2 * nodes))
        rem_c = complex(_remainder(f, s, ds, K, n_sin, nodes))
    tail = (2.0 * n_sin + 1.0) ** -(K + 1) / (2.0 * (K + 1))
    return ShiftIdentityTerms(lhs, head, rem, rem_c, tail)


def shift_identity_residual(f, s, p, n_sin=None, nodes=None, check_probe=True):
    """|f(s+ds) - f(s) - derivative sum - remainder| for an AnalyticProbe.

    Raises:
        ProbeInconsistency: the probe fails its self-check at s.
    """
    if check_probe:
        f.check(np.array([complex(s), complex(s) + p.delta_sigma]))
    return shift_identity_terms(f, s, p, n_sin, nodes).residual


# ---------------------------------------------------------------------------
# tanh series
# ---------------------------------------------------------------------------


def tanh_series_in_disk(x, alpha):
    """True where |alpha (1/2 - x)| < pi, the convergence disk of the series."""
    return np.abs(alpha * (0.5 - np.asarray(x, dtype=np.float64))) < math.pi


def tanh_series_sum(x, alpha, K_max):
    """sum_{k odd <= K_max} (-g_k(ds)) (log T)^k (1/2 - x)^k.

    g_k(ds) (log T)^k = g_k(alpha) because g_k is homogeneous of degree k in
    ds and ds log T = alpha, so T drops out.  The partial sums tend to
    -tanh(alpha/2 (1/2 - x)) when |alpha (1/2 - x)| < pi.

    Accepts scalar or array ``x``.
    """
    K_max = _check_odd(K_max)
    xa = np.asarray(x, dtype=np.float64)
    if not np.all(tanh_series_in_disk(xa, alpha)):
        warnings.warn(
            f"tanh series diverges where |alpha (1/2 - x)| >= pi (alpha={alpha})",
            NumericalWarning,
            stacklevel=2,
        )
    y = 0.5 - xa
    total = np.zeros_like(y)
    for k in range(K_max, 0, -2):
        total = total - g_coefficient(k, alpha) * y ** k
    return float(total) if np.ndim(total) == 0 else total


# ---------------------------------------------------------------------------
# H ratio
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HRatioReport:
    ratio: complex
    deviation: float
    log_T: float

    @property
    def empirical_constant(self):
        """deviation * log T; the O(1/log T) constant seen at this point."""
        return self.deviation * self.log_T


def h_ratio_check(s, p, A=3.0):
    """H(s + ds) / H(s) against e^(alpha/2) inside the rectangle
    1/3 <= Re s <= A, T <= Im s <= 2T (A >= 3, T >= 2A).

    Raises:
        DomainError: s or (A, T) outside the admissible rectangle.
    """
    s = complex(s)
    if A < 3 or p.T < 2 * A:
        raise DomainError(f"need A >= 3 and T >= 2A, got A={A}, T={p.T}")
    if not (1.0 / 3.0 <= s.real <= A and p.T <= s.imag <= 2.0 * p.T):
        raise DomainError(f"s={s} outside the rectangle for T={p.T}, A={A}")
    ds = p.delta_sigma
    if ds == 0:
        ratio = 1.0 + 0j
    else:
        ratio = cmath.exp(log_h_factor(s + ds) - log_h_factor(s))
    return HRatioReport(ratio=ratio, deviation=abs(ratio - math.exp(p.alpha / 2.0)), log_T=p.log_T)


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------

SWEEP_COLUMNS = ("probe", "s_re", "s_im", "alpha", "K", "residual")


def residual_sweep(probes, points, params):
    """Residual rows for every (probe, s, ShiftParams) combination."""
    rows = []
    for f in probes:
        for s in points:
            for p in params:
                r = shift_identity_residual(f, s, p, check_probe=False)
                rows.append((f.description, complex(s).real, complex(s).imag, p.alpha, p.K, r))
    return rows


def write_residual_csv(rows, fh):
    w = csv.writer(fh, lineterminator="\r\n")
    w.writerow(SWEEP_COLUMNS)
    for probe, sr, si, alpha, K, r in rows:
        w.writerow([probe, format(sr, ".17g"), format(si, ".17g"), format(alpha, ".17g"), K, format(r, ".17g")])
