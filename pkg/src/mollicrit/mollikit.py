"""Mollifier polynomials and Dirichlet polynomials.

Polynomial families on x = log l / log T:

* ``q_one_poly``  1/2 + eps1 Q0(x) + S_K(x)
* ``q_big_poly``  1/2 - S_K(x)

where S_K is the odd polynomial in (1 - 2x)

    S_K(x) = (2/pi) sum_{k odd <= K} (alpha / 2pi)^k (-1)^((k-1)/2)
             zeta(k+1) (1 - 2^-(k+1)) (1 - 2x)^k,

which tends to -tanh(alpha/2 (x - 1/2)) / 2 as K grows (|alpha| < 2 pi).
The factor (sgn alpha)^k (1 - eps/2pi)^k of the two-parameter form is
(alpha/2pi)^k once eps = 2 pi - |alpha|.

The mollifier has two parts: mu(m) P1(log(y/m)/log y) for m <= y = T^theta,
and, for m <= y1 = T^theta1, prime-tuple sums weighted by
prod log p_i / log^j y1 times P_j(log(y1/m)/log y1).  Prime tuples are
ordered: a set of j distinct primes dividing m contributes j! times.
"""

import csv
import io
import math
import struct
from dataclasses import dataclass, field, replace
from functools import cached_property
from math import factorial

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import kernels
from .errors import ConfigError, DomainError
from .specfun import zeta_even

__all__ = [
    "RealPolynomial",
    "MollifierConfig",
    "DirichletPolynomial",
    "ArithmeticTables",
    "feng_polynomials_default",
    "tanh_part",
    "q_big_poly",
    "q_one_poly",
    "q_one_limit",
    "q_big_limit",
    "calibrate_epsilon1",
    "tilde_q_symmetry_defect",
    "elementary_symmetric",
    "mollifier_coefficients",
    "g_dirichlet_poly",
    "g_dirichlet_poly_translated",
    "evaluate_dirichlet",
    "identity_polynomial",
    "DP_MAGIC",
]


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RealPolynomial:
    """sum_j coeffs[j] (x - center)^j with real coefficients.

    A nonzero ``center`` keeps high-degree expansions about 1/2 well
    conditioned; converting those to powers of x loses many digits.
    """

    coeffs: tuple
    center: float = 0.0

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=np.float64))
        nz = np.nonzero(c)[0]
        c = c[: nz[-1] + 1] if nz.size else np.zeros(1)
        object.__setattr__(self, "coeffs", tuple(float(v) for v in c))
        object.__setattr__(self, "center", float(self.center))

    @classmethod
    def from_numpy(cls, p, center=0.0):
        return cls(tuple(np.asarray(p.coef if hasattr(p, "coef") else p, dtype=np.float64)), center)

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def is_zero(self):
        return self.coeffs == (0.0,)

    def __call__(self, x):
        """Horner evaluation; ``x`` may be a scalar or array, real or complex."""
        u = np.asarray(x) - self.center
        acc = np.zeros_like(u, dtype=np.result_type(u, np.float64)) + self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * u + c
        return acc[()] if acc.ndim == 0 else acc

    def _same_center(self, other):
        if self.center != other.center:
            other = other.recenter(self.center)
        return other

    def __add__(self, other):
        if not isinstance(other, RealPolynomial):
            other = RealPolynomial((float(other),), self.center)
        other = self._same_center(other)
        return RealPolynomial(tuple(npoly.polyadd(self.coeffs, other.coeffs)), self.center)

    __radd__ = __add__

    def __neg__(self):
        return RealPolynomial(tuple(-c for c in self.coeffs), self.center)

    def __sub__(self, other):
        return self + (-other if isinstance(other, RealPolynomial) else -float(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, RealPolynomial):
            other = self._same_center(other)
            return RealPolynomial(tuple(npoly.polymul(self.coeffs, other.coeffs)), self.center)
        return RealPolynomial(tuple(c * float(other) for c in self.coeffs), self.center)

    __rmul__ = __mul__

    def recenter(self, center):
        """Same polynomial written in powers of (x - center)."""
        shift = center - self.center
        # (x - c_old) = (x - c_new) + shift
        out = np.zeros(1)
        base = np.array([shift, 1.0])
        power = np.ones(1)
        for c in self.coeffs:
            out = npoly.polyadd(out, c * power)
            power = npoly.polymul(power, base)
        return RealPolynomial(tuple(out), center)

    def monomial(self):
        """Coefficients in powers of x."""
        return self.recenter(0.0).coeffs


def identity_polynomial():
    return RealPolynomial((0.0, 1.0))


def _feng_p1():
    x = npoly.Polynomial([0.0, 1.0])
    one_minus = npoly.Polynomial([1.0, -1.0])
    weights = (0.138173, -0.445606, -4.039834, 7.506942, -3.239261)
    p = x.copy()
    for j, w in enumerate(weights, start=1):
        p = p + w * x * one_minus ** j
    return RealPolynomial.from_numpy(p)


def _feng_q_tilde():
    # 1 - 0.6684x - 1.0798(x^2/2 - x^3/3) - 5.0447(x^3/3 - x^4/2 + x^5/5)
    c = np.zeros(6)
    c[0] = 1.0
    c[1] = -0.6684
    c[2] = -1.0798 / 2.0
    c[3] = 1.0798 / 3.0 - 5.0447 / 3.0
    c[4] = 5.0447 / 2.0
    c[5] = -5.0447 / 5.0
    return RealPolynomial(tuple(c))


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

_TOL = 1e-12


@dataclass(frozen=True)
class MollifierConfig:
    """Parameters of G, the mollifier M and F = G M.

    ``epsilon1 = None`` means: calibrate so that Q_1(0) = 1 at the finite K.
    ``Q0 = None`` means 2 Q_tilde - 1.  ``kind`` selects ``"feng"`` or
    ``"identity"`` (M = 1); ``g_kind`` selects ``"q1"``, ``"translated"``
    (see ``g_dirichlet_poly_translated``) or ``"identity"`` (G = 1); the
    identity choices exist to exercise the pipeline.
    """

    T: float
    P: tuple
    Q_tilde: RealPolynomial
    theta: float = 4.0 / 7.0
    theta1: float = 0.5
    R: float = 1.3025
    alpha: float = 0.1
    K: int = 5
    K0: int = 5
    epsilon1: float = None
    Q0: RealPolynomial = None
    kind: str = "feng"
    g_kind: str = "q1"
    delta_mode: str = "zero"

    @property
    def I(self):
        return len(self.P)

    @property
    def log_T(self):
        return math.log(self.T)

    @property
    def y(self):
        return self.T ** self.theta

    @property
    def y1(self):
        return self.T ** self.theta1

    @property
    def a(self):
        """Abscissa 1/2 - R / log T of the integration line."""
        return 0.5 - self.R / self.log_T

    @property
    def Q0_resolved(self):
        return self.Q0 if self.Q0 is not None else 2.0 * self.Q_tilde - 1.0

    @cached_property
    def epsilon1_resolved(self):
        return self.epsilon1 if self.epsilon1 is not None else calibrate_epsilon1(self)

    def validate(self):
        """Raise ConfigError unless every stated constraint holds."""
        errs = []
        if self.kind not in ("feng", "identity"):
            errs.append(f"kind must be 'feng' or 'identity', got {self.kind!r}")
        if self.g_kind not in ("q1", "translated", "identity"):
            errs.append(f"g_kind must be 'q1', 'translated' or 'identity', got {self.g_kind!r}")
        if self.delta_mode not in ("zero", "midpoint"):
            errs.append(f"delta_mode must be 'zero' or 'midpoint', got {self.delta_mode!r}")
        if not self.T > math.e:
            errs.append(f"T must exceed e, got {self.T}")
        if not self.R > 0:
            errs.append("R must be positive")
        if not abs(self.alpha) < 2 * math.pi:
            errs.append("|alpha| must be below 2 pi")
        for name in ("K", "K0"):
            v = getattr(self, name)
            if int(v) != v or v < 1 or v % 2 == 0:
                errs.append(f"{name} must be an odd positive integer, got {v}")
        if self.kind == "feng":
            if self.I < 2:
                errs.append(f"need at least two mollifier polynomials, got {self.I}")
            if self.theta > 4.0 / 7.0 + _TOL or self.theta1 > 0.5 + _TOL:
                errs.append("need theta <= 4/7 and theta1 <= 1/2")
            if self.T > math.e and (self.y < 2 - _TOL or self.y1 < 2 - _TOL):
                errs.append(f"T^theta and T^theta1 must be >= 2 (got {self.y:.4g}, {self.y1:.4g})")
            if self.P:
                if abs(self.P[0](0.0)) > _TOL or abs(self.P[0](1.0) - 1.0) > _TOL:
                    errs.append("P1 must satisfy P1(0) = 0 and P1(1) = 1")
                for j, p in enumerate(self.P[1:], start=2):
                    if abs(p(0.0)) > _TOL:
                        errs.append(f"P{j}(0) must vanish")
        if abs(self.Q_tilde(0.0) - 1.0) > _TOL:
            errs.append("Q_tilde(0) must equal 1")
        if errs:
            raise ConfigError("; ".join(errs))
        return self

    def with_(self, **kw):
        return replace(self, **kw)


def feng_polynomials_default(T=2000.0):
    """The five-polynomial parameter set with R = 1.3025, alpha = 0.1, K = 5,
    theta = 4/7, theta1 = 1/2."""
    P = (
        _feng_p1(),
        RealPolynomial((0.0, -0.101269, 3.571698, -1.807283, -0.929884)),
        RealPolynomial((0.0, 1.334025, -3.018815, 1.133072)),
        RealPolynomial((0.0, -0.546630, 0.372783)),
        RealPolynomial((0.0, -1.029768)),
    )
    return MollifierConfig(T=float(T), P=P, Q_tilde=_feng_q_tilde())


# ---------------------------------------------------------------------------
# Q families
# ---------------------------------------------------------------------------


def tanh_part(alpha, K):
    """S_K as a polynomial centred at 1/2."""
    if int(K) != K or K < 1 or K % 2 == 0:
        raise DomainError(f"K must be odd and positive, got {K}")
    c = np.zeros(int(K) + 1)
    r = alpha / (2.0 * math.pi)
    for k in range(1, int(K) + 1, 2):
        sign = -1.0 if ((k - 1) // 2) % 2 else 1.0
        lam = zeta_even(k + 1) * (1.0 - 2.0 ** -(k + 1))
        # (1 - 2x)^k = -(2^k) (x - 1/2)^k for odd k
        c[k] = -(2.0 / math.pi) * r ** k * sign * lam * 2.0 ** k
    return RealPolynomial(tuple(c), 0.5)


def calibrate_epsilon1(cfg):
    """eps1 solving 1/2 + eps1 Q0(0) + S_K(0) = 1.

    Raises:
        DomainError: Q0(0) = 0, so no eps1 normalises Q_1.
    """
    q00 = cfg.Q0_resolved(0.0)
    if q00 == 0:
        raise DomainError("Q0(0) = 0: epsilon1 cannot normalise Q_1(0) = 1")
    return (0.5 - tanh_part(cfg.alpha, cfg.K)(0.0)) / q00


def q_big_poly(x, cfg):
    """1/2 - S_K(x)."""
    return 0.5 - tanh_part(cfg.alpha, cfg.K)(x)


def q_one_poly(x, cfg):
    """1/2 + eps1 Q0(x) + S_K(x)."""
    return 0.5 + cfg.epsilon1_resolved * cfg.Q0_resolved(x) + tanh_part(cfg.alpha, cfg.K)(x)


def q_one_limit(x, cfg):
    """K -> infinity form 1/2 - tanh(alpha/2 (x - 1/2))/2 + eps1 Q0(x), with
    eps1 Q0(0) = 1/2 - tanh(alpha/4)/2."""
    eps = (0.5 - 0.5 * math.tanh(cfg.alpha / 4.0)) / cfg.Q0_resolved(0.0)
    x = np.asarray(x)
    return 0.5 - 0.5 * np.tanh(0.5 * cfg.alpha * (x - 0.5)) + eps * cfg.Q0_resolved(x)


def q_big_limit(x, cfg):
    return 0.5 + 0.5 * np.tanh(0.5 * cfg.alpha * (np.asarray(x) - 0.5))


def tilde_q_symmetry_defect(Q_tilde, n_grid=1001):
    """max |Q(x) + Q(1-x) - (Q(0) + Q(1))| over a uniform grid of [0, 1]."""
    x = np.linspace(0.0, 1.0, n_grid)
    g = Q_tilde(0.0) + Q_tilde(1.0)
    return float(np.max(np.abs(Q_tilde(x) + Q_tilde(1.0 - x) - g)))


# ---------------------------------------------------------------------------
# arithmetic tables
# ---------------------------------------------------------------------------

SIEVE_CEILING = 10 ** 7


@dataclass(frozen=True)
class ArithmeticTables:
    """Moebius values and smallest prime factors for 1..max_n."""

    max_n: int
    mu: np.ndarray = field(repr=False)
    spf: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, max_n):
        max_n = int(max_n)
        if max_n < 1 or max_n > SIEVE_CEILING:
            raise DomainError(f"sieve size must lie in [1, {SIEVE_CEILING}], got {max_n}")
        mu, spf = kernels.linear_sieve(max_n)
        return cls(max_n, mu, spf)

    def factorize(self, n):
        """[(p, e), ...] in increasing p."""
        if not 1 <= n <= self.max_n:
            raise DomainError(f"{n} outside the table")
        out = []
        while n > 1:
            p = int(self.spf[n])
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        return out

    def distinct_primes(self, n):
        return [p for p, _ in self.factorize(n)]


def elementary_symmetric(values, j_max):
    """e_0..e_j_max of ``values``."""
    e = [1.0] + [0.0] * j_max
    for v in values:
        for j in range(j_max, 0, -1):
            e[j] += e[j - 1] * v
    return e


# ---------------------------------------------------------------------------
# Dirichlet polynomials
# ---------------------------------------------------------------------------

DP_MAGIC = b"MOLLDP1\x00"


@dataclass(frozen=True)
class DirichletPolynomial:
    """sum_{n=1}^{N} a[n-1] n^-s."""

    a: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.ascontiguousarray(np.atleast_1d(self.a), dtype=np.complex128)
        if arr.ndim != 1 or arr.size == 0:
            raise DomainError("coefficient array must be one-dimensional and non-empty")
        if not np.all(np.isfinite(arr)):
            raise DomainError("coefficients must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "a", arr)

    @property
    def length(self):
        return self.a.size

    def coefficient(self, n):
        return complex(self.a[n - 1]) if 1 <= n <= self.length else 0j

    def __call__(self, s):
        return evaluate_dirichlet(self, s)

    def evaluate_tgrid(self, sigma, t0, dt, n_t):
        return kernels.dirichlet_eval_tgrid(self.a, sigma, t0, dt, n_t)

    def __add__(self, other):
        n = max(self.length, other.length)
        out = np.zeros(n, dtype=np.complex128)
        out[: self.length] += self.a
        out[: other.length] += other.a
        return DirichletPolynomial(out)

    def scale(self, c):
        return DirichletPolynomial(self.a * c)

    def trimmed(self):
        nz = np.nonzero(self.a)[0]
        return DirichletPolynomial(self.a[: nz[-1] + 1] if nz.size else self.a[:1])

    def is_constant(self):
        return self.length == 1 or not np.any(self.a[1:])

    # -- export -------------------------------------------------------------

    def to_bytes(self):
        """Header (8-byte magic, little-endian uint64 N) then N (re, im) float64 pairs."""
        body = np.empty(2 * self.length, dtype="<f8")
        body[0::2] = self.a.real
        body[1::2] = self.a.imag
        return DP_MAGIC + struct.pack("<Q", self.length) + body.tobytes()

    @classmethod
    def from_bytes(cls, data):
        if data[:8] != DP_MAGIC:
            raise DomainError("not a Dirichlet polynomial file (bad magic)")
        (n,) = struct.unpack("<Q", data[8:16])
        body = np.frombuffer(data[16:], dtype="<f8")
        if body.size != 2 * n:
            raise DomainError(f"expected {n} coefficient pairs, found {body.size / 2:g}")
        return cls(body[0::2] + 1j * body[1::2])

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(("n", "re", "im"))
        for n, c in enumerate(self.a, start=1):
            w.writerow((n, format(c.real, ".17g"), format(c.imag, ".17g")))
        return buf.getvalue()


def evaluate_dirichlet(dp, s):
    """sum a_n n^-s with compensated accumulation; scalar or array ``s``."""
    scalar = np.ndim(s) == 0
    out = kernels.dirichlet_eval(dp.a, np.atleast_1d(np.asarray(s, dtype=np.complex128)))
    return complex(out[0]) if scalar else out


def mollifier_coefficients(cfg, tables=None):
    """Coefficients of M(s) with m^(-R / log T) folded in.

    Raises:
        DomainError: ``tables`` does not reach T^theta.
    """
    if cfg.kind == "identity":
        return DirichletPolynomial(np.ones(1))
    y, y1, L = cfg.y, cfg.y1, cfg.log_T
    n_y = int(math.floor(y + 1e-9))
    n_y1 = int(math.floor(y1 + 1e-9))
    if tables is None:
        tables = ArithmeticTables.build(max(n_y, 2))
    if tables.max_n < n_y:
        raise DomainError(f"arithmetic tables reach {tables.max_n}, need {n_y}")
    log_y, log_y1 = math.log(y), math.log(y1)
    P1 = cfg.P[0]
    I = cfg.I
    out = np.zeros(n_y, dtype=np.float64)
    for m in range(1, n_y + 1):
        mu = int(tables.mu[m])
        if mu == 0:
            continue
        c = float(P1(math.log(y / m) / log_y))
        if m <= n_y1 and I >= 2:
            logs = [math.log(p) for p in tables.distinct_primes(m)]
            e = elementary_symmetric(logs, I)
            u = math.log(y1 / m) / log_y1
            for j in range(2, I + 1):
                if e[j] == 0.0:
                    break
                c += factorial(j) * e[j] / log_y1 ** j * float(cfg.P[j - 1](u))
        out[m - 1] = mu * c * math.exp(-cfg.R * math.log(m) / L)
    return DirichletPolynomial(out)


def _delta(cfg):
    if cfg.delta_mode == "zero":
        return 0.0
    # log(2 pi T / s) / (2 log T) at the middle of the integration segment
    s_mid = complex(cfg.a, 1.5 * cfg.T)
    return np.log(2.0 * math.pi * cfg.T / s_mid) / (2.0 * cfg.log_T)


def g_dirichlet_poly(cfg):
    """a_l = Q_1(log l / log T + delta) for l = 1..floor(T)."""
    if cfg.g_kind == "identity":
        return DirichletPolynomial(np.ones(1))
    if cfg.g_kind == "translated":
        return g_dirichlet_poly_translated(cfg)
    n = int(math.floor(cfg.T))
    x = np.log(np.arange(1, n + 1, dtype=np.float64)) / cfg.log_T + _delta(cfg)
    return DirichletPolynomial(np.asarray(q_one_poly(x, cfg), dtype=np.complex128))


def g_dirichlet_poly_translated(cfg):
    """G rebuilt from its translated representation:
    e^(alpha/2) sum Q_K(x) l^-(s + ds) + eps1 sum Q0(x) l^-s, ds = alpha/log T.

    Agrees with ``g_dirichlet_poly`` up to the finite-K truncation; the two
    remainder polynomials of the translated form are not included.
    """
    n = int(math.floor(cfg.T))
    x = np.log(np.arange(1, n + 1, dtype=np.float64)) / cfg.log_T + _delta(cfg)
    shifted = math.exp(cfg.alpha / 2.0) * q_big_poly(x, cfg) * np.exp(-cfg.alpha * x)
    return DirichletPolynomial(np.asarray(shifted + cfg.epsilon1_resolved * cfg.Q0_resolved(x), dtype=np.complex128))
