"""zeta(s), H(s), xi(s), Hardy's Z(t), zero counting on the critical line and
contour-integral derivatives of xi.

zeta is evaluated by Euler-Maclaurin summation with cutoff
N = max(20, ceil(2 |t|)) and eight Bernoulli corrections, accurate to about
1e-10 relative up to |Im s| = 1e4.  Past that ceiling a NumericalWarning is
issued and the result is still returned.
"""

import cmath
import csv
import io
import json
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from math import factorial

import numpy as np

from . import kernels
from .constants import DEFAULT
from .errors import DomainError, NumericalWarning, PoleError
from .specfun import bernoulli_table, log_sin_pi, loggamma_complex

__all__ = [
    "CriticalWindow",
    "ZeroCountReport",
    "zeta",
    "zeta_array",
    "h_factor",
    "log_h_factor",
    "xi",
    "xi_array",
    "theta_rs",
    "hardy_z",
    "hardy_z_array",
    "rvm_main_terms",
    "count_zeros",
    "cauchy_derivative",
    "xi_derivative",
]

_LOG_PI = math.log(math.pi)


def _em_coefficients(p):
    tab = bernoulli_table()
    return [tab.values[2 * j] / factorial(2 * j) for j in range(1, p + 1)]


def _cutoff(t_abs):
    return max(DEFAULT.zeta_min_cutoff, int(math.ceil(2.0 * t_abs)))


def _em_tail(s, N, p):
    # N^{1-s}/(s-1) + N^{-s}/2 + sum_j B_2j/(2j)! s(s+1)..(s+2j-2) N^{-s-2j+1}
    logN = math.log(N)
    Ns = np.exp(-s * logN)
    out = N * Ns / (s - 1.0) + 0.5 * Ns
    poch = s.copy()
    power = Ns / N
    for j, c in enumerate(_em_coefficients(p), start=1):
        out = out + c * poch * power
        poch = poch * (s + 2 * j - 1) * (s + 2 * j)
        power = power / (N * N)
    return out


def zeta_array(s):
    """Vectorised zeta; a single cutoff is chosen from the largest |Im s|."""
    s = np.atleast_1d(np.asarray(s, dtype=np.complex128))
    if np.any(s == 1.0):
        raise PoleError("zeta has a pole at s = 1")
    t_max = float(np.max(np.abs(s.imag))) if s.size else 0.0
    if t_max > DEFAULT.zeta_t_ceiling:
        warnings.warn(f"zeta evaluated at |t| = {t_max:g} beyond the accuracy ceiling", NumericalWarning, stacklevel=2)
    left = s.real < -0.5
    if np.any(left):
        # the direct sum cancels badly left of the line; reflect instead
        out = np.empty_like(s)
        out[~left] = _zeta_em(s[~left])
        out[left] = _reflected(s[left], _zeta_em(1.0 - s[left]))
        return out
    return _zeta_em(s)


def _zeta_em(s):
    if not s.size:
        return s.copy()
    t_max = float(np.max(np.abs(s.imag)))
    # the remainder after 8 corrections scales like (|s| / (2 pi N))^16
    N = max(_cutoff(t_max), int(math.ceil(float(np.max(np.abs(s))))))
    head = kernels.power_sums(s, N - 1)
    return head + _em_tail(s, N, DEFAULT.zeta_em_terms)


def _reflected(s, z1):
    """zeta(s) = 2^s pi^(s-1) sin(pi s / 2) Gamma(1 - s) zeta(1 - s), in logs."""
    out = np.empty_like(s)
    for i, (w, z) in enumerate(zip(s, z1)):
        w = complex(w)
        if w.imag == 0.0 and w.real % 2.0 == 0.0:
            out[i] = 0.0  # trivial zero
            continue
        log_chi = w * math.log(2.0) + (w - 1.0) * _LOG_PI + log_sin_pi(0.5 * w) + loggamma_complex(1.0 - w)
        out[i] = cmath.exp(log_chi) * z
    return out


def zeta(s):
    """Riemann zeta at a complex point.

    Raises:
        PoleError: s == 1.
    """
    s = complex(s)
    val = zeta_array(np.array([s]))[0]
    if s.imag == 0.0:
        val = complex(val.real, 0.0)
    return complex(val)


def log_h_factor(s):
    """log H(s) with H(s) = (1 - s) pi^{-s/2} Gamma(1 + s/2).

    This equals s(1-s)/2 pi^{-s/2} Gamma(s/2) and is finite at s = 0.  The
    imaginary part is defined mod 2 pi.
    """
    s = complex(s)
    if s == 1.0:
        return complex(-math.inf, 0.0)
    return cmath.log(1.0 - s) - 0.5 * s * _LOG_PI + loggamma_complex(1.0 + 0.5 * s)


def h_factor(s):
    """H(s) = s(1-s)/2 pi^{-s/2} Gamma(s/2), with H(0) = 1 and H(1) = 0.

    Raises:
        PoleError: s = -2, -4, ...
    """
    s = complex(s)
    if s == 1.0:
        return 0.0j
    val = cmath.exp(log_h_factor(s))
    if s.imag == 0.0:
        return complex(val.real, 0.0)
    return val


def _reflect(s):
    # points where H(s) zeta(s) is numerically unusable
    return s.real < -0.5 or abs(s - 1.0) < 0.25


def xi_array(s):
    s = np.atleast_1d(np.asarray(s, dtype=np.complex128))
    w = np.where([_reflect(x) for x in s], 1.0 - s, s)
    z = zeta_array(w)
    logh = np.array([log_h_factor(x) for x in w], dtype=np.complex128)
    out = np.exp(logh) * z
    real = w.imag == 0.0
    out[real] = out[real].real
    return out


def xi(s):
    """Completed zeta xi(s) = H(s) zeta(s), entire and symmetric in s <-> 1-s."""
    return complex(xi_array(np.array([complex(s)]))[0])


def theta_rs(t):
    """Riemann-Siegel theta: Im log Gamma(1/4 + i t/2) - (t/2) log pi."""
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    return np.array([loggamma_complex(complex(0.25, 0.5 * x)).imag for x in t]) - 0.5 * t * _LOG_PI


def hardy_z_array(t):
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    if np.any(t <= 0):
        raise DomainError("hardy_z needs t > 0")
    z = zeta_array(0.5 + 1j * t)
    return (np.exp(1j * theta_rs(t)) * z).real


def hardy_z(t):
    """Hardy's Z(t) = e^{i theta(t)} zeta(1/2 + i t), real for real t > 0."""
    return float(hardy_z_array(np.array([float(t)]))[0])


def rvm_main_terms(T):
    """(T/2pi) log(T/2pi) - T/2pi + 7/8, the smooth part of N(T)."""
    if T <= 0:
        return 0.0
    x = T / (2.0 * math.pi)
    return x * math.log(x) - x + 0.875


# ---------------------------------------------------------------------------
# zero counting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CriticalWindow:
    t_lo: float
    t_hi: float

    def __post_init__(self):
        if not (self.t_lo >= 0 and self.t_hi > self.t_lo):
            raise DomainError(f"need 0 <= t_lo < t_hi, got ({self.t_lo}, {self.t_hi})")
        if self.t_hi > DEFAULT.window_ceiling:
            raise DomainError(f"t_hi = {self.t_hi:g} exceeds the ceiling {DEFAULT.window_ceiling:g}")


@dataclass
class ZeroCountReport:
    window: CriticalWindow
    n_sign_changes: int
    n_rvm: float
    s_residual: float
    zero_locations: list = field(default_factory=list)
    brackets: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    sanity_constant = 2.0

    @property
    def is_sane(self):
        return abs(self.s_residual) <= self.sanity_constant * math.log(max(self.window.t_hi, math.e))

    def to_dict(self):
        d = asdict(self)
        d["window"] = {"t_lo": self.window.t_lo, "t_hi": self.window.t_hi}
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    CSV_COLUMNS = ("t_lo", "t_hi", "n_sign_changes", "n_rvm", "s_residual")

    def csv_row(self):
        return [_fmt(self.window.t_lo), _fmt(self.window.t_hi), str(self.n_sign_changes),
                _fmt(self.n_rvm), _fmt(self.s_residual)]

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(self.CSV_COLUMNS)
        w.writerow(self.csv_row())
        return buf.getvalue()


def _fmt(x):
    return format(float(x), ".17g")


def _bisect(t0, t1, z0, tol):
    while t1 - t0 > tol:
        tm = 0.5 * (t0 + t1)
        zm = hardy_z(tm)
        if zm == 0.0:
            return tm, tm
        if (zm > 0) == (z0 > 0):
            t0, z0 = tm, zm
        else:
            t1 = tm
    return t0, t1


def _scan(t_lo, t_hi, step, tol):
    n = max(1, int(math.ceil((t_hi - t_lo) / step)))
    ts = np.linspace(t_lo, t_hi, n + 1)
    ts[0] = max(ts[0], 1e-9)
    zs = hardy_z_array(ts)
    brackets = []
    notes = []
    for k in range(n):
        if (zs[k] > 0) != (zs[k + 1] > 0):
            brackets.append(_bisect(ts[k], ts[k + 1], zs[k], tol))
    # a local minimum of |Z| without a crossing may hide a close pair of zeros
    az = np.abs(zs)
    for k in range(1, n):
        if az[k] < az[k - 1] and az[k] < az[k + 1] and (zs[k - 1] > 0) == (zs[k] > 0) == (zs[k + 1] > 0):
            found, exhausted = _refine(ts[k - 1], ts[k + 1], tol)
            brackets.extend(found)
            if exhausted:
                notes.append(f"possible unresolved zero pair near t={ts[k]:.6f}")
    return brackets, notes


def _refine(a, b, tol):
    h = (b - a) / 2.0
    while h > DEFAULT.min_refine_step:
        h /= 4.0
        m = int(round((b - a) / h))
        ts = np.linspace(a, b, m + 1)
        zs = hardy_z_array(ts)
        found = [
            _bisect(ts[k], ts[k + 1], zs[k], tol)
            for k in range(m)
            if (zs[k] > 0) != (zs[k + 1] > 0)
        ]
        if found:
            return found, False
        az = np.abs(zs)
        k = int(np.argmin(az))
        # a shallow dip is an ordinary extremum, not a near miss
        if az[k] > 0.2 * max(az[0], az[-1]):
            return [], False
    return [], True


def count_zeros(window, step=None, tol=None, threads=1):
    """Count sign changes of Z(t) on (t_lo, t_hi] and compare with the
    Riemann-von Mangoldt main terms.

    The window is cut into ``threads`` disjoint pieces scanned independently;
    the merged report is independent of ``threads``.
    """
    if not isinstance(window, CriticalWindow):
        window = CriticalWindow(*window)
    step = DEFAULT.scan_step if step is None else step
    tol = DEFAULT.bisection_tol if tol is None else tol
    lo, hi = window.t_lo, window.t_hi
    threads = max(1, int(threads))
    pieces = [(lo + (hi - lo) * i / threads, lo + (hi - lo) * (i + 1) / threads) for i in range(threads)]
    if threads == 1:
        results = [_scan(lo, hi, step, tol)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(lambda p: _scan(p[0], p[1], step, tol), pieces))
    brackets, notes = [], []
    for b, nt in results:
        brackets.extend(b)
        notes.extend(nt)
    brackets = sorted(set((float(a), float(b)) for a, b in brackets))
    for msg in notes:
        warnings.warn(msg, NumericalWarning, stacklevel=2)
    n_sc = len(brackets)
    n_rvm = rvm_main_terms(hi) - rvm_main_terms(lo)
    return ZeroCountReport(
        window=window,
        n_sign_changes=n_sc,
        n_rvm=n_rvm,
        s_residual=n_sc - n_rvm,
        zero_locations=[0.5 * (a + b) for a, b in brackets],
        brackets=[list(ab) for ab in brackets],
        warnings=notes,
    )


# ---------------------------------------------------------------------------
# derivatives
# ---------------------------------------------------------------------------


def cauchy_derivative(f_vec, s, k, radius=None, nodes=None, rtol=None):
    """k-th derivative of an analytic ``f_vec`` at ``s`` by the trapezoidal
    rule on a circle.

    ``f_vec`` maps a complex array to a complex array.  The rule is applied
    with ``nodes`` and ``2 * nodes`` points; the finer value is returned and a
    NumericalWarning is raised if the two differ by more than ``rtol``.
    """
    radius = DEFAULT.cauchy_radius if radius is None else radius
    nodes = DEFAULT.cauchy_nodes if nodes is None else nodes
    rtol = DEFAULT.cauchy_agreement if rtol is None else rtol
    n2 = 2 * nodes
    theta = 2.0 * np.pi * np.arange(n2) / n2
    circle = np.exp(1j * theta)
    vals = np.asarray(f_vec(s + radius * circle), dtype=np.complex128)
    weights = np.exp(-1j * k * theta)
    scale = factorial(k) / radius ** k
    fine = scale * np.sum(vals * weights) / n2
    coarse = scale * np.sum(vals[::2] * weights[::2]) / nodes
    err = abs(fine - coarse)
    # rounding in the node sum limits the absolute accuracy to about this
    noise = 64.0 * np.finfo(float).eps * scale * float(np.max(np.abs(vals)))
    if err > max(rtol * abs(fine), noise):
        warnings.warn(
            f"contour derivative k={k} not converged: two-resolution change {err / max(abs(fine), 1e-300):.2e}",
            NumericalWarning,
            stacklevel=2,
        )
    return complex(fine)


def xi_derivative(s, k, radius=None, nodes=None):
    """k-th derivative of xi at ``s`` (0 <= k <= 40, 0 < radius <= 1/2)."""
    radius = DEFAULT.cauchy_radius if radius is None else radius
    if not (0 <= int(k) <= 40 and int(k) == k):
        raise DomainError(f"derivative order must be an integer in [0, 40], got {k}")
    if not 0 < radius <= 0.5:
        raise DomainError(f"radius must lie in (0, 1/2], got {radius}")
    return cauchy_derivative(xi_array, complex(s), int(k), radius, nodes)
