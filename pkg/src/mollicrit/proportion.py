"""Mean value I(R) = (1/T) int_T^{2T} |F(a + it)| dt of F = G M on the
line a = 1/2 - R / log T, and the factor 1 - (2/R) log I(R).

Logarithms are natural throughout.  The reported factor omits the
O(1 / log T) correction, whose constant is not quantified.
"""

import csv
import io
import json
import math
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import __version__, kernels
from .constants import DEFAULT
from .errors import DomainError, NumericalWarning
from .mollikit import (
    ArithmeticTables,
    DirichletPolynomial,
    MollifierConfig,
    g_dirichlet_poly,
    mollifier_coefficients,
)
from .zetakernel import CriticalWindow, count_zeros

__all__ = [
    "LENGTH_CEILING",
    "QuadratureResult",
    "ProportionRun",
    "assemble_f",
    "default_grid",
    "integrate_abs",
    "bound_factor",
    "bound_report",
    "run_proportion",
]

LENGTH_CEILING = 10 ** 7
MIN_GRID = 1025
BOUND_NOTE = "O(1/log T) correction excluded; its constant is not quantified"


def assemble_f(cfg, tables=None, max_length=LENGTH_CEILING):
    """Coefficients of F = G M by index-ordered Dirichlet convolution.

    Raises:
        DomainError: the product length would exceed ``max_length``.
    """
    G = g_dirichlet_poly(cfg)
    M = mollifier_coefficients(cfg, tables)
    if G.length * M.length > max_length:
        raise DomainError(f"F would have {G.length * M.length} coefficients (ceiling {max_length})")
    return DirichletPolynomial(kernels.dirichlet_convolve(G.a, M.a))


def default_grid(T, length):
    """Odd point count giving ``samples_per_oscillation`` points per period
    2 pi / log(length) over [T, 2T], and never fewer than T log(length) / pi
    or ``MIN_GRID``."""
    lg = math.log(max(length, 2))
    n = max(DEFAULT.samples_per_oscillation * T * lg / (2.0 * math.pi), T * lg / math.pi, MIN_GRID)
    n = int(math.ceil(n))
    return n + 1 if n % 2 == 0 else n


@dataclass(frozen=True)
class QuadratureResult:
    """Simpson value on 2 * (grid_n - 1) + 1 points and its change from the
    grid_n-point rule."""

    value: float
    err_est: float
    grid_n: int
    undersampled: bool


def _simpson(y, h):
    if y.size < 3 or y.size % 2 == 0:
        raise DomainError("Simpson's rule needs an odd number of at least 3 points")
    # fixed-order sums keep the result independent of thread count
    return h / 3.0 * (y[0] + y[-1] + 4.0 * math.fsum(y[1:-1:2]) + 2.0 * math.fsum(y[2:-1:2]))


def _abs_on_grid(factors, a, T, n):
    dt = T / (n - 1)
    vals = np.ones(n, dtype=np.complex128)
    for f in factors:
        vals *= f.evaluate_tgrid(a, T, dt, n)
    return np.abs(vals), dt


def integrate_abs(f_poly, a, T, grid_n=None):
    """(1/T) int_T^{2T} |f(a + it)| dt by composite Simpson.

    ``f_poly`` is a DirichletPolynomial or a sequence of them whose product
    is integrated (evaluating G and M separately is exact and cheaper than
    evaluating their convolution).  ``grid_n`` (odd, default
    ``default_grid``) is the coarse grid; the returned value uses the
    doubled grid and ``err_est`` is the difference between the two.

    Warns:
        NumericalWarning: err_est exceeds 1% of the value.
    """
    factors = [f_poly] if isinstance(f_poly, DirichletPolynomial) else list(f_poly)
    if not factors:
        raise DomainError("nothing to integrate")
    if T <= 0:
        raise DomainError("T must be positive")
    if all(f.is_constant() for f in factors):
        # |F| is constant: the mean is exact
        c = 1.0
        for f in factors:
            c *= f.coefficient(1)
        return QuadratureResult(float(abs(c)), 0.0, grid_n or 3, False)
    length = 1
    for f in factors:
        length *= f.length
    n = default_grid(T, length) if grid_n is None else int(grid_n)
    if n < 3 or n % 2 == 0:
        raise DomainError(f"grid_n must be odd and >= 3, got {n}")
    fine_n = 2 * (n - 1) + 1
    y, h = _abs_on_grid(factors, a, T, fine_n)
    fine = _simpson(y, h) / T
    coarse = _simpson(y[::2], 2.0 * h) / T
    err = abs(fine - coarse)
    under = err > DEFAULT.undersampling_rel * abs(fine)
    if under:
        warnings.warn(f"grid doubling changed I by {err / fine:.2%}", NumericalWarning, stacklevel=2)
    return QuadratureResult(float(fine), float(err), n, bool(under))


def bound_factor(I_R, R):
    """1 - (2/R) log I_R."""
    if not I_R > 0:
        raise DomainError("I(R) must be positive")
    return 1.0 - (2.0 / R) * math.log(I_R)


def _fmt(x):
    return format(float(x), ".17g")


@dataclass
class ProportionRun:
    """One evaluation of I(R) and the bound factor.

    ``wall_time`` is kept out of the serialised forms unless
    ``include_timing`` is set, so repeated runs produce identical bytes.
    """

    cfg: MollifierConfig
    a: float
    grid: int
    I_R: float
    bound: float
    quadrature_error_estimate: float
    wall_time: float = 0.0
    undersampled: bool = False
    f_length: int = 0
    evaluation: str = "convolved"
    n_zeros_window: int = None
    n_rvm_window: float = None
    notes: list = field(default_factory=lambda: [BOUND_NOTE])

    CSV_COLUMNS = ("T", "R", "alpha", "theta", "I_R", "err_est", "bound", "N_window")

    def __post_init__(self):
        if not self.a < 0.5:
            raise DomainError("the integration line must lie left of 1/2")
        if not self.I_R > 0:
            raise DomainError("I(R) must be positive")

    def recomputed_bound(self):
        return bound_factor(self.I_R, self.cfg.R)

    def to_dict(self, include_timing=False):
        c = self.cfg
        d = {
            "T": c.T, "R": c.R, "alpha": c.alpha, "theta": c.theta, "theta1": c.theta1,
            "K": c.K, "K0": c.K0, "epsilon1": c.epsilon1_resolved, "kind": c.kind,
            "g_kind": c.g_kind, "delta_mode": c.delta_mode, "a": self.a, "grid": self.grid,
            "I_R": self.I_R, "bound": self.bound, "quadrature_error_estimate": self.quadrature_error_estimate,
            "undersampled": self.undersampled, "f_length": self.f_length, "evaluation": self.evaluation,
            "n_zeros_window": self.n_zeros_window, "n_rvm_window": self.n_rvm_window,
            "notes": list(self.notes), "tool_version": __version__,
        }
        if include_timing:
            d["wall_time"] = self.wall_time
        return d

    def to_json(self, include_timing=False):
        return json.dumps(self.to_dict(include_timing), indent=2, sort_keys=True)

    def csv_row(self):
        c = self.cfg
        return [_fmt(c.T), _fmt(c.R), _fmt(c.alpha), _fmt(c.theta), _fmt(self.I_R),
                _fmt(self.quadrature_error_estimate), _fmt(self.bound),
                "" if self.n_zeros_window is None else str(self.n_zeros_window)]

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(self.CSV_COLUMNS)
        w.writerow(self.csv_row())
        return buf.getvalue()


def bound_report(cfg, quad, wall_time=0.0, f_length=0, evaluation="convolved",
                 with_zeros=False, threads=1):
    """Wrap a quadrature result into a ProportionRun.

    With ``with_zeros`` the sign changes of Z on [T, 2T] are counted and
    reported next to the bound when 2T is within the zeta ceiling.
    """
    run = ProportionRun(
        cfg=cfg, a=cfg.a, grid=quad.grid_n, I_R=quad.value, bound=bound_factor(quad.value, cfg.R),
        quadrature_error_estimate=quad.err_est, wall_time=wall_time, undersampled=quad.undersampled,
        f_length=f_length, evaluation=evaluation,
    )
    if with_zeros:
        if 2.0 * cfg.T <= DEFAULT.zeta_t_ceiling:
            rep = count_zeros(CriticalWindow(cfg.T, 2.0 * cfg.T), threads=threads)
            run.n_zeros_window = rep.n_sign_changes
            run.n_rvm_window = rep.n_rvm
        else:
            run.notes.append(f"zero count skipped: 2T above {DEFAULT.zeta_t_ceiling:g}")
    return run


def run_proportion(cfg, grid_n=None, evaluation="convolved", with_zeros=False, threads=1):
    """Full pipeline: build G and M, integrate |G M| and report the bound.

    ``evaluation="convolved"`` evaluates the convolved F; ``"factored"``
    evaluates G and M separately and multiplies.
    """
    cfg.validate()
    if evaluation not in ("convolved", "factored"):
        raise DomainError(f"unknown evaluation mode {evaluation!r}")
    t0 = time.perf_counter()
    n_y = max(2, int(math.floor(cfg.y + 1e-9)))
    tables = ArithmeticTables.build(n_y) if cfg.kind != "identity" else None
    if evaluation == "convolved":
        F = assemble_f(cfg, tables)
        target, length = F, F.length
    else:
        G = g_dirichlet_poly(cfg)
        M = mollifier_coefficients(cfg, tables)
        target, length = (G, M), G.length * M.length
    quad = integrate_abs(target, cfg.a, cfg.T, grid_n)
    wall = time.perf_counter() - t0
    return bound_report(cfg, quad, wall, length, evaluation, with_zeros, threads)
