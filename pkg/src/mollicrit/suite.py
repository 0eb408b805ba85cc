"""Numerical checks behind ``mollicrit verify-lemmas``.

Each check returns a ``CheckRow``; a row is ``fail`` only when a measured
quantity exceeds its tolerance.  Inputs outside a check's domain of
validity produce ``warn`` rows instead.
"""

import csv
import io
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import NumericalWarning
from .gfun import (
    GFunParams,
    fourier_beta_part,
    fourier_beta_part_quadrature,
    g_analytic,
    g_direct,
    s1_symmetry_defect,
)
from .mollikit import q_big_poly, q_one_limit, q_one_poly, tanh_part
from .shiftcalc import (
    ShiftParams,
    g_coefficient,
    g_coefficient_series,
    h_ratio_check,
    probe_exp,
    shift_identity_residual,
    tanh_series_in_disk,
    tanh_series_sum,
)
from .zetakernel import xi_array

__all__ = ["CheckRow", "run_lemma_suite", "report_csv", "SUITE_SEED"]

SUITE_SEED = 20240601
REPORT_COLUMNS = ("check", "value", "tolerance", "status", "detail")


@dataclass(frozen=True)
class CheckRow:
    check: str
    value: float
    tolerance: float
    status: str
    detail: str = ""

    @classmethod
    def measure(cls, name, value, tol, detail=""):
        ok = bool(np.isfinite(value)) and value <= tol
        return cls(name, float(value), float(tol), "pass" if ok else "fail", detail)


def _shift_rows(ds):
    p0 = ShiftParams.from_delta_sigma(ds)
    rows = []
    for K in (1, 3, 5):
        p = ShiftParams(p0.alpha, p0.T, K)
        r = shift_identity_residual(probe_exp(), 1 + 2j, p)
        rows.append(CheckRow.measure(f"shift_identity_K{K}", r, 1e-10, f"f=exp s=1+2i ds={ds:g}"))
    return rows


def _coefficient_rows():
    ds_values = np.linspace(-0.9, 0.9, 10)
    closed = max(abs(g_coefficient(1, d) - d / 2.0) for d in ds_values)
    rel = 0.0
    for k in range(1, 64, 2):
        a, b = g_coefficient(k, 0.5), g_coefficient_series(k, 0.5)
        rel = max(rel, abs(a - b) / abs(b))
    return [
        CheckRow.measure("g1_closed_form", closed, 1e-14, "10 values of ds"),
        CheckRow.measure("g_series_vs_bernoulli", rel, 1e-12, "odd k <= 63, relative"),
    ]


def _tanh_rows(alphas, K_max):
    x = np.linspace(0.0, 1.0, 1001)
    rows = []
    for a in alphas:
        name = f"tanh_series_alpha{a:g}"
        if not np.all(tanh_series_in_disk(x, a)):
            rows.append(CheckRow(name, math.nan, 1e-8, "warn",
                                 f"|alpha (1/2 - x)| reaches {abs(a) / 2:.3g} >= pi: series diverges"))
            continue
        err = float(np.max(np.abs(tanh_series_sum(x, a, K_max) + np.tanh(0.5 * a * (0.5 - x)))))
        rows.append(CheckRow.measure(name, err, 1e-8, f"K={K_max}"))
    return rows


def _h_ratio_row():
    consts = []
    for T in (1e3, 4e3, 1.6e4):
        p = ShiftParams(0.1, T)
        consts.append(h_ratio_check(0.5 + 1j * T, p).empirical_constant)
    worst = max(consts[i + 1] / consts[i] for i in range(len(consts) - 1))
    return CheckRow.measure("h_ratio_trend", worst, 1.1,
                            "max successive ratio of deviation*log T; " + ",".join(f"{c:.6g}" for c in consts))


def _xi_row(rng):
    s = rng.uniform(-2.0, 3.0, 200) + 1j * rng.uniform(-60.0, 60.0, 200)
    a, b = xi_array(s), xi_array(1.0 - s)
    rel = float(np.max(np.abs(a - b) / np.maximum(np.abs(a), 1e-300)))
    return CheckRow.measure("xi_functional_equation", rel, 1e-10, "200 strip samples")


def _s1_row(rng):
    u = rng.uniform(0.0, 1.0, 10_000)
    a = rng.uniform(-6.0, 6.0, 10_000)
    return CheckRow.measure("s1_symmetry", float(np.max(s1_symmetry_defect(u, a))), 1e-13, "10^4 samples")


def _continuation_rows(rng, alpha, T, n_points):
    p = GFunParams(alpha, T)
    worst = 0.0
    for _ in range(n_points):
        s = complex(rng.uniform(1.1, 3.0), rng.uniform(1.0, 2.0 * T) * rng.choice((-1, 1)))
        a, d = g_analytic(s, p), g_direct(s, p).value
        worst = max(worst, abs(a - d) / abs(d))
    worst_n = 0.0
    p4 = p.with_N(4 * p.N_truncation)
    for _ in range(n_points):
        s = complex(rng.uniform(0.3, 1.0) + 1e-9, rng.uniform(1.0, 2.0 * T))
        a, b = g_analytic(s, p), g_analytic(s, p4)
        worst_n = max(worst_n, abs(a - b) / abs(a))
    return [
        CheckRow.measure("continuation_vs_direct", worst, 1e-6, f"alpha={alpha:g} T={T:g}, {n_points} points"),
        CheckRow.measure("continuation_N_independence", worst_n, 1e-6, f"N=T vs N=4T, {n_points} points"),
    ]


def _bk_row(alphas):
    worst = 0.0
    for a in alphas:
        worst = max(worst, float(np.max(np.abs(fourier_beta_part(a, 8) - fourier_beta_part_quadrature(a, 8)))))
    return CheckRow.measure("bk_beta_vs_quadrature", worst, 1e-8, "k <= 8, alpha in " + ",".join(f"{a:g}" for a in alphas))


def _q_rows(cfg):
    x = np.linspace(0.0, 1.0, 1001)
    eps = cfg.epsilon1_resolved
    norm = abs(q_one_poly(0.0, cfg) - 1.0)
    part = float(np.max(np.abs(q_one_poly(x, cfg) - eps * cfg.Q0_resolved(x) + q_big_poly(x, cfg) - 1.0)))
    target = 0.5 - 0.5 * math.tanh(cfg.alpha / 4.0)
    devs = [abs(0.5 - tanh_part(cfg.alpha, K)(0.0) - target) for K in range(1, 42, 2)]
    mono = all(devs[i + 1] <= devs[i] + 1e-16 for i in range(len(devs) - 1))
    rows = [
        CheckRow.measure("q1_normalisation", norm, 1e-12, f"epsilon1={eps:.17g}"),
        CheckRow.measure("q_partition_of_unity", part, 1e-12, "1001-point grid"),
        CheckRow.measure("q_limit_K41", devs[-1], 1e-6, f"alpha={cfg.alpha:g}"),
    ]
    rows.append(CheckRow("q_limit_monotone", float(mono), 1.0, "pass" if mono else "fail",
                         "deviation non-increasing in K"))
    limit = abs(q_one_limit(0.0, cfg) - 1.0)
    rows.append(CheckRow.measure("q1_limit_normalisation", limit, 1e-12, "K -> infinity form"))
    return rows


def run_lemma_suite(cf, mollifier_cfg, n_points=20):
    """All checks, in a fixed order, with a fixed random seed."""
    rng = np.random.default_rng(SUITE_SEED)
    alpha = cf.get("gfun.alpha", 0.5)
    T = cf.get("gfun.T", 50.0)
    base_alphas = [0.1, -0.1, 1.0, -1.0, 3.0, -3.0]
    if alpha not in base_alphas:
        base_alphas.append(alpha)
    rows = []
    rows += _shift_rows(cf.get("shift.delta_sigma", 0.1))
    rows += _coefficient_rows()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NumericalWarning)
        rows += _tanh_rows(base_alphas, cf.get("shift.K_max", 41))
        rows.append(_h_ratio_row())
        rows.append(_xi_row(rng))
        rows.append(_s1_row(rng))
        rows += _continuation_rows(rng, alpha, T, n_points)
        bk_alphas = [0.5, 1.0, 2.0] + ([alpha] if alpha not in (0.5, 1.0, 2.0) else [])
        rows.append(_bk_row(bk_alphas))
        rows += _q_rows(mollifier_cfg)
    return rows


def report_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(REPORT_COLUMNS)
    for r in rows:
        w.writerow((r.check, format(r.value, ".17g"), format(r.tolerance, ".17g"), r.status, r.detail))
    return buf.getvalue()
