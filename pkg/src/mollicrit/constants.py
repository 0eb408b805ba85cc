"""Numerical tolerances and default resolutions, collected in one place."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    hyp2f1_tail: float = 1e-15
    hyp2f1_max_terms: int = 20000
    beta_rel: float = 1e-13
    bernoulli_recurrence: float = 1e-14
    # zeta / xi
    zeta_em_terms: int = 8
    zeta_min_cutoff: int = 20
    zeta_t_ceiling: float = 1e4
    window_ceiling: float = 1e5
    # zero scan
    scan_step: float = 0.05
    bisection_tol: float = 1e-6
    min_refine_step: float = 1e-3
    # Cauchy derivatives
    cauchy_radius: float = 0.25
    cauchy_nodes: int = 128
    cauchy_agreement: float = 1e-9
    # shift identity
    sine_terms: int = 200
    gauss_nodes: int = 64
    # g_{alpha,T}
    psi_gauss_nodes: int = 16
    middle_quad_abs: float = 1e-10
    # proportion
    samples_per_oscillation: int = 8
    undersampling_rel: float = 0.01


DEFAULT = Tolerances()
