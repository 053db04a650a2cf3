"""Closed-form moments of K_n and of its state-conditional versions.

Mean and variance have explicit expressions in (pi_F, pi_A, lam, eps_F,
eps_A) and powers of the second eigenvalue lam; so do the means and
variances of K_n conditioned on the terminal state Y_n.  Higher conditional
moments have no closed form here and are summed from the conditional PMF.

Numerical notes: 1 - lam is always written as a + b (its exact value);
powers lam^n and the differences 1 - lam^n are computed through exp/expm1
of n*log|lam| so nothing cancels when |lam| is close to 1.  Variances are
clamped at zero, where degenerate inputs can land a hair below it.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .chain import ChainParams, State, derive
from .pmf import ConditioningError, conditional_pmf

__all__ = [
    "MomentReport",
    "mean",
    "variance",
    "cond_mean",
    "cond_variance",
    "cond_moment",
    "moment_report",
    "report_to_json",
]


def _pow_terms(lam: float, n: int) -> tuple[float, float]:
    """(lam**n, 1 - lam**n) without cancellation for |lam| near 1."""
    if n == 0:
        return 1.0, 0.0
    if lam == 0.0:
        return 0.0, 1.0
    log_mag = math.log(abs(lam))
    mag = math.exp(n * log_mag)
    if lam > 0.0 or n % 2 == 0:
        return mag, -math.expm1(n * log_mag)
    return -mag, 1.0 + mag


def mean(params: ChainParams, n: int) -> float:
    """E[K_n] = pi_F (n - eps_F (1 - lam^n)/(1 - lam))."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    d = derive(params)
    s = params.a + params.b  # = 1 - lam, exactly
    _, one_minus_ln = _pow_terms(d.lam, n)
    return d.pi_F * (n - d.eps_F * one_minus_ln / s)


def variance(params: ChainParams, n: int) -> float:
    """Var[K_n], exact in five groups ordered by their n-dependence."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    d = derive(params)
    pi_F, pi_A, lam, eps_F = d.pi_F, d.pi_A, d.lam, d.eps_F
    nu_F = params.nu_F
    s = params.a + params.b
    ln, _ = _pow_terms(lam, n)
    l2n, _ = _pow_terms(lam, 2 * n)
    # grouped by n-dependence: linear, constant, n*lam^n, lam^n, lam^(2n)
    t1 = n * pi_A * (1.0 + lam) / s
    t2 = (lam * (eps_F * (pi_F - pi_A) - 2.0 * pi_A) - eps_F * (pi_A - nu_F)) / s**2
    t3 = n * ln * 2.0 * eps_F * (pi_A - pi_F) / s
    t4 = ln * (eps_F * (pi_F - pi_A) / s
               + 2.0 * (lam * pi_A + eps_F * (pi_A - nu_F)) / s**2)
    t5 = -l2n * pi_F * eps_F**2 / s**2
    return max(0.0, pi_F * (t1 + t2 + t3 + t4 + t5))


def _cond_setup(params: ChainParams, n: int, tau: State):
    d = derive(params)
    eps = d.eps_F if tau is State.F else d.eps_A
    ln1, _ = _pow_terms(d.lam, n - 1)
    denom = 1.0 - eps * ln1  # = P(Y_n = tau) / pi_tau
    if denom <= 0.0:
        raise ConditioningError(
            f"P(Y_{n} = {tau.value}) = 0; conditional moment undefined")
    return d, eps, ln1, denom


def cond_mean(params: ChainParams, n: int, tau: State) -> float:
    """E[K_n | Y_n = tau] in closed form."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    d, eps, ln1, denom = _cond_setup(params, n, tau)
    pi_F, pi_A = d.pi_F, d.pi_A
    s = params.a + params.b
    _, one_minus_ln = _pow_terms(d.lam, n)
    if tau is State.F:
        return (n * (pi_F - eps * pi_A * ln1) / denom
                + (pi_A - eps * pi_F) * one_minus_ln / (s * denom))
    return (n * (pi_F - eps * pi_A * ln1) / denom
            + (eps * pi_A - pi_F) * one_minus_ln / (s * denom))


def cond_variance(params: ChainParams, n: int, tau: State) -> float:
    """Var[K_n | Y_n = tau] in closed form.

    Four groups: the n^2 term, minus the squared conditional mean, a group
    linear in n, and a group carrying the factor 1 - lam^n.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    d, eps, ln1, denom = _cond_setup(params, n, tau)
    pi_F, pi_A, lam = d.pi_F, d.pi_A, d.lam
    s = params.a + params.b
    ln, one_minus_ln = _pow_terms(lam, n)
    m = cond_mean(params, n, tau)
    t1 = n**2 * (pi_F**2 - eps * pi_A**2 * ln1) / denom
    t2 = -(m**2)
    if tau is State.F:
        t3 = -n * (pi_A * pi_F * (1.0 + 3.0 * eps * ln1) / denom
                   + 2.0 * (eps * pi_F**2 + pi_A**2 * ln
                            - 2.0 * pi_A * pi_F * (1.0 + eps * ln1)) / (s * denom))
        t4 = one_minus_ln * (
            (pi_A * pi_F * (4.0 + eps) - (pi_A + eps * pi_F**2)) / (s * denom)
            + 2.0 * (eps * pi_F**2 + pi_A**2
                     - 2.0 * pi_A * pi_F * (1.0 + eps)) / (s**2 * denom))
    else:
        t3 = -n * (pi_A * pi_F * (1.0 + (2.0 + eps) * ln1) / denom
                   + 2.0 * (pi_F**2 + eps * pi_A**2 * ln
                            - pi_A * pi_F * (1.0 + eps) * (1.0 + ln1)) / (s * denom))
        t4 = one_minus_ln * (
            (pi_A * pi_F * (4.0 + eps) - (pi_F + eps * pi_A**2)) / (s * denom)
            + 2.0 * (pi_F**2 + eps * pi_A**2
                     - 2.0 * pi_A * pi_F * (1.0 + eps)) / (s**2 * denom))
    return max(0.0, t1 + t2 + t3 + t4)


def cond_moment(params: ChainParams, n: int, tau: State, m: int) -> float:
    """m-th conditional moment E[(K_n)^m | Y_n = tau] by PMF summation."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    cond = conditional_pmf(params, n, tau)
    j_pow = np.arange(n + 1, dtype=float) ** m
    return math.fsum(j_pow * cond.values)


@dataclass(frozen=True)
class MomentReport:
    n: int
    mean: float
    variance: float
    cond_mean_F: float
    cond_mean_A: float
    cond_var_F: float
    cond_var_A: float


def moment_report(params: ChainParams, n: int) -> MomentReport:
    return MomentReport(
        n=n,
        mean=mean(params, n),
        variance=variance(params, n),
        cond_mean_F=cond_mean(params, n, State.F),
        cond_mean_A=cond_mean(params, n, State.A),
        cond_var_F=cond_variance(params, n, State.F),
        cond_var_A=cond_variance(params, n, State.A),
    )


def report_to_json(report: MomentReport) -> str:
    return json.dumps(
        {
            "n": report.n,
            "mean": report.mean,
            "variance": report.variance,
            "cond_mean_F": report.cond_mean_F,
            "cond_mean_A": report.cond_mean_A,
            "cond_var_F": report.cond_var_F,
            "cond_var_A": report.cond_var_A,
        }
    )
