"""Two-state chain parameters and the scalar quantities derived from them.

States are labeled F (success) and A (failure).  The one-step transition
matrix, with rows and columns ordered (F, A), is

    P = [[1-a, a],
         [b, 1-b]]

where a is the F->A transition probability and b the A->F one.  The initial
law is nu = (nu_F, nu_A).  Everything downstream (PMF recursions, moments,
shape analysis) consumes the validated ChainParams produced here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "ParameterError",
    "State",
    "ChainParams",
    "DerivedParams",
    "make_params",
    "derive",
    "transition_power",
    "state_prob",
    "signed_power",
]


class ParameterError(ValueError):
    """Chain parameters outside the admissible region."""


class State(Enum):
    F = "F"
    A = "A"


@dataclass(frozen=True)
class ChainParams:
    """Validated (a, b, nu) triple; build via make_params."""

    a: float
    b: float
    nu_F: float
    nu_A: float


@dataclass(frozen=True)
class DerivedParams:
    """Stationary law, second eigenvalue, and excentricities.

    pi_F = b/(a+b), pi_A = a/(a+b); lam = 1-a-b is the second eigenvalue of
    P; eps_tau = 1 - nu_tau/pi_tau measures how far the initial law sits from
    the stationary one (zero when nu = pi).
    """

    pi_F: float
    pi_A: float
    lam: float
    eps_F: float
    eps_A: float


def make_params(a: float, b: float, nu_F: float) -> ChainParams:
    """Validate and freeze chain parameters.

    a and b must lie strictly inside (0, 1); nu_F may take the boundary
    values 0 and 1 (degenerate starts are meaningful).  nu_A is stored as
    1 - nu_F so the two masses sum to 1 exactly.
    """
    for name, x in (("a", a), ("b", b), ("nu_F", nu_F)):
        if not (isinstance(x, (int, float)) and math.isfinite(x)):
            raise ParameterError(f"{name} must be a finite real, got {x!r}")
    a, b, nu_F = float(a), float(b), float(nu_F)
    if not 0.0 < a < 1.0:
        raise ParameterError(f"a must satisfy 0 < a < 1, got {a}")
    if not 0.0 < b < 1.0:
        raise ParameterError(f"b must satisfy 0 < b < 1, got {b}")
    if not -1e-12 <= nu_F <= 1.0 + 1e-12:
        raise ParameterError(f"nu_F must lie in [0, 1], got {nu_F}")
    nu_F = min(max(nu_F, 0.0), 1.0)
    return ChainParams(a=a, b=b, nu_F=nu_F, nu_A=1.0 - nu_F)


def derive(params: ChainParams) -> DerivedParams:
    """Stationary distribution, second eigenvalue, excentricities."""
    a, b = params.a, params.b
    pi_F = b / (a + b)
    # complement rather than a/(a+b): makes pi_F + pi_A == 1 exact, which
    # downstream row-sum and normalization identities lean on
    pi_A = 1.0 - pi_F
    lam = 1.0 - a - b
    eps_F = 1.0 - params.nu_F / pi_F
    eps_A = 1.0 - params.nu_A / pi_A
    return DerivedParams(pi_F=pi_F, pi_A=pi_A, lam=lam, eps_F=eps_F, eps_A=eps_A)


def signed_power(x: float, n: int) -> float:
    """x**n for integer n >= 0, stable for |x| near 1 and n large.

    Magnitude via exp(n*log|x|) to avoid drift from repeated multiplication;
    sign tracked separately for negative x.
    """
    if n == 0:
        return 1.0
    if x == 0.0:
        return 0.0
    mag = math.exp(n * math.log(abs(x)))
    return -mag if (x < 0.0 and n % 2 == 1) else mag


def transition_power(params: ChainParams, n: int) -> np.ndarray:
    """n-step transition matrix P^n from the closed spectral form.

    P^n = [[pi_F, pi_A], [pi_F, pi_A]] + lam^n [[pi_A, -pi_A], [-pi_F, pi_F]]
    with rows/cols ordered (F, A).  O(1) in n; entries clamped to [0, 1].
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    d = derive(params)
    ln = signed_power(d.lam, n)
    mat = np.array(
        [
            [d.pi_F + d.pi_A * ln, d.pi_A - d.pi_A * ln],
            [d.pi_F - d.pi_F * ln, d.pi_A + d.pi_F * ln],
        ]
    )
    return np.clip(mat, 0.0, 1.0)


def state_prob(params: ChainParams, k: int, tau: State) -> float:
    """P(Y_k = tau) = pi_tau (1 - eps_tau lam^(k-1)), clamped to [0, 1]."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    d = derive(params)
    if tau is State.F:
        p = d.pi_F * (1.0 - d.eps_F * signed_power(d.lam, k - 1))
    else:
        p = d.pi_A * (1.0 - d.eps_A * signed_power(d.lam, k - 1))
    return min(max(p, 0.0), 1.0)
