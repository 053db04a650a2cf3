"""Exact rational PMF evaluation for tie-sensitive shape decisions.

The shape classifier compares PMF entries with non-strict inequalities, so
a tie is a legitimate outcome that floating point cannot certify.  This
module reruns the forward joint recursion in Fraction arithmetic: every
float parameter is a dyadic rational, Fraction(float) converts it exactly,
and the recursion is closed under +/*, so the resulting PMF entries are the
exact rationals implied by the float inputs.  Denominators grow roughly
geometrically in n, hence the hard cap.
"""
from __future__ import annotations

from fractions import Fraction

from .chain import ChainParams
from .shape import ShapeClass, classify_values

__all__ = ["EXACT_CAP", "pmf_exact", "partial_pmf_exact", "classify_exact"]

EXACT_CAP = 64


def partial_pmf_exact(params: ChainParams, n: int) -> tuple[list[Fraction], list[Fraction]]:
    """Exact joint laws (hat_F, hat_A) by the forward recursion."""
    if not 1 <= n <= EXACT_CAP:
        raise ValueError(f"n must be in 1..{EXACT_CAP}, got {n}")
    a, b = Fraction(params.a), Fraction(params.b)
    ca, cb = 1 - a, 1 - b
    hF = [Fraction(0)] * (n + 1)
    hA = [Fraction(0)] * (n + 1)
    hF[1] = Fraction(params.nu_F)
    hA[0] = Fraction(params.nu_A)
    for _ in range(n - 1):
        new_F = [Fraction(0)] * (n + 1)
        new_A = [Fraction(0)] * (n + 1)
        for j in range(n + 1):
            if j:
                new_F[j] = ca * hF[j - 1] + b * hA[j - 1]
            new_A[j] = a * hF[j] + cb * hA[j]
        hF, hA = new_F, new_A
    return hF, hA


def pmf_exact(params: ChainParams, n: int) -> list[Fraction]:
    """Exact full PMF; sums to Fraction(1) identically."""
    hF, hA = partial_pmf_exact(params, n)
    return [x + y for x, y in zip(hF, hA)]


def classify_exact(params: ChainParams, n: int) -> ShapeClass:
    """Shape class decided in exact arithmetic (same decision code path)."""
    return classify_values(pmf_exact(params, n))
