"""PMF of the Markov binomial distribution by three independent evaluators.

K_n counts visits to the success state F during steps 1..n.  The full PMF
f_n(j) = P(K_n = j) is computed three ways that share no code path:

 - pmf_forward: evolve the joint law (K_m, Y_m) one step at a time.  Every
   update adds nonnegative terms, so this is the canonical evaluator.
 - pmf_recurrence: a second-order scalar recurrence in n for f alone;
   contains a subtraction, kept as an independent cross-check.
 - pmf_closed: explicit finite sum with binomial coefficients; evaluated
   term-by-term in linear space for small n and in log space above that.

The partial PMFs hat_F(j) = P(K_n = j, Y_n = F) and hat_A are the joint-law
tracks of the forward method and also have a closed form; conditional PMFs
divide a partial track by P(Y_n = tau).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy.special import gammaln

from .chain import ChainParams, State, derive, state_prob

__all__ = [
    "ConditioningError",
    "Pmf",
    "PartialPmfPair",
    "CoefficientTable",
    "choose",
    "coefficient_table",
    "pmf_forward",
    "pmf",
    "pmf_recurrence",
    "pmf_closed",
    "partial_pmf_closed",
    "conditional_pmf",
    "pmf_to_json",
    "pmf_to_csv",
]

# above this n the closed form switches from exact-integer binomials in
# linear space to log-space accumulation
_DIRECT_LIMIT = 64

# rounding-noise threshold: negatives above this are clamped to zero,
# anything below it is treated as a logic error
_NEG_TOL = -1e-15


class ConditioningError(RuntimeError):
    """Conditioning on a terminal state of probability zero."""


@dataclass(frozen=True)
class Pmf:
    """A PMF over j = 0..n with the parameters that produced it.

    kind is "full" for f_n, "cond_F"/"cond_A" for the conditional laws.
    """

    n: int
    values: np.ndarray
    params: ChainParams
    kind: str = "full"

    def __post_init__(self):
        self.values.setflags(write=False)


@dataclass(frozen=True)
class PartialPmfPair:
    """Joint laws hat_tau(j) = P(K_n = j, Y_n = tau) for tau in {F, A}."""

    n: int
    hat_F: np.ndarray
    hat_A: np.ndarray
    params: ChainParams

    def __post_init__(self):
        self.hat_F.setflags(write=False)
        self.hat_A.setflags(write=False)


@dataclass(frozen=True)
class CoefficientTable:
    """The closed-form coefficients c and c_F plus the ratio delta.

    delta = ab/((1-a)(1-b)).  c(j, k, n) weights the full-PMF sum, c_F the
    partial one.  With exact=True at construction both are evaluated in
    rational arithmetic, which makes their shift and addition identities
    exactly testable.
    """

    delta: float | Fraction
    c: Callable[[int, int, int], float | Fraction] = field(repr=False)
    c_F: Callable[[int, int, int], float | Fraction] = field(repr=False)


def choose(m: int, r: int) -> int:
    """Binomial coefficient with C(m, r) = 0 for r < 0, r > m, or m < 0."""
    if m < 0 or r < 0 or r > m:
        return 0
    return math.comb(m, r)


def coefficient_table(params: ChainParams, exact: bool = False) -> CoefficientTable:
    a, b, nu_F, nu_A = params.a, params.b, params.nu_F, params.nu_A
    if exact:
        a, b, nu_F, nu_A = Fraction(a), Fraction(b), Fraction(nu_F), Fraction(nu_A)
    delta = a * b / ((1 - a) * (1 - b))
    w_mid = (nu_F * a + nu_A * b) / (1 - b)
    w_hi = nu_A * a * b / ((1 - b) * (1 - b))
    w_mid_F = nu_A * b / (1 - b)

    def c(j: int, k: int, n: int):
        return (nu_F * choose(n - 2 - j, k - 1)
                + w_mid * choose(n - 2 - j, k)
                + w_hi * choose(n - 2 - j, k + 1))

    def c_F(j: int, k: int, n: int):
        return nu_F * choose(n - 2 - j, k - 1) + w_mid_F * choose(n - 2 - j, k)

    return CoefficientTable(delta=delta, c=c, c_F=c_F)


def _clamp_small_negatives(values: np.ndarray, where: str) -> np.ndarray:
    """Zero out rounding-level negatives; fail loudly on anything larger."""
    lo = values.min()
    if lo < _NEG_TOL:
        raise RuntimeError(f"{where}: negative mass {lo:.3e} exceeds rounding noise")
    if lo < 0.0:
        values = np.where(values < 0.0, 0.0, values)
    return values


def _make_pmf(values: np.ndarray, params: ChainParams, n: int, kind: str,
              where: str) -> Pmf:
    values = _clamp_small_negatives(values, where)
    total = math.fsum(values)
    if abs(total - 1.0) > 1e-10:
        raise RuntimeError(f"{where}: mass sums to {total!r}, not 1")
    return Pmf(n=n, values=values, params=params, kind=kind)


def pmf_forward(params: ChainParams, n: int) -> PartialPmfPair:
    """Evolve the joint law of (K_m, Y_m) from m = 1 to n.

    Update: hat_F'(j) = (1-a) hat_F(j-1) + b hat_A(j-1)
            hat_A'(j) = a hat_F(j) + (1-b) hat_A(j)
    seeded with hat_F = nu_F at j = 1 and hat_A = nu_A at j = 0.  All terms
    are nonnegative, so no cancellation anywhere.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    a, b = params.a, params.b
    hF = np.zeros(n + 1)
    hA = np.zeros(n + 1)
    hF[1] = params.nu_F
    hA[0] = params.nu_A
    for _ in range(n - 1):
        new_F = np.zeros(n + 1)
        new_F[1:] = (1.0 - a) * hF[:-1] + b * hA[:-1]
        hA = a * hF + (1.0 - b) * hA
        hF = new_F
    return PartialPmfPair(n=n, hat_F=hF, hat_A=hA, params=params)


def pmf(params: ChainParams, n: int) -> Pmf:
    """Full PMF f_n via the forward joint recursion (canonical path)."""
    pair = pmf_forward(params, n)
    return _make_pmf(pair.hat_F + pair.hat_A, params, n, "full", "pmf")


def pmf_recurrence(params: ChainParams, n: int) -> Pmf:
    """Full PMF via the second-order recurrence in n.

    f_{m+2}(j+1) = (1-b) f_{m+1}(j+1) + (1-a) f_{m+1}(j) - (1-a-b) f_m(j)
    with f extended by zero outside 0..m.  The subtraction makes this less
    robust than pmf_forward in principle; it exists as an independent
    validator.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    a, b = params.a, params.b
    lam = 1.0 - a - b
    f_prev = np.array([params.nu_A, params.nu_F])
    if n == 1:
        return _make_pmf(f_prev.copy(), params, n, "full", "pmf_recurrence")
    f_cur = np.array(
        [params.nu_A * (1.0 - b),
         params.nu_A * b + params.nu_F * a,
         params.nu_F * (1.0 - a)]
    )
    for m in range(1, n - 1):
        f_next = np.zeros(m + 3)
        f_next[: m + 2] += (1.0 - b) * f_cur
        f_next[1: m + 3] += (1.0 - a) * f_cur
        f_next[1: m + 2] -= lam * f_prev
        f_prev, f_cur = f_cur, f_next
    return _make_pmf(f_cur, params, n, "full", "pmf_recurrence")


def _log_choose_table(n: int) -> np.ndarray:
    # gammaln(i + 1) for i = 0..n, so log C(m, r) = t[m] - t[r] - t[m - r]
    return gammaln(np.arange(n + 1, dtype=float) + 1.0)


def _interior_closed(params: ChainParams, n: int,
                     parts: Sequence[tuple[float, int, int]]) -> np.ndarray:
    """Interior rows j = 1..n-1 of a closed-form sum.

    Each part (w, s, e) contributes, for k = 0..j-1,

        C(j-1, k) C(n-1-j, k+s) * w * a^k b^k (1-a)^(j-1-k) (1-b)^(n-j-k-e).

    Algebraically this is the factorization delta^k (1-b)^(n-j) (1-a)^(j-1)
    with delta = ab/((1-a)(1-b)), but that grouping pits a huge delta^k
    against a vanishing power for extreme (a, b) and overflows in linear
    space; redistributing the factors keeps every one of them bounded.
    Exponents are nonnegative wherever the binomials are nonzero.  All
    addends are nonnegative, so both the linear-space and the log-space
    accumulations are cancellation-free.
    """
    a, b = params.a, params.b
    out = np.zeros(max(n - 1, 0))
    parts = [(w, s, e) for (w, s, e) in parts if w > 0.0]
    if n <= _DIRECT_LIMIT:
        for j in range(1, n):
            terms = []
            for k in range(j):
                base = math.comb(j - 1, k) * a**k * b**k * (1.0 - a) ** (j - 1 - k)
                for w, s, e in parts:
                    c2 = choose(n - 1 - j, k + s)
                    if c2:
                        terms.append(base * w * c2 * (1.0 - b) ** (n - j - k - e))
            out[j - 1] = math.fsum(terms)
        return out

    gl = _log_choose_table(n)
    log_a, log_b = math.log(a), math.log(b)
    log_1a, log_1b = math.log1p(-a), math.log1p(-b)

    def log_c(m: int, r: np.ndarray) -> np.ndarray:
        res = np.full(r.shape, -np.inf)
        ok = (r >= 0) & (r <= m) if m >= 0 else np.zeros(r.shape, dtype=bool)
        res[ok] = gl[m] - gl[r[ok]] - gl[m - r[ok]]
        return res

    for j in range(1, n):
        k = np.arange(j)
        base = log_c(j - 1, k) + k * (log_a + log_b) + (j - 1 - k) * log_1a
        rows = [base + log_c(n - 1 - j, k + s) + math.log(w)
                + (n - j - k - e) * log_1b
                for w, s, e in parts]
        allt = np.concatenate(rows)
        top = allt.max()
        if top > -np.inf:
            out[j - 1] = math.exp(top) * float(np.exp(allt - top).sum())
    return out


def pmf_closed(params: ChainParams, n: int) -> Pmf:
    """Full PMF from the explicit finite-sum form.

    Boundary rows are pure geometric terms: f(0) = nu_A (1-b)^(n-1) and
    f(n) = nu_F (1-a)^(n-1).  Interior rows sum three binomial-weighted
    parts (see _interior_closed); weights nu_F, nu_F a + nu_A b, nu_A a b.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    a, b, nu_F, nu_A = params.a, params.b, params.nu_F, params.nu_A
    values = np.zeros(n + 1)
    values[0] = nu_A * (1.0 - b) ** (n - 1)
    values[n] = nu_F * (1.0 - a) ** (n - 1)
    parts = [(nu_F, -1, 0), (nu_F * a + nu_A * b, 0, 1), (nu_A * a * b, 1, 2)]
    values[1:n] = _interior_closed(params, n, parts)
    return _make_pmf(values, params, n, "full", "pmf_closed")


def partial_pmf_closed(params: ChainParams, n: int) -> PartialPmfPair:
    """Closed-form partial PMFs: hat_F explicitly, hat_A by subtraction.

    hat_F uses the same interior structure as pmf_closed with weights nu_F
    and nu_A b; hat_F(0) = 0 and hat_F(n) = nu_F (1-a)^(n-1).  hat_A is
    f - hat_F with rounding-level negatives clamped.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    a, b, nu_F, nu_A = params.a, params.b, params.nu_F, params.nu_A
    hF = np.zeros(n + 1)
    hF[n] = nu_F * (1.0 - a) ** (n - 1)
    hF[1:n] = _interior_closed(params, n, [(nu_F, -1, 0), (nu_A * b, 0, 1)])
    full = pmf_closed(params, n)
    hA = _clamp_small_negatives(full.values - hF, "partial_pmf_closed")
    return PartialPmfPair(n=n, hat_F=hF, hat_A=hA, params=params)


def conditional_pmf(params: ChainParams, n: int, tau: State) -> Pmf:
    """PMF of K_n given Y_n = tau: partial track over P(Y_n = tau)."""
    pair = pmf_forward(params, n)
    p_tau = state_prob(params, n, tau)
    if p_tau <= 0.0:
        raise ConditioningError(
            f"P(Y_{n} = {tau.value}) = 0; conditional law undefined")
    hat = pair.hat_F if tau is State.F else pair.hat_A
    kind = "cond_F" if tau is State.F else "cond_A"
    return _make_pmf(hat / p_tau, params, n, kind, "conditional_pmf")


def pmf_to_json(p: Pmf) -> str:
    return json.dumps(
        {
            "n": p.n,
            "a": p.params.a,
            "b": p.params.b,
            "nu_F": p.params.nu_F,
            "kind": p.kind,
            "values": [float(v) for v in p.values],
        }
    )


def pmf_to_csv(p: Pmf) -> str:
    lines = [
        f"# n={p.n} a={p.params.a:.17g} b={p.params.b:.17g}"
        f" nu_F={p.params.nu_F:.17g} kind={p.kind}",
        "j,value",
    ]
    lines.extend(f"{j},{v:.17g}" for j, v in enumerate(p.values))
    return "\n".join(lines) + "\n"
