"""Shared helpers for drawing random chain parameters."""
import numpy as np

from markov_binomial import make_params


def draw_params(rng, lo=0.01, hi=0.99, degenerate_nu=0.2):
    """Random ChainParams; degenerate_nu is the chance of nu_F in {0, 1}."""
    a = float(rng.uniform(lo, hi))
    b = float(rng.uniform(lo, hi))
    u = rng.random()
    if u < degenerate_nu / 2:
        nu_F = 0.0
    elif u < degenerate_nu:
        nu_F = 1.0
    else:
        nu_F = float(rng.uniform(0.0, 1.0))
    return make_params(a, b, nu_F)


def draw_params_grid(seed, count, **kwargs):
    rng = np.random.default_rng(seed)
    return [draw_params(rng, **kwargs) for _ in range(count)]
