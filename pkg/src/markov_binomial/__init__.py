"""Exact computation for the Markov binomial distribution.

Bin(n, a, b, nu) is the law of K_n, the number of visits to the success
state F in the first n steps of a two-state Markov chain with F->A
transition probability a, A->F probability b, and initial law nu.  The
package computes its PMF by three independent methods, closed-form moments
and state-conditional moments, conditional PMFs, and an exact shape
classification (unimodal / bimodal / trimodal), all cross-validated against
a brute-force path-enumeration oracle.
"""
from .chain import (ChainParams, DerivedParams, ParameterError, State, derive,
                    make_params, state_prob, transition_power)
from .exact import EXACT_CAP, classify_exact, partial_pmf_exact, pmf_exact
from .moments import (MomentReport, cond_mean, cond_moment, cond_variance,
                      mean, moment_report, report_to_json, variance)
from .oracle import (ENUMERATION_CAP, EnumerationResult, SampleSummary,
                     enumerate_paths, sample, sample_to_csv, sample_to_json)
from .pmf import (CoefficientTable, ConditioningError, PartialPmfPair, Pmf,
                  choose, coefficient_table, conditional_pmf, partial_pmf_closed,
                  pmf, pmf_closed, pmf_forward, pmf_recurrence, pmf_to_csv,
                  pmf_to_json)
from .shape import (ModeSet, RegionGrid, Shape, ShapeClass, classify,
                    classify_region, classify_values, is_log_concave, modes,
                    region_to_csv, region_to_json)

__version__ = "0.1.0"

__all__ = [
    "ChainParams", "DerivedParams", "ParameterError", "State",
    "make_params", "derive", "transition_power", "state_prob",
    "Pmf", "PartialPmfPair", "CoefficientTable", "ConditioningError",
    "choose", "coefficient_table", "pmf", "pmf_forward", "pmf_recurrence",
    "pmf_closed", "partial_pmf_closed", "conditional_pmf",
    "pmf_to_json", "pmf_to_csv",
    "EXACT_CAP", "pmf_exact", "partial_pmf_exact", "classify_exact",
    "MomentReport", "mean", "variance", "cond_mean", "cond_variance",
    "cond_moment", "moment_report", "report_to_json",
    "Shape", "ShapeClass", "ModeSet", "RegionGrid",
    "is_log_concave", "modes", "classify", "classify_values",
    "classify_region", "region_to_csv", "region_to_json",
    "ENUMERATION_CAP", "EnumerationResult", "SampleSummary",
    "enumerate_paths", "sample", "sample_to_json", "sample_to_csv",
    "__version__",
]
