# -*- coding: utf-8 -*-
from scipy.special import ndtr


class QualityConstants:
    """
    Conventional values of the ±3σ normal capability world.
    """
    # Lower tail of a normal beyond μ-3σ, Φ(-3). Commonly printed as 0.00135.
    NORMAL_TAIL = float(ndtr(-3.0))

    # Default tail proportions of a desired (natural) tolerance region.
    DESIRED_TAIL = 0.00135

    # Desired yield of a capable process (minimum allowable conformance).
    DESIRED_YIELD = 0.9973

    # Tolerated nonconforming fraction matching DESIRED_YIELD.
    NONCONFORMING = 0.0027

    # Number of standard deviations on each side of the natural tolerance.
    SIGMA_MULTIPLE = 3.0


class NumericDefaults:
    """
    Defaults for numerical routines. Settings in settings.toml override the
    values that have a counterpart there.
    """
    # Bisection steps before a Monte Carlo root search gives up.
    BISECTION_MAX_STEPS = 200

    # Relative interval width at which bisection stops.
    BISECTION_TOLERANCE = 1e-10

    # Smallest Monte Carlo size accepted for model-based multivariate indices.
    MIN_MC_DRAWS = 100_000

    # Smallest Monte Carlo size accepted by the yield oracle.
    MIN_ORACLE_DRAWS = 10_000

    # Smallest number of bootstrap resamples.
    MIN_BOOTSTRAP_REPLICATES = 200

    # Tolerance used when checking covariance symmetry.
    SYMMETRY_TOLERANCE = 1e-12

    # Half-width, in standard deviations, of the bracket used to invert CDFs numerically.
    QUANTILE_BRACKET_SDS = 40.0
