"""Contains the tetrachoric correlation oracle"""

from typing import Sequence

import numpy as np
from scipy.optimize import bisect
from scipy.stats import multivariate_normal, norm

from custom_exceptions import ConfigurationException

RHO_LIMIT = 1.0 - 1e-9


def table_2x2(first: Sequence[int], second: Sequence[int]) -> np.ndarray:
    """Counts of (0,0), (0,1), (1,0), (1,1) as a 2 x 2 table"""
    first = np.asarray(first, dtype=np.int64)
    second = np.asarray(second, dtype=np.int64)
    table = np.zeros((2, 2), dtype=np.int64)
    np.add.at(table, (first, second), 1)
    return table


def tetrachoric(table: np.ndarray, xtol: float = 1e-8) -> float:
    """Correlation of the bivariate normal that reproduces a 2 x 2 table

    Thresholds sit at the normal quantiles of the observed marginals and
    the correlation is found by bisection on the bivariate normal CDF.

    Args:
        table (np.ndarray): 2 x 2 counts, rows first variable 0/1
        xtol (float, optional): bisection tolerance

    Returns:
        float: tetrachoric correlation
    """
    counts = np.asarray(table, dtype=np.float64)
    if counts.shape != (2, 2) or (counts < 0).any() or counts.sum() <= 0:
        raise ConfigurationException("Tetrachoric correlation needs a nonnegative 2 x 2 table")
    total = counts.sum()
    first_zero = counts[0].sum() / total
    second_zero = counts[:, 0].sum() / total
    if first_zero in (0.0, 1.0) or second_zero in (0.0, 1.0):
        raise ConfigurationException("Tetrachoric correlation undefined for a constant variable")

    thresholds = np.array([norm.ppf(first_zero), norm.ppf(second_zero)])
    target = counts[0, 0] / total

    def gap(rho: float) -> float:
        cdf = multivariate_normal.cdf(
            thresholds, mean=np.zeros(2), cov=[[1.0, rho], [rho, 1.0]], abseps=1e-9, releps=1e-9
        )
        return float(cdf) - target

    low, high = gap(-RHO_LIMIT), gap(RHO_LIMIT)
    if low >= 0.0:
        return -1.0
    if high <= 0.0:
        return 1.0
    return float(bisect(gap, -RHO_LIMIT, RHO_LIMIT, xtol=xtol))
