"""Contains score statistics and the 50:50 chi-square mixture reference"""

import logging
from typing import Literal, Optional, Union

import numpy as np
from scipy.stats import chi2

from custom_exceptions import ContractViolationException
from models import OneSidedScoreResult

logger = logging.getLogger(__name__)

ConstraintType = Literal["positive", "greater_than_minus_k"]

CONSTRAINTS = ("positive", "greater_than_minus_k")

SMALLEST_PVALUE = np.finfo(np.float64).tiny


def score_statistic(
    s2: Union[float, np.ndarray],
    i22: Union[float, np.ndarray],
    examinees: Optional[int] = None,  # pylint:disable=W0613:unused-argument
) -> float:
    """Two-sided score statistic s2^T i22 s2

    Args:
        s2 (float | np.ndarray): candidate score(s), summed over examinees
        i22 (float | np.ndarray): effective inverse information block
        examinees (int, optional): sample size E, ignored since s2 and the
            information behind i22 are already summed over examinees

    Returns:
        float: nonnegative statistic
    """
    score = np.atleast_1d(np.asarray(s2, dtype=np.float64))
    block = np.atleast_2d(np.asarray(i22, dtype=np.float64))
    if block.shape != (score.size, score.size):
        raise ContractViolationException(
            f"Score of size {score.size} does not match block {block.shape}"
        )
    return max(0.0, float(score @ block @ score))


def mixture_pvalue(t: float) -> float:
    """Upper tail of 1/2 chi2(0) + 1/2 chi2(1)

    Args:
        t (float): statistic, nonnegative

    Returns:
        float: 1 at t = 0, else half the chi2(1) upper tail
    """
    if t < 0:
        raise ContractViolationException(f"Statistic must be nonnegative, got {t}")
    if t == 0:
        return 1.0
    return max(0.5 * float(chi2.sf(t, 1)), SMALLEST_PVALUE)


def mixture_critical_value(alpha: float) -> float:
    """Threshold c with 1/2 P(chi2(1) > c) = alpha

    Args:
        alpha (float): significance level

    Returns:
        float: critical value, 0 when alpha >= 0.5
    """
    if alpha <= 0:
        raise ContractViolationException(f"alpha must be positive, got {alpha}")
    if alpha >= 0.5:
        logger.info("alpha %.3g covers the whole continuous mass, critical value 0", alpha)
        return 0.0
    return float(chi2.isf(2.0 * alpha, 1))


def one_sided_score(
    s2: float,
    i22_effective: float,
    constraint: ConstraintType,
    k: float = 0.0,
) -> OneSidedScoreResult:
    """One-sided score statistic of a single candidate

    With greater_than_minus_k the one-step estimate b = i22 * s2 is compared
    with -k; below the boundary the statistic loses the squared
    standardized distance (b + k)^2 / i22 and is floored at 0.

    Args:
        s2 (float): candidate score
        i22_effective (float): effective inverse information
        constraint (ConstraintType): "positive" or "greater_than_minus_k"
        k (float, optional): boundary offset, nonnegative

    Returns:
        OneSidedScoreResult
    """
    if constraint not in CONSTRAINTS:
        raise ContractViolationException(f"Unknown constraint '{constraint}'")
    if k < 0:
        raise ContractViolationException(f"k must be nonnegative, got {k}")
    if i22_effective <= 0:
        raise ContractViolationException(
            f"Effective information must be positive, got {i22_effective}"
        )

    two_sided = score_statistic(s2, i22_effective)
    truncated = False
    if constraint == "positive":
        t_s = two_sided if s2 > 0 else 0.0
    else:
        estimate = i22_effective * s2
        if estimate > -k:
            t_s = two_sided
        else:
            truncated = True
            t_s = max(0.0, (estimate**2 - (estimate + k) ** 2) / i22_effective)

    return OneSidedScoreResult(
        t_s=t_s,
        s2=float(s2),
        i22=float(i22_effective),
        two_sided=two_sided,
        p_value=mixture_pvalue(t_s),
        boundary_case=t_s == 0.0,
        truncated=truncated,
    )
