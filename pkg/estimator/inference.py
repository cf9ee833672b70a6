"""Contains classification and nested-model comparison"""

import logging
from typing import List

import numpy as np
from scipy.stats import chi2

from core.profiles import profile_matrix
from custom_exceptions import ContractViolationException
from models import AttributeProfile, FitResult, LRTestResult

logger = logging.getLogger(__name__)

LR_NEGATIVE_TOLERANCE = 1e-6


def classify_indices(posteriors: np.ndarray) -> np.ndarray:
    """Posterior-mode class per row, lowest class index on ties

    Args:
        posteriors (np.ndarray): E x C matrix

    Returns:
        np.ndarray: length E vector of class indices
    """
    # argmax returns the first maximum
    return np.argmax(np.asarray(posteriors), axis=1)


def classify(fit: FitResult) -> List[AttributeProfile]:
    """Posterior-mode mastery profile of every examinee

    Args:
        fit (FitResult): fitted model

    Returns:
        list[AttributeProfile]
    """
    attribute_count = fit.spec.n_attributes
    return [
        AttributeProfile.from_index(int(index), attribute_count)
        for index in classify_indices(fit.posteriors)
    ]


def marginal_mastery(fit: FitResult) -> np.ndarray:
    """E x A matrix of P(alpha_a = 1 | y_e)"""
    return fit.posteriors @ profile_matrix(fit.spec.n_attributes)


def lr_test(fit_full: FitResult, fit_reduced: FitResult, df: int) -> LRTestResult:
    """Likelihood-ratio test of a reduced model nested in a full one

    Args:
        fit_full (FitResult): full model fit
        fit_reduced (FitResult): reduced model fit
        df (int): number of restricted parameters

    Returns:
        LRTestResult
    """
    if df < 1:
        raise ContractViolationException(f"LR test needs df >= 1, got {df}")
    statistic = 2.0 * (fit_full.loglik - fit_reduced.loglik)
    warnings = []
    if statistic < 0.0:
        if statistic < -LR_NEGATIVE_TOLERANCE:
            message = (
                f"negative LR statistic {statistic:.3g}: the full model "
                "did not reach its maximum"
            )
            warnings.append(message)
            logger.warning(message)
        statistic = 0.0
    return LRTestResult(
        statistic=statistic,
        df=int(df),
        p_value=float(chi2.sf(statistic, df)),
        warnings=tuple(warnings),
    )
