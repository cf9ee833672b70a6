"""Contains the LCDM item response function and the monotonicity check"""

from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import expit

from core.effects import Subset, design_matrix, design_vector
from core.profiles import profile_matrix, profile_space
from models import AttributeProfile, ItemParameterSet
from settings import SETTINGS_MANAGER


def linear_predictor(
    params: ItemParameterSet,
    profile: AttributeProfile,
    q_row: Sequence[int],
    mask: Sequence[Subset],
) -> float:
    """eta = lambda_0 + lambda^T h(alpha_c, q_i)

    Args:
        params (ItemParameterSet): item parameters
        profile (AttributeProfile): mastery profile
        q_row (Sequence[int]): Q-row
        mask (Sequence[Subset]): active effects

    Returns:
        float: log-odds of a correct response
    """
    h = design_vector(profile, q_row, mask)
    lambdas = np.array([params.value(subset) for subset in mask], dtype=np.float64)
    return float(params.intercept + h @ lambdas)


def item_response_prob(
    params: ItemParameterSet,
    profile: AttributeProfile,
    q_row: Sequence[int],
    mask: Sequence[Subset],
) -> float:
    """Probability of a correct response for one profile

    Args:
        params (ItemParameterSet): item parameters
        profile (AttributeProfile): mastery profile
        q_row (Sequence[int]): Q-row
        mask (Sequence[Subset]): active effects

    Returns:
        float: pi_ic
    """
    return float(expit(linear_predictor(params, profile, q_row, mask)))


def item_response_curve(params: ItemParameterSet, attribute_count: int) -> np.ndarray:
    """pi_ic over every class, in class index order

    Args:
        params (ItemParameterSet): item parameters
        attribute_count (int): A

    Returns:
        np.ndarray: length 2^A vector
    """
    design = design_matrix(profile_matrix(attribute_count), params.active_mask)
    return expit(params.intercept + design @ params.active_values())


def check_monotonicity(
    params: ItemParameterSet,
    q_row: Sequence[int],
    mask: Sequence[Subset],
    tol: Optional[float] = None,
) -> List[Tuple[AttributeProfile, AttributeProfile]]:
    """Finds profile pairs where more mastery lowers the success probability

    Args:
        params (ItemParameterSet): item parameters
        q_row (Sequence[int]): Q-row
        mask (Sequence[Subset]): active effects
        tol (float, optional): comparison slack. Defaults to settings.

    Returns:
        list[tuple[AttributeProfile, AttributeProfile]]: (alpha, alpha') with
        alpha <= alpha' elementwise and pi(alpha) > pi(alpha') + tol
    """
    tolerance = SETTINGS_MANAGER.score.monotonicity_tolerance if tol is None else tol
    profiles = profile_space(len(q_row))
    probabilities = np.array(
        [item_response_prob(params, profile, q_row, mask) for profile in profiles]
    )
    indices = np.arange(len(profiles))
    # low <= high elementwise iff low has no bit outside high
    dominated = (indices[:, None] & ~indices[None, :]) == 0
    np.fill_diagonal(dominated, False)
    worse = probabilities[:, None] > probabilities[None, :] + tolerance
    lows, highs = np.nonzero(dominated & worse)
    return [(profiles[low], profiles[high]) for low, high in zip(lows, highs)]
