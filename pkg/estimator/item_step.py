"""Contains the item M-step"""

from typing import List, Optional, Tuple

import numpy as np
from scipy.special import expit, log_expit

from core.effects import design_matrix
from core.profiles import profile_matrix
from custom_exceptions import ContractViolationException
from estimator.newton import newton_ascent
from models import FitConfig, ItemParameterSet, ModelSpec


def item_objective(
    design: np.ndarray, correct: np.ndarray, incorrect: np.ndarray
):
    """Expected complete-data log-likelihood of one item

    Args:
        design (np.ndarray): C x p design, intercept column first
        correct (np.ndarray): expected correct responses per class
        incorrect (np.ndarray): expected incorrect responses per class

    Returns:
        callable: beta -> (value, gradient, hessian)
    """
    total = correct + incorrect

    def evaluate(beta: np.ndarray):
        eta = design @ beta
        value = float(correct @ log_expit(eta) + incorrect @ log_expit(-eta))
        probability = expit(eta)
        gradient = design.T @ (correct - total * probability)
        weights = total * probability * (1.0 - probability)
        hessian = -(design.T * weights) @ design
        return value, gradient, hessian

    return evaluate


def m_step_item(
    item_index: int,
    expected_correct: np.ndarray,
    expected_incorrect: np.ndarray,
    spec: ModelSpec,
    current: Optional[ItemParameterSet] = None,
    config: Optional[FitConfig] = None,
    design: Optional[np.ndarray] = None,
) -> Tuple[ItemParameterSet, List[str]]:
    """Maximizes one item's expected complete-data log-likelihood

    Args:
        item_index (int): 0-based item position
        expected_correct (np.ndarray): n_ic1 per class
        expected_incorrect (np.ndarray): n_ic0 per class
        spec (ModelSpec): model specification
        current (ItemParameterSet, optional): starting point, zeros when None
        config (FitConfig, optional): tolerances. Defaults to settings.
        design (np.ndarray, optional): cached C x p design

    Returns:
        tuple[ItemParameterSet, list[str]]: (updated parameters, warnings)
    """
    config = config or FitConfig()
    correct = np.asarray(expected_correct, dtype=np.float64)
    incorrect = np.asarray(expected_incorrect, dtype=np.float64)
    if (correct < 0).any() or (incorrect < 0).any():
        raise ContractViolationException("Expected counts must be nonnegative")
    if correct.sum() + incorrect.sum() <= 0:
        raise ContractViolationException("Expected counts carry no weight")

    mask = spec.masks[item_index]
    q_row = spec.q.row(item_index)
    if design is None:
        profiles = profile_matrix(spec.n_attributes)
        design = np.hstack((np.ones((profiles.shape[0], 1)), design_matrix(profiles, mask)))
    if current is None:
        current = ItemParameterSet.create(q_row, mask, item_id=spec.q.item_ids[item_index])

    beta, warnings = newton_ascent(
        item_objective(design, correct, incorrect),
        current.free_vector(),
        config.newton_tolerance,
        config.newton_max_iterations,
        config.parameter_bound,
        f"item '{spec.q.item_ids[item_index]}'",
    )
    return current.with_free_vector(beta), warnings
