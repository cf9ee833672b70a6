"""Contains the damped Newton ascent shared by the M-steps"""

import logging
from typing import Callable, List, Tuple

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

logger = logging.getLogger(__name__)

Objective = Callable[[np.ndarray], Tuple[float, np.ndarray, np.ndarray]]

MIN_STEP = 2.0**-30


def newton_ascent(
    objective: Objective,
    start: np.ndarray,
    tolerance: float,
    max_iterations: int,
    bound: float,
    name: str,
) -> Tuple[np.ndarray, List[str]]:
    """Maximizes a concave-ish objective by damped Newton steps

    Steps are halved until the objective does not decrease, and every
    iterate is clamped to [-bound, bound].

    Args:
        objective (Objective): x -> (value, gradient, hessian)
        start (np.ndarray): starting point
        tolerance (float): stop when the gradient max-norm falls below it
        max_iterations (int): inner iteration cap
        bound (float): box bound on every coordinate
        name (str): label for warnings

    Returns:
        tuple[np.ndarray, list[str]]: (maximizer, warnings)
    """
    warnings: List[str] = []
    point = np.clip(np.asarray(start, dtype=np.float64), -bound, bound)
    value, gradient, hessian = objective(point)

    for _ in range(max_iterations):
        if np.max(np.abs(gradient)) < tolerance:
            break

        try:
            factor = cho_factor(-hessian)
            direction = cho_solve(factor, gradient)
            if not np.all(np.isfinite(direction)):
                raise LinAlgError("non-finite Newton direction")
        except (LinAlgError, ValueError):
            message = f"{name}: singular Hessian, gradient step used"
            if message not in warnings:
                warnings.append(message)
            logger.debug(message)
            direction = gradient / max(1.0, float(np.linalg.norm(gradient)))

        step = 1.0
        accepted = False
        while step >= MIN_STEP:
            candidate = np.clip(point + step * direction, -bound, bound)
            candidate_value, candidate_gradient, candidate_hessian = objective(candidate)
            if np.isfinite(candidate_value) and candidate_value >= value:
                accepted = True
                break
            step /= 2.0
        if not accepted:
            break

        moved = float(np.max(np.abs(candidate - point)))
        point, value = candidate, candidate_value
        gradient, hessian = candidate_gradient, candidate_hessian
        if moved == 0.0:
            break

    if np.any(np.abs(point) >= bound):
        warnings.append(f"{name}: parameter clamped at +/-{bound:g}")
    return point, warnings
