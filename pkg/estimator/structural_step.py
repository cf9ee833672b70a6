"""Contains the structural M-step"""

from itertools import combinations
from typing import List, Optional, Tuple

import numpy as np
from scipy.special import logsumexp

from core.effects import canonical_subsets, design_matrix, effect_label
from core.profiles import profile_matrix
from custom_exceptions import ContractViolationException
from estimator.newton import newton_ascent
from models import FitConfig, StructuralParameterSet


def structural_objective(design: np.ndarray, counts: np.ndarray):
    """sum_c n_c log nu_c under the log-linear model

    Args:
        design (np.ndarray): C x G log-linear design
        counts (np.ndarray): expected class counts

    Returns:
        callable: gamma -> (value, gradient, hessian)
    """
    total = float(counts.sum())

    def evaluate(gamma: np.ndarray):
        log_mu = design @ gamma
        log_nu = log_mu - logsumexp(log_mu)
        nu = np.exp(log_nu)
        value = float(counts @ log_nu)
        expected = design.T @ nu
        gradient = design.T @ counts - total * expected
        covariance = (design.T * nu) @ design - np.outer(expected, expected)
        return value, gradient, -total * covariance

    return evaluate


def mobius_gammas(log_mu: np.ndarray, attribute_count: int) -> dict:
    """Log-contrasts of a saturated table: gamma_S = sum_{T in S} (-1)^|S-T| log mu_T"""
    gammas = {}
    for subset in canonical_subsets(range(attribute_count)):
        value = 0.0
        for size in range(len(subset) + 1):
            for inner in combinations(subset, size):
                class_index = sum(1 << position for position in inner)
                value += (-1.0) ** (len(subset) - size) * log_mu[class_index]
        gammas[subset] = value
    return gammas


def m_step_structural(
    expected_class_counts: np.ndarray,
    structural_order: int,
    attribute_count: int,
    current: Optional[StructuralParameterSet] = None,
    config: Optional[FitConfig] = None,
) -> Tuple[StructuralParameterSet, List[str]]:
    """Fits the log-linear structural model to expected class counts

    Args:
        expected_class_counts (np.ndarray): length 2^A, nonnegative
        structural_order (int): highest interaction order, A is saturated
        attribute_count (int): A
        current (StructuralParameterSet, optional): starting point
        config (FitConfig, optional): tolerances. Defaults to settings.

    Returns:
        tuple[StructuralParameterSet, list[str]]: (parameters, warnings)
    """
    config = config or FitConfig()
    counts = np.asarray(expected_class_counts, dtype=np.float64)
    if counts.shape != (2**attribute_count,):
        raise ContractViolationException(
            f"Expected {2**attribute_count} class counts, got {counts.size}"
        )
    if (counts < 0).any() or counts.sum() <= 0:
        raise ContractViolationException("Class counts must be nonnegative with a positive sum")

    warnings: List[str] = []
    if structural_order == attribute_count:
        nu = counts / counts.sum()
        if (nu < config.class_floor).any():
            empty = [int(c) for c in np.flatnonzero(nu < config.class_floor)]
            warnings.append(
                f"structural model: classes {empty} have zero expected count, "
                f"floored at {config.class_floor:g}"
            )
            nu = np.maximum(nu, config.class_floor)
            nu /= nu.sum()
        log_mu = np.log(nu) - np.log(nu[0])
        gammas = mobius_gammas(log_mu, attribute_count)
        bound = config.parameter_bound
        clamped = [s for s, v in gammas.items() if abs(v) > bound]
        if clamped:
            warnings.append(
                "structural model: gammas "
                f"{[effect_label(s) for s in clamped]} clamped at +/-{bound:g}"
            )
            gammas = {s: float(np.clip(v, -bound, bound)) for s, v in gammas.items()}
        return StructuralParameterSet(attribute_count, structural_order, gammas), warnings

    if current is None:
        current = StructuralParameterSet.uniform(attribute_count, structural_order)
    design = design_matrix(profile_matrix(attribute_count), current.subsets())
    gamma, newton_warnings = newton_ascent(
        structural_objective(design, counts),
        current.free_vector(),
        config.newton_tolerance,
        config.newton_max_iterations,
        config.parameter_bound,
        "structural model",
    )
    warnings.extend(newton_warnings)
    return current.with_free_vector(gamma), warnings
