"""Contains the mixture likelihood and the E-step"""

from typing import List, Tuple

import numpy as np
from scipy.special import log_expit, logsumexp

from core.effects import design_matrix
from core.profiles import profile_matrix
from custom_exceptions import NumericalException
from models import ModelSpec, ParameterSet, ResponseMatrix


class ModelEvaluator:
    """Caches the class-level design of a spec

    item_designs[i] is C x (1 + |mask_i|), the first column being the
    intercept.
    """

    def __init__(self, spec: ModelSpec) -> None:
        self.spec = spec
        self.profiles = profile_matrix(spec.n_attributes)
        self.item_designs: List[np.ndarray] = []
        for mask in spec.masks:
            design = design_matrix(self.profiles, mask)
            self.item_designs.append(
                np.hstack((np.ones((self.profiles.shape[0], 1)), design))
            )
        self.structural_design = design_matrix(self.profiles, spec.structural_subsets())

    def item_logits(self, params: ParameterSet) -> np.ndarray:
        """C x I matrix of eta_ic"""
        return np.column_stack(
            [
                design @ item.free_vector()
                for design, item in zip(self.item_designs, params.items)
            ]
        )

    def item_probabilities(self, params: ParameterSet) -> np.ndarray:
        """C x I matrix of pi_ic"""
        return np.exp(log_expit(self.item_logits(params)))

    def log_nu(self, params: ParameterSet) -> np.ndarray:
        """log class probabilities"""
        log_mu = self.structural_design @ params.structural.free_vector()
        return log_mu - logsumexp(log_mu)

    def class_loglik(self, params: ParameterSet, data: ResponseMatrix) -> np.ndarray:
        """E x C matrix of log prod_i pi^y (1 - pi)^(1 - y)"""
        logits = self.item_logits(params)
        values = data.values.astype(np.float64)
        return values @ log_expit(logits).T + (1.0 - values) @ log_expit(-logits).T

    def joint(self, params: ParameterSet, data: ResponseMatrix) -> Tuple[np.ndarray, np.ndarray]:
        """Returns (log nu_c + log L_ec, log f_e)"""
        log_joint = self.class_loglik(params, data) + self.log_nu(params)[None, :]
        log_marginal = logsumexp(log_joint, axis=1)
        bad = np.flatnonzero(~np.isfinite(log_marginal))
        if bad.size:
            raise NumericalException(
                f"Non-finite likelihood for examinee {data.examinee_ids[bad[0]]}",
                examinee_index=int(bad[0]),
            )
        return log_joint, log_marginal

    def log_likelihood(self, params: ParameterSet, data: ResponseMatrix) -> float:
        """Sum over examinees of log f_e"""
        _, log_marginal = self.joint(params, data)
        return float(np.sum(log_marginal))

    def e_step(self, params: ParameterSet, data: ResponseMatrix) -> Tuple[np.ndarray, float]:
        """Returns (E x C posteriors, log-likelihood)"""
        log_joint, log_marginal = self.joint(params, data)
        posteriors = np.exp(log_joint - log_marginal[:, None])
        posteriors /= posteriors.sum(axis=1, keepdims=True)
        return posteriors, float(np.sum(log_marginal))


def log_likelihood(spec: ModelSpec, params: ParameterSet, data: ResponseMatrix) -> float:
    """Marginal log-likelihood of the LCDM mixture

    Args:
        spec (ModelSpec): model specification
        params (ParameterSet): parameters
        data (ResponseMatrix): responses

    Returns:
        float: sum_e log sum_c nu_c prod_i pi^y (1 - pi)^(1 - y)
    """
    data.check_against(spec.q)
    return ModelEvaluator(spec).log_likelihood(params, data)


def e_step(spec: ModelSpec, params: ParameterSet, data: ResponseMatrix) -> np.ndarray:
    """Posterior class membership P(c | y_e)

    Args:
        spec (ModelSpec): model specification
        params (ParameterSet): parameters
        data (ResponseMatrix): responses

    Returns:
        np.ndarray: E x C matrix, rows summing to one
    """
    data.check_against(spec.q)
    posteriors, _ = ModelEvaluator(spec).e_step(params, data)
    return posteriors
