"""Contains the EM estimator of the LCDM mixture"""

import logging
from typing import List, Optional

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve
from scipy.special import logit

from core.response import check_monotonicity
from custom_exceptions import NumericalException
from estimator.item_step import m_step_item
from estimator.likelihood import ModelEvaluator
from estimator.structural_step import m_step_structural
from models import (
    FitConfig,
    FitResult,
    ItemParameterSet,
    ModelSpec,
    ParameterSet,
    ResponseMatrix,
    StructuralParameterSet,
)
from score.gradients import GradientContext

logger = logging.getLogger(__name__)

DESCENT_SLACK = 1e-8
BOUND_SLACK = 1e-9
SCORING_RIDGE = 1e-8


class EMEstimator:
    """Marginal maximum likelihood by expectation-maximization"""

    def __init__(self, spec: ModelSpec, config: Optional[FitConfig] = None) -> None:
        self.spec = spec
        self.config = config or FitConfig()
        self.evaluator = ModelEvaluator(spec)

    def starting_values(self, data: ResponseMatrix) -> ParameterSet:
        """Deterministic starting point

        Intercepts are the logit of the observed proportion correct, clipped
        to the configured bounds. Active main effects start at
        start_main_effect and interactions at 0, except an interaction that is
        the item's only effect (DINA items), which starts like a main effect.

        Args:
            data (ResponseMatrix): responses

        Returns:
            ParameterSet
        """
        low, high = self.config.start_probability_bounds
        proportions = np.clip(data.values.mean(axis=0), low, high)
        items: List[ItemParameterSet] = []
        for item, mask in enumerate(self.spec.masks):
            values = [
                self.config.start_main_effect if len(subset) == 1 or len(mask) == 1 else 0.0
                for subset in mask
            ]
            items.append(
                ItemParameterSet.create(
                    self.spec.q.row(item),
                    mask,
                    float(logit(proportions[item])),
                    values,
                    self.spec.q.item_ids[item],
                )
            )
        structural = StructuralParameterSet.uniform(
            self.spec.n_attributes, self.spec.structural_order
        )
        return ParameterSet(tuple(items), structural)

    def _jitter(self, params: ParameterSet, rng: np.random.Generator) -> ParameterSet:
        vector = params.to_vector()
        noise = rng.uniform(-self.config.jitter, self.config.jitter, size=vector.size)
        return params.with_vector(vector + noise)

    def _maximize(self, params: ParameterSet, posteriors: np.ndarray, data: ResponseMatrix):
        values = data.values.astype(np.float64)
        correct = posteriors.T @ values
        totals = posteriors.sum(axis=0)
        warnings: List[str] = []

        items: List[ItemParameterSet] = []
        for item, current in enumerate(params.items):
            updated, item_warnings = m_step_item(
                item,
                correct[:, item],
                np.maximum(totals - correct[:, item], 0.0),
                self.spec,
                current,
                self.config,
                self.evaluator.item_designs[item],
            )
            items.append(updated)
            warnings.extend(item_warnings)

        structural, structural_warnings = m_step_structural(
            totals,
            self.spec.structural_order,
            self.spec.n_attributes,
            params.structural,
            self.config,
        )
        warnings.extend(structural_warnings)
        return ParameterSet(tuple(items), structural), warnings

    def _post_hoc_warnings(self, params: ParameterSet, data: ResponseMatrix) -> List[str]:
        warnings: List[str] = []
        proportions = data.values.mean(axis=0)
        for item, item_id in enumerate(self.spec.q.item_ids):
            if proportions[item] in (0.0, 1.0):
                warnings.append(
                    f"item '{item_id}': all responses are {int(proportions[item])}, "
                    "intercept driven to the bound"
                )
            violations = check_monotonicity(
                params.items[item],
                self.spec.q.row(item),
                self.spec.masks[item],
                self.config.monotonicity_tolerance,
            )
            if violations:
                warnings.append(
                    f"item '{item_id}': {len(violations)} monotonicity violations"
                )
        return warnings

    def _reduced_scores(self, params: ParameterSet, posteriors: np.ndarray, data: ResponseMatrix):
        snapshot = FitResult(self.spec, params, 0.0, (), posteriors, False, 0)
        gradients = GradientContext(snapshot, data).reduced()
        score = gradients.sum(axis=0)
        vector = params.to_vector()
        bound = self.config.parameter_bound - BOUND_SLACK
        pinned = (np.abs(vector) >= bound) & (np.sign(vector) == np.sign(score))
        return gradients, np.where(pinned, 0.0, score), pinned

    def _scoring_step(
        self, params: ParameterSet, loglik: float, data: ResponseMatrix, gradients, score, pinned
    ):
        """One BHHH step with halving, or None when no step improves"""
        free = ~pinned
        outer = gradients[:, free].T @ gradients[:, free]
        ridge = SCORING_RIDGE * max(float(np.trace(outer)), 1.0) / max(int(free.sum()), 1)
        try:
            factor = cho_factor(outer + ridge * np.eye(outer.shape[0]))
        except LinAlgError:
            return None
        direction = np.zeros_like(score)
        direction[free] = cho_solve(factor, score[free])

        vector = params.to_vector()
        bound = self.config.parameter_bound
        step = 1.0
        for _ in range(self.config.newton_max_iterations):
            candidate = params.with_vector(np.clip(vector + step * direction, -bound, bound))
            try:
                posteriors, new_loglik = self.evaluator.e_step(candidate, data)
            except NumericalException:
                new_loglik = -np.inf
            if new_loglik >= loglik - DESCENT_SLACK:
                return candidate, posteriors, new_loglik
            step /= 2.0
        return None

    def _polish(self, params, posteriors, loglik, data, trace, iterations):
        """Scoring steps until the reduced score vanishes"""
        budget = min(self.config.polish_max_iterations, self.config.max_iterations - iterations)
        gradients, score, pinned = self._reduced_scores(params, posteriors, data)
        norm = float(np.max(np.abs(score), initial=0.0))
        for _ in range(max(budget, 0)):
            if norm <= self.config.gradient_tolerance:
                break
            stepped = self._scoring_step(params, loglik, data, gradients, score, pinned)
            if stepped is None:
                params, _ = self._maximize(params, posteriors, data)
                posteriors, loglik = self.evaluator.e_step(params, data)
            else:
                params, posteriors, loglik = stepped
            iterations += 1
            trace.append(loglik)
            gradients, score, pinned = self._reduced_scores(params, posteriors, data)
            norm = float(np.max(np.abs(score), initial=0.0))
            logger.debug("scoring step %d: loglik %.10f, score max-norm %.3e", iterations, loglik, norm)
        return params, posteriors, loglik, iterations, norm

    def _run(self, start: ParameterSet, data: ResponseMatrix) -> FitResult:
        params = start
        posteriors, loglik = self.evaluator.e_step(params, data)
        trace = [loglik]
        warnings: List[str] = []
        converged = False
        iterations = 0

        for iterations in range(1, self.config.max_iterations + 1):
            params, step_warnings = self._maximize(params, posteriors, data)
            for warning in step_warnings:
                if warning not in warnings:
                    warnings.append(warning)

            posteriors, new_loglik = self.evaluator.e_step(params, data)
            trace.append(new_loglik)
            change = new_loglik - loglik
            logger.debug("EM iteration %d: loglik %.10f (change %.3e)", iterations, new_loglik, change)
            if change < -DESCENT_SLACK:
                logger.warning("EM step %d decreased the log-likelihood by %.3e", iterations, -change)

            loglik = new_loglik
            if (
                abs(change) < self.config.absolute_tolerance
                or abs(change) < self.config.relative_tolerance * abs(loglik)
            ):
                converged = True
                break

        if converged:
            params, posteriors, loglik, iterations, norm = self._polish(
                params, posteriors, loglik, data, trace, iterations
            )
            if norm > self.config.score_tolerance:
                converged = False
                warnings.append(
                    f"reduced score max-norm {norm:.3e} above tolerance "
                    f"{self.config.score_tolerance:g} after {iterations} iterations"
                )
        else:
            warnings.append(
                f"EM did not converge in {self.config.max_iterations} iterations"
            )
        warnings.extend(self._post_hoc_warnings(params, data))

        return FitResult(
            spec=self.spec,
            params=params,
            loglik=loglik,
            loglik_trace=tuple(trace),
            posteriors=posteriors,
            converged=converged,
            iterations=iterations,
            warnings=tuple(warnings),
        )

    def fit(self, data: ResponseMatrix, start: Optional[ParameterSet] = None) -> FitResult:
        """Runs EM, with optional jittered restarts

        Args:
            data (ResponseMatrix): responses
            start (ParameterSet, optional): starting point, deterministic default

        Returns:
            FitResult: best run by final log-likelihood
        """
        data.check_against(self.spec.q)
        base = start if start is not None else self.starting_values(data)
        best = self._run(base, data)

        if self.config.restarts > 0:
            rng = np.random.Generator(np.random.PCG64(self.config.seed))
            for restart in range(self.config.restarts):
                candidate = self._run(self._jitter(base, rng), data)
                logger.info(
                    "restart %d: loglik %.6f (best %.6f)", restart + 1, candidate.loglik, best.loglik
                )
                if candidate.loglik > best.loglik:
                    best = candidate

        for warning in best.warnings:
            logger.warning(warning)
        logger.info(
            "fit %s: loglik %.6f, %d iterations, converged=%s",
            self.spec.template,
            best.loglik,
            best.iterations,
            best.converged,
        )
        return best


def fit(
    spec: ModelSpec,
    data: ResponseMatrix,
    config: Optional[FitConfig] = None,
    start: Optional[ParameterSet] = None,
) -> FitResult:
    """Fits a ModelSpec to responses

    Args:
        spec (ModelSpec): model specification
        data (ResponseMatrix): responses
        config (FitConfig, optional): estimation knobs. Defaults to settings.
        start (ParameterSet, optional): starting values

    Returns:
        FitResult
    """
    return EMEstimator(spec, config).fit(data, start)
