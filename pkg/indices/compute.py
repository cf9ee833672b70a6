"""Contains the one-at-a-time modification index computation"""

import concurrent.futures as pool
import logging
from typing import Any, List, Optional, Sequence

import numpy as np

from custom_exceptions import ContractViolationException, NumericalException
from models import Candidate, FitResult, ModificationIndex, ResponseMatrix
from score.gradients import GradientContext
from score.information import ReducedInformation
from score.statistics import one_sided_score

logger = logging.getLogger(__name__)


class IndexCalculator:
    """Scores candidates against one reduced-model fit

    The reduced gradients and the factorized I11 block are shared; each
    candidate only adds its own gradient column.
    """

    def __init__(self, fit: FitResult, data: ResponseMatrix) -> None:
        self.fit = fit
        self.context = GradientContext(fit, data)
        self.reduced = self.context.reduced()
        info = self.reduced.T @ self.reduced
        self.information = ReducedInformation((info + info.T) / 2.0)

    def _already_free(self, candidate: Candidate) -> bool:
        return len(candidate.effect) == 0 or candidate.effect in self.fit.spec.masks[candidate.item]

    def compute(self, candidate: Candidate) -> ModificationIndex:
        """Modification index of one candidate

        Args:
            candidate (Candidate): candidate parameter

        Returns:
            ModificationIndex
        """
        if not 0 <= candidate.item < self.fit.spec.n_items:
            raise ContractViolationException(f"Candidate item {candidate.item} out of range")

        try:
            gradient = self.context.item(candidate.item, candidate.effect)
        except NumericalException as exception:
            return ModificationIndex(
                candidate, 0.0, 1.0, unavailable=True, reason=str(exception)
            )
        s2 = float(np.sum(gradient))

        if self._already_free(candidate):
            return ModificationIndex(
                candidate,
                0.0,
                1.0,
                s2=s2,
                boundary_case=True,
                reason="parameter already free in the reduced model",
            )

        block = self.information.inverse_block(
            self.reduced.T @ gradient, np.array([[gradient @ gradient]])
        )
        if block.unavailable:
            return ModificationIndex(
                candidate, 0.0, 1.0, s2=s2, unavailable=True, reason=block.reason
            )

        i22 = float(block.i22[0, 0])
        result = one_sided_score(s2, i22, candidate.constraint, candidate.k)
        return ModificationIndex(
            candidate,
            result.t_s,
            result.p_value,
            s2=s2,
            i22=i22,
            boundary_case=result.boundary_case,
        )


def compute_mis(
    fit: FitResult,
    candidates: Sequence[Candidate],
    data: ResponseMatrix,
    threads: Optional[int] = 1,
) -> List[ModificationIndex]:
    """Computes every candidate's index independently

    Args:
        fit (FitResult): reduced-model fit
        candidates (Sequence[Candidate]): candidates to score
        data (ResponseMatrix): responses the fit was computed on
        threads (int, optional): worker threads. Defaults to 1.

    Returns:
        list[ModificationIndex]: in the order of candidates
    """
    if not fit.converged:
        logger.warning("computing modification indices on a fit that did not converge")
    if not candidates:
        return []

    calculator = IndexCalculator(fit, data)
    indices: List[Optional[ModificationIndex]] = [None] * len(candidates)

    if threads is None or threads <= 1:
        for position, candidate in enumerate(candidates):
            indices[position] = calculator.compute(candidate)
    else:
        with pool.ThreadPoolExecutor(max_workers=threads) as executor:
            futures: List[Any] = [
                executor.submit(calculator.compute, candidate) for candidate in candidates
            ]
            future_positions = {future: position for position, future in enumerate(futures)}
            for future in pool.as_completed(futures):
                indices[future_positions[future]] = future.result()

    for index in indices:
        if index is not None and index.unavailable:
            logger.warning("%s unavailable: %s", index.candidate.label, index.reason)
    return [index for index in indices if index is not None]
