"""Contains the empirical information and its partitioned inverse"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from custom_exceptions import ContractViolationException
from settings import SETTINGS_MANAGER

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class InverseBlock:
    """Effective inverse information of the trailing candidate block"""

    i22: Optional[np.ndarray]
    unavailable: bool = False
    reason: str = ""
    warnings: Tuple[str, ...] = ()


def empirical_info(per_examinee: np.ndarray) -> np.ndarray:
    """Sum over examinees of g_e g_e^T

    Args:
        per_examinee (np.ndarray): E x p gradient matrix, candidates last

    Returns:
        np.ndarray: symmetric p x p matrix
    """
    gradients = np.asarray(per_examinee, dtype=np.float64)
    if gradients.ndim == 1:
        gradients = gradients[:, None]
    info = gradients.T @ gradients
    return (info + info.T) / 2.0


class ReducedInformation:
    """Holds the factorized I11 block so several candidates can share it

    A ridge of ridge_scale * trace / p is added when the condition number
    exceeds ridge_condition or the Cholesky factorization fails.
    """

    def __init__(self, i11: np.ndarray) -> None:
        settings = SETTINGS_MANAGER.score
        self.i11 = np.asarray(i11, dtype=np.float64)
        self.size = self.i11.shape[0]
        self.warnings: Tuple[str, ...] = ()
        self.factor = None
        if self.size == 0:
            return

        matrix = self.i11
        condition = np.linalg.cond(matrix)
        ridged = False
        if not np.isfinite(condition) or condition > settings.ridge_condition:
            matrix = self._ridge(matrix, settings.ridge_scale)
            ridged = True
            self.warnings = (
                f"reduced information ill-conditioned (condition {condition:.3g}), ridge added",
            )
        try:
            self.factor = cho_factor(matrix)
        except LinAlgError:
            if ridged:
                raise
            matrix = self._ridge(matrix, settings.ridge_scale)
            self.warnings = ("reduced information not positive definite, ridge added",)
            self.factor = cho_factor(matrix)
        for warning in self.warnings:
            logger.warning(warning)

    def _ridge(self, matrix: np.ndarray, scale: float) -> np.ndarray:
        ridge = scale * max(float(np.trace(matrix)), 1.0) / self.size
        return matrix + ridge * np.eye(self.size)

    def inverse_block(self, i12: np.ndarray, i22: np.ndarray) -> InverseBlock:
        """(I22 - I12^T I11^-1 I12)^-1 for one candidate block

        Args:
            i12 (np.ndarray): p1 x q cross block
            i22 (np.ndarray): q x q candidate block

        Returns:
            InverseBlock
        """
        i22 = np.atleast_2d(np.asarray(i22, dtype=np.float64))
        if self.size:
            i12 = np.asarray(i12, dtype=np.float64).reshape(self.size, -1)
            schur = i22 - i12.T @ cho_solve(self.factor, i12)
        else:
            schur = i22.copy()
        schur = (schur + schur.T) / 2.0

        scale = max(1.0, float(np.max(np.abs(np.diag(i22)))))
        threshold = SETTINGS_MANAGER.score.unavailable_eigenvalue * scale
        smallest = float(np.min(np.linalg.eigvalsh(schur)))
        if smallest <= threshold:
            return InverseBlock(
                None,
                unavailable=True,
                reason=f"conditional information is singular (eigenvalue {smallest:.3g})",
                warnings=self.warnings,
            )
        inverse = np.linalg.inv(schur)
        return InverseBlock((inverse + inverse.T) / 2.0, warnings=self.warnings)


def info_block_22(info: np.ndarray, q: int) -> InverseBlock:
    """Effective inverse of the trailing q x q block of an information matrix

    Args:
        info (np.ndarray): p x p empirical information, candidates last
        q (int): candidate count

    Returns:
        InverseBlock: i22 = (I22 - I12^T I11^-1 I12)^-1, or unavailable
    """
    matrix = np.asarray(info, dtype=np.float64)
    p = matrix.shape[0]
    if not 1 <= q <= p or matrix.shape != (p, p):
        raise ContractViolationException(
            f"Cannot take a {q}-candidate block of a {matrix.shape} matrix"
        )
    split = p - q
    reduced = ReducedInformation(matrix[:split, :split])
    return reduced.inverse_block(matrix[:split, split:], matrix[split:, split:])
