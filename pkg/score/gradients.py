"""Contains per-examinee gradients of the marginal log-likelihood

Every gradient is evaluated at the fitted parameters, with candidate
parameters held at zero, and written as an E-vector of contributions.
"""

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from core.effects import Subset, design_matrix, effect_label, parameter_label
from custom_exceptions import ContractViolationException, NumericalException
from estimator.likelihood import ModelEvaluator
from models import EffectIndex, FitResult, ModelSpec, ResponseMatrix


@dataclass(frozen=True)
class ParameterLayout:
    """Names and positions of the free parameters in canonical order"""

    names: Tuple[str, ...]
    kinds: Tuple[str, ...]
    items: Tuple[int, ...]
    effects: Tuple[Subset, ...]

    @classmethod
    def from_spec(cls, spec: ModelSpec) -> "ParameterLayout":
        """Lays out item parameters in item/effect order, then the gammas

        Args:
            spec (ModelSpec): model specification

        Returns:
            ParameterLayout
        """
        names: List[str] = []
        kinds: List[str] = []
        items: List[int] = []
        effects: List[Subset] = []
        for item, mask in enumerate(spec.masks):
            for subset in ((),) + tuple(mask):
                names.append(parameter_label(item + 1, subset))
                kinds.append("item")
                items.append(item)
                effects.append(subset)
        for subset in spec.structural_subsets():
            names.append(f"gamma_{{{len(subset)},({effect_label(subset).replace('x', ',')})}}")
            kinds.append("structural")
            items.append(-1)
            effects.append(subset)
        return cls(tuple(names), tuple(kinds), tuple(items), tuple(effects))

    @property
    def size(self) -> int:
        """Number of free parameters p"""
        return len(self.names)

    def position(self, name: str) -> int:
        """Index of a named parameter"""
        return self.names.index(name)


class GradientContext:
    """Caches what every gradient of one fit needs"""

    def __init__(self, fit: FitResult, data: ResponseMatrix) -> None:
        data.check_against(fit.spec.q)
        self.spec = fit.spec
        self.evaluator = ModelEvaluator(fit.spec)
        self.values = data.values.astype(np.float64)
        self.examinee_ids = data.examinee_ids
        self.probabilities = self.evaluator.item_probabilities(fit.params)
        self.nu = np.exp(self.evaluator.log_nu(fit.params))
        self.posteriors = np.asarray(fit.posteriors, dtype=np.float64)

    def _checked(self, contributions: np.ndarray, name: str) -> np.ndarray:
        bad = np.flatnonzero(~np.isfinite(contributions))
        if bad.size:
            raise NumericalException(
                f"Non-finite gradient of {name} for examinee {self.examinee_ids[bad[0]]}",
                examinee_index=int(bad[0]),
            )
        return contributions

    def item_columns(self, item: int, design: np.ndarray) -> np.ndarray:
        """E x k gradients of item effects whose C x k design is given"""
        expected = self.posteriors @ design
        weighted = self.posteriors @ (design * self.probabilities[:, item][:, None])
        return self.values[:, [item]] * expected - weighted

    def item(self, item: int, subset: Subset) -> np.ndarray:
        """Gradient of one item effect, the intercept when subset is empty"""
        design = design_matrix(self.evaluator.profiles, [subset])
        column = self.item_columns(item, design)[:, 0]
        return self._checked(column, parameter_label(item + 1, subset))

    def structural(self, subset: Subset) -> np.ndarray:
        """Gradient of one gamma: posterior minus prior expected design"""
        design = design_matrix(self.evaluator.profiles, [subset])[:, 0]
        column = self.posteriors @ design - float(self.nu @ design)
        return self._checked(column, f"gamma {effect_label(subset)}")

    def reduced(self) -> np.ndarray:
        """E x p gradients of every free parameter in canonical order"""
        blocks = [
            self.item_columns(item, design)
            for item, design in enumerate(self.evaluator.item_designs)
        ]
        structural_design = self.evaluator.structural_design
        if structural_design.shape[1]:
            blocks.append(
                self.posteriors @ structural_design - (self.nu @ structural_design)[None, :]
            )
        return self._checked(np.hstack(blocks), "reduced model")


def item_gradient(
    fit: FitResult, spec: ModelSpec, data: ResponseMatrix, target: EffectIndex
) -> Tuple[np.ndarray, float]:
    """Gradient of the log-likelihood in one item effect

    The effect may reference attributes the item does not measure yet; its
    value is then taken as zero.

    Args:
        fit (FitResult): fitted reduced model
        spec (ModelSpec): specification of the fit
        data (ResponseMatrix): responses
        target (EffectIndex): item and attribute subset

    Returns:
        tuple[np.ndarray, float]: (per-examinee contributions, total)
    """
    _check_spec(fit, spec)
    context = GradientContext(fit, data)
    contributions = context.item(target.item, target.attribute_set)
    return contributions, float(np.sum(contributions))


def structural_gradient(
    fit: FitResult, spec: ModelSpec, data: ResponseMatrix, target: Subset
) -> Tuple[np.ndarray, float]:
    """Gradient of the log-likelihood in one structural gamma

    Args:
        fit (FitResult): fitted model
        spec (ModelSpec): specification of the fit
        data (ResponseMatrix): responses
        target (Subset): attribute subset of the gamma

    Returns:
        tuple[np.ndarray, float]: (per-examinee contributions, total)
    """
    _check_spec(fit, spec)
    context = GradientContext(fit, data)
    contributions = context.structural(tuple(target))
    return contributions, float(np.sum(contributions))


def reduced_gradients(fit: FitResult, data: ResponseMatrix) -> np.ndarray:
    """E x p matrix of gradients of all reduced-model free parameters"""
    return GradientContext(fit, data).reduced()


def _check_spec(fit: FitResult, spec: ModelSpec) -> None:
    if spec.n_items != fit.spec.n_items or spec.n_attributes != fit.spec.n_attributes:
        raise ContractViolationException(
            "Gradient requested for a spec of a different shape than the fit"
        )
