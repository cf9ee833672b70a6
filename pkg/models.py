"""Contains data models"""
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.special import logsumexp

from core.effects import (
    Subset,
    canonical_key,
    canonical_subsets,
    design_matrix,
    effect_label,
    measured_attributes,
    parameter_label,
    parse_effect_label,
)
from custom_exceptions import ConfigurationException
from settings import SETTINGS_MANAGER


def _profiles(attribute_count: int) -> np.ndarray:
    from core.profiles import profile_matrix  # pylint: disable=C0415

    return profile_matrix(attribute_count)


def _read_only(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class AttributeProfile:
    """Attribute mastery profile model"""

    bits: Tuple[int, ...]
    class_index: int

    def __post_init__(self) -> None:
        if any(bit not in (0, 1) for bit in self.bits):
            raise ConfigurationException(f"Profile bits must be 0/1, got {self.bits}")
        encoded = sum(bit << position for position, bit in enumerate(self.bits))
        if encoded != self.class_index:
            raise ConfigurationException(
                f"Class index {self.class_index} does not encode bits {self.bits}"
            )

    @classmethod
    def from_index(cls, class_index: int, attribute_count: int) -> "AttributeProfile":
        """Decodes a class index, attribute 1 least significant

        Args:
            class_index (int): index in [0, 2^A)
            attribute_count (int): A

        Returns:
            AttributeProfile
        """
        if not 0 <= class_index < 2**attribute_count:
            raise ConfigurationException(
                f"Class index {class_index} outside [0, {2**attribute_count})"
            )
        bits = tuple((class_index >> position) & 1 for position in range(attribute_count))
        return cls(bits=bits, class_index=class_index)

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> "AttributeProfile":
        """Encodes a bit vector

        Args:
            bits (Sequence[int]): 0/1 vector, attribute 1 first

        Returns:
            AttributeProfile
        """
        clean = tuple(int(bit) for bit in bits)
        return cls(
            bits=clean,
            class_index=sum(bit << position for position, bit in enumerate(clean)),
        )

    def to_dict(self) -> Dict[str, Any]:
        """Converts class to dict object

        Returns:
            dict
        """
        return {"bits": list(self.bits), "class_index": self.class_index}


@dataclass(frozen=True)
class EffectIndex:
    """One item effect: intercept, main effect or interaction"""

    item: int
    attribute_set: Subset

    @property
    def level(self) -> int:
        """0 = intercept, 1 = main effect, 2 = two-way interaction, ..."""
        return len(self.attribute_set)

    @property
    def label(self) -> str:
        """External subset label, e.g. "1x2" """
        return effect_label(self.attribute_set)

    def to_dict(self) -> Dict[str, Any]:
        """Converts class to dict object

        Returns:
            dict
        """
        return {"item": self.item, "effect": self.label, "level": self.level}


@dataclass(frozen=True, eq=False)
class QMatrix:
    """Item by attribute loading pattern"""

    entries: np.ndarray
    item_ids: Tuple[str, ...]
    attribute_ids: Tuple[str, ...]

    def __post_init__(self) -> None:
        entries = np.array(self.entries, dtype=np.int64, copy=True)
        if entries.ndim != 2:
            raise ConfigurationException("Q-matrix must be two-dimensional")
        if entries.shape != (len(self.item_ids), len(self.attribute_ids)):
            raise ConfigurationException(
                f"Q-matrix shape {entries.shape} does not match "
                f"{len(self.item_ids)} items x {len(self.attribute_ids)} attributes"
            )
        if not np.isin(entries, (0, 1)).all():
            raise ConfigurationException("Q-matrix entries must be 0 or 1")
        for row, item_id in enumerate(self.item_ids):
            if entries[row].sum() == 0:
                raise ConfigurationException(
                    f"Item '{item_id}' measures no attribute"
                )
        for column, attribute_id in enumerate(self.attribute_ids):
            if entries[:, column].sum() == 0:
                raise ConfigurationException(
                    f"Attribute '{attribute_id}' is measured by no item"
                )
        object.__setattr__(self, "entries", _read_only(entries))
        object.__setattr__(self, "item_ids", tuple(str(i) for i in self.item_ids))
        object.__setattr__(
            self, "attribute_ids", tuple(str(a) for a in self.attribute_ids)
        )

    @property
    def n_items(self) -> int:
        """Number of items I"""
        return int(self.entries.shape[0])

    @property
    def n_attributes(self) -> int:
        """Number of attributes A"""
        return int(self.entries.shape[1])

    def row(self, item: int) -> np.ndarray:
        """Q-row of an item"""
        return self.entries[item]

    def measured(self, item: int) -> Subset:
        """0-based attributes measured by an item"""
        return measured_attributes(self.entries[item])

    def with_entry(self, item: int, attribute: int, value: int) -> "QMatrix":
        """Returns a copy with one entry changed

        Args:
            item (int): 0-based item position
            attribute (int): 0-based attribute position
            value (int): 0 or 1

        Returns:
            QMatrix
        """
        entries = np.array(self.entries, copy=True)
        entries[item, attribute] = value
        return QMatrix(entries, self.item_ids, self.attribute_ids)

    def to_dict(self) -> Dict[str, Any]:
        """Converts class to dict object

        Returns:
            dict
        """
        return {
            "item_ids": list(self.item_ids),
            "attribute_ids": list(self.attribute_ids),
            "entries": self.entries.tolist(),
        }

    @classmethod
    def from_dict(cls, q_dict: Dict[str, Any]) -> "QMatrix":
        """Builds a Q-matrix from its dict form"""
        return cls(
            np.asarray(q_dict["entries"]),
            tuple(q_dict["item_ids"]),
            tuple(q_dict["attribute_ids"]),
        )


def validate_mask(q_row: Sequence[int], mask: Sequence[Subset], item_id: str) -> None:
    """Checks the subset rule of an active mask

    Args:
        q_row (Sequence[int]): Q-row of the item
        mask (Sequence[Subset]): active effects
        item_id (str): item label for messages
    """
    measured = set(measured_attributes(q_row))
    for subset in mask:
        if len(subset) == 0:
            raise ConfigurationException(
                f"Item '{item_id}': the intercept is always active and cannot be masked"
            )
        if not set(subset) <= measured:
            raise ConfigurationException(
                f"Item '{item_id}': effect {effect_label(subset)} uses an attribute "
                "the item does not measure"
            )
    if list(mask) != sorted(set(mask), key=canonical_key):
        raise ConfigurationException(
            f"Item '{item_id}': mask is not in canonical order"
        )


@dataclass(frozen=True, eq=False)
class ItemParameterSet:
    """Item intercept and effects, in log-odds units

    effects holds every nonempty subset of the measured attributes; the
    ones outside active_mask are stored as literal zeros.
    """

    intercept: float
    effects: Mapping[Subset, float]
    active_mask: Tuple[Subset, ...]

    @classmethod
    def create(
        cls,
        q_row: Sequence[int],
        active_mask: Sequence[Subset],
        intercept: float = 0.0,
        active_values: Optional[Sequence[float]] = None,
        item_id: str = "",
    ) -> "ItemParameterSet":
        """Builds a parameter set obeying the mask

        Args:
            q_row (Sequence[int]): Q-row of the item
            active_mask (Sequence[Subset]): effects allowed to be nonzero
            intercept (float, optional): lambda_{i,0}. Defaults to 0.
            active_values (Sequence[float], optional): values in mask order

        Returns:
            ItemParameterSet
        """
        mask = tuple(tuple(subset) for subset in active_mask)
        validate_mask(q_row, mask, item_id)
        values = (
            np.zeros(len(mask)) if active_values is None else np.asarray(active_values)
        )
        if values.shape != (len(mask),):
            raise ConfigurationException(
                f"Item '{item_id}': expected {len(mask)} effect values, got {values.size}"
            )
        effects = {
            subset: 0.0 for subset in canonical_subsets(measured_attributes(q_row))
        }
        for subset, value in zip(mask, values):
            effects[subset] = float(value)
        return cls(float(intercept), MappingProxyType(effects), mask)

    def value(self, subset: Subset) -> float:
        """Value of any effect, 0 when absent"""
        if len(subset) == 0:
            return self.intercept
        return self.effects.get(tuple(subset), 0.0)

    def active_values(self) -> np.ndarray:
        """Active effect values in mask order"""
        return np.array([self.effects[subset] for subset in self.active_mask])

    def free_vector(self) -> np.ndarray:
        """Intercept followed by the active effects"""
        return np.concatenate(([self.intercept], self.active_values()))

    def with_free_vector(self, vector: Sequence[float]) -> "ItemParameterSet":
        """Returns a copy holding new free values

        Args:
            vector (Sequence[float]): intercept then active effects

        Returns:
            ItemParameterSet
        """
        values = np.asarray(vector, dtype=np.float64)
        effects = {subset: 0.0 for subset in self.effects}
        for subset, value in zip(self.active_mask, values[1:]):
            effects[subset] = float(value)
        return ItemParameterSet(float(values[0]), MappingProxyType(effects), self.active_mask)

    def to_dict(self) -> Dict[str, Any]:
        """Converts class to dict object

        Returns:
            dict
        """
        return {
            "intercept": self.intercept,
            "effects": {
                effect_label(subset): value
                for subset, value in sorted(
                    self.effects.items(), key=lambda pair: canonical_key(pair[0])
                )
            },
            "active": [effect_label(subset) for subset in self.active_mask],
        }


@dataclass(frozen=True, eq=False)
class ModelSpec:
    """Q-matrix, per-item active masks and structural model order"""

    q: QMatrix
    masks: Tuple[Tuple[Subset, ...], ...]
    template: str
    structural_order: int

    def __post_init__(self) -> None:
        masks = tuple(tuple(tuple(subset) for subset in mask) for mask in self.masks)
        if len(masks) != self.q.n_items:
            raise ConfigurationException(
                f"Expected {self.q.n_items} item masks, got {len(masks)}"
            )
        for item, mask in enumerate(masks):
            validate_mask(self.q.row(item), mask, self.q.item_ids[item])
        cap = SETTINGS_MANAGER.score.max_attributes
        if not 1 <= self.q.n_attributes <= cap:
            raise ConfigurationException(
                f"Attribute count must be between 1 and {cap}, got {self.q.n_attributes}"
            )
        if not 1 <= self.structural_order <= self.q.n_attributes:
            raise ConfigurationException(
                f"Structural order must be in [1, {self.q.n_attributes}], "
                f"got {self.structural_order}"
            )
        object.__setattr__(self, "masks", masks)

    @property
    def n_items(self) -> int:
        """Number of items"""
        return self.q.n_items

    @property
    def n_attributes(self) -> int:
        """Number of attributes"""
        return self.q.n_attributes

    @property
    def n_classes(self) -> int:
        """Number of latent classes 2^A"""
        return 2**self.q.n_attributes

    @property
    def saturated(self) -> bool:
        """True when the structural model has every order"""
        return self.structural_order == self.q.n_attributes

    def structural_subsets(self) -> List[Subset]:
        """Gamma subsets in canonical order"""
        return canonical_subsets(range(self.n_attributes), self.structural_order)

    def n_item_parameters(self, item: int) -> int:
        """Free parameters of one item (intercept included)"""
        return 1 + len(self.masks[item])

    @property
    def n_free_parameters(self) -> int:
        """Total free parameter count"""
        return sum(
            self.n_item_parameters(item) for item in range(self.n_items)
        ) + len(self.structural_subsets())

    def with_masks(
        self, masks: Sequence[Sequence[Subset]], template: str = "custom"
    ) -> "ModelSpec":
        """Returns a copy with other masks"""
        return ModelSpec(self.q, tuple(tuple(m) for m in masks), template, self.structural_order)

    def to_dict(self) -> Dict[str, Any]:
        """Converts class to dict object

        Returns:
            dict
        """
        return {
            "template": self.template,
            "structural_order": self.structural_order,
            "qmatrix": self.q.to_dict(),
            "masks": {
                item_id: [effect_label(subset) for subset in mask]
                for item_id, mask in zip(self.q.item_ids, self.masks)
            },
        }

    @classmethod
    def from_dict(cls, spec_dict: Dict[str, Any]) -> "ModelSpec":
        """Builds a spec from its dict form"""
        q = QMatrix.from_dict(spec_dict["qmatrix"])
        masks = tuple(
            tuple(parse_effect_label(label) for label in spec_dict["masks"][item_id])
            for item_id in q.item_ids
        )
        return cls(q, masks, spec_dict["template"], int(spec_dict["structural_order"]))


@dataclass(frozen=True, eq=False)
class StructuralParameterSet:
    """Log-linear structural model over the latent classes"""

    attribute_count: int
    order: int
    gammas: Mapping[Subset, float]

    def __post_init__(self) -> None:
        subsets = canonical_subsets(range(self.attribute_count), self.order)
        gammas = {subset: float(self.gammas.get(subset, 0.0)) for subset in subsets}
        extra = set(self.gammas) - set(subsets)
        if extra:
            raise ConfigurationException(
                f"Structural gammas outside order {self.order}: "
                f"{sorted(effect_label(subset) for subset in extra)}"
            )
        object.__setattr__(self, "gammas", MappingProxyType(gammas))

    @classmethod
    def uniform(cls, attribute_count: int, order: int) -> "StructuralParameterSet":
        """All gammas zero, i.e. equal class probabilities"""
        return cls(attribute_count, order, {})

    def subsets(self) -> List[Subset]:
        """Gamma subsets in canonical order"""
        return list(self.gammas.keys())

    def design(self) -> np.ndarray:
        """C x G log-linear design matrix"""
        return design_matrix(_profiles(self.attribute_count), self.subsets())

    def log_mu(self) -> np.ndarray:
        """log mu_c, zero for the all-zero profile"""
        return self.design() @ self.free_vector()

    def log_nu(self) -> np.ndarray:
        """log class probabilities"""
        log_mu = self.log_mu()
        return log_mu - logsumexp(log_mu)

    def nu(self) -> np.ndarray:
        """Class probabilities, summing to one"""
        nu = np.exp(self.log_nu())
        return nu / nu.sum()

    def free_vector(self) -> np.ndarray:
        """Gammas in canonical order"""
        return np.array(list(self.gammas.values()), dtype=np.float64)

    def with_free_vector(self, vector: Sequence[float]) -> "StructuralParameterSet":
        """Returns a copy holding new gammas"""
        return StructuralParameterSet(
            self.attribute_count,
            self.order,
            dict(zip(self.subsets(), (float(value) for value in vector))),
        )

    def to_dict(self) -> Dict[str, Any]:
        """Converts class to dict object

        Returns:
            dict
        """
        return {
            "order": self.order,
            "gammas": {effect_label(subset): value for subset, value in self.gammas.items()},
            "class_probabilities": self.nu().tolist(),
        }


@dataclass(frozen=True, eq=False)
class ParameterSet:
    """All item and structural parameters of a model"""

    items: Tuple[ItemParameterSet, ...]
    structural: StructuralParameterSet

    def to_vector(self) -> np.ndarray:
        """Canonical free-parameter vector: items in item/effect order, then gammas"""
        parts = [item.free_vector() for item in self.items]
        parts.append(self.structural.free_vector())
        return np.concatenate(parts)

    def with_vector(self, vector: Sequence[float]) -> "ParameterSet":
        """Inverse of to_vector on the same layout

        Args:
            vector (Sequence[float]): canonical free-parameter vector

        Returns:
            ParameterSet
        """
        values = np.asarray(vector, dtype=np.float64)
        expected = sum(1 + len(item.active_mask) for item in self.items) + len(
            self.structural.gammas
        )
        if values.shape != (expected,):
            raise ConfigurationException(
                f"Expected {expected} free parameters, got {values.size}"
            )
        items: List[ItemParameterSet] = []
        offset = 0
        for item in self.items:
            size = 1 + len(item.active_mask)
            items.append(item.with_free_vector(values[offset : offset + size]))
            offset += size
        return ParameterSet(tuple(items), self.structural.with_free_vector(values[offset:]))

    def to_dict(self, spec: ModelSpec) -> Dict[str, Any]:
        """Converts class to dict object keyed by item id

        Returns:
            dict
        """
        return {
            "items": {
                item_id: item.to_dict() for item_id, item in zip(spec.q.item_ids, self.items)
            },
            "structural": self.structural.to_dict(),
        }

    @classmethod
    def from_dict(cls, spec: ModelSpec, params_dict: Dict[str, Any]) -> "ParameterSet":
        """Builds parameters from their dict form"""
        items: List[ItemParameterSet] = []
        for item, item_id in enumerate(spec.q.item_ids):
            item_dict = params_dict["items"][item_id]
            mask = spec.masks[item]
            values = [
                float(item_dict["effects"][effect_label(subset)]) for subset in mask
            ]
            items.append(
                ItemParameterSet.create(
                    spec.q.row(item), mask, float(item_dict["intercept"]), values, item_id
                )
            )
        gammas = {
            parse_effect_label(label): float(value)
            for label, value in params_dict["structural"]["gammas"].items()
        }
        structural = StructuralParameterSet(
            spec.n_attributes, spec.structural_order, gammas
        )
        return cls(tuple(items), structural)


@dataclass(frozen=True, eq=False)
class ResponseMatrix:
    """Dichotomous item responses, one row per examinee"""

    values: np.ndarray
    examinee_ids: Tuple[str, ...]
    item_ids: Tuple[str, ...]

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.int64, copy=True)
        if values.ndim != 2:
            raise ConfigurationException("Responses must be two-dimensional")
        if values.shape != (len(self.examinee_ids), len(self.item_ids)):
            raise ConfigurationException(
                f"Response shape {values.shape} does not match "
                f"{len(self.examinee_ids)} examinees x {len(self.item_ids)} items"
            )
        if not np.isin(values, (0, 1)).all():
            raise ConfigurationException("Responses must be 0 or 1")
        object.__setattr__(self, "values", _read_only(values))
        object.__setattr__(self, "examinee_ids", tuple(str(e) for e in self.examinee_ids))
        object.__setattr__(self, "item_ids", tuple(str(i) for i in self.item_ids))

    @classmethod
    def from_array(
        cls, values: np.ndarray, item_ids: Optional[Sequence[str]] = None
    ) -> "ResponseMatrix":
        """Wraps an array with generated labels"""
        n_examinees, n_items = np.shape(values)
        return cls(
            values,
            tuple(f"E{index + 1}" for index in range(n_examinees)),
            tuple(item_ids) if item_ids is not None else tuple(
                f"I{index + 1}" for index in range(n_items)
            ),
        )

    @property
    def n_examinees(self) -> int:
        """Number of examinees E"""
        return int(self.values.shape[0])

    @property
    def n_items(self) -> int:
        """Number of items I"""
        return int(self.values.shape[1])

    def check_against(self, q: QMatrix) -> None:
        """Raises when the item columns do not match the Q-matrix"""
        if self.n_items != q.n_items:
            raise ConfigurationException(
                f"Responses have {self.n_items} items, Q-matrix has {q.n_items}"
            )
        if self.item_ids != q.item_ids:
            raise ConfigurationException(
                "Response item ids do not match the Q-matrix item ids"
            )


def _estimation_default(name: str):
    return lambda: getattr(SETTINGS_MANAGER.estimation, name)


@dataclass
class FitConfig:
    """EM estimation knobs, defaults from settings.json"""

    max_iterations: int = field(default_factory=_estimation_default("max_iterations"))
    absolute_tolerance: float = field(
        default_factory=_estimation_default("absolute_tolerance")
    )
    relative_tolerance: float = field(
        default_factory=_estimation_default("relative_tolerance")
    )
    gradient_tolerance: float = field(
        default_factory=_estimation_default("gradient_tolerance")
    )
    score_tolerance: float = field(default_factory=_estimation_default("score_tolerance"))
    polish_max_iterations: int = field(
        default_factory=_estimation_default("polish_max_iterations")
    )
    newton_tolerance: float = field(
        default_factory=_estimation_default("newton_tolerance")
    )
    newton_max_iterations: int = field(
        default_factory=_estimation_default("newton_max_iterations")
    )
    parameter_bound: float = field(default_factory=_estimation_default("parameter_bound"))
    start_probability_bounds: Tuple[float, float] = field(
        default_factory=_estimation_default("start_probability_bounds")
    )
    start_main_effect: float = field(
        default_factory=_estimation_default("start_main_effect")
    )
    restarts: int = field(default_factory=_estimation_default("restarts"))
    jitter: float = field(default_factory=_estimation_default("jitter"))
    seed: int = field(default_factory=_estimation_default("seed"))
    class_floor: float = field(default_factory=_estimation_default("class_floor"))
    monotonicity_tolerance: float = field(
        default_factory=lambda: SETTINGS_MANAGER.score.monotonicity_tolerance
    )

    def to_dict(self) -> Dict[str, Any]:
        """Converts class to dict object

        Returns:
            dict
        """
        return {
            "max_iterations": self.max_iterations,
            "absolute_tolerance": self.absolute_tolerance,
            "relative_tolerance": self.relative_tolerance,
            "gradient_tolerance": self.gradient_tolerance,
            "score_tolerance": self.score_tolerance,
            "polish_max_iterations": self.polish_max_iterations,
            "newton_tolerance": self.newton_tolerance,
            "newton_max_iterations": self.newton_max_iterations,
            "parameter_bound": self.parameter_bound,
            "start_probability_bounds": list(self.start_probability_bounds),
            "start_main_effect": self.start_main_effect,
            "restarts": self.restarts,
            "jitter": self.jitter,
            "seed": self.seed,
            "class_floor": self.class_floor,
            "monotonicity_tolerance": self.monotonicity_tolerance,
        }


@dataclass(frozen=True, eq=False)
class FitResult:
    """Converged estimates and diagnostics of one EM run"""

    spec: ModelSpec
    params: ParameterSet
    loglik: float
    loglik_trace: Tuple[float, ...]
    posteriors: np.ndarray
    converged: bool
    iterations: int
    warnings: Tuple[str, ...] = ()
    config_hash: Optional[str] = None

    @property
    def n_examinees(self) -> int:
        """Number of examinees the model was fitted to"""
        return int(self.posteriors.shape[0])

    @property
    def n_parameters(self) -> int:
        """Number of free parameters"""
        return self.spec.n_free_parameters

    @property
    def aic(self) -> float:
        """-2 loglik + 2p"""
        return -2.0 * self.loglik + 2.0 * self.n_parameters

    @property
    def bic(self) -> float:
        """-2 loglik + p ln E"""
        return -2.0 * self.loglik + self.n_parameters * float(np.log(self.n_examinees))

    def to_dict(self) -> Dict[str, Any]:
        """Converts class to dict object

        Returns:
            dict
        """
        return {
            "spec": self.spec.to_dict(),
            "parameters": self.params.to_dict(self.spec),
            "loglik": self.loglik,
            "n_examinees": self.n_examinees,
            "n_parameters": self.n_parameters,
            "aic": self.aic,
            "bic": self.bic,
            "convergence": {
                "converged": self.converged,
                "iterations": self.iterations,
                "loglik_trace": list(self.loglik_trace),
            },
            "warnings": list(self.warnings),
            "config_hash": self.config_hash,
        }


@dataclass(frozen=True)
class OneSidedScoreResult:
    """One-sided score statistic of a single candidate"""

    t_s: float
    s2: float
    i22: float
    two_sided: float
    p_value: float
    boundary_case: bool
    truncated: bool = False

    def to_dict(self) -> Dict[str, Any]:
        """Converts class to dict object

        Returns:
            dict
        """
        return {
            "t_s": self.t_s,
            "s2": self.s2,
            "i22": self.i22,
            "two_sided": self.two_sided,
            "p_value": self.p_value,
            "boundary_case": self.boundary_case,
            "truncated": self.truncated,
        }


@dataclass(frozen=True)
class LRTestResult:
    """Likelihood-ratio comparison of nested fits"""

    statistic: float
    df: int
    p_value: float
    warnings: Tuple[str, ...] = ()

    def to_dict(self) -> Dict[str, Any]:
        """Converts class to dict object

        Returns:
            dict
        """
        return {
            "statistic": self.statistic,
            "df": self.df,
            "p_value": self.p_value,
            "warnings": list(self.warnings),
        }


@dataclass(frozen=True)
class Candidate:
    """A parameter proposed for addition to the reduced model"""

    kind: str
    item: int
    item_id: str
    effect: Subset
    constraint: str
    k: float = 0.0
    k_source: Tuple[Tuple[str, float], ...] = ()

    @property
    def level(self) -> int:
        """Effect level"""
        return len(self.effect)

    @property
    def label(self) -> str:
        """Printable parameter label"""
        return parameter_label(self.item + 1, self.effect)

    def to_dict(self) -> Dict[str, Any]:
        """Converts class to dict object

        Returns:
            dict
        """
        return {
            "kind": self.kind,
            "item": self.item_id,
            "effect": effect_label(self.effect),
            "parameter": self.label,
            "constraint": self.constraint,
            "k": self.k,
            "k_source": {label: value for label, value in self.k_source},
        }


@dataclass(frozen=True)
class ModificationIndex:
    """Score-test result of one candidate"""

    candidate: Candidate
    t_s: float
    p_value: float
    s2: float = 0.0
    i22: float = 0.0
    boundary_case: bool = False
    significant_raw: bool = False
    significant_adjusted: bool = False
    unavailable: bool = False
    reason: str = ""

    def to_dict(self) -> Dict[str, Any]:
        """Converts class to dict object

        Returns:
            dict
        """
        return {
            **self.candidate.to_dict(),
            "mi": self.t_s,
            "p_value": self.p_value,
            "s2": self.s2,
            "i22": self.i22,
            "boundary_case": self.boundary_case,
            "significant_raw": self.significant_raw,
            "significant_adjusted": self.significant_adjusted,
            "unavailable": self.unavailable,
            "reason": self.reason,
        }


@dataclass(frozen=True)
class SuggestedChange:
    """One respecification suggested by a significant index"""

    item_id: str
    parameter: str
    action: str
    t_s: float
    q_flip: Optional[str] = None
    note: str = ""
    recommended_next: bool = False

    def to_dict(self) -> Dict[str, Any]:
        """Converts class to dict object

        Returns:
            dict
        """
        return {
            "item": self.item_id,
            "parameter": self.parameter,
            "action": self.action,
            "mi": self.t_s,
            "q_flip": self.q_flip,
            "note": self.note,
            "recommended_next": self.recommended_next,
        }


@dataclass(frozen=True)
class MIReport:
    """Indices with multiplicity control and suggestions"""

    indices: Tuple[ModificationIndex, ...]
    m: int
    alpha: float
    adjusted_alpha: float
    critical_value: float
    suggested_changes: Tuple[SuggestedChange, ...] = ()
    warnings: Tuple[str, ...] = ()

    def to_dict(self) -> Dict[str, Any]:
        """Converts class to dict object

        Returns:
            dict
        """
        return {
            "alpha": self.alpha,
            "m": self.m,
            "adjusted_alpha": self.adjusted_alpha,
            "critical_value": self.critical_value,
            "indices": [index.to_dict() for index in self.indices],
            "suggested_changes": [change.to_dict() for change in self.suggested_changes],
            "warnings": list(self.warnings),
        }


@dataclass(frozen=True)
class SimDesign:
    """Simulation design of the Monte Carlo studies"""

    items: int
    attributes: int
    tetrachoric_rho: float
    q_pattern: Tuple[str, ...]
    p_nonmaster: float
    p_master: float
    effect_size: str
    examinees: int
    replications: int
    seed: int
    split_rule: str = "equal-thirds"
    structural_order: Optional[int] = None

    def __post_init__(self) -> None:
        if not 0.0 < self.p_nonmaster < self.p_master < 1.0:
            raise ConfigurationException(
                "Design probabilities must satisfy 0 < p_nonmaster < p_master < 1, "
                f"got {self.p_nonmaster} and {self.p_master}"
            )
        if any(
            len(pattern) != self.attributes or set(pattern) - {"0", "1"} or "1" not in pattern
            for pattern in self.q_pattern
        ):
            raise ConfigurationException(f"Invalid Q pattern {self.q_pattern}")
        lower = -1.0 / (self.attributes - 1) if self.attributes > 1 else -1.0
        if not lower < self.tetrachoric_rho < 1.0:
            raise ConfigurationException(
                f"rho must lie in ({lower}, 1), got {self.tetrachoric_rho}"
            )
        if self.examinees < 1 or self.replications < 1:
            raise ConfigurationException("Examinees and replications must be positive")

    @classmethod
    def from_settings(cls, effect_size: str = "large", **overrides: Any) -> "SimDesign":
        """Builds the default design for an effect size

        Args:
            effect_size (str): "large" or "smaller"

        Returns:
            SimDesign
        """
        simulation = SETTINGS_MANAGER.simulation
        if effect_size not in simulation.p_master:
            raise ConfigurationException(
                f"Unknown effect size '{effect_size}', expected one of "
                f"{sorted(simulation.p_master)}"
            )
        values: Dict[str, Any] = {
            "items": simulation.items,
            "attributes": simulation.attributes,
            "tetrachoric_rho": simulation.tetrachoric_rho,
            "q_pattern": tuple(simulation.q_pattern),
            "p_nonmaster": simulation.p_nonmaster,
            "p_master": simulation.p_master[effect_size],
            "effect_size": effect_size,
            "examinees": simulation.examinees,
            "replications": simulation.replications,
            "seed": simulation.seed,
            "split_rule": simulation.split_rule,
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)

    def q_matrix(self) -> QMatrix:
        """Generating Q-matrix, cycling through the patterns item by item"""
        entries = np.array(
            [
                [int(bit) for bit in self.q_pattern[item % len(self.q_pattern)]]
                for item in range(self.items)
            ]
        )
        return QMatrix(
            entries,
            tuple(f"Item{item + 1}" for item in range(self.items)),
            tuple(f"A{attribute + 1}" for attribute in range(self.attributes)),
        )

    def to_dict(self) -> Dict[str, Any]:
        """Converts class to dict object

        Returns:
            dict
        """
        return {
            "items": self.items,
            "attributes": self.attributes,
            "tetrachoric_rho": self.tetrachoric_rho,
            "q_pattern": list(self.q_pattern),
            "p_nonmaster": self.p_nonmaster,
            "p_master": self.p_master,
            "effect_size": self.effect_size,
            "examinees": self.examinees,
            "replications": self.replications,
            "seed": self.seed,
            "split_rule": self.split_rule,
            "structural_order": self.structural_order,
        }


@dataclass(frozen=True)
class StudyRow:
    """Rejection proportion of one study cell"""

    study: str
    effect_size: str
    parameter: str
    examinees: int
    alpha: float
    rejections: int
    replications: int
    excluded: int

    @property
    def rate(self) -> float:
        """Rejection proportion over the retained replications"""
        return self.rejections / self.replications if self.replications else float("nan")

    @property
    def mc_se(self) -> float:
        """Monte Carlo standard error sqrt(p(1-p)/reps)"""
        if not self.replications:
            return float("nan")
        return float(np.sqrt(self.rate * (1.0 - self.rate) / self.replications))

    def to_dict(self) -> Dict[str, Any]:
        """Converts class to dict object

        Returns:
            dict
        """
        return {
            "study": self.study,
            "effect_size": self.effect_size,
            "parameter": self.parameter,
            "examinees": self.examinees,
            "alpha": self.alpha,
            "rejections": self.rejections,
            "replications": self.replications,
            "rate": self.rate,
            "mc_se": self.mc_se,
            "excluded": self.excluded,
        }


@dataclass(frozen=True)
class StudyResult:
    """All cells of one Monte Carlo study"""

    study: str
    rows: Tuple[StudyRow, ...]
    replications: int
    seed: int
    flagged: bool = False
    zero_fraction: Mapping[str, float] = field(default_factory=dict)

    def rate(self, parameter: str, alpha: float, examinees: Optional[int] = None) -> float:
        """Looks up the rejection rate of one cell

        Args:
            parameter (str): parameter label or "familywise"
            alpha (float): significance level
            examinees (int, optional): sample size, required with several sizes

        Returns:
            float: rejection proportion
        """
        for row in self.rows:
            if (
                row.parameter == parameter
                and np.isclose(row.alpha, alpha)
                and (examinees is None or row.examinees == examinees)
            ):
                return row.rate
        raise KeyError(f"No cell for {parameter} at alpha={alpha}, E={examinees}")

    def to_dict(self) -> Dict[str, Any]:
        """Converts class to dict object

        Returns:
            dict
        """
        return {
            "study": self.study,
            "replications": self.replications,
            "seed": self.seed,
            "flagged": self.flagged,
            "zero_fraction": dict(self.zero_fraction),
            "rows": [row.to_dict() for row in self.rows],
        }


@dataclass(frozen=True)
class RunConfig:
    """Validated command-line configuration"""

    subcommand: str
    responses: Optional[str] = None
    qmatrix: Optional[str] = None
    model: Optional[str] = None
    mask: Optional[str] = None
    structural_order: Optional[int] = None
    restarts: Optional[int] = None
    fit_path: Optional[str] = None
    candidates: str = "qmatrix"
    max_order: Optional[int] = None
    alpha: Optional[float] = None
    m_override: Optional[int] = None
    study: Optional[str] = None
    effect: Optional[str] = None
    examinees: Optional[int] = None
    reps: Optional[int] = None
    seed: Optional[int] = None
    split_rule: Optional[str] = None
    alphas: Optional[Tuple[float, ...]] = None
    out: Optional[str] = None
    table: Optional[str] = None
    threads: int = 1
    verbosity: int = 0

    def semantic_dict(self) -> Dict[str, Any]:
        """Options that change results; paths to outputs, threads and verbosity excluded

        Returns:
            dict
        """
        excluded = {"out", "table", "threads", "verbosity"}
        return {
            key: (list(value) if isinstance(value, tuple) else value)
            for key, value in self.to_dict().items()
            if key not in excluded
        }

    def to_dict(self) -> Dict[str, Any]:
        """Converts class to dict object

        Returns:
            dict
        """
        return {
            "subcommand": self.subcommand,
            "responses": self.responses,
            "qmatrix": self.qmatrix,
            "model": self.model,
            "mask": self.mask,
            "structural_order": self.structural_order,
            "restarts": self.restarts,
            "fit": self.fit_path,
            "candidates": self.candidates,
            "max_order": self.max_order,
            "alpha": self.alpha,
            "m_override": self.m_override,
            "study": self.study,
            "effect": self.effect,
            "examinees": self.examinees,
            "reps": self.reps,
            "seed": self.seed,
            "split_rule": self.split_rule,
            "alphas": self.alphas,
            "out": self.out,
            "table": self.table,
            "threads": self.threads,
            "verbosity": self.verbosity,
        }

