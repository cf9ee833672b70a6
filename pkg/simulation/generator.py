"""Contains synthetic examinee and response generation"""

from typing import List, Sequence, Tuple, Union

import numpy as np
from scipy.special import logit

from core.effects import canonical_subsets, measured_attributes
from core.profiles import validate_attribute_count
from core.response import item_response_curve
from custom_exceptions import ConfigurationException
from models import AttributeProfile, ItemParameterSet, QMatrix, ResponseMatrix

SeedType = Union[int, Sequence[int], np.random.Generator]

SPLIT_RULES = ("equal-thirds", "mains-only")


def make_generator(seed: SeedType) -> np.random.Generator:
    """PCG64 generator from an int, an int sequence or an existing generator"""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def equicorrelation(attribute_count: int, rho: float) -> np.ndarray:
    """A x A matrix with unit diagonal and rho elsewhere

    Args:
        attribute_count (int): A
        rho (float): common correlation

    Returns:
        np.ndarray
    """
    lower = -1.0 / (attribute_count - 1) if attribute_count > 1 else -1.0
    if not lower < rho < 1.0:
        raise ConfigurationException(
            f"Equicorrelation rho must lie in ({lower:.4g}, 1) for A={attribute_count}, got {rho}"
        )
    return (1.0 - rho) * np.eye(attribute_count) + rho * np.ones(
        (attribute_count, attribute_count)
    )


def gen_attribute_matrix(
    examinees: int, attribute_count: int, rho: float, seed: SeedType
) -> np.ndarray:
    """E x A mastery bits from thresholded equicorrelated normals

    Args:
        examinees (int): E
        attribute_count (int): A
        rho (float): latent (and tetrachoric) correlation
        seed (SeedType): seed or generator

    Returns:
        np.ndarray: 0/1 matrix, mastery iff the latent value is positive
    """
    validate_attribute_count(attribute_count)
    cholesky = np.linalg.cholesky(equicorrelation(attribute_count, rho))
    latent = make_generator(seed).standard_normal((examinees, attribute_count)) @ cholesky.T
    return (latent > 0.0).astype(np.int64)


def gen_attribute_profiles(
    examinees: int, attribute_count: int, rho: float, seed: SeedType
) -> List[AttributeProfile]:
    """Draws E mastery profiles

    Args:
        examinees (int): E
        attribute_count (int): A
        rho (float): tetrachoric correlation among attributes
        seed (SeedType): seed or generator

    Returns:
        list[AttributeProfile]
    """
    bits = gen_attribute_matrix(examinees, attribute_count, rho, seed)
    return [AttributeProfile.from_bits(row) for row in bits]


def build_item_params(
    q_row: Sequence[int],
    p_nonmaster: float,
    p_master: float,
    split_rule: str = "equal-thirds",
    item_id: str = "",
) -> Tuple[ItemParameterSet, ItemParameterSet]:
    """Generating LCDM parameters of one item and their DINA counterpart

    The total effect T = logit(p_master) - logit(p_nonmaster) is spread
    evenly over all 2^K - 1 effects ("equal-thirds") or over the K main
    effects ("mains-only"). The DINA counterpart puts T on the highest
    interaction.

    Args:
        q_row (Sequence[int]): Q-row
        p_nonmaster (float): success probability with no measured attribute
        p_master (float): success probability with all measured attributes
        split_rule (str, optional): "equal-thirds" or "mains-only"
        item_id (str, optional): label for errors

    Returns:
        tuple[ItemParameterSet, ItemParameterSet]: (full LCDM, DINA)
    """
    if not 0.0 < p_nonmaster < p_master < 1.0:
        raise ConfigurationException(
            f"Item '{item_id}': need 0 < p_nonmaster < p_master < 1, "
            f"got {p_nonmaster} and {p_master}"
        )
    if split_rule not in SPLIT_RULES:
        raise ConfigurationException(
            f"Unknown split rule '{split_rule}', expected one of {SPLIT_RULES}"
        )

    intercept = float(logit(p_nonmaster))
    total = float(logit(p_master)) - intercept
    measured = measured_attributes(q_row)
    subsets = canonical_subsets(measured)
    if split_rule == "equal-thirds":
        values = [total / len(subsets)] * len(subsets)
    else:
        values = [total / len(measured) if len(subset) == 1 else 0.0 for subset in subsets]

    full = ItemParameterSet.create(q_row, subsets, intercept, values, item_id)
    dina = ItemParameterSet.create(q_row, (measured,), intercept, [total], item_id)
    return full, dina


def gen_responses(
    profiles: Union[Sequence[AttributeProfile], np.ndarray],
    item_param_list: Sequence[ItemParameterSet],
    q: QMatrix,
    seed: SeedType,
) -> ResponseMatrix:
    """Independent Bernoulli responses given profiles

    Args:
        profiles (Sequence[AttributeProfile] | np.ndarray): profiles or E x A bits
        item_param_list (Sequence[ItemParameterSet]): one set per item
        q (QMatrix): Q-matrix providing item ids
        seed (SeedType): seed or generator

    Returns:
        ResponseMatrix
    """
    if len(item_param_list) != q.n_items:
        raise ConfigurationException(
            f"Got {len(item_param_list)} item parameter sets for {q.n_items} items"
        )
    if isinstance(profiles, np.ndarray):
        bits = profiles.astype(np.int64)
    else:
        bits = np.array([profile.bits for profile in profiles], dtype=np.int64).reshape(
            -1, q.n_attributes
        )
    classes = bits @ (1 << np.arange(q.n_attributes))
    curves = np.column_stack(
        [item_response_curve(params, q.n_attributes) for params in item_param_list]
    )
    probabilities = curves[classes]
    draws = make_generator(seed).random(probabilities.shape)
    values = (draws < probabilities).astype(np.int64)
    return ResponseMatrix(
        values,
        tuple(f"E{index + 1}" for index in range(values.shape[0])),
        q.item_ids,
    )
