"""Contains effect indexing and design vector helpers

Attribute subsets are stored as ascending tuples of 0-based attribute
positions. The empty tuple is the intercept. Externally every subset is
written 1-based as "1x2x3".
"""

from itertools import combinations
from typing import TYPE_CHECKING, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from custom_exceptions import ConfigurationException

if TYPE_CHECKING:
    from models import AttributeProfile

Subset = Tuple[int, ...]

INTERCEPT: Subset = ()
INTERCEPT_LABEL = "0"


def canonical_key(subset: Subset) -> Tuple[int, Subset]:
    """Sort key of the canonical effect order (level, then lexicographic)

    Args:
        subset (Subset): attribute subset

    Returns:
        tuple: sort key
    """
    return len(subset), subset


def canonical_sort(subsets: Iterable[Subset]) -> List[Subset]:
    """Sorts subsets into canonical order, dropping duplicates

    Args:
        subsets (Iterable[Subset]): attribute subsets

    Returns:
        list[Subset]: canonical ordering
    """
    return sorted({tuple(sorted(subset)) for subset in subsets}, key=canonical_key)


def canonical_subsets(
    attributes: Sequence[int], max_order: Optional[int] = None
) -> List[Subset]:
    """Enumerates all nonempty subsets of the given attributes

    Args:
        attributes (Sequence[int]): 0-based attribute positions
        max_order (int, optional): largest subset size. Defaults to all.

    Returns:
        list[Subset]: singletons ascending, then pairs, then triples, ...
    """
    ordered = sorted(set(attributes))
    top = len(ordered) if max_order is None else min(max_order, len(ordered))
    subsets: List[Subset] = []
    for level in range(1, top + 1):
        subsets.extend(combinations(ordered, level))
    return subsets


def measured_attributes(q_row: Sequence[int]) -> Subset:
    """Returns the attributes an item measures

    Args:
        q_row (Sequence[int]): Q-matrix row

    Returns:
        Subset: 0-based positions where q is 1
    """
    return tuple(int(position) for position in np.flatnonzero(np.asarray(q_row)))


def effect_label(subset: Subset) -> str:
    """Encodes a subset as the frozen external label

    Args:
        subset (Subset): 0-based attribute subset

    Returns:
        str: "0" for the intercept, otherwise e.g. "1x2"
    """
    if len(subset) == 0:
        return INTERCEPT_LABEL
    return "x".join(str(position + 1) for position in subset)


def parse_effect_label(label: str) -> Subset:
    """Decodes an external effect label

    Args:
        label (str): "0", "intercept" or "1x2x3"

    Returns:
        Subset: 0-based attribute subset
    """
    text = label.strip().lower()
    if text in (INTERCEPT_LABEL, "intercept"):
        return INTERCEPT
    try:
        positions = [int(part) - 1 for part in text.split("x")]
    except ValueError as exc:
        raise ConfigurationException(f"Malformed effect label '{label}'") from exc
    if any(position < 0 for position in positions) or len(set(positions)) != len(
        positions
    ):
        raise ConfigurationException(f"Malformed effect label '{label}'")
    return tuple(sorted(positions))


def parameter_label(item_number: int, subset: Subset) -> str:
    """Formats the lambda label used in reports

    Args:
        item_number (int): 1-based item number
        subset (Subset): 0-based attribute subset

    Returns:
        str: e.g. "lambda_{4,2,(1,2)}"
    """
    if len(subset) == 0:
        return f"lambda_{{{item_number},0}}"
    attributes = ",".join(str(position + 1) for position in subset)
    return f"lambda_{{{item_number},{len(subset)},({attributes})}}"


def design_vector(
    profile: "AttributeProfile", q_row: Sequence[int], mask: Sequence[Subset]
) -> np.ndarray:
    """Builds h(alpha_c, q_i) for the effects of a mask

    Args:
        profile (AttributeProfile): mastery profile
        q_row (Sequence[int]): Q-matrix row of the same length
        mask (Sequence[Subset]): active effects in canonical order

    Returns:
        np.ndarray: one 0/1 entry per effect
    """
    bits = np.asarray(profile.bits, dtype=np.int64)
    q = np.asarray(q_row, dtype=np.int64)
    if bits.shape != q.shape:
        raise ConfigurationException(
            f"Profile has {bits.size} attributes but the Q-row has {q.size}"
        )
    products = bits * q
    return np.array(
        [int(np.prod(products[list(subset)])) for subset in mask], dtype=np.float64
    )


def design_matrix(profiles: np.ndarray, subsets: Sequence[Subset]) -> np.ndarray:
    """Stacks design entries over every profile

    The Q-row is not applied, so subsets may reference attributes an item
    does not measure yet (candidate parameters).

    Args:
        profiles (np.ndarray): C x A profile matrix
        subsets (Sequence[Subset]): effects in column order

    Returns:
        np.ndarray: C x len(subsets) matrix of products
    """
    matrix = np.ones((profiles.shape[0], len(subsets)), dtype=np.float64)
    for column, subset in enumerate(subsets):
        for position in subset:
            matrix[:, column] *= profiles[:, position]
    return matrix
