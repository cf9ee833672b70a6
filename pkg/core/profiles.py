"""Contains the attribute profile space

Attribute 1 is the least significant bit of the class index.
"""

from functools import lru_cache
from typing import List

import numpy as np

from custom_exceptions import ConfigurationException
from models import AttributeProfile
from settings import SETTINGS_MANAGER


def validate_attribute_count(attribute_count: int) -> None:
    """Raises when A is outside [1, max_attributes]

    Args:
        attribute_count (int): number of attributes A
    """
    cap = SETTINGS_MANAGER.score.max_attributes
    if not 1 <= attribute_count <= cap:
        raise ConfigurationException(
            f"Attribute count must be between 1 and {cap}, got {attribute_count}"
        )


def profile_space(attribute_count: int) -> List[AttributeProfile]:
    """Enumerates all 2^A mastery profiles in class index order

    Args:
        attribute_count (int): number of attributes A

    Returns:
        list[AttributeProfile]: profiles 0 .. 2^A - 1
    """
    validate_attribute_count(attribute_count)
    return [
        AttributeProfile.from_index(index, attribute_count)
        for index in range(2**attribute_count)
    ]


@lru_cache(maxsize=None)
def profile_matrix(attribute_count: int) -> np.ndarray:
    """Returns the C x A 0/1 matrix of all profiles

    Args:
        attribute_count (int): number of attributes A

    Returns:
        np.ndarray: read-only matrix, row c holds the bits of class c
    """
    validate_attribute_count(attribute_count)
    indices = np.arange(2**attribute_count)[:, None]
    matrix = (indices >> np.arange(attribute_count)[None, :]) & 1
    matrix = matrix.astype(np.int64)
    matrix.setflags(write=False)
    return matrix
