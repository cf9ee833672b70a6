"""Contains studies aggregator"""

from typing import Dict, Type

from custom_exceptions import ConfigurationException
from simulation.studies import (
    PowerDinaStudy,
    PowerQStudy,
    Study,
    Type1DinaStudy,
    Type1QStudy,
)

STUDIES_MAPPING: Dict[str, Type[Study]] = {
    "type1-q": Type1QStudy,
    "power-q": PowerQStudy,
    "type1-dina": Type1DinaStudy,
    "power-dina": PowerDinaStudy,
}

POWER_STUDIES = ("power-q", "power-dina")


def get_study_class(study_short_name: str) -> Type[Study]:
    """Returns suitable study class

    Args:
        study_short_name (str): type1-q, power-q, type1-dina or power-dina

    Returns:
        Type[Study]: study class
    """
    try:
        return STUDIES_MAPPING[study_short_name]
    except KeyError as exc:
        raise ConfigurationException(
            f"No study '{study_short_name}', expected one of {sorted(STUDIES_MAPPING)}"
        ) from exc
