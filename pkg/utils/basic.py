"""General utilities functions"""

from typing import Any, Dict, Literal, Union
import hashlib
import json

from custom_exceptions import (
    ConfigurationException,
    ContractViolationException,
    FileFormatException,
    NumericalException,
    UsageException,
)


EXIT_CODE_DICT = dict({"OK": 0, "USAGE": 2, "FORMAT": 3, "NUMERICAL": 4})

ExitCodeType = Union[
    Literal["OK"],
    Literal["USAGE"],
    Literal["FORMAT"],
    Literal["NUMERICAL"],
]

EXCEPTION_EXIT_CODES = (
    (UsageException, "USAGE"),
    (ConfigurationException, "FORMAT"),
    (FileFormatException, "FORMAT"),
    (NumericalException, "NUMERICAL"),
    (ContractViolationException, "NUMERICAL"),
    (OSError, "FORMAT"),
)


def map_exit_code(exit_code: ExitCodeType) -> int:
    """Maps string exit status to the process exit code

    Args:
        exit_code (ExitCodeType): string exit status

    Returns:
        int: process exit code
    """
    return EXIT_CODE_DICT[exit_code]


def map_exception(exception: BaseException) -> ExitCodeType:
    """Finds the exit status of a raised exception

    Args:
        exception (BaseException): raised exception

    Returns:
        ExitCodeType: exit status, NUMERICAL for anything unrecognized
    """
    for exception_class, exit_code in EXCEPTION_EXIT_CODES:
        if isinstance(exception, exception_class):
            return exit_code
    return "NUMERICAL"


def config_hash(semantic_dict: Dict[str, Any]) -> str:
    """sha256 of the canonical JSON form of a configuration

    Args:
        semantic_dict (dict): options that change results

    Returns:
        str: hex digest
    """
    encoded = json.dumps(semantic_dict, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(encoded.encode("utf8")).hexdigest()
