"""Contain custom exceptions"""

from typing import Optional


class ConfigurationException(Exception):
    """Invalid design or model configuration"""

    def __init__(self, *args: object) -> None:
        super().__init__(*args)


class UsageException(Exception):
    """Command-line usage error"""

    def __init__(self, *args: object, flag: Optional[str] = None) -> None:
        super().__init__(*args)
        self.flag = flag


class FileFormatException(Exception):
    """Malformed input file content"""

    def __init__(self, *args: object, path: Optional[str] = None) -> None:
        super().__init__(*args)
        self.path = path


class NumericalException(Exception):
    """Non-finite likelihood, posterior or gradient"""

    def __init__(self, *args: object, examinee_index: Optional[int] = None) -> None:
        super().__init__(*args)
        self.examinee_index = examinee_index


class ContractViolationException(Exception):
    """Caller broke a documented precondition"""

    def __init__(self, *args: object) -> None:
        super().__init__(*args)
