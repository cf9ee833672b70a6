"""Contains the EnvironmentManager class instances"""

import os
from typing import Dict, Optional

import dotenv
import psutil

from custom_exceptions import UsageException
from settings import SETTINGS_MANAGER


class EnvironmentManager:
    """Manages overrides from the .env file and the process environment"""

    def __init__(self, path: str = os.path.join(".", ".env")) -> None:
        self._path = path
        self._variables: Dict[str, Optional[str]] = dict(
            dotenv.dotenv_values(self._path)
        )
        self._variables.update(os.environ)

    def get(self, name: str) -> Optional[str]:
        """Returns a variable value

        Args:
            name (str): variable name

        Returns:
            str | None: value if set
        """
        return self._variables.get(name)

    def get_threads(self, requested: Optional[int] = None) -> int:
        """Resolves the worker count

        Args:
            requested (int, optional): value of --threads, wins when given

        Returns:
            int: number of workers, at least 1
        """
        if requested is not None:
            threads = requested
        else:
            raw = self.get(SETTINGS_MANAGER.runtime.threads_variable)
            if raw is None or raw.strip() == "":
                return max(1, psutil.cpu_count(logical=True) or 1)
            try:
                threads = int(raw)
            except ValueError as exc:
                raise UsageException(
                    f"{SETTINGS_MANAGER.runtime.threads_variable} must be an integer, got '{raw}'",
                    flag="--threads",
                ) from exc

        if threads < 1:
            raise UsageException("--threads must be at least 1", flag="--threads")
        return threads


ENVIRONMENT_MANAGER = EnvironmentManager()
