"""Contains the manifest clock"""
from datetime import datetime
import pytz

from settings import SETTINGS_MANAGER


class DateTimeInfo:
    """Timestamps artifacts in the configured run timezone"""

    def __init__(self, timezone_region: str = SETTINGS_MANAGER.runtime.timezone) -> None:
        self.timezone = pytz.timezone(timezone_region)

    def get_manifest_timestamp(self) -> str:
        """Returns the ISO 8601 timestamp written into run manifests

        Returns:
            str: current time with offset, second resolution
        """
        return datetime.now(tz=self.timezone).replace(microsecond=0).isoformat()


DATE_TIME_INFO = DateTimeInfo()
