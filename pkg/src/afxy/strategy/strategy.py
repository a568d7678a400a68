"""Abstract strategy class."""

from abc import abstractmethod
import logging
from typing import Any

from afxy.config import Config, default_config


class Strategy:
    """Base class to represent a Strategy.

    A Strategy represents one constructive device applied to a spin field
    or a family of balls. Its result has no cheap independent check, unlike
    an Experiment.
    """
    def __init__(self, config: Config = None):
        self.logger = logging.getLogger("afxy." + self.__class__.__name__)
        self.config = config or default_config()

    @abstractmethod
    def run(self) -> Any:
        """Run the strategy."""
