"""Abstract experiment class."""

from abc import abstractmethod
import logging
from typing import Any, Dict, Hashable, List

import pandas as pd

from afxy.config import Config, default_config

from .runner import run_cells


class Experiment:
    """Base class to represent an Experiment.

    An Experiment evaluates one row per cell (an eps value, possibly paired
    with a seed), collects the rows into a table and can check the table
    against the expected asymptotic behaviour. For debugging purposes, it's
    possible to set an expected table to compare intermediate results.

    Attributes:
        columns (List[str]): CSV header of the table
        summary (Dict): fitted or derived quantities, filled by ``run``
    """

    columns: List[str] = []

    def __init__(self, config: Config = None):
        self.logger = logging.getLogger("afxy." + self.__class__.__name__)
        self.config = config or default_config()

        self.has_expected = False
        self.expected = None
        self.summary: Dict[str, Any] = {}

    @abstractmethod
    def cells(self) -> List[Hashable]:
        """Keys of the independent cells, in output order."""

    @abstractmethod
    def cell(self, key: Hashable) -> Dict[str, Any]:
        """Compute the row of one cell."""

    def summarize(self, table: pd.DataFrame) -> Dict[str, Any]:
        """Derive the summary of a finished table."""
        return {}

    @abstractmethod
    def check(self, table: pd.DataFrame) -> bool:
        """Check whether a table shows the expected behaviour.

        Args:
            table (pd.DataFrame): output of ``run``

        Returns:
            bool: True if the behaviour is observed
        """

    def set_expected(self, table: pd.DataFrame):
        """Set the expected table of the experiment.

        Args:
            table (pd.DataFrame): Expected table.
        """
        if not self.check(table):
            self.logger.warning("Expected table does not pass the check.")
        else:
            self.logger.debug("Expected table passes the check.")
            self.has_expected = True
            self.expected = table

    def run(self) -> pd.DataFrame:
        """Evaluate every cell and return the table, rows in cell order."""
        keys = self.cells()
        self.logger.info("Running %d cells on %d workers", len(keys), self.config.workers)
        rows = run_cells(self.cell, keys, self.config.workers)
        table = pd.DataFrame(rows, columns=self.columns)
        self.summary = self.summarize(table)
        if self.has_expected:
            same = table.shape == self.expected.shape and bool((table == self.expected).all().all())
            self.logger.debug("Table %s the expected one", "matches" if same else "differs from")
        return table
