"""Thread-pool execution of experiment cells and CSV export."""

from concurrent.futures import ThreadPoolExecutor
import logging
import math
from pathlib import Path
import re
from typing import Any, Callable, Hashable, List, Sequence, Union

import pandas as pd

logger = logging.getLogger("afxy.runner")

_RANGE = re.compile(r"^\s*2\^(-?\d+)\s*\.\.\s*2\^(-?\d+)\s*$")


def run_cells(fn: Callable[[Hashable], Any], keys: Sequence[Hashable], workers: int = 1) -> List[Any]:
    """Evaluate fn on every key, on up to ``workers`` threads.

    The results come back in the order of ``keys`` whatever the completion
    order, so tables built from them do not depend on the thread count.
    """
    keys = list(keys)
    if workers < 1:
        raise ValueError("workers must be positive")
    if workers == 1 or len(keys) < 2:
        return [fn(key) for key in keys]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(fn, keys))
    logger.debug("Evaluated %d cells on %d threads", len(keys), workers)
    return results


def eps_range(text: str) -> List[float]:
    """Parse ``2^-a..2^-b`` into the geometric list 2^-a, ..., 2^-b.

    A comma separated list of numbers is accepted as well.

    Raises:
        ValueError: the text is neither form, or a value is not positive
    """
    match = _RANGE.match(text)
    if match:
        first, last = int(match.group(1)), int(match.group(2))
        step = 1 if last >= first else -1
        values = [math.ldexp(1.0, k) for k in range(first, last + step, step)]
    else:
        try:
            values = [float(part) for part in text.split(",") if part.strip()]
        except ValueError as exc:
            raise ValueError(f"Cannot parse eps list {text!r}") from exc
    if not values or any(not v > 0 for v in values):
        raise ValueError(f"eps list {text!r} must hold positive values")
    return values


def write_table(table: pd.DataFrame, path: Union[str, Path]) -> Path:
    """Write a table as CSV with a header and round-trippable floats."""
    path = Path(path)
    table.to_csv(path, index=False, float_format="%.17g")
    logger.info("Wrote %d rows to %s", len(table), path)
    return path
