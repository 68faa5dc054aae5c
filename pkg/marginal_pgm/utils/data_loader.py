"""
CSV ingestion: code raw columns into integer categories over a Domain.
"""
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

import numpy as np
import pandas as pd

from ..core.dataset import Dataset
from ..core.domain import Domain
from ..core.errors import DatasetError

logger = logging.getLogger(__name__)

HEADER_LINES = 1


@dataclass(frozen=True)
class BinningRule:
    """Equal-width bins over [low, high). ``strict`` rejects values outside."""
    low: float
    high: float
    bins: int
    strict: bool = True

    def __post_init__(self):
        if not self.high > self.low:
            raise DatasetError(f"binning needs max > min, got [{self.low}, {self.high})")
        if self.bins < 1:
            raise DatasetError(f"binning needs at least one bin, got {self.bins}")

    @classmethod
    def from_config(cls, rule: Mapping[str, Any]) -> "BinningRule":
        try:
            return cls(float(rule["min"]), float(rule["max"]), int(rule["bins"]),
                       bool(rule.get("strict", True)))
        except KeyError as e:
            raise DatasetError(f"binning rule is missing {e.args[0]!r}") from None

    def code(self, value: float) -> Optional[int]:
        """Bin index of ``value``, or None when it is out of range under ``strict``."""
        position = math.floor((value - self.low) / (self.high - self.low) * self.bins)
        if 0 <= position < self.bins and self.low <= value < self.high:
            return position
        if self.strict:
            return None
        return min(max(position, 0), self.bins - 1)

    def labels(self) -> List[str]:
        width = (self.high - self.low) / self.bins
        return [f"[{self.low + i * width:g}, {self.low + (i + 1) * width:g})" for i in range(self.bins)]


def read_domain_file(path: Union[str, Path]) -> Tuple[Domain, Dict[str, Optional[List[str]]]]:
    """Read a domain file; list values declare the category labels in code order."""
    try:
        with open(path, 'r', encoding='utf-8') as f:
            raw = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise DatasetError(f"cannot read domain file {path}: {e}") from None
    if not isinstance(raw, dict) or not raw:
        raise DatasetError(f"domain file {path} must hold a non-empty JSON object")
    labels = {k: ([str(v) for v in value] if isinstance(value, list) else None)
              for k, value in raw.items()}
    try:
        domain = Domain.from_dict({k: (len(v) if isinstance(v, list) else int(v))
                                   for k, v in raw.items()})
    except (TypeError, ValueError) as e:
        raise DatasetError(f"invalid cardinality in {path}: {e}") from None
    return domain, labels


def _code_binned(column: pd.Series, attr: str, rule: BinningRule, n: int) -> np.ndarray:
    if rule.bins != n:
        raise DatasetError(f"{attr!r} has {rule.bins} bins but cardinality {n}")
    codes = np.empty(len(column), dtype=np.int64)
    for row, raw in enumerate(column):
        try:
            value = float(raw)
        except ValueError:
            raise DatasetError(f"{attr!r} value {raw!r} is not numeric",
                               line=row + HEADER_LINES + 1) from None
        code = rule.code(value)
        if code is None:
            raise DatasetError(
                f"{attr!r} value {value:g} is outside [{rule.low:g}, {rule.high:g})",
                line=row + HEADER_LINES + 1,
            )
        codes[row] = code
    return codes


def _code_categorical(column: pd.Series, attr: str, labels: Optional[List[str]],
                      n: int) -> Tuple[np.ndarray, List[str]]:
    mapping: Dict[str, int] = {label: i for i, label in enumerate(labels or [])}
    codes = np.empty(len(column), dtype=np.int64)
    for row, value in enumerate(column):
        if value not in mapping:
            if labels is not None:
                raise DatasetError(f"{attr!r} value {value!r} is not a declared category",
                                   line=row + HEADER_LINES + 1)
            if len(mapping) == n:
                raise DatasetError(f"{attr!r} has more than {n} distinct values",
                                   line=row + HEADER_LINES + 1)
            mapping[value] = len(mapping)
        codes[row] = mapping[value]
    ordered = sorted(mapping, key=mapping.get)
    # codes never observed keep their number as label
    ordered += [str(i) for i in range(len(ordered), n)]
    return codes, ordered


def load_dataset(
    csv_path: Union[str, Path],
    domain_path: Union[str, Path],
    binning: Optional[Mapping[str, Mapping[str, Any]]] = None,
) -> Dataset:
    """Load and integer-code a CSV dataset.

    Args:
        csv_path: CSV with a header row naming at least every domain attribute.
        domain_path: Domain file (name -> cardinality or list of labels).
        binning: Per numeric column ``{min, max, bins, strict}``.

    Returns:
        The coded Dataset, with ``value_maps`` giving each code's label.

    Raises:
        DatasetError: For missing columns, unparseable rows, unknown
            categories or out-of-range numeric values; ``line`` is the CSV line.
    """
    domain, labels = read_domain_file(domain_path)
    rules = {attr: BinningRule.from_config(rule) for attr, rule in (binning or {}).items()}
    unknown = set(rules) - set(domain)
    if unknown:
        raise DatasetError(f"binning rules for attributes not in the domain: {sorted(unknown)}")
    try:
        frame = pd.read_csv(csv_path, dtype=str, keep_default_na=False)
    except FileNotFoundError:
        raise DatasetError(f"dataset {csv_path} not found") from None
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise DatasetError(f"cannot parse {csv_path}: {e}") from None
    missing = [a for a in domain if a not in frame.columns]
    if missing:
        raise DatasetError(f"dataset {csv_path} is missing columns {missing}")

    coded, value_maps = {}, {}
    for attr in domain:
        column = frame[attr]
        blank = np.flatnonzero((column.isna() | (column.fillna("").str.strip() == "")).to_numpy())
        if blank.size:
            raise DatasetError(f"row has no value for {attr!r}", line=int(blank[0]) + HEADER_LINES + 1)
        column = column.str.strip()
        n = domain.cardinality(attr)
        if attr in rules:
            coded[attr] = _code_binned(column, attr, rules[attr], n)
            value_maps[attr] = rules[attr].labels()
        else:
            coded[attr], value_maps[attr] = _code_categorical(column, attr, labels[attr], n)
    logger.info("loaded %d records over %d attributes (domain size %s)",
                len(frame), len(domain), domain.size_string())
    return Dataset(domain, pd.DataFrame(coded, columns=list(domain)), value_maps)
