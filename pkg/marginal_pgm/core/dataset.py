"""
Integer-coded tabular datasets over a Domain.
"""
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional

import numpy as np
import pandas as pd

from .domain import Domain
from .errors import DatasetError
from .factor import Factor


@dataclass(frozen=True, eq=False)
class Dataset:
    """Records coded as integers in [0, n_i) per attribute.

    ``value_maps`` maps each attribute to its code -> original label list,
    when the records were coded from labelled data.
    """
    domain: Domain
    records: pd.DataFrame
    value_maps: Optional[Dict[str, List]] = field(default=None, repr=False)

    def __post_init__(self):
        missing = [a for a in self.domain if a not in self.records.columns]
        if missing:
            raise DatasetError(f"records are missing columns {missing}")
        records = self.records[list(self.domain.attributes)].astype(np.int64).reset_index(drop=True)
        for attr, n in zip(self.domain.attributes, self.domain.shape):
            column = records[attr].to_numpy()
            bad = np.flatnonzero((column < 0) | (column >= n))
            if bad.size:
                row = int(bad[0])
                raise DatasetError(
                    f"value {column[row]} of {attr!r} is outside [0, {n})", line=row + 2
                )
        object.__setattr__(self, "records", records)

    @classmethod
    def from_array(cls, domain: Domain, array: np.ndarray, value_maps=None) -> "Dataset":
        """Wrap an integer array with one column per domain attribute."""
        return cls(domain, pd.DataFrame(np.asarray(array, dtype=np.int64), columns=list(domain)),
                   value_maps)

    @property
    def records_count(self) -> int:
        return len(self.records)

    def __len__(self) -> int:
        return self.records_count

    def marginal(self, clique: Iterable[str]) -> Factor:
        """Count-scale contingency table on ``clique``."""
        clique = self.domain.canonical(clique)
        shape = self.domain.shape_of(clique)
        if not clique:
            return Factor.scalar(self.domain, float(self.records_count))
        codes = self.records[list(clique)].to_numpy().T
        flat = np.ravel_multi_index(tuple(codes), shape)
        counts = np.bincount(flat, minlength=int(np.prod(shape)))
        return Factor(self.domain, clique, counts.astype(np.float64))

    def decoded(self) -> pd.DataFrame:
        """Records with codes replaced by their original labels where known."""
        if not self.value_maps:
            return self.records.copy()
        frame = self.records.copy()
        for attr, labels in self.value_maps.items():
            if attr in frame.columns:
                frame[attr] = [labels[code] for code in frame[attr]]
        return frame
