"""
Discrete attribute domains and clique canonicalization.
"""
import math
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, Tuple

from .errors import CliqueError

Clique = Tuple[str, ...]


@dataclass(frozen=True)
class Domain:
    """Named discrete attributes with their cardinalities.

    The attribute order is significant: it is the axis order of every factor
    built over this domain.
    """
    attributes: Tuple[str, ...]
    shape: Tuple[int, ...]

    def __post_init__(self):
        attributes = tuple(self.attributes)
        shape = tuple(int(n) for n in self.shape)
        if len(attributes) != len(shape):
            raise CliqueError("attributes and shape must have the same length")
        if len(set(attributes)) != len(attributes):
            raise CliqueError(f"duplicate attribute names in {attributes}")
        for name, n in zip(attributes, shape):
            if n < 1:
                raise CliqueError(f"attribute {name!r} has cardinality {n} < 1")
        object.__setattr__(self, "attributes", attributes)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "_index", {a: i for i, a in enumerate(attributes)})

    @classmethod
    def from_dict(cls, cardinalities: Dict[str, int]) -> "Domain":
        """Build a domain from a name -> cardinality mapping (order kept)."""
        return cls(tuple(cardinalities.keys()), tuple(cardinalities.values()))

    def __len__(self) -> int:
        return len(self.attributes)

    def __iter__(self) -> Iterator[str]:
        return iter(self.attributes)

    def __contains__(self, name: object) -> bool:
        return name in self._index

    def index(self, name: str) -> int:
        """Axis position of attribute ``name``.

        Raises:
            CliqueError: If ``name`` is not in the domain.
        """
        try:
            return self._index[name]
        except KeyError:
            raise CliqueError(f"attribute {name!r} is not in the domain") from None

    def cardinality(self, name: str) -> int:
        """Number of values attribute ``name`` takes."""
        return self.shape[self.index(name)]

    def canonical(self, attrs: Iterable[str]) -> Clique:
        """Return ``attrs`` as a clique in domain order, validating membership."""
        attrs = list(attrs)
        if len(set(attrs)) != len(attrs):
            raise CliqueError(f"duplicate attributes in clique {tuple(attrs)}")
        return tuple(sorted(attrs, key=self.index))

    def shape_of(self, clique: Iterable[str]) -> Tuple[int, ...]:
        """Cardinalities of ``clique`` in the order given."""
        return tuple(self.cardinality(a) for a in clique)

    def size(self, clique: Iterable[str] = None) -> int:
        """Exact number of cells of ``clique`` (whole domain by default)."""
        shape = self.shape if clique is None else self.shape_of(clique)
        return math.prod(shape)

    def log10_size(self, clique: Iterable[str] = None) -> float:
        """log10 of :meth:`size`, usable when the size itself is astronomical."""
        shape = self.shape if clique is None else self.shape_of(clique)
        return float(sum(math.log10(n) for n in shape))

    def size_string(self) -> str:
        """Human-readable domain size such as ``"1.23e19"``."""
        log10 = self.log10_size()
        exponent = int(math.floor(log10))
        mantissa = 10 ** (log10 - exponent)
        if mantissa >= 9.995:
            mantissa, exponent = 1.0, exponent + 1
        return f"{mantissa:.2f}e{exponent}"

    def project(self, clique: Iterable[str]) -> "Domain":
        """Sub-domain over ``clique``."""
        clique = self.canonical(clique)
        return Domain(clique, self.shape_of(clique))

    def extend(self, attributes: Iterable[str], shape: Iterable[int]) -> "Domain":
        """Return a new domain with extra attributes appended."""
        return Domain(self.attributes + tuple(attributes), self.shape + tuple(shape))
