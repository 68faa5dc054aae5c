"""
Per-attribute building blocks for factored (Kronecker-structured) queries.

Categories are indexed from 1 inside block parameters, so ``evidence`` with
``j=2`` selects the second category and ``mean`` weights category ``a`` by
``a``.
"""
import functools
from enum import Enum
from typing import Any, Dict, Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from .domain import Clique, Domain
from .errors import BlockParameterError


class BlockKind(str, Enum):
    """Named per-attribute query factors."""
    IDENTITY = "identity"          # keep variable in
    ONES = "ones"                  # marginalize variable out
    EVIDENCE = "evidence"          # indicator row e_j
    EVIDENCE_SET = "evidence_set"  # set indicator e_S
    PREFIX = "prefix"              # CDF transform
    BUCKET = "bucket"              # compress domain via f
    MEAN = "mean"                  # unnormalized expected value
    MOMENTS = "moments"            # first k raw moments


_ALIASES = {
    "I": BlockKind.IDENTITY,
    "1": BlockKind.ONES,
    "e_j": BlockKind.EVIDENCE,
    "e_S": BlockKind.EVIDENCE_SET,
    "P": BlockKind.PREFIX,
    "R_f": BlockKind.BUCKET,
    "E": BlockKind.MEAN,
    "E_k": BlockKind.MOMENTS,
}

BlockSpec = Union[str, Mapping[str, Any], Sequence]


def parse_kind(kind: Union[str, BlockKind]) -> BlockKind:
    """Resolve a block kind from its name or short alias.

    Raises:
        BlockParameterError: If the name is unknown.
    """
    if isinstance(kind, BlockKind):
        return kind
    if kind in _ALIASES:
        return _ALIASES[kind]
    try:
        return BlockKind(str(kind).lower())
    except ValueError:
        raise BlockParameterError(f"unknown block kind {kind!r}") from None


def _category(value: Any, n: int, what: str) -> int:
    try:
        index = int(value)
    except (TypeError, ValueError):
        raise BlockParameterError(f"{what} must be an integer, got {value!r}") from None
    if not 1 <= index <= n:
        raise BlockParameterError(f"{what}={index} is outside [1, {n}]")
    return index


def build_block(kind: Union[str, BlockKind], params: Optional[Mapping[str, Any]], n: int) -> np.ndarray:
    """Build the named per-attribute query matrix for an attribute of size ``n``.

    Args:
        kind: A :class:`BlockKind` or one of its names or table symbols.
        params: ``j`` for evidence, ``S`` for evidence_set, ``f`` (and
            optionally ``r``) for bucket, ``k`` for moments.
        n: Attribute cardinality.

    Returns:
        A 2-D float array with ``n`` columns.

    Raises:
        BlockParameterError: If a parameter is missing or out of range.
    """
    kind = parse_kind(kind)
    params = dict(params or {})
    if n < 1:
        raise BlockParameterError(f"attribute cardinality {n} < 1")

    if kind is BlockKind.IDENTITY:
        return np.eye(n)
    if kind is BlockKind.ONES:
        return np.ones((1, n))
    if kind is BlockKind.PREFIX:
        return np.tril(np.ones((n, n)))
    if kind is BlockKind.MEAN:
        return np.arange(1, n + 1, dtype=np.float64)[None, :]

    if kind is BlockKind.EVIDENCE:
        if "j" not in params:
            raise BlockParameterError("evidence block needs parameter 'j'")
        row = np.zeros((1, n))
        row[0, _category(params["j"], n, "j") - 1] = 1.0
        return row

    if kind is BlockKind.EVIDENCE_SET:
        members = params.get("S")
        if not members:
            raise BlockParameterError("evidence_set block needs a non-empty parameter 'S'")
        row = np.zeros((1, n))
        for value in members:
            row[0, _category(value, n, "S entry") - 1] = 1.0
        return row

    if kind is BlockKind.BUCKET:
        mapping = params.get("f")
        if mapping is None or len(mapping) != n:
            raise BlockParameterError(f"bucket block needs 'f' listing a bucket for each of {n} values")
        r = int(params.get("r", max(int(b) for b in mapping)))
        if r < 1:
            raise BlockParameterError(f"bucket count r={r} < 1")
        block = np.zeros((r, n))
        for a, bucket in enumerate(mapping):
            block[_category(bucket, r, "f value") - 1, a] = 1.0
        return block

    if kind is BlockKind.MOMENTS:
        k = params.get("k")
        if k is None or int(k) < 1:
            raise BlockParameterError("moments block needs parameter 'k' >= 1")
        values = np.arange(1, n + 1, dtype=np.float64)
        return np.vstack([values ** b for b in range(1, int(k) + 1)])

    raise BlockParameterError(f"unhandled block kind {kind!r}")


def block_from_config(entry: BlockSpec, n: int) -> np.ndarray:
    """Resolve a config entry to a block matrix.

    An entry is a kind name (``"identity"``), a mapping with a ``kind`` key and
    parameters (``{"kind": "evidence", "j": 2}``), or an explicit dense matrix
    given as a list of rows (a flat list is one row).
    """
    if isinstance(entry, (str, BlockKind)):
        return build_block(entry, None, n)
    if isinstance(entry, Mapping):
        params = {k: v for k, v in entry.items() if k != "kind"}
        if "kind" not in entry:
            raise BlockParameterError(f"block entry {dict(entry)} has no 'kind'")
        return build_block(entry["kind"], params, n)
    matrix = np.atleast_2d(np.asarray(entry, dtype=np.float64))
    if matrix.ndim != 2 or matrix.shape[1] != n:
        raise BlockParameterError(f"explicit block of shape {matrix.shape} does not have {n} columns")
    return matrix


def kron_query(blocks: Iterable[np.ndarray]) -> np.ndarray:
    """Kronecker product of blocks given in canonical clique order."""
    return functools.reduce(np.kron, blocks, np.ones((1, 1)))


def clique_query(domain: Domain, clique: Iterable[str], record: Mapping[str, Any]) -> np.ndarray:
    """Query matrix over ``clique`` described by a measurement or workload record.

    The record holds one of ``matrix`` (dense rows, columns in row-major
    canonical order), ``blocks`` (attribute -> block entry, missing attributes
    are kept with ``identity``) or ``query`` (one block entry applied to every
    attribute). With none of them the query is the identity.
    """
    clique: Clique = domain.canonical(clique)
    n_c = domain.size(clique)
    if record.get("matrix") is not None:
        matrix = np.atleast_2d(np.asarray(record["matrix"], dtype=np.float64))
        if matrix.ndim != 2 or matrix.shape[1] != n_c:
            raise BlockParameterError(
                f"matrix of shape {matrix.shape} for clique {clique} needs {n_c} columns"
            )
        return matrix
    if record.get("blocks") is not None:
        blocks: Dict[str, Any] = dict(record["blocks"])
        unknown = set(blocks) - set(clique)
        if unknown:
            raise BlockParameterError(f"blocks name attributes {sorted(unknown)} outside {clique}")
        return kron_query(
            block_from_config(blocks.get(a, BlockKind.IDENTITY), domain.cardinality(a))
            for a in clique
        )
    entry = record.get("query", BlockKind.IDENTITY)
    return kron_query(block_from_config(entry, domain.cardinality(a)) for a in clique)
