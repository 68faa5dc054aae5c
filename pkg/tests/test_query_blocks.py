"""
Tests for per-attribute query blocks and clique query assembly.
"""
import numpy as np
import pytest

from marginal_pgm.core.domain import Domain
from marginal_pgm.core.errors import BlockParameterError
from marginal_pgm.core.query_blocks import (
    BlockKind,
    block_from_config,
    build_block,
    clique_query,
    kron_query,
    parse_kind,
)


def test_identity_and_ones():
    np.testing.assert_array_equal(build_block("identity", None, 3), np.eye(3))
    np.testing.assert_array_equal(build_block(BlockKind.ONES, None, 4), np.ones((1, 4)))


def test_prefix_block_is_lower_triangular():
    np.testing.assert_array_equal(build_block("prefix", None, 3),
                                  [[1, 0, 0], [1, 1, 0], [1, 1, 1]])


def test_evidence_selects_one_based_category():
    np.testing.assert_array_equal(build_block("evidence", {"j": 2}, 4), [[0, 1, 0, 0]])


def test_evidence_set_marks_every_member():
    np.testing.assert_array_equal(build_block("evidence_set", {"S": [1, 3]}, 4), [[1, 0, 1, 0]])


def test_mean_and_moments():
    np.testing.assert_array_equal(build_block("mean", None, 3), [[1, 2, 3]])
    np.testing.assert_array_equal(build_block("moments", {"k": 3}, 3),
                                  [[1, 2, 3], [1, 4, 9], [1, 8, 27]])


def test_bucket_maps_each_value_to_one_row():
    block = build_block("bucket", {"f": [1, 1, 2, 2, 2]}, 5)
    np.testing.assert_array_equal(block, [[1, 1, 0, 0, 0], [0, 0, 1, 1, 1]])
    assert block.sum(axis=0).tolist() == [1] * 5
    wider = build_block("bucket", {"f": [1, 1], "r": 3}, 2)
    assert wider.shape == (3, 2)


def test_symbol_aliases():
    assert parse_kind("I") is BlockKind.IDENTITY
    assert parse_kind("1") is BlockKind.ONES
    assert parse_kind("e_j") is BlockKind.EVIDENCE
    assert parse_kind("e_S") is BlockKind.EVIDENCE_SET
    assert parse_kind("P") is BlockKind.PREFIX
    assert parse_kind("R_f") is BlockKind.BUCKET
    assert parse_kind("E") is BlockKind.MEAN
    assert parse_kind("E_k") is BlockKind.MOMENTS
    assert parse_kind("Identity") is BlockKind.IDENTITY


@pytest.mark.parametrize("kind,params,n", [
    ("evidence", {"j": 0}, 4),
    ("evidence", {"j": 5}, 4),
    ("evidence", {}, 4),
    ("evidence_set", {"S": []}, 3),
    ("evidence_set", {"S": [4]}, 3),
    ("bucket", None, 3),
    ("bucket", {"f": [1, 2]}, 3),
    ("moments", {"k": 0}, 3),
    ("huber", None, 3),
])
def test_invalid_block_parameters(kind, params, n):
    with pytest.raises(BlockParameterError):
        build_block(kind, params, n)


def test_block_from_config_forms():
    np.testing.assert_array_equal(block_from_config("ones", 2), [[1, 1]])
    np.testing.assert_array_equal(block_from_config({"kind": "e_j", "j": 1}, 2), [[1, 0]])
    np.testing.assert_array_equal(block_from_config([0.5, 2.0], 2), [[0.5, 2.0]])
    with pytest.raises(BlockParameterError):
        block_from_config({"j": 1}, 2)
    with pytest.raises(BlockParameterError):
        block_from_config([[1.0, 2.0, 3.0]], 2)


def test_kron_query_of_no_blocks_is_scalar_one():
    np.testing.assert_array_equal(kron_query([]), [[1.0]])


def test_clique_query_sources():
    domain = Domain(("A", "B"), (2, 3))
    dense = clique_query(domain, ("A", "B"), {"matrix": np.eye(6).tolist()})
    np.testing.assert_array_equal(dense, np.eye(6))

    blocks = clique_query(domain, ("B", "A"), {"blocks": {"B": "prefix"}})
    np.testing.assert_array_equal(blocks, np.kron(np.eye(2), np.tril(np.ones((3, 3)))))

    everywhere = clique_query(domain, ("A", "B"), {"query": "ones"})
    np.testing.assert_array_equal(everywhere, np.ones((1, 6)))

    np.testing.assert_array_equal(clique_query(domain, ("A",), {}), np.eye(2))


def test_clique_query_errors():
    domain = Domain(("A", "B"), (2, 3))
    with pytest.raises(BlockParameterError):
        clique_query(domain, ("A",), {"matrix": [[1.0, 0.0, 0.0]]})
    with pytest.raises(BlockParameterError):
        clique_query(domain, ("A",), {"blocks": {"B": "ones"}})
