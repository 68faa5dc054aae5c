"""
Shared fixtures and brute-force reference computations for the test suite.
"""
import itertools
from typing import List, Sequence, Tuple

import numpy as np
import pytest
from scipy.special import logsumexp

from marginal_pgm.core.clique_vector import CliqueVector
from marginal_pgm.core.domain import Domain
from marginal_pgm.core.factor import LOG, Factor
from marginal_pgm.core.junction_tree import JunctionTree
from marginal_pgm.core.measurements import LinearMeasurement

ENV_KEYS = ("PGM_SEED", "PGM_OUTPUT_DIR", "PGM_PARAMETER_CAP", "PGM_LOG_LEVEL")


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    """Keep a developer's .env from leaking into config tests."""
    for key in ENV_KEYS:
        monkeypatch.delenv(key, raising=False)


@pytest.fixture
def chain_domain():
    return Domain(("A", "B", "C"), (2, 2, 2))


# brute-force oracles

def joint_log_potential(theta: CliqueVector) -> np.ndarray:
    """Σ_C θ_C(x_C) over the full domain."""
    domain = theta.domain
    table = np.zeros(domain.shape)
    for factor in theta.values():
        table = table + factor.aligned(domain.attributes)
    return table


def enumerate_model(theta: CliqueVector) -> Tuple[np.ndarray, float]:
    """Normalized joint p_θ and log Z by full enumeration."""
    log_table = joint_log_potential(theta)
    log_z = float(logsumexp(log_table))
    return np.exp(log_table - log_z), log_z


def joint_marginal(p: np.ndarray, domain: Domain, clique: Sequence[str]) -> np.ndarray:
    axes = tuple(i for i, a in enumerate(domain) if a not in clique)
    return p.sum(axis=axes)


def joint_entropy(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(-(p * np.log(p)).sum())


def marginalization_matrix(domain: Domain, clique: Sequence[str]) -> np.ndarray:
    """Dense M_C with M_C p = μ_C (only for tiny test domains)."""
    n = domain.size()
    cells = np.unravel_index(np.arange(n), domain.shape)
    rows = np.ravel_multi_index(tuple(cells[domain.index(a)] for a in clique),
                                domain.shape_of(clique))
    M = np.zeros((domain.size(clique), n))
    M[rows, np.arange(n)] = 1.0
    return M


def project_simplex(v: np.ndarray, total: float = 1.0) -> np.ndarray:
    """Euclidean projection onto {x >= 0, Σx = total}."""
    u = np.sort(v)[::-1]
    cumulative = np.cumsum(u) - total
    k = np.arange(1, v.size + 1)
    rho = np.nonzero(u - cumulative / k > 0)[0][-1]
    tau = cumulative[rho] / (rho + 1)
    return np.maximum(v - tau, 0.0)


def dense_l2_optimum(domain: Domain, measurements: List[LinearMeasurement],
                     total: float = 1.0, iterations: int = 20_000) -> float:
    """Minimum of ½Σ‖Q_C M_C p − y_C‖² over the scaled simplex, by FISTA."""
    A = np.vstack([m.query @ marginalization_matrix(domain, m.clique) for m in measurements])
    y = np.concatenate([m.answer for m in measurements])
    step = 1.0 / np.linalg.eigvalsh(A.T @ A).max()
    n = A.shape[1]
    x = np.full(n, total / n)
    z, t = x.copy(), 1.0
    for _ in range(iterations):
        x_new = project_simplex(z - step * (A.T @ (A @ z - y)), total)
        t_new = (1 + np.sqrt(1 + 4 * t * t)) / 2
        z = x_new + (t - 1) / t_new * (x_new - x)
        x, t = x_new, t_new
    residual = A @ x - y
    return 0.5 * float(residual @ residual)


# random instances

def random_theta(tree: JunctionTree, rng: np.random.Generator, scale: float = 1.0) -> CliqueVector:
    return CliqueVector(tree.domain, {
        c: Factor(tree.domain, c, scale * rng.standard_normal(tree.domain.shape_of(c)), LOG)
        for c in tree.maximal_cliques
    })


def random_domain(rng: np.random.Generator, d: int, low: int = 2, high: int = 4) -> Domain:
    names = tuple("ABCDEFGHIJ"[:d])
    return Domain(names, tuple(int(n) for n in rng.integers(low, high + 1, size=d)))


def random_cliques(rng: np.random.Generator, domain: Domain, count: int,
                   max_size: int = 3) -> List[Tuple[str, ...]]:
    cliques = []
    for _ in range(count):
        size = int(rng.integers(1, max_size + 1))
        members = rng.choice(len(domain), size=min(size, len(domain)), replace=False)
        cliques.append(domain.canonical(domain.attributes[i] for i in members))
    return cliques


def identity_measurements(domain: Domain, marginals, cliques, noise=None, rng=None):
    """Identity measurements of ``marginals`` (a joint table) on each clique."""
    ms = []
    for clique in cliques:
        y = joint_marginal(marginals, domain, clique).ravel()
        if noise:
            y = y + noise * rng.standard_normal(y.size)
        ms.append(LinearMeasurement(clique, np.eye(y.size), y))
    return ms


def all_cells(domain: Domain):
    return itertools.product(*(range(n) for n in domain.shape))
