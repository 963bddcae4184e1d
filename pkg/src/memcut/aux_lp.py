"""Dual certificates: simplex weights over the cuts of a localized polyhedron.

The weights solve ``min over the simplex of max_{y in cube} sum_i lam_i (a_i.y - b_i)``,
which equals ``||A^T lam||_1 - b.lam`` and is an LP.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import discretize
from .polyhedron import IndexedPolyhedron
from .simplex import simplex


@dataclass
class DualCertificate:
    weights: np.ndarray
    indices: np.ndarray
    value: float


def certificate_value(poly: IndexedPolyhedron, weights) -> float:
    weights = np.asarray(weights, dtype=float)
    return float(np.abs(poly.normals.T @ weights).sum() - poly.offsets @ weights)


def solve_aux(poly: IndexedPolyhedron) -> DualCertificate:
    m, n = poly.normals.shape
    if m == 0:
        raise ValueError("need at least one constraint")
    A = poly.normals
    # variables: lam (m), t (n), surplus+ (n), surplus- (n)
    nv = m + 3 * n
    E = np.zeros((2 * n + 1, nv))
    E[:n, :m] = -A.T
    E[:n, m:m + n] = np.eye(n)
    E[:n, m + n:m + 2 * n] = -np.eye(n)
    E[n:2 * n, :m] = A.T
    E[n:2 * n, m:m + n] = np.eye(n)
    E[n:2 * n, m + 2 * n:] = -np.eye(n)
    E[2 * n, :m] = 1.0
    rhs = np.zeros(2 * n + 1)
    rhs[-1] = 1.0
    cost = np.zeros(nv)
    cost[:m] = -poly.offsets
    cost[m:m + n] = 1.0
    lam = simplex(cost, E, rhs).x[:m]
    lam /= lam.sum()
    return DualCertificate(lam, poly.indices.copy(), certificate_value(poly, lam))


def discretize_certificate(cert: DualCertificate, step: float) -> DualCertificate:
    """Round the weights toward zero at vector step ``step`` (no renormalization)."""
    weights = discretize(cert.weights, step)
    return DualCertificate(weights, cert.indices.copy(), cert.value)
