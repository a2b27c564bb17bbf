"""Gauss and Gauss-Lobatto quadrature rules and nodal Lagrange bases.

Nodes are computed by Newton iteration on Legendre polynomials with
Chebyshev initial guesses (tolerance 1e-15, at most 100 iterations).
Interpolation uses barycentric weights for stability at high degree.
Tensor-product rules are ordered lexicographically with the first
reference coordinate varying fastest; every module indexes quadrature
grids with this single canonical ordering.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "QuadratureRule",
    "NodalBasis",
    "lgl_rule",
    "gauss_rule",
    "vandermonde",
    "diff_matrix",
    "tensor_product_rule",
    "tensor_vandermonde",
    "tensor_diff_matrices",
]

_NEWTON_TOL = 1e-15
_NEWTON_MAXIT = 100


@dataclass(frozen=True)
class QuadratureRule:
    """Quadrature nodes and weights on [-1, 1]^d.

    ``nodes`` has shape (n,) for one-dimensional rules and (n, d) for
    tensor-product rules.  Weights sum to the measure 2^d.
    """

    nodes: np.ndarray
    weights: np.ndarray
    kind: str  # "lgl" or "gauss"

    @property
    def n_points(self) -> int:
        return self.nodes.shape[0]

    @property
    def dim(self) -> int:
        return 1 if self.nodes.ndim == 1 else self.nodes.shape[1]


def _legendre_and_deriv(n: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate P_n and P_n' by the three-term recurrence."""
    p_prev = np.ones_like(x)
    if n == 0:
        return p_prev, np.zeros_like(x)
    p = x.copy()
    for k in range(1, n):
        p, p_prev = ((2 * k + 1) * x * p - k * p_prev) / (k + 1), p
    # at x = +-1 substitute the endpoint value P_n'(+-1) = (+-1)^(n+1) n(n+1)/2
    denom = x * x - 1.0
    interior = denom != 0.0
    dp = np.where(
        interior,
        n * (x * p - p_prev) / np.where(interior, denom, 1.0),
        np.sign(x) ** (n + 1) * n * (n + 1) / 2.0,
    )
    return p, dp


def gauss_rule(n_points: int) -> QuadratureRule:
    """Legendre-Gauss rule, exact for polynomials of degree 2n-1."""
    if n_points < 1:
        raise ValueError(f"gauss_rule requires n_points >= 1, got {n_points}")
    n = n_points
    if n == 1:
        return QuadratureRule(np.array([0.0]), np.array([2.0]), "gauss")
    # Chebyshev initial guess for the roots of P_n
    k = np.arange(1, n + 1)
    x = np.cos(np.pi * (k - 0.25) / (n + 0.5))
    for _ in range(_NEWTON_MAXIT):
        p, dp = _legendre_and_deriv(n, x)
        dx = p / dp
        x -= dx
        if np.max(np.abs(dx)) < _NEWTON_TOL:
            break
    x = np.sort(x)
    # symmetrize to kill the O(eps) asymmetry of independent Newton solves
    x = 0.5 * (x - x[::-1])
    _, dp = _legendre_and_deriv(n, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    return QuadratureRule(x, w, "gauss")


def lgl_rule(n_points: int) -> QuadratureRule:
    """Legendre-Gauss-Lobatto rule, exact for degree 2n-3, endpoints included."""
    if n_points < 2:
        raise ValueError(f"lgl_rule requires n_points >= 2, got {n_points}")
    n = n_points
    if n == 2:
        return QuadratureRule(np.array([-1.0, 1.0]), np.array([1.0, 1.0]), "lgl")
    # interior nodes are the roots of P'_{n-1}; Chebyshev-Lobatto initial guess
    x = -np.cos(np.pi * np.arange(1, n - 1) / (n - 1))
    for _ in range(_NEWTON_MAXIT):
        p, dp = _legendre_and_deriv(n - 1, x)
        # Newton on P'_{n-1} using the Legendre ODE:
        # (1-x^2) P'' = 2x P' - n(n-1) P
        d2p = (2.0 * x * dp - (n - 1) * n * p) / (1.0 - x * x)
        dx = dp / d2p
        x -= dx
        if np.max(np.abs(dx)) < _NEWTON_TOL:
            break
    x = np.concatenate(([-1.0], np.sort(x), [1.0]))
    x = 0.5 * (x - x[::-1])
    x[0], x[-1] = -1.0, 1.0
    p, _ = _legendre_and_deriv(n - 1, x)
    w = 2.0 / (n * (n - 1) * p * p)
    return QuadratureRule(x, w, "lgl")


def _barycentric_weights(nodes: np.ndarray) -> np.ndarray:
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    return 1.0 / np.prod(diff, axis=1)


@dataclass(frozen=True)
class NodalBasis:
    """Lagrange cardinal basis on LGL interpolation nodes."""

    degree: int
    nodes: np.ndarray = field(init=False)
    bary_weights: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError(f"degree must be >= 1, got {self.degree}")
        rule = lgl_rule(self.degree + 1)
        object.__setattr__(self, "nodes", rule.nodes)
        object.__setattr__(self, "bary_weights", _barycentric_weights(rule.nodes))

    @property
    def n_nodes(self) -> int:
        return self.degree + 1


def vandermonde(basis: NodalBasis, points: np.ndarray) -> np.ndarray:
    """Evaluate all cardinal functions at ``points`` (barycentric form).

    Rows are evaluation points, columns basis functions; each row sums
    to one (partition of unity).
    """
    points = np.asarray(points, dtype=float)
    if points.size and (points.min() < -1.0 - 1e-12 or points.max() > 1.0 + 1e-12):
        raise ValueError("evaluation points must lie in [-1, 1]")
    diff = points[:, None] - basis.nodes[None, :]
    exact = np.abs(diff) < 1e-14
    on_node = exact.any(axis=1)
    diff[exact] = 1.0
    ratio = basis.bary_weights[None, :] / diff
    V = ratio / ratio.sum(axis=1, keepdims=True)
    V[on_node] = exact[on_node].astype(float)
    return V


def diff_matrix(basis: NodalBasis) -> np.ndarray:
    """Nodal differentiation matrix from barycentric weights."""
    x, w = basis.nodes, basis.bary_weights
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    D = (w[None, :] / w[:, None]) / diff
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -D.sum(axis=1))
    return D


def tensor_product_rule(rule_1d: QuadratureRule, d: int) -> QuadratureRule:
    """Tensor-product rule on [-1,1]^d, lexicographic with xi_1 fastest."""
    if d not in (1, 2):
        raise ValueError(f"unsupported dimension {d}")
    if d == 1:
        return rule_1d
    n = rule_1d.n_points
    x = rule_1d.nodes
    nodes = np.empty((n * n, 2))
    nodes[:, 0] = np.tile(x, n)
    nodes[:, 1] = np.repeat(x, n)
    weights = np.repeat(rule_1d.weights, n) * np.tile(rule_1d.weights, n)
    return QuadratureRule(nodes, weights, rule_1d.kind)


def tensor_vandermonde(basis: NodalBasis, points: np.ndarray) -> np.ndarray:
    """Vandermonde of the d-dim tensor-product basis at points (n, d).

    Basis index m = a + (N+1)*b for the function l_a(xi_1) l_b(xi_2).
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    d = points.shape[1]
    if d == 1:
        return vandermonde(basis, points[:, 0])
    V1 = vandermonde(basis, points[:, 0])
    V2 = vandermonde(basis, points[:, 1])
    return (V2[:, :, None] * V1[:, None, :]).reshape(points.shape[0], -1)


def tensor_diff_matrices(basis: NodalBasis, d: int) -> list[np.ndarray]:
    """Differentiation matrices on the tensor-product coefficient space."""
    D = diff_matrix(basis)
    if d == 1:
        return [D]
    eye = np.eye(basis.n_nodes)
    return [np.kron(eye, D), np.kron(D, eye)]
