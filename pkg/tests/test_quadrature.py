import numpy as np
import pytest

from esdg.quadrature import (
    NodalBasis,
    diff_matrix,
    gauss_rule,
    lgl_rule,
    tensor_diff_matrices,
    tensor_product_rule,
    tensor_vandermonde,
    vandermonde,
)


@pytest.mark.parametrize("n", range(1, 9))
def test_gauss_exactness(n):
    rule = gauss_rule(n)
    assert abs(rule.weights.sum() - 2.0) < 1e-14
    for k in range(2 * n):
        exact = (1.0 - (-1.0) ** (k + 1)) / (k + 1)
        assert abs(np.sum(rule.weights * rule.nodes**k) - exact) < 1e-13


@pytest.mark.parametrize("n", range(2, 9))
def test_lgl_exactness_and_endpoints(n):
    rule = lgl_rule(n)
    assert rule.nodes[0] == -1.0 and rule.nodes[-1] == 1.0
    assert np.all(np.diff(rule.nodes) > 0)
    for k in range(2 * n - 2):
        exact = (1.0 - (-1.0) ** (k + 1)) / (k + 1)
        assert abs(np.sum(rule.weights * rule.nodes**k) - exact) < 1e-13


def test_vandermonde_partition_of_unity_and_interpolation(rng):
    for N in range(1, 7):
        basis = NodalBasis(N)
        pts = rng.uniform(-1, 1, 30)
        V = vandermonde(basis, pts)
        assert np.abs(V.sum(axis=1) - 1.0).max() < 1e-13
        p = np.polynomial.Polynomial(rng.standard_normal(N + 1))
        assert np.abs(V @ p(basis.nodes) - p(pts)).max() < 1e-11


def test_vandermonde_cardinal_at_nodes():
    basis = NodalBasis(4)
    V = vandermonde(basis, basis.nodes)
    assert np.abs(V - np.eye(5)).max() == 0.0


def test_diff_matrix_exact_on_polynomials(rng):
    for N in range(1, 7):
        basis = NodalBasis(N)
        D = diff_matrix(basis)
        p = np.polynomial.Polynomial(rng.standard_normal(N + 1))
        x = basis.nodes
        assert np.abs(D @ p(x) - p.deriv()(x)).max() < 1e-11


def test_tensor_product_rule_2d():
    rule = tensor_product_rule(gauss_rule(4), 2)
    assert rule.nodes.shape == (16, 2)
    assert abs(rule.weights.sum() - 4.0) < 1e-13
    val = np.sum(rule.weights * rule.nodes[:, 0] ** 2 * rule.nodes[:, 1] ** 4)
    assert abs(val - (2.0 / 3.0) * (2.0 / 5.0)) < 1e-13


def test_tensor_vandermonde_interpolates(rng):
    N = 3
    basis = NodalBasis(N)
    pts = rng.uniform(-1, 1, (20, 2))
    f = lambda x: (1 + x[:, 0] + x[:, 0] ** 3) * (2 - x[:, 1] ** 2)
    nodes = tensor_product_rule(lgl_rule(N + 1), 2).nodes
    coeff = np.linalg.solve(tensor_vandermonde(basis, nodes), f(nodes))
    V = tensor_vandermonde(basis, pts)
    assert np.abs(V @ coeff - f(pts)).max() < 1e-12


def test_tensor_diff_matrices(rng):
    N = 4
    basis = NodalBasis(N)
    D = tensor_diff_matrices(basis, 2)
    nodes = tensor_product_rule(lgl_rule(N + 1), 2).nodes
    Vn = tensor_vandermonde(basis, nodes)
    f = (1 + nodes[:, 0] ** 2) * nodes[:, 1]
    fx = 2 * nodes[:, 0] * nodes[:, 1]
    fy = 1 + nodes[:, 0] ** 2
    coeff = np.linalg.solve(Vn, f)
    assert np.abs(Vn @ D[0] @ coeff - fx).max() < 1e-11
    assert np.abs(Vn @ D[1] @ coeff - fy).max() < 1e-11
