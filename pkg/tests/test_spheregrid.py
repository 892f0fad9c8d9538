import math

import numpy as np
from scipy.special import sph_harm_y

from enclosure.mathkit import sphere_quadrature


def _nodes_angles(grid):
    th = np.arccos(np.clip(grid.nodes[:, 2], -1.0, 1.0))
    ph = np.arctan2(grid.nodes[:, 1], grid.nodes[:, 0])
    return th, ph


def test_constant_integrand_L4():
    grid = sphere_quadrature(4)
    assert abs(np.sum(grid.weights) - 4.0 * math.pi) < 1e-13


def test_harmonic_normalization_L8():
    grid = sphere_quadrature(8)
    th, ph = _nodes_angles(grid)
    y = sph_harm_y(3, 2, th, ph)
    assert abs(np.sum(grid.weights * y * np.conj(y)) - 1.0) < 1e-12


def test_harmonic_orthogonality_L8():
    grid = sphere_quadrature(8)
    th, ph = _nodes_angles(grid)
    y51 = sph_harm_y(5, 1, th, ph)
    y71 = sph_harm_y(7, 1, th, ph)
    assert abs(np.sum(grid.weights * y51 * np.conj(y71))) < 1e-12


def test_exactness_to_degree_2L():
    # random pair of degree <= L harmonics integrates to the Kronecker delta
    L = 6
    grid = sphere_quadrature(L)
    th, ph = _nodes_angles(grid)
    for (l1, m1), (l2, m2) in (((6, -4), (6, -4)), ((6, 5), (4, 5)), ((5, 0), (6, 0))):
        val = np.sum(grid.weights * sph_harm_y(l1, m1, th, ph)
                     * np.conj(sph_harm_y(l2, m2, th, ph)))
        want = 1.0 if (l1, m1) == (l2, m2) else 0.0
        assert abs(val - want) < 1e-11


def test_grid_structure():
    L = 5
    grid = sphere_quadrature(L)
    assert grid.n_theta == L + 1
    assert grid.n_phi >= 2 * L + 1
    assert grid.n_nodes == grid.n_theta * grid.n_phi
    assert np.all(grid.weights > 0)
    assert np.allclose(np.linalg.norm(grid.nodes, axis=1), 1.0, atol=1e-14)
    # frame vectors are orthonormal at each node
    assert np.allclose(np.einsum("ni,ni->n", grid.r_hat, grid.theta_hat), 0, atol=1e-14)
    assert np.allclose(np.einsum("ni,ni->n", grid.r_hat, grid.phi_hat), 0, atol=1e-14)
    assert np.allclose(np.cross(grid.r_hat, grid.theta_hat), grid.phi_hat, atol=1e-14)
