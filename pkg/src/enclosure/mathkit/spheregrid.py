"""Product quadrature grids on the unit sphere.

Gauss-Legendre in the polar angle times a uniform azimuth grid: exact for
spherical harmonics up to degree 2L (products of two degree-L fields),
which is what the coefficient transforms need.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True, eq=False)
class SphereGrid:
    """Quadrature nodes/weights on S^2 with the product structure exposed.

    Nodes are theta-major: node index = i_theta * n_phi + j_phi.  Weights
    sum to 4 pi.  The spherical unit vectors at the nodes are precomputed
    for tangent-component extraction.
    """

    max_degree: int
    cos_theta: np.ndarray      # (n_theta,) ascending Gauss-Legendre nodes
    gl_weights: np.ndarray     # (n_theta,) weights for the d(cos theta) integral
    n_phi: int
    nodes: np.ndarray          # (N, 3) unit vectors
    weights: np.ndarray        # (N,) surface weights, sum = 4 pi
    r_hat: np.ndarray = field(repr=False, default=None)
    theta_hat: np.ndarray = field(repr=False, default=None)
    phi_hat: np.ndarray = field(repr=False, default=None)

    @property
    def n_theta(self) -> int:
        return len(self.cos_theta)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def phis(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.n_phi) / self.n_phi


def sphere_quadrature(L: int) -> SphereGrid:
    """Grid integrating spherical harmonics exactly up to degree 2L."""
    if L < 1:
        raise ValueError("max degree L must be >= 1")
    n_theta = L + 1
    n_phi = 2 * L + 2
    xs, ws = np.polynomial.legendre.leggauss(n_theta)
    st = np.sqrt(1.0 - xs**2)
    phis = 2.0 * np.pi * np.arange(n_phi) / n_phi
    cp, sp = np.cos(phis), np.sin(phis)

    # theta-major flattening
    r_hat = np.empty((n_theta, n_phi, 3))
    r_hat[:, :, 0] = st[:, None] * cp[None, :]
    r_hat[:, :, 1] = st[:, None] * sp[None, :]
    r_hat[:, :, 2] = xs[:, None]
    theta_hat = np.empty_like(r_hat)
    theta_hat[:, :, 0] = xs[:, None] * cp[None, :]
    theta_hat[:, :, 1] = xs[:, None] * sp[None, :]
    theta_hat[:, :, 2] = -st[:, None]
    phi_hat = np.empty_like(r_hat)
    phi_hat[:, :, 0] = -sp[None, :]
    phi_hat[:, :, 1] = cp[None, :]
    phi_hat[:, :, 2] = 0.0

    weights = np.repeat(ws * (2.0 * np.pi / n_phi), n_phi)
    return SphereGrid(
        max_degree=L,
        cos_theta=xs,
        gl_weights=ws,
        n_phi=n_phi,
        nodes=r_hat.reshape(-1, 3),
        weights=weights,
        r_hat=r_hat.reshape(-1, 3),
        theta_hat=theta_hat.reshape(-1, 3),
        phi_hat=phi_hat.reshape(-1, 3),
    )
