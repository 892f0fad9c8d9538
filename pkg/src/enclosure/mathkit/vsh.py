"""Vector spherical harmonic transforms on product grids.

Conventions are fixed in :mod:`enclosure.conventions`: orthonormal complex
Y_lm with Condon-Shortley phase, U_lm = grad_S Y / sqrt(l(l+1)),
V_lm = r^ x U_lm.  Coefficients are stored densely as data[pol, l, m+L]
with pol 0 = grad-type (U) and pol 1 = curl-type (V).

The transform is seminaive: an FFT in azimuth followed by per-order
Legendre sums, O(L^3) per field, exact for band-limited input on the
matched quadrature grid.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from ..conventions import POL_U, POL_V
from ..errors import NotTangential
from .spheregrid import SphereGrid, sphere_quadrature

_INV_SQRT4PI = 0.5 / math.sqrt(math.pi)


@dataclass
class VshCoeffs:
    """Tangential VSH coefficients up to degree L, 1 <= l <= L, |m| <= l.

    ln_scale is a shared natural-log factor: the represented field is
    exp(ln_scale) times the field synthesized from `data`.  It rides along
    untouched through linear operations.
    """

    L: int
    data: np.ndarray            # (2, L+1, 2L+1) complex
    ln_scale: float = 0.0

    @staticmethod
    def zeros(L: int, ln_scale: float = 0.0) -> "VshCoeffs":
        return VshCoeffs(L, np.zeros((2, L + 1, 2 * L + 1), dtype=complex), ln_scale)

    @staticmethod
    def single_mode(L: int, l: int, m: int, pol: int, amplitude: complex = 1.0) -> "VshCoeffs":
        c = VshCoeffs.zeros(L)
        if not (1 <= l <= L and abs(m) <= l):
            raise ValueError("mode (l, m) outside the truncation")
        c.data[pol, l, m + L] = amplitude
        return c

    def copy(self) -> "VshCoeffs":
        return VshCoeffs(self.L, self.data.copy(), self.ln_scale)

    def degree_energies(self) -> np.ndarray:
        """Sum of |coefficient|^2 over m, per (pol, l); mantissa scale."""
        return np.sum(np.abs(self.data) ** 2, axis=2)

    def total_energy(self) -> float:
        return float(np.sum(np.abs(self.data) ** 2))

    def tail_fraction(self, frac: float = 0.1) -> float:
        """Fraction of coefficient energy in the top `frac` of degrees."""
        per_l = np.sum(self.degree_energies(), axis=0)
        total = float(per_l.sum())
        if total == 0.0:
            return 0.0
        l0 = max(1, int(math.ceil((1.0 - frac) * self.L)))
        return float(per_l[l0:].sum()) / total


def _alp_tables(L: int, ct: np.ndarray, st: np.ndarray):
    """Dense normalized-ALP tables P, dP/dtheta, m P/sin(theta).

    Shapes (L+1, L+1, n): index [l, m, node], zero for m > l.  Includes the
    Condon-Shortley phase; Y_lm = P[l, m] * exp(i m phi) for m >= 0.
    """
    n = len(ct)
    P = np.zeros((L + 1, L + 1, n))
    P[0, 0] = _INV_SQRT4PI
    for m in range(1, L + 1):
        P[m, m] = -math.sqrt((2 * m + 1.0) / (2 * m)) * st * P[m - 1, m - 1]
    for m in range(0, L):
        P[m + 1, m] = math.sqrt(2 * m + 3.0) * ct * P[m, m]
    for m in range(0, L + 1):
        for l in range(m + 2, L + 1):
            a = math.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
            b = math.sqrt(((2.0 * l + 1.0) * ((l - 1.0) ** 2 - m * m))
                          / ((2.0 * l - 3.0) * (l * l - m * m)))
            P[l, m] = a * ct * P[l - 1, m] - b * P[l - 2, m]

    cot = ct / st
    D = np.zeros_like(P)
    S = np.zeros_like(P)
    for l in range(0, L + 1):
        for m in range(0, l + 1):
            D[l, m] = m * cot * P[l, m]
            if m + 1 <= l:
                D[l, m] += math.sqrt((l - m) * (l + m + 1.0)) * P[l, m + 1]
            if m:
                S[l, m] = m * P[l, m] / st
    return P, D, S


class VshTransform:
    """Forward/inverse scalar and tangential-vector transforms on a grid."""

    def __init__(self, grid: SphereGrid):
        self.grid = grid
        self.L = grid.max_degree
        st = np.sqrt(1.0 - grid.cos_theta**2)
        self.P3, self.D3, self.S3 = _alp_tables(self.L, grid.cos_theta, st)
        ll = np.arange(self.L + 1, dtype=float)
        with np.errstate(divide="ignore"):
            self.inv_sqrt_ll = np.where(ll > 0, 1.0 / np.sqrt(ll * (ll + 1.0)), 0.0)

    # ---- azimuthal step ----

    def _fft_modes(self, values: np.ndarray) -> np.ndarray:
        g = self.grid
        return np.fft.fft(values.reshape(g.n_theta, g.n_phi), axis=1) * (2.0 * np.pi / g.n_phi)

    def _ifft_modes(self, modes: np.ndarray) -> np.ndarray:
        g = self.grid
        return (np.fft.ifft(modes, axis=1) * g.n_phi).reshape(-1)

    # ---- tangential vector transform ----

    def analyze(self, samples: np.ndarray, tangent_tol: float = 1e-10) -> VshCoeffs:
        """Expand a tangential Cartesian field sampled on the grid.

        Raises NotTangential when the radial leakage exceeds tangent_tol
        relative to the field norm.
        """
        f = np.asarray(samples, dtype=complex)
        g = self.grid
        fr = np.einsum("ni,ni->n", f, g.r_hat.astype(complex))
        norm = float(np.linalg.norm(f))
        if norm > 0.0 and float(np.linalg.norm(fr)) > tangent_tol * norm:
            raise NotTangential(
                f"radial leakage {np.linalg.norm(fr) / norm:.3e} exceeds {tangent_tol:.1e}")
        ft = np.einsum("ni,ni->n", f, g.theta_hat.astype(complex))
        fp = np.einsum("ni,ni->n", f, g.phi_hat.astype(complex))
        return self.analyze_components(ft, fp)

    def analyze_components(self, f_theta: np.ndarray, f_phi: np.ndarray) -> VshCoeffs:
        L, g = self.L, self.grid
        Ft = self._fft_modes(f_theta)
        Fp = self._fft_modes(f_phi)
        w = self.grid.gl_weights
        data = np.zeros((2, L + 1, 2 * L + 1), dtype=complex)
        for m in range(-L, L + 1):
            am = abs(m)
            gt = w * Ft[:, m % g.n_phi]
            gp = w * Fp[:, m % g.n_phi]
            lmin = max(1, am)
            D = self.D3[lmin:, am, :]
            S = self.S3[lmin:, am, :]
            sgn = -1.0 if (m < 0 and am % 2) else 1.0
            ssgn = sgn if m >= 0 else -sgn
            inv = self.inv_sqrt_ll[lmin:]
            data[POL_U, lmin:, m + L] = inv * (sgn * (D @ gt) - 1j * ssgn * (S @ gp))
            data[POL_V, lmin:, m + L] = inv * (1j * ssgn * (S @ gt) + sgn * (D @ gp))
        return VshCoeffs(L, data)

    def synthesize(self, coeffs: VshCoeffs) -> np.ndarray:
        """Cartesian samples of the tangential field on the grid nodes.

        The shared ln_scale is NOT applied; callers carry it separately.
        """
        ft, fp = self.synthesize_components(coeffs)
        g = self.grid
        return ft[:, None] * g.theta_hat + fp[:, None] * g.phi_hat

    def synthesize_components(self, coeffs: VshCoeffs):
        L, g = self.L, self.grid
        if coeffs.L != L:
            raise ValueError("coefficient degree does not match the grid")
        Gt = np.zeros((g.n_theta, g.n_phi), dtype=complex)
        Gp = np.zeros_like(Gt)
        for m in range(-L, L + 1):
            am = abs(m)
            lmin = max(1, am)
            cu = coeffs.data[POL_U, lmin:, m + L] * self.inv_sqrt_ll[lmin:]
            cv = coeffs.data[POL_V, lmin:, m + L] * self.inv_sqrt_ll[lmin:]
            if not (np.any(cu) or np.any(cv)):
                continue
            D = self.D3[lmin:, am, :]
            S = self.S3[lmin:, am, :]
            sgn = -1.0 if (m < 0 and am % 2) else 1.0
            ssgn = sgn if m >= 0 else -sgn
            col = m % g.n_phi
            Gt[:, col] += sgn * (cu @ D) - 1j * ssgn * (cv @ S)
            Gp[:, col] += 1j * ssgn * (cu @ S) + sgn * (cv @ D)
        return self._ifft_modes(Gt), self._ifft_modes(Gp)

    # ---- scalar transform (radial components, surface divergences) ----

    def analyze_scalar(self, values: np.ndarray) -> np.ndarray:
        """Scalar Y_lm coefficients, shape (L+1, 2L+1)."""
        L, g = self.L, self.grid
        F = self._fft_modes(np.asarray(values, dtype=complex))
        w = self.grid.gl_weights
        out = np.zeros((L + 1, 2 * L + 1), dtype=complex)
        for m in range(-L, L + 1):
            am = abs(m)
            gv = w * F[:, m % g.n_phi]
            sgn = -1.0 if (m < 0 and am % 2) else 1.0
            out[am:, m + L] = sgn * (self.P3[am:, am, :] @ gv)
        return out

    def synth_scalar(self, carr: np.ndarray) -> np.ndarray:
        L, g = self.L, self.grid
        G = np.zeros((g.n_theta, g.n_phi), dtype=complex)
        for m in range(-L, L + 1):
            am = abs(m)
            c = carr[am:, m + L]
            if not np.any(c):
                continue
            sgn = -1.0 if (m < 0 and am % 2) else 1.0
            G[:, m % g.n_phi] += sgn * (c @ self.P3[am:, am, :])
        return self._ifft_modes(G)

    def synth_vector(self, c_radial: np.ndarray | None, coeffs: VshCoeffs | None) -> np.ndarray:
        """Full vector field: radial Y_lm part plus tangential part."""
        g = self.grid
        out = np.zeros((g.n_nodes, 3), dtype=complex)
        if coeffs is not None:
            out += self.synthesize(coeffs)
        if c_radial is not None:
            out += self.synth_scalar(c_radial)[:, None] * g.r_hat
        return out


@functools.lru_cache(maxsize=8)
def get_transform(L: int) -> VshTransform:
    """Memoized transform on the canonical degree-L grid."""
    return VshTransform(sphere_quadrature(L))


def vsh_analyze(samples: np.ndarray, grid: SphereGrid, tangent_tol: float = 1e-10) -> VshCoeffs:
    """Module-level analysis entry point (transform cached per degree)."""
    tr = get_transform(grid.max_degree)
    if tr.grid.n_nodes != grid.n_nodes:
        tr = VshTransform(grid)
    return tr.analyze(samples, tangent_tol=tangent_tol)


def vsh_synthesize(coeffs: VshCoeffs, grid: SphereGrid) -> np.ndarray:
    tr = get_transform(grid.max_degree)
    if tr.grid.n_nodes != grid.n_nodes:
        tr = VshTransform(grid)
    return tr.synthesize(coeffs)


def synth_modes_at_points(points_unit: np.ndarray, L: int,
                          cP=None, cU=None, cV=None,
                          rfP=None, rfU=None, rfV=None) -> np.ndarray:
    """Evaluate sum_lm of radial-factored VSH modes at scattered points.

    points_unit: (N, 3) unit vectors.  cX: coefficient arrays (L+1, 2L+1)
    for the P/U/V patterns; rfX: matching radial factors (L+1, N) (for a
    pure angular evaluation pass ones).  Memory O(L N); intended for modest
    N -- shell-structured evaluations should go through VshTransform.
    """
    pts = np.asarray(points_unit, dtype=float)
    n = len(pts)
    x, y, z = pts[:, 0], pts[:, 1], pts[:, 2]
    st = np.hypot(x, y)
    ct = z
    if np.any(st < 1e-13):
        st = np.maximum(st, 1e-13)   # polar nudge; basis is coordinate-singular there
    phi = np.arctan2(y, x)
    cot = ct / st

    r_hat = pts
    theta_hat = np.stack([ct * np.cos(phi), ct * np.sin(phi), -st], axis=1)
    phi_hat = np.stack([-np.sin(phi), np.cos(phi), np.zeros(n)], axis=1)

    eip = np.exp(1j * phi)
    phases = np.empty((L + 1, n), dtype=complex)   # e^{i m phi}, m >= 0
    phases[0] = 1.0
    for m in range(1, L + 1):
        phases[m] = phases[m - 1] * eip

    # diagonal ALP seeds
    diag = np.empty((L + 1, n))
    diag[0] = _INV_SQRT4PI
    for m in range(1, L + 1):
        diag[m] = -math.sqrt((2 * m + 1.0) / (2 * m)) * st * diag[m - 1]

    fr = np.zeros(n, dtype=complex)
    fth = np.zeros(n, dtype=complex)
    fph = np.zeros(n, dtype=complex)

    Pm2 = np.zeros((L + 2, n))   # row l-2, padded one order in m
    Pm1 = np.zeros((L + 2, n))   # row l-1
    for l in range(0, L + 1):
        Prow = np.zeros((L + 2, n))
        Prow[l] = diag[l]
        if l >= 1:
            Prow[l - 1] = math.sqrt(2.0 * l + 1.0) * ct * diag[l - 1]
        for m in range(0, l - 1):
            a = math.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
            b = math.sqrt(((2.0 * l + 1.0) * ((l - 1.0) ** 2 - m * m))
                          / ((2.0 * l - 3.0) * (l * l - m * m)))
            Prow[m] = a * ct * Pm1[m] - b * Pm2[m]

        if l >= 1 or cP is not None:
            inv = 1.0 / math.sqrt(l * (l + 1.0)) if l >= 1 else 0.0
            for m in range(0, l + 1):
                D = m * cot * Prow[m]
                if m + 1 <= l:
                    D = D + math.sqrt((l - m) * (l + m + 1.0)) * Prow[m + 1]
                S = m * Prow[m] / st if m else np.zeros(n)
                for mm in (m, -m) if m else (0,):
                    sgn = -1.0 if (mm < 0 and m % 2) else 1.0
                    ssgn = sgn if mm >= 0 else -sgn
                    ph = phases[m] if mm >= 0 else np.conj(phases[m])
                    if cP is not None and cP[l, mm + L] != 0.0:
                        fr += cP[l, mm + L] * (rfP[l] if rfP is not None else 1.0) \
                            * sgn * Prow[m] * ph
                    if l >= 1 and cU is not None and cU[l, mm + L] != 0.0:
                        w = cU[l, mm + L] * (rfU[l] if rfU is not None else 1.0) * inv * ph
                        fth += w * sgn * D
                        fph += w * 1j * ssgn * S
                    if l >= 1 and cV is not None and cV[l, mm + L] != 0.0:
                        w = cV[l, mm + L] * (rfV[l] if rfV is not None else 1.0) * inv * ph
                        fth += w * (-1j) * ssgn * S
                        fph += w * sgn * D
        Pm2, Pm1 = Pm1, Prow

    return (fr[:, None] * r_hat + fth[:, None] * theta_hat
            + fph[:, None] * phi_hat)
