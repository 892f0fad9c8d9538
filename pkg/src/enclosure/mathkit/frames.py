"""Orthonormal direction triads (rho, rho_perp, rho x rho_perp)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ZeroVector


@dataclass(frozen=True, eq=False)
class Frame:
    """Right-handed orthonormal triad completing a probe direction rho.

    The completion rule is deterministic: rho_perp is derived from the
    canonical axis least aligned with rho (ties broken x < y < z), so
    repeated sweeps see identical frames.
    """

    rho: np.ndarray
    rho_perp: np.ndarray
    rho_cross: np.ndarray


_AXES = np.eye(3)


def build_frame(rho) -> Frame:
    """Complete a unit direction into an orthonormal Frame.

    Raises ZeroVector if |rho| < 1e-12.  The input is renormalized, so a
    vector within 1e-12 of unit length is accepted as is.
    """
    rho = np.asarray(rho, dtype=float)
    norm = float(np.linalg.norm(rho))
    if norm < 1e-12:
        raise ZeroVector("direction vector has zero norm")
    rho = rho / norm
    # np.argmin returns the first minimum, which is exactly the x<y<z tie rule
    axis = _AXES[int(np.argmin(np.abs(rho)))]
    perp = np.cross(axis, rho)
    perp /= np.linalg.norm(perp)
    cross = np.cross(rho, perp)
    return Frame(rho=rho, rho_perp=perp, rho_cross=cross)
