"""Complex geometrical optics probes for the Maxwell pair.

The probe family is E0 = eta exp(tau (x.rho - t) + i sqrt(tau^2+k^2) x.rho_perp),
H0 = theta * (same exponential), built from the complex wave vector
zeta = -i tau rho + sqrt(tau^2 + k^2) rho_perp (zeta . zeta = k^2).  Two
parameter regimes are used: one with |eta| growing like tau (impenetrable
probing) and the converse with |theta| ~ tau (penetrable probing).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import QuadratureUnderResolved
from .mathkit import Frame, ScaledVector, build_frame, scaled, sphere_quadrature


class CgoMode(enum.Enum):
    IMPENETRABLE = "impenetrable"   # a = sqrt(2) rho_perp, b = rho x rho_perp
    PENETRABLE = "penetrable"       # a = rho x rho_perp,   b = conj(zeta)/|zeta|


@dataclass(frozen=True, eq=False)
class CgoProbe:
    """A fully derived probe: direction frame, amplitudes and symbol vectors.

    Invariants (all enforced by the constructor up to roundoff):
      zeta.zeta = k^2,  zeta.eta = zeta.theta = 0,
      zeta x eta = k theta,  zeta x theta = -k eta.
    """

    k: float
    tau: float
    t: float
    frame: Frame
    mode: CgoMode
    zeta: np.ndarray      # complex 3-vector
    a: np.ndarray         # real 3-vector
    b: np.ndarray         # complex 3-vector
    eta: np.ndarray       # complex amplitude of E0
    theta: np.ndarray     # complex amplitude of H0

    @property
    def phase_wavenumber(self) -> float:
        """sqrt(tau^2 + k^2), the oscillation rate along rho_perp."""
        return math.sqrt(self.tau**2 + self.k**2)

    def with_t(self, t: float) -> "CgoProbe":
        return CgoProbe(self.k, self.tau, t, self.frame, self.mode,
                        self.zeta, self.a, self.b, self.eta, self.theta)


def make_zeta(k: float, tau: float, frame: Frame) -> np.ndarray:
    """zeta = -i tau rho + sqrt(tau^2 + k^2) rho_perp."""
    if k <= 0.0 or tau <= 0.0:
        raise ValueError("k and tau must be positive")
    return -1j * tau * frame.rho + math.sqrt(tau**2 + k**2) * frame.rho_perp


def build_probe(k: float, tau: float, t: float, rho, mode: CgoMode) -> CgoProbe:
    """Construct a probe for direction rho (frame completed deterministically)."""
    frame = rho if isinstance(rho, Frame) else build_frame(rho)
    zeta = make_zeta(k, tau, frame)
    zabs = math.sqrt(2.0 * tau**2 + k**2)   # |zeta| (Euclidean on C^3)
    if mode is CgoMode.IMPENETRABLE:
        a = math.sqrt(2.0) * frame.rho_perp
        b = frame.rho_cross.astype(complex)
    elif mode is CgoMode.PENETRABLE:
        a = frame.rho_cross.copy()
        b = np.conj(zeta) / zabs
    else:
        raise ValueError(f"unknown mode {mode!r}")
    eta = (-(zeta @ a) * zeta - k * np.cross(zeta, b) + k**2 * a) / zabs
    theta = (k * np.cross(zeta, a) - (zeta @ b) * zeta + k**2 * b) / zabs
    return CgoProbe(k=float(k), tau=float(tau), t=float(t), frame=frame,
                    mode=mode, zeta=zeta, a=np.asarray(a, dtype=float),
                    b=np.asarray(b, dtype=complex), eta=eta, theta=theta)


# ---------------------------------------------------------------------------
# evaluation


def _phase_parts(probe: CgoProbe, x: np.ndarray):
    """(real exponent tau(x.rho - t), oscillatory phase) at points x."""
    xr = x @ probe.frame.rho
    xp = x @ probe.frame.rho_perp
    return probe.tau * (xr - probe.t), probe.phase_wavenumber * xp


def eval_cgo(probe: CgoProbe, x) -> tuple[ScaledVector, ScaledVector]:
    """(E0, H0) at a single point, in scaled (mantissa, exponent) form.

    curl E0 = ik H0 and curl H0 = -ik E0 hold because curl acts as
    (i zeta) wedge on this family.
    """
    x = np.asarray(x, dtype=float)
    expo, phase = _phase_parts(probe, x)
    osc = complex(math.cos(phase), math.sin(phase))
    return (ScaledVector.build(probe.eta * osc, expo),
            ScaledVector.build(probe.theta * osc, expo))


def eval_cgo_batch(probe: CgoProbe, xs: np.ndarray, peel: float):
    """Mantissa fields at many points with a common peeled exponent.

    Returns (E0m, H0m) of shape (N, 3); the true fields are these times
    exp(peel).  Pick peel >= max tau(x.rho - t) to keep mantissas bounded.
    """
    xs = np.asarray(xs, dtype=float)
    expo, phase = _phase_parts(probe, xs)
    factor = np.exp(expo - peel + 1j * phase)
    return probe.eta[None, :] * factor[:, None], probe.theta[None, :] * factor[:, None]


def curl_amplitudes(probe: CgoProbe) -> tuple[np.ndarray, np.ndarray]:
    """Vector amplitudes of (curl E0, curl H0): (i zeta) x eta|theta."""
    return 1j * np.cross(probe.zeta, probe.eta), 1j * np.cross(probe.zeta, probe.theta)


def cgo_identity_defect(probe: CgoProbe) -> float:
    """Worst relative defect over the probe's algebraic invariants.

    Each identity is normalized by its own cancellation scale (|zeta|^2 for
    zeta.zeta - k^2, |zeta| |eta| for transversality and curl products):
    that is the precision doubles can deliver once tau >> k.
    """
    k = probe.k
    zabs = float(np.linalg.norm(probe.zeta))
    eabs = float(np.linalg.norm(probe.eta))
    tabs = float(np.linalg.norm(probe.theta))
    defect = abs(probe.zeta @ probe.zeta - k * k) / (zabs * zabs)
    defect = max(defect, abs(probe.zeta @ probe.eta) / (zabs * eabs))
    defect = max(defect, abs(probe.zeta @ probe.theta) / (zabs * tabs))
    defect = max(defect,
                 float(np.max(np.abs(np.cross(probe.zeta, probe.eta) - k * probe.theta)))
                 / (zabs * eabs + k * tabs))
    defect = max(defect,
                 float(np.max(np.abs(np.cross(probe.zeta, probe.theta) + k * probe.eta)))
                 / (zabs * tabs + k * eabs))
    return defect


# ---------------------------------------------------------------------------
# volume norms over a ball (Lq integrals feeding the asymptotic checks)


def _ball_lq_integrals(probe: CgoProbe, center, radius, q, n_radial, ang_degree):
    """Integral of |amp|^q exp(q tau (x.rho - t)) over the ball, peeled.

    Returns (ln of the common peel, weight integral) where the true value
    is weight * exp(q * peel_ln) * |amp|^q for each amplitude.
    """
    grid = sphere_quadrature(ang_degree)
    rx, rw = np.polynomial.legendre.leggauss(n_radial)
    rr = 0.5 * radius * (rx + 1.0)
    rw = 0.5 * radius * rw
    center = np.asarray(center, dtype=float)
    peel = probe.tau * (center @ probe.frame.rho + radius - probe.t)

    total = 0.0
    for r, wr in zip(rr, rw):
        pts = center[None, :] + r * grid.nodes
        expo = probe.tau * (pts @ probe.frame.rho - probe.t) - peel
        total += wr * r * r * float(np.sum(grid.weights * np.exp(q * expo)))
    return peel, total


def cgo_volume_norms(probe: CgoProbe, ball, q: float = 2.0,
                     n_radial: int | None = None, check: bool = True):
    """L^q norms of (E0, H0, curl H0) over a ball, as scaled reals.

    ball = (center, radius).  The exponential weight is peeled at the ball's
    maximal x.rho so the quadrature runs on mantissas <= 1.  curl H0 is the
    analytic symbol (i zeta) x theta times the same exponential.

    Raises QuadratureUnderResolved when doubling the radial rule moves the
    weight integral by more than 1e-6 relative.
    """
    if q < 1.0:
        raise ValueError("q must be >= 1")
    center, radius = ball
    if radius <= 0.0:
        raise ValueError("ball radius must be positive")
    if n_radial is None:
        n_radial = max(24, int(math.ceil(0.6 * q * probe.tau * radius)) + 10)
    ang_degree = max(8, int(math.ceil(0.55 * q * probe.tau * radius)) + 8)

    peel, w = _ball_lq_integrals(probe, center, radius, q, n_radial, ang_degree)
    if check:
        _, w2 = _ball_lq_integrals(probe, center, radius, q, 2 * n_radial, ang_degree)
        if abs(w2 - w) > 1e-6 * abs(w2):
            raise QuadratureUnderResolved(
                f"radial doubling changed the weight by {abs(w2 - w) / abs(w2):.2e}")
        w = w2

    _, curl_h = curl_amplitudes(probe)
    out = []
    for amp in (probe.eta, probe.theta, curl_h):
        amp_norm = float(np.linalg.norm(amp))
        # ||f||_q = |amp| * (weight)^{1/q} * exp(peel)
        ln_norm = math.log(amp_norm) + math.log(w) / q + peel
        out.append(scaled(1.0, ln_norm))
    return tuple(out)


__all__ = ["CgoMode", "CgoProbe", "make_zeta", "build_probe", "eval_cgo",
           "eval_cgo_batch", "curl_amplitudes", "cgo_identity_defect",
           "cgo_volume_norms"]
