"""The inverse reduced resolvent alpha(z) and the resonance pole.

On the physical sheet

    alpha_I(z) = z - omega_bare - lam^2 * int_0^inf g2(w) / (z - w) dw

is analytic off the cut [0, inf).  Its boundary values from above/below are

    alpha_pm(w) = w - omega_bare - lam^2 PV int g2(w')/(w - w') dw'
                  +- i pi lam^2 g2(w).

Continuing alpha_plus through the cut into the lower half-plane picks up the
residue of the integrand, giving the second-sheet function

    alpha_II(z) = alpha_I(z) + 2*pi*i * lam^2 * g2(z),

whose boundary value from below equals alpha_plus(w); the sign is fixed by
that continuity requirement (and by the second-order pole estimate, which
must land in the lower half-plane).  The resonance is the zero z0 of
alpha_II with Im z0 < 0.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import NoConvergence, OnCut, PoleInUpperHalfPlane
from .model import (
    ModelParams,
    QuadConfig,
    spectral_weight,
    spectral_weight_analytic,
    spectral_weight_derivative,
)
from .quadrature import adaptive_complex_quad, pv_integral_many

__all__ = [
    "Sheet",
    "Side",
    "SheetPoint",
    "Resonance",
    "alpha",
    "alpha_boundary",
    "principal_value",
    "perturbative_resonance",
    "find_resonance",
]


class Sheet(enum.Enum):
    PHYSICAL_I = "I"
    SECOND_II = "II"


class Side(enum.Enum):
    PLUS = "+"
    MINUS = "-"


@dataclass(frozen=True)
class SheetPoint:
    """A complex frequency tagged with the Riemann sheet it lives on."""

    z: complex
    sheet: Sheet = Sheet.PHYSICAL_I

    def __post_init__(self):
        if self.sheet is Sheet.SECOND_II and self.z.imag > 0:
            raise ValueError("second-sheet points must have Im z <= 0")


@dataclass(frozen=True)
class Resonance:
    """Resonance pole z0 = omega0 - i*gamma/2 and the residue denominator."""

    z0: complex
    alpha_prime_at_pole: complex
    perturbative_z0: complex
    newton_iterations: int
    residual: float

    @property
    def omega0(self) -> float:
        return self.z0.real

    @property
    def gamma(self) -> float:
        return -2.0 * self.z0.imag


def _resolvent_integral(model: ModelParams, z: complex, quad_cfg: QuadConfig,
                        abs_tol: float | None = None) -> complex:
    """int_0^T g2(w)/(z - w) dw by adaptive quadrature, z off the cut.

    When Re z lies inside the integration range the value of g2 there is
    subtracted and integrated back in closed form, so the integrand stays
    bounded however close z comes to the cut.
    """
    T = quad_cfg.truncation(model)
    c = z.real
    if 0.0 < c < T:
        b = abs(z.imag)
        if b < 1e-9 * max(1.0, abs(c)):
            # boundary-value limit; approaching from below unless told otherwise
            side = 1.0 if z.imag <= 0.0 else -1.0
            pv = float(pv_integral_many(model, c, quad_cfg))
            return pv + side * 1j * math.pi * spectral_weight(model, c)
        g2c = spectral_weight(model, c)
        g2p = complex(spectral_weight_derivative(model, complex(c, 0.0))).real
        pts = sorted({min(max(p, T * 1e-12), T * (1 - 1e-12))
                      for p in (c - 10 * b, c, c + 10 * b)})
        smooth = adaptive_complex_quad(
            lambda w: (spectral_weight(model, w) - g2c - g2p * (w - c)) / (z - w),
            0.0, T, quad_cfg, points=pts, abs_tol=abs_tol,
        )
        # int_0^T dw/(z-w) = ln z - ln(z-T); Im z != 0 keeps one branch
        log_term = np.log(complex(z)) - np.log(complex(z - T))
        linear = 1j * z.imag * log_term - T
        return smooth + g2c * log_term + g2p * linear
    return adaptive_complex_quad(
        lambda w: spectral_weight(model, w) / (z - w), 0.0, T, quad_cfg,
        points=None, abs_tol=abs_tol,
    )


def alpha(model: ModelParams, point: SheetPoint, quad_cfg: QuadConfig | None = None,
          abs_tol: float | None = None) -> complex:
    """Evaluate alpha on the requested sheet at a point off the cut."""
    quad_cfg = quad_cfg or QuadConfig()
    z = complex(point.z)
    if z.imag == 0.0 and z.real >= 0.0:
        raise OnCut("alpha is discontinuous on [0, inf); use alpha_boundary")
    value = z - model.omega_bare - model.lam**2 * _resolvent_integral(model, z, quad_cfg, abs_tol)
    if point.sheet is Sheet.SECOND_II:
        value += 2j * math.pi * model.lam**2 * spectral_weight_analytic(model, z)
    return value


def alpha_boundary(model: ModelParams, omega: float, side: Side = Side.PLUS,
                   quad_cfg: QuadConfig | None = None) -> complex:
    """Boundary value alpha_pm(omega) on the cut, 0 < omega < truncation."""
    quad_cfg = quad_cfg or QuadConfig()
    pv = pv_integral_many(model, float(omega), quad_cfg)
    real = omega - model.omega_bare - model.lam**2 * pv
    imag = math.pi * model.lam**2 * spectral_weight(model, float(omega))
    return complex(real, imag if side is Side.PLUS else -imag)


def principal_value(model: ModelParams, omega: float,
                    quad_cfg: QuadConfig | None = None) -> float:
    """PV int_0^T g2(w')/(omega - w') dw' by singularity subtraction."""
    quad_cfg = quad_cfg or QuadConfig()
    return float(pv_integral_many(model, float(omega), quad_cfg))


def perturbative_resonance(model: ModelParams, quad_cfg: QuadConfig | None = None) -> complex:
    """Second-order pole estimate: omega_bare + shift - i * golden-rule rate / 2.

    The real shift is lam^2 PV int g2/(omega_bare - w) dw and the width is
    gamma = 2 pi lam^2 g2(omega_bare).
    """
    quad_cfg = quad_cfg or QuadConfig()
    if model.lam == 0.0:
        return complex(model.omega_bare, 0.0)
    shift = model.lam**2 * pv_integral_many(model, model.omega_bare, quad_cfg)
    half_width = math.pi * model.lam**2 * spectral_weight(model, model.omega_bare)
    return complex(model.omega_bare + shift, -half_width)


def _alpha_second(model: ModelParams, z: complex, quad_cfg: QuadConfig,
                  abs_tol: float) -> complex:
    base = z - model.omega_bare - model.lam**2 * _resolvent_integral(model, z, quad_cfg, abs_tol)
    return base + 2j * math.pi * model.lam**2 * spectral_weight_analytic(model, z)


def _resolvent_second_moment(model: ModelParams, z: complex, quad_cfg: QuadConfig,
                             abs_tol: float) -> complex:
    """int_0^T g2(w)/(z - w)^2 dw with two-term subtraction near the cut."""
    T = quad_cfg.truncation(model)
    c = z.real
    if not (0.0 < c < T):
        return adaptive_complex_quad(
            lambda w: spectral_weight(model, w) / (z - w) ** 2, 0.0, T, quad_cfg,
            abs_tol=abs_tol,
        )
    b = abs(z.imag)
    if b < 1e-9 * max(1.0, abs(c)):
        # -d/dz of the boundary value: finite-part derivative of the PV
        side = 1.0 if z.imag <= 0.0 else -1.0
        h = 1e-5 * max(1.0, abs(c))
        pv_prime = (float(pv_integral_many(model, c + h, quad_cfg))
                    - float(pv_integral_many(model, c - h, quad_cfg))) / (2.0 * h)
        g2p_c = complex(spectral_weight_derivative(model, complex(c, 0.0))).real
        return -(pv_prime + side * 1j * math.pi * g2p_c)
    g2c = spectral_weight(model, c)
    g2p = complex(spectral_weight_derivative(model, complex(c, 0.0))).real
    b = abs(z.imag)
    pts = sorted({min(max(p, T * 1e-12), T * (1 - 1e-12))
                  for p in (c - 10 * b, c, c + 10 * b)})
    smooth = adaptive_complex_quad(
        lambda w: (spectral_weight(model, w) - g2c - g2p * (w - c)) / (z - w) ** 2,
        0.0, T, quad_cfg, points=pts, abs_tol=abs_tol,
    )
    log_term = np.log(complex(z)) - np.log(complex(z - T))
    inv_term = 1.0 / (z - T) - 1.0 / z
    # int (w-c)/(z-w)^2 dw with z = c + i b
    linear = 1j * z.imag * inv_term - log_term
    return smooth + g2c * inv_term + g2p * linear


def _alpha_second_prime(model: ModelParams, z: complex, quad_cfg: QuadConfig,
                        abs_tol: float) -> complex:
    """Derivative of the continued alpha: 1 + lam^2 int g2/(z-w)^2 dw + 2*pi*i lam^2 g2'(z)."""
    integral = _resolvent_second_moment(model, z, quad_cfg, abs_tol)
    return 1.0 + model.lam**2 * integral + 2j * math.pi * model.lam**2 * spectral_weight_derivative(model, z)


def _muller(f, x0: complex, x1: complex, x2: complex, tol: float, max_iter: int):
    """Muller iteration; returns (root, |f(root)|, evaluations)."""
    xs = [x0, x1, x2]
    fs = [f(x) for x in xs]
    best = min(zip(xs, fs), key=lambda p: abs(p[1]))
    for it in range(max_iter):
        (xa, xb, xc), (fa, fb, fc) = xs, fs
        if abs(fc) < tol:
            return xc, abs(fc), it
        q = (xc - xb) / (xb - xa)
        a = q * fc - q * (1 + q) * fb + q**2 * fa
        b = (2 * q + 1) * fc - (1 + q) ** 2 * fb + q**2 * fa
        c = (1 + q) * fc
        disc = np.sqrt(complex(b * b - 4 * a * c))
        den = b + disc if abs(b + disc) >= abs(b - disc) else b - disc
        if den == 0:
            break
        xn = xc - (xc - xb) * (2 * c / den)
        fn = f(xn)
        xs = [xb, xc, xn]
        fs = [fb, fc, fn]
        if abs(fn) < abs(best[1]):
            best = (xn, fn)
    return best[0], abs(best[1]), max_iter


def find_resonance(model: ModelParams, quad_cfg: QuadConfig | None = None,
                   tol: float = 1e-12, max_iter: int = 50) -> Resonance:
    """Locate the second-sheet zero of alpha by Newton from the perturbative seed.

    Falls back to Muller's method on a small triangle around the seed when
    Newton stalls.  Raises :class:`NoConvergence` with both residuals if the
    fallback also fails, and :class:`PoleInUpperHalfPlane` when the root is
    not a decaying resonance (which also covers the non-analytic real-root
    regime excluded by the positivity condition).
    """
    quad_cfg = quad_cfg or QuadConfig()
    if model.lam <= 0.0:
        raise NoConvergence("find_resonance requires a nonzero coupling")
    inner_tol = min(quad_cfg.abs_tol, tol / 20.0)
    seed = perturbative_resonance(model, quad_cfg)

    def f(z: complex) -> complex:
        return _alpha_second(model, z, quad_cfg, inner_tol)

    z = seed
    newton_res = math.inf
    iterations = 0
    for it in range(max_iter):
        fz = f(z)
        newton_res = abs(fz)
        iterations = it
        if newton_res < tol:
            break
        fpz = _alpha_second_prime(model, z, quad_cfg, inner_tol)
        step = fz / fpz
        if not np.isfinite(step):
            break
        z = z - step
    else:
        fz = f(z)
        newton_res = abs(fz)
        iterations = max_iter

    if newton_res >= tol:
        spread = max(abs(seed.imag), 1e-3 * abs(seed), 1e-6)
        x0 = seed + spread
        x1 = seed - spread * 0.5 + 0.75j * spread
        x2 = seed - spread * 0.5 - 0.75j * spread
        z_m, muller_res, _ = _muller(f, x0, x1, x2, tol, max_iter)
        if muller_res < tol:
            z, newton_res = z_m, muller_res
        else:
            raise NoConvergence(
                f"Newton residual {newton_res:.3g} and Muller residual {muller_res:.3g} "
                f"both exceed tol={tol:.3g} after {max_iter} iterations"
            )

    if z.imag >= 0.0:
        raise PoleInUpperHalfPlane(
            f"continued resolvent zero at {z} is not a decaying resonance"
        )
    prime = _alpha_second_prime(model, z, quad_cfg, inner_tol)
    return Resonance(
        z0=complex(z),
        alpha_prime_at_pole=complex(prime),
        perturbative_z0=complex(seed),
        newton_iterations=iterations,
        residual=float(newton_res),
    )


def _alpha_second_fixed(model: ModelParams, z: complex, quad_cfg: QuadConfig) -> complex:
    """alpha_II by a fixed graded-panel rule; cheap enough for dense scans.

    Panels shrink toward Re z down to a third of the distance from the cut,
    which keeps the rule accurate to ~1e-12 for the scan's purposes.
    """
    from .quadrature import gauss_panels, graded_boundaries

    T = quad_cfg.truncation(model)
    c = min(max(z.real, 0.0), T)
    b = max(abs(z.imag), 1e-9)
    coarse = model.cutoff / 2.5

    def width(x):
        return min(coarse, max(abs(x - c) / 3.0, b / 3.0), max(x / 2.0, 1e-4 * model.cutoff))

    nodes, wq = gauss_panels(graded_boundaries(0.0, T, width), 24)
    integral = np.sum(wq * spectral_weight(model, nodes) / (z - nodes))
    return (z - model.omega_bare - model.lam**2 * integral
            + 2j * math.pi * model.lam**2 * spectral_weight_analytic(model, z))


def grid_refine_resonance(model: ModelParams, quad_cfg: QuadConfig | None = None,
                          half_width: float = 0.05, grid: int = 21) -> complex:
    """Derivative-free pole search: |alpha_II| grid scans that zoom onto the
    minimum, then a Nelder-Mead polish.  Kept deliberately independent of
    the Newton path so the two can cross-check each other.
    """
    quad_cfg = quad_cfg or QuadConfig()
    seed = perturbative_resonance(model, quad_cfg)

    def objective(p):
        return abs(_alpha_second_fixed(model, complex(p[0], p[1]), quad_cfg))

    center = np.array([seed.real, seed.imag])
    span = half_width
    for _ in range(3):
        xs = np.linspace(center[0] - span, center[0] + span, grid)
        ys = np.linspace(center[1] - span, center[1] + span, grid)
        vals = np.array([[objective((x, y)) for x in xs] for y in ys])
        iy, ix = np.unravel_index(np.argmin(vals), vals.shape)
        center = np.array([xs[ix], ys[iy]])
        span /= 8.0
    res = minimize(objective, center, method="Nelder-Mead",
                   options={"xatol": 1e-13, "fatol": 1e-16, "maxiter": 500})
    return complex(res.x[0], res.x[1])
