"""Precomputed quadrature tables for the two survival-amplitude routes.

Both routes reduce the amplitude to a weighted node sum, so a dense time
grid costs one complex exponential per node per time:

* :class:`SpectralTable` holds real-axis nodes carrying the nonnegative
  weight lam^2 g2(w) / |alpha_plus(w)|^2.  Panel widths are capped by three
  competing scales: the resonance peak (Lorentzian-like, half-width
  eta / X'), the coupling-density scale, and the phase budget at the largest
  requested time.  When the peak half-width drops below float resolution of
  the node positions (tiny couplings), an inner window around the peak
  switches to offset-based nodes with a local quadratic model of the real
  part, which stays exact where direct evaluation would suffer total
  cancellation.

* :class:`RayTable` holds nodes on the rotated ray z = s * exp(-i*theta)
  carrying the deformed background integrand
  lam^2 g2(z) / (alpha_I(z) alpha_II(z)).  On the ray the Gaussian factor of
  g2 decays like exp(-s^2 cos(2 theta)/cutoff^2) and the time factor like
  exp(-s t sin(theta)), so the angle must stay below pi/4 for the table to
  truncate at t = 0; the default angle pi/5 keeps both decay channels open.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import OscillationUnderResolved, PoleOnRay, QuadratureFailure
from .model import ModelParams, QuadConfig, spectral_weight, spectral_weight_analytic
from .quadrature import MasterGrid, gauss_panels, graded_boundaries, master_grid, pv_integral_many

DEFAULT_RAY_ANGLE = math.pi / 5.0

__all__ = ["SpectralTable", "RayTable", "build_spectral_table", "build_ray_table",
           "DEFAULT_RAY_ANGLE", "AxisProfile", "axis_profile"]


@dataclass(frozen=True)
class AxisProfile:
    """Local description of the resonance peak on the real axis.

    omega0 solves X(omega0) = 0 where X is the real part of the boundary
    value alpha_plus; eta = pi lam^2 g2(omega0) is the half-width of the
    imaginary part, and halfwidth = eta / X' the peak scale in frequency.
    """

    omega0: float
    xprime: float
    xsecond: float
    eta: float

    @property
    def halfwidth(self) -> float:
        return self.eta / self.xprime


def axis_profile(model: ModelParams, quad_cfg: QuadConfig,
                 grid: MasterGrid | None = None) -> AxisProfile:
    if model.lam == 0.0:
        raise ValueError("axis profile is undefined for a decoupled oscillator")
    grid = grid or master_grid(model, quad_cfg)
    T = grid.T

    def x_of(w):
        return w - model.omega_bare - model.lam**2 * pv_integral_many(model, w, quad_cfg, grid)

    lo = 1e-6 * model.cutoff
    hi = T - 1e-6 * model.cutoff
    flo, fhi = x_of(lo), x_of(hi)
    if not (flo < 0 < fhi):
        raise QuadratureFailure(
            "could not bracket the resonance position on the real axis; "
            "the oscillator frequency may exceed the truncated bath range"
        )
    omega0 = brentq(x_of, lo, hi, xtol=1e-15, rtol=8.9e-16)
    h = 1e-5 * max(1.0, omega0)
    xp = (x_of(omega0 + h) - x_of(omega0 - h)) / (2.0 * h)
    h2 = 1e-4 * max(1.0, omega0)
    xs = (x_of(omega0 + h2) - 2.0 * x_of(omega0) + x_of(omega0 - h2)) / h2**2
    eta = math.pi * model.lam**2 * spectral_weight(model, omega0)
    return AxisProfile(omega0=float(omega0), xprime=float(xp), xsecond=float(xs), eta=float(eta))


@dataclass
class SpectralTable:
    """Fixed nodes/weights such that amplitude(t) = sum w_j exp(-i x_j t)."""

    nodes: np.ndarray
    weights: np.ndarray
    t_max: float
    profile: AxisProfile
    sum_defect: float = field(init=False)

    def __post_init__(self):
        self.sum_defect = float(self.weights.sum() - 1.0)

    def amplitude(self, times) -> np.ndarray:
        t = np.atleast_1d(np.asarray(times, dtype=float))
        if t.size and t.max() > self.t_max * (1.0 + 1e-9) + 1e-30:
            raise OscillationUnderResolved(
                f"table resolves phases up to t={self.t_max:.6g}, requested {t.max():.6g}"
            )
        out = np.empty(t.shape, dtype=complex)
        chunk = max(1, int(4_000_000 // max(self.nodes.size, 1)))
        for i in range(0, t.size, chunk):
            phase = np.exp(-1j * np.outer(t[i:i + chunk], self.nodes))
            out[i:i + chunk] = phase @ self.weights
        return out

    def moment(self, k: int) -> float:
        """k-th frequency moment of the spectral measure carried by the table."""
        return float(np.sum(self.weights * self.nodes**k))


def _estimate_nodes(T: float, t_max: float, nodes_per_panel: int, rad_per_node: float) -> int:
    phase_panels = 0 if t_max <= 0 else T * t_max / (rad_per_node * nodes_per_panel)
    return int(nodes_per_panel * (phase_panels + 400))


def build_spectral_table(model: ModelParams, quad_cfg: QuadConfig, t_max: float,
                         *, nodes_per_panel: int = 24, rad_per_node: float = 0.8,
                         max_nodes: int = 500_000, inner_cut: float = 1e-5,
                         inner_span: float = 1e4) -> SpectralTable:
    """Build the real-axis weight table resolving phases up to ``t_max``."""
    if model.lam == 0.0:
        raise ValueError("spectral table is undefined for a decoupled oscillator")
    grid = master_grid(model, quad_cfg)
    T = grid.T
    if _estimate_nodes(T, t_max, nodes_per_panel, rad_per_node) > max_nodes:
        raise OscillationUnderResolved(
            f"resolving t_max={t_max:.4g} over [0,{T:.3g}] needs more than {max_nodes} nodes; "
            "raise the cap or shorten the requested time span"
        )
    prof = axis_profile(model, quad_cfg, grid)
    om0, halfw = prof.omega0, prof.halfwidth
    h_phase = math.inf if t_max <= 0 else rad_per_node * nodes_per_panel / t_max
    coarse = model.cutoff / 2.5
    inner = halfw < inner_cut
    peak_floor = max(halfw / 2.0, 0.0) if not inner else 0.0
    d = 0.0
    if inner:
        d = min(inner_span * halfw, 0.1 * min(om0, T - om0))

    def width(x):
        w = min(coarse, h_phase, max(x / 2.0, 1e-4 * model.cutoff))
        scale = max(abs(x - om0) / 3.0, peak_floor if not inner else d / 3.0)
        return min(w, scale) if scale > 0 else w

    lam2 = model.lam**2

    def outer_weights(nodes, wq):
        pv = pv_integral_many(model, nodes, quad_cfg, grid)
        g2 = spectral_weight(model, nodes)
        x_re = nodes - model.omega_bare - lam2 * pv
        dens = lam2 * g2 / (x_re**2 + (math.pi * lam2 * g2) ** 2)
        return dens * wq

    if not inner:
        bounds = graded_boundaries(0.0, T, width)
        nodes, wq = gauss_panels(bounds, nodes_per_panel)
        weights = outer_weights(nodes, wq)
    else:
        b_left = graded_boundaries(0.0, om0 - d, width)
        b_right = graded_boundaries(om0 + d, T, width)
        n_l, w_l = gauss_panels(b_left, nodes_per_panel)
        n_r, w_r = gauss_panels(b_right, nodes_per_panel)
        outer_nodes = np.concatenate([n_l, n_r])
        outer_w = outer_weights(outer_nodes, np.concatenate([w_l, w_r]))

        # Inner window in the scaled offset u = (w - omega0)/halfwidth.  The
        # real part is modeled as X' * delta + X''/2 * delta^2, which keeps
        # full precision where omega0 + delta would round to omega0.
        span = d / halfw
        cap = math.inf if t_max <= 0 else rad_per_node * 20 / (halfw * t_max)
        bx = [0.0]
        u = min(1.0, max(cap, 1e-3))
        while u < span:
            bx.append(u)
            u = min(u * 2.0, u + cap)
        bx.append(span)
        ux, uw = gauss_panels(np.array(bx), 20)
        inner_nodes = []
        inner_w = []
        for side in (1.0, -1.0):
            delta = side * halfw * ux
            g2v = spectral_weight(model, np.maximum(om0 + delta, 0.0))
            xloc = prof.xprime * delta + 0.5 * prof.xsecond * delta**2
            dens = lam2 * g2v / (xloc**2 + (math.pi * lam2 * g2v) ** 2)
            inner_nodes.append(om0 + delta)
            inner_w.append(dens * uw * halfw)
        nodes = np.concatenate([outer_nodes] + inner_nodes)
        weights = np.concatenate([outer_w] + inner_w)

    if nodes.size > max_nodes:
        raise OscillationUnderResolved(
            f"table construction produced {nodes.size} nodes, above the cap {max_nodes}"
        )
    order = np.argsort(nodes)
    return SpectralTable(nodes=nodes[order], weights=weights[order],
                         t_max=float(max(t_max, 0.0)), profile=prof)


@dataclass
class RayTable:
    """Background integrand sampled on the rotated ray."""

    s_nodes: np.ndarray
    values: np.ndarray  # quadrature weight * integrand * ray jacobian
    theta: float
    t_max: float
    truncation: float

    def background(self, times) -> np.ndarray:
        t = np.atleast_1d(np.asarray(times, dtype=float))
        decay = -math.sin(self.theta) - 1j * math.cos(self.theta)
        out = np.empty(t.shape, dtype=complex)
        chunk = max(1, int(4_000_000 // max(self.s_nodes.size, 1)))
        for i in range(0, t.size, chunk):
            st = np.outer(t[i:i + chunk], self.s_nodes)
            out[i:i + chunk] = np.exp(decay * st) @ self.values
        return out


def _ray_truncation(model: ModelParams, theta: float, tail_tol: float,
                    osc_tail_tol: float) -> float:
    lam2c = max(model.lam**2 * model.prefactor, 1e-300)
    n = model.exponent
    cut = model.cutoff
    c2 = math.cos(2.0 * theta)
    if c2 > 0.02:
        S = 6.0 * cut
        for _ in range(60):
            mag = lam2c * max(S, 1.0) ** n / max(S * S, 1.0)
            arg = max(math.log(max(mag / tail_tol, 2.0)), 1.0)
            S_new = cut * math.sqrt(arg / c2)
            if abs(S_new - S) < 1e-9 * S:
                break
            S = S_new
        return max(S, 3.0 * cut)
    # no Gaussian decay on the ray: fall back to the oscillatory tail bound
    if n >= 3.0:
        raise QuadratureFailure(
            "ray angle too close to pi/4 for exponent >= 3: background tail does not decay"
        )
    return max((3.0 * lam2c * cut**2 / osc_tail_tol) ** (1.0 / (3.0 - n)), 3.0 * cut)


def build_ray_table(model: ModelParams, z0: complex, quad_cfg: QuadConfig,
                    t_max: float, theta: float = DEFAULT_RAY_ANGLE,
                    *, nodes_per_panel: int = 24, rad_per_node: float = 0.8,
                    tail_tol: float = 1e-13, osc_tail_tol: float = 1e-9,
                    max_nodes: int = 300_000) -> RayTable:
    """Build the rotated-ray table for the non-pole part of the amplitude.

    The ray must pass below the resonance pole (theta > |arg z0|) so that
    the pole term is the extracted residue; if the requested angle is too
    close to the pole direction it is adjusted once, and :class:`PoleOnRay`
    is raised only when no workable angle exists.
    """
    if model.lam == 0.0:
        raise ValueError("ray table is undefined for a decoupled oscillator")
    pole_angle = abs(math.atan2(z0.imag, z0.real))
    angle_tol = 0.02
    if theta <= pole_angle + angle_tol or abs(theta - pole_angle) < angle_tol:
        adjusted = max(2.0 * pole_angle, pole_angle + 0.2)
        warnings.warn(
            f"ray angle {theta:.4g} too close to the pole direction {pole_angle:.4g}; "
            f"using {adjusted:.4g}",
            RuntimeWarning,
            stacklevel=2,
        )
        theta = adjusted
        if theta <= pole_angle + angle_tol or theta >= 0.49 * math.pi:
            raise PoleOnRay(
                f"no deformation angle separates the pole at argument {pole_angle:.4g}"
            )
    if not (0.0 < theta < 0.5 * math.pi):
        raise ValueError("ray angle must lie in (0, pi/2)")

    S = _ray_truncation(model, theta, tail_tol, osc_tail_tol)
    sin_t, cos_t = math.sin(theta), math.cos(theta)
    abs_sin2 = abs(math.sin(2.0 * theta))
    cut2 = model.cutoff**2
    s0 = min(model.cutoff, S) / 50.0
    if t_max > 0:
        s0 = min(s0, 1.0 / (t_max * sin_t) / 8.0)

    def width(s):
        t_eff = t_max if s <= s0 else min(t_max, 40.0 / (s * sin_t)) if t_max > 0 else 0.0
        k = t_eff * cos_t + 2.0 * s * abs_sin2 / cut2
        w_phase = math.inf if k <= 0 else rad_per_node * nodes_per_panel / k
        return min(max(s / 4.0, s0), w_phase)

    bounds = graded_boundaries(0.0, S, width)
    s_nodes, wq = gauss_panels(bounds, nodes_per_panel)
    if s_nodes.size > max_nodes:
        raise QuadratureFailure(
            f"ray table needs {s_nodes.size} nodes, above the cap {max_nodes}"
        )
    grid = master_grid(model, quad_cfg)
    phase = complex(math.cos(theta), -math.sin(theta))
    z = s_nodes * phase
    lam2 = model.lam**2
    alpha_one = z - model.omega_bare - lam2 * grid.resolvent_integral(model, z)
    g2z = spectral_weight_analytic(model, z)
    alpha_two = alpha_one + 2j * math.pi * lam2 * g2z
    values = wq * lam2 * g2z / (alpha_one * alpha_two) * phase
    return RayTable(s_nodes=s_nodes, values=values, theta=theta,
                    t_max=float(max(t_max, 0.0)), truncation=S)
