"""Semiclassical wavefunction, current, and the fold-uniform Airy pair.

Each classical path contributes a primitive term

    psi_alpha = -sqrt(rho_alpha) * exp(i W_alpha/hbar - i pi mu_alpha/2),

with the classical density rho_alpha from flux conservation of the isotropic
source, and the Maslov index mu = 2k-2 (early) or 2k-1 (late) counting the
k-1 focal-line crossings and caustic touches accumulated per cyclotron
period, plus one extra caustic reflection for the late path.  Tunneling
periods contribute the analytic continuation of the early term through the
fold: the complex flight-time root with Im W > 0, whose amplitude decays as
exp(-Im W/hbar).

The primitive sum diverges on fold caustics.  The uniform replacement swaps
each period's pair for

    psi_k = gamma_k Ai(u_k) + delta_k Ai'(u_k),

where u_k depends only on the action difference of the pair,
u_k = -(3 dW / (4 hbar))^(2/3), and gamma_k, delta_k are built from the two
classical densities so that the asymptotic expansion of the Airy functions
reproduces the primitive pair on the allowed side.  In forbidden periods the
same construction is continued through the fold: u_k > 0 from the tunneling
action 2 Im W, and the square-rooted densities become the principal square
roots of the continued complex density (their phases supply the extra
exp(-i pi/4) factors, keeping gamma_k and delta_k smooth across the fold;
this branch assignment is fixed by requiring the deep-forbidden tail to
reduce to the single decaying orbit).

Actions are carried in units of hbar throughout (W/hbar = epsilon * w with
the dimensionless reduced action w), avoiding cancellation in the pair
differences.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .classical import (
    TrajectorySolution,
    axial_velocity_scaled,
    fold_radius,
    solve_point,
)
from .constants import ELECTRON_MASS, HBAR
from .errors import DomainError
from .scales import FieldSetup, ScaledPoint, to_scaled
from .specfun import airy

_PI = math.pi
_SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class WaveValue:
    """Wavefunction amplitude (units m^-3/2) with method tag and axis flag."""

    amplitude: complex
    method: str
    on_axis_warning: bool = False


@dataclass(frozen=True)
class AiryPairCoefficients:
    """Uniform-approximation data for one cyclotron period."""

    k: int
    u: float
    gamma: complex
    delta: complex


# ----------------------------------------------------------------------
# Primitive ingredients
# ----------------------------------------------------------------------

def classical_density(traj: TrajectorySolution, point: ScaledPoint, setup: FieldSetup):
    """Classical density (1/m^3) carried by one real path; kept on the
    trajectory record, re-exposed here for the module interface."""
    if traj.density is None:
        raise DomainError("classical density undefined for tunneling paths")
    return traj.density


def maslov_index(traj: TrajectorySolution) -> int:
    if traj.maslov is None:
        raise DomainError("Maslov index undefined for tunneling paths")
    return traj.maslov


def _primitive_term(traj: TrajectorySolution) -> complex:
    root = traj.flight_time
    if root.kind == "tunneling":
        # analytic continuation of the early branch: principal sqrt of the
        # continued density, early Maslov index, Im W > 0 decay
        amp = cmath.sqrt(traj.density_analytic)
        mu = 2 * root.cycle - 2
        return -amp * cmath.exp(1j * traj.action_w_hbar - 0.5j * _PI * mu)
    return -math.sqrt(traj.density) * cmath.exp(
        1j * traj.action_w_hbar.real - 0.5j * _PI * traj.maslov
    )


def wavefunction_from_trajectories(trajs, method="semiclassical", maslov_shift=0):
    """Sum primitive terms; ``maslov_shift`` adds a constant to every index
    (a pure global phase, exposed for invariance tests)."""
    total = 0.0 + 0.0j
    phase = cmath.exp(-0.5j * _PI * maslov_shift)
    for traj in trajs:
        total += _primitive_term(traj) * phase
    return WaveValue(amplitude=total, method=method)


def semiclassical_wavefunction(
    rho_m: float,
    z_m: float,
    setup: FieldSetup,
    include_tunneling: bool = True,
    flux_norm: float = 1.0,
) -> WaveValue:
    """Primitive semiclassical wavefunction at a physical point."""
    point = to_scaled(rho_m, z_m, setup)
    trajs = solve_point(point, setup, include_tunneling, flux_norm)
    wave = wavefunction_from_trajectories(trajs)
    on_axis = any(t.flight_time.axis_degenerate for t in trajs) or point.rho < 1e-9
    if on_axis:
        return WaveValue(wave.amplitude, wave.method, on_axis_warning=True)
    return wave


def semiclassical_density(rho_m, z_m, setup, include_tunneling=True, flux_norm=1.0):
    """|psi_sc|^2 in 1/m^3."""
    w = semiclassical_wavefunction(rho_m, z_m, setup, include_tunneling, flux_norm)
    return abs(w.amplitude) ** 2


def semiclassical_current(rho_m, z_m, setup, flux_norm=1.0):
    """Axial current density j_z (1/(m^2 s)) from the interfering real paths:

    j_z = sum_a rho_a v_a + sum_{a<b} sqrt(rho_a rho_b)(v_a+v_b) cos(chi_a-chi_b)
    """
    point = to_scaled(rho_m, z_m, setup)
    trajs = [
        t
        for t in solve_point(point, setup, include_tunneling=False, flux_norm=flux_norm)
        if t.flight_time.kind != "tunneling"
    ]
    total = 0.0
    n = len(trajs)
    for a in range(n):
        ta = trajs[a]
        total += ta.density * ta.v_z
        chi_a = ta.action_w_hbar.real - 0.5 * _PI * ta.maslov
        for b in range(a + 1, n):
            tb = trajs[b]
            chi_b = tb.action_w_hbar.real - 0.5 * _PI * tb.maslov
            total += (
                math.sqrt(ta.density * tb.density)
                * (ta.v_z + tb.v_z)
                * math.cos(chi_a - chi_b)
            )
    return total


def classical_profile_density(rho_m, z_m, setup, flux_norm=1.0):
    """Incoherent sum of the real-path densities (1/m^3)."""
    point = to_scaled(rho_m, z_m, setup)
    trajs = solve_point(point, setup, include_tunneling=False, flux_norm=flux_norm)
    return sum(t.density for t in trajs if t.density is not None)


# ----------------------------------------------------------------------
# Uniform (fold) approximation
# ----------------------------------------------------------------------

def uniform_cycle_coefficients(pair, k: int) -> AiryPairCoefficients:
    """Airy-pair coefficients for one period from its trajectory pair (real
    early/late) or its single tunneling root."""
    sign = -1.0 if k % 2 else 1.0  # (-1)^k
    if len(pair) == 2:
        early, late = pair
        d_w = late.action_w_hbar.real - early.action_w_hbar.real
        wbar = 0.5 * (late.action_w_hbar.real + early.action_w_hbar.real)
        u = -((0.75 * abs(d_w)) ** (2.0 / 3.0))
        sp = math.sqrt(late.density)
        sm = math.sqrt(early.density)
        au = abs(u) ** 0.25 if u != 0.0 else 0.0
        gamma = sign * _SQRT_PI * au * cmath.exp(1j * (wbar - 0.25 * _PI)) * (sp + sm)
        if u == 0.0:
            delta = 0.0 + 0.0j
        else:
            delta = (
                sign
                * _SQRT_PI
                / au
                * cmath.exp(1j * (wbar + 0.25 * _PI))
                * (sp - sm)
            )
        return AiryPairCoefficients(k=k, u=u, gamma=gamma, delta=delta)
    (tun,) = pair
    w = tun.action_w_hbar
    im_w = w.imag
    u = (1.5 * im_w) ** (2.0 / 3.0)
    s2 = cmath.sqrt(tun.density_analytic)
    s1 = cmath.sqrt(-tun.density_analytic.conjugate())
    au = u ** 0.25
    phase = cmath.exp(1j * w.real)
    gamma = sign * _SQRT_PI * au * phase * (s1 + s2)
    delta = sign * _SQRT_PI / au * phase * (s1 - s2)
    return AiryPairCoefficients(k=k, u=u, gamma=gamma, delta=delta)


def uniform_wavefunction(
    rho_m: float, z_m: float, setup: FieldSetup, flux_norm: float = 1.0
) -> WaveValue:
    """Fold-uniform wavefunction: Airy pair per cyclotron period.

    Valid off the symmetry axis; near focal lines the amplitude diverges like
    the primitive result and the value is flagged.
    """
    point = to_scaled(rho_m, z_m, setup)
    trajs = solve_point(point, setup, include_tunneling=True, flux_norm=flux_norm)
    on_axis = any(t.flight_time.axis_degenerate for t in trajs) or point.rho < 1e-9
    by_cycle: dict[int, list[TrajectorySolution]] = {}
    for t in trajs:
        by_cycle.setdefault(t.flight_time.cycle, []).append(t)
    total = 0.0 + 0.0j
    for k, pair in sorted(by_cycle.items()):
        pair.sort(key=lambda t: t.flight_time.value.real)
        coeff = uniform_cycle_coefficients(pair, k)
        ai = airy(coeff.u)
        total += coeff.gamma * ai.ai + coeff.delta * ai.aip
    return WaveValue(amplitude=total, method="uniform", on_axis_warning=on_axis)


# ----------------------------------------------------------------------
# Fringe scales
# ----------------------------------------------------------------------

def _radial_momentum(traj: TrajectorySolution) -> float:
    """Radial arrival velocity (scaled): d rho/dt = sin(theta') cos t sgn(sin t)."""
    t = traj.flight_time.value.real
    return (
        math.sin(traj.theta_p)
        * math.cos(t)
        * math.copysign(1.0, math.sin(t))
    )


def finest_fringe_width(rho_m, z_m, setup, flux_norm=1.0):
    """Smallest local interference wavelength 2 pi hbar / max|p_rho,a - p_rho,b|."""
    point = to_scaled(rho_m, z_m, setup)
    trajs = [
        t
        for t in solve_point(point, setup, include_tunneling=False, flux_norm=flux_norm)
        if t.flight_time.kind != "tunneling" and not t.flight_time.axis_degenerate
    ]
    if len(trajs) < 2:
        return math.inf
    mv = setup.v0 * ELECTRON_MASS
    vr = [_radial_momentum(t) for t in trajs]
    spread = max(vr) - min(vr)
    if spread <= 0:
        return math.inf
    return 2.0 * _PI * HBAR / (mv * spread)


def fold_fringe_scale(k: int, z_m: float, setup: FieldSetup, flux_norm=1.0):
    """Width of the first Airy lobe at the period-k fold on the plane z_m.

    From the linearization u(rho) ~ -Q (rho_fold - rho): the first Airy zero
    sits at u = -2.338, so the lobe width is 2.338/Q.  Q is measured from the
    pair action difference slightly inside the fold.
    """
    z = z_m / setup.d
    rf = fold_radius(k, z, setup.eta)
    if rf is None:
        return None
    eta = setup.eta
    for back in (1e-3, 1e-2, 3e-2):
        rho_in = rf * (1.0 - back)
        point = ScaledPoint(rho=rho_in, z=z)
        trajs = solve_point(point, setup, include_tunneling=False, flux_norm=flux_norm)
        pair = [t for t in trajs if t.flight_time.cycle == k]
        if len(pair) == 2:
            d_w = abs(pair[1].action_w_hbar.real - pair[0].action_w_hbar.real)
            if d_w > 0:
                q = (0.75 * d_w) ** (2.0 / 3.0) / ((rf - rho_in) * setup.d)
                return 2.338 / q
    return None
