"""Exact quantum solution: Landau levels, the linear-potential Green
function, its cyclotron-channel series, and the total emitted current.

Separating the cyclotron motion from the accelerated axial motion reduces
the point-source problem to one dimension per Landau channel.  The axial
Green function of a uniformly accelerated electron with energy E_par is

    G_par(zeta, zeta') = -pi beta^2 e Efield * Ai(-u_<) Ci(-u_>),

with u_<> = beta E_par + min/max(zeta, zeta') and Ci = Bi + i Ai the
outgoing-wave solution.  For a source at the origin only zero-angular-
momentum channels contribute, and with a_n = beta (E_n - E), E_n the n-th
Landau energy, the full Green function for z >= 0 reads

    G(rho, z; E) = -(m B)/(beta hbar^3 Efield) * e^{-r2/2}
                   sum_n L_n(r2) Ai(a_n) Ci(a_n - zeta),      r2 = 2 eps rho^2

(for z < 0 the two Airy arguments are exchanged; both cases reduce to the
min/max rule above).  Terms with E_n > E describe closed channels and decay
double-exponentially once a_n > 0, which makes the series practical; on the
plane z = 0 it does not converge absolutely and evaluation is refused.

The emitted current follows from the source-modified continuity equation,
J = -(2/hbar)|C|^2 Im G(0), giving the threshold-structured series

    J(E) = (2 m B)/(beta hbar^4 Efield) |C|^2 sum_n Ai(a_n)^2 > 0.

Numerics: the weighted Laguerre factors L_n(r2) e^{-r2/2} are bounded by one
and iterated with rescaling; Airy products are combined from scaled values
with explicit exponent bookkeeping, so the series reaches arbitrarily high
channels without overflow or underflow surprises.  The running tail bound
multiplies the scaled-Airy decay envelope by the unit Laguerre bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import ELECTRON_MASS, ELEMENTARY_CHARGE, HBAR
from .errors import ConvergenceError, DomainError, UnsupportedRegionError
from .scales import FieldSetup, scaled_z_quantum
from .specfun import WeightedLaguerre, airy, airy_scaled

_TAIL_RATIO_MAX = 0.95


@dataclass(frozen=True)
class LandauTerm:
    """One cyclotron channel: quantum number, energy, axial energy budget."""

    n: int
    energy: float  # E_n in J
    parallel_energy: float  # E - E_n in J
    suppressed: bool  # True when the channel is closed (E_n > E)


@dataclass(frozen=True)
class GreenValue:
    value: complex
    terms_used: int
    tail_bound: float


@dataclass(frozen=True)
class CurrentValue:
    value: float  # s^-1
    terms_used: int
    tail_bound: float


def landau_energy(n: int, mu: int, setup: FieldSetup) -> float:
    """Eigenenergy of the cyclotron state (n, mu): (2n+1) hbar omega_L for
    mu >= 0, shifted by 2|mu| hbar omega_L for negative angular momentum."""
    if n < 0:
        raise DomainError("principal quantum number must be >= 0")
    base = (2 * n + 1) * HBAR * setup.omega_l
    if mu < 0:
        base += 2 * abs(mu) * HBAR * setup.omega_l
    return base


def landau_term(n: int, setup: FieldSetup) -> LandauTerm:
    e_n = landau_energy(n, 0, setup)
    e_par = setup.energy - e_n
    return LandauTerm(n=n, energy=e_n, parallel_energy=e_par, suppressed=e_par < 0)


def green_parallel(zeta: float, zeta_p: float, e_parallel: float, setup: FieldSetup):
    """Outgoing-wave Green function of the axial linear potential."""
    beta = setup.beta
    u_lo = beta * e_parallel + min(zeta, zeta_p)
    u_hi = beta * e_parallel + max(zeta, zeta_p)
    pref = -math.pi * beta * beta * ELEMENTARY_CHARGE * setup.electric_field
    v_lo = airy(-u_lo)
    v_hi = airy(-u_hi)
    return pref * v_lo.ai * (v_hi.bi + 1j * v_hi.ai)


def _xi_pos(b: float) -> float:
    return 2.0 / 3.0 * b ** 1.5 if b > 0.0 else 0.0


def _green_accumulate(
    rho_m,
    z_m,
    setup,
    tol,
    max_terms,
    with_derivative=False,
):
    """Vectorized channel sum.  Returns (G, dG/dz or None, terms, tail_bound).

    Scalars per channel (Airy factors) multiply the grid-dependent weighted
    Laguerre factors; real and imaginary parts accumulate separately so each
    can carry its own exponent bookkeeping.
    """
    if z_m == 0.0:
        raise UnsupportedRegionError(
            "Green-function series does not converge absolutely on the z = 0 plane"
        )
    rho_m = np.asarray(rho_m, dtype=float)
    if (rho_m < 0).any():
        raise DomainError("rho must be non-negative")
    beta = setup.beta
    zeta = scaled_z_quantum(z_m, setup)
    hw = HBAR * setup.omega_l
    e = setup.energy
    r2 = (ELECTRON_MASS * setup.omega_l / HBAR) * rho_m ** 2
    pref = -(ELECTRON_MASS * setup.magnetic_field) / (
        beta * HBAR ** 3 * setup.electric_field
    )
    dz_chain = -beta * ELEMENTARY_CHARGE * setup.electric_field

    lag = WeightedLaguerre(r2)
    g_re = np.zeros_like(r2)
    g_im = np.zeros_like(r2)
    dg_re = np.zeros_like(r2) if with_derivative else None
    dg_im = np.zeros_like(r2) if with_derivative else None

    shift_ai = -min(zeta, 0.0)
    shift_ci = -max(zeta, 0.0)
    term_scale = 0.0
    prev_env = None
    tail_bound = math.inf
    n = 0
    while n < max_terms:
        a_n = beta * ((2 * n + 1) * hw - e)
        b_ai = a_n + shift_ai
        b_ci = a_n + shift_ci
        sv_ai = airy_scaled(b_ai)
        sv_ci = airy_scaled(b_ci)
        s_ai = -_xi_pos(b_ai)
        s_re = s_ai + _xi_pos(b_ci)
        s_im = s_ai - _xi_pos(b_ci)

        m_lag, s_lag = lag.current()
        w_re = np.exp(s_lag + s_re)
        w_im = np.exp(s_lag + s_im)
        g_re += m_lag * w_re * (sv_ai.ai * sv_ci.bi)
        g_im += m_lag * w_im * (sv_ai.ai * sv_ci.ai)
        if with_derivative:
            if zeta >= 0.0:  # derivative acts on the Ci argument
                dg_re += m_lag * w_re * (sv_ai.ai * sv_ci.bip) * dz_chain
                dg_im += m_lag * w_im * (sv_ai.ai * sv_ci.aip) * dz_chain
            else:  # exchanged arguments: derivative acts on the Ai argument
                dg_re += m_lag * w_re * (sv_ai.aip * sv_ci.bi) * dz_chain
                dg_im += m_lag * w_im * (sv_ai.aip * sv_ci.ai) * dz_chain

        env = math.exp(s_re) * abs(sv_ai.ai) * (
            abs(sv_ci.bi) if b_ci > 0 else 1.0
        )
        term_scale = max(term_scale, env)
        if b_ai > 1.0 and prev_env is not None and env > 0.0:
            ratio = env / prev_env if prev_env > 0 else 1.0
            if ratio < _TAIL_RATIO_MAX:
                tail_bound = env * ratio / (1.0 - ratio)
                g_norm = float(np.max(np.hypot(g_re, g_im)))
                target = max(tol * g_norm, 1e-16 * term_scale)
                if tail_bound < target:
                    n += 1
                    break
        prev_env = env
        lag.advance()
        n += 1
    else:
        raise ConvergenceError(
            "Green-function series hit the term cap",
            partial=pref * (g_re + 1j * g_im),
            terms_used=n,
        )

    g = pref * (g_re + 1j * g_im)
    dg = pref * (dg_re + 1j * dg_im) if with_derivative else None
    return g, dg, n, abs(pref) * tail_bound


def green_series(rho_m, z_m, setup, tol=1e-10, max_terms=100000):
    """Green function on a radius grid at fixed z.  Returns (values, terms, tail)."""
    g, _, n, tail = _green_accumulate(rho_m, z_m, setup, tol, max_terms)
    return g, n, tail


def green_function(rho_m, z_m, setup, tol=1e-10, max_terms=100000) -> GreenValue:
    """Green function at one physical point (z != 0)."""
    g, n, tail = green_series(np.asarray([rho_m]), z_m, setup, tol, max_terms)
    return GreenValue(value=complex(g[0]), terms_used=n, tail_bound=tail)


def green_imag(rho_m, z_m, setup, tol=1e-12, max_terms=100000):
    """Imaginary part of G, summable even on and near the source plane.

    Im G solves the source-free equation and involves only the fast-decaying
    Ai*Ai channel products, so it stays well-defined as z -> 0.
    """
    rho_m = np.asarray(rho_m, dtype=float)
    beta = setup.beta
    zeta = scaled_z_quantum(z_m, setup)
    hw = HBAR * setup.omega_l
    r2 = (ELECTRON_MASS * setup.omega_l / HBAR) * rho_m ** 2
    pref = -(ELECTRON_MASS * setup.magnetic_field) / (
        beta * HBAR ** 3 * setup.electric_field
    )
    shift_ai = -min(zeta, 0.0)
    shift_ci = -max(zeta, 0.0)
    lag = WeightedLaguerre(r2)
    total = np.zeros_like(r2)
    prev_env = None
    n = 0
    while n < max_terms:
        a_n = beta * ((2 * n + 1) * hw - setup.energy)
        b_ai = a_n + shift_ai
        b_ci = a_n + shift_ci
        sv_ai = airy_scaled(b_ai)
        sv_ci = airy_scaled(b_ci)
        s_im = -_xi_pos(b_ai) - _xi_pos(b_ci)
        m_lag, s_lag = lag.current()
        total += m_lag * np.exp(s_lag + s_im) * (sv_ai.ai * sv_ci.ai)
        env = math.exp(s_im) * abs(sv_ai.ai) * (abs(sv_ci.ai) if b_ci > 0 else 0.6)
        if b_ai > 1.0 and prev_env is not None:
            ratio = env / prev_env if prev_env > 0 else 1.0
            if ratio < _TAIL_RATIO_MAX and env * ratio / (1.0 - ratio) < tol * float(
                np.max(np.abs(total)) + 1e-300
            ):
                n += 1
                break
        prev_env = env
        lag.advance()
        n += 1
    return pref * total


def total_current(setup: FieldSetup, source_strength: float = 1.0, tol=1e-12,
                  max_terms=100000) -> CurrentValue:
    """Total emitted current J(E) in 1/s for |C|^2 = source_strength (J^2 m^3)."""
    beta = setup.beta
    hw = HBAR * setup.omega_l
    pref = (
        2.0
        * ELECTRON_MASS
        * setup.magnetic_field
        * source_strength
        / (beta * HBAR ** 4 * setup.electric_field)
    )
    total = 0.0
    prev_env = None
    tail = math.inf
    n = 0
    while n < max_terms:
        a_n = beta * ((2 * n + 1) * hw - setup.energy)
        sv = airy_scaled(a_n)
        env = sv.ai * sv.ai * math.exp(-2.0 * _xi_pos(a_n))
        total += env
        if a_n > 1.0 and prev_env is not None:
            ratio = env / prev_env if prev_env > 0 else 1.0
            if ratio < _TAIL_RATIO_MAX:
                tail = env * ratio / (1.0 - ratio)
                if tail < tol * total:
                    n += 1
                    break
        prev_env = env
        n += 1
    else:
        raise ConvergenceError("current series hit the term cap", partial=pref * total,
                               terms_used=n)
    return CurrentValue(value=pref * total, terms_used=n, tail_bound=pref * tail)


def current_density_z(rho_m, z_m, setup, source_strength=1.0, tol=1e-10,
                      max_terms=100000):
    """Axial probability current j_z(rho) of psi = C G on a radius grid.

    j_z = (hbar/m) Im[psi* dpsi/dz]; the axial vector-potential component
    vanishes in the symmetric gauge, so no gauge term enters.
    """
    g, dg, _, _ = _green_accumulate(
        rho_m, z_m, setup, tol, max_terms, with_derivative=True
    )
    return (HBAR / ELECTRON_MASS) * source_strength * np.imag(np.conj(g) * dg)


def quantum_density_profile(z_m, rho_grid_m, setup, flux_norm=1.0, tol=1e-10):
    """Radial profile of n = 2 pi rho |C G|^2 normalized to total flux.

    Thin wrapper kept for interface parity; the profile machinery lives in
    :mod:`parfield.profiles`.
    """
    from .profiles import compute_profile

    return compute_profile(setup, z_m, rho_grid_m, "quantum", flux_norm=flux_norm,
                           tol=tol)
