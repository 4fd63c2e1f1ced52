"""Classical trajectories of an electron launched from the origin into
parallel fields, and the fixed-energy flight-time problem.

In scaled variables the trajectory with emission angles (theta', phi') is

    s(t) = sin(theta') sin(t) exp(i (phi' - t)),      s = x + i y
    z(t) = t^2/eta + t cos(theta'),

a circular cyclotron orbit superposed on uniform downhill acceleration.  A
destination (rho, z) is reached at flight time T iff the energy fraction

    eps(T) = rho^2/sin^2(T) + (z/T - T/eta)^2

equals 1.  Within every cyclotron period ((k-1) pi, k pi) the function eps is
strictly convex with a single minimum, so each period carries either two real
flight times (an early and a late trajectory) or none; in the latter case a
complex-conjugate root pair describes a tunneling trajectory.  All real roots
lie between the flight times T_-, T_+ of the paths launched parallel and
antiparallel to the electric force.

The reduced action along a path, divided by hbar, is epsilon * w(T) with

    w(T) = rho^2 cot(T) + z^2/T + 2 z T / eta - T^3/(3 eta^2) + T

and epsilon = E/(hbar omega_L); closed forms for emission angles, arrival
velocity, and the closed orbits returning to the source follow from the same
flight-time roots.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .constants import HBAR
from .errors import ConvergenceError, DomainError, NoRealSolutionError, PoleError
from .scales import FieldSetup, ScaledPoint

_PI = math.pi

# Root-solver tolerances: absolute in scaled time, residual in energy fraction.
_T_TOL = 1e-13
_EPS_RESIDUAL = 1e-10


@dataclass(frozen=True)
class FlightTime:
    """One root of the flight-time equation eps(T) = 1.

    value is real for classical paths and complex for tunneling roots; cycle
    is the cyclotron period index k with (k-1) pi < Re T <= k pi; kind is
    'early', 'late', or 'tunneling'.  axis_degenerate marks the on-axis
    convention where early/late pairs collapse onto complete orbit times.
    """

    value: complex
    cycle: int
    kind: str
    axis_degenerate: bool = False


@dataclass(frozen=True)
class ClosedOrbit:
    """Orbit returning to the source: the uphill orbit or a magnetic one."""

    kind: str  # 'uphill' | 'snake' | 'balloon'
    index: int  # 0 for uphill, else cyclotron count k
    return_time: float  # scaled
    emission_angle: float  # rad
    action: float  # J s


@dataclass(frozen=True)
class TrajectorySolution:
    """A classical (or tunneling) path to a destination with derived data.

    density is the classical density in 1/m^3 (None for tunneling roots, for
    which density_analytic carries the complex continuation); action_w is the
    reduced action in J s and action_w_hbar the same in units of hbar.
    """

    flight_time: FlightTime
    theta_p: float | None
    phi_p: float | None
    action_w: complex
    action_w_hbar: complex
    maslov: int | None
    density: float | None
    density_analytic: complex
    v_z: float | None


# ----------------------------------------------------------------------
# Trajectories and conserved quantities
# ----------------------------------------------------------------------

def trajectory_state(theta_p: float, phi_p: float, t: float, eta: float):
    """Scaled position and velocity at time t for launch angles (theta', phi').

    Returns (s, z, ds/dt, dz/dt) with s complex.
    """
    if t < 0:
        raise DomainError("time must be non-negative")
    st = math.sin(theta_p)
    s = st * math.sin(t) * cmath.exp(1j * (phi_p - t))
    z = t * t / eta + t * math.cos(theta_p)
    sdot = st * cmath.exp(1j * (phi_p - 2.0 * t))
    zdot = 2.0 * t / eta + math.cos(theta_p)
    return s, z, sdot, zdot


def energy_fraction(point: ScaledPoint, t, eta: float):
    """eps(T) and its derivative d eps / dT at flight time t (real or complex).

    Raises PoleError at complete orbits (t = k pi) when rho > 0, where the
    transverse term diverges.
    """
    rho2 = point.rho * point.rho
    if isinstance(t, complex):
        s = cmath.sin(t)
        c = cmath.cos(t)
    else:
        if t <= 0:
            raise DomainError("flight time must be positive")
        s = math.sin(t)
        c = math.cos(t)
        if rho2 > 0.0 and abs(s) < 1e-300:
            raise PoleError(f"energy fraction pole at t = {t!r}")
    lon = point.z / t - t / eta
    eps = rho2 / (s * s) + lon * lon
    deps = -2.0 * (rho2 * c / (s * s * s) + point.z * point.z / t ** 3 - t / eta ** 2)
    return eps, deps


def _eps_only(rho2, z, t, eta):
    s = math.sin(t)
    lon = z / t - t / eta
    return rho2 / (s * s) + lon * lon


def _deps(rho2, z, t, eta):
    s = math.sin(t)
    return -2.0 * (rho2 * math.cos(t) / (s * s * s) + z * z / t ** 3 - t / eta ** 2)


def _eps_second(rho2, z, t, eta):
    s2 = math.sin(t) ** 2
    return (
        2.0 * rho2 * (s2 + 3.0 * (1.0 - s2)) / (s2 * s2)
        + 6.0 * z * z / t ** 4
        + 2.0 / eta ** 2
    )


def parallel_flight_times(z: float, eta: float):
    """Flight times (T_-, T_+) of paths launched along the axis.

    T_+ - T_- = eta for z >= 0; below the uphill turning surface
    (discriminant < 0) no axis-parallel path exists.
    """
    disc = eta * eta + 4.0 * eta * z
    if disc < 0.0:
        raise NoRealSolutionError(
            "no axis-parallel paths: destination beyond the uphill turning point"
        )
    root = math.sqrt(disc)
    return 0.5 * abs(root - eta), 0.5 * abs(root + eta)


def cycle_range(z: float, eta: float):
    """Indices (k_lo, k_hi) of cyclotron periods intersecting [T_-, T_+]."""
    t_minus, t_plus = parallel_flight_times(z, eta)
    k_lo = max(1, math.floor(t_minus / _PI) + 1)
    k_hi = max(k_lo, math.ceil(t_plus / _PI))
    # trim periods that merely touch at a boundary
    if k_hi * _PI - t_plus >= _PI - 1e-15 and k_hi > k_lo:
        k_hi -= 1
    return k_lo, k_hi


# ----------------------------------------------------------------------
# Flight-time solver
# ----------------------------------------------------------------------

def _cycle_minimum(rho2, z, k, eta):
    """Location and value of the single minimum of eps in period k."""
    delta = max(1e-13, math.sqrt(rho2) * 1e-6)
    a = (k - 1) * _PI + delta
    b = k * _PI - delta
    if k == 1:
        a = max(a, delta)
    fa = _deps(rho2, z, a, eta)
    fb = _deps(rho2, z, b, eta)
    if fa >= 0.0:  # minimum pinned at the left guard (deep pole shoulder)
        return a, _eps_only(rho2, z, a, eta)
    if fb <= 0.0:
        return b, _eps_only(rho2, z, b, eta)
    lo, hi = a, b
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if _deps(rho2, z, mid, eta) < 0.0:
            lo = mid
        else:
            hi = mid
    t = 0.5 * (lo + hi)
    for _ in range(3):  # Newton polish on the derivative
        d1 = _deps(rho2, z, t, eta)
        d2 = _eps_second(rho2, z, t, eta)
        step = d1 / d2
        tn = t - step
        if not (lo - 1e-9 < tn < hi + 1e-9):
            break
        t = tn
        if abs(step) < 1e-15:
            break
    return t, _eps_only(rho2, z, t, eta)


def _polish_real_root(rho2, z, t, eta, lo, hi):
    for _ in range(40):
        f = _eps_only(rho2, z, t, eta) - 1.0
        d = _deps(rho2, z, t, eta)
        if d == 0.0:
            break
        step = f / d
        tn = t - step
        if not (lo <= tn <= hi):
            break
        t = tn
        if abs(step) < 1e-15:
            break
    return t


def _real_pair(rho2, z, k, eta, t_min, point):
    delta = max(1e-13, math.sqrt(rho2) * 1e-6)
    a = (k - 1) * _PI + delta
    if k == 1:
        a = max(a, delta)
    b = k * _PI - delta
    f = lambda t: _eps_only(rho2, z, t, eta) - 1.0
    roots = []
    for lo, hi, kind in ((a, t_min, "early"), (t_min, b, "late")):
        if hi <= lo:
            continue
        flo, fhi = f(lo), f(hi)
        if flo * fhi > 0.0:
            # guard interval may have clipped the root; widen toward the pole
            continue
        r = brentq(f, lo, hi, xtol=_T_TOL, rtol=1e-15, maxiter=200)
        r = _polish_real_root(rho2, z, r, eta, lo, hi)
        eps, _ = energy_fraction(point, r, eta)
        if abs(eps - 1.0) > _EPS_RESIDUAL:
            raise ConvergenceError(
                f"flight-time residual {abs(eps - 1.0):.3e} in cycle {k}"
            )
        roots.append(FlightTime(value=r, cycle=k, kind=kind))
    return roots


def _tunneling_root(rho2, z, k, eta, t_min, eps_min):
    """Complex root of eps(T) = 1 in period k via Newton from the minimum."""
    curv = _eps_second(rho2, z, t_min, eta)
    sigma = math.sqrt(max(2.0 * (eps_min - 1.0) / curv, 1e-30))
    t = complex(t_min, -sigma)
    point = ScaledPoint(rho=math.sqrt(rho2), z=z)
    lo = (k - 1) * _PI
    hi = k * _PI
    for _ in range(80):
        eps, deps = energy_fraction(point, t, eta)
        f = eps - 1.0
        if abs(f) < 1e-13:
            break
        if deps == 0:
            raise ConvergenceError(f"tunneling Newton stalled in cycle {k}")
        t = t - f / deps
        if not (lo - 0.5 < t.real < hi + 0.5):
            raise ConvergenceError(f"tunneling Newton left cycle {k}")
    else:
        raise ConvergenceError(f"tunneling Newton did not converge in cycle {k}")
    # retain the conjugate-pair member with decaying amplitude (Im W > 0)
    w = reduced_action_scaled(point, t, eta)
    if w.imag < 0.0:
        t = t.conjugate()
    return FlightTime(value=t, cycle=k, kind="tunneling")


def find_flight_times(point: ScaledPoint, eta: float, include_tunneling: bool = False):
    """All flight times to ``point``: real early/late pairs per cyclotron
    period, optionally one tunneling root per classically empty period.

    Real roots exist only for rho <= 1; with ``include_tunneling`` complex
    roots are produced for every period intersecting [T_-, T_+], including
    destinations beyond rho = 1 (evanescent region).
    """
    rho2 = point.rho * point.rho
    z = point.z
    try:
        t_minus, t_plus = parallel_flight_times(z, eta)
    except NoRealSolutionError:
        if not include_tunneling:
            return []
        raise
    if point.rho == 0.0:
        return _axis_roots(z, eta, t_minus, t_plus)
    roots: list[FlightTime] = []
    k_lo, k_hi = cycle_range(z, eta)
    for k in range(k_lo, k_hi + 1):
        t_min, eps_min = _cycle_minimum(rho2, z, k, eta)
        if eps_min < 1.0 and point.rho <= 1.0:
            roots.extend(_real_pair(rho2, z, k, eta, t_min, point))
        elif include_tunneling:
            roots.append(_tunneling_root(rho2, z, k, eta, t_min, eps_min))
    roots.sort(key=lambda r: r.value.real)
    return roots


def _axis_roots(z, eta, t_minus, t_plus):
    """On-axis convention: endpoint roots T_-, T_+ plus the degenerate cone
    roots at interior complete-orbit times, flagged axis_degenerate."""
    roots = []
    if t_minus > 1e-12:
        k = int(math.floor(t_minus / _PI)) + 1
        roots.append(FlightTime(value=t_minus, cycle=k, kind="early"))
    k_first = int(math.floor(t_minus / _PI)) + 1
    k_last = int(math.ceil(t_plus / _PI)) - 1
    for k in range(k_first, k_last + 1):
        tk = k * _PI
        if t_minus + 1e-12 < tk < t_plus - 1e-12:
            roots.append(
                FlightTime(value=tk, cycle=k, kind="late", axis_degenerate=True)
            )
            roots.append(
                FlightTime(value=tk, cycle=k + 1, kind="early", axis_degenerate=True)
            )
    k = int(math.ceil(t_plus / _PI))
    roots.append(FlightTime(value=t_plus, cycle=k, kind="late"))
    return roots


def count_on_axis(z: float, eta: float) -> int:
    """Number of classical paths to an on-axis point in the limit rho -> 0.

    Counts complete-orbit times interior to [T_-, T_+] directly; each
    contributes an early/late pair, and the interval endpoints one path each.
    """
    if z <= 0.0:
        raise DomainError("on-axis count defined for z > 0")
    t_minus, t_plus = parallel_flight_times(z, eta)
    k_first = int(math.floor(t_minus / _PI)) + 1
    k_last = int(math.ceil(t_plus / _PI)) - 1
    interior = 0
    for k in range(k_first, k_last + 1):
        if t_minus + 1e-12 < k * _PI < t_plus - 1e-12:
            interior += 1
    return 2 * (interior + 1)


# ----------------------------------------------------------------------
# Actions, angles, velocities
# ----------------------------------------------------------------------

def reduced_action_scaled(point: ScaledPoint, t, eta: float):
    """Reduced action in units of E/omega_L:

    w(T) = rho^2 cot T + z^2/T + 2 z T/eta - T^3/(3 eta^2) + T.

    Accepts complex flight times (tunneling paths).  The physical reduced
    action is (E/omega_L) * w; divided by hbar it is epsilon * w.
    """
    rho2 = point.rho * point.rho
    if isinstance(t, complex):
        trans = rho2 * cmath.cos(t) / cmath.sin(t) if rho2 != 0.0 else 0.0 + 0.0j
    else:
        if t <= 0:
            raise DomainError("flight time must be positive")
        s = math.sin(t)
        if rho2 > 0.0 and abs(s) < 1e-300:
            raise PoleError("action pole at a complete cyclotron orbit")
        trans = rho2 * math.cos(t) / s if rho2 != 0.0 else 0.0
    z = point.z
    return trans + z * z / t + 2.0 * z * t / eta - t ** 3 / (3.0 * eta * eta) + t


def reduced_action(point: ScaledPoint, t, eta: float, setup: FieldSetup):
    """Reduced action W in J s (complex for tunneling paths)."""
    w = reduced_action_scaled(point, t, eta)
    return setup.energy / setup.omega_l * w


def emission_angles(point: ScaledPoint, t: float, eta: float, phi: float = 0.0):
    """Launch angles (theta', phi') of the path reaching ``point`` at time t."""
    c = point.z / t - t / eta
    if abs(c) > 1.0 + 1e-9:
        raise DomainError(f"inconsistent flight time: |cos theta'| = {abs(c):.12f}")
    c = min(1.0, max(-1.0, c))
    return math.acos(c), phi + math.fmod(t, _PI)


def axial_velocity_scaled(point: ScaledPoint, t: float, eta: float) -> float:
    """Scaled arrival velocity dz/dt = z/T + T/eta."""
    return point.z / t + t / eta


# ----------------------------------------------------------------------
# Closed orbits
# ----------------------------------------------------------------------

def closed_orbits(eta: float, setup: FieldSetup):
    """Orbits returning to the source: the uphill orbit plus floor(eta/pi)
    magnetic orbits (snakes for odd k, balloons for even k)."""
    if eta <= 0:
        raise DomainError("eta must be positive")
    e_over_w = setup.energy / setup.omega_l
    orbits = [
        ClosedOrbit(
            kind="uphill",
            index=0,
            return_time=eta,
            emission_angle=_PI,
            action=2.0 * eta / 3.0 * e_over_w,
        )
    ]
    k_max = int(math.floor(eta / _PI))
    if k_max * _PI >= eta - 1e-12 * eta:
        k_max -= 1  # orbit being created exactly at eta = k pi is degenerate
    for k in range(1, k_max + 1):
        kp = k * _PI
        orbits.append(
            ClosedOrbit(
                kind="snake" if k % 2 else "balloon",
                index=k,
                return_time=kp,
                emission_angle=math.acos(-kp / eta),
                action=kp * (1.0 - kp * kp / (3.0 * eta * eta)) * e_over_w,
            )
        )
    return orbits


def closed_orbit_plane_crossing(orbit: ClosedOrbit, z: float, eta: float) -> float:
    """Scaled radius where the orbit's trajectory crosses the plane at scaled z > 0."""
    if z <= 0:
        raise DomainError("crossing defined for detector planes z > 0")
    if orbit.kind == "uphill":
        return 0.0
    c = math.cos(orbit.emission_angle)
    t = 0.5 * (-eta * c + math.sqrt(eta * eta * c * c + 4.0 * eta * z))
    return math.sin(orbit.emission_angle) * abs(math.sin(t))


# ----------------------------------------------------------------------
# Fold (caustic) radii at a detector plane, by root coalescence
# ----------------------------------------------------------------------

def fold_radius(k: int, z: float, eta: float):
    """Radius where the early/late pair of period k coalesces at height z.

    Bisects on the per-period minimum of eps, which grows monotonically with
    rho; returns None when the period carries no real pair even on axis.
    """
    _, eps0 = _cycle_minimum(0.0, z, k, eta)
    if eps0 >= 1.0:
        return None
    lo, hi = 0.0, 1.0
    if _cycle_minimum(1.0, z, k, eta)[1] <= 1.0:
        return 1.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if _cycle_minimum(mid * mid, z, k, eta)[1] < 1.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def fold_radii(z: float, eta: float):
    """All (k, rho_fold) pairs at the plane z, ordered by period index."""
    try:
        k_lo, k_hi = cycle_range(z, eta)
    except NoRealSolutionError:
        return []
    out = []
    for k in range(k_lo, k_hi + 1):
        r = fold_radius(k, z, eta)
        if r is not None:
            out.append((k, r))
    return out


# ----------------------------------------------------------------------
# Trajectory assembly (used by the semiclassical layer)
# ----------------------------------------------------------------------

def solve_point(
    point: ScaledPoint,
    setup: FieldSetup,
    include_tunneling: bool = False,
    flux_norm: float = 1.0,
):
    """Full trajectory data for every flight time to ``point``.

    The classical density per path follows from flux conservation of the
    isotropic source (weight f = 1/(4 pi)):

        rho_cl = (omega_L^2 J0 f / v0^3) / (T sin^2 T |D(T)|),

    where D = -(1/2) d eps/dT is the transversality factor whose zeros are
    the caustics.  (Writing the denominator with |d eps/dT| instead doubles
    the prefactor; the normalization here is fixed by the plane-flux check
    2 pi Int j_z rho drho = J0.)  For tunneling roots the signed analytic
    continuation is stored instead of the modulus.
    """
    setup.require_classical()
    eta = setup.eta
    roots = find_flight_times(point, eta, include_tunneling)
    eps_quantum = setup.epsilon
    e_over_w = setup.energy / setup.omega_l
    pref = setup.omega_l ** 2 * flux_norm / setup.v0 ** 3 / (4.0 * _PI)
    out = []
    for root in roots:
        t = root.value
        real_path = root.kind != "tunneling"
        tval = t.real if real_path else t
        w = reduced_action_scaled(point, tval, eta)
        if real_path:
            theta, phi = emission_angles(point, tval, eta)
            s = math.sin(tval)
            dhalf = (
                point.rho ** 2 * math.cos(tval) / s ** 3
                + point.z ** 2 / tval ** 3
                - tval / eta ** 2
            )
            dens_an = pref / (tval * s * s * dhalf) if dhalf != 0.0 else math.inf
            density = abs(pref / (tval * s * s * dhalf)) if dhalf != 0.0 else math.inf
            v_z = setup.v0 * axial_velocity_scaled(point, tval, eta)
            maslov = 2 * root.cycle - 2 if root.kind == "early" else 2 * root.cycle - 1
        else:
            s = cmath.sin(t)
            dhalf = (
                point.rho ** 2 * cmath.cos(t) / s ** 3
                + point.z ** 2 / t ** 3
                - t / eta ** 2
            )
            dens_an = pref / (t * s * s * dhalf)
            density = None
            v_z = None
            theta = phi = None
            maslov = None
        out.append(
            TrajectorySolution(
                flight_time=root,
                theta_p=theta,
                phi_p=phi,
                action_w=e_over_w * w,
                action_w_hbar=eps_quantum * w,
                maslov=maslov,
                density=density,
                density_analytic=dens_an,
                v_z=v_z,
            )
        )
    return out
