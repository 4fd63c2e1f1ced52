"""Caustic surfaces of the trajectory family, via temporal parametrization.

A caustic point carries two coalescing trajectories: the flight-time equation
eps(t) = 1 holds together with d eps/dt = 0.  Eliminating the destination
coordinates gives, per branch sign,

    z_pm(t)   = t^2 (t +- sqrt(A)) / (eta (t - tau)),
    rho_pm(t) = |sin t|/eta * sqrt( t tau [1 - ((t +- sqrt A)/(t - tau))^2] ),
    cos(theta'_pm) = t (tau +- sqrt(A)) / (eta (t - tau)),

with tau = tan t and A(tau, t) = tau^2 - eta^2 tau / t + eta^2.  Each
cyclotron period produces one caustic surface; focal-line segments on the
axis join their cusps.  Which branch is real follows from a small set of
inequalities resolved by :func:`branch_reality`; the larger root of
A(tan t, t) = 0 in a period defines the minimal flight time to the caustic,
and the critical force ratios solve eta = tan(eta/2).

Seven surface types arise and evolve into one another as eta grows:

    Ol -> Cl -> Sl -> Si -> Se -> Ce -> Oe

(onion-dome, conical-lid, smooth-dome; late/intermediate/early variants)
with boundaries at eta = 2(k-1)pi, eta_crit_k, (2k-1)pi, and 2 k pi.

Numerical notes: tan t is evaluated after argument reduction mod pi; the
cancellation-prone combinations t - sqrt(A) and tau - sqrt(A) are computed
through their algebraic conjugates, which keeps the parametrization accurate
through the half-period seam where tau diverges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DomainError, RefinementError
from .scales import ScaledPoint

_PI = math.pi

# Equality band for the special force ratios (conical lids, bifurcations,
# orbit creation); measure-zero cases must stay reachable from the CLI.
_ETA_BAND = 1e-9


@dataclass(frozen=True)
class CausticSample:
    """One caustic point: parameter time, branch sign, position, launch angle."""

    t: float
    branch: str  # '+' | '-'
    rho: float
    z: float
    cos_theta_p: float


@dataclass(frozen=True)
class IrregularPoint:
    """Distinguished point of the parametrization with closed-form location.

    kind is one of RadialMax, SnakeEndpoint, CausticTop, MinimalTime,
    CuspDown, CuspUp (generic) or Umbilic, Bifurcation, OrbitCreation
    (special force ratios).  expansion holds the leading local power law as
    (exponent, prefactor) for |d rho| ~ prefactor * |d z|**exponent where a
    closed form is known, else None.
    """

    kind: str
    t0: float
    z0: float
    rho0: float
    expansion: tuple[float, float] | None = None


@dataclass
class CausticCurve:
    """Ordered trace of one caustic surface (period k) with its metadata."""

    cycle: int
    type_label: str
    samples: list[CausticSample]
    irregulars: list[IrregularPoint]
    focal_segment: tuple[float, float] | None


@dataclass(frozen=True)
class BranchReality:
    plus: bool
    minus: bool


def _tan_reduced(t: float) -> float:
    """tan t; libm performs exact internal argument reduction, which keeps
    the value accurate for large t and consistent with sin/cos in the
    flight-time residuals (a manual mod-pi reduction with float pi would
    lose relative accuracy next to the cusps)."""
    return math.tan(t)


def _radicand_a(tau: float, t: float, eta: float) -> float:
    return tau * tau - eta * eta * tau / t + eta * eta


def tau_larger_root(t: float, eta: float) -> float:
    """Larger root tau_> of A(tau, t) = 0, defined for t <= eta/2."""
    disc = max(0.0, 1.0 - 4.0 * t * t / (eta * eta))
    return eta * eta / (2.0 * t) * (1.0 + math.sqrt(disc))


def branch_reality(t: float, eta: float) -> BranchReality:
    """Which of the two parametrization branches is real at time t.

    Rules: for tau < 0 the (+) branch is always real and the (-) branch iff
    t <= eta/2; for tau > 0 and t > eta/2 only (-) is real; for tau > 0 and
    t <= eta/2 both are real iff tau >= tau_>; at complete orbits (tau = 0)
    both branches touch the axis.
    """
    if t <= 0:
        raise DomainError("caustic parameter time must be positive")
    tau = _tan_reduced(t)
    half = 0.5 * eta
    if tau == 0.0:
        return BranchReality(plus=True, minus=True)
    if t > half:
        return BranchReality(plus=tau < 0.0, minus=tau > 0.0)
    if tau < 0.0:
        return BranchReality(plus=True, minus=True)
    both = tau >= tau_larger_root(t, eta)
    return BranchReality(plus=both, minus=both)


def caustic_point(t: float, branch: str, eta: float):
    """Caustic sample on the given branch, or None where it is not real."""
    if t <= 0:
        raise DomainError("caustic parameter time must be positive")
    if branch not in ("+", "-"):
        raise DomainError("branch must be '+' or '-'")
    reality = branch_reality(t, eta)
    if not (reality.plus if branch == "+" else reality.minus):
        return None
    tau = _tan_reduced(t)
    a = _radicand_a(tau, t, eta)
    if a < 0.0:
        return None
    sa = math.sqrt(a)
    denom = t - tau
    # Conjugate forms tame the cancellations at large |tau| and near tau = t:
    #   t - sqrt A   = (t^2 - A) / (t + sqrt A)
    #   tau + sqrt A = eta^2 (tau - t) / (t (tau - sqrt A))   (for tau < 0)
    t2_minus_a = (t * t - eta * eta) + tau * (eta * eta / t - tau)
    u_plus = t + sa
    if tau >= 0.0:
        tau_plus_sa = tau + sa
    else:
        tau_plus_sa = eta * eta * (tau - t) / (t * (tau - sa))
    if branch == "+":
        ratio = u_plus / denom
        one_minus_r = -tau_plus_sa / denom
        z = t * t * ratio / eta
        cos_th = t * tau_plus_sa / (eta * denom)
    else:
        ratio = t2_minus_a / (denom * u_plus)
        one_minus_r = eta * eta / (t * tau_plus_sa)
        z = t * t * ratio / eta
        cos_th = -eta / tau_plus_sa
    one_plus_r = 2.0 - one_minus_r
    st = abs(math.sin(t))
    rad = t * tau * one_minus_r * one_plus_r
    rho = st * math.sqrt(max(rad, 0.0)) / eta
    return CausticSample(t=t, branch=branch, rho=rho, z=z, cos_theta_p=cos_th)


def critical_eta(k: int) -> float:
    """k-th root of eta = tan(eta/2), in (2(k-1)pi, (2k-1)pi)."""
    if k < 1:
        raise DomainError("k must be >= 1")
    lo = 2.0 * (k - 1) * _PI + 1e-12
    hi = (2 * k - 1) * _PI - 1e-12
    f = lambda x: x - math.tan(0.5 * x)
    flo = f(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if flo * fm <= 0.0:
            hi = mid
        else:
            lo = mid
            flo = fm
        if hi - lo < 1e-13:
            break
    return 0.5 * (lo + hi)


def minimal_time(k: int, eta: float):
    """Smallest flight time to the period-k caustic, where A(tan t, t) = 0.

    Exists only when the period lies below t = eta/2 and eta exceeds the
    critical ratio for this period; returns None otherwise.
    """
    if k < 1:
        raise DomainError("k must be >= 1")
    lo = (k - 1) * _PI + 1e-12
    if lo >= 0.5 * eta:
        return None
    hi = min((k - 0.5) * _PI - 1e-12, 0.5 * eta)
    f = lambda t: math.tan(t) - tau_larger_root(t, eta)
    flo, fhi = f(lo), f(hi)
    if flo >= 0.0 or fhi <= 0.0:
        return None
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-14:
            break
    return 0.5 * (lo + hi)


def classify_caustic(k: int, eta: float) -> str:
    """Type label of the period-k caustic at force ratio eta."""
    if k < 1 or eta <= 0:
        raise DomainError("need k >= 1 and eta > 0")
    lo = 2.0 * (k - 1) * _PI
    hi = 2.0 * k * _PI
    if abs(eta - hi) < _ETA_BAND:
        return "Ce"
    if k > 1 and abs(eta - lo) < _ETA_BAND:
        return "Cl"
    if eta > hi:
        return "Oe"
    if eta < lo:
        return "Ol"
    ec = critical_eta(k)
    if abs(eta - ec) < _ETA_BAND or eta <= ec:
        return "Sl"
    if eta <= (2 * k - 1) * _PI + _ETA_BAND:
        return "Si"
    return "Se"


def _cusp_points(k: int, eta: float):
    kp = k * _PI
    down = IrregularPoint(
        kind="CuspDown",
        t0=kp,
        z0=kp * (kp + eta) / eta,
        rho0=0.0,
        expansion=(1.5, math.sqrt(8.0 * eta * eta / (27.0 * kp * (eta + 2.0 * kp) ** 2))),
    )
    pts = [down]
    if abs(eta - 2.0 * kp) >= _ETA_BAND:
        pts.append(
            IrregularPoint(
                kind="CuspUp",
                t0=kp,
                z0=kp * (kp - eta) / eta,
                rho0=0.0,
                expansion=(
                    1.5,
                    math.sqrt(8.0 * eta * eta / (27.0 * kp * (eta - 2.0 * kp) ** 2)),
                ),
            )
        )
    return pts


def irregular_points(k: int, eta: float):
    """All irregular points of the period-k parametrization at this eta.

    Positions are the closed forms of the local analysis; the half-period
    point is the radial maximum (rho = 1 at z = +t0^2/eta), and for
    eta > (2k-1)pi it is visited a second time as the endpoint of the snake
    closed orbit at z = -t0^2/eta, the orbit's turning point.
    """
    if k < 1 or eta <= 0:
        raise DomainError("need k >= 1 and eta > 0")
    t_half = (k - 0.5) * _PI
    ec = critical_eta(k)
    pts: list[IrregularPoint] = []

    special_orbit = abs(eta - (2 * k - 1) * _PI) < _ETA_BAND
    if not special_orbit:
        pts.append(
            IrregularPoint(
                kind="RadialMax",
                t0=t_half,
                z0=t_half * t_half / eta,
                rho0=1.0,
                expansion=(2.0, eta * eta / (2.0 * t_half ** 2 * (eta * eta + 4.0))),
            )
        )
        if eta > (2 * k - 1) * _PI:
            rho0 = math.sqrt(eta * eta - 4.0 * t_half * t_half) / eta
            pts.append(
                IrregularPoint(
                    kind="SnakeEndpoint",
                    t0=t_half,
                    z0=-t_half * t_half / eta,
                    rho0=rho0,
                    expansion=(1.0, 2.0 / (eta * rho0)),
                )
            )

    in_dome_range = 2.0 * (k - 1) * _PI < eta < 2.0 * k * _PI
    special_umbilic = abs(eta - 2.0 * k * _PI) < _ETA_BAND
    special_bifurcation = abs(eta - ec) < _ETA_BAND
    if (
        in_dome_range
        and not special_bifurcation
        and not special_orbit
        and not special_umbilic
    ):
        half = 0.5 * eta
        pts.append(
            IrregularPoint(
                kind="CausticTop",
                t0=half,
                z0=-0.25 * eta,
                rho0=0.0,
                expansion=(0.5, math.sqrt(4.0 / eta) * abs(math.sin(half))),
            )
        )

    tmin = minimal_time(k, eta)
    if tmin is not None and not special_bifurcation:
        tanm = math.tan(tmin)
        rho0 = math.sqrt(max(math.sin(tmin) ** 2 - eta * eta * math.cos(tmin) ** 2, 0.0))
        pts.append(
            IrregularPoint(
                kind="MinimalTime",
                t0=tmin,
                z0=-eta * tmin * tmin / (tanm * tanm),
                rho0=rho0,
                expansion=(1.0, abs(eta * math.sin(2.0 * tmin) / (2.0 * rho0 * tmin)))
                if rho0 > 0
                else None,
            )
        )

    pts.extend(_cusp_points(k, eta))

    if special_umbilic:
        pts.append(
            IrregularPoint(
                kind="Umbilic", t0=k * _PI, z0=-0.25 * eta, rho0=0.0, expansion=(1.0, 1.0)
            )
        )
    if special_bifurcation:
        pts.append(
            IrregularPoint(
                kind="Bifurcation",
                t0=0.5 * eta,
                z0=-0.25 * eta,
                rho0=0.0,
                expansion=(0.5, math.sqrt(4.0 * eta * eta / (1.0 + eta * eta))),
            )
        )
    if special_orbit:
        pts.append(
            IrregularPoint(
                kind="OrbitCreation",
                t0=t_half,
                z0=-0.25 * eta,
                rho0=0.0,
                expansion=(0.5, math.sqrt(4.0 / eta)),
            )
        )
    pts.sort(key=lambda p: p.t0)
    return pts


# ----------------------------------------------------------------------
# Curve tracing
# ----------------------------------------------------------------------

def _itinerary(k: int, eta: float, label: str):
    """Legs (t_start, t_end, branch) following the branch-switch itinerary.

    Times run from the top of the surface to the lower cusp; a decreasing leg
    is encoded by t_start > t_end.
    """
    t_half = (k - 0.5) * _PI
    t_cusp = k * _PI
    t_prev = (k - 1) * _PI
    half_eta = 0.5 * eta
    if label in ("Ol", "Cl"):
        return [(t_prev, t_half, "-"), (t_half, t_cusp, "+")]
    if label == "Sl":
        return [(half_eta, t_half, "-"), (t_half, t_cusp, "+")]
    tmin = minimal_time(k, eta)
    if tmin is None:
        # at the bifurcation ratio the dome top and minimal time coincide
        tmin = half_eta
    if label == "Si":
        return [
            (half_eta, tmin, "+"),
            (tmin, t_half, "-"),
            (t_half, t_cusp, "+"),
        ]
    if label in ("Se", "Ce", "Oe"):
        t_top = t_cusp if label in ("Ce", "Oe") else half_eta
        return [
            (t_top, t_half, "-"),
            (t_half, tmin, "+"),
            (tmin, t_half, "-"),
            (t_half, t_cusp, "+"),
        ]
    raise DomainError(f"unknown caustic label {label!r}")


def _leg_samples(t0, t1, branch, eta, chord, cap):
    """Adaptively sample one leg so consecutive points are closer than chord.

    Endpoints are nudged into the leg interior; refinement is depth-first on
    a stack so the output stays ordered and the cost stays linear in the
    sample count.
    """
    span = abs(t1 - t0)
    nudge = max(1e-12, 3e-8 * span)
    a = t0 + math.copysign(nudge, t1 - t0)
    b = t1 - math.copysign(nudge, t1 - t0)
    n0 = 32
    params = [a + (b - a) * i / n0 for i in range(n0 + 1)]
    values = [caustic_point(t, branch, eta) for t in params]
    out = [values[0]] if values[0] is not None else []
    stack = [
        (params[i], values[i], params[i + 1], values[i + 1])
        for i in range(n0 - 1, -1, -1)
    ]
    count = n0 + 1
    while stack:
        ta, va, tb, vb = stack.pop()
        split = False
        if va is not None and vb is not None:
            gap = math.hypot(va.rho - vb.rho, va.z - vb.z)
            split = gap > chord and abs(tb - ta) > 1e-13
        elif abs(tb - ta) > 1e-12:
            split = True
        if not split:
            if vb is not None:
                out.append(vb)
            continue
        count += 1
        if count > cap:
            raise RefinementError("caustic sampling cap reached before chord target")
        tm = 0.5 * (ta + tb)
        vm = caustic_point(tm, branch, eta)
        stack.append((tm, vm, tb, vb))
        stack.append((ta, va, tm, vm))
    return out


def trace_caustic(k: int, eta: float, chord: float = 1e-3, max_samples: int = 10 ** 6):
    """Trace the period-k caustic following its itinerary.

    Samples run from the surface's highest point down to the lower cusp; the
    focal segment joins the cusp pair z = k pi (k pi -+ eta)/eta (the curve's
    own cusps for early types, the link to the next surface otherwise).
    """
    label = classify_caustic(k, eta)
    legs = _itinerary(k, eta, label)
    samples: list[CausticSample] = []
    for (t0, t1, branch) in legs:
        seg = _leg_samples(t0, t1, branch, eta, chord, max_samples)
        if samples and seg:
            # drop duplicated switch point
            if (
                math.hypot(seg[0].rho - samples[-1].rho, seg[0].z - samples[-1].z)
                < 10 * chord
            ):
                seg = seg[1:]
        samples.extend(seg)
        if len(samples) > max_samples:
            raise RefinementError("caustic sampling cap exceeded")
    kp = k * _PI
    focal = (kp * (kp - eta) / eta, kp * (kp + eta) / eta)
    return CausticCurve(
        cycle=k,
        type_label=label,
        samples=samples,
        irregulars=irregular_points(k, eta),
        focal_segment=focal,
    )


# ----------------------------------------------------------------------
# Local power-law verification
# ----------------------------------------------------------------------

def _sample_near(point: IrregularPoint, eta: float, k: int):
    """Caustic samples on a shrinking parameter ladder around t0."""
    t0 = point.t0
    scale = min(0.2, 0.45 * _PI)
    ladder = [scale * (0.5 ** j) for j in range(4, 26)]
    out = []
    for dt in ladder:
        for sgn in (-1.0, 1.0):
            t = t0 + sgn * dt
            if t <= 0:
                continue
            for branch in ("+", "-"):
                s = caustic_point(t, branch, eta)
                if s is None:
                    continue
                dz = s.z - point.z0
                drho = s.rho - point.rho0
                if abs(dz) < 1e-13 or abs(drho) < 1e-13:
                    continue
                out.append((dz, drho))
    return out


def local_expansion_check(point: IrregularPoint, eta: float, k: int):
    """Fit |d rho - rho0| ~ C |dz|^p near an irregular point.

    Returns (exponent, prefactor) from a least-squares fit of
    log|drho| vs log|dz| over samples in a shrinking neighbourhood; only
    samples consistent with the point's own branch geometry (distance to the
    point smaller than to any other irregular point) are used.
    """
    pts = _sample_near(point, eta, k)
    others = [
        q for q in irregular_points(k, eta)
        if (q.z0, q.rho0) != (point.z0, point.rho0)
    ]
    sel = []
    for dz, drho in pts:
        z = point.z0 + dz
        rho = point.rho0 + drho
        d_self = math.hypot(dz, drho)
        d_other = min(
            (math.hypot(z - q.z0, rho - q.rho0) for q in others), default=math.inf
        )
        if d_self < 0.25 * d_other:
            sel.append((dz, drho))
    if len(sel) < 6:
        raise RefinementError("not enough nearby caustic samples for a local fit")
    lx = [math.log(abs(dz)) for dz, _ in sel]
    ly = [math.log(abs(dr)) for _, dr in sel]
    n = len(lx)
    sx = sum(lx)
    sy = sum(ly)
    sxx = sum(v * v for v in lx)
    sxy = sum(u * v for u, v in zip(lx, ly))
    slope = (n * sxy - sx * sy) / (n * sxx - sx * sx)
    intercept = (sy - slope * sx) / n
    return slope, math.exp(intercept)


def caustic_radii_at_plane(z: float, eta: float, k_range=None, chord: float = 1e-4):
    """Scaled radii where caustic curves intersect the plane at height z.

    Intersections are located on the traced curves by sign change of
    z(t) - z along each itinerary.
    """
    from .classical import cycle_range
    from .errors import NoRealSolutionError

    if k_range is None:
        try:
            k_range = cycle_range(z, eta)
        except NoRealSolutionError:
            return []
    radii = []
    for k in range(k_range[0], k_range[1] + 1):
        curve = trace_caustic(k, eta, chord=chord)
        s = curve.samples
        for i in range(len(s) - 1):
            za, zb = s[i].z - z, s[i + 1].z - z
            if za == 0.0:
                radii.append((k, s[i].rho))
            elif za * zb < 0.0:
                f = za / (za - zb)
                radii.append((k, s[i].rho + f * (s[i + 1].rho - s[i].rho)))
    return radii
