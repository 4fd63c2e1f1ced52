"""Field/energy inputs and the dimensionless variables built from them.

An electron (mass m, charge -e) leaves a point source with kinetic energy E
inside uniform electric and magnetic fields, both along the symmetry axis and
oriented so the electric force pushes the electron toward positive z.  The
cyclotron motion supplies natural scales,

    omega_L = e B / (2 m)          (Larmor frequency)
    v0      = sqrt(2 E / m)        (launch speed)
    d       = v0 / omega_L         (largest cyclotron orbit diameter)

and every classical quantity is expressed in the dimensionless variables

    t = omega_L * t_phys,   rho = rho_phys / d,   z = z_phys / d.

One parameter survives the scaling, the ratio of magnetic to electric force

    eta = v0 * B / Efield.

The quantum treatment uses two more combinations:

    epsilon = E / (hbar * omega_L)                 (open-channel count scale)
    beta    = (2 m / (hbar e Efield)**2 * m ... )  see below
    zeta    = beta * e * Efield * z_phys           (linear-potential coordinate)

with beta = (2 m / (hbar**2 e**2 Efield**2))**(1/3), an inverse energy.  The
two equivalent forms of zeta,

    zeta = beta * e * Efield * z_phys = 2 * (2 epsilon**2 / eta)**(1/3) * z,

are cross-checked in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .constants import ELECTRON_MASS, ELEMENTARY_CHARGE, EV, HBAR
from .errors import DomainError


@dataclass(frozen=True)
class FieldSetup:
    """Field strengths, source energy, and every derived scale.

    Attributes
    ----------
    electric_field : float
        Electric field strength in V/m (> 0).
    magnetic_field : float
        Magnetic field strength in T (> 0).
    energy : float
        Source energy in J.  Negative only with ``quantum_only=True``.
    quantum_only : bool
        Marks a tunneling source (E <= 0); classical and semiclassical
        modules reject such setups.
    """

    electric_field: float
    magnetic_field: float
    energy: float
    quantum_only: bool = False

    def __post_init__(self):
        if not (self.electric_field > 0.0) or not math.isfinite(self.electric_field):
            raise DomainError("electric field must be positive and finite")
        if not (self.magnetic_field > 0.0) or not math.isfinite(self.magnetic_field):
            raise DomainError("magnetic field must be positive and finite")
        if not math.isfinite(self.energy):
            raise DomainError("energy must be finite")
        if self.energy <= 0.0 and not self.quantum_only:
            raise DomainError(
                "non-positive energy requires quantum_only=True (tunneling source)"
            )

    # -- frequency / length scales ------------------------------------

    @property
    def omega_l(self) -> float:
        """Larmor frequency e B / (2 m) in rad/s."""
        return ELEMENTARY_CHARGE * self.magnetic_field / (2.0 * ELECTRON_MASS)

    @property
    def v0(self) -> float:
        """Initial speed sqrt(2E/m) in m/s (classical sources only)."""
        self.require_classical()
        return math.sqrt(2.0 * self.energy / ELECTRON_MASS)

    @property
    def d(self) -> float:
        """Maximum cyclotron orbit diameter v0/omega_L in m."""
        return self.v0 / self.omega_l

    # -- dimensionless control parameters -----------------------------

    @property
    def eta(self) -> float:
        """Force ratio v0 * B / Efield."""
        return self.v0 * self.magnetic_field / self.electric_field

    @property
    def epsilon(self) -> float:
        """Energy in units of hbar * omega_L (may be negative)."""
        return self.energy / (HBAR * self.omega_l)

    @property
    def beta(self) -> float:
        """Inverse energy scale of the linear potential, 1/J."""
        return (
            2.0
            * ELECTRON_MASS
            / (HBAR * ELEMENTARY_CHARGE * self.electric_field) ** 2
        ) ** (1.0 / 3.0)

    def require_classical(self) -> None:
        if self.energy <= 0.0:
            raise DomainError(
                "setup is quantum-only (E <= 0); classical scales undefined"
            )


@dataclass(frozen=True)
class ScaledPoint:
    """Cylindrical destination point in units of the orbit diameter d."""

    rho: float
    z: float

    def __post_init__(self):
        if self.rho < 0.0:
            raise DomainError("rho must be non-negative")


def derive_scales(
    electric_v_per_m: float,
    magnetic_t: float,
    energy_ev: float,
    quantum_only: bool = False,
) -> FieldSetup:
    """Build a :class:`FieldSetup` from fields in V/m and T and energy in eV."""
    return FieldSetup(
        electric_field=float(electric_v_per_m),
        magnetic_field=float(magnetic_t),
        energy=float(energy_ev) * EV,
        quantum_only=quantum_only,
    )


def to_scaled(rho_m: float, z_m: float, setup: FieldSetup) -> ScaledPoint:
    """Convert a physical point (rho, z) in metres to scaled coordinates."""
    if rho_m < 0.0:
        raise DomainError("physical radius must be non-negative")
    d = setup.d
    return ScaledPoint(rho=rho_m / d, z=z_m / d)


def from_scaled(point: ScaledPoint, setup: FieldSetup) -> tuple[float, float]:
    """Inverse of :func:`to_scaled`; returns (rho_m, z_m)."""
    d = setup.d
    return point.rho * d, point.z * d


def scaled_z_quantum(z_m: float, setup: FieldSetup) -> float:
    """Dimensionless coordinate zeta = beta * e * Efield * z of the linear potential."""
    return setup.beta * ELEMENTARY_CHARGE * setup.electric_field * z_m
