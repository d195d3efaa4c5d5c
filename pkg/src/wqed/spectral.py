"""Spectral densities and RWA self-energies of a two-level dipole on a cavity array.

Dispersion ``omega_k = omega_c + 2 xi cos(k)``; the band is
``[omega_c - 2|xi|, omega_c + 2|xi|]`` and ``W(E) = sqrt(4 xi^2 - (E - omega_c)^2)``.

Sign conventions
----------------
The retarded self-energy ``Sigma(E + i0)`` has a negative imaginary part,
``Im Sigma = -J(E)/2``. :class:`SelfEnergyValue` keeps the signed value and
also exposes ``half_width = J/2`` (the positive damping that enters the
transmission denominator).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BandEdgeError

BRANCHES = ("retarded", "advanced")


def band_width_factor(omega, xi, omega_c=1.0):
    """``sqrt(4 xi^2 - (omega - omega_c)^2)``; raises outside the open band."""
    omega = np.asarray(omega, dtype=float)
    arg = 4 * xi**2 - (omega - omega_c) ** 2
    if np.any(arg <= 0):
        raise BandEdgeError(f"frequency outside the open band ({omega_c - 2 * abs(xi)}, {omega_c + 2 * abs(xi)})")
    return np.sqrt(arg)


def in_band(omega, xi, omega_c=1.0):
    return np.abs(np.asarray(omega, dtype=float) - omega_c) < 2 * abs(xi)


def spectral_density_dipole(omega, g, xi, omega_c=1.0):
    """``J_D = 2 g^2 omega^2 / (omega_c^2 W(omega))``."""
    return 2 * g**2 * np.asarray(omega, dtype=float) ** 2 / (omega_c**2 * band_width_factor(omega, xi, omega_c))


def spectral_density_coulomb(omega, g_c, xi, omega_c=1.0):
    """``J_C = 2 g_C^2 / W(omega)`` (k-independent coupling)."""
    return 2 * g_c**2 / band_width_factor(omega, xi, omega_c)


def coulomb_coupling_weak(g, delta, omega_c=1.0):
    """Coulomb-gauge coupling equivalent to dipole coupling ``g`` at weak coupling.

    From ``<0|p|1> = i Delta <0|z|1>`` (units of the dipole energy scale):
    ``g_C = g Delta / omega_c``, which makes ``J_C(Delta) = J_D(Delta)``.
    """
    return g * delta / omega_c


def spectral_density_sum(omega, g_k, omega_k, width):
    """Discrete ``2 pi sum_k g_k^2 delta(omega - omega_k)`` with Lorentzian delta of half-width ``width``."""
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    lor = (width / np.pi) / ((omega[:, None] - omega_k[None, :]) ** 2 + width**2)
    return 2 * np.pi * (lor * g_k[None, :] ** 2).sum(axis=1)


def lattice_integral(E, n, xi, omega_c=1.0, branch="retarded"):
    """``I(E, n) = int_{-pi}^{pi} e^{ink} / (E - omega_c - 2 xi cos k) dk``.

    With ``a = (E - omega_c)/(2 xi)`` and ``z = e^{ik}`` the integrand has
    poles at the roots of ``z^2 - 2 a z + 1``. Inside the band the retarded
    (``E + i0``) and advanced (``E - i0``) prescriptions pick different roots;
    outside the band the result is real and uses the root with ``|z| < 1``.
    """
    if branch not in BRANCHES:
        raise ValueError(f"branch must be one of {BRANCHES}")
    n = abs(int(n))
    a = (E - omega_c) / (2 * xi)
    if abs(abs(a) - 1) < 1e-15:
        raise BandEdgeError(f"E={E} sits on a band edge")
    if abs(a) < 1:
        s = np.sqrt(1 - a * a)
        w_band = 2 * abs(xi) * s
        # root approached from inside the unit circle for E + i0
        z_in = a - 1j * np.sign(xi) * s
        if branch == "retarded":
            return -2j * np.pi * z_in**n / w_band
        return 2j * np.pi * np.conj(z_in) ** n / w_band
    root = np.sign(a) * np.sqrt(a * a - 1)
    z_in = a - root
    return complex(np.pi / xi * z_in**n / root)


@dataclass(frozen=True)
class SelfEnergyValue:
    """Self-energy at one energy; ``half_width = J(E)/2`` (zero outside the band)."""

    energy: float
    real_part: float
    imag_part: float
    half_width: float
    branch: str = "retarded"

    @property
    def value(self):
        return complex(self.real_part, self.imag_part)


def self_energy_rwa(E, g, xi, omega_c=1.0, branch="retarded") -> SelfEnergyValue:
    """Closed-form RWA self-energy of the dipole-gauge couplings ``g_k ~ omega_k``.

    ``Re = -(g^2/omega_c^2)(omega_c + E)`` and ``|Im| = g^2 E^2 / (omega_c^2 W(E))``
    inside the band.
    """
    if branch not in BRANCHES:
        raise ValueError(f"branch must be one of {BRANCHES}")
    re = -(g**2 / omega_c**2) * (omega_c + E)
    hw = 0.5 * float(spectral_density_dipole(E, g, xi, omega_c))
    im = -hw if branch == "retarded" else hw
    return SelfEnergyValue(float(E), float(re), float(im), hw, branch)


def self_energy_from_integrals(E, g, xi, omega_c=1.0, branch="retarded") -> complex:
    """Assemble the self-energy from three lattice integrals.

    ``omega_k^2 = (omega_c^2 + 2 xi^2) + 4 xi omega_c cos k + 2 xi^2 cos 2k`` so
    ``Sigma = g^2/(2 pi omega_c^2) [(omega_c^2 + 2xi^2) I0 + 4 xi omega_c I1 + 2 xi^2 I2]``.
    Valid both inside and outside the band.
    """
    i0, i1, i2 = (lattice_integral(E, n, xi, omega_c, branch) for n in (0, 1, 2))
    pref = g**2 / (2 * np.pi * omega_c**2)
    return pref * ((omega_c**2 + 2 * xi**2) * i0 + 4 * xi * omega_c * i1 + 2 * xi**2 * i2)


def self_energy_rwa_sum(E, model, eta=1e-6) -> complex:
    """``sum_k g_k^2 / (E + i eta - omega_k)`` over a finite mode table."""
    if not eta > 0:
        raise ValueError("eta must be > 0")
    return complex(np.sum(model.g_k**2 / (E + 1j * eta - model.omega)))


def self_energy_rwa_sum_extrapolated(E, model, eta=1e-4) -> complex:
    """Linear extrapolation ``eta -> 0`` from sums at ``eta`` and ``2 eta``."""
    return 2 * self_energy_rwa_sum(E, model, eta) - self_energy_rwa_sum(E, model, 2 * eta)
