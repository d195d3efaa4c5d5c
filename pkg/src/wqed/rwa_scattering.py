"""Closed-form single-photon transmission through a two-level dipole under the RWA.

The photon amplitude on the chain is ``e^{ikn} + r e^{-ikn}`` to the left and
``t e^{ikn}`` to the right, with ``r = t - 1``. Amplitudes follow the retarded
(outgoing-wave) convention, so ``t -> 1`` when the coupling vanishes.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import band_width_factor


@dataclass(frozen=True)
class TransmissionPoint:
    omega_k: float
    t: complex
    r: complex

    @property
    def T(self):
        return abs(self.t) ** 2

    @property
    def R(self):
        return abs(self.r) ** 2


def _t_dipole(omega, delta, g, xi, omega_c):
    if g == 0:
        return np.ones_like(omega, dtype=complex)  # uncoupled: no scattering
    a = omega - delta + (g**2 / omega_c**2) * (omega + omega_c)
    gamma = (g**2 * omega**2 / omega_c**2) / band_width_factor(omega, xi, omega_c)
    return a / (a + 1j * gamma)


def _t_coulomb(omega, delta, g_c, xi, omega_c):
    if g_c == 0:
        return np.ones_like(omega, dtype=complex)
    a = omega - delta
    gamma = g_c**2 / band_width_factor(omega, xi, omega_c)
    return a / (a + 1j * gamma)


def transmission_dipole_rwa(omega_k, delta, g, xi, omega_c=1.0):
    """Dipole-gauge RWA transmission (``g_k`` proportional to ``omega_k``).

    ``t = A / (A + i Gamma)`` with ``A = omega - delta + g^2 (omega + omega_c)/omega_c^2``
    and ``Gamma = g^2 omega^2 / (omega_c^2 W(omega))``. Accepts scalars or arrays;
    arrays return a complex ``t`` array instead of a :class:`TransmissionPoint`.
    """
    t = _t_dipole(np.asarray(omega_k, dtype=float), delta, g, xi, omega_c)
    if np.ndim(t) == 0:
        return TransmissionPoint(float(omega_k), complex(t), complex(t) - 1)
    return t


def transmission_coulomb_rwa(omega_k, delta, g_c, xi, omega_c=1.0):
    """Coulomb-gauge RWA transmission: flat coupling, no Lamb shift, zero pinned at ``delta``."""
    t = _t_coulomb(np.asarray(omega_k, dtype=float), delta, g_c, xi, omega_c)
    if np.ndim(t) == 0:
        return TransmissionPoint(float(omega_k), complex(t), complex(t) - 1)
    return t


def resonance_rwa(delta, g, omega_c=1.0, xi=None):
    """Zero of the dipole-gauge RWA transmission: ``omega_c (delta omega_c - g^2)/(omega_c^2 + g^2)``.

    With ``xi`` given, returns ``(omega_res, in_band)``.
    """
    w = omega_c * (delta * omega_c - g**2) / (omega_c**2 + g**2)
    if xi is None:
        return w
    return w, bool(abs(w - omega_c) < 2 * abs(xi))
