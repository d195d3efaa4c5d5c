"""Lumped-element circuit realisation of the cavity array with a transmon-like qubit.

An array of LC resonators ``(C_r, L_r)`` coupled in series through ``L_c``;
the qubit ``(C_J, E_J)`` is attached to the capacitor of the central
resonator. With ``1/(2 L_S) = 1/(2 L_r) + 1/L_c``:

* ``omega_r = (L_S C_r)^(-1/2)``, ``xi_r = omega_r L_S / L_c``,
  ``omega_k = omega_r + 2 xi_r cos k``;
* ``g_k = sqrt(1 / (2 L_S omega_r N)) omega_k`` (hbar = 1), proportional to
  ``omega_k`` as for the dipole-gauge couplings;
* the qubit flux acquires the quadratic term ``(1/N) sum_k alpha_k phi_q^2`` with
  ``alpha_k = 1/(2 L_S) + cos(k)/L_c``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .matter import DipoleSpec


@dataclass(frozen=True)
class CircuitSpec:
    C_r: float = 1.0
    L_r: float = 1.0
    L_c: float = 10.0
    C_J: float = 1.0
    E_J: float = 0.0
    phi_ext: float = 0.0

    def validate(self):
        for name in ("C_r", "L_r", "L_c", "C_J"):
            val = getattr(self, name)
            if not val > 0:
                raise ConfigError(f"{name} must be > 0, got {val}", name)
        if self.E_J < 0:
            raise ConfigError("E_J must be >= 0", "E_J")
        return self

    @property
    def L_sigma(self):
        return 1.0 / (1.0 / self.L_r + 2.0 / self.L_c)


@dataclass(frozen=True)
class CircuitModel:
    """Model parameters in raw circuit units and normalised to ``omega_r``."""

    omega_r: float
    xi_r: float
    k: np.ndarray
    omega_k: np.ndarray
    g_k: np.ndarray
    flux_shift: float
    alpha_k: np.ndarray
    l_sigma: float

    @property
    def normalized(self):
        """``(xi/omega_r, omega_k/omega_r, g_k/omega_r, flux_shift/omega_r)``."""
        w = self.omega_r
        return self.xi_r / w, self.omega_k / w, self.g_k / w, self.flux_shift / w

    @property
    def g_center(self):
        """Coupling of a mode at the band centre ``omega_k = omega_r``."""
        return self.omega_r * math.sqrt(1.0 / (2 * self.l_sigma * self.omega_r * len(self.k)))


def mode_grid(n_modes):
    if n_modes < 1:
        raise ConfigError("n_modes must be >= 1", "n_modes")
    m = np.arange(n_modes) - (n_modes - 1) // 2
    return 2 * np.pi * m / n_modes


def circuit_to_model(c: CircuitSpec, n_modes: int = 101) -> CircuitModel:
    c.validate()
    ls = c.L_sigma
    omega_r = 1.0 / math.sqrt(ls * c.C_r)
    xi_r = omega_r * ls / c.L_c
    k = mode_grid(n_modes)
    omega_k = omega_r + 2 * xi_r * np.cos(k)
    g_k = np.sqrt(1.0 / (2 * ls * omega_r * n_modes)) * omega_k
    alpha_k = 1.0 / (2 * ls) + np.cos(k) / c.L_c
    return CircuitModel(omega_r, xi_r, k, omega_k, g_k, float(alpha_k.sum() / n_modes), alpha_k, ls)


def model_to_circuit(omega_r: float, xi_r: float, C_r: float = 1.0, g_center: float | None = None,
                     n_modes: int = 101, C_J: float = 1.0, E_J: float = 0.0) -> CircuitSpec:
    """Invert :func:`circuit_to_model` for the array elements.

    With ``g_center`` given, ``L_S`` follows from the band-centre coupling
    ``g = sqrt(omega_r / (2 L_S N))`` and ``C_r`` is derived; otherwise ``C_r`` is
    kept and ``L_S = 1/(omega_r^2 C_r)``. Junction parameters are passed through.

    Raises
    ------
    ConfigError
        When ``xi_r >= omega_r / 2`` (``L_r`` would be negative or infinite).
    """
    if not omega_r > 0:
        raise ConfigError("omega_r must be > 0", "omega_r")
    if not xi_r > 0:
        raise ConfigError("xi_r must be > 0 (finite coupling inductance)", "xi_r")
    if not xi_r < omega_r / 2:
        raise ConfigError(f"infeasible: xi_r={xi_r} must be below omega_r/2={omega_r / 2}", "xi_r")
    if g_center is not None:
        if not g_center > 0:
            raise ConfigError("g_center must be > 0", "g_center")
        ls = omega_r / (2 * n_modes * g_center**2)
        C_r = 1.0 / (omega_r**2 * ls)
    else:
        ls = 1.0 / (omega_r**2 * C_r)
    L_c = omega_r * ls / xi_r
    inv_lr = 1.0 / ls - 2.0 / L_c
    return CircuitSpec(C_r=C_r, L_r=1.0 / inv_lr, L_c=L_c, C_J=C_J, E_J=E_J)


def circuit_matter_spec(c: CircuitSpec, n_modes: int = 101, grid_half_width: float = math.pi,
                        grid_points: int = 4096) -> DipoleSpec:
    """Qubit as a :class:`DipoleSpec` with a cosine potential, energies in units of ``omega_r``.

    ``Q_q^2/(2 C_J)`` gives ``e_d = 1/(C_J omega_r)``; ``E_J`` enters as
    ``-ej cos(z - phi_ext)`` with ``ej = E_J C_J`` (units of ``e_d``); the flux
    shift becomes ``lambda_c = sqrt(flux_shift / omega_r)``.
    """
    model = circuit_to_model(c, n_modes)
    e_d = 1.0 / (c.C_J * model.omega_r)
    return DipoleSpec(e_d=e_d, potential="cosine", ej=c.E_J * c.C_J, phi_ext=c.phi_ext,
                      lambda_c=math.sqrt(model.flux_shift / model.omega_r),
                      grid_half_width=grid_half_width, grid_points=grid_points)
