"""One-dimensional dipole (double well or cosine) on a finite-difference grid.

Units: hbar = 1 and the cavity frequency omega_c = 1, so every energy returned
here is in units of omega_c. Positions are the dimensionless ``z = x / x0``.

The matter Hamiltonian is

    H_m = E_d [p_z^2 / 2 - beta z^2 / 2 + z^4 / 4]

and the dipole-gauge version adds ``omega_c * lambda_c**2 * z**2`` where
``lambda_c = q A0 x0`` is the bare coupling knob.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import ConfigError, ConvergenceError, GridTooSmallError

BOUNDARY_DECAY_TOL = 1e-10


@dataclass(frozen=True)
class DipoleSpec:
    """Parameters of the dipole and of its position grid.

    ``potential`` selects ``"double_well"`` (uses ``beta``) or ``"cosine"``
    (transmon-like ``-ej * cos(z - phi_ext)``, in units of ``e_d``).
    """

    beta: float = 3.8
    e_d: float = 63.812
    lambda_c: float = 0.0
    grid_half_width: float = 6.0
    grid_points: int = 4096
    n_levels: int = 18
    potential: str = "double_well"
    ej: float = 0.0
    phi_ext: float = 0.0

    def validate(self):
        if self.potential not in ("double_well", "cosine"):
            raise ConfigError(f"unknown potential {self.potential!r}", "potential")
        if self.potential == "double_well" and not self.beta > 0:
            raise ConfigError(f"beta must be > 0, got {self.beta}", "beta")
        if self.potential == "cosine" and not self.ej > 0:
            raise ConfigError(f"ej must be > 0 for a cosine potential, got {self.ej}", "ej")
        if not self.e_d > 0:
            raise ConfigError(f"e_d must be > 0, got {self.e_d}", "e_d")
        if self.grid_points < 64:
            raise ConfigError(f"grid_points must be >= 64, got {self.grid_points}", "grid_points")
        if not self.grid_half_width > 0:
            raise ConfigError("grid_half_width must be > 0", "grid_half_width")
        if self.n_levels < 2:
            raise ConfigError("n_levels must be >= 2", "n_levels")
        if self.n_levels > self.grid_points:
            raise ConfigError("n_levels exceeds grid_points", "n_levels")
        return self


@dataclass(frozen=True)
class MatterEigensystem:
    """Lowest eigenpairs of the dipole and its z / p_z matrix elements.

    ``wavefunctions[:, n]`` is normalised so that ``sum(|psi|^2) * dz == 1``.
    ``x_elems[m, n] = <m|z|n>`` (real symmetric) and
    ``p_elems[m, n] = <m|p_z|n>`` (imaginary antisymmetric).
    """

    energies: np.ndarray
    wavefunctions: np.ndarray
    x_elems: np.ndarray
    p_elems: np.ndarray
    shifted: bool
    z: np.ndarray
    e_d: float

    @property
    def gap(self):
        return float(self.energies[1] - self.energies[0])

    @property
    def dz(self):
        return float(self.z[1] - self.z[0])


def _potential(spec, z):
    if spec.potential == "double_well":
        return -spec.beta * z**2 / 2 + z**4 / 4
    return -spec.ej * np.cos(z - spec.phi_ext)


def _tridiagonal(spec, include_shift):
    z = np.linspace(-spec.grid_half_width, spec.grid_half_width, spec.grid_points)
    h = z[1] - z[0]
    diag = spec.e_d * (1.0 / h**2 + _potential(spec, z))
    if include_shift:
        diag = diag + spec.lambda_c**2 * z**2
    off = np.full(spec.grid_points - 1, -spec.e_d / (2.0 * h**2))
    return z, h, diag, off


def solve_dipole(spec: DipoleSpec, include_shift: bool = False, n_levels: int | None = None,
                 residual_tol: float = 1e-8) -> MatterEigensystem:
    """Diagonalise the dipole on the grid and fill the transition matrix elements.

    The kinetic term uses the three-point Laplacian and ``p_z`` is the central
    first difference; with this pairing ``[z, H] = i E_d p_z`` holds exactly on
    the grid, so ``<n|p_z|l> = i (E_n - E_l) <n|z|l> / E_d`` to rounding.

    Raises
    ------
    GridTooSmallError
        If either of the two lowest eigenfunctions exceeds 1e-10 at the grid edge.
    ConvergenceError
        If an eigenpair residual exceeds ``residual_tol`` (relative to ``E_d``).
    """
    spec.validate()
    n_levels = spec.n_levels if n_levels is None else n_levels
    z, h, diag, off = _tridiagonal(spec, include_shift)
    energies, vecs = eigh_tridiagonal(diag, off, select="i", select_range=(0, n_levels - 1))

    hv = diag[:, None] * vecs
    hv[:-1] += off[:, None] * vecs[1:]
    hv[1:] += off[:, None] * vecs[:-1]
    resid = np.linalg.norm(hv - vecs * energies, axis=0)
    if resid.max() > residual_tol * spec.e_d:
        raise ConvergenceError(f"eigensolver residual {resid.max():.3e} too large", resid)

    # fix the sign so that the largest-|psi| sample on the right half is positive
    half = spec.grid_points // 2
    for n in range(vecs.shape[1]):
        idx = half + np.argmax(np.abs(vecs[half:, n]))
        if vecs[idx, n] < 0:
            vecs[:, n] *= -1

    psi = vecs / np.sqrt(h)
    edge = np.abs(psi[[0, -1], :2]).max()
    if edge > BOUNDARY_DECAY_TOL:
        raise GridTooSmallError(
            f"lowest eigenfunctions reach {edge:.2e} at |z| = {spec.grid_half_width}; "
            "increase grid_half_width"
        )

    x_elems = vecs.T @ (z[:, None] * vecs)
    x_elems = 0.5 * (x_elems + x_elems.T)
    dvecs = np.zeros_like(vecs)
    dvecs[1:-1] = (vecs[2:] - vecs[:-2]) / (2 * h)
    dvecs[0] = vecs[1] / (2 * h)
    dvecs[-1] = -vecs[-2] / (2 * h)
    d1 = vecs.T @ dvecs
    d1 = 0.5 * (d1 - d1.T)
    p_elems = -1j * d1

    return MatterEigensystem(
        energies=energies,
        wavefunctions=psi,
        x_elems=x_elems,
        p_elems=p_elems,
        shifted=include_shift,
        z=z,
        e_d=spec.e_d,
    )


def coupling_from_lambda(spec: DipoleSpec, lambda_c: float) -> tuple[float, float]:
    """Return ``(g, delta_prime)`` of the shifted dipole at a given ``lambda_c``."""
    eig = solve_dipole(replace(spec, lambda_c=lambda_c), include_shift=True, n_levels=2)
    return abs(lambda_c * eig.x_elems[0, 1]), eig.gap


def lambda_for_coupling(spec: DipoleSpec, g: float, tol: float = 1e-10,
                        damping: float = 0.5, max_iter: int = 500) -> float:
    """Solve ``g = lambda |<1'|z|0'>(lambda)|`` for ``lambda`` by damped iteration."""
    if g < 0:
        raise ConfigError(f"coupling must be non-negative, got {g}", "g")
    if g == 0:
        return 0.0
    bare = solve_dipole(replace(spec, lambda_c=0.0), include_shift=False, n_levels=2)
    lam = g / abs(bare.x_elems[0, 1])
    step = np.inf
    for _ in range(max_iter):
        eig = solve_dipole(replace(spec, lambda_c=lam), include_shift=True, n_levels=2)
        target = g / abs(eig.x_elems[0, 1])
        step = target - lam
        lam = lam + damping * step
        if abs(step) < tol:
            return lam
    raise ConvergenceError(f"lambda self-consistency not converged for g={g}", abs(step))


def renormalized_gap(spec: DipoleSpec, g_values) -> list[tuple[float, float, float]]:
    """Dipole-gauge gap versus coupling.

    Returns rows ``(g, delta_prime, lambda_c)`` where ``lambda_c`` is the
    self-consistent bare knob producing ``g`` and ``delta_prime = E1' - E0'``.
    """
    rows = []
    for g in g_values:
        g = float(g)
        lam = lambda_for_coupling(spec, g)
        eig = solve_dipole(replace(spec, lambda_c=lam), include_shift=lam != 0.0, n_levels=2)
        rows.append((g, eig.gap, lam))
    return rows
