"""Single-photon scattering by boundary matching.

The infinite chain is split into a left lead (sites ``n < -h``), a central
region of ``M = 2h + 1`` cavities that contains the dipole, and a right lead
(``n > h``). The central region is diagonalised exactly within an
excitation-number cutoff. A scattering state at total energy
``E = E_0 + omega_in`` is written as

    sum_beta f_beta |beta>  +  sum_alpha sum_{n in leads} phi_alpha(n) a_n^dag |alpha>

with ``|alpha>, |beta>`` region eigenstates. In channel ``alpha`` the lead
photon carries ``omega_alpha = E - E_alpha``; open channels propagate
outwards, closed ones decay away from the region. Eliminating ``f_beta``
leaves a dense linear system for the lead amplitudes.

Lead amplitudes use ``phi(n) = t e^{ikn}`` (right) and
``phi(n) = delta_{alpha 0} e^{ik_0 n} + r e^{-ikn}`` (left), ``k`` in ``(0, pi)``
for open channels and ``|e^{ik}| < 1`` for closed ones.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import ConfigError, ConvergenceError
from .models import FockSector, WaveguideSpec, spin_boson_couplings

EDGE_POPULATION_TOL = 1e-6
POLE_TOL = 1e-7


@dataclass(frozen=True)
class ScattererEigensystem:
    """Eigenstates of the central region and the edge operators that couple them to the leads."""

    energies: np.ndarray
    states: np.ndarray
    edge_left: np.ndarray    # <alpha| a_{-h} |beta>
    edge_right: np.ndarray   # <alpha| a_{h} |beta>
    edge_population: np.ndarray  # <alpha| n_{-h} + n_{h} |alpha> / 2
    photon_number: np.ndarray
    parity: np.ndarray
    excitation_parity: np.ndarray
    omega_c: float
    xi: float
    region_size: int
    excitation_cutoff: int
    gauge: str
    rwa: bool
    delta: float
    g: float

    @property
    def ground_energy(self):
        return float(self.energies[0])

    @property
    def ground_edge_population(self):
        return float(self.edge_population[0])

    def is_localized(self, alpha, ratio=0.1):
        """True when the photon cloud of ``alpha`` does not reach the region edge.

        Compares the edge occupation with the mean photon number per site; a
        standing photon wave inside the region scores order one, a bound
        state decaying from the dipole scores far less.
        """
        n_ph = self.photon_number[alpha]
        if n_ph < 1e-12:
            return True
        per_site = n_ph / self.region_size
        return bool(self.edge_population[alpha] < ratio * per_site)


@dataclass
class Channel:
    alpha: int
    omega_out: float
    z: complex          # e^{ik}; |z| = 1 open, |z| < 1 closed
    is_open: bool
    localized: bool
    t: complex = 0j
    r: complex = 0j

    @property
    def k(self):
        return complex(-1j * np.log(self.z))

    def velocity(self, xi):
        return 2 * abs(xi) * abs(self.z.imag) if self.is_open else 0.0


@dataclass
class ScatteringResult:
    omega_in: float
    k_in: float
    t: complex
    r: complex
    channels: list = field(default_factory=list)
    flux_error: float = 0.0
    inelastic_transmittance: float = 0.0
    inelastic_reflectance: float = 0.0
    delocalized_flux: float = 0.0
    condition_number: float = 0.0

    @property
    def T(self):
        return abs(self.t) ** 2

    @property
    def R(self):
        return abs(self.r) ** 2

    @property
    def inelastic_flux(self):
        return self.inelastic_transmittance + self.inelastic_reflectance

    @property
    def bound_inelastic_flux(self):
        """Inelastic flux that leaves the region in a localized (bound) state."""
        return self.inelastic_flux - self.delocalized_flux

    @property
    def inelastic_proxy(self):
        """``(1 - T - R)/2``: missing elastic flux shared equally between the two sides."""
        return 0.5 * (1.0 - self.T - self.R)


def _parity_permutation(sector: FockSector):
    n = sector.n_sites
    perm = np.empty(sector.dim, dtype=int)
    for i, (s, pos) in enumerate(sector.states):
        perm[i] = sector.index[(s, tuple(sorted(n - 1 - p for p in pos)))]
    return perm


def build_scatterer(w: WaveguideSpec, delta: float, g: float, region_size: int = 7,
                    excitation_cutoff: int = 4, gauge: str = "dipole", rwa: bool = False,
                    check_edge: bool = True) -> ScattererEigensystem:
    """Diagonalise the central region (dipole + ``region_size`` cavities).

    Raises
    ------
    ConfigError
        If the region size is not odd, below 3, or above ``n_cavities - 4``.
    ConvergenceError
        If the ground state puts more than 1e-6 photons on the region edge
        (the leads would not start in vacuum); a larger region is needed.
    """
    if region_size % 2 == 0 or region_size < 3:
        raise ConfigError("region_size must be odd and >= 3", "region_size")
    if region_size > w.n_cavities - 4:
        raise ConfigError(f"region_size must be <= n_cavities - 4 = {w.n_cavities - 4}", "region_size")
    if excitation_cutoff < 1:
        raise ConfigError("excitation_cutoff must be >= 1", "excitation_cutoff")
    h = (region_size - 1) // 2
    sector = FockSector(region_size, 2, n_max=excitation_cutoff)
    couplings = [(D, site + h) for D, site in spin_boson_couplings(w, g, gauge, rwa)] if g != 0 else []
    ham = sector.hamiltonian(np.array([-delta / 2, delta / 2]), w.omega_c, w.xi, couplings).toarray()
    ham = 0.5 * (ham + ham.conj().T)
    # the coupling changes the excitation number by 0 or 2, so diagonalise each
    # excitation-parity block separately to keep eigenvectors parity-pure
    par = sector.excitations() % 2
    energies = np.empty(sector.dim)
    vecs = np.zeros((sector.dim, sector.dim), dtype=complex)
    col = 0
    for p in (0, 1):
        sel = np.nonzero(par == p)[0]
        if sel.size == 0:
            continue
        e, v = np.linalg.eigh(ham[np.ix_(sel, sel)])
        energies[col:col + sel.size] = e
        vecs[sel, col:col + sel.size] = v
        col += sel.size
    order = np.argsort(energies, kind="stable")
    energies, vecs = energies[order], vecs[:, order]

    a_left = sector.annihilation(0)
    a_right = sector.annihilation(region_size - 1)
    bl = vecs.conj().T @ (a_left @ vecs)
    br = vecs.conj().T @ (a_right @ vecs)
    n_left = np.einsum("ia,i,ia->a", vecs.conj(), sector.occupation(0), vecs).real
    n_right = np.einsum("ia,i,ia->a", vecs.conj(), sector.occupation(region_size - 1), vecs).real
    n_tot = np.einsum("ia,i,ia->a", vecs.conj(), sector.excitations() - sector.levels(), vecs).real
    perm = _parity_permutation(sector)
    parity = np.einsum("ia,ia->a", vecs.conj(), vecs[perm]).real
    exc_parity = np.einsum("ia,i,ia->a", vecs.conj(), (-1.0) ** sector.excitations(), vecs).real

    scat = ScattererEigensystem(
        energies=energies, states=vecs, edge_left=bl, edge_right=br,
        edge_population=0.5 * (n_left + n_right), photon_number=n_tot, parity=parity,
        excitation_parity=exc_parity,
        omega_c=w.omega_c, xi=w.xi, region_size=region_size,
        excitation_cutoff=excitation_cutoff, gauge=gauge, rwa=rwa, delta=delta, g=g,
    )
    if check_edge and scat.ground_edge_population > EDGE_POPULATION_TOL:
        raise ConvergenceError(
            f"ground-state edge photon population {scat.ground_edge_population:.2e} exceeds "
            f"{EDGE_POPULATION_TOL}; increase region_size", scat.ground_edge_population)
    return scat


def _lead_root(omega, omega_c, xi):
    """``z = e^{ik}`` for a lead photon at ``omega``: outgoing if in band, decaying otherwise."""
    a = (omega - omega_c) / (2 * xi)
    if abs(a) < 1:
        # outgoing: group velocity -2 xi sin k > 0
        s = math.sqrt(1 - a * a)
        return complex(a, -np.sign(xi) * s), True
    root = math.copysign(math.sqrt(a * a - 1), a)
    return complex(a - root), False


def select_channels(scat: ScattererEigensystem, omega_in: float, n_evanescent: int = 8):
    E = scat.ground_energy + omega_in
    open_, closed = [], []
    for alpha, e_a in enumerate(scat.energies):
        om = E - e_a
        z, is_open = _lead_root(om, scat.omega_c, scat.xi)
        ch = Channel(alpha, om, z, is_open, scat.is_localized(alpha))
        (open_ if is_open else closed).append(ch)
    closed.sort(key=lambda c: abs(c.z), reverse=True)
    return open_ + closed[:n_evanescent]


def scatter_single_photon(scat: ScattererEigensystem, omega_in: float,
                          n_evanescent: int = 8) -> ScatteringResult:
    """Solve the matching equations for a photon incident from the left in channel 0.

    Region states with ``|E - E_beta| < POLE_TOL`` enter through auxiliary
    unknowns ``y_beta = <beta|edge psi> / (E - E_beta)`` (a bordered system), so
    an incoming energy that hits a region eigenvalue exactly stays regular.
    """
    lo, hi = scat.omega_c - 2 * abs(scat.xi), scat.omega_c + 2 * abs(scat.xi)
    if not lo < omega_in < hi:
        raise ConfigError(f"omega_in={omega_in} outside the open band ({lo}, {hi})", "omega_in")
    xi = scat.xi
    h = (scat.region_size - 1) // 2
    E = scat.ground_energy + omega_in
    chans = select_channels(scat, omega_in, n_evanescent)
    idx = np.array([c.alpha for c in chans])
    K = len(chans)
    z = np.array([c.z for c in chans])
    is_open = np.array([c.is_open for c in chans])

    # edge couplings, rows (right channels; left channels), one column per region state
    B = np.vstack([scat.edge_right[idx, :], scat.edge_left[idx, :]])
    eps = E - scat.energies
    near = np.abs(eps) < POLE_TOL
    # near-degenerate states with no edge weight drop out of the problem
    pole = near & (np.linalg.norm(B, axis=0) > 1e-12)
    reg = ~near
    G = (B[:, reg] / eps[reg]) @ B[:, reg].conj().T
    BP = B[:, pole]
    P = BP.shape[1]

    def site_factor(n_rel):
        # value of the unit-amplitude outgoing wave at distance n_rel beyond the edge site
        return np.where(is_open, z ** (h + n_rel), z ** n_rel)

    at_edge = site_factor(0)       # at site h (right) or -h (left)
    beyond = site_factor(1)        # at site h+1 or -h-1
    k0 = chans[0].z
    assert chans[0].alpha == 0 and chans[0].is_open
    inc_edge = k0 ** (-h)          # incident wave e^{ik0 n} at n = -h
    inc_beyond = k0 ** (-h - 1)

    # psi = M x + s: lead amplitudes just outside the region, x = (t; r)
    M = np.diag(np.concatenate([beyond, beyond]))
    src = np.zeros(2 * K, dtype=complex)
    src[K] = inc_beyond
    A = np.zeros((2 * K + P, 2 * K + P), dtype=complex)
    b = np.zeros(2 * K + P, dtype=complex)
    # edge equations: phi(edge) - xi G psi - xi B_P y = 0 (incident part moved right)
    A[:2 * K, :2 * K] = np.diag(np.concatenate([at_edge, at_edge])) - xi * G @ M
    b[:2 * K] = xi * G @ src
    b[K] -= inc_edge
    if P:
        A[:2 * K, 2 * K:] = -xi * BP
        A[2 * K:, :2 * K] = BP.conj().T @ M
        A[2 * K:, 2 * K:] = -np.diag(eps[pole])
        b[2 * K:] = -BP.conj().T @ src

    try:
        lu = sla.lu_factor(A, check_finite=True)
        if np.min(np.abs(np.diag(lu[0]))) < 1e-14 * np.max(np.abs(A)):
            raise sla.LinAlgError("singular matching matrix")
        x = sla.lu_solve(lu, b)
    except (sla.LinAlgError, ValueError) as exc:
        raise ConvergenceError(f"singular matching system at omega_in={omega_in}") from exc
    cond = float(np.linalg.cond(A))
    t_amp, r_amp = x[:K], x[K:2 * K]

    v0 = 2 * abs(xi) * abs(k0.imag)
    flux = 0.0
    inel_t = inel_r = deloc = 0.0
    for c, ch in enumerate(chans):
        ch.t, ch.r = complex(t_amp[c]), complex(r_amp[c])
        if not ch.is_open:
            continue
        v = ch.velocity(xi) / v0
        ft, fr = v * abs(ch.t) ** 2, v * abs(ch.r) ** 2
        flux += ft + fr
        if c == 0:
            continue
        inel_t += ft
        inel_r += fr
        if not ch.localized:
            deloc += ft + fr
    return ScatteringResult(
        omega_in=float(omega_in), k_in=float(np.angle(k0)), t=complex(t_amp[0]), r=complex(r_amp[0]),
        channels=chans, flux_error=abs(1.0 - flux), inelastic_transmittance=inel_t,
        inelastic_reflectance=inel_r, delocalized_flux=deloc, condition_number=cond,
    )


def inelastic_threshold(scat: ScattererEigensystem, rule: str = "parity") -> float:
    """Lowest incoming frequency that can leave the region in an excited state.

    ``(E_a - E_0) + omega_c - 2|xi|`` where ``E_a`` is

    * ``rule="parity"``: the lowest excited state with the ground state's
      excitation-number parity. The spin-boson Hamiltonian conserves
      ``(-1)^(dipole level + photons)``, so a single photon (odd) plus the
      ground state can only leave such a state behind;
    * ``rule="localized"``: the lowest excited state whose photon cloud does
      not reach the region edge, regardless of parity.

    Returns ``inf`` when no state qualifies.
    """
    lower = scat.omega_c - 2 * abs(scat.xi)
    e0 = scat.energies[0]
    if rule == "parity":
        p0 = np.sign(scat.excitation_parity[0])
        pick = [a for a in range(1, len(scat.energies))
                if np.sign(scat.excitation_parity[a]) == p0 and abs(scat.excitation_parity[a]) > 0.5]
    elif rule == "localized":
        pick = [a for a in range(1, len(scat.energies)) if scat.is_localized(a)]
    else:
        raise ValueError(f"unknown rule {rule!r}")
    gaps = [scat.energies[a] - e0 for a in pick if scat.energies[a] - e0 > 1e-9]
    if not gaps:
        return float("inf")
    return float(min(gaps) + lower)
