"""Hamiltonians of a dipole coupled to the central cavity of a cavity array.

Basis ordering for every builder: dipole index slowest, then cavities from
left (site ``-(N-1)/2``) to right (site ``+(N-1)/2``). Chains are open.

Two Fock-space layouts are supported:

* full space, a per-cavity photon cutoff, assembled with Kronecker products;
* excitation sectors, every state with ``n_min <= dipole_level + sum(n_j) <= n_max``,
  enumerated explicitly (used for the RWA blocks, the scattering region and
  wavepacket evolution on long chains).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .errors import ConfigError, ConvergenceError, DimensionError
from .matter import DipoleSpec, solve_dipole

MAX_DIM = 2_000_000


@dataclass(frozen=True)
class WaveguideSpec:
    """Cavity array: ``omega_k = omega_c + 2 xi cos(k)``, dipole at site 0."""

    omega_c: float = 1.0
    xi: float = -1.0 / math.pi
    n_cavities: int = 3
    photon_cutoff: int = 6

    def validate(self):
        if self.n_cavities < 3 or self.n_cavities % 2 == 0:
            raise ConfigError(f"n_cavities must be odd and >= 3, got {self.n_cavities}", "n_cavities")
        if self.xi == 0:
            raise ConfigError("xi must be non-zero", "xi")
        if self.photon_cutoff < 1:
            raise ConfigError("photon_cutoff must be >= 1", "photon_cutoff")
        if not self.omega_c > 0:
            raise ConfigError("omega_c must be > 0", "omega_c")
        return self

    @property
    def band(self):
        return self.omega_c - 2 * abs(self.xi), self.omega_c + 2 * abs(self.xi)

    @property
    def sites(self):
        half = (self.n_cavities - 1) // 2
        return np.arange(-half, half + 1)

    def site_index(self, n):
        return int(n) + (self.n_cavities - 1) // 2


@dataclass
class SparseOperator:
    """Hermitian operator stored as a CSR matrix plus a description of its basis."""

    matrix: sp.csr_matrix
    basis_tag: str
    local_dims: tuple = ()
    warnings: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def entries(self):
        coo = self.matrix.tocoo()
        return list(zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist()))

    def hermiticity_error(self):
        diff = self.matrix - self.matrix.getH()
        return float(abs(diff).max()) if diff.nnz else 0.0

    def dump(self, path):
        """Write ``dim basis_tag`` then one ``row col re im`` line per entry."""
        coo = self.matrix.tocoo()
        with open(path, "w") as fh:
            fh.write(f"{self.dim} {self.basis_tag}\n")
            for r, c, v in zip(coo.row, coo.col, coo.data):
                fh.write(f"{r} {c} {v.real:.17g} {v.imag:.17g}\n")

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            head = fh.readline().rstrip("\n")
            dim_s, _, tag = head.partition(" ")
            dim = int(dim_s)
            data = np.loadtxt(fh, ndmin=2) if dim else np.zeros((0, 4))
        if data.size == 0:
            mat = sp.csr_matrix((dim, dim), dtype=complex)
        else:
            mat = sp.csr_matrix(
                (data[:, 2] + 1j * data[:, 3], (data[:, 0].astype(int), data[:, 1].astype(int))),
                shape=(dim, dim),
            )
        return cls(mat, tag)


# ---------------------------------------------------------------------------
# small building blocks

def boson_ops(cutoff):
    """Truncated annihilation operator on ``0..cutoff`` photons (dense)."""
    return np.diag(np.sqrt(np.arange(1, cutoff + 1, dtype=float)), 1)


def quadrature_squared(cutoff):
    """Projection of ``(a + a^dag)^2`` onto ``0..cutoff`` (not the square of the projection)."""
    a = boson_ops(cutoff + 1)
    x = a + a.T
    return (x @ x)[: cutoff + 1, : cutoff + 1]


def _kron_chain(ops):
    out = sp.csr_matrix(ops[0])
    for op in ops[1:]:
        out = sp.kron(out, sp.csr_matrix(op), format="csr")
    return out


def _site_op(op, j, n_sites, loc, pre=None):
    """Embed ``op`` on cavity ``j`` (0-based) with an optional dipole factor ``pre``."""
    eye = np.eye(loc)
    ops = [op if i == j else eye for i in range(n_sites)]
    if pre is not None:
        ops = [pre] + ops
    return _kron_chain(ops)


def _check_dim(dim, max_dim):
    if dim > max_dim:
        raise DimensionError(
            f"Hilbert space dimension {dim} exceeds cap {max_dim}; "
            "use an excitation-sector build or the matching solver"
        )


def photon_chain(w: WaveguideSpec, pre_dim=1):
    """Free photon Hamiltonian (on-site + hopping), identity on a leading factor."""
    loc = w.photon_cutoff + 1
    a = boson_ops(w.photon_cutoff)
    n_op = a.T @ a
    eye_pre = np.eye(pre_dim)
    h = sp.csr_matrix((pre_dim * loc**w.n_cavities,) * 2, dtype=complex)
    for j in range(w.n_cavities):
        h = h + w.omega_c * _site_op(n_op, j, w.n_cavities, loc, eye_pre)
    for j in range(w.n_cavities - 1):
        ops = [eye_pre] + [np.eye(loc)] * w.n_cavities
        ops[1 + j] = a.T
        ops[2 + j] = a
        hop = _kron_chain(ops)
        h = h + w.xi * (hop + hop.getH())
    return h


def _full_tag(w, n_levels, label):
    return (f"{label}: dipole[{n_levels}] (slowest) x cavities[{-(w.n_cavities // 2)}..{w.n_cavities // 2}]"
            f" Fock 0..{w.photon_cutoff} each")


# ---------------------------------------------------------------------------
# full (multi-level) builds

def build_full_coulomb(w: WaveguideSpec, d: DipoleSpec, n_dipole_levels: int,
                       max_dim: int = MAX_DIM) -> SparseOperator:
    """Minimal-coupling Hamiltonian projected on the lowest bare dipole levels.

    ``E_d (p_z - lambda X0)^2 / 2 + V`` becomes
    ``diag(E_n) - E_d lambda P X0 + E_d lambda^2 X0^2 / 2`` with the
    diamagnetic ``X0^2`` kept exactly within the Fock cutoff.
    """
    w.validate()
    if n_dipole_levels < 2:
        raise ConfigError("n_dipole_levels must be >= 2", "n_dipole_levels")
    loc = w.photon_cutoff + 1
    dim = n_dipole_levels * loc**w.n_cavities
    _check_dim(dim, max_dim)
    eig = solve_dipole(d, include_shift=False, n_levels=max(n_dipole_levels, 2))
    L = n_dipole_levels
    energies = eig.energies[:L]
    p = eig.p_elems[:L, :L]
    j0 = w.site_index(0)
    a = boson_ops(w.photon_cutoff)
    x0 = a + a.T
    x0sq = quadrature_squared(w.photon_cutoff)

    h = photon_chain(w, L)
    h = h + sp.kron(sp.diags(energies), sp.identity(loc**w.n_cavities), format="csr")
    lam, ed = d.lambda_c, d.e_d
    if lam != 0.0:
        h = h - ed * lam * _site_op(x0, j0, w.n_cavities, loc, p)
        h = h + 0.5 * ed * lam**2 * _site_op(x0sq, j0, w.n_cavities, loc, np.eye(L))
    h = sp.csr_matrix(0.5 * (h + h.getH()))
    return SparseOperator(h, _full_tag(w, L, "coulomb"), (L,) + (loc,) * w.n_cavities,
                          meta={"gauge": "coulomb", "lambda_c": lam})


def dipole_coupling_weights(w: WaveguideSpec):
    """Cavity weights of the dipole-gauge coupling: ``omega_c`` at 0, ``xi`` at +-1."""
    return {0: w.omega_c, -1: w.xi, 1: w.xi}


def build_full_dipole(w: WaveguideSpec, d: DipoleSpec, n_dipole_levels: int,
                      max_dim: int = MAX_DIM) -> SparseOperator:
    """Dipole-gauge Hamiltonian projected on the lowest levels of the shifted dipole.

    ``H'_m + photons + i lambda z [omega_c (a0^+ - a0) + xi (a1^+ - a1 + a-1^+ - a-1)]``.
    """
    w.validate()
    if n_dipole_levels < 2:
        raise ConfigError("n_dipole_levels must be >= 2", "n_dipole_levels")
    loc = w.photon_cutoff + 1
    L = n_dipole_levels
    _check_dim(L * loc**w.n_cavities, max_dim)
    eig = solve_dipole(d, include_shift=True, n_levels=L)
    zmat = eig.x_elems[:L, :L]
    a = boson_ops(w.photon_cutoff)
    h = photon_chain(w, L)
    h = h + sp.kron(sp.diags(eig.energies[:L]), sp.identity(loc**w.n_cavities), format="csr")
    lam = d.lambda_c
    if lam != 0.0:
        for site, weight in dipole_coupling_weights(w).items():
            j = w.site_index(site)
            h = h + 1j * lam * weight * _site_op(a.T - a, j, w.n_cavities, loc, zmat)
    h = sp.csr_matrix(0.5 * (h + h.getH()))
    return SparseOperator(h, _full_tag(w, L, "dipole"), (L,) + (loc,) * w.n_cavities,
                          meta={"gauge": "dipole", "lambda_c": lam})


# ---------------------------------------------------------------------------
# two-level models

SIGMA_Z = np.diag([-1.0, 1.0]).astype(complex)     # basis (ground, excited)
SIGMA_P = np.array([[0, 0], [1, 0]], dtype=complex)  # |e><g|
SIGMA_M = SIGMA_P.T.copy()
SIGMA_X = SIGMA_P + SIGMA_M
SIGMA_Y = -1j * SIGMA_Z @ SIGMA_X                  # sigma_z sigma_x = i sigma_y


def spin_boson_couplings(w: WaveguideSpec, g: float, gauge: str, rwa: bool):
    """Dipole-cavity couplings as ``[(D, site), ...]`` meaning ``D a_site + h.c.``.

    Dipole gauge: ``i g sigma_x [(a0^+ - a0) + (xi/omega_c)(a1^+ - a1 + a-1^+ - a-1)]``.
    Coulomb gauge: ``g_C i(sigma^- - sigma^+) (a0 + a0^+)``.
    """
    if gauge == "dipole":
        spin = SIGMA_P if rwa else SIGMA_X
        return [(-1j * g * wgt / w.omega_c * spin, site)
                for site, wgt in dipole_coupling_weights(w).items()]
    if gauge == "coulomb":
        if rwa:
            return [(-1j * g * SIGMA_P, 0)]
        y = 1j * (SIGMA_M - SIGMA_P)
        return [(g * y, 0)]
    raise ConfigError(f"unknown gauge {gauge!r}", "gauge")


class FockSector:
    """Explicit basis of dipole level + photon multiset with bounded excitations.

    A state is ``(level, sites)`` where ``sites`` is the sorted tuple of occupied
    cavity indices (0-based, with repetition). The excitation number is
    ``level + len(sites)``.
    """

    def __init__(self, n_sites, n_levels=2, n_max=1, n_min=0):
        self.n_sites = n_sites
        self.n_levels = n_levels
        self.n_max = n_max
        self.n_min = n_min
        states = []
        for s in range(n_levels):
            for n_ph in range(max(0, n_min - s), n_max - s + 1):
                for pos in itertools.combinations_with_replacement(range(n_sites), n_ph):
                    states.append((s, pos))
        self.states = states
        self.index = {st: i for i, st in enumerate(states)}

    @property
    def dim(self):
        return len(self.states)

    def excitations(self):
        return np.array([s + len(pos) for s, pos in self.states])

    def levels(self):
        return np.array([s for s, _ in self.states])

    def occupation(self, j):
        return np.array([pos.count(j) for _, pos in self.states], dtype=float)

    def annihilation(self, j):
        """Matrix of ``a_j`` within the sector (states leaving the sector are dropped)."""
        rows, cols, vals = [], [], []
        for c, (s, pos) in enumerate(self.states):
            n = pos.count(j)
            if n == 0:
                continue
            k = pos.index(j)
            new = (s, pos[:k] + pos[k + 1:])
            r = self.index.get(new)
            if r is not None:
                rows.append(r)
                cols.append(c)
                vals.append(math.sqrt(n))
        return sp.csr_matrix((vals, (rows, cols)), shape=(self.dim, self.dim))

    def annihilators(self):
        """``[a_0, ..., a_{N-1}]`` within the sector, built in a single pass."""
        per_site = [([], [], []) for _ in range(self.n_sites)]
        for c, (s, pos) in enumerate(self.states):
            for j in set(pos):
                k = pos.index(j)
                r = self.index.get((s, pos[:k] + pos[k + 1:]))
                if r is not None:
                    rows, cols, vals = per_site[j]
                    rows.append(r)
                    cols.append(c)
                    vals.append(math.sqrt(pos.count(j)))
        return [sp.csr_matrix((v, (r, c)), shape=(self.dim, self.dim)) for r, c, v in per_site]

    def occupation_matrix(self):
        """Sparse ``(dim, n_sites)`` matrix of photon numbers per state and site."""
        rows, cols, vals = [], [], []
        for i, (_, pos) in enumerate(self.states):
            for j in set(pos):
                rows.append(i)
                cols.append(j)
                vals.append(pos.count(j))
        return sp.csr_matrix((np.asarray(vals, dtype=float), (rows, cols)), shape=(self.dim, self.n_sites))

    def hamiltonian(self, level_energies, omega_c, xi, couplings):
        """Assemble ``sum_s E_s |s><s| + photons + hopping + sum (D a_j + h.c.)``.

        ``couplings`` holds ``(D, j)`` pairs with ``D`` an ``n_levels`` square matrix.
        """
        rows, cols, vals = [], [], []
        index = self.index
        n_sites = self.n_sites
        for c, (s, pos) in enumerate(self.states):
            rows.append(c)
            cols.append(c)
            vals.append(level_energies[s] + omega_c * len(pos))
            for j in sorted(set(pos)):
                nj = pos.count(j)
                k = pos.index(j)
                rest = pos[:k] + pos[k + 1:]
                for i in (j - 1, j + 1):
                    if 0 <= i < n_sites:
                        new = tuple(sorted(rest + (i,)))
                        r = index[(s, new)]
                        rows.append(r)
                        cols.append(c)
                        vals.append(xi * math.sqrt(nj * (pos.count(i) + 1)))
            for D, j in couplings:
                nj = pos.count(j)
                if nj:
                    k = pos.index(j)
                    less = pos[:k] + pos[k + 1:]
                    for s2 in range(self.n_levels):
                        amp = D[s2, s]
                        if amp != 0:
                            r = index.get((s2, less))
                            if r is not None:
                                rows.append(r)
                                cols.append(c)
                                vals.append(amp * math.sqrt(nj))
                more = tuple(sorted(pos + (j,)))
                for s2 in range(self.n_levels):
                    amp = np.conj(D[s, s2])
                    if amp != 0:
                        r = index.get((s2, more))
                        if r is not None:
                            rows.append(r)
                            cols.append(c)
                            vals.append(amp * math.sqrt(nj + 1))
        return sp.csr_matrix((np.asarray(vals, dtype=complex), (rows, cols)),
                             shape=(self.dim, self.dim))


def build_spin_boson(w: WaveguideSpec, delta: float, g: float, gauge: str = "dipole",
                     rwa: bool = False, excitations=None, max_dim: int = MAX_DIM) -> SparseOperator:
    """Two-level dipole coupled to the array in position space.

    ``delta/2 sigma_z + photons + coupling`` (see :func:`spin_boson_couplings`).
    ``excitations=None`` uses the full Fock space with ``w.photon_cutoff`` per
    cavity; an int ``n`` builds the sector with at most ``n`` excitations, a
    pair ``(n_min, n_max)`` restricts both ends (``(1, 1)`` is the
    single-excitation block of dimension ``N + 1`` when ``rwa`` holds).
    """
    w.validate()
    if not delta > 0:
        raise ConfigError(f"delta must be > 0, got {delta}", "delta")
    couplings = spin_boson_couplings(w, g, gauge, rwa) if g != 0 else []
    levels = np.array([-delta / 2, delta / 2])
    if excitations is None:
        loc = w.photon_cutoff + 1
        _check_dim(2 * loc**w.n_cavities, max_dim)
        a = boson_ops(w.photon_cutoff)
        h = photon_chain(w, 2) + sp.kron(sp.diags(levels), sp.identity(loc**w.n_cavities), format="csr")
        for D, site in couplings:
            term = _site_op(a, w.site_index(site), w.n_cavities, loc, D)
            h = h + term + term.getH()
        tag = _full_tag(w, 2, f"spin-boson {gauge}{' rwa' if rwa else ''}")
        return SparseOperator(sp.csr_matrix(h), tag, (2,) + (loc,) * w.n_cavities,
                              meta={"gauge": gauge, "rwa": rwa, "delta": delta, "g": g})
    n_min, n_max = (0, excitations) if np.isscalar(excitations) else excitations
    sector = FockSector(w.n_cavities, 2, n_max=n_max, n_min=n_min)
    _check_dim(sector.dim, max_dim)
    shifted = [(D, w.site_index(site)) for D, site in couplings]
    h = sector.hamiltonian(levels, w.omega_c, w.xi, shifted)
    tag = (f"spin-boson {gauge}{' rwa' if rwa else ''}: sector {n_min}<=exc<={n_max}, "
           f"(level, photon sites) over {w.n_cavities} cavities")
    return SparseOperator(h, tag, meta={"gauge": gauge, "rwa": rwa, "delta": delta, "g": g,
                                        "sector": sector})


def _quadrature_function(cutoff, theta, extra=40):
    """cos and sin of ``2 theta (a + a^dag)`` on the truncated space, plus a leak estimate.

    The functions are computed exactly (eigen-decomposition) on an enlarged
    cutoff; the leak is the norm of the block coupling the lower half of the
    kept Fock states to the dropped ones.
    """
    big = cutoff + extra
    a = boson_ops(big)
    vals, vecs = np.linalg.eigh(a + a.T)
    cos_big = (vecs * np.cos(2 * theta * vals)) @ vecs.T
    sin_big = (vecs * np.sin(2 * theta * vals)) @ vecs.T
    keep = cutoff + 1
    low = max(1, keep // 2)
    leak = max(np.linalg.norm(cos_big[keep:, :low]), np.linalg.norm(sin_big[keep:, :low]))
    a = boson_ops(cutoff)
    vals, vecs = np.linalg.eigh(a + a.T)
    cos_t = (vecs * np.cos(2 * theta * vals)) @ vecs.T
    sin_t = (vecs * np.sin(2 * theta * vals)) @ vecs.T
    return cos_t, sin_t, leak


def build_truncated_coulomb_pzw(w: WaveguideSpec, delta_prime: float, g: float,
                                leak_tol: float = 1e-6, max_dim: int = MAX_DIM) -> SparseOperator:
    """Two-level Coulomb-gauge model obtained by rotating the dipole-gauge one.

    ``photons + delta'/2 [sigma_z cos(2g/omega_c X0) + sigma_y sin(2g/omega_c X0)] - g^2/omega_c``.
    The constant ``-g^2/omega_c`` makes the spectrum coincide with
    :func:`build_spin_boson` (dipole gauge). A warning is attached when the
    Fock cutoff cannot hold the displacement generated by the rotation.
    """
    w.validate()
    if g < 0:
        raise ConfigError("g must be >= 0", "g")
    loc = w.photon_cutoff + 1
    _check_dim(2 * loc**w.n_cavities, max_dim)
    theta = g / w.omega_c
    cos_t, sin_t, leak = _quadrature_function(w.photon_cutoff, theta)
    j0 = w.site_index(0)
    h = photon_chain(w, 2)
    h = h + 0.5 * delta_prime * (_site_op(cos_t, j0, w.n_cavities, loc, SIGMA_Z)
                                 + _site_op(sin_t, j0, w.n_cavities, loc, SIGMA_Y))
    h = h - (g**2 / w.omega_c) * sp.identity(h.shape[0], format="csr")
    h = sp.csr_matrix(0.5 * (h + h.getH()))
    op = SparseOperator(h, _full_tag(w, 2, "coulomb-pzw"), (2,) + (loc,) * w.n_cavities,
                        meta={"gauge": "coulomb", "leak": leak})
    if leak > leak_tol:
        op.warnings.append(f"photon cutoff too small for displacement 2g/omega_c={2 * theta:.3g}: "
                           f"dropped-block norm {leak:.2e}")
    return op


def excitation_number(op: SparseOperator):
    """Total excitation operator ``sigma^+ sigma^- + sum_n a_n^+ a_n`` for a two-level build."""
    sector = op.meta.get("sector")
    if sector is not None:
        return sp.diags(sector.excitations().astype(float), format="csr")
    dims = op.local_dims
    ops = [np.diag(np.arange(dims[0], dtype=float))] + [np.eye(d) for d in dims[1:]]
    total = _kron_chain(ops)
    for j in range(1, len(dims)):
        ops = [np.eye(d) for d in dims]
        ops[j] = np.diag(np.arange(dims[j], dtype=float))
        total = total + _kron_chain(ops)
    return sp.csr_matrix(total)


def dipole_operator(op: SparseOperator, single):
    """Embed a dipole-space matrix (e.g. ``SIGMA_Z``) into the operator's basis."""
    sector = op.meta.get("sector")
    if sector is not None:
        rows, cols, vals = [], [], []
        for c, (s, pos) in enumerate(sector.states):
            for s2 in range(sector.n_levels):
                if single[s2, s] != 0:
                    r = sector.index.get((s2, pos))
                    if r is not None:
                        rows.append(r)
                        cols.append(c)
                        vals.append(single[s2, s])
        return sp.csr_matrix((vals, (rows, cols)), shape=(sector.dim,) * 2)
    rest = int(np.prod(op.local_dims[1:]))
    return sp.kron(sp.csr_matrix(single), sp.identity(rest), format="csr")


# ---------------------------------------------------------------------------
# spectra

def lowest_spectrum(op, n_eigs: int, seed: int = 1234, tol: float = 1e-8,
                    return_vectors: bool = False, dense_below: int = 1500, max_restarts: int = 3):
    """Lowest ``n_eigs`` eigenvalues (ascending) with residual norms below ``tol``.

    Small operators go to dense ``eigh``; larger ones to Lanczos (ARPACK,
    smallest algebraic) with a start vector drawn from ``seed``.
    """
    mat = op.matrix if isinstance(op, SparseOperator) else sp.csr_matrix(op)
    dim = mat.shape[0]
    n_eigs = min(n_eigs, dim)
    if dim <= dense_below:
        vals, vecs = np.linalg.eigh(mat.toarray())
        vals, vecs = vals[:n_eigs], vecs[:, :n_eigs]
    else:
        rng = np.random.default_rng(seed)
        v0 = rng.standard_normal(dim)
        if np.iscomplexobj(mat.data):
            v0 = v0 + 1j * rng.standard_normal(dim)
        ncv = max(2 * n_eigs + 1, 20)
        vals = vecs = None
        for attempt in range(max_restarts + 1):
            try:
                vals, vecs = eigsh(mat, k=n_eigs, which="SA", v0=v0, ncv=min(ncv, dim - 1),
                                   tol=1e-13, maxiter=20000)
            except ArpackNoConvergence as exc:
                if attempt == max_restarts:
                    raise ConvergenceError("Lanczos did not converge", exc.eigenvalues) from exc
                ncv *= 2
                continue
            res = np.linalg.norm(mat @ vecs - vecs * vals, axis=0)
            if res.max() < tol:
                break
            if attempt == max_restarts:
                raise ConvergenceError(f"eigen residual {res.max():.2e} above {tol}", res)
            ncv *= 2
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
    res = np.linalg.norm(mat @ vecs - vecs * vals, axis=0)
    if res.size and res.max() >= tol:
        raise ConvergenceError(f"eigen residual {res.max():.2e} above {tol}", res)
    if return_vectors:
        return vals, vecs
    return vals


# ---------------------------------------------------------------------------
# spin-boson parameterisation in momentum space

@dataclass(frozen=True)
class SpinBosonModel:
    """Two-level gap plus the mode table ``(k, omega_k, g_k)``."""

    delta: float
    k: np.ndarray
    omega: np.ndarray
    g_k: np.ndarray
    gauge_tag: str = "dipole"
    g: float = float("nan")
    xi: float = -1.0 / math.pi
    omega_c: float = 1.0

    @property
    def n_modes(self):
        return len(self.k)


def spin_boson_model(w: WaveguideSpec, delta: float, g: float, gauge: str = "dipole",
                     n_modes: int = 2001) -> SpinBosonModel:
    """Mode table on ``k = 2 pi m / N``; dipole gauge ``g_k = g omega_k / (omega_c sqrt N)``."""
    if n_modes % 2 == 0:
        raise ConfigError("n_modes must be odd", "n_modes")
    m = np.arange(-(n_modes - 1) // 2, (n_modes - 1) // 2 + 1)
    k = 2 * np.pi * m / n_modes
    omega = w.omega_c + 2 * w.xi * np.cos(k)
    if gauge == "dipole":
        g_k = g / np.sqrt(n_modes) * omega / w.omega_c
    elif gauge == "coulomb":
        g_k = np.full(n_modes, g / np.sqrt(n_modes))
    else:
        raise ConfigError(f"unknown gauge {gauge!r}", "gauge")
    return SpinBosonModel(delta, k, omega, g_k, gauge, float(g), w.xi, w.omega_c)
