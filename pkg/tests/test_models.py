from dataclasses import replace
from math import comb

import numpy as np
import pytest
from hypothesis import given, strategies as st

from wqed.errors import ConfigError, DimensionError
from wqed.matter import DipoleSpec, lambda_for_coupling, solve_dipole
from wqed.models import (FockSector, SparseOperator, WaveguideSpec, build_full_coulomb,
                         build_full_dipole, build_spin_boson, build_truncated_coulomb_pzw,
                         excitation_number, lowest_spectrum, spin_boson_model)

XI = -1.0 / np.pi


def dense_spin_boson(delta, g, xi, cutoff, gauge="dipole", rwa=False, n_cav=3, omega_c=1.0):
    """Reference Hamiltonian from explicit Kronecker products (dipole first, cavities -1, 0, 1)."""
    loc = cutoff + 1
    a = np.diag(np.sqrt(np.arange(1, loc)), 1)
    eye = np.eye(loc)
    sm = np.array([[0, 1], [0, 0]], dtype=complex)    # |g><e| in (g, e)
    sp_ = sm.T.copy()
    sz = np.diag([-1.0, 1.0])

    def emb(spin, op, j):
        mats = [spin] + [op if k == j else eye for k in range(n_cav)]
        out = mats[0]
        for m in mats[1:]:
            out = np.kron(out, m)
        return out

    one = np.eye(2)
    h = 0.5 * delta * emb(sz, eye, 0)
    for j in range(n_cav):
        h = h + omega_c * emb(one, a.T @ a, j)
    for j in range(n_cav - 1):
        hop = xi * emb(one, a.T, j) @ emb(one, a, j + 1)
        h = h + hop + hop.conj().T
    c = n_cav // 2
    if gauge == "dipole":
        for j, w in ((c, omega_c), (c - 1, xi), (c + 1, xi)):
            pref = 1j * g * w / omega_c
            if rwa:
                h = h + pref * (emb(sm, a.T, j) - emb(sp_, a, j))
            else:
                h = h + pref * emb(sm + sp_, a.T - a, j)
    else:
        if rwa:
            h = h + 1j * g * (emb(sm, a.T, c) - emb(sp_, a, c))
        else:
            h = h + 1j * g * emb(sm - sp_, a + a.T, c)
    return h


@pytest.mark.parametrize("gauge,rwa", [("dipole", False), ("dipole", True),
                                       ("coulomb", False), ("coulomb", True)])
def test_spin_boson_matches_dense_reference(gauge, rwa):
    w = WaveguideSpec(photon_cutoff=3)
    op = build_spin_boson(w, 1.0, 0.3, gauge, rwa)
    ref = dense_spin_boson(1.0, 0.3, XI, 3, gauge, rwa)
    assert op.hermiticity_error() < 1e-14
    np.testing.assert_allclose(np.linalg.eigvalsh(op.matrix.toarray()), np.linalg.eigvalsh(ref),
                               atol=1e-12)


def test_sector_build_matches_full_space():
    w = WaveguideSpec(photon_cutoff=6)
    full = lowest_spectrum(build_spin_boson(w, 1.0, 0.2), 3)
    sec = lowest_spectrum(build_spin_boson(w, 1.0, 0.2, excitations=6), 3)
    np.testing.assert_allclose(sec, full, atol=1e-6)


def test_rwa_conserves_excitations():
    op = build_spin_boson(WaveguideSpec(n_cavities=5, photon_cutoff=3), 1.0, 0.3, rwa=True)
    n = excitation_number(op)
    comm = op.matrix @ n - n @ op.matrix
    assert abs(comm).max() < 1e-14
    op = build_spin_boson(WaveguideSpec(n_cavities=5, photon_cutoff=3), 1.0, 0.3, rwa=False)
    n = excitation_number(op)
    assert abs(op.matrix @ n - n @ op.matrix).max() > 0.1


def test_single_excitation_block_dimension():
    w = WaveguideSpec(n_cavities=7)
    op = build_spin_boson(w, 1.0, 0.2, rwa=True, excitations=(1, 1))
    assert op.dim == w.n_cavities + 1


def test_full_models_agree_at_zero_coupling():
    w = WaveguideSpec(photon_cutoff=3)
    d = DipoleSpec()
    ec = lowest_spectrum(build_full_coulomb(w, d, 4), 5)
    ed = lowest_spectrum(build_full_dipole(w, d, 4), 5)
    np.testing.assert_allclose(ec, ed, atol=1e-9)


def test_two_level_dipole_projection_is_the_spin_boson_model():
    # projecting the shifted dipole on two levels gives delta'/2 sigma_z and a g sigma_x coupling
    w = WaveguideSpec(photon_cutoff=4)
    g = 0.2
    d = replace(DipoleSpec(), lambda_c=lambda_for_coupling(DipoleSpec(), g))
    eig = solve_dipole(d, include_shift=True, n_levels=2)
    shift = eig.energies[:2].mean()
    trunc = lowest_spectrum(build_full_dipole(w, d, 2), 6) - shift
    sb = lowest_spectrum(build_spin_boson(w, eig.gap, g), 6)
    np.testing.assert_allclose(trunc, sb, atol=1e-9)


def test_pzw_coulomb_matches_dipole_spin_boson():
    w = WaveguideSpec(photon_cutoff=12)
    a = lowest_spectrum(build_spin_boson(w, 1.0, 0.3), 5)
    b = lowest_spectrum(build_truncated_coulomb_pzw(w, 1.0, 0.3, leak_tol=1.0), 5)
    np.testing.assert_allclose(a, b, atol=1e-10)


def test_pzw_warns_on_small_cutoff():
    op = build_truncated_coulomb_pzw(WaveguideSpec(photon_cutoff=2), 1.0, 0.8)
    assert op.warnings


def test_dimension_cap():
    with pytest.raises(DimensionError):
        build_spin_boson(WaveguideSpec(n_cavities=9, photon_cutoff=6), 1.0, 0.1)
    with pytest.raises(DimensionError):
        build_full_dipole(WaveguideSpec(photon_cutoff=4), DipoleSpec(), 18, max_dim=1000)


def test_invalid_waveguide():
    with pytest.raises(ConfigError):
        WaveguideSpec(n_cavities=4).validate()
    with pytest.raises(ConfigError):
        WaveguideSpec(xi=0.0).validate()
    with pytest.raises(ConfigError):
        build_spin_boson(WaveguideSpec(), 1.0, 0.1, gauge="velocity")


def test_dump_load_round_trip(tmp_path):
    op = build_spin_boson(WaveguideSpec(photon_cutoff=2), 1.0, 0.3)
    path = tmp_path / "h.txt"
    op.dump(path)
    back = SparseOperator.load(path)
    assert back.basis_tag == op.basis_tag
    assert abs(back.matrix - op.matrix).max() == 0.0
    first = path.read_text().splitlines()[0]
    assert first.startswith(f"{op.dim} ")


def test_lowest_spectrum_lanczos_matches_dense_and_is_deterministic():
    op = build_spin_boson(WaveguideSpec(photon_cutoff=6), 1.0, 0.3)  # dim 686
    dense = lowest_spectrum(op, 4, dense_below=10_000)
    lan1 = lowest_spectrum(op, 4, dense_below=10)
    lan2 = lowest_spectrum(op, 4, dense_below=10)
    np.testing.assert_allclose(lan1, dense, atol=1e-9)
    assert np.array_equal(lan1, lan2)


def test_mode_table():
    m = spin_boson_model(WaveguideSpec(), 1.0, 0.2, n_modes=101)
    assert m.n_modes == 101
    np.testing.assert_allclose(m.g_k, 0.2 / np.sqrt(101) * m.omega)
    c = spin_boson_model(WaveguideSpec(), 1.0, 0.2, gauge="coulomb", n_modes=101)
    assert np.allclose(c.g_k, 0.2 / np.sqrt(101))
    with pytest.raises(ConfigError):
        spin_boson_model(WaveguideSpec(), 1.0, 0.2, n_modes=100)


@given(n_sites=st.integers(1, 5), n_max=st.integers(0, 4))
def test_sector_dimension_formula(n_sites, n_max):
    sec = FockSector(n_sites, 2, n_max=n_max)
    expected = sum(comb(n_sites + n_max - s, n_sites) for s in range(2) if n_max - s >= 0)
    assert sec.dim == expected
    assert sec.excitations().max(initial=0) <= n_max


@given(g=st.floats(0.0, 0.6), delta=st.floats(0.5, 1.5))
def test_spin_boson_is_hermitian(g, delta):
    op = build_spin_boson(WaveguideSpec(photon_cutoff=2), delta, g)
    assert op.hermiticity_error() < 1e-14
