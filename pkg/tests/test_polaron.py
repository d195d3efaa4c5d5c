import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import minimize

from wqed.matching import build_scatterer, scatter_single_photon
from wqed.models import WaveguideSpec, spin_boson_model
from wqed.polaron import polaron_energy, polaron_resonance, polaron_self_energy, solve_polaron
from wqed.rwa_scattering import resonance_rwa

W = WaveguideSpec()


def test_zero_coupling_keeps_gap():
    sol = solve_polaron(spin_boson_model(W, 1.0, 0.0, n_modes=101))
    assert sol.delta_r == 1.0
    assert np.all(sol.f_k == 0)


@pytest.mark.parametrize("g", [0.1, 0.3, 0.5])
def test_fixed_point_equations_hold(g):
    m = spin_boson_model(W, 1.0, g)
    sol = solve_polaron(m)
    assert sol.converged and sol.residual < 1e-10
    np.testing.assert_allclose(sol.f_k, m.g_k / (sol.delta_r + m.omega), atol=1e-12)
    assert sol.delta_r == pytest.approx(m.delta * np.exp(-2 * np.sum(sol.f_k**2)), abs=1e-10)


def test_matches_direct_energy_minimisation():
    # independent route: minimise the variational energy over all f_k
    m = spin_boson_model(W, 1.0, 0.4, n_modes=201)
    sol = solve_polaron(m)
    res = minimize(lambda f: polaron_energy(f, m), np.zeros(m.n_modes), method="L-BFGS-B",
                   options={"ftol": 1e-15, "gtol": 1e-12, "maxiter": 10_000})
    dr = m.delta * np.exp(-2 * np.sum(res.x**2))
    assert dr == pytest.approx(sol.delta_r, abs=1e-6)
    assert polaron_energy(sol.f_k, m) <= res.fun + 1e-12


def test_energy_never_increases_along_iteration():
    sol = solve_polaron(spin_boson_model(W, 1.0, 0.4))
    assert np.all(np.diff(sol.energies) <= 1e-13)


def test_mode_number_independence():
    drs = [solve_polaron(spin_boson_model(W, 1.0, 0.3, n_modes=n)).delta_r for n in (2001, 4001, 8001)]
    assert max(drs) - min(drs) < 1e-9


def test_gap_shrinks_with_coupling():
    drs = [solve_polaron(spin_boson_model(W, 1.0, g)).delta_r for g in np.linspace(0, 0.6, 13)]
    assert np.all(np.diff(drs) < 0)


@pytest.mark.parametrize("g", [0.1, 0.2, 0.4])
def test_resonance_between_rwa_and_bare_gap(g):
    m = spin_boson_model(W, 1.0, g)
    w, inside = polaron_resonance(solve_polaron(m), m)
    assert inside
    assert resonance_rwa(1.0, g) < w < 1.0


def test_resonance_tracks_matching_minimum():
    g = 0.2
    m = spin_boson_model(W, 1.0, g)
    w_pol, _ = polaron_resonance(solve_polaron(m), m)
    scat = build_scatterer(WaveguideSpec(n_cavities=13), 1.0, g, region_size=9, excitation_cutoff=4)
    grid = np.linspace(w_pol - 0.01, w_pol + 0.01, 41)
    T = [scatter_single_photon(scat, om).T for om in grid]
    w_match = grid[int(np.argmin(T))]
    assert abs(w_match - w_pol) < 1e-3


def test_continuum_resolvent_matches_large_sum():
    m = spin_boson_model(W, 1.0, 0.3, n_modes=200_001)
    sol = solve_polaron(m)
    for E in (0.8, 1.1):
        a = polaron_self_energy(E, sol, m, eta=2e-4)
        b = polaron_self_energy(E, sol, m, method="continuum")
        assert abs(a - b) < 2e-3 * abs(b)
    assert polaron_self_energy(0.8, sol, m, method="continuum").imag < 0


def test_scalar_shift_form_is_not_size_consistent():
    res = {}
    for n in (1001, 4001):
        m = spin_boson_model(W, 1.0, 0.2, n_modes=n)
        sol = solve_polaron(m)
        res[n] = (polaron_resonance(sol, m)[0], polaron_resonance(sol, m, form="as_written")[0])
    assert abs(res[1001][0] - res[4001][0]) < 1e-6
    assert not abs(res[1001][1] - res[4001][1]) < 1e-6


@given(g=st.floats(0.0, 0.6))
def test_renormalised_gap_bounded(g):
    sol = solve_polaron(spin_boson_model(W, 1.0, g, n_modes=501))
    assert 0 < sol.delta_r <= 1.0


def test_iteration_budget_exhaustion_raises():
    from wqed.errors import ConvergenceError
    with pytest.raises(ConvergenceError) as info:
        solve_polaron(spin_boson_model(W, 1.0, 0.4, n_modes=201), max_iter=2)
    assert len(info.value.residual) == 2 and info.value.residual[-1] > 1e-10
