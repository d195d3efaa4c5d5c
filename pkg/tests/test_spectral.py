import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from wqed.errors import BandEdgeError
from wqed.models import WaveguideSpec, spin_boson_model
from wqed.spectral import (band_width_factor, coulomb_coupling_weak, lattice_integral, self_energy_from_integrals,
                           self_energy_rwa, self_energy_rwa_sum, self_energy_rwa_sum_extrapolated,
                           spectral_density_coulomb, spectral_density_dipole, spectral_density_sum)

XI = -1.0 / np.pi
LO, HI = 1 - 2 / np.pi, 1 + 2 / np.pi


def lattice_quad(E, n, xi=XI, omega_c=1.0):
    """Direct quadrature of the k integral (valid off the band)."""
    val, _ = quad(lambda k: np.cos(n * k) / (E - omega_c - 2 * xi * np.cos(k)), -np.pi, np.pi,
                  epsabs=1e-13, epsrel=1e-13)
    return val


def lattice_sum(E, n, xi=XI, omega_c=1.0, n_k=200_001, eta=1e-4):
    """Discrete k sum at E + i eta, extrapolated linearly to eta -> 0."""
    k = 2 * np.pi * np.arange(n_k) / n_k

    def s(e):
        return 2 * np.pi * np.mean(np.cos(n * k) / (E + 1j * e - omega_c - 2 * xi * np.cos(k)))
    return 2 * s(eta) - s(2 * eta)


@pytest.mark.parametrize("E", [-0.5, 0.2, LO - 0.05, HI + 0.05, 2.5])
@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_lattice_integral_off_band_matches_quadrature(E, n):
    assert abs(lattice_integral(E, n, XI) - lattice_quad(E, n)) < 1e-10


@pytest.mark.parametrize("E", [LO + 0.05, 0.9, 1.0, 1.3])
@pytest.mark.parametrize("n", [0, 1, 2])
def test_lattice_integral_in_band_matches_discrete_sum(E, n):
    assert abs(lattice_integral(E, n, XI) - lattice_sum(E, n)) < 1e-4


def test_lattice_integral_band_centre_value():
    # W(omega_c) = 2|xi| = 2/pi, so I_0 = -2 pi i / W = -i pi^2
    assert abs(lattice_integral(1.0, 0, XI) - (-1j * np.pi**2)) < 1e-12


@given(E=st.floats(LO + 1e-3, HI - 1e-3), n=st.integers(0, 3))
def test_advanced_is_conjugate_of_retarded(E, n):
    r = lattice_integral(E, n, XI, branch="retarded")
    a = lattice_integral(E, n, XI, branch="advanced")
    assert abs(r - np.conj(a)) < 1e-12
    assert r.imag <= 0 or n > 0


@given(E=st.floats(LO + 1e-3, HI - 1e-3), g=st.floats(0.01, 0.5))
def test_closed_form_self_energy_equals_integral_assembly(E, g):
    se = self_energy_rwa(E, g, XI)
    assert abs(se.value - self_energy_from_integrals(E, g, XI)) < 1e-12
    assert se.imag_part == pytest.approx(-0.5 * float(spectral_density_dipole(E, g, XI)), abs=1e-14)
    assert se.half_width == pytest.approx(-se.imag_part)


def test_self_energy_sum_route_agrees():
    m = spin_boson_model(WaveguideSpec(), 1.0, 0.1, n_modes=100_001)
    for E in (0.5, 0.8, 1.0, 1.4):
        assert abs(self_energy_rwa_sum_extrapolated(E, m, 1e-4) - self_energy_rwa(E, 0.1, XI).value) < 1e-6
    # outside the band the sum converges without extrapolation
    assert abs(self_energy_rwa_sum(0.1, m, 1e-9) - self_energy_from_integrals(0.1, 0.1, XI)) < 1e-8


def test_self_energy_value_at_band_centre():
    se = self_energy_rwa(1.0, 0.1, XI)
    assert se.real_part == pytest.approx(-0.02)
    assert se.imag_part == pytest.approx(-0.01 * np.pi / 2)


def test_spectral_density_discrete_limit():
    m = spin_boson_model(WaveguideSpec(), 1.0, 0.2, n_modes=40_001)
    om = np.array([0.6, 1.0, 1.3])
    approx = spectral_density_sum(om, m.g_k, m.omega, 2e-3)
    np.testing.assert_allclose(approx, spectral_density_dipole(om, 0.2, XI), rtol=2e-2)


def test_weak_coulomb_coupling_matches_rate_at_gap():
    for delta in (0.8, 1.0, 1.2):
        gc = coulomb_coupling_weak(0.2, delta)
        assert spectral_density_coulomb(delta, gc, XI) == pytest.approx(spectral_density_dipole(delta, 0.2, XI))


@pytest.mark.parametrize("om", [LO, HI, 2.0])
def test_band_edge_raises(om):
    with pytest.raises(BandEdgeError):
        band_width_factor(om, XI)
    with pytest.raises(BandEdgeError):
        self_energy_rwa(om, 0.1, XI)


def test_rejects_bad_branch():
    with pytest.raises(ValueError):
        self_energy_rwa(1.0, 0.1, XI, branch="causal")


def test_raw_sum_error_shrinks_with_eta_and_mode_number():
    E = 0.8
    exact = self_energy_rwa(E, 0.1, XI).value
    errs = []
    for n_modes, eta in ((20_001, 4e-3), (40_001, 2e-3), (80_001, 1e-3)):
        m = spin_boson_model(WaveguideSpec(), 1.0, 0.1, n_modes=n_modes)
        errs.append(abs(self_energy_rwa_sum(E, m, eta) - exact))
    assert errs[0] > errs[1] > errs[2]
