import dataclasses

import pytest
from hypothesis import given, strategies as st

from wqed.config import RunConfig, apply_override, dump, dumps, load, loads, parse_grid
from wqed.errors import ConfigError
from wqed.matter import DipoleSpec
from wqed.models import WaveguideSpec
from wqed.sweeps import SweepPlan

finite = st.floats(allow_nan=False, allow_infinity=False)
grid = st.lists(st.floats(0.0, 2.0, allow_nan=False), min_size=1, max_size=6, unique=True).map(
    lambda xs: tuple(sorted(xs)))


@given(beta=st.floats(0.1, 10.0), e_d=st.floats(1.0, 200.0), cutoff=st.integers(1, 8),
       n=st.integers(1, 9).map(lambda k: 2 * k + 1), gs=grid, rwa=st.booleans(),
       method=st.sampled_from(["closed_form", "matching", "polaron", "spectrum", "evolve"]))
def test_round_trip_is_fixed_point(beta, e_d, cutoff, n, gs, rwa, method):
    cfg = RunConfig(dipole=DipoleSpec(beta=beta, e_d=e_d),
                    waveguide=WaveguideSpec(n_cavities=n, photon_cutoff=cutoff),
                    sweep=SweepPlan(method=method, g_values=gs, omega_values=(0.8, 1.1), rwa=rwa))
    text = dumps(cfg)
    again = loads(text)
    assert again == cfg
    assert dumps(again) == text


def test_default_round_trip_through_file(tmp_path):
    path = tmp_path / "run.ini"
    dump(RunConfig(), path)
    assert load(path) == RunConfig()


def test_partial_config_uses_defaults():
    cfg = loads("[dipole]\nbeta = 3.8\n[sweep]\ng_values = 0, 0.1\n")
    assert cfg.dipole.beta == 3.8 and cfg.dipole.e_d == DipoleSpec().e_d
    assert cfg.sweep.g_values == (0.0, 0.1)


def test_linspace_grid():
    assert parse_grid("linspace(0, 1, 5)") == (0.0, 0.25, 0.5, 0.75, 1.0)
    assert parse_grid(" 0.1, 0.2 ") == (0.1, 0.2)
    assert parse_grid("") == ()
    with pytest.raises(ConfigError):
        parse_grid("0.1, x")


@pytest.mark.parametrize("text,field", [
    ("[dipole]\nbeta = -1\n", "dipole.beta"),
    ("[dipole]\nbogus = 1\n", "dipole.bogus"),
    ("[waveguide]\nn_cavities = three\n", "waveguide.n_cavities"),
    ("[sweep]\ng_values = 0.2, 0.1\n", "sweep.g_values"),
    ("[sweep]\ncolumns = T, E_full\n", "sweep.columns"),
    ("[meta]\nschema_version = 9\n", "meta.schema_version"),
])
def test_invalid_documents_name_the_field(text, field):
    with pytest.raises(ConfigError) as info:
        loads(text)
    assert info.value.field == field
    assert field.split(".")[-1] in str(info.value)


def test_unknown_section_and_malformed_text():
    with pytest.raises(ConfigError):
        loads("[plot]\ncolor = red\n")
    with pytest.raises(ConfigError):
        loads("beta = 1\n")


def test_override():
    cfg = apply_override(RunConfig(), "waveguide.photon_cutoff", "7")
    assert cfg.waveguide.photon_cutoff == 7
    cfg = apply_override(cfg, "sweep.omega_values", "linspace(0.5, 1.5, 3)")
    assert cfg.sweep.omega_values == (0.5, 1.0, 1.5)
    assert dataclasses.replace(cfg, waveguide=WaveguideSpec(), sweep=SweepPlan()) == RunConfig()
    with pytest.raises(ConfigError):
        apply_override(cfg, "dipole.beta", "-2")
    with pytest.raises(ConfigError):
        apply_override(cfg, "nope.beta", "2")
