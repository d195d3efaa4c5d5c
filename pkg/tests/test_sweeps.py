import math

import numpy as np
import pytest

from wqed.errors import ConfigError
from wqed.io import from_csv, to_csv
from wqed.models import WaveguideSpec
from wqed.rwa_scattering import resonance_rwa
from wqed.sweeps import (CACHE_ENV, COLUMNS, SweepAborted, SweepPlan, plan_key, resonance_trace,
                         run_sweep)

OMEGAS = tuple(np.linspace(0.5, 1.5, 11))


def test_closed_form_plan_is_deterministic(tmp_path):
    plan = SweepPlan(g_values=(0.0, 0.1, 0.3), omega_values=OMEGAS)
    a = to_csv(run_sweep(plan, use_cache=False))
    b = to_csv(run_sweep(plan, use_cache=False))
    assert a == b
    table = from_csv(a)
    assert len(table.rows) == 33 and table.columns == list(COLUMNS["closed_form"])
    assert all(r["status"] == "ok" for r in table.rows)


def test_single_point_at_zero_coupling_passes_through():
    table = run_sweep(SweepPlan(g_values=(0.0,), omega_values=(1.0,)), use_cache=False)
    (row,) = table.rows
    assert row["T"] == 1.0 and row["R"] == 0.0 and row["status"] == "ok"


def test_matching_plan_reports_markers_and_flux():
    plan = SweepPlan(method="matching", g_values=(0.2,), omega_values=(0.8, 0.95, 1.2), rwa=False,
                     region_size=7, excitation_cutoff=3, n_modes=201)
    rows = run_sweep(plan, use_cache=False).rows
    for col in ("T", "R", "inelastic_T", "inelastic_proxy", "omega_res_rwa", "omega_res_polaron"):
        assert all(math.isfinite(r[col]) for r in rows)
    assert all(r["flux_error"] < 1e-6 and r["status"] == "ok" for r in rows)
    assert rows[0]["omega_res_rwa"] < rows[0]["omega_res_polaron"] < 1.0


def test_cache_reuses_complete_tables(tmp_path, monkeypatch):
    monkeypatch.setenv(CACHE_ENV, str(tmp_path))
    plan = SweepPlan(g_values=(0.1,), omega_values=OMEGAS)
    first = run_sweep(plan)
    path = tmp_path / f"{plan_key(plan, *_defaults())}.csv"
    assert path.exists()
    second = run_sweep(plan)
    assert to_csv(second) == to_csv(first)
    assert plan_key(plan, *_defaults()) == plan_key(SweepPlan(g_values=(0.1,), omega_values=OMEGAS,
                                                              workers=3), *_defaults())
    assert plan_key(plan, *_defaults()) != plan_key(SweepPlan(g_values=(0.2,), omega_values=OMEGAS),
                                                    *_defaults())


def _defaults():
    from wqed.matter import DipoleSpec
    return DipoleSpec(), WaveguideSpec()


def test_cache_hit_skips_computation(tmp_path, monkeypatch):
    import wqed.sweeps as sw
    plan = SweepPlan(g_values=(0.1,), omega_values=OMEGAS)
    run_sweep(plan, cache_dir=tmp_path)

    def boom(*a, **k):
        raise AssertionError("recomputed")
    monkeypatch.setattr(sw, "rows_for_g", boom)
    assert len(run_sweep(plan, cache_dir=tmp_path).rows) == len(OMEGAS)
    with pytest.raises(AssertionError):
        run_sweep(plan, cache_dir=tmp_path, use_cache=False)


def test_failed_points_are_flagged_not_dropped():
    # two out-of-band points among eleven: 18% failures, below the abort fraction
    om = (0.2, 0.3) + tuple(np.linspace(0.5, 1.5, 9))
    table = run_sweep(SweepPlan(g_values=(0.1,), omega_values=om), use_cache=False)
    status = table.column("status")
    assert len(status) == 11 and status[:2] == ["band_edge"] * 2
    assert all(s == "ok" for s in status[2:])


def test_systemic_failure_aborts_with_summary():
    om = (0.1, 0.2, 0.3, 1.0)
    with pytest.raises(SweepAborted) as info:
        run_sweep(SweepPlan(g_values=(0.1,), omega_values=om), use_cache=False)
    assert info.value.summary == {"failed": 3, "total": 4, "by_status": {"band_edge": 3}}
    assert len(info.value.table.rows) == 4


def test_rows_over_threshold_are_flagged(monkeypatch):
    import wqed.sweeps as sw
    monkeypatch.setitem(sw.THRESHOLDS, "closed_form", ("unitarity_error", -1.0))
    plan = SweepPlan(g_values=(0.1,), omega_values=(1.0,))
    with pytest.raises(SweepAborted) as info:
        run_sweep(plan, use_cache=False)
    assert info.value.table.rows[0]["status"] == "unconverged"


def test_plan_validation():
    with pytest.raises(ConfigError):
        SweepPlan(g_values=(0.2, 0.1)).validate()
    with pytest.raises(ConfigError):
        SweepPlan(omega_values=(1.0, 1.0)).validate()
    with pytest.raises(ConfigError):
        SweepPlan(columns=("T", "E_full")).validate()
    with pytest.raises(ConfigError):
        SweepPlan(method="nope").validate()
    with pytest.raises(ConfigError):
        run_sweep(SweepPlan(), use_cache=False)  # no omega grid
    assert SweepPlan(columns=("T",)).output_columns == ["T", "status"]


def test_column_selection():
    table = run_sweep(SweepPlan(g_values=(0.1,), omega_values=(1.0,), columns=("omega", "T")),
                      use_cache=False)
    assert table.columns == ["omega", "T", "status"]


def test_parallel_merge_matches_serial():
    plan = SweepPlan(method="polaron", g_values=(0.05, 0.1, 0.2, 0.3), n_modes=201)
    serial = to_csv(run_sweep(plan, use_cache=False))
    par = run_sweep(SweepPlan(method="polaron", g_values=plan.g_values, n_modes=201, workers=2),
                    use_cache=False)
    assert to_csv(par) == serial


def test_spectrum_plan_small():
    from wqed.matter import DipoleSpec
    wg = WaveguideSpec(n_cavities=3, photon_cutoff=3)
    plan = SweepPlan(method="spectrum", g_values=(0.0, 0.2), n_levels_out=3)
    rows = run_sweep(plan, DipoleSpec(n_levels=4), wg, use_cache=False).rows
    assert len(rows) == 6 and all(r["status"] == "ok" for r in rows)
    for r in rows:
        assert r["E_full"] <= r["E_trunc_dipole"] + 1e-9 or r["level_index"] > 0


def test_rwa_trace_equals_closed_form_resonance():
    plan = SweepPlan(g_values=(0.1, 0.2, 0.3), region_size=5, excitation_cutoff=1, rwa=True)
    rows = resonance_trace(plan).rows
    for r in rows:
        assert r["flag"] == "ok"
        assert abs(r["omega_min"] - resonance_rwa(1.0, r["g"])) < 1e-6
        assert r["T_min"] < 1e-8


def test_trace_flags_flat_spectrum_at_zero_coupling():
    (row,) = resonance_trace(SweepPlan(g_values=(0.0,), region_size=5, excitation_cutoff=1)).rows
    assert row["flag"] == "flat" and math.isnan(row["omega_min"])
    assert row["omega_res_rwa"] == row["omega_res_polaron"] == row["delta"]


def test_trace_records_errors_per_point():
    plan = SweepPlan(g_values=(0.1,), region_size=3, excitation_cutoff=1, rwa=True)
    (row,) = resonance_trace(plan, waveguide=WaveguideSpec()).rows
    assert row["flag"] == "ok"
    (row,) = resonance_trace(SweepPlan(g_values=(1.2,), region_size=3, excitation_cutoff=3,
                                       rwa=False, n_modes=101)).rows
    assert row["flag"] == "convergence"
