"""Parameter sweeps producing tables, with per-row convergence data and an on-disk cache."""
from __future__ import annotations

import hashlib
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import BandEdgeError, ConfigError, ConvergenceError, DimensionError, GridTooSmallError
from .io import Table, from_csv, to_csv
from .matching import build_scatterer, inelastic_threshold, scatter_single_photon
from .matter import DipoleSpec, lambda_for_coupling, renormalized_gap, solve_dipole
from .models import (WaveguideSpec, build_full_coulomb, build_full_dipole, lowest_spectrum,
                     spin_boson_model)
from .polaron import polaron_resonance, solve_polaron
from .rwa_scattering import resonance_rwa, transmission_coulomb_rwa, transmission_dipole_rwa
from .spectral import coulomb_coupling_weak
from .wavepacket import WavepacketSpec, evolve_wavepacket

CACHE_ENV = "WQED_CACHE_DIR"
ABORT_FRACTION = 0.2

METHODS = ("closed_form", "matching", "polaron", "spectrum", "evolve")

COLUMNS = {
    "closed_form": ("g", "omega", "delta", "T", "R", "t_re", "t_im", "omega_res_rwa",
                    "unitarity_error", "status"),
    "matching": ("g", "omega", "delta", "T", "R", "inelastic_T", "inelastic_R", "inelastic_flux",
                 "inelastic_proxy", "bound_inelastic_flux", "omega_min_inelastic",
                 "omega_res_rwa", "omega_res_polaron", "flux_error", "status"),
    "polaron": ("g", "delta", "delta_r", "omega_res_polaron", "omega_res_rwa", "iterations",
                "residual", "status"),
    "spectrum": ("g", "level_index", "E_full", "E_trunc_dipole", "E_trunc_coulomb", "residual",
                 "status"),
    "evolve": ("g", "omega", "delta", "T_packet", "R_packet", "T_carrier", "norm_error",
               "wall_population", "retained", "status"),
}

# convergence column and threshold per method; rows above it are flagged
THRESHOLDS = {
    "closed_form": ("unitarity_error", 1e-10),
    "matching": ("flux_error", 1e-6),
    "polaron": ("residual", 1e-10),
    "spectrum": ("residual", 1e-8),
    "evolve": ("norm_error", 1e-10),
}

# fields that do not change the numbers and so stay out of the cache key
_NON_SEMANTIC = ("workers",)


class SweepAborted(ConvergenceError):
    """Too many grid points failed; ``table`` holds the rows computed so far."""

    def __init__(self, message, table, summary):
        super().__init__(message, summary)
        self.table = table
        self.summary = summary


def _check_grid(name, values):
    vals = np.asarray(values, dtype=float)
    if vals.ndim != 1:
        raise ConfigError(f"{name} must be a 1-d list", name)
    if not np.all(np.isfinite(vals)):
        raise ConfigError(f"{name} must be finite", name)
    if vals.size > 1 and not np.all(np.diff(vals) > 0):
        raise ConfigError(f"{name} must be strictly increasing", name)


@dataclass(frozen=True)
class SweepPlan:
    """What to compute and on which grid.

    ``delta_source`` picks the two-level gap at each ``g``: ``"fixed"`` uses
    ``delta``, ``"bare"`` the gap of the dipole, ``"renormalized"`` the
    dipole-gauge gap ``Delta'(g)``. ``truncation_levels`` is the number of dipole
    levels kept in the truncated models of the ``spectrum`` method.
    """

    method: str = "closed_form"
    g_values: tuple = (0.0,)
    omega_values: tuple = ()
    gauge: str = "dipole"
    rwa: bool = True
    delta: float = 1.0
    delta_source: str = "fixed"
    truncation_levels: int = 2
    n_levels_out: int = 5
    region_size: int = 7
    excitation_cutoff: int = 4
    n_evanescent: int = 8
    n_modes: int = 2001
    packet_width: float = 4.0
    packet_dwell: float = 0.0
    chain_half_length: int = 60
    evolve_cutoff: int = 3
    columns: tuple = ()
    workers: int = 1

    def validate(self, runnable=False):
        """Check the plan; ``runnable=True`` also requires the grids the method needs."""
        if self.method not in METHODS:
            raise ConfigError(f"unknown method {self.method!r}", "method")
        if self.gauge not in ("dipole", "coulomb"):
            raise ConfigError(f"unknown gauge {self.gauge!r}", "gauge")
        if self.delta_source not in ("fixed", "bare", "renormalized"):
            raise ConfigError(f"unknown delta_source {self.delta_source!r}", "delta_source")
        if not self.delta > 0:
            raise ConfigError("delta must be > 0", "delta")
        if len(self.g_values) == 0:
            raise ConfigError("g_values must not be empty", "g_values")
        _check_grid("g_values", self.g_values)
        _check_grid("omega_values", self.omega_values)
        if min(self.g_values) < 0:
            raise ConfigError("g_values must be >= 0", "g_values")
        if runnable and self.method in ("closed_form", "matching", "evolve") and not len(self.omega_values):
            raise ConfigError(f"method {self.method} needs omega_values", "omega_values")
        if self.packet_dwell < 0:
            raise ConfigError("packet_dwell must be >= 0", "packet_dwell")
        if self.truncation_levels < 2:
            raise ConfigError("truncation_levels must be >= 2", "truncation_levels")
        for name in ("n_levels_out", "n_evanescent", "excitation_cutoff", "workers"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1", name)
        if self.n_modes < 1 or self.n_modes % 2 == 0:
            raise ConfigError("n_modes must be odd and positive", "n_modes")
        bad = set(self.columns) - set(COLUMNS[self.method])
        if bad:
            raise ConfigError(f"columns {sorted(bad)} not produced by method {self.method}", "columns")
        return self

    @property
    def output_columns(self):
        if not self.columns:
            return list(COLUMNS[self.method])
        cols = list(self.columns)
        # the row status always travels with the data
        return cols if "status" in cols else cols + ["status"]


def plan_key(plan: SweepPlan, dipole: DipoleSpec, waveguide: WaveguideSpec) -> str:
    doc = {"plan": {k: v for k, v in asdict(plan).items() if k not in _NON_SEMANTIC},
           "dipole": asdict(dipole), "waveguide": asdict(waveguide), "format": 1}
    blob = json.dumps(doc, sort_keys=True, default=list).encode()
    return hashlib.sha256(blob).hexdigest()


def sweep_params(plan, dipole, waveguide):
    """All settings that shape the table, for the output header."""
    return {"plan": {k: v for k, v in asdict(plan).items() if k not in _NON_SEMANTIC},
            "dipole": asdict(dipole), "waveguide": asdict(waveguide)}


def error_code(exc):
    for cls, code in ((BandEdgeError, "band_edge"), (DimensionError, "dimension"),
                      (GridTooSmallError, "grid"), (ConvergenceError, "convergence"),
                      (ConfigError, "config"), (np.linalg.LinAlgError, "linalg")):
        if isinstance(exc, cls):
            return code
    return "error"


def gap_for(plan: SweepPlan, dipole: DipoleSpec, g: float) -> float:
    if plan.delta_source == "fixed":
        return float(plan.delta)
    if plan.delta_source == "bare" or g == 0:
        return float(solve_dipole(dipole, n_levels=2).gap)
    return float(renormalized_gap(dipole, [g])[0][1])


def _nan_row(cols, **known):
    row = {c: math.nan for c in cols}
    row.update(known)
    return row


def _polaron_marker(plan, waveguide, delta, g):
    if plan.gauge != "dipole" or g == 0:
        return float(delta) if g == 0 else math.nan
    model = spin_boson_model(waveguide, delta, g, "dipole", plan.n_modes)
    sol = solve_polaron(model)
    return polaron_resonance(sol, model)[0]


def _rows_closed_form(plan, dipole, waveguide, g):
    cols = COLUMNS["closed_form"]
    delta = gap_for(plan, dipole, g)
    w_res = resonance_rwa(delta, g, waveguide.omega_c)
    rows = []
    for om in plan.omega_values:
        try:
            if plan.gauge == "dipole":
                t = complex(transmission_dipole_rwa(om, delta, g, waveguide.xi, waveguide.omega_c).t)
            else:
                g_c = coulomb_coupling_weak(g, delta, waveguide.omega_c)
                t = complex(transmission_coulomb_rwa(om, delta, g_c, waveguide.xi, waveguide.omega_c).t)
            T, R = abs(t) ** 2, abs(t - 1) ** 2
            rows.append({"g": g, "omega": om, "delta": delta, "T": T, "R": R, "t_re": t.real,
                         "t_im": t.imag, "omega_res_rwa": w_res,
                         "unitarity_error": abs(T + R - 1), "status": "ok"})
        except Exception as exc:  # noqa: BLE001 - recorded in the row
            rows.append(_nan_row(cols, g=g, omega=om, status=error_code(exc)))
    return rows


def _matching_waveguide(plan, waveguide):
    return replace(waveguide, n_cavities=plan.region_size + 4)


def _rows_matching(plan, dipole, waveguide, g):
    cols = COLUMNS["matching"]
    try:
        delta = gap_for(plan, dipole, g)
        scat = build_scatterer(_matching_waveguide(plan, waveguide), delta, g, plan.region_size,
                               plan.excitation_cutoff, plan.gauge, plan.rwa)
        w_min = inelastic_threshold(scat)
        w_res = resonance_rwa(delta, g, waveguide.omega_c)
        w_pol = math.nan if plan.rwa else _polaron_marker(plan, waveguide, delta, g)
    except Exception as exc:  # noqa: BLE001
        return [_nan_row(cols, g=g, omega=om, status=error_code(exc)) for om in plan.omega_values]
    rows = []
    for om in plan.omega_values:
        try:
            res = scatter_single_photon(scat, om, plan.n_evanescent)
            rows.append({"g": g, "omega": om, "delta": delta, "T": res.T, "R": res.R,
                         "inelastic_T": res.inelastic_transmittance,
                         "inelastic_R": res.inelastic_reflectance,
                         "inelastic_flux": res.inelastic_flux, "inelastic_proxy": res.inelastic_proxy,
                         "bound_inelastic_flux": res.bound_inelastic_flux,
                         "omega_min_inelastic": w_min, "omega_res_rwa": w_res,
                         "omega_res_polaron": w_pol, "flux_error": res.flux_error, "status": "ok"})
        except Exception as exc:  # noqa: BLE001
            rows.append(_nan_row(cols, g=g, omega=om, delta=delta, status=error_code(exc)))
    return rows


def _rows_polaron(plan, dipole, waveguide, g):
    cols = COLUMNS["polaron"]
    try:
        delta = gap_for(plan, dipole, g)
        model = spin_boson_model(waveguide, delta, g, "dipole", plan.n_modes)
        sol = solve_polaron(model)
        w_pol = polaron_resonance(sol, model)[0] if g > 0 else delta
        return [{"g": g, "delta": delta, "delta_r": sol.delta_r, "omega_res_polaron": w_pol,
                 "omega_res_rwa": resonance_rwa(delta, g, waveguide.omega_c),
                 "iterations": sol.iterations, "residual": sol.residual, "status": "ok"}]
    except Exception as exc:  # noqa: BLE001
        return [_nan_row(cols, g=g, status=error_code(exc))]


def _spectrum(op, n):
    vals, vecs = lowest_spectrum(op, n, return_vectors=True)
    res = np.linalg.norm(op.matrix @ vecs - vecs * vals, axis=0)
    return vals, float(res.max())


def _rows_spectrum(plan, dipole, waveguide, g):
    cols = COLUMNS["spectrum"]
    n = plan.n_levels_out
    try:
        d = replace(dipole, lambda_c=lambda_for_coupling(dipole, g))
        e_full, r1 = _spectrum(build_full_dipole(waveguide, d, dipole.n_levels), n)
        e_td, r2 = _spectrum(build_full_dipole(waveguide, d, plan.truncation_levels), n)
        e_tc, r3 = _spectrum(build_full_coulomb(waveguide, d, plan.truncation_levels), n)
    except Exception as exc:  # noqa: BLE001
        return [_nan_row(cols, g=g, level_index=i, status=error_code(exc)) for i in range(n)]
    res = max(r1, r2, r3)
    return [{"g": g, "level_index": i, "E_full": float(e_full[i]), "E_trunc_dipole": float(e_td[i]),
             "E_trunc_coulomb": float(e_tc[i]), "residual": res, "status": "ok"}
            for i in range(min(n, len(e_full), len(e_td), len(e_tc)))]


def carrier_momentum(omega, waveguide):
    """``k`` in (0, pi) with ``omega = omega_c + 2 xi cos k``."""
    c = (omega - waveguide.omega_c) / (2 * waveguide.xi)
    if not -1 < c < 1:
        raise BandEdgeError(f"carrier frequency {omega} outside the band")
    return float(np.arccos(c))


def packet_schedule(waveguide, omega, theta, region_half_width=4, dwell=0.0):
    """Start position and final time so that the packet fully clears the region.

    ``dwell`` adds time for re-emission by a long-lived scatterer (narrow lines).
    """
    k0 = carrier_momentum(omega, waveguide)
    x_in = -(region_half_width + 6 * theta)
    v = 2 * abs(waveguide.xi) * math.sin(k0)
    t_out = (abs(x_in) + region_half_width + 6 * theta) / v + dwell
    return WavepacketSpec(x_in, k0, theta), t_out


def _rows_evolve(plan, dipole, waveguide, g):
    cols = COLUMNS["evolve"]
    rows = []
    try:
        delta = gap_for(plan, dipole, g)
    except Exception as exc:  # noqa: BLE001
        return [_nan_row(cols, g=g, omega=om, status=error_code(exc)) for om in plan.omega_values]
    chain = replace(waveguide, n_cavities=2 * plan.chain_half_length + 1)
    for om in plan.omega_values:
        try:
            wp, t_out = packet_schedule(chain, om, plan.packet_width, dwell=plan.packet_dwell)
            res = evolve_wavepacket(chain, delta, g, wp, t_out, plan.gauge, plan.rwa,
                                    excitation_cutoff=plan.evolve_cutoff)
            rows.append({"g": g, "omega": om, "delta": delta, "T_packet": res.transmitted,
                         "R_packet": res.reflected, "T_carrier": res.transmission_at(wp.k_in),
                         "norm_error": res.norm_error, "wall_population": res.wall_population,
                         "retained": res.retained,
                         "status": "ok"})
        except Exception as exc:  # noqa: BLE001
            rows.append(_nan_row(cols, g=g, omega=om, delta=delta, status=error_code(exc)))
    return rows


_PRODUCERS = {"closed_form": _rows_closed_form, "matching": _rows_matching,
              "polaron": _rows_polaron, "spectrum": _rows_spectrum, "evolve": _rows_evolve}


def rows_for_g(plan, dipole, waveguide, g):
    """All rows of one ``g`` slice; convergence thresholds are applied here."""
    rows = _PRODUCERS[plan.method](plan, dipole, waveguide, float(g))
    col, tol = THRESHOLDS[plan.method]
    for row in rows:
        if row["status"] == "ok" and not row[col] < tol:
            row["status"] = "unconverged"
    return rows


def _cache_path(key, cache_dir):
    cache_dir = cache_dir if cache_dir is not None else os.environ.get(CACHE_ENV)
    if not cache_dir:
        return None
    return Path(cache_dir) / f"{key}.csv"


def iter_slices(plan, dipole, waveguide):
    """Yield the row lists per ``g`` in grid order (process pool when ``workers > 1``)."""
    gs = [float(g) for g in plan.g_values]
    if plan.workers > 1 and len(gs) > 1:
        with ProcessPoolExecutor(max_workers=plan.workers) as pool:
            # map preserves submission order, so the merge is deterministic
            yield from pool.map(rows_for_g, [plan] * len(gs), [dipole] * len(gs),
                                [waveguide] * len(gs), gs)
    else:
        for g in gs:
            yield rows_for_g(plan, dipole, waveguide, g)


def run_sweep(plan: SweepPlan, dipole: DipoleSpec | None = None, waveguide: WaveguideSpec | None = None,
              cache_dir=None, use_cache=True, table: Table | None = None) -> Table:
    """Evaluate the plan on its grid; one row per grid point (per level for ``spectrum``).

    Failed points stay in the table with a non-``ok`` status. The cache
    directory defaults to ``$WQED_CACHE_DIR``; only complete tables are
    cached. Pass an empty ``table`` to observe rows as they arrive (the
    caller keeps the partial result on interruption).

    Raises
    ------
    SweepAborted
        When more than 20% of the rows are not ``ok``.
    """
    dipole = (dipole or DipoleSpec()).validate()
    waveguide = (waveguide or WaveguideSpec()).validate()
    plan.validate(runnable=True)
    cols = plan.output_columns
    params = sweep_params(plan, dipole, waveguide)
    key = plan_key(plan, dipole, waveguide)
    path = _cache_path(key, cache_dir) if use_cache else None
    if path is not None and path.exists():
        cached = from_csv(path.read_bytes().decode("utf-8"))
        if not cached.truncated:
            if table is not None:
                table.rows.extend(cached.rows)
            return cached
    if table is None:
        table = Table(f"sweep_{plan.method}", cols, params=params)
    else:
        table.name, table.columns, table.params = f"sweep_{plan.method}", cols, params
    for rows in iter_slices(plan, dipole, waveguide):
        for row in rows:
            table.append({c: row[c] for c in cols})
    bad = [r for r in table.rows if r["status"] != "ok"]
    if table.rows and len(bad) > ABORT_FRACTION * len(table.rows):
        counts = {}
        for r in bad:
            counts[r["status"]] = counts.get(r["status"], 0) + 1
        summary = {"failed": len(bad), "total": len(table.rows), "by_status": counts}
        raise SweepAborted(f"sweep aborted: {len(bad)}/{len(table.rows)} points failed {counts}",
                           table, summary)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_bytes(to_csv(table).encode("utf-8"))
        os.replace(tmp, path)
    return table


# ---------------------------------------------------------------------------
# resonance trace

TRACE_COLUMNS = ("g", "delta", "omega_min", "T_min", "omega_res_rwa", "omega_res_polaron", "flag")


@dataclass
class _TraceContext:
    plan: SweepPlan
    waveguide: WaveguideSpec
    scat: object = None
    calls: list = field(default_factory=list)

    def T(self, om):
        self.calls.append(om)
        return scatter_single_photon(self.scat, om, self.plan.n_evanescent).T


def trace_point(plan, dipole, waveguide, g, n_coarse=81, flat_tol=1e-6, rel_res=1e-6):
    """Transmittance minimum at one coupling.

    Coarse scan on ``plan.omega_values`` (or ``n_coarse`` band points) followed
    by golden-section refinement to ``rel_res`` times the band width.
    """
    delta = gap_for(plan, dipole, g)
    lo, hi = waveguide.band
    w_rwa = resonance_rwa(delta, g, waveguide.omega_c)
    w_pol = delta if g == 0 else (_polaron_marker(plan, waveguide, delta, g) if not plan.rwa
                                  else math.nan)
    row = {"g": g, "delta": delta, "omega_min": math.nan, "T_min": math.nan,
           "omega_res_rwa": w_rwa, "omega_res_polaron": w_pol, "flag": "ok"}
    ctx = _TraceContext(plan, waveguide)
    ctx.scat = build_scatterer(_matching_waveguide(plan, waveguide), delta, g, plan.region_size,
                               plan.excitation_cutoff, plan.gauge, plan.rwa)
    if len(plan.omega_values):
        grid = np.asarray(plan.omega_values, dtype=float)
    else:
        eps = 1e-3 * (hi - lo)
        grid = np.linspace(lo + eps, hi - eps, n_coarse)
    vals = np.array([ctx.T(om) for om in grid])
    if vals.max() - vals.min() < flat_tol:
        row["flag"] = "flat"
        return row
    i = int(np.argmin(vals))
    if i == 0 or i == len(grid) - 1:
        row.update(omega_min=float(grid[i]), T_min=float(vals[i]), flag="edge")
        return row
    a, b, c = grid[i - 1], grid[i], grid[i + 1]
    xtol = rel_res * (hi - lo) / b
    opt = minimize_scalar(ctx.T, bracket=(a, b, c), method="golden", options={"xtol": xtol})
    row.update(omega_min=float(opt.x), T_min=float(opt.fun))
    return row


def resonance_trace(plan: SweepPlan, dipole: DipoleSpec | None = None,
                    waveguide: WaveguideSpec | None = None) -> Table:
    """Per ``g``: matching transmittance minimum with the RWA and polaron markers.

    Flags: ``flat`` (no dip, e.g. ``g = 0``), ``edge`` (minimum on the scan
    boundary), or an error code.
    """
    dipole = (dipole or DipoleSpec()).validate()
    waveguide = (waveguide or WaveguideSpec()).validate()
    plan = replace(plan, method="matching").validate()
    table = Table("resonance_trace", list(TRACE_COLUMNS), params=sweep_params(plan, dipole, waveguide))
    for g in plan.g_values:
        try:
            row = trace_point(plan, dipole, waveguide, float(g))
        except Exception as exc:  # noqa: BLE001
            row = {c: math.nan for c in TRACE_COLUMNS}
            row.update(g=float(g), flag=error_code(exc))
        table.append(row)
    return table
