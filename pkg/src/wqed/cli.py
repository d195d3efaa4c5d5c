"""Command-line entry point.

Exit codes: 0 success, 2 configuration error, 3 numerical non-convergence,
130 interrupted (partial table written with a truncation marker).
Diagnostics go to stderr as one JSON object per line.
"""
from __future__ import annotations

import argparse
import json
import signal
import sys
from dataclasses import asdict, replace

import numpy as np

from . import config as cfgmod
from .circuit import circuit_to_model, model_to_circuit
from .errors import BandEdgeError, ConfigError, ConvergenceError, DimensionError, GridTooSmallError
from .io import Table, write_table
from .matter import renormalized_gap, solve_dipole
from .models import spin_boson_model
from .spectral import (coulomb_coupling_weak, in_band, self_energy_rwa, self_energy_rwa_sum_extrapolated,
                       spectral_density_coulomb, spectral_density_dipole)
from .sweeps import SweepAborted, resonance_trace, run_sweep

EXIT_OK, EXIT_CONFIG, EXIT_CONVERGENCE, EXIT_INTERRUPT = 0, 2, 3, 130


def diagnostic(level, message, **extra):
    rec = {"level": level, "message": message}
    rec.update(extra)
    print(json.dumps(rec, sort_keys=True, default=str), file=sys.stderr)


def _load_config(args):
    cfg = cfgmod.load(args.config) if args.config else cfgmod.RunConfig()
    for item in args.set or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects section.key=value, got {item!r}", key)
        cfg = cfgmod.apply_override(cfg, key.strip(), value.strip())
    return cfg


def _plan(cfg, **changes):
    changes = {k: v for k, v in changes.items() if v is not None}
    return replace(cfg.sweep, **changes).validate()


def _emit(table, args):
    write_table(table, args.out, as_json=args.json, stream=sys.stdout)


def _header(cfg, **extra):
    params = {"config": asdict(cfg)}
    params.update(extra)
    return params


def _grid(text, key):
    return cfgmod.parse_grid(text, key) if text is not None else None


# ---------------------------------------------------------------------------
# subcommands

def cmd_validate(cfg, args):
    sys.stdout.write(cfgmod.dumps(cfg))
    diagnostic("info", "config valid", schema_version=cfg.schema_version)


def _run(plan, cfg, args, table):
    return run_sweep(plan, cfg.dipole, cfg.waveguide, use_cache=not args.no_cache, table=table)


def cmd_spectrum(cfg, args, table):
    wg = cfg.waveguide if args.cutoff is None else replace(cfg.waveguide, photon_cutoff=args.cutoff)
    cfg = replace(cfg, waveguide=wg.validate())
    plan = _plan(cfg, method="spectrum", g_values=_grid(args.g, "g"), n_levels_out=args.levels,
                 columns=("g", "level_index", "E_full", "E_trunc_dipole", "E_trunc_coulomb"))
    return _run(plan, cfg, args, table)


def cmd_transmission(cfg, args, table):
    rwa = cfg.sweep.rwa if args.rwa is None else args.rwa
    method = args.method or ("closed_form" if rwa else "matching")
    if method == "closed_form" and not rwa:
        raise ConfigError("closed-form transmission requires --rwa", "rwa")
    cols = ("g", "omega", "delta", "T", "R", "omega_res_rwa")
    cols += ("unitarity_error",) if method == "closed_form" else ("flux_error",)
    plan = _plan(cfg, method=method, rwa=rwa, gauge=args.gauge, g_values=_grid(args.g, "g"),
                 omega_values=_grid(args.omega, "omega"), columns=cols)
    return _run(plan, cfg, args, table)


def cmd_inelastic(cfg, args, table):
    cols = ("g", "omega", "delta", "T", "R", "inelastic_T", "inelastic_R", "inelastic_flux",
            "inelastic_proxy", "omega_min_inelastic", "flux_error")
    plan = _plan(cfg, method="matching", rwa=False, gauge=args.gauge, g_values=_grid(args.g, "g"),
                 omega_values=_grid(args.omega, "omega"), columns=cols)
    return _run(plan, cfg, args, table)


def cmd_polaron(cfg, args, table):
    plan = _plan(cfg, method="polaron", gauge="dipole", g_values=_grid(args.g, "g"))
    return _run(plan, cfg, args, table)


def cmd_sweep(cfg, args, table):
    plan = _plan(cfg, workers=args.workers)
    if args.trace:
        return resonance_trace(plan, cfg.dipole, cfg.waveguide)
    return _run(plan, cfg, args, table)


def cmd_gap(cfg, args, table):
    gs = _grid(args.g, "g") or cfg.sweep.g_values
    bare = solve_dipole(cfg.dipole, n_levels=2).gap
    table.name, table.columns = "gap", ["g", "delta", "delta_prime", "lambda_c"]
    table.params = _header(cfg, g_values=list(gs))
    for g, dp, lam in renormalized_gap(cfg.dipole, gs):
        table.append({"g": g, "delta": bare, "delta_prime": dp, "lambda_c": lam})
    return table


def cmd_self_energy(cfg, args, table):
    w = cfg.waveguide
    lo, hi = w.band
    energies = _grid(args.energies, "energies") or tuple(np.linspace(lo, hi, 103)[1:-1])
    cols = ["E", "re", "im", "half_width"]
    if args.n_sum:
        cols += ["re_sum", "im_sum"]
        model = spin_boson_model(w, 1.0, args.g, "dipole", args.n_sum)
    table.name, table.columns = "self_energy", cols
    table.params = _header(cfg, g=args.g, n_sum=args.n_sum, eta=args.eta)
    for E in energies:
        se = self_energy_rwa(E, args.g, w.xi, w.omega_c)
        row = {"E": float(E), "re": se.real_part, "im": se.imag_part, "half_width": se.half_width}
        if args.n_sum:
            s = self_energy_rwa_sum_extrapolated(E, model, args.eta)
            row.update(re_sum=s.real, im_sum=s.imag)
        table.append(row)
    return table


def cmd_spectral_density(cfg, args, table):
    w = cfg.waveguide
    lo, hi = w.band
    omegas = _grid(args.omega, "omega") or tuple(np.linspace(lo, hi, 103)[1:-1])
    delta = args.delta
    g_c = coulomb_coupling_weak(args.g, delta, w.omega_c)
    table.name, table.columns = "spectral_density", ["omega", "J_dipole", "J_coulomb", "in_band"]
    table.params = _header(cfg, g=args.g, delta=delta, g_coulomb=g_c)
    for om in omegas:
        inside = bool(in_band(om, w.xi, w.omega_c))
        jd = float(spectral_density_dipole(om, args.g, w.xi, w.omega_c)) if inside else 0.0
        jc = float(spectral_density_coulomb(om, g_c, w.xi, w.omega_c)) if inside else 0.0
        table.append({"omega": float(om), "J_dipole": jd, "J_coulomb": jc, "in_band": inside})
    return table


def cmd_circuit_map(cfg, args, table):
    if args.inverse:
        omega_r, xi_r = args.inverse
        c = model_to_circuit(omega_r, xi_r, C_r=cfg.circuit.C_r, g_center=args.g_center,
                             n_modes=args.n_modes, C_J=cfg.circuit.C_J, E_J=cfg.circuit.E_J)
        table.name, table.columns = "circuit_inverse", ["C_r", "L_r", "L_c", "C_J", "E_J"]
        table.params = _header(cfg, omega_r=omega_r, xi_r=xi_r, g_center=args.g_center,
                               n_modes=args.n_modes)
        table.append({k: getattr(c, k) for k in table.columns})
        return table
    m = circuit_to_model(cfg.circuit, args.n_modes)
    xi_n, om_n, g_n, shift_n = m.normalized
    table.name = "circuit_map"
    table.columns = ["k", "omega_k", "g_k", "alpha_k", "omega_k_norm", "g_k_norm"]
    table.params = _header(cfg, n_modes=args.n_modes, omega_r=m.omega_r, xi_r=m.xi_r,
                           L_sigma=m.l_sigma, flux_shift=m.flux_shift, g_center=m.g_center,
                           xi_norm=xi_n, flux_shift_norm=shift_n)
    for i in range(len(m.k)):
        table.append({"k": float(m.k[i]), "omega_k": float(m.omega_k[i]), "g_k": float(m.g_k[i]),
                      "alpha_k": float(m.alpha_k[i]), "omega_k_norm": float(om_n[i]),
                      "g_k_norm": float(g_n[i])})
    return table


# ---------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="wqed", description="Dipole in a cavity-array waveguide: "
                                "spectra, gaps, transmission and sweeps.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, table=True):
        sp.add_argument("--config", help="INI run configuration")
        sp.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE",
                        help="override one config value (repeatable)")
        if table:
            sp.add_argument("--out", help="output path (default: stdout)")
            sp.add_argument("--json", action="store_true", help="write the JSON mirror instead of CSV")
        return sp

    def cached(sp):
        sp.add_argument("--no-cache", action="store_true", help="ignore $WQED_CACHE_DIR")
        return sp

    common(sub.add_parser("validate", help="check a config and print its canonical form"), table=False)

    sp = cached(common(sub.add_parser("spectrum", help="lowest levels: full vs truncated models")))
    sp.add_argument("--g", help="coupling grid (list or linspace(a,b,n))")
    sp.add_argument("--cutoff", type=int, help="photon cutoff per cavity")
    sp.add_argument("--levels", type=int, help="number of levels per coupling")

    sp = common(sub.add_parser("gap", help="dipole-gauge gap versus coupling"))
    sp.add_argument("--g")

    sp = cached(common(sub.add_parser("transmission", help="elastic single-photon transmission")))
    sp.add_argument("--g")
    sp.add_argument("--omega", help="frequency grid")
    sp.add_argument("--gauge", choices=("dipole", "coulomb"))
    grp = sp.add_mutually_exclusive_group()
    grp.add_argument("--rwa", dest="rwa", action="store_true", default=None)
    grp.add_argument("--full", dest="rwa", action="store_false", help="keep counter-rotating terms")
    sp.add_argument("--method", choices=("closed_form", "matching"))

    sp = cached(common(sub.add_parser("polaron", help="renormalised gap and polaron resonance")))
    sp.add_argument("--g")

    sp = common(sub.add_parser("self-energy", help="RWA self-energy on an energy grid"))
    sp.add_argument("--g", type=float, default=0.1)
    sp.add_argument("--energies")
    sp.add_argument("--n-sum", type=int, default=0, help="also evaluate the discrete sum with N modes")
    sp.add_argument("--eta", type=float, default=1e-4)

    sp = common(sub.add_parser("spectral-density", help="dipole and Coulomb spectral densities"))
    sp.add_argument("--g", type=float, default=0.1)
    sp.add_argument("--delta", type=float, default=1.0, help="gap used for the Coulomb coupling")
    sp.add_argument("--omega")

    sp = cached(common(sub.add_parser("inelastic", help="elastic and inelastic flux beyond the RWA")))
    sp.add_argument("--g")
    sp.add_argument("--omega")
    sp.add_argument("--gauge", choices=("dipole", "coulomb"))

    sp = common(sub.add_parser("circuit-map", help="circuit elements to waveguide model and back"))
    sp.add_argument("--n-modes", type=int, default=101)
    sp.add_argument("--inverse", nargs=2, type=float, metavar=("OMEGA_R", "XI_R"))
    sp.add_argument("--g-center", type=float)

    sp = cached(common(sub.add_parser("sweep", help="run the [sweep] plan of the config")))
    sp.add_argument("--workers", type=int)
    sp.add_argument("--trace", action="store_true", help="transmittance-minimum trace per coupling")
    return p


COMMANDS = {"spectrum": cmd_spectrum, "gap": cmd_gap, "transmission": cmd_transmission,
            "polaron": cmd_polaron, "self-energy": cmd_self_energy,
            "spectral-density": cmd_spectral_density, "inelastic": cmd_inelastic,
            "circuit-map": cmd_circuit_map, "sweep": cmd_sweep}


def _raise_interrupt(signum, frame):
    raise KeyboardInterrupt


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    table = Table(args.command, [])
    old = None
    try:
        old = signal.signal(signal.SIGTERM, _raise_interrupt)
    except ValueError:  # not in the main thread
        pass
    try:
        cfg = _load_config(args)
        if args.command == "validate":
            cmd_validate(cfg, args)
            return EXIT_OK
        table.params = _header(cfg)
        result = COMMANDS[args.command](cfg, args, table)
        _emit(result, args)
        return EXIT_OK
    except (ConfigError, GridTooSmallError, DimensionError, BandEdgeError) as exc:
        diagnostic("error", str(exc), type=type(exc).__name__, field=getattr(exc, "field", None),
                   exit_code=EXIT_CONFIG)
        return EXIT_CONFIG
    except SweepAborted as exc:
        exc.table.truncated = True
        _emit(exc.table, args)
        diagnostic("error", str(exc), type="SweepAborted", summary=exc.summary,
                   exit_code=EXIT_CONVERGENCE)
        return EXIT_CONVERGENCE
    except ConvergenceError as exc:
        res = exc.residual
        if isinstance(res, np.ndarray):
            res = res.tolist()
        diagnostic("error", str(exc), type=type(exc).__name__, residual=res,
                   exit_code=EXIT_CONVERGENCE)
        return EXIT_CONVERGENCE
    except KeyboardInterrupt:
        if table.columns:
            table.truncated = True
            _emit(table, args)
        diagnostic("error", "interrupted; partial results written", rows=len(table.rows),
                   exit_code=EXIT_INTERRUPT)
        return EXIT_INTERRUPT
    finally:
        if old is not None:
            signal.signal(signal.SIGTERM, old)


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
