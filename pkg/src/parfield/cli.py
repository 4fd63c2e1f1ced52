"""Command-line front end: scenario configuration, profiles, caustic
surfaces, closed orbits, and detachment-current sweeps, exported as CSV
plus JSON metadata.

Configuration is a flat ``key = value`` file with namespaced keys
(``fields.electric_v_per_m``, ``detector.z_m``, ...).  Every key can be
overridden from the environment (prefix ``PARFIELD_``, dots become
underscores, upper-case) or on the command line via ``--set key=value``.

Exit codes: 0 success, 2 configuration error, 3 numerical-convergence
error, 4 unsupported evaluation region.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import caustics as ca
from .classical import closed_orbit_plane_crossing, closed_orbits
from .errors import ConvergenceError, DomainError, ParfieldError, UnsupportedRegionError
from .profiles import METHODS, compute_profile
from .quantum import total_current
from .scales import derive_scales

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONVERGENCE = 3
EXIT_UNSUPPORTED = 4

ENV_PREFIX = "PARFIELD_"

DEFAULTS = {
    "fields.electric_v_per_m": "15.0",
    "fields.magnetic_t": "0.02",
    "source.energy_ev": "1e-4",
    "source.quantum_only": "false",
    "detector.z_m": "30e-6",
    "detector.rho_min_m": "0.0",
    "detector.rho_max_m": "3.4e-6",
    "detector.samples": "800",
    "methods": "quantum",
    "flux_norm_per_s": "1.0",
    "tolerance": "1e-10",
    "threads": "0",
    "caustics.eta": "",
    "caustics.k_min": "1",
    "caustics.k_max": "2",
    "caustics.chord": "1e-3",
    "cross_section.e_min_ev": "1e-5",
    "cross_section.e_max_ev": "2e-4",
    "cross_section.samples": "400",
    "cross_section.source_strength": "1.0",
}


class ConfigError(Exception):
    pass


def _fmt(x) -> str:
    """17-significant-digit decimal form; round-trips to the same double."""
    return format(float(x), ".17g")


def load_config(path: str | None, overrides) -> dict:
    cfg = dict(DEFAULTS)
    if path:
        try:
            text = Path(path).read_text()
        except OSError as ex:
            raise ConfigError(f"cannot read config file: {ex}")
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            key = key.strip()
            if key not in DEFAULTS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            cfg[key] = value.strip()
    for key in DEFAULTS:
        env = ENV_PREFIX + key.upper().replace(".", "_")
        if env in os.environ:
            cfg[key] = os.environ[env]
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, _, value = item.partition("=")
        key = key.strip()
        if key not in DEFAULTS:
            raise ConfigError(f"--set: unknown key {key!r}")
        cfg[key] = value.strip()
    return cfg


def _get_float(cfg, key):
    try:
        return float(cfg[key])
    except ValueError:
        raise ConfigError(f"key {key!r}: not a number: {cfg[key]!r}")


def _get_int(cfg, key):
    try:
        return int(cfg[key])
    except ValueError:
        raise ConfigError(f"key {key!r}: not an integer: {cfg[key]!r}")


def _get_bool(cfg, key):
    val = cfg[key].lower()
    if val in ("true", "1", "yes"):
        return True
    if val in ("false", "0", "no"):
        return False
    raise ConfigError(f"key {key!r}: not a boolean: {cfg[key]!r}")


def _setup_from(cfg):
    try:
        return derive_scales(
            _get_float(cfg, "fields.electric_v_per_m"),
            _get_float(cfg, "fields.magnetic_t"),
            _get_float(cfg, "source.energy_ev"),
            quantum_only=_get_bool(cfg, "source.quantum_only"),
        )
    except DomainError as ex:
        raise ConfigError(str(ex))


def _write_csv(path: Path, header, rows):
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)


def _write_json(path: Path, payload):
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _scales_report(setup):
    rep = {
        "electric_v_per_m": setup.electric_field,
        "magnetic_t": setup.magnetic_field,
        "energy_j": setup.energy,
        "omega_larmor_rad_per_s": setup.omega_l,
        "epsilon": setup.epsilon,
        "beta_per_j": setup.beta,
        "quantum_only": setup.quantum_only,
    }
    if not setup.quantum_only:
        rep.update(
            v0_m_per_s=setup.v0,
            orbit_diameter_m=setup.d,
            eta=setup.eta,
        )
    return rep


def cmd_scales(cfg, out_dir, args):
    setup = _setup_from(cfg)
    rep = _scales_report(setup)
    if args.json:
        print(json.dumps({k: (_fmt(v) if isinstance(v, float) else v)
                          for k, v in rep.items()}, indent=2, sort_keys=True))
    else:
        for key in sorted(rep):
            val = rep[key]
            print(f"{key} = {_fmt(val) if isinstance(val, float) else val}")
    return EXIT_OK


def cmd_profile(cfg, out_dir, args):
    setup = _setup_from(cfg)
    z = _get_float(cfg, "detector.z_m")
    lo = _get_float(cfg, "detector.rho_min_m")
    hi = _get_float(cfg, "detector.rho_max_m")
    n = _get_int(cfg, "detector.samples")
    if hi < lo or lo < 0:
        raise ConfigError("detector.rho range must be non-negative ascending")
    methods = [m.strip() for m in cfg["methods"].split(",") if m.strip()]
    if not methods:
        raise ConfigError("methods: need at least one method")
    for m in methods:
        if m not in METHODS:
            raise ConfigError(f"methods: unknown method {m!r}")
    grid = np.linspace(lo, hi, max(n, 1))
    flux = _get_float(cfg, "flux_norm_per_s")
    tol = _get_float(cfg, "tolerance")
    threads = _get_int(cfg, "threads") or (os.cpu_count() or 1)
    out_dir.mkdir(parents=True, exist_ok=True)
    meta_all = {}
    failures = {}
    for method in methods:
        try:
            prof = compute_profile(setup, z, grid, method, flux_norm=flux, tol=tol,
                                   threads=threads)
        except ParfieldError as ex:
            failures[method] = f"{type(ex).__name__}: {ex}"
            continue
        rows = [(_fmt(r), _fmt(v)) for r, v in zip(prof.rho_m, prof.n_per_m2)]
        _write_csv(out_dir / f"profile_{method}.csv", ["rho_m", "n_per_m2"], rows)
        meta_all[method] = prof.metadata
    _write_json(out_dir / "profile_meta.json", {
        "methods": meta_all,
        "failures": failures,
        "detector_z_m": z,
        "samples": int(max(n, 1)),
    })
    for method, reason in failures.items():
        print(f"profile[{method}] failed: {reason}", file=sys.stderr)
    if failures and not meta_all:
        return EXIT_UNSUPPORTED
    return EXIT_OK


def cmd_caustics(cfg, out_dir, args):
    if cfg["caustics.eta"].strip():
        eta = _get_float(cfg, "caustics.eta")
        setup = None
    else:
        setup = _setup_from(cfg)
        eta = setup.eta
    if eta <= 0:
        raise ConfigError("eta must be positive")
    k_min = _get_int(cfg, "caustics.k_min")
    k_max = _get_int(cfg, "caustics.k_max")
    if k_min < 1 or k_max < k_min:
        raise ConfigError("need 1 <= k_min <= k_max")
    if k_max > 10000:
        raise ConfigError("k_max beyond representable range (limit 10000)")
    chord = _get_float(cfg, "caustics.chord")
    out_dir.mkdir(parents=True, exist_ok=True)
    meta = {"eta": eta, "curves": {}}
    for k in range(k_min, k_max + 1):
        curve = ca.trace_caustic(k, eta, chord=chord)
        rows = [
            (_fmt(s.t), s.branch, _fmt(s.rho), _fmt(s.z)) for s in curve.samples
        ]
        _write_csv(out_dir / f"caustic_k{k}.csv", ["t", "branch", "rho", "z"], rows)
        meta["curves"][str(k)] = {
            "type_label": curve.type_label,
            "samples": len(curve.samples),
            "focal_segment_z": list(curve.focal_segment),
            "irregular_points": [
                {
                    "kind": p.kind,
                    "t0": p.t0,
                    "z0": p.z0,
                    "rho0": p.rho0,
                    "expansion": list(p.expansion) if p.expansion else None,
                }
                for p in curve.irregulars
            ],
        }
    if setup is not None:
        meta["closed_orbits"] = [
            {
                "kind": o.kind,
                "index": o.index,
                "return_time": o.return_time,
                "emission_angle_rad": o.emission_angle,
                "action_js": o.action,
            }
            for o in closed_orbits(eta, setup)
        ]
    _write_json(out_dir / "caustics_meta.json", meta)
    return EXIT_OK


def cmd_orbits(cfg, out_dir, args):
    setup = _setup_from(cfg)
    z = _get_float(cfg, "detector.z_m")
    orbits = closed_orbits(setup.eta, setup)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for o in orbits:
        crossing = ""
        if z > 0:
            crossing = _fmt(closed_orbit_plane_crossing(o, z / setup.d, setup.eta)
                            * setup.d)
        rows.append(
            (o.kind, o.index, _fmt(o.return_time), _fmt(o.emission_angle),
             _fmt(o.action), crossing)
        )
    _write_csv(
        out_dir / "orbits.csv",
        ["kind", "k", "return_time_scaled", "emission_angle_rad", "action_js",
         "plane_crossing_rho_m"],
        rows,
    )
    _write_json(out_dir / "orbits_meta.json", {"eta": setup.eta,
                                               "detector_z_m": z,
                                               "count": len(orbits)})
    return EXIT_OK


def cmd_cross_section(cfg, out_dir, args):
    e_lo = _get_float(cfg, "cross_section.e_min_ev")
    e_hi = _get_float(cfg, "cross_section.e_max_ev")
    n = _get_int(cfg, "cross_section.samples")
    if e_hi < e_lo or n < 2:
        raise ConfigError("cross-section sweep must be ascending with >= 2 samples")
    strength = _get_float(cfg, "cross_section.source_strength")
    tol = _get_float(cfg, "tolerance")
    ef = _get_float(cfg, "fields.electric_v_per_m")
    bf = _get_float(cfg, "fields.magnetic_t")
    energies = np.linspace(e_lo, e_hi, n)
    rows = []
    for e_ev in energies:
        setup = derive_scales(ef, bf, e_ev, quantum_only=e_ev <= 0)
        cur = total_current(setup, source_strength=strength, tol=tol)
        rows.append((_fmt(e_ev), _fmt(cur.value), cur.terms_used))
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_csv(out_dir / "cross_section.csv",
               ["energy_ev", "current_per_s", "terms"], rows)
    _write_json(out_dir / "cross_section_meta.json", {
        "electric_v_per_m": ef,
        "magnetic_t": bf,
        "source_strength_j2m3": strength,
        "samples": int(n),
    })
    return EXIT_OK


_COMMANDS = {
    "scales": cmd_scales,
    "profile": cmd_profile,
    "caustics": cmd_caustics,
    "orbits": cmd_orbits,
    "cross-section": cmd_cross_section,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="parfield",
        description="Electron point source in parallel electric and magnetic "
        "fields: density profiles, caustic surfaces, closed orbits, currents.",
    )
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", help="flat key=value configuration file")
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument("--method", help="comma-separated method list override")
    parser.add_argument("--threads", type=int, help="worker threads (0 = auto)")
    parser.add_argument("--tolerance", type=float, help="series tolerance override")
    parser.add_argument("--set", action="append", metavar="KEY=VALUE",
                        dest="overrides", help="override any config key")
    parser.add_argument("--json", action="store_true",
                        help="scales: emit machine-readable JSON")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config, args.overrides)
        if args.method:
            cfg["methods"] = args.method
        if args.threads is not None:
            cfg["threads"] = str(args.threads)
        if args.tolerance is not None:
            cfg["tolerance"] = repr(args.tolerance)
        return _COMMANDS[args.command](cfg, Path(args.out), args)
    except ConfigError as ex:
        print(f"config error: {ex}", file=sys.stderr)
        return EXIT_CONFIG
    except UnsupportedRegionError as ex:
        print(f"unsupported region: {ex}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except ConvergenceError as ex:
        print(f"convergence failure: {ex}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except DomainError as ex:
        print(f"domain error: {ex}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
