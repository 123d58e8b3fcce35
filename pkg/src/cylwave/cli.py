"""Command-line front end.

Every command reads a nested JSON configuration (defaults < ``--config``
file < flags), validates it before computing anything, writes its outputs
atomically into the output directory and finishes with ``manifest.json``,
which echoes the resolved configuration and the sha256 of every output.

Exit codes: 0 success, 2 invalid configuration or domain error, 3 the
discretisation cannot deliver the requested accuracy.
"""
from __future__ import annotations

import argparse
import copy
import csv
import hashlib
import io
import json
import math
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .airy import ai_eval, zero_table
from .errors import CylwaveError, NumericalResolutionError, ResolutionWarning
from .field import DomainGrid, save_field
from .green import (CutoffProfile, GreenRequest, GreenSynthesizer, dispersive_sweep,
                    fit_envelope, sweep_a_values, sweep_csv)
from .halfline import HalfLineGrid, gram_matrix, mode_values
from .nlw import (ConeProbe, ConeSpec, diagnostics_csv, diagnostics_rows, energy, evolve,
                  flux_balance, last_resolvable, nonconcentration_profile, picard_solve,
                  resolution_length, smooth_data)
from .propagator import strichartz_sweep
from .propagator import sweep_csv as strichartz_csv

COMMANDS = ("airy-table", "modes-check", "green-eval", "disp-sweep", "strichartz-sweep",
            "solve-local", "solve-evolve", "diagnose-cone")
OUT_ENV = "CYLWAVE_OUT"

DEFAULTS = {
    "grid": {"K": 6, "L_y": 4 * math.pi, "L_z": 4 * math.pi, "N_y": 8, "N_z": 8,
             "x_max": None},
    "cutoff": {"epsilon": 0.1, "c0": 1.0, "eps0": 0.05, "bump_width": 1.0, "L": 4.0,
               "levels": 3, "kind": "parametrix"},
    "sweep": {"h": [2 ** -4, 2 ** -5], "a": None, "t": None, "n_t": 16, "delta": [0.0],
              "N_max": 1, "kmax": 20, "eta": [0.5, 1.0, 2.0], "js": [3, 4, 5, 6, 7],
              "q": 5, "r": 10, "samples": 4, "seed": 0},
    "solver": {"T": 0.25, "dt": 1e-3, "n_t": 128, "tol": 1e-12, "max_iter": 30,
               "amplitude": 1.0, "seed": 0, "save_every": 10},
    "cone": {"x0": [1.0, 0.0, 0.0], "t0": 3.0, "S": [-1.0, -0.5, -0.25], "dt": 5e-3},
    "out": None,
    "threads": 1,
}


class ConfigError(CylwaveError, ValueError):
    """Invalid configuration; ``field`` is the dotted path of the culprit."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass
class RunConfig:
    command: str
    grid: dict
    cutoff: dict
    sweep: dict
    solver: dict
    cone: dict
    out: str
    threads: int

    def as_dict(self) -> dict:
        return {"command": self.command, "grid": self.grid, "cutoff": self.cutoff,
                "sweep": self.sweep, "solver": self.solver, "cone": self.cone,
                "out": self.out, "threads": self.threads}


# -- configuration ----------------------------------------------------------

def _merge(base, over, path=""):
    out = copy.deepcopy(base)
    for key, val in over.items():
        where = f"{path}{key}"
        if key not in base:
            raise ConfigError(where, "unknown field")
        if isinstance(base[key], dict):
            if not isinstance(val, dict):
                raise ConfigError(where, "expected a section")
            out[key] = _merge(base[key], val, where + ".")
        else:
            out[key] = val
    return out


def _num(cfg, path, lo=None, hi=None, lo_open=False, hi_open=False, integer=False):
    sec, key = path.split(".")
    v = cfg[sec][key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(path, f"expected a number, got {v!r}")
    if integer and int(v) != v:
        raise ConfigError(path, f"expected an integer, got {v!r}")
    _range(path, v, lo, hi, lo_open, hi_open)
    return v


def _range(path, v, lo, hi, lo_open, hi_open):
    if not math.isfinite(v):
        raise ConfigError(path, "must be finite")
    bad_lo = lo is not None and (v <= lo if lo_open else v < lo)
    bad_hi = hi is not None and (v >= hi if hi_open else v > hi)
    if bad_lo or bad_hi:
        left = "]" if lo_open else "["
        right = "[" if hi_open else "]"
        dom = f"{left}{'-inf' if lo is None else lo:g},{'inf' if hi is None else hi:g}{right}"
        raise ConfigError(path, f"value {v!r} outside the domain {dom}")


def _num_list(cfg, path, lo=None, hi=None, lo_open=False, hi_open=False, allow_none=False,
              integer=False):
    sec, key = path.split(".")
    v = cfg[sec][key]
    if v is None and allow_none:
        return None
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        v = [v]
        cfg[sec][key] = v
    if not isinstance(v, list) or not v:
        raise ConfigError(path, "expected a non-empty list of numbers")
    for x in v:
        if isinstance(x, bool) or not isinstance(x, (int, float)):
            raise ConfigError(path, f"expected numbers, got {x!r}")
        if integer and int(x) != x:
            raise ConfigError(path, f"expected integers, got {x!r}")
        _range(path, x, lo, hi, lo_open, hi_open)
    return v


def validate(cfg: dict) -> None:
    """Check every field against its domain; raises ConfigError naming the field."""
    for key in ("K", "N_y", "N_z"):
        _num(cfg, f"grid.{key}", 1, integer=True)
    for key in ("N_y", "N_z"):
        if cfg["grid"][key] % 2 or cfg["grid"][key] < 4:
            raise ConfigError(f"grid.{key}", "must be an even integer >= 4")
    _num(cfg, "grid.L_y", 0, lo_open=True)
    _num(cfg, "grid.L_z", 0, lo_open=True)
    if cfg["grid"]["x_max"] is not None:
        _num(cfg, "grid.x_max", 0, lo_open=True)

    _num(cfg, "cutoff.epsilon", 0, lo_open=True)
    c0 = _num(cfg, "cutoff.c0", 0, lo_open=True)
    _num(cfg, "cutoff.eps0", 0, c0, lo_open=True, hi_open=True)
    _num(cfg, "cutoff.bump_width", 0, 2, lo_open=True, hi_open=True)
    _num(cfg, "cutoff.L", 0, lo_open=True)
    _num(cfg, "cutoff.levels", 1, 6, integer=True)
    if cfg["cutoff"]["kind"] not in ("parametrix", "localized"):
        raise ConfigError("cutoff.kind", "must be 'parametrix' or 'localized'")

    _num_list(cfg, "sweep.h", 0, 1, lo_open=True)
    _num_list(cfg, "sweep.a", 0, 1, lo_open=True, allow_none=True)
    _num_list(cfg, "sweep.t", -1, 1, allow_none=True)
    _num_list(cfg, "sweep.delta", -1, 1, lo_open=True, hi_open=True)
    _num(cfg, "sweep.n_t", 2, integer=True)
    _num(cfg, "sweep.N_max", 1, integer=True)
    _num(cfg, "sweep.kmax", 1, 100000, integer=True)
    _num_list(cfg, "sweep.eta", 0, lo_open=True)
    _num_list(cfg, "sweep.js", 1, 12, integer=True)
    _num(cfg, "sweep.q", 2, lo_open=True)
    _num(cfg, "sweep.r", 2)
    _num(cfg, "sweep.samples", 1, integer=True)
    _num(cfg, "sweep.seed", 0, integer=True)

    _num(cfg, "solver.T", 0, lo_open=True)
    _num(cfg, "solver.dt", 0, lo_open=True)
    _num(cfg, "solver.n_t", 1, integer=True)
    _num(cfg, "solver.tol", 0, lo_open=True)
    _num(cfg, "solver.max_iter", 1, integer=True)
    _num(cfg, "solver.amplitude", 0)
    _num(cfg, "solver.seed", 0, integer=True)
    _num(cfg, "solver.save_every", 1, integer=True)

    x0 = cfg["cone"]["x0"]
    if not (isinstance(x0, list) and len(x0) == 3):
        raise ConfigError("cone.x0", "expected a point [x, y, z]")
    _num_list(cfg, "cone.x0")
    if x0[0] < 0:
        raise ConfigError("cone.x0", "apex must satisfy x >= 0")
    _num(cfg, "cone.t0", 0, lo_open=True)
    _num_list(cfg, "cone.S", hi=0, hi_open=True)
    _num(cfg, "cone.dt", 0, lo_open=True)
    if min(cfg["cone"]["S"]) < -cfg["cone"]["t0"]:
        raise ConfigError("cone.S", "cone times must lie in [-t0, 0)")

    if isinstance(cfg["threads"], bool) or not isinstance(cfg["threads"], int) or cfg["threads"] < 1:
        raise ConfigError("threads", "expected a positive integer")
    if not isinstance(cfg["out"], str) or not cfg["out"]:
        raise ConfigError("out", "expected a directory path")


def parse_config(command: str, path=None, overrides=None) -> RunConfig:
    """Resolve defaults < file < overrides and validate the result."""
    if command not in COMMANDS:
        raise ConfigError("command", f"unknown command {command!r}")
    cfg = copy.deepcopy(DEFAULTS)
    cfg["out"] = os.environ.get(OUT_ENV, "cylwave-out")
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
        try:
            data = json.loads(text) if text.strip() else {}
        except json.JSONDecodeError as exc:
            raise ConfigError("config", f"invalid JSON ({exc.msg} at line {exc.lineno})") from None
        if not isinstance(data, dict):
            raise ConfigError("config", "top level must be an object")
        data.pop("command", None)
        cfg = _merge(cfg, data)
    for dotted, val in (overrides or {}).items():
        cfg = _merge(cfg, _nest(dotted, val))
    validate(cfg)
    return RunConfig(command, **cfg)


def _nest(dotted, val):
    parts = dotted.split(".")
    out = val
    for p in reversed(parts):
        out = {p: out}
    return out


# -- output helpers ---------------------------------------------------------

class Outputs:
    """Atomic writer that records a content hash per file."""

    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.hashes = {}

    def write(self, name, data):
        if isinstance(data, str):
            data = data.encode()
        path = self.root / name
        tmp = path.with_name(path.name + ".tmp")
        tmp.write_bytes(data)
        tmp.replace(path)
        self.hashes[name] = hashlib.sha256(data).hexdigest()

    def write_json(self, name, obj):
        self.write(name, json.dumps(obj, indent=2, sort_keys=True) + "\n")

    def add_file(self, name):
        self.hashes[name] = hashlib.sha256((self.root / name).read_bytes()).hexdigest()


def _csv(header, rows, fmt="{:.12g}"):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([v if isinstance(v, (str, int, np.integer)) and not isinstance(v, bool)
                    else fmt.format(v) for v in r])
    return buf.getvalue()


def build_grid(g: dict) -> DomainGrid:
    grid = DomainGrid.build(K=g["K"], L_y=g["L_y"], L_z=g["L_z"], N_y=g["N_y"], N_z=g["N_z"])
    if g["x_max"] is None:
        return grid
    hl = grid.halfline
    # DomainGrid rejects a truncation point that cuts into the retained modes
    return DomainGrid(HalfLineGrid.from_panels(g["x_max"], hl.panel_width, hl.n_gauss),
                      grid.L_y, grid.L_z, grid.N_y, grid.N_z, grid.K)


def _profile(c: dict) -> CutoffProfile:
    prof = CutoffProfile(epsilon=c["epsilon"])
    return prof if c["bump_width"] == 1.0 else prof.widened(c["bump_width"])


def _map(cfg: RunConfig, fn, items):
    if cfg.threads == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(cfg.threads) as pool:
        return list(pool.map(fn, items))


# -- commands -----------------------------------------------------------------

def cmd_airy_table(cfg: RunConfig, out: Outputs):
    table = zero_table(cfg.sweep["kmax"])
    out.write("airy_table.csv", table.to_csv())
    return {"K": table.size}


def _fd_residual(k, eta, table, spacing=1e-3):
    """max |-e'' + eta^2 x e - omega eta^(4/3) e| / max |e| by central differences."""
    om = table.omega[k - 1]
    s = eta ** (2.0 / 3.0)
    x = np.arange(spacing, (om + 4.0) / s, spacing)
    e = mode_values([k], eta, x, table)[0]
    d2 = (e[2:] - 2 * e[1:-1] + e[:-2]) / spacing ** 2
    xi = x[1:-1]
    r = -d2 + eta ** 2 * xi * e[1:-1] - om * eta ** (4.0 / 3.0) * e[1:-1]
    return float(np.max(np.abs(r)) / (np.max(np.abs(e)) * om * eta ** (4.0 / 3.0)))


def cmd_modes_check(cfg: RunConfig, out: Outputs):
    K = cfg.sweep["kmax"]
    table = zero_table(K)
    rows = []
    for eta in cfg.sweep["eta"]:
        hl = HalfLineGrid.for_modes(K, eta, table=table)
        gram = gram_matrix(K, eta, hl, table)
        defect = float(np.max(np.abs(gram - np.eye(K))))
        fd = max(_fd_residual(k, eta, table) for k in range(1, K + 1))
        # closed-form f_k against the quadrature normalisation of Ai(s - omega_k)
        k = np.arange(1, K + 1)
        ai = ai_eval(hl.nodes[None, :] * eta ** (2.0 / 3.0) - table.omega[:, None])[0]
        quad = k ** (1.0 / 6.0) / np.sqrt(np.sum(hl.weights * ai ** 2, axis=1) * eta ** (2.0 / 3.0))
        fk = float(np.max(np.abs(quad / table.f - 1)))
        rows.append((eta, K, defect, fd, fk))
    out.write("modes_check.csv",
              _csv(["eta", "K", "gram_defect", "fd_residual", "f_k_mismatch"], rows))
    return {"max_gram_defect": max(r[2] for r in rows), "max_fd_residual": max(r[3] for r in rows)}


def cmd_green_eval(cfg: RunConfig, out: Outputs):
    s, c = cfg.sweep, cfg.cutoff
    h, t = s["h"][0], (s["t"] or [0.5])[0]
    a = (s["a"] or [0.25])[0]
    x = np.linspace(0.0, 2 * a, 17)
    y = np.linspace(0.0, 1.5 * abs(t) + 0.25, 33)
    req = GreenRequest(a, h, t, x, y)
    syn = GreenSynthesizer(h, _profile(c), c["kind"], c["L"], c["L"])
    G = syn.evaluate(req.a, req.t, req.x, req.y, req.z)[:, :, 0]
    rows = [(xi, yj, 0.0, G[i, j]) for i, xi in enumerate(x) for j, yj in enumerate(y)]
    out.write("green_eval.csv", _csv(["x", "y", "z", "G"], rows, "{:.15g}"))
    return {"h": h, "a": a, "t": t, "K": syn.K, "n_terms": syn.n_terms,
            "max_abs": float(np.max(np.abs(G)))}


def cmd_disp_sweep(cfg: RunConfig, out: Outputs):
    s, c = cfg.sweep, cfg.cutoff
    prof = _profile(c)
    a_values = sweep_a_values if s["a"] is None else (lambda h: list(s["a"]))
    ts = None if s["t"] is None else sorted(abs(t) for t in s["t"])

    def one(h):
        return dispersive_sweep([h], s["n_t"], prof, c["L"], c["levels"], a_values, ts=ts)

    samples = [x for part in _map(cfg, one, list(s["h"])) for x in part]
    out.write("disp_sweep.csv", sweep_csv(samples))
    fit = fit_envelope(samples)
    # coarsest-to-finest spread and the last refinement step
    worst = max((max(x.refinement) - min(x.refinement)) / max(x.refinement) for x in samples)
    last = max(x.refinement[-1] / x.refinement[-2] - 1 for x in samples) if c["levels"] > 1 else 0.0
    return {"rows": len(samples), "C": fit.C, "C_lsq": fit.C_lsq,
            "argmax": {"h": fit.argmax.h, "a": fit.argmax.a, "t": fit.argmax.t},
            "per_h": {f"{h:.12g}": v for h, v in sorted(fit.per_h.items())},
            "worst_refinement_change": worst, "finest_refinement_change": last, "profile": prof.as_dict()}


def cmd_strichartz_sweep(cfg: RunConfig, out: Outputs):
    s = cfg.sweep
    rows = strichartz_sweep(js=s["js"], q=s["q"], r=s["r"], samples=s["samples"], seed=s["seed"])
    out.write("strichartz_sweep.csv", strichartz_csv(rows))
    ratios = [r[5] for r in rows]
    return {"spread": max(ratios) / min(ratios), "max_ratio": max(ratios)}


def _data(cfg: RunConfig):
    grid = build_grid(cfg.grid)
    return grid, smooth_data(grid, cfg.solver["seed"], cfg.solver["amplitude"])


def _snapshots(out: Outputs, state, stem):
    for part in ("u", "v"):
        name = f"{stem}_{part}.bin"
        save_field(getattr(state, part), out.root / name)
        out.add_file(name)
        out.add_file(name + ".json")


def cmd_solve_local(cfg: RunConfig, out: Outputs):
    sv = cfg.solver
    grid, data = _data(cfg)
    traj, rep = picard_solve(data.u, data.v, sv["T"], n_t=sv["n_t"], tol=sv["tol"],
                             max_iter=sv["max_iter"])
    rows = diagnostics_rows(traj)
    keep = rows[::sv["save_every"]] + ([rows[-1]] if (len(rows) - 1) % sv["save_every"] else [])
    out.write("diagnostics.csv", diagnostics_csv(keep))
    _snapshots(out, traj[-1], "final")
    return {"grid": grid.describe(), "iterates": rep.iterates,
            "contraction_factors": rep.contraction_factors, "final_XT_norm": rep.final_XT_norm,
            "converged": rep.converged, "energy0": energy(traj[0])}


def cmd_solve_evolve(cfg: RunConfig, out: Outputs):
    sv = cfg.solver
    grid, data = _data(cfg)
    traj = evolve(data.u, data.v, sv["T"], sv["dt"], save_every=sv["save_every"])
    rows = diagnostics_rows(traj)
    out.write("diagnostics.csv", diagnostics_csv(rows))
    _snapshots(out, traj[-1], "final")
    E = [r[1] for r in rows]
    return {"grid": grid.describe(), "steps": int(round(sv["T"] / sv["dt"])),
            "energy_drift": abs(E[-1] - E[0]) / E[0] if E[0] else 0.0}


def cmd_diagnose_cone(cfg: RunConfig, out: Outputs):
    cc = cfg.cone
    grid, data = _data(cfg)
    cone = ConeSpec(tuple(cc["x0"]), cc["t0"])
    traj = evolve(data.u, data.v, cc["t0"], cc["dt"], save_every=1)
    probe = ConeProbe(traj, cone)
    S_sorted = sorted(cc["S"])
    flux_rows = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ResolutionWarning)
        for S in S_sorted:
            fb = flux_balance(traj, cone, -cc["t0"], S)
            flux_rows.append((-cc["t0"], S, fb.E_T, fb.E_S, fb.flux, fb.relative,
                              probe.flux(S, 0.0)))
        prof = nonconcentration_profile(traj, cone)
    out.write("cone_flux.csv", _csv(["S", "T", "E_loc_T", "E_loc_S", "flux", "relative_residual",
                                     "flux_to_apex"], flux_rows))
    out.write("nonconcentration.csv",
              _csv(["t", "l6_mass", "trusted"], [(t, v, int(ok)) for t, v, ok in prof]))
    last = last_resolvable(prof)
    return {"grid": grid.describe(), "resolution_length": resolution_length(grid),
            "max_flux_residual": max(r[5] for r in flux_rows),
            "flux_to_apex": [r[6] for r in flux_rows],
            "nonconcentration_ratio": last[1] / prof[0][1] if prof[0][1] else 0.0,
            "resolution_warnings": len(caught)}


HANDLERS = {"airy-table": cmd_airy_table, "modes-check": cmd_modes_check,
            "green-eval": cmd_green_eval, "disp-sweep": cmd_disp_sweep,
            "strichartz-sweep": cmd_strichartz_sweep, "solve-local": cmd_solve_local,
            "solve-evolve": cmd_solve_evolve, "diagnose-cone": cmd_diagnose_cone}


def run(cfg: RunConfig) -> int:
    out = Outputs(cfg.out)
    try:
        results = HANDLERS[cfg.command](cfg, out)
    except NumericalResolutionError as exc:
        print(f"cylwave: resolution error: {exc}", file=sys.stderr)
        return 3
    except CylwaveError as exc:
        print(f"cylwave: {exc}", file=sys.stderr)
        return 2
    manifest = {"command": cfg.command, "version": __version__, "config": cfg.as_dict(),
                "outputs": dict(sorted(out.hashes.items())), "results": _plain(results)}
    out.write_json("manifest.json", manifest)
    return 0


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


# -- argument parsing ---------------------------------------------------------

ALIASES = {"kmax": "sweep.kmax", "h": "sweep.h", "a": "sweep.a", "t": "sweep.t",
           "n-t": "sweep.n_t", "T": "solver.T", "dt": "solver.dt", "seed": "solver.seed",
           "amplitude": "solver.amplitude"}


def _value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cylwave", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=f"cylwave {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON configuration file")
        sp.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./cylwave-out)")
        sp.add_argument("--threads", type=int, help="worker threads for independent samples")
        sp.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=JSON",
                        help="override any configuration field, e.g. --set sweep.h=[0.0625]")
        for flag, dotted in ALIASES.items():
            sp.add_argument(f"--{flag}", dest=f"alias:{dotted}", type=_value,
                            help=f"shorthand for --set {dotted}=...")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {}
    for item in args.set:
        key, sep, val = item.partition("=")
        if not sep:
            print(f"cylwave: --set expects SECTION.KEY=VALUE, got {item!r}", file=sys.stderr)
            return 2
        overrides[key.strip()] = _value(val)
    for key, val in vars(args).items():
        if key.startswith("alias:") and val is not None:
            overrides[key[len("alias:"):]] = val
    if args.out is not None:
        overrides["out"] = args.out
    if args.threads is not None:
        overrides["threads"] = args.threads
    try:
        cfg = parse_config(args.command, args.config, overrides)
    except ConfigError as exc:
        print(f"cylwave: invalid configuration: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
