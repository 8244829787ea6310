"""Command-line front end: ``dcmpoles {steady,pole,bode,sim,reproduce}``.

Converter, load and scheme are described by ``key = value`` pairs, read
from ``--config FILE`` and/or flags of the same name (flags win).  Exit
codes: 0 success, 1 a reproduction check failed, 2 bad input or solver
failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from contextlib import contextmanager

from . import discrete_map, reproduce
from .errors import ConverterError, MultipleOperatingPoints
from .exact import sim
from .freq_response import bode, dc_gain, make_transfer, write_csv
from .model import (
    ConverterParams,
    GivenControl,
    GivenDuty,
    GivenOutput,
    Resistive,
    ResistiveParallelCCL,
    ResistiveParallelCPL,
    Topology,
    solve_operating_points,
)
from .schemes import BCM, BCMCOT, CMC, VCOTC, VMC, OpenLoop, is_fixed_frequency
from .small_signal import classify, closed_form_coefficients

FLOAT_KEYS = ("vs", "L", "C", "Rc", "fs", "T", "d", "D", "g", "Vh", "vc", "ma", "R0", "P", "Io", "v")
STR_KEYS = ("topology", "scheme")
SCHEMES = ("open", "vmc", "cmc", "vcotc", "bcm", "bcmcot")


class ConfigError(ValueError):
    def __init__(self, field, message):
        self.field = field
        super().__init__(f"field '{field}': {message}")


def fmt(x) -> str:
    if isinstance(x, bool) or x is None:
        return str(x).lower() if isinstance(x, bool) else "none"
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _jsonable(x):
    if isinstance(x, float):
        if math.isfinite(x):
            return float(f"{x:.12g}")
        return fmt(x)
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


# --------------------------------------------------------------------------
# configuration


def parse_config_text(text: str) -> dict[str, str]:
    """``key = value`` lines (``#`` comments) or a JSON object with a ``config`` entry."""
    stripped = text.strip()
    if stripped.startswith("{"):
        data = json.loads(stripped)
        data = data.get("config", data)
        return {k: str(v) for k, v in data.items()}
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in FLOAT_KEYS + STR_KEYS:
            raise ConfigError(key, "unknown key")
        out[key] = value
    return out


def merge_config(args) -> dict[str, str]:
    cfg: dict[str, str] = {}
    if args.preset:
        if args.preset not in reproduce.PRESETS:
            raise ConfigError("preset", f"unknown preset {args.preset!r}")
        cfg.update(reproduce.PRESETS[args.preset])
    if args.config:
        with open(args.config) as fh:
            cfg.update(parse_config_text(fh.read()))
    for key in FLOAT_KEYS + STR_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    return cfg


def _num(cfg, key, default=None, required=True):
    if key not in cfg:
        if default is not None or not required:
            return default
        raise ConfigError(key, "required")
    try:
        return float(cfg[key])
    except ValueError:
        raise ConfigError(key, f"not a number: {cfg[key]!r}") from None


def build_params(cfg) -> ConverterParams:
    topo = cfg.get("topology")
    if topo is None:
        raise ConfigError("topology", "required")
    try:
        topology = Topology(topo.lower())
    except ValueError:
        raise ConfigError("topology", f"must be boost or buck, got {topo!r}") from None
    T = None
    if "fs" in cfg:
        fs = _num(cfg, "fs")
        if fs <= 0:
            raise ConfigError("fs", "must be positive")
        T = 1.0 / fs
    elif "T" in cfg:
        T = _num(cfg, "T")
    for key in ("vs", "L", "C"):
        if _num(cfg, key) <= 0:
            raise ConfigError(key, "must be positive")
    if _num(cfg, "Rc", 0.0) < 0:
        raise ConfigError("Rc", "must be non-negative")
    try:
        return ConverterParams(topology, _num(cfg, "vs"), _num(cfg, "L"), _num(cfg, "C"), _num(cfg, "Rc", 0.0), T)
    except ValueError as exc:
        raise ConfigError("converter", str(exc)) from None


def build_load(cfg):
    R0 = _num(cfg, "R0", required=False)
    try:
        if "P" in cfg:
            return ResistiveParallelCPL(_num(cfg, "P"), math.inf if R0 is None else R0)
        if "Io" in cfg:
            return ResistiveParallelCCL(_num(cfg, "Io"), math.inf if R0 is None else R0)
        if R0 is None:
            raise ConfigError("R0", "required for a resistive load")
        return Resistive(R0)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError("load", str(exc)) from None


def _scheme_at_output(name, cfg, params, load):
    # derive the control input that puts the steady state at the requested v
    v = _num(cfg, "v")
    if params.T is None:
        raise ConfigError("fs", "needed to place the steady state at a given v")
    op = _unique(solve_operating_points(params, load, GivenOutput(v)), 0)
    if name == "open":
        return OpenLoop(op.D)
    if name == "vmc":
        return reproduce.vmc_at(op, _num(cfg, "g"), _num(cfg, "Vh", 1.0))
    if name == "cmc":
        m1 = params.vs / params.L if params.topology is Topology.BOOST else (params.vs - v) / params.L
        return reproduce.cmc_at(op, 1.0 + _num(cfg, "ma", 0.0) / m1)
    if name == "vcotc":
        return reproduce.vcotc_at(op, _num(cfg, "ma", 0.0))
    raise ConfigError("v", f"cannot place a {name} steady state from v alone")


def build_scheme(cfg, params, load):
    name = cfg.get("scheme", "open").lower()
    if name not in SCHEMES:
        raise ConfigError("scheme", f"must be one of {', '.join(SCHEMES)}")
    needs = {"open": "D", "vmc": "vc", "cmc": "vc", "vcotc": "vc"}
    if name in needs and needs[name] not in cfg and "v" in cfg:
        return _scheme_at_output(name, cfg, params, load)
    try:
        if name == "open":
            return OpenLoop(_num(cfg, "D"))
        if name == "vmc":
            return VMC(_num(cfg, "g"), _num(cfg, "Vh", 1.0), _num(cfg, "vc"))
        if name == "cmc":
            return CMC(_num(cfg, "vc"), _num(cfg, "ma", 0.0))
        if name == "vcotc":
            return VCOTC(_num(cfg, "d"), _num(cfg, "vc"), _num(cfg, "ma", 0.0))
        if name == "bcm":
            return BCM(_num(cfg, "vc"))
        return BCMCOT(_num(cfg, "d"))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError("scheme", str(exc)) from None


def build(cfg):
    params = build_params(cfg)
    load = build_load(cfg)
    scheme = build_scheme(cfg, params, load)
    if is_fixed_frequency(scheme) and params.T is None:
        raise ConfigError("fs", "required for fixed-frequency schemes")
    return params, load, scheme


def _unique(points, index):
    if not points:
        raise ConverterError("no DCM operating point found")
    if index >= len(points):
        raise ConfigError("index", f"only {len(points)} operating point(s)")
    return points[index]


def operating_points(params, load, scheme):
    spec = GivenDuty(scheme.D) if isinstance(scheme, OpenLoop) else GivenControl(scheme)
    return solve_operating_points(params, load, spec)


# --------------------------------------------------------------------------
# commands


def _emit(args, payload, text_lines):
    with _output(args.out) as fh:
        if args.json:
            fh.write(json.dumps(_jsonable(payload), sort_keys=True, indent=2) + "\n")
        else:
            fh.write("\n".join(text_lines) + "\n")


@contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _block(d, skip=()):
    return [f"{k}: {fmt(v)}" for k, v in d.items() if k not in skip]


def cmd_steady(args, cfg):
    params, load, scheme = build(cfg)
    if isinstance(scheme, OpenLoop) and scheme.D == 0.0:
        M = 1.0 if params.topology is Topology.BOOST else 0.0
        print("warning: zero duty, no energy is transferred; the output settles to the unswitched value",
              file=sys.stderr)
        rec = {"M": M, "D": 0.0, "D2": 0.0, "v": M * params.vs, "dcm_valid": False}
        _emit(args, {"config": cfg, "points": [rec]}, _block(rec))
        return 0
    pts = operating_points(params, load, scheme)
    if not pts:
        raise ConverterError("no DCM operating point found")
    recs = [op.as_dict() for op in pts]
    lines = []
    for k, rec in enumerate(recs):
        if len(recs) > 1:
            lines.append(f"# operating point {k + 1} of {len(recs)}")
        lines += _block(rec)
    _emit(args, {"config": cfg, "points": recs}, lines)
    return 0


def _pole_record(scheme, load, params, op, exact):
    ss = closed_form_coefficients(scheme, load, op)
    rep = classify(ss.p)
    rec = {"v": op.v, "M": op.M, "p0": ss.p0, "dpc": ss.dpc, "dpl": ss.dpl, "p": ss.p,
           "classification": rep.kind.value, "margin": rep.margin,
           "gamma_s": ss.gamma_s, "gamma_c": ss.gamma_c}
    if exact:
        try:
            vstar = sim.find_fixed_point(scheme, load, params, op.v)
            pe = sim.exact_pole_numeric(scheme, load, params, vstar)
            rec.update(v_exact=vstar, p_exact=pe, discrepancy=pe - ss.p)
        except ConverterError as exc:
            rec["p_exact"] = f"unavailable ({exc})"
    return rec


def cmd_pole(args, cfg):
    params, load, scheme = build(cfg)
    pts = operating_points(params, load, scheme)
    if not pts:
        raise ConverterError("no DCM operating point found")
    recs = [_pole_record(scheme, load, params, op, not args.no_exact) for op in pts]
    lines = []
    for k, rec in enumerate(recs):
        if len(recs) > 1:
            lines.append(f"# operating point {k + 1} of {len(recs)}")
        lines += _block(rec)
    _emit(args, {"config": cfg, "points": recs}, lines)
    return 0


def cmd_bode(args, cfg):
    params, load, scheme = build(cfg)
    op = _unique(operating_points(params, load, scheme), args.index)
    ss = closed_form_coefficients(scheme, load, op)
    tf = make_transfer(ss, op.rho, args.which)
    from .freq_response import default_grid

    pts = bode(tf, default_grid(tf, args.points))
    if args.json:
        payload = {"config": cfg, "dc_gain": dc_gain(tf), "pole": tf.pole, "gain": tf.gain,
                   "points": [{"omega_rad_s": p.omega, "mag_db": p.mag_db, "phase_deg": p.phase_deg} for p in pts]}
        _emit(args, payload, [])
        return 0
    with _output(args.out) as fh:
        write_csv(pts, fh)
    return 0


def _map_rows(scheme, load, params, v0, cycles):
    rows = []
    for s in discrete_map.iterate(scheme, load, params, v0, cycles):
        d1 = s.duty * s.T if is_fixed_frequency(scheme) else s.duty
        rows.append((s.n, s.v, d1, s.T))
    return rows


def cmd_sim(args, cfg):
    params, load, scheme = build(cfg)
    v0 = args.v0
    if v0 is None:
        v0 = _unique(operating_points(params, load, scheme), args.index).v
    if args.model == "map":
        if args.dense:
            raise ConfigError("dense", "the discrete map has no in-cycle waveform")
        rows = _map_rows(scheme, load, params, v0, args.cycles)
    else:
        res = sim.simulate(scheme, load, params, (args.il0, v0), args.cycles, dense=args.dense)
        if args.dense:
            if args.json:
                _emit(args, {"config": cfg, "waveform": res.waveform}, [])
            else:
                with _output(args.out) as fh:
                    sim.write_waveform_csv(res, fh)
            return 0
        rows = [(s.n, s.v, s.d1, s.T) for s in res.samples]
    if args.json:
        _emit(args, {"config": cfg, "samples": [dict(zip(("n", "v_n", "d1_s", "Tn_s"), r)) for r in rows]}, [])
        return 0
    with _output(args.out) as fh:
        fh.write("n,v_n,d1_s,Tn_s\n")
        for n, v, d1, T in rows:
            fh.write(f"{n},{fmt(v)},{fmt(d1)},{fmt(T)}\n")
    return 0


def cmd_reproduce(args, cfg):
    target = "".join(args.target)
    checks = reproduce.run(target)
    failed = [c for c in checks if not c.passed]
    if args.json:
        payload = {"target": target, "passed": len(checks) - len(failed), "total": len(checks),
                   "checks": [{"name": c.name, "expected": c.expected, "computed": c.computed,
                               "tol": c.tol, "passed": c.passed} for c in checks]}
        _emit(args, payload, [])
    else:
        lines = [c.line() for c in checks]
        lines.append(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
        _emit(args, None, lines)
    return 1 if failed else 0


# --------------------------------------------------------------------------
# argument parsing


def _common(p):
    p.add_argument("--config", metavar="FILE", help="key = value configuration file")
    p.add_argument("--preset", help="built-in configuration (ex1 .. ex7)")
    p.add_argument("--json", action="store_true", help="emit JSON")
    p.add_argument("--out", metavar="FILE", help="write output to FILE instead of stdout")
    for key in FLOAT_KEYS + STR_KEYS:
        p.add_argument(f"--{key}", dest=key, default=None, metavar="X")
    p.add_argument("--index", type=int, default=0, help="operating point to use when several coexist")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dcmpoles", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("steady", help="operating-point report")
    _common(p)
    p.set_defaults(func=cmd_steady)
    p = sub.add_parser("pole", help="pole decomposition report")
    _common(p)
    p.add_argument("--no-exact", action="store_true", help="skip the exact-simulator pole")
    p.set_defaults(func=cmd_pole)
    p = sub.add_parser("bode", help="frequency response as CSV")
    _common(p)
    p.add_argument("--which", choices=("control", "source"), default="control")
    p.add_argument("--points", type=int, default=200)
    p.set_defaults(func=cmd_bode)
    p = sub.add_parser("sim", help="cycle-by-cycle trajectory as CSV")
    _common(p)
    p.add_argument("--v0", type=float, default=None, help="initial capacitor voltage (default: steady state)")
    p.add_argument("--il0", type=float, default=0.0, help="initial inductor current")
    p.add_argument("--cycles", type=int, default=20)
    p.add_argument("--dense", action="store_true", help="emit the in-cycle waveform")
    p.add_argument("--model", choices=("exact", "map"), default="exact")
    p.set_defaults(func=cmd_sim)
    p = sub.add_parser("reproduce", help="check the worked examples and tables")
    p.add_argument("target", nargs="+", help="1..7, 'table 2', 'table 3', 'table 4' or all")
    p.add_argument("--json", action="store_true")
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(func=cmd_reproduce, preset=None, config=None)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = {} if args.command == "reproduce" else merge_config(args)
        return args.func(args, cfg)
    except MultipleOperatingPoints as exc:
        print(f"error: {exc}; choose one with --index", file=sys.stderr)
        return 2
    except (ConfigError, ConverterError, KeyError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
