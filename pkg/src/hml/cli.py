"""``hml`` command-line front end.

    hml <geometry|coupling|bands|swap|fit-alpha|cooperativity> --config run.json
        [--sweep key=a:b:n] [--out path]

Exit codes: 0 success, 2 configuration error, 3 physics-domain error,
4 numerical convergence error. ``HML_THREADS`` caps sweep parallelism.
"""
import argparse
import ast
import csv
import io
import json
import math
import operator
import os
import sys
import warnings

import numpy as np

from . import config as C
from .couplings import frequency_map, qubit_coupling, single_loop_pair
from .dynamics import TwoSiteModel, cooperativity_map, fit_alpha, swap_fidelity
from .errors import ConfigurationError, ConvergenceError, PhysicsDomainError, ValidityWarning
from .geometry import critical_distance, flux_factors_circular, loop_inductance
from .lattice import (LatticeSpec, bands, chain_lattice_constant, checkerboard_lattice_constant,
                      ring_spectrum, write_band_csv)
from .parallel import ordered_map
from .units import magnet_moment

FMT = ".12g"
EXIT_OK, EXIT_CONFIG, EXIT_DOMAIN, EXIT_CONVERGENCE = 0, 2, 3, 4

# ---------------------------------------------------------------------------
# sweep parsing

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_NAMES = {"pi": math.pi, "e": math.e}


def _eval_number(text):
    """Evaluate a numeric literal with +-*/** and the names pi, e."""
    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id in _NAMES:
            return _NAMES[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        raise ValueError
    try:
        return ev(ast.parse(text.strip(), mode="eval"))
    except (ValueError, SyntaxError, ZeroDivisionError):
        raise ConfigurationError(f"cannot parse number {text!r}", path="--sweep") from None


def parse_sweep(text, allowed):
    """``key=a:b:n`` -> (key, linspace(a, b, n))."""
    try:
        key, rng = text.split("=", 1)
        a, b, n = rng.split(":")
    except ValueError:
        raise ConfigurationError(f"sweep must look like key=a:b:n, got {text!r}", path="--sweep") from None
    key = key.strip()
    if key not in allowed:
        raise ConfigurationError(f"cannot sweep {key!r}; allowed: {sorted(allowed)}", path="--sweep")
    try:
        n = int(n)
    except ValueError:
        raise ConfigurationError(f"sweep point count must be an integer, got {n!r}", path="--sweep") from None
    if n < 1:
        raise ConfigurationError("sweep point count must be >= 1", path="--sweep")
    return key, np.linspace(_eval_number(a), _eval_number(b), n)


# ---------------------------------------------------------------------------
# output helpers


def _clean(value):
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        if not np.isfinite(value):
            return None
        return float(format(float(value), FMT)) + 0.0  # no negative zero
    return value


def dump_json(report):
    return json.dumps(_clean(report), indent=2) + "\n"


def dump_csv(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format(float(v) + 0.0, FMT) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def _hz(w):
    return None if w is None else w / (2 * np.pi)


def _magnet(cfg):
    if cfg.magnet_radius is None:
        raise ConfigurationError("magnet radius is required for this command", path="magnet_radius")
    return cfg.magnet_radius


# ---------------------------------------------------------------------------
# commands


def cmd_geometry(cfg, args):
    mat = C.material(cfg)
    lc = C.require(cfg, "loop")
    pl = C.placement(cfg)
    l = lc.l if args.l_over_d is None else args.l_over_d * pl.d
    F = magnet_moment(cfg.magnet_radius, mat)[1] if cfg.magnet_radius is not None else None

    def report(h_over_d, l_over_d):
        place = C.Placement(d=pl.d, h=h_over_d * pl.d)
        lp = C.loop_spec(cfg, l_override=l_over_d * pl.d)
        # the flux factors themselves do not depend on F; only Phi_bias does
        ff = flux_factors_circular(lp, place, mat, F=1.0 if F is None else F)
        d_c = None
        if lc.Bc is not None and cfg.magnet_radius is not None:
            d_c = critical_distance(cfg.magnet_radius, mat, lc.Bc, lp.tau)
        return {
            "Ix": ff.Ix, "Iy": ff.Iy, "Iz": ff.Iz,
            "L_full": loop_inductance(lp, "full"),
            "L_leading_log": loop_inductance(lp, "leading_log"),
            "d_c": d_c,
            "Phi_e": ff.Phi_e,
            "Phi_bias": ff.Phi_bias if F is not None else None,
            "l_over_d": l_over_d,
            "h_over_d": h_over_d,
        }

    if args.sweep:
        key, values = parse_sweep(args.sweep, {"h_over_d", "l_over_d"})
        base = {"h_over_d": pl.h / pl.d, "l_over_d": l / pl.d}

        def point(v):
            p = dict(base, **{key: v})
            return report(p["h_over_d"], p["l_over_d"])

        reps = ordered_map(point, values)
        header = ["l_over_d", "h_over_d", "Ix", "Iy", "Iz", "Phi_e"]
        return dump_csv(header, [[r[h] for h in header] for r in reps])
    return dump_json(report(pl.h / pl.d, l / pl.d))


def _pair(cfg, mat):
    lc = C.require(cfg, "loop")
    pc = C.require(cfg, "placement")
    flux = None if pc.flux is None else (pc.flux.Ix, pc.flux.Iy, pc.flux.Iz)
    return single_loop_pair(C.loop_spec(cfg), C.placement(cfg), _magnet(cfg), mat,
                            C.field_bias(cfg).B0, inductance_model=lc.inductance_model, flux=flux)


def cmd_coupling(cfg, args):
    mat = C.material(cfg)
    R = _magnet(cfg)
    B0 = C.field_bias(cfg).B0
    q = cfg.qubit
    if args.sweep:
        key, values = parse_sweep(args.sweep, {"theta", "varphi", "B0"})
        qc = C.require(cfg, "qubit")
        if key == "B0":
            J = _pair(cfg, mat).J12 if cfg.loop is not None else 0.0
            fm = frequency_map(values, R, qc.r_q, mat, J=J)
            keys = ["omega0", "omega_plus", "omega_minus", "omega_sigma"]
            header = ["B0_T"] + [f"{k}_{u}" for k in keys for u in ("rad_s", "hz")]
            rows = [[b] + [x for k in keys for x in (fm[k][i], fm[k][i] / (2 * np.pi))] for i, b in enumerate(values)]
            return dump_csv(header, rows)

        def point(v):
            angles = {"theta": qc.theta, "varphi": qc.varphi, key: v}
            return qubit_coupling(angles["theta"], angles["varphi"], qc.r_q, R, mat, B0)

        res = ordered_map(point, values)
        header = [key, "xi_theta_rad_s", "g_theta_rad_s", "W_theta_rad_s", "xi_abs_rad_s", "g_dressed_rad_s",
                  "W_dressed_rad_s", "omega_sigma_rad_s", "omega_sigma_hz", "Theta"]
        rows = [[v, r.xi_theta, r.g_theta, r.W_theta, abs(r.xi), r.g, r.W, r.omega_sigma,
                 r.omega_sigma / (2 * np.pi), r.Theta] for v, r in zip(values, res)]
        return dump_csv(header, rows)

    pair = _pair(cfg, mat)
    qc = qubit_coupling(q.theta, q.varphi, q.r_q, R, mat, B0) if q is not None else None
    omega_j = float(pair.model.omega[0])
    rep = {
        "J12_rad_s": pair.J12, "J12_hz": _hz(pair.J12),
        "J12_dipolar_rad_s": pair.Jd12, "J12_dipolar_hz": _hz(pair.Jd12),
        "ratio": pair.ratio, "ratio_large_loop": pair.ratio_paper_formula,
        "J12_linear_I_rad_s": pair.J12_linear_I, "J12_linear_I_hz": _hz(pair.J12_linear_I),
        "ratio_linear_I": pair.ratio_linear_I,
        "omega_j_rad_s": omega_j, "omega_j_hz": _hz(omega_j),
        "g_dressed_rad_s": qc and qc.g, "g_dressed_hz": qc and _hz(qc.g),
        "g_maintext_rad_s": qc and qc.g_maintext, "g_maintext_hz": qc and _hz(qc.g_maintext),
        "omega_sigma_rad_s": qc and qc.omega_sigma, "omega_sigma_hz": qc and _hz(qc.omega_sigma),
        "Theta": qc and qc.Theta,
        "F": pair.F, "L": pair.L,
    }
    return dump_json(rep)


def _lattice_spec(cfg, args):
    lat = cfg.lattice or C.LatticeCfg()
    kind = args.kind or lat.kind
    omega0, J, a = lat.omega0, lat.Jrate, lat.a
    if omega0 is None or J is None or a is None:
        mat = C.material(cfg)
        pl = C.placement(cfg)
        lc = C.require(cfg, "loop")
        if omega0 is None or J is None:
            pair = _pair(cfg, mat)
            omega0 = float(pair.model.omega[0]) if omega0 is None else omega0
            J = pair.J12 if J is None else J
        if a is None:
            a = checkerboard_lattice_constant(pl.d, lc.l) if kind == "checkerboard" else chain_lattice_constant(pl.d, lc.l)
    return LatticeSpec(kind=kind, omega0=omega0, Jrate=J, a=a, N=lat.N, boundary=lat.boundary), (args.nk or lat.nk)


def cmd_bands(cfg, args):
    spec, nk = _lattice_spec(cfg, args)
    if spec.kind == "ring":
        w = ring_spectrum(spec)
        return dump_csv(["mode_index", "omega_rad_s", "omega_hz"], [[i, x, x / (2 * np.pi)] for i, x in enumerate(w)])
    buf = io.StringIO()
    write_band_csv(bands(spec, nk), buf, fmt=FMT)
    return buf.getvalue()


def _two_site(cfg):
    """Two-site model from the dynamics section, completed from the geometry where needed."""
    dyn = cfg.dynamics or C.DynamicsCfg()
    gamma = 0.0 if dyn.T2_star is None else np.pi / dyn.T2_star
    if dyn.T2_star is not None and not dyn.T2_star > 0:
        raise PhysicsDomainError(f"T2_star must be positive, got {dyn.T2_star!r}")
    J, g, Delta = dyn.Jrate, dyn.g, dyn.Delta
    omega0 = 0.0
    if J is None or g is None or Delta is None:
        mat = C.material(cfg)
        pair = _pair(cfg, mat)
        omega0 = float(pair.model.omega[0])
        J = pair.J12 if J is None else J
        if g is None or Delta is None:
            q = C.require(cfg, "qubit")
            qc = qubit_coupling(q.theta, q.varphi, q.r_q, _magnet(cfg), mat, C.field_bias(cfg).B0)
            g = qc.g if g is None else g
            Delta = omega0 + J - qc.omega_sigma if Delta is None else Delta
    return TwoSiteModel.from_detuning(J, Delta, g, dyn.kappa, gamma, omega0=omega0), dyn


def cmd_swap(cfg, args):
    m, dyn = _two_site(cfg)
    if args.sweep:
        key, values = parse_sweep(args.sweep, {"Delta", "kappa", "gamma", "Jrate", "g"})

        def point(v):
            mm = TwoSiteModel.from_detuning(**{**dict(Jrate=m.Jrate, Delta=m.Delta, g=m.g, kappa=m.kappa,
                                                       gamma=m.gamma, omega0=m.omega0), key: v})
            return swap_fidelity(mm, t_max=dyn.t_max, nt=dyn.n_t, backend=dyn.backend, n_max=dyn.n_max).summary()

        res = ordered_map(point, values)
        header = [key, "t_star_s", "epsilon", "g_eff_rad_s", "kappa_eff_rad_s", "Gamma_eff_rad_s", "C0"]
        return dump_csv(header, [[v] + [np.nan if r[h] is None else r[h] for h in header[1:]] for v, r in zip(values, res)])
    out = swap_fidelity(m, t_max=dyn.t_max, nt=dyn.n_t, backend=dyn.backend, n_max=dyn.n_max)
    if cfg.output.format == "csv":
        return dump_csv(["t_s", "fidelity"], zip(out.times, out.fidelity))
    return dump_json(out.summary())


def cmd_fit_alpha(cfg, args):
    dyn = cfg.dynamics or C.DynamicsCfg()
    J = dyn.Jrate if dyn.Jrate is not None else 2 * np.pi * 1e6
    g = dyn.g if dyn.g is not None else 0.05 * J
    m = TwoSiteModel.from_detuning(J, J, g)
    fit = fit_alpha(m, n_points=dyn.n_points, x_range=tuple(dyn.x_range), nt=dyn.n_t)
    return dump_json({**fit.summary(), "g_over_J": g / J, "n_points": dyn.n_points})


def cmd_cooperativity(cfg, args):
    dyn = cfg.dynamics or C.DynamicsCfg()
    if dyn.g is not None:
        g = dyn.g
    else:
        mat = C.material(cfg)
        q = C.require(cfg, "qubit")
        g = qubit_coupling(q.theta, q.varphi, q.r_q, _magnet(cfg), mat, C.field_bias(cfg).B0).g

    def grid(spec, path):
        if len(spec) != 3 or int(spec[2]) != spec[2] or spec[2] < 1:
            raise ConfigurationError("range must be [lo, hi, n]", path=path)
        return np.geomspace(spec[0], spec[1], int(spec[2]))

    kappas = grid(dyn.kappa_range, "dynamics.kappa_range")
    T2s = grid(dyn.T2_range, "dynamics.T2_range")
    C0 = cooperativity_map(g, kappas, T2s)
    rows = [[k, k / (2 * np.pi), T2, np.pi / T2, C0[i, j]]
            for i, k in enumerate(kappas) for j, T2 in enumerate(T2s)]
    return dump_csv(["kappa_rad_s", "kappa_hz", "T2_s", "gamma_rad_s", "C0"], rows)


COMMANDS = {
    "geometry": cmd_geometry,
    "coupling": cmd_coupling,
    "bands": cmd_bands,
    "swap": cmd_swap,
    "fit-alpha": cmd_fit_alpha,
    "cooperativity": cmd_cooperativity,
}


def build_parser():
    p = argparse.ArgumentParser(prog="hml", description="Hybrid magnetic lattice calculations.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", required=True, help="JSON run configuration")
    p.add_argument("--sweep", help="parameter sweep key=a:b:n (a, b may use pi)")
    p.add_argument("--out", help="output file (default: output.path or stdout)")
    p.add_argument("--l_over_d", type=float, help="geometry: override l as a multiple of d")
    p.add_argument("--kind", choices=["chain", "ring", "checkerboard"], help="bands: lattice kind")
    p.add_argument("--nk", type=int, help="bands: k points per dimension")
    return p


def run(argv=None):
    """Run one command; returns (output_text, output_path or None)."""
    args = build_parser().parse_args(argv)
    cfg = C.load_config(args.config)
    with warnings.catch_warnings():
        warnings.simplefilter("default", ValidityWarning)
        text = COMMANDS[args.command](cfg, args)
    return text, args.out or cfg.output.path


def main(argv=None):
    try:
        text, path = run(argv)
    except ConfigurationError as err:
        print(f"hml: configuration error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except PhysicsDomainError as err:
        print(f"hml: physics-domain error: {err}", file=sys.stderr)
        return EXIT_DOMAIN
    except ConvergenceError as err:
        print(f"hml: convergence error: {err}", file=sys.stderr)
        return EXIT_CONVERGENCE
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        try:
            sys.stdout.write(text)
            sys.stdout.flush()
        except BrokenPipeError:
            # reader closed early (e.g. piped into head); silence the flush at exit
            os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
