"""Command-line front end: ``svhe-ripple <command> [options]``.

Exit status: 0 on success, 2 for usage or domain errors, 3 for numerical
failures (no k solution, diverged simulation).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import DomainError, NoSolutionError, SimulationError
from .harmonic_elim import solve_k, write_solutions
from .machine_sim import REFERENCE_THD, THD_COLUMNS, SimConfig, thd_table, write_thd_table
from .ripple_analysis import (
    REFERENCE_MACHINE,
    REFERENCE_RIPPLE,
    RIPPLE_COLUMNS,
    RIPPLE_M,
    crossover_m,
    cycle_flux_ripple,
    ripple_table,
    sector_flux_ripple,
    write_ripple_csv,
    write_ripple_table,
)
from .svpwm_core import DEFAULT_VDC, DriveConfig, get_sequence, pole_voltage_waveform

EXIT_USAGE = 2
EXIT_NUMERIC = 3

_KEYS = ("out", "vdc", "fbase", "poles", "seq", "m", "k", "alpha1", "alpha2", "dt", "n_max")


class UsageError(Exception):
    pass


def parse_m_list(text):
    try:
        values = [float(x) for x in str(text).replace(" ", "").split(",") if x != ""]
    except ValueError:
        raise UsageError(f"--m: cannot parse {text!r} as a comma-separated list of numbers") from None
    if not values:
        raise UsageError("--m: empty list")
    for m in values:
        if not (0.0 < m <= 1.0):
            raise DomainError("m", m, "0 < m <= 1")
    return values


def parse_k_policy(text):
    """Return ('fixed', k) or ('solve', 5|7)."""
    t = str(text).strip().lower()
    if t == "half":
        return ("fixed", 0.5)
    if t in ("solve-5", "solve-7"):
        return ("solve", int(t[-1]))
    if t.startswith("fixed:"):
        try:
            k = float(t.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"--k: bad value {text!r}") from None
        if not (0.0 < k < 1.0):
            raise DomainError("k", k, "0 < k < 1")
        return ("fixed", k)
    raise UsageError(f"--k: expected fixed:X, solve-5, solve-7 or half, got {text!r}")


def read_config_file(path):
    """Flat ``key = value`` file; blank lines and ``#`` comments are ignored."""
    values = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _KEYS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


def _common_parser():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", metavar="PATH", help="key = value file mirroring these flags")
    p.add_argument("--out", metavar="DIR", help="output directory (default $SVHE_OUT_DIR or ./out)")
    p.add_argument("--vdc", metavar="VOLTS", type=float)
    p.add_argument("--fbase", metavar="HZ", type=float)
    p.add_argument("--poles", metavar="N", type=int)
    p.add_argument("--seq", choices=("csv", "abc1", "abc2", "svhe"))
    p.add_argument("--m", metavar="LIST", help="modulation index or comma-separated list")
    p.add_argument("--k", metavar="POLICY", help="fixed:X | solve-5 | solve-7 | half")
    return p


def build_parser():
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="svhe-ripple", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("waveform", parents=[common], help="pole-voltage, flux and torque ripple CSVs")
    sub.add_parser("sweep-ripple", parents=[common], help="analytic torque-ripple table")
    p = sub.add_parser("sweep-thd", parents=[common], help="simulated line-current THD table")
    p.add_argument("--dt", type=float, help="integration step in seconds")
    p.add_argument("--n-max", dest="n_max", type=int, help="highest harmonic in THD")
    sub.add_parser("solve-k", parents=[common], help="dwell-division coefficients for 5th/7th elimination")
    p = sub.add_parser("crossover", parents=[common], help="modulation index where SVHE beats CSV")
    p.add_argument("--alpha1", type=float, help="SVHE first sample angle, degrees")
    p.add_argument("--alpha2", type=float, help="CSV first sample angle, degrees")
    p = sub.add_parser("report", parents=[common], help="every table plus a text summary")
    p.add_argument("--dt", type=float)
    p.add_argument("--n-max", dest="n_max", type=int)
    return parser


def resolve(args):
    """Merge config file, flags and environment into a plain dict."""
    cfg = read_config_file(args.config) if args.config else {}
    for key in _KEYS:
        v = getattr(args, key, None)
        if v is not None:
            cfg[key] = v
    out = cfg.get("out") or os.environ.get("SVHE_OUT_DIR") or "out"
    try:
        resolved = {
            "command": args.command,
            "out": str(out),
            "vdc": float(cfg.get("vdc", DEFAULT_VDC)),
            "fbase": float(cfg.get("fbase", 50.0)),
            "poles": int(cfg.get("poles", REFERENCE_MACHINE.poles)),
            "seq": str(cfg.get("seq", "svhe")).lower(),
            "m": cfg.get("m"),
            "k": str(cfg.get("k", "half")),
            "alpha1": float(cfg.get("alpha1", 15.0)),
            "alpha2": float(cfg.get("alpha2", 10.0)),
            "dt": float(cfg["dt"]) if cfg.get("dt") is not None else None,
            "n_max": int(cfg.get("n_max", 49)),
        }
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if resolved["seq"] not in ("csv", "abc1", "abc2", "svhe"):
        raise UsageError(f"--seq: unknown sequence {resolved['seq']!r}")
    return resolved


def config_hash(resolved):
    blob = json.dumps({k: resolved[k] for k in sorted(resolved) if k != "out"}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _comment(resolved):
    return f"svhe-ripple {__version__} config={config_hash(resolved)}"


def _drive(r):
    return DriveConfig(v_dc=r["vdc"], f_base=r["fbase"])


def _machine(r):
    from dataclasses import replace

    return replace(REFERENCE_MACHINE, poles=r["poles"])


def _k_for(r, m):
    kind, value = parse_k_policy(r["k"])
    if r["seq"] != "svhe":
        return 0.5
    if kind == "fixed":
        return value
    return solve_k(m, value, _drive(r)).k


def cmd_waveform(r):
    ms = parse_m_list(r["m"] if r["m"] is not None else "0.8")
    if len(ms) != 1:
        raise UsageError("waveform takes a single --m value")
    m = ms[0]
    seq = get_sequence(r["seq"])
    drive, machine = _drive(r), _machine(r)
    k = _k_for(r, m)
    out = Path(r["out"])
    stem = f"{seq.label}_m{m:g}"
    comment = _comment(r)
    paths = [out / f"{stem}_pole_voltage.csv", out / f"{stem}_flux_ripple.csv", out / f"{stem}_torque_ripple.csv"]
    pole_voltage_waveform(seq, m, k, drive).to_csv(paths[0], comment)
    write_ripple_csv(paths[1], cycle_flux_ripple(seq, m, k, drive), machine, m, drive, comment)
    write_ripple_csv(paths[2], sector_flux_ripple(seq, m, k, drive), machine, m, drive, comment)
    for p in paths:
        print(p)
    return 0


def cmd_sweep_ripple(r):
    ms = parse_m_list(r["m"]) if r["m"] is not None else list(RIPPLE_M)
    drive, machine = _drive(r), _machine(r)
    table = ripple_table(ms, machine, drive)
    worst = 0.0
    for m in ms:
        if m in REFERENCE_RIPPLE:
            for model, ref in zip(table[m], REFERENCE_RIPPLE[m]):
                worst = max(worst, abs(model / ref - 1))
    if worst > 0.05:
        print(f"warning: calibration residual {100 * worst:.1f}% exceeds 5% against the published table", file=sys.stderr)
    path = Path(r["out"]) / "ripple_table.csv"
    write_ripple_table(path, table, _comment(r))
    print(path)
    return 0


def cmd_sweep_thd(r):
    ms = parse_m_list(r["m"]) if r["m"] is not None else list(REFERENCE_THD)
    cfg = SimConfig(dt=r["dt"])
    table = thd_table(ms, _machine(r), _drive(r), cfg, r["n_max"])
    path = Path(r["out"]) / "thd_table.csv"
    write_thd_table(path, table, _comment(r))
    print(path)
    return 0


def _solutions(r, ms):
    sols = []
    for m in ms:
        for target in (5, 7):
            try:
                sols.append(solve_k(m, target, _drive(r)))
            except NoSolutionError:
                sols.append((m, target))
    return sols


def cmd_solve_k(r):
    ms = parse_m_list(r["m"]) if r["m"] is not None else list(RIPPLE_M)
    sols = _solutions(r, ms)
    path = Path(r["out"]) / "solve_k.csv"
    write_solutions(path, sols, _comment(r))
    print(f"{'m':>6} {'target':>6} {'k':>12} {'residual':>10}")
    for s in sols:
        if isinstance(s, tuple):
            print(f"{s[0]:>6g} {s[1]:>6d} {'none':>12} {'-':>10}")
        else:
            print(f"{s.m:>6g} {s.target_harmonic:>6d} {s.k:>12.9f} {s.residual:>10.2e}")
    return 0


def cmd_crossover(r):
    print(f"{crossover_m(r['alpha1'], r['alpha2']):.4f}")
    return 0


def cmd_report(r):
    out = Path(r["out"])
    comment = _comment(r)
    ms = parse_m_list(r["m"]) if r["m"] is not None else list(RIPPLE_M)
    drive, machine = _drive(r), _machine(r)
    sols = _solutions(r, ms)
    write_solutions(out / "solve_k.csv", sols, comment)
    ks = {}
    for s in sols:
        if not isinstance(s, tuple):
            ks[(s.m, "svhe_h5" if s.target_harmonic == 5 else "svhe_h7")] = s.k
    ripple = ripple_table(ms, machine, drive, ks)
    write_ripple_table(out / "ripple_table.csv", ripple, comment)
    thd = thd_table(ms, machine, drive, SimConfig(dt=r["dt"]), r["n_max"])
    write_thd_table(out / "thd_table.csv", thd, comment)

    lines = [
        f"# {comment}",
        f"v_dc = {drive.v_dc} V, f_base = {drive.f_base} Hz, poles = {machine.poles}",
        f"crossover m (15, 10 deg) = {crossover_m(15.0, 10.0):.4f}",
        "",
        "torque ripple p-p [N m]: model / published",
        "m      " + " ".join(f"{c:>17}" for c in RIPPLE_COLUMNS),
    ]
    for m in ms:
        ref = REFERENCE_RIPPLE.get(m)
        cells = [
            f"{v:8.3f}/{ref[i]:8.3f}" if ref else f"{v:8.3f}/{'-':>8}" for i, v in enumerate(ripple[m])
        ]
        lines.append(f"{m:<6g} " + " ".join(f"{c:>17}" for c in cells))
    lines += ["", "line-current THD [%]: simulated / published", "m      " + " ".join(f"{c:>15}" for c in THD_COLUMNS)]
    for m in ms:
        ref = REFERENCE_THD.get(m)
        cells = [f"{v:6.2f}/{ref[i]:6.2f}" if ref else f"{v:6.2f}/{'-':>6}" for i, v in enumerate(thd[m])]
        lines.append(f"{m:<6g} " + " ".join(f"{c:>15}" for c in cells))
    (out / "report.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    print("\n".join(lines[1:]))
    return 0


COMMANDS = {
    "waveform": cmd_waveform,
    "sweep-ripple": cmd_sweep_ripple,
    "sweep-thd": cmd_sweep_thd,
    "solve-k": cmd_solve_k,
    "crossover": cmd_crossover,
    "report": cmd_report,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        r = resolve(args)
        np.seterr(all="ignore")
        return COMMANDS[args.command](r)
    except (UsageError, DomainError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NoSolutionError, SimulationError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    raise SystemExit(main())
