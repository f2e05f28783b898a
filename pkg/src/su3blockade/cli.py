"""Command-line front end: ``su3blockade <subcommand> [options]``.

Settings come from built-in defaults, then an optional JSON file given with
``--config``, then command-line flags.  Every output file ``X`` is accompanied
by ``X.meta.json`` holding the resolved config, package version and units.

Exit codes: 0 success, 1 invalid input, 2 capacity exceeded, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import oracle as orc
from .dynamics import (
    InitialSpec,
    block_spectra,
    default_time_step,
    detect_revival,
    evolve_expectation,
    find_revivals,
    fit_sqrt_law,
)
from .errors import CapacityError, NumericalError, ValidationError
from .hamiltonian import OBSERVABLES, DriveParams
from .irrep import multiplicity
from .series import fmt, write_csv
from .spin_model import SpinModelConfig, envelope, evolve_sm0
from .state_prep import (
    apply_schedule,
    fidelity,
    ghz_target,
    physical_schedule,
    schedule_table,
    symmetric_target,
    synthesize_sequence,
    w_target,
)

EXIT_OK, EXIT_VALIDATION, EXIT_CAPACITY, EXIT_NUMERICAL = 0, 1, 2, 3

UNITS = ("hbar = 1; energies in units of the reference Rabi frequency "
         "(omega1 if nonzero, else omega2); times are reported as Omega * t")

DEFAULTS = {
    "n": None,
    "omega1": 1.0,
    "omega2": 1.0,
    "delta1": 0.0,
    "delta2": 0.0,
    "random_drive": False,
    "n0": None,
    "n1": None,
    "initial": None,
    "t_max": None,
    "dt": None,
    "samples": None,
    "observable": "nr",
    "output": None,
    "seed": 0,
    "jobs": 1,
    "revival": False,
    "target": None,
    "variant": "pm",
    "mode": "quench",
    "n_list": None,
    "jump_factor": 2.0,
    "t_exclude": 5.0,
}
DEFAULT_N = 2
DEFAULT_T_MAX = 10.0


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors, which is reserved for capacity errors here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _complex(text) -> complex:
    if isinstance(text, (list, tuple)):
        if len(text) != 2:
            raise ValidationError(f"complex value must be [re, im], got {text!r}")
        return complex(float(text[0]), float(text[1]))
    try:
        return complex(str(text).replace(" ", "")) if isinstance(text, str) else complex(text)
    except (TypeError, ValueError):
        raise ValidationError(f"cannot parse {text!r} as a number") from None


def _common(p: argparse.ArgumentParser, *, drive=True, grid=False, initial=False) -> None:
    S = argparse.SUPPRESS
    p.add_argument("--config", help="JSON file with any of the long option names as keys")
    p.add_argument("-n", type=int, default=S, help="number of atoms")
    p.add_argument("-o", "--output", default=S, help="output file")
    p.add_argument("--seed", type=int, default=S, help="seed used by --random-drive")
    p.add_argument("--jobs", type=int, default=S, help="worker threads across sectors")
    if drive:
        p.add_argument("--omega1", default=S, help="0-1 Rabi frequency, complex allowed (e.g. 1+0.5j)")
        p.add_argument("--omega2", default=S, help="1-r Rabi frequency, complex allowed")
        p.add_argument("--delta1", type=float, default=S)
        p.add_argument("--delta2", type=float, default=S)
        p.add_argument("--random-drive", action="store_true", default=S,
                       help="draw the drive from --seed instead of the omega/delta values")
    if initial:
        p.add_argument("--n0", type=int, default=S, help="atoms initially in |0>")
        p.add_argument("--n1", type=int, default=S, help="atoms initially in |1>")
        p.add_argument("--initial", choices=("all0", "all1", "half"), default=S,
                       help="named initial state (ignored when --n0/--n1 are given)")
    if grid:
        p.add_argument("--t-max", type=float, default=S, help="final time in units of 1/Omega")
        p.add_argument("--dt", type=float, default=S, help="time step")
        p.add_argument("--samples", type=int, default=S, help="number of samples (overrides --dt)")


def _resolve(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(data, dict):
            raise ValidationError("config file must hold a JSON object")
        unknown = set(data) - set(DEFAULTS)
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(data)
    flags = {k: v for k, v in vars(args).items() if k not in ("config", "command", "func")}
    cfg.update(flags)
    return cfg


def _drive(cfg: dict) -> DriveParams:
    if cfg["random_drive"]:
        rng = np.random.default_rng(int(cfg["seed"]))
        w1, w2 = rng.uniform(0.2, 2.0, size=2)
        d1, d2 = rng.uniform(-1.0, 1.0, size=2)
        drive = DriveParams(w1, w2, d1, d2)
    else:
        drive = DriveParams(_complex(cfg["omega1"]), _complex(cfg["omega2"]),
                            float(cfg["delta1"]), float(cfg["delta2"]))
    cfg.update(drive.to_dict())
    return drive


def _n(cfg: dict) -> int:
    n = cfg["n"] if cfg["n"] is not None else DEFAULT_N
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ValidationError(f"n must be a positive integer, got {n!r}")
    cfg["n"] = int(n)
    return int(n)


def _initial(cfg: dict, n: int) -> InitialSpec:
    n0, n1 = cfg["n0"], cfg["n1"]
    if n0 is None and n1 is None:
        spec = InitialSpec.family(cfg["initial"] or "all1", n)
    else:
        n0 = n - n1 if n0 is None else n0
        n1 = n - n0 if n1 is None else n1
        spec = InitialSpec(n0, n1)
    if spec.n != n:
        raise ValidationError(f"n0 + n1 = {spec.n} does not match n = {n}")
    cfg["n0"], cfg["n1"] = spec.n0, spec.n1
    return spec


def _grid(cfg: dict, n: int) -> np.ndarray:
    t_max = float(cfg["t_max"]) if cfg["t_max"] is not None else DEFAULT_T_MAX
    if not math.isfinite(t_max) or t_max < 0:
        raise ValidationError(f"t_max must be a finite nonnegative number, got {t_max}")
    cfg["t_max"] = t_max
    if cfg["samples"] is not None:
        m = int(cfg["samples"])
        if m < 1 or (m == 1 and t_max > 0):
            raise ValidationError("need samples >= 2 (or samples = 1 with t_max = 0)")
        return np.linspace(0.0, t_max, m)
    dt = float(cfg["dt"]) if cfg["dt"] is not None else default_time_step(n)
    if not dt > 0:
        raise ValidationError(f"dt must be positive, got {dt}")
    return dt * np.arange(int(math.floor(t_max / dt + 1e-9)) + 1)


def _output(cfg: dict, default: str) -> Path:
    return Path(cfg["output"] or default)


def _write_meta(path: Path, command: str, cfg: dict, **extra) -> None:
    meta = {"command": command, "version": __version__, "units": UNITS, "config": cfg}
    meta.update(extra)
    Path(f"{path}.meta.json").write_text(json.dumps(meta, indent=2, default=str) + "\n")


def _write_spectrum(path: Path, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["eigenvalue", "multiplicity", "p", "q"])
        for e, mu, p, q in rows:
            w.writerow([fmt(e), mu, p, q])


def cmd_spectrum(cfg: dict) -> int:
    n, drive = _n(cfg), _drive(cfg)
    rows = []
    for lam, vals in block_spectra(n, drive, n_jobs=int(cfg["jobs"])).items():
        mu = multiplicity(lam)
        rows.extend((float(e), mu, lam.p, lam.q) for e in vals)
    out = _output(cfg, "spectrum.csv")
    _write_spectrum(out, rows)
    _write_meta(out, "spectrum", cfg, states=sum(r[1] for r in rows))
    return EXIT_OK


def _revival_cfg(cfg: dict) -> dict:
    return {"jump_factor": float(cfg["jump_factor"]), "t_exclude": float(cfg["t_exclude"])}


def cmd_quench(cfg: dict) -> int:
    n, drive = _n(cfg), _drive(cfg)
    spec = _initial(cfg, n)
    if cfg["observable"] not in OBSERVABLES:
        raise ValidationError(f"observable must be one of {OBSERVABLES}")
    t = _grid(cfg, n)
    series = evolve_expectation(spec, drive, cfg["observable"], t, n_jobs=int(cfg["jobs"]))
    out = _output(cfg, "quench.csv")
    series.to_csv(out)
    _write_meta(out, "quench", cfg)
    if cfg["revival"]:
        res = detect_revival(series, **_revival_cfg(cfg))
        side = {"detected": res.detected, "t_rev": res.time if res.detected else None,
                "strength": res.strength if res.detected else None, **_revival_cfg(cfg)}
        Path(f"{out}.revival.json").write_text(json.dumps(side, indent=2) + "\n")
    return EXIT_OK


def _read_target(path: str) -> np.ndarray:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read target {path}: {exc}") from None
    amps = data["amplitudes"] if isinstance(data, dict) else data
    return np.array([_complex(a) for a in amps])


def cmd_prepare(cfg: dict) -> int:
    named = cfg["target"]
    if named in ("ghz", "w"):
        n = _n(cfg)
        target = ghz_target(n) if named == "ghz" else w_target(n)
    elif named:
        target = _read_target(named)
        if cfg["n"] is not None and _n(cfg) != target.size - 1:
            raise ValidationError(f"target has {target.size} amplitudes, expected n + 1 = {_n(cfg) + 1}")
    else:
        raise ValidationError("give --ghz, --w or --target FILE")
    target = symmetric_target(target)
    n = target.size - 1
    cfg["n"] = n
    eff = synthesize_sequence(target)
    phys = physical_schedule(eff)
    r_eff, r_phys = apply_schedule(eff), apply_schedule(phys)
    report = {
        "n": n,
        "effective": eff.pruned().to_dict(),
        "physical": phys.to_dict(),
        "fidelity_effective": fidelity(r_eff.amplitudes, target),
        "fidelity_physical": fidelity(r_phys.amplitudes, target),
        "leakage_physical": r_phys.leakage,
    }
    out = _output(cfg, "schedule.json")
    out.write_text(json.dumps(report, indent=2) + "\n")
    _write_meta(out, "prepare", cfg)
    print(schedule_table(eff.pruned()))
    print(f"fidelity (effective) {report['fidelity_effective']:.15f}")
    print(f"fidelity (physical)  {report['fidelity_physical']:.15f}")
    return EXIT_OK


def cmd_spinmodel(cfg: dict) -> int:
    n, drive = _n(cfg), _drive(cfg)
    config = SpinModelConfig(n, drive, _grid(cfg, n))
    variant = cfg["variant"]
    out = _output(cfg, f"spinmodel_{variant}.csv")
    if variant == "pm":
        envelope(config).to_csv(out)
    elif variant == "zero":
        evolve_sm0(config).to_csv(out)
    else:
        raise ValidationError(f"variant must be 'pm' or 'zero', got {variant!r}")
    _write_meta(out, "spinmodel", cfg)
    return EXIT_OK


def cmd_oracle(cfg: dict) -> int:
    n, drive = _n(cfg), _drive(cfg)
    mode = cfg["mode"]
    if mode == "spectrum":
        out = _output(cfg, "oracle_spectrum.csv")
        _write_spectrum(out, [(float(e), 1, "", "") for e in orc.oracle_spectrum(n, drive)])
    elif mode == "quench":
        spec = _initial(cfg, n)
        if cfg["observable"] not in OBSERVABLES:
            raise ValidationError(f"observable must be one of {OBSERVABLES}")
        psi = orc.product_state(n, spec.n0, spec.n1)
        out = _output(cfg, "oracle_quench.csv")
        orc.oracle_evolve(psi, n, drive, cfg["observable"], _grid(cfg, n)).to_csv(out)
    elif mode == "hamiltonian":
        basis = orc.tensor_basis(n)
        H = orc.build_full_hamiltonian(n, drive, basis=basis)
        out = _output(cfg, "oracle_hamiltonian.json")
        out.write_text(json.dumps({"basis": basis.states, "real": H.real.tolist(), "imag": H.imag.tolist()}) + "\n")
    else:
        raise ValidationError(f"mode must be spectrum, quench or hamiltonian, got {mode!r}")
    _write_meta(out, "oracle", cfg)
    return EXIT_OK


def cmd_revival_scan(cfg: dict) -> int:
    drive = _drive(cfg)
    ns = cfg["n_list"] or [50, 100, 150, 200, 250, 300]
    if isinstance(ns, str):
        try:
            ns = [int(x) for x in ns.split(",") if x.strip()]
        except ValueError:
            raise ValidationError(f"cannot parse n list {cfg['n_list']!r}") from None
    if not ns or any(n < 1 for n in ns):
        raise ValidationError("n list must hold positive integers")
    cfg["n_list"] = ns
    family = cfg["initial"] or "all1"
    t_max = float(cfg["t_max"]) if cfg["t_max"] is not None else None
    dt = float(cfg["dt"]) if cfg["dt"] is not None else None
    results = find_revivals(ns, family, drive, t_max=t_max, dt=dt, n_jobs=int(cfg["jobs"]), **_revival_cfg(cfg))
    out = _output(cfg, "revivals.csv")
    write_csv(out, ["n", "t_rev", "strength"],
              [ns, [r.time for r in results], [r.strength for r in results]])
    extra = {}
    found = [(n, r.time) for n, r in zip(ns, results) if r.detected]
    if len(found) >= 3:
        a, b, r2, _ = fit_sqrt_law(*zip(*found))
        extra["fit"] = {"a": a, "b": b, "r2": r2, "model": "t_rev = a sqrt(n) + b"}
    _write_meta(out, "revival-scan", cfg, **extra)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="su3blockade", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("spectrum", help="eigenvalues of every sector with multiplicities")
    _common(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("quench", help="expectation value after a quench from a product state")
    _common(p, grid=True, initial=True)
    p.add_argument("--observable", choices=OBSERVABLES, default=argparse.SUPPRESS)
    p.add_argument("--revival", action="store_true", default=argparse.SUPPRESS,
                   help="also write the first detected revival to OUTPUT.revival.json")
    p.set_defaults(func=cmd_quench)

    p = sub.add_parser("prepare", help="pulse schedule preparing a symmetric state from |0...0>")
    _common(p, drive=False)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--ghz", dest="target", action="store_const", const="ghz", default=argparse.SUPPRESS)
    g.add_argument("--w", dest="target", action="store_const", const="w", default=argparse.SUPPRESS)
    g.add_argument("--target", default=argparse.SUPPRESS,
                   help='JSON file {"amplitudes": [...]}, entry k = amplitude with k atoms in |1>')
    p.set_defaults(func=cmd_prepare)

    p = sub.add_parser("spinmodel", help="large-spin approximations for the symmetric sector")
    _common(p, grid=True)
    p.add_argument("--variant", choices=("pm", "zero"), default=argparse.SUPPRESS)
    p.set_defaults(func=cmd_spinmodel)

    p = sub.add_parser("oracle", help="brute-force reference in the full tensor space (small n)")
    _common(p, grid=True, initial=True)
    p.add_argument("--mode", choices=("spectrum", "quench", "hamiltonian"), default=argparse.SUPPRESS)
    p.add_argument("--observable", choices=OBSERVABLES, default=argparse.SUPPRESS)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("revival-scan", help="first revival time and strength over several n")
    _common(p, grid=True, initial=True)
    p.add_argument("--n-list", default=argparse.SUPPRESS, help="comma-separated atom counts")
    p.add_argument("--jump-factor", type=float, default=argparse.SUPPRESS)
    p.add_argument("--t-exclude", type=float, default=argparse.SUPPRESS)
    p.set_defaults(func=cmd_revival_scan)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    func = args.func
    try:
        return func(_resolve(args))
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except CapacityError as exc:
        print(f"capacity exceeded: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (NumericalError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
