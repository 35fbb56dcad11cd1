"""Command-line front end.

    rydress <subcommand> [--config cfg.json] [--out DIR] [--workers N] [--resume]
    rydress schema

Every run writes its artifacts plus ``manifest.json`` (config echo, code
version, SHA-256 per file) into ``--out``.  Exit status: 0 success,
1 partial failure, 2 invalid configuration, 3 total failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .runner import ResultStore, default_workers, write_csv
from .schema import SCHEMA, SCHEMA_VERSION

EXIT_OK, EXIT_PARTIAL, EXIT_INVALID, EXIT_FAILED = 0, 1, 2, 3
STORE_NAME = ".store.jsonl"
MANIFEST = "manifest.json"


class ConfigError(ValueError):
    def __init__(self, details: list[dict]):
        super().__init__("; ".join(d["message"] for d in details))
        self.details = details


def validate(config: dict) -> dict:
    import jsonschema

    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(config), key=lambda e: list(e.absolute_path))
    if errors:
        raise ConfigError([{"path": "/".join(str(p) for p in e.absolute_path),
                            "message": e.message} for e in errors])
    return config


def _linspace(spec: dict | None, default: dict) -> np.ndarray:
    s = spec or default
    return np.linspace(s["start"], s["stop"], s["num"])


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_manifest(out: Path, config: dict, files: list[str], failures: list,
                   status: str) -> None:
    manifest = {
        "version": __version__,
        "schema_version": SCHEMA_VERSION,
        "config": config,
        "status": status,
        "failures": failures,
        "files": {name: _sha256(out / name) for name in sorted(files)},
    }
    (out / MANIFEST).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def verify_manifest(out) -> bool:
    out = Path(out)
    manifest = json.loads((out / MANIFEST).read_text())
    return all(_sha256(out / name) == digest for name, digest in manifest["files"].items())


def _dump(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, default=_jsonable) + "\n")


def _jsonable(x):
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"not serializable: {type(x)}")


# --- subcommands ---------------------------------------------------------------------

def run_spectrum(cfg, out: Path, ctx) -> tuple[list, list]:
    from .model import EffectiveParams, InteractionSpec
    from .spectrum import entangling_energy, pair_block

    sec = cfg.get("spectrum", {})
    ratios = sec.get("ratios", [0.1, 1.0, 10.0])
    grid = _linspace(sec.get("delta_over_omega"), {"start": -5, "stop": 5, "num": 201})
    branch = sec.get("branch", "-")
    rows_e, rows_p = [], []
    for ratio in ratios:
        v = InteractionSpec(1.0 / ratio)
        for d in grid:
            p = EffectiveParams(1.0, float(d))
            w = np.linalg.eigvalsh(pair_block(p, v))
            res = entangling_energy(p, v, branch)
            rows_e.append({"ratio": float(ratio), "delta_over_omega": float(d),
                           "E0_over_omega": float(w[0]), "E1_over_omega": float(w[1]),
                           "E2_over_omega": float(w[2]), "kappa_over_omega": res.kappa,
                           "degenerate": res.degenerate})
            rows_p.append({"ratio": float(ratio), "delta_over_omega": float(d),
                           "pop_11": res.populations[0], "pop_b": res.populations[1],
                           "pop_rr": res.populations[2]})
    write_csv(out / "spectrum_energies.csv", rows_e,
              ["ratio", "delta_over_omega", "E0_over_omega", "E1_over_omega",
               "E2_over_omega", "kappa_over_omega", "degenerate"])
    write_csv(out / "spectrum_populations.csv", rows_p,
              ["ratio", "delta_over_omega", "pop_11", "pop_b", "pop_rr"])
    files = ["spectrum_energies.csv", "spectrum_populations.csv"]
    if ctx["plots"] and rows_e:
        from . import plotting
        plotting.spectrum(rows_e, rows_p, out / "spectrum.png")
        files.append("spectrum.png")
    return files, []


def _ramp_problem(cfg):
    from .optimize import STRONG_ONE_PHOTON, STRONG_TWO_PHOTON, OptimizationProblem, \
        TwoPhotonSetup

    sec = cfg.get("ramp", {})
    preset = sec.get("preset")
    family = sec.get("family", "two-photon" if preset == "strong-blockade-two-photon"
                     else "one-photon")
    base = STRONG_TWO_PHOTON if family == "two-photon" else STRONG_ONE_PHOTON
    params = {**base, **sec.get("params", {})}
    ratio = sec.get("blockade_ratio", 0.1)
    p = OptimizationProblem(family, blockade_ratio=ratio, gamma_r=sec.get("gamma_r", 0.0),
                            two_photon=TwoPhotonSetup(**sec.get("two_photon", {})),
                            tol=cfg.get("tol", 1e-9), n_samples=cfg.get("n_samples", 801))
    return p, params


def run_ramp(cfg, out: Path, ctx):
    from .dynamics import Drive, Generator, integrated_rydberg_population, propagate
    from .model import basis_vector

    p, params = _ramp_problem(cfg)
    ramp, s = p.build(params)
    drive = Drive.from_ramp(ramp, s)
    gen = Generator(drive, p.interaction)
    files = []
    summary = {"params": params, "family": p.family, "blockade_ratio": p.blockade_ratio}
    for label in ("11", "01"):
        traj = propagate(gen, basis_vector(label), drive.window, p.tol,
                         n_samples=p.n_samples)
        name = f"trajectory_{label}.csv"
        traj.to_csv(out / name)
        files.append(name)
        summary[f"t_r_{label}"] = integrated_rydberg_population(traj)
        summary[f"final_norm_{label}"] = float(traj.norms[-1])
        if label == "11":
            coeffs = np.array([drive.coefficients(float(t))[:2] for t in traj.times])
            if ctx["plots"]:
                from . import plotting
                plotting.trajectory(traj, coeffs[:, 0], coeffs[:, 1], out / "ramp.png")
                files.append("ramp.png")
    summary["t_r_per_2pi"] = summary["t_r_11"] / (2 * math.pi)
    _dump(out / "ramp_summary.json", summary)
    files.append("ramp_summary.json")
    return files, []


def run_gate(cfg, out: Path, ctx):
    from .gate import GateSequence, spin_echo_gate

    p, params = _ramp_problem(cfg)
    ramp, s = p.build(params)
    report = spin_echo_gate(GateSequence(ramp, s), p.interaction, p.tol, p.n_samples)
    report.parameters["family"] = p.family
    report.parameters["blockade_ratio"] = p.blockade_ratio
    (out / "gate_report.json").write_text(report.to_json() + "\n")
    return ["gate_report.json"], []


def run_optimize(cfg, out: Path, ctx):
    from .optimize import OptimizationFailed, OptimizationProblem, TwoPhotonSetup, \
        optimize_ramp

    sec = dict(cfg.get("optimize", {}))
    if "two_photon" in sec:
        sec["two_photon"] = TwoPhotonSetup(**sec["two_photon"])
    if "free" in sec:
        sec["free"] = tuple(sec["free"])
    p = OptimizationProblem(tol=cfg.get("tol", 1e-8), n_samples=cfg.get("n_samples", 401),
                            **sec)
    try:
        res = optimize_ramp(p)
    except OptimizationFailed as exc:
        _write_log(out / "optimization_log.csv", exc.log, p)
        return ["optimization_log.csv"], [{"error": str(exc)}]
    _write_log(out / "optimization_log.csv", res.log, p)
    result = {"params": res.params, "free": list(p.free), "objective": p.objective,
              "evaluations": len(res.log), "report": res.report.to_dict()}
    _dump(out / "optimization.json", result)
    files = ["optimization.json", "optimization_log.csv"]
    if ctx["plots"]:
        from . import plotting
        plotting.convergence([e.value(p) for e in res.log], out / "convergence.png")
        files.append("convergence.png")
    return files, []


def _write_log(path: Path, log, p):
    cols = list(p.free) + ["fidelity", "t_r", "rr_max", "leakage", "margin", "feasible",
                           "value", "error"]
    rows = [{**e.row(), "value": e.value(p)} for e in log]
    write_csv(path, rows, cols)


def run_sweep(cfg, out: Path, ctx):
    from .optimize import LANDSCAPE_COLUMNS, TR_COLUMNS, scan_fidelity_landscape, \
        scan_tr_vs_blockade

    sec = cfg["sweep"] if "sweep" in cfg else {"kind": "t_r"}
    store = ResultStore(out / STORE_NAME)
    tol = cfg.get("tol", 1e-8)
    n_samples = cfg.get("n_samples", 401)
    if sec["kind"] == "landscape":
        kw = {k: sec[k] for k in ("shape", "x_bounds", "budget", "blockade_ratio") if k in sec}
        res = scan_fidelity_landscape(sec.get("gamma_a_ratios", [0.01, 0.1, 1.0]),
                                      sec.get("powers", [1e3, 1e4]), tol=tol,
                                      n_samples=n_samples, workers=ctx["workers"],
                                      store=store, **kw)
        rows, cols, name = res.rows, LANDSCAPE_COLUMNS, "landscape"
    else:
        rows = []
        families = sec.get("families", ["one-photon"])
        ratios = sec.get("ratios", [0.1, 1.0, 10.0, 100.0])
        for f_idx, fam in enumerate(families):
            sub = ResultStore(out / f".store_{fam}.jsonl")
            kw = {k: sec[k] for k in ("budget", "rr_cap", "antiblockade_margin",
                                      "fidelity_target") if k in sec}
            res = scan_tr_vs_blockade(ratios, fam, tol=tol, n_samples=max(n_samples, 801),
                                      workers=ctx["workers"], store=sub, **kw)
            for r in res.rows:
                rows.append({**r, "index": f_idx * len(ratios) + r["index"]})
        cols, name = TR_COLUMNS, "t_r_vs_blockade"
    write_csv(out / f"{name}.csv", rows, cols)
    files = [f"{name}.csv"]
    failures = [{"index": r["index"], "error": r["error"]} for r in rows if r.get("error")]
    if ctx["plots"] and rows:
        from . import plotting
        (plotting.landscape if name == "landscape" else plotting.tr_scan)(rows, out / f"{name}.png")
        files.append(f"{name}.png")
    if rows and len(failures) == len(rows):
        ctx["total_failure"] = True
    return files, failures


def run_forces(cfg, out: Path, ctx):
    from .forces import force_table, write_force_csv

    sec = cfg.get("forces", {})
    grid = _linspace(sec.get("r_over_rb"), {"start": 0.1, "stop": 5.0, "num": 200})
    rows = force_table(grid, sec.get("omega_eff", 1.0), sec.get("delta_eff", 0.0),
                       sec.get("branch", "-")) if grid.size else []
    write_force_csv(out / "forces.csv", rows)
    files = ["forces.csv"]
    if ctx["plots"] and rows:
        from . import plotting
        plotting.forces(rows, out / "forces.png")
        files.append("forces.png")
    return files, []


RUNNERS = {"spectrum": run_spectrum, "ramp": run_ramp, "gate": run_gate,
           "optimize": run_optimize, "sweep": run_sweep, "forces": run_forces}


def run(config: dict, out, workers: int | None = None, resume: bool = False) -> int:
    """Validate ``config``, execute it and write artifacts plus manifest."""
    try:
        validate(config)
    except ConfigError as exc:
        print(json.dumps({"error": "invalid-config", "details": exc.details}), file=sys.stderr)
        return EXIT_INVALID
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    if not resume:
        for stale in out.glob(".store*.jsonl"):
            stale.unlink()
    ctx = {"plots": config.get("plots", True),
           "workers": workers if workers is not None else default_workers(),
           "total_failure": False}
    try:
        files, failures = RUNNERS[config["subcommand"]](config, out, ctx)
    except Exception as exc:
        failures = [{"error": f"{type(exc).__name__}: {exc}"}]
        write_manifest(out, config, [], failures, "failed")
        print(json.dumps({"error": "run-failed", "details": failures}), file=sys.stderr)
        return EXIT_FAILED
    if ctx["total_failure"]:
        status, code = "failed", EXIT_FAILED
    elif failures:
        status, code = "partial", EXIT_PARTIAL
    else:
        status, code = "ok", EXIT_OK
    write_manifest(out, config, files, failures, status)
    return code


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="rydress", description=__doc__.split("\n")[0])
    parser.add_argument("subcommand", choices=sorted(RUNNERS) + ["schema"])
    parser.add_argument("--config", help="JSON run configuration")
    parser.add_argument("--out", default="rydress-out", help="output directory")
    parser.add_argument("--workers", type=int, default=None,
                        help="worker processes (default: $RYDRESS_WORKERS or 1)")
    parser.add_argument("--resume", action="store_true",
                        help="skip grid points already in the output directory's store")
    args = parser.parse_args(argv)
    if args.subcommand == "schema":
        print(json.dumps(SCHEMA, indent=2))
        return EXIT_OK
    config = {}
    if args.config:
        try:
            config = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            print(json.dumps({"error": "invalid-config",
                              "details": [{"path": "", "message": str(exc)}]}),
                  file=sys.stderr)
            return EXIT_INVALID
    config.setdefault("subcommand", args.subcommand)
    if config["subcommand"] != args.subcommand:
        print(json.dumps({"error": "invalid-config", "details": [{
            "path": "subcommand", "message": "config subcommand does not match the CLI"}]}),
            file=sys.stderr)
        return EXIT_INVALID
    return run(config, args.out, args.workers, args.resume)


if __name__ == "__main__":
    sys.exit(main())
