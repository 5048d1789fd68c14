"""Command-line harness: experiment orchestration and plot-ready data emission.

    suvlab <subcommand> --config FILE [--set key=value ...] [--seed N]
           [--out DIR] [--format csv|json|both]

Every run writes a manifest.json echoing the fully resolved config, the
seed, timestamps, an inventory (with SHA-256) of every output file, and
the outcome of any statistical gate. Exit codes: 0 all gates passed,
1 a gate failed, 2 configuration error, 3 runtime or numerical error.
Outputs are pure functions of (config, seed, version); rerunning a
manifest's config reproduces the data files byte for byte.
"""
from __future__ import annotations

import argparse
import csv
import datetime
import hashlib
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .bloch import BlochState, to_state_vector
from .config import RunConfig, config_as_dict, parse_config
from .dynamics import (even_theta_grid, evolve_trajectory, flow_field,
                       rabi_evolution, sigma_z_series)
from .ensemble import (EnsembleConfig, born_statistics_test, gj_ratio_sweep,
                       martingale_check, run_ensemble, scaling_sweep, tau_sweep)
from .errors import ConfigError, SuvlabError
from .noise import sample_path
from .wigner import (evolve_wigner, gaussian_wigner, limit_experiment,
                     localization_widths, wigner_mass)

EXIT_OK = 0
EXIT_GATE_FAILED = 1
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


@dataclass
class RunManifest:
    subcommand: str
    seed: int
    version: str
    config: dict
    started_at: str = ""
    finished_at: str = ""
    outputs: list = field(default_factory=list)
    gates: list = field(default_factory=list)

    @property
    def all_gates_passed(self) -> bool:
        return all(g["passed"] for g in self.gates)


def _utcnow() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


def _write_csv(path: Path, header: list[str], rows) -> None:
    # repr(float) is shortest-roundtrip, keeping emitted data bit-faithful
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(v)) if isinstance(v, float) else v
                             for v in row])


def _register(manifest: RunManifest, path: Path) -> None:
    digest = hashlib.sha256(path.read_bytes()).hexdigest()
    manifest.outputs.append({
        "path": path.name, "bytes": path.stat().st_size, "sha256": digest})


def _write_json(manifest: RunManifest, out: Path, name: str, payload: dict) -> None:
    path = out / name
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    _register(manifest, path)


def _maybe_csv(cfg: RunConfig) -> bool:
    return cfg.out_format in ("csv", "both")


def _maybe_json(cfg: RunConfig) -> bool:
    return cfg.out_format in ("json", "both")


def _ensemble_config(cfg: RunConfig) -> EnsembleConfig:
    return EnsembleConfig(m=cfg.m, theta0=cfg.theta0, params=cfg.params,
                          noise=cfg.noise, integrator=cfg.integrator,
                          seed=cfg.seed, record_stride=cfg.record_stride)


def run_trajectory(cfg: RunConfig, out: Path, manifest: RunManifest) -> None:
    it = cfg.integrator
    path = sample_path(cfg.noise, it.dt, it.n_steps, [cfg.seed, 0])
    traj = evolve_trajectory(cfg.theta0, cfg.params, path, it)
    n = traj.times.size
    if _maybe_csv(cfg):
        f = out / "trajectory.csv"
        _write_csv(f, ["t_s", "theta_rad", "xi_per_sqrt_s"],
                   zip(traj.times, traj.thetas, path.values[:n]))
        _register(manifest, f)
    if _maybe_json(cfg):
        _write_json(manifest, out, "trajectory_summary.json", {
            "outcome": traj.outcome,
            "collapse_time_s": traj.collapse_time,
            "final_theta_rad": float(traj.thetas[-1]),
            "steps": int(n - 1)})


def run_ensemble_cmd(cfg: RunConfig, out: Path, manifest: RunManifest) -> None:
    result = run_ensemble(_ensemble_config(cfg))
    test = born_statistics_test(result)
    deviation = martingale_check(result)
    manifest.gates.append({
        "name": "born_rule",
        "expected": test.expected_p0,
        "empirical": test.empirical_p0,
        "threshold": f"|z| < {test.threshold_sigma}",
        "z_score": test.z_score,
        "passed": test.passed})
    m = result.config.m
    stderr = np.sqrt(np.maximum(1.0 - result.mean_sigma_z**2, 0.0) / m)
    if _maybe_csv(cfg):
        f = out / "ensemble_series.csv"
        _write_csv(f, ["t_s", "mean_sigma_z", "stderr"],
                   zip(result.record_times, result.mean_sigma_z, stderr))
        _register(manifest, f)
        f = out / "ensemble_outcomes.csv"
        _write_csv(f, ["outcome", "count"],
                   [("pole0", result.count_pole0), ("pole1", result.count_pole1),
                    ("unresolved", result.count_unresolved)])
        _register(manifest, f)
    if _maybe_json(cfg):
        _write_json(manifest, out, "ensemble_summary.json", {
            "count_pole0": result.count_pole0,
            "count_pole1": result.count_pole1,
            "count_unresolved": result.count_unresolved,
            "empirical_p0": test.empirical_p0,
            "born_test": {
                "expected_p0": test.expected_p0,
                "z_score": test.z_score,
                "pass": test.passed},
            "martingale_max_deviation": deviation,
            "median_collapse_time_s": float(np.nanmedian(result.collapse_times))})


def run_sweep_gj(cfg: RunConfig, out: Path, manifest: RunManifest) -> None:
    rows = gj_ratio_sweep(cfg.ratios, cfg.theta0, _ensemble_config(cfg))
    if _maybe_csv(cfg):
        f = out / "sweep_gj.csv"
        _write_csv(f, ["ratio_g_over_j", "empirical_p0", "count_unresolved"],
                   [(r.ratio, r.empirical_p0, r.count_unresolved) for r in rows])
        _register(manifest, f)
    if _maybe_json(cfg):
        _write_json(manifest, out, "sweep_gj_summary.json", {
            "rows": [{"ratio": r.ratio, "empirical_p0": r.empirical_p0,
                      "count_unresolved": r.count_unresolved} for r in rows]})


def run_sweep_tau(cfg: RunConfig, out: Path, manifest: RunManifest) -> None:
    rows = tau_sweep(cfg.tau_values, cfg.theta0, _ensemble_config(cfg))
    if _maybe_csv(cfg):
        f = out / "sweep_tau.csv"
        _write_csv(f, ["tau_t_s", "empirical_p0", "born_deviation_sigma"],
                   [(r.tau_t, r.empirical_p0, r.deviation_sigma) for r in rows])
        _register(manifest, f)
    if _maybe_json(cfg):
        _write_json(manifest, out, "sweep_tau_summary.json", {
            "rows": [{"tau_t": r.tau_t, "empirical_p0": r.empirical_p0,
                      "born_deviation_sigma": r.deviation_sigma} for r in rows]})


def run_sweep_scaling(cfg: RunConfig, out: Path, manifest: RunManifest) -> None:
    rows, slope = scaling_sweep(cfg.scales, cfg.theta0, _ensemble_config(cfg))
    if _maybe_csv(cfg):
        f = out / "sweep_scaling.csv"
        _write_csv(f, ["rate_scale", "median_collapse_time_s"],
                   [(r.scale, r.median_collapse_time) for r in rows])
        _register(manifest, f)
    if _maybe_json(cfg):
        _write_json(manifest, out, "sweep_scaling_summary.json", {
            "rows": [{"scale": r.scale,
                      "median_collapse_time_s": r.median_collapse_time}
                     for r in rows],
            "log_log_slope": slope})


def run_rabi(cfg: RunConfig, out: Path, manifest: RunManifest) -> None:
    v0 = to_state_vector(BlochState(cfg.theta0 if cfg.theta0 is not None else 0.0))
    states = rabi_evolution(v0, cfg.params.omega_rabi, cfg.integrator.dt,
                            cfg.rabi_t_end)
    z = sigma_z_series(states)
    times = np.arange(states.shape[0]) * cfg.integrator.dt
    norms = np.sqrt(np.abs(states[:, 0])**2 + np.abs(states[:, 1])**2)
    if _maybe_csv(cfg):
        f = out / "rabi.csv"
        _write_csv(f, ["t_s", "sigma_z", "norm"], zip(times, z, norms))
        _register(manifest, f)
    if _maybe_json(cfg):
        _write_json(manifest, out, "rabi_summary.json", {
            "period_s": 2 * math.pi / cfg.params.omega_rabi,
            "max_norm_error": float(np.max(np.abs(norms - 1.0))),
            "steps": int(states.shape[0] - 1)})


def run_flowfield(cfg: RunConfig, out: Path, manifest: RunManifest) -> None:
    from .noise import ConstantField
    xi = cfg.noise.xi if isinstance(cfg.noise, ConstantField) else 0.0
    thetas = even_theta_grid(cfg.flow_n_points)
    table = flow_field(thetas, xi, cfg.params.j_eff, cfg.params.g_eff)
    if _maybe_csv(cfg):
        f = out / "flowfield.csv"
        _write_csv(f, ["theta_rad", "dtheta_dt_rad_per_s"], table)
        _register(manifest, f)
    if _maybe_json(cfg):
        from .dynamics import classify_fixed_points
        report = classify_fixed_points(xi, cfg.params.j_eff, cfg.params.g_eff)
        _write_json(manifest, out, "flowfield_summary.json", {
            "xi": xi,
            "attractive_fixed_points_rad": list(report.attractive),
            "repulsive_fixed_points_rad": list(report.repulsive)})


def run_wigner_cmd(cfg: RunConfig, out: Path, manifest: RunManifest) -> None:
    w = cfg.wigner
    field0 = gaussian_wigner(w.x_mean, w.p_mean, w.sigma_x, w.sigma_p,
                             cfg.grid, hbar=w.hbar)
    from .wigner import cfl_timestep
    dt = w.dt if w.dt is not None else min(
        cfl_timestep(cfg.grid, cfg.crystal, safety=0.72), w.t_end)
    steps = max(1, int(math.ceil(w.t_end / dt)))
    dt = w.t_end / steps
    evolved = evolve_wigner(field0, cfg.crystal, dt, steps, mode=w.mode,
                            renormalize=w.renormalize)
    if _maybe_csv(cfg):
        f = out / "wigner_final.csv"
        g = cfg.grid
        vals = evolved.values
        rows = ((x, p, float(np.real(vals[i, k])), float(np.imag(vals[i, k])))
                for i, x in enumerate(g.x) for k, p in enumerate(g.p))
        _write_csv(f, ["x_m", "p_kg_m_per_s", "re_w", "im_w"], rows)
        _register(manifest, f)
    if _maybe_json(cfg):
        sx0, sp0 = localization_widths(field0)
        sx, sp = localization_widths(evolved)
        _write_json(manifest, out, "wigner_summary.json", {
            "mode": w.mode, "time_s": evolved.time, "steps": steps, "dt_s": dt,
            "mass_initial": _complex_to_json(wigner_mass(field0)),
            "mass_final": _complex_to_json(wigner_mass(evolved)),
            "sigma_x_initial": sx0, "sigma_p_initial": sp0,
            "sigma_x_final": sx, "sigma_p_final": sp})


def run_limits(cfg: RunConfig, out: Path, manifest: RunManifest) -> None:
    w = cfg.wigner
    field0 = gaussian_wigner(w.x_mean, w.p_mean, w.sigma_x, w.sigma_p,
                             cfg.grid, hbar=w.hbar)
    rows = limit_experiment(cfg.limits.order, cfg.limits.eps_sequence,
                            cfg.limits.n_sequence, cfg.crystal, field0,
                            dt=None, t_end=cfg.limits.t_end)
    if _maybe_csv(cfg):
        f = out / "limits.csv"
        _write_csv(f, ["eps", "n_order", "sigma_x_eff_m", "sigma_p_eff_kg_m_per_s",
                       "centroid_x_m", "centroid_p_kg_m_per_s"],
                   [(r.eps, r.n_order, r.sigma_x_eff, r.sigma_p_eff,
                     r.centroid_x, r.centroid_p) for r in rows])
        _register(manifest, f)
    if _maybe_json(cfg):
        _write_json(manifest, out, "limits_summary.json", {
            "order": cfg.limits.order,
            "rows": [{"eps": r.eps, "n_order": r.n_order,
                      "sigma_x_eff": r.sigma_x_eff, "sigma_p_eff": r.sigma_p_eff,
                      "centroid_x": r.centroid_x} for r in rows]})


def _complex_to_json(v):
    if isinstance(v, complex) or np.iscomplexobj(v):
        return {"re": float(np.real(v)), "im": float(np.imag(v))}
    return float(v)


_RUNNERS = {
    "trajectory": run_trajectory,
    "ensemble": run_ensemble_cmd,
    "sweep-gj": run_sweep_gj,
    "sweep-tau": run_sweep_tau,
    "sweep-scaling": run_sweep_scaling,
    "rabi": run_rabi,
    "flowfield": run_flowfield,
    "wigner": run_wigner_cmd,
    "limits": run_limits,
}


def run(cfg: RunConfig) -> tuple[RunManifest, int]:
    """Execute a resolved config; writes outputs plus manifest.json."""
    out = Path(cfg.output_dir) if cfg.output_dir else Path.cwd() / "suvlab_out"
    out.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(subcommand=cfg.subcommand, seed=cfg.seed,
                           version=__version__, config=config_as_dict(cfg),
                           started_at=_utcnow())
    code = EXIT_OK
    try:
        _RUNNERS[cfg.subcommand](cfg, out, manifest)
        if not manifest.all_gates_passed:
            code = EXIT_GATE_FAILED
    except SuvlabError:
        raise
    finally:
        manifest.finished_at = _utcnow()
        payload = {
            "subcommand": manifest.subcommand,
            "seed": manifest.seed,
            "version": manifest.version,
            "started_at": manifest.started_at,
            "finished_at": manifest.finished_at,
            "config": manifest.config,
            "outputs": manifest.outputs,
            "gates": manifest.gates,
            "all_gates_passed": manifest.all_gates_passed,
        }
        (out / "manifest.json").write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return manifest, code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="suvlab",
        description="Collapse-dynamics and phase-space experiments")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in _RUNNERS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="TOML config file")
        p.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="KEY=VALUE", help="override a config key")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--format", choices=["csv", "json", "both"], default=None)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = parse_config(args.config, args.overrides, subcommand=args.subcommand,
                           seed=args.seed, out_dir=args.out, out_format=args.format)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        manifest, code = run(cfg)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except SuvlabError as e:
        print(f"runtime error: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    for gate in manifest.gates:
        status = "PASS" if gate["passed"] else "FAIL"
        print(f"[{status}] {gate['name']}: empirical={gate['empirical']:.6g} "
              f"expected={gate['expected']:.6g} ({gate['threshold']})")
    return code


if __name__ == "__main__":
    sys.exit(main())
