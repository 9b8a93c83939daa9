"""Batch front end: ``entbell {calibrate,fringe,chsh,verify}``.

Angles are degrees here and radians everywhere else.

Output files (in ``--out``, default from the config):

* ``calibration.json`` -- calibrate report
* ``fringe_theta2_<deg>.csv`` -- columns ``angle_deg, counts, fit_curve``
* ``fringe_summary.json`` -- fitted visibilities, replica mean and std
* ``chsh_counts.csv`` -- columns ``correlation, theta1_deg, theta2_deg,
  outcome, actual_theta1_deg, actual_theta2_deg, counts`` (16 rows)
* ``chsh_summary.json`` -- E +/- sigma, S +/- sigma_S, violation significance
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import experiment, optics, stats
from .config import ConfigError, RunConfig, load_config
from .qstate import fidelity
from .tables import write_summary, write_table

log = logging.getLogger("entbell")

FRINGE_COLUMNS = ("angle_deg", "counts", "fit_curve")
CHSH_COLUMNS = ("correlation", "theta1_deg", "theta2_deg", "outcome",
                "actual_theta1_deg", "actual_theta2_deg", "counts")
_OUTCOME_LABELS = ("++", "+-", "-+", "--")


def deg(x):
    return math.degrees(x)


def rad(x):
    return math.radians(x)


def noise_from_config(cfg: RunConfig) -> stats.NoiseModel:
    if cfg.noise_mode == "uniform":
        return stats.NoiseModel.uniform(cfg.visibility_hv)
    return stats.NoiseModel.per_basis(cfg.visibility_hv, cfg.visibility_pm)


def prepared_from_config(cfg: RunConfig) -> experiment.PreparedState:
    return experiment.prepare_state([rad(a) for a in cfg.qwp_angles_deg],
                                    rad(cfg.calibration_phase_deg),
                                    rad(cfg.qwp_retardance_deg))


def chsh_mean_total(cfg: RunConfig, prepared=None) -> float:
    if cfg.chsh_mean_total is not None:
        return float(cfg.chsh_mean_total)
    prepared = prepared_from_config(cfg) if prepared is None else prepared
    settings = tuple(rad(a) for a in cfg.chsh_settings_deg)
    return stats.mean_total_for_sigma(prepared, cfg.chsh_target_sigma_e, settings,
                                      noise_from_config(cfg))


def _outdir(cfg: RunConfig) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


# -- commands ----------------------------------------------------------------

def cmd_calibrate(cfg: RunConfig) -> int:
    retardance = rad(cfg.qwp_retardance_deg)
    report = {"qwp_retardance_deg": cfg.qwp_retardance_deg}
    try:
        cal = experiment.calibrate_preparation(retardance)
    except experiment.CalibrationError as exc:
        report.update(status="failed", error=str(exc))
        _emit_calibration(cfg, report)
        return 1
    prepared = experiment.prepare_state(cal.qwp_angles, cal.calibration_phase, retardance)
    f = fidelity(experiment.target_state(), prepared.state)
    try:
        pair = list(experiment.calibrate_analyzer(prepared))
    except experiment.CalibrationError as exc:
        pair, report["analyzer_error"] = None, str(exc)
    angles = [round(deg(a), 9) for a in cal.qwp_angles]
    report.update(
        qwp_angles_deg=angles,
        calibration_phase_deg=round(deg(cal.calibration_phase), 9),
        fidelity=f,
        preparation_probability=prepared.preparation_probability,
        bob_analyzer_pair=pair,
        matches_config=(angles == list(cfg.qwp_angles_deg)
                        and round(deg(cal.calibration_phase), 9) == cfg.calibration_phase_deg
                        and pair == list(cfg.bob_analyzer_pair)),
    )
    ok = f >= 1 - experiment.FIDELITY_TOL and pair is not None
    report["status"] = "ok" if ok else "failed"
    _emit_calibration(cfg, report)
    return 0 if ok else 1


def _emit_calibration(cfg, report):
    for key in sorted(report):
        print(f"{key}: {report[key]}")
    if "summary" in cfg.formats:
        write_summary(_outdir(cfg) / "calibration.json", report)


def fringe_data(cfg: RunConfig, prepared=None):
    """Per-theta2 scan tables and replica visibility statistics."""
    prepared = prepared_from_config(cfg) if prepared is None else prepared
    noise = noise_from_config(cfg)
    theta1 = [rad(a) for a in cfg.fringe_theta1_deg]
    results = []
    for t2_deg in cfg.fringe_theta2_deg:
        t2 = rad(t2_deg)
        scan = stats.fringe_scan(prepared, t2, theta1, noise, cfg.fringe_mean_total,
                                 cfg.seed, exact=cfg.exact)
        fit = stats.fit_fringe(scan)
        rows = [{"angle_deg": a, "counts": n, "fit_curve": float(fit(t))}
                for a, (t, n) in zip(cfg.fringe_theta1_deg, scan)]
        if cfg.exact:
            vis = [fit.visibility]
        else:
            vis = [stats.fit_visibility(stats.fringe_scan(
                       prepared, t2, theta1, noise, cfg.fringe_mean_total, (cfg.seed, r)))
                   for r in range(cfg.replicas)]
        peak = (-deg(fit.phase) / 2) % 180.0
        results.append({
            "theta2_deg": t2_deg,
            "bob_hwp_deg": t2_deg / 2,
            "model_visibility": noise.visibility(stats.basis_family(t2)),
            "fitted_visibility": fit.visibility,
            "fit_peak_theta1_deg": peak,
            "replica_visibility_mean": float(np.mean(vis)),
            "replica_visibility_std": float(np.std(vis, ddof=1)) if len(vis) > 1 else 0.0,
            "replicas": len(vis),
            "rows": rows,
        })
    return results


def cmd_fringe(cfg: RunConfig) -> int:
    results = fringe_data(cfg)
    out = _outdir(cfg)
    for res in results:
        if "csv" in cfg.formats:
            write_table(out / f"fringe_theta2_{res['theta2_deg']:g}.csv", FRINGE_COLUMNS,
                        res["rows"])
        print(f"theta2={res['theta2_deg']:g} deg: V={res['fitted_visibility']:.4f} "
              f"(replicas {res['replica_visibility_mean']:.4f} "
              f"+/- {res['replica_visibility_std']:.4f}), "
              f"peak at theta1={res['fit_peak_theta1_deg']:.2f} deg")
    if "summary" in cfg.formats:
        write_summary(out / "fringe_summary.json", {
            "seed": cfg.seed, "exact": cfg.exact, "mean_total": cfg.fringe_mean_total,
            "scans": [{k: v for k, v in r.items() if k != "rows"} for r in results]})
    return 0


def chsh_data(cfg: RunConfig, prepared=None):
    prepared = prepared_from_config(cfg) if prepared is None else prepared
    noise = noise_from_config(cfg)
    settings = tuple(rad(a) for a in cfg.chsh_settings_deg)
    mean_total = chsh_mean_total(cfg, prepared)
    counts, result = stats.run_chsh(prepared, noise, mean_total, cfg.seed, settings,
                                    exact=cfg.exact)
    t1, t1t, t2, t2t = cfg.chsh_settings_deg
    pairs_deg = ((t1, t2), (t1t, t2), (t1, t2t), (t1t, t2t))
    rows = []
    for k, ((a, b), c) in enumerate(zip(pairs_deg, counts)):
        for label, n, (sa, sb) in zip(_OUTCOME_LABELS, c.as_tuple(), experiment.SIGN_PAIRS):
            rows.append({"correlation": f"E{k + 1}", "theta1_deg": a, "theta2_deg": b,
                         "outcome": label,
                         "actual_theta1_deg": a if sa == 1 else a + 90.0,
                         "actual_theta2_deg": b if sb == 1 else b + 90.0,
                         "counts": n})
    summary = {
        "seed": cfg.seed, "exact": cfg.exact, "mean_total": mean_total,
        "settings_deg": list(cfg.chsh_settings_deg),
        "noise": {"mode": noise.mode, "visibility_hv": noise.visibility_hv,
                  "visibility_pm": noise.visibility_pm},
        "correlations": [{"name": f"E{k + 1}", "theta1_deg": a, "theta2_deg": b,
                          "e": e.e_value, "sigma": e.sigma}
                         for k, ((a, b), e) in enumerate(zip(pairs_deg, result.correlations))],
        "S": result.s_value, "S_sigma": result.s_sigma,
        "sigmas_of_violation": result.sigmas_of_violation,
        "violates_lhv_bound": result.violates,
        "lhv_bound": stats.LHV_BOUND, "tsirelson_bound": stats.TSIRELSON_BOUND,
    }
    if not cfg.exact and cfg.replicas > 1:
        s_vals = np.array([stats.run_chsh(prepared, noise, mean_total, (cfg.seed, r),
                                          settings)[1].s_value
                           for r in range(cfg.replicas)])
        summary["replicas"] = {"count": cfg.replicas, "S_mean": float(s_vals.mean()),
                               "S_std": float(s_vals.std(ddof=1))}
    return rows, summary, result


def cmd_chsh(cfg: RunConfig) -> int:
    rows, summary, result = chsh_data(cfg)
    out = _outdir(cfg)
    if "csv" in cfg.formats:
        write_table(out / "chsh_counts.csv", CHSH_COLUMNS, rows)
    if "summary" in cfg.formats:
        write_summary(out / "chsh_summary.json", summary)
    for e in summary["correlations"]:
        print(f"{e['name']}({e['theta1_deg']:g}, {e['theta2_deg']:g}) = "
              f"{e['e']:+.4f} +/- {e['sigma']:.4f}")
    print(f"S = {result.s_value:.4f} +/- {result.s_sigma:.4f} "
          f"({result.sigmas_of_violation:.2f} sigma above 2); violation: {result.violates}")
    return 0


def verification_checks(prepared=None):
    """``[(name, passed, value)]`` for the algebraic invariants."""
    prepared = experiment.default_prepared() if prepared is None else prepared
    checks = []
    target = experiment.target_state()
    f_prep = fidelity(target, prepared.state)
    checks.append(("preparation_fidelity", f_prep >= 1 - 1e-9, f_prep))
    f_ghz = fidelity(target, experiment.ghz_circular_state())
    checks.append(("ghz_equivalence", abs(f_ghz - 1) < 1e-12, f_ghz))
    grid = np.linspace(0, np.pi, 9)
    expansion = min(experiment.verify_rotated_expansion(a, b) for a in grid for b in grid)
    checks.append(("rotated_expansion_min_fidelity", expansion >= 1 - 1e-9, expansion))
    law = max(abs(experiment.correlation_exact(prepared, a, b) - math.cos(2 * (a + b)))
              for a in np.linspace(0, np.pi, 9) for b in np.linspace(0, np.pi, 8))
    checks.append(("correlation_law_max_error", law < 1e-9, law))
    pair = experiment.calibrate_analyzer(prepared)
    checks.append(("bob_analyzer_pair", True, list(pair)))
    s_ideal = stats.quantum_chsh(prepared)
    checks.append(("ideal_S", abs(s_ideal - stats.TSIRELSON_BOUND) < 1e-9, s_ideal))
    lhv = stats.lhv_max_chsh()
    checks.append(("lhv_max", lhv == 2.0, lhv))
    grid_max = stats.tsirelson_grid_max(prepared)
    checks.append(("tsirelson_grid_max", grid_max <= stats.TSIRELSON_BOUND + 1e-9, grid_max))
    vc = stats.critical_visibility(prepared)
    checks.append(("critical_visibility", abs(vc - 1 / math.sqrt(2)) < 1e-6, vc))
    return checks


def cmd_verify(cfg: RunConfig) -> int:
    prepared = prepared_from_config(cfg)
    checks = verification_checks(prepared)
    failed = 0
    for name, ok, value in checks:
        shown = f"{value:.6f}" if name == "critical_visibility" else value
        print(f"{'PASS' if ok else 'FAIL'} {name}={shown}")
        failed += not ok
    return 1 if failed else 0


COMMANDS = {
    "calibrate": (cmd_calibrate, "search wave-plate settings and report fidelity"),
    "fringe": (cmd_fringe, "simulate polarizer scans and fit visibilities"),
    "chsh": (cmd_chsh, "simulate the four CHSH settings and compute S"),
    "verify": (cmd_verify, "run the analytic self-checks"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON config overriding defaults")
    common.add_argument("--seed", type=int, help="base random seed")
    common.add_argument("--exact", action="store_true",
                        help="use expected counts instead of Poisson sampling")
    common.add_argument("--out", metavar="DIR", help="output directory")
    common.add_argument("--format", action="append", choices=("csv", "summary"),
                        dest="formats", help="output format (repeatable)")
    common.add_argument("-v", "--verbose", action="store_true")
    parser = argparse.ArgumentParser(prog="entbell", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=text)
    return parser


def config_from_args(args) -> RunConfig:
    cfg = load_config(args.config)
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.exact:
        changes["exact"] = True
    if args.out is not None:
        changes["output_dir"] = args.out
    if args.formats:
        changes["formats"] = tuple(dict.fromkeys(args.formats))
    return cfg.replace(**changes) if changes else cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        return COMMANDS[args.command][0](cfg)
    except (optics.PostSelectionError, stats.EstimationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
