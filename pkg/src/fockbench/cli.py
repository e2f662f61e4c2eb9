"""Command-line driver: run sweeps, analyze fringes, compare runs.

Exit codes: 0 ok, 2 usage error, 3 bad input data, 4 internal invariant
violation.  Output CSVs are bit-deterministic in (bench bytes, flags, seed).
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    CLASSICAL_FIDELITY_BOUND,
    classical_bound_check,
    error_propagation,
    fidelity_from_visibility,
    fit_fringe,
    wrap_phase,
)
from .bench import Bench, BenchError, load, parse_with_diagnostics
from .elements import ElementKind, delay_line
from .errors import FockbenchError, GridMismatch
from .noise import NoiseModel, calibrate_sigma
from .protocol import (
    PAIR_NAMES,
    FringeData,
    RunConfig,
    RunMode,
    default_phi_grid,
    run_sweep,
    run_trial,
)
from .timing import TimingModel

_BLOCKS = " ▁▂▃▄▅▆▇█"


def sparkline(values) -> str:
    vals = np.asarray(values, dtype=float)
    top = vals.max() if vals.size else 0.0
    if top <= 0:
        return " " * len(vals)
    idx = np.minimum((vals / top * (len(_BLOCKS) - 1)).astype(int), len(_BLOCKS) - 1)
    return "".join(_BLOCKS[i] for i in idx)


def _with_delay(bench: Bench, delay_m: float) -> Bench:
    pipeline = tuple(
        delay_line(e.paths[0], delay_m) if e.kind is ElementKind.DELAY_LINE else e
        for e in bench.pipeline
    )
    return Bench(bench.path_names, bench.sources, pipeline, dict(bench.detectors),
                 dict(bench.source_lines))


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=["passive", "active", "active-inhibited"],
                   default="passive")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--phi-steps", type=int, default=25)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--qe", type=float, default=1.0)
    p.add_argument("--dephasing-sigma", type=float, default=0.0)
    p.add_argument("--dark-prob", type=float, default=0.0)
    p.add_argument("--risetime-ns", type=float, default=22.0)
    p.add_argument("--jitter-ns", type=float, default=0.0)
    p.add_argument("--ns-per-m", type=float, default=3.0)
    p.add_argument("--delay-m", type=float, default=None,
                   help="override the bench delay-line length")
    p.add_argument("--input-theta", type=float, default=None,
                   help="qubit-preparation splitter angle (radians)")
    p.add_argument("--bench", default=None, help="bench file (default: builtin)")
    p.add_argument("--workers", type=int, default=1)


_MANIFEST_KEYS = (
    "bench", "dark_prob", "delay_m", "dephasing_sigma", "input_theta",
    "jitter_ns", "mode", "ns_per_m", "phi_steps", "qe", "risetime_ns",
    "seed", "trials", "workers",
)


def _manifest_text(args: argparse.Namespace) -> str:
    lines = [f"fockbench_version={__version__}"]
    for key in _MANIFEST_KEYS:
        val = getattr(args, key)
        if key == "bench" and val not in (None, "builtin"):
            val = str(Path(val).resolve())  # reruns must work from any cwd
        lines.append(f"{key}={'' if val is None else val}")
    return "\n".join(lines) + "\n"


def _load_manifest(path: str, args: argparse.Namespace) -> None:
    text = Path(path).read_text(encoding="utf-8")
    casts = {
        "trials": int, "phi_steps": int, "seed": int, "workers": int,
        "qe": float, "dephasing_sigma": float, "dark_prob": float,
        "risetime_ns": float, "jitter_ns": float, "ns_per_m": float,
        "delay_m": float, "input_theta": float,
    }
    for line in text.splitlines():
        if not line.strip() or "=" not in line:
            continue
        key, _, val = line.partition("=")
        if key == "fockbench_version" or key not in _MANIFEST_KEYS:
            continue
        if val == "":
            setattr(args, key, None)
        elif key in casts:
            setattr(args, key, casts[key](val))
        else:
            setattr(args, key, val)


def _build_run(args: argparse.Namespace) -> tuple[Bench, RunConfig]:
    bench = load(args.bench)
    if args.delay_m is not None:
        bench = _with_delay(bench, args.delay_m)
    cfg = RunConfig(
        mode=RunMode.parse(args.mode),
        trials_per_phi=args.trials,
        phi_grid=default_phi_grid(args.phi_steps),
        input_theta=args.input_theta,
        noise=NoiseModel(qe=args.qe, dephasing_sigma=args.dephasing_sigma,
                         dark_count_prob=args.dark_prob),
        timing=TimingModel(risetime_ns=args.risetime_ns,
                           delay_ns_per_m=args.ns_per_m,
                           jitter_sigma_ns=args.jitter_ns),
    )
    return bench, cfg


def cmd_run(args: argparse.Namespace) -> int:
    if args.manifest:
        _load_manifest(args.manifest, args)
    bench, cfg = _build_run(args)
    data = run_sweep(bench, cfg, seed=args.seed, workers=args.workers)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "fringe.csv").write_text(data.to_csv(), encoding="utf-8")
    (out / "manifest.txt").write_text(_manifest_text(args), encoding="utf-8")
    if args.log_events:
        rng = np.random.Generator(np.random.PCG64(
            np.random.SeedSequence(args.seed).spawn(len(cfg.phi_grid) + 1)[-1]))
        record = run_trial(bench, cfg.phi_grid[0], cfg, rng)
        (out / "events.csv").write_text(record.log.to_csv(), encoding="utf-8")

    print(f"wrote {out / 'fringe.csv'} ({len(cfg.phi_grid)} phase points, "
          f"{cfg.trials_per_phi} trials each, mode={cfg.mode.value})")
    for pair in PAIR_NAMES:
        print(f"  {pair:7s} {sparkline(data.counts[pair])}")
    return 0


def _fit_pair(data: FringeData, pair: str):
    if pair not in data.counts:
        raise GridMismatch(f"pair {pair!r} not in data; have {sorted(data.counts)}")
    return fit_fringe(np.array(data.phi_grid), data.counts[pair])


def cmd_analyze(args: argparse.Namespace) -> int:
    data = FringeData.from_csv(Path(args.fringe_csv).read_text(encoding="utf-8"))
    print(f"# {args.fringe_csv}: {len(data.phi_grid)} phase points, "
          f"{int(data.trials_total.sum())} trials")
    for pair in PAIR_NAMES:
        fit = _fit_pair(data, pair)
        f = fidelity_from_visibility(fit.visibility)
        sf = error_propagation(fit)
        beats = classical_bound_check(f)
        print(f"{pair}: V={fit.visibility:.4f}+-{fit.sigma_visibility:.4f} "
              f"phi0={fit.phi0:+.4f} F={f:.4f}+-{sf:.4f} "
              f"{'beats' if beats else 'below'} classical {CLASSICAL_FIDELITY_BOUND:.4f}")
        key = pair.replace("*", "s")
        print(f"{key}.visibility={fit.visibility:.6f}")
        print(f"{key}.sigma_visibility={fit.sigma_visibility:.6f}")
        print(f"{key}.phi0={fit.phi0:.6f}")
        print(f"{key}.fidelity={f:.6f}")
        print(f"{key}.sigma_fidelity={sf:.6f}")
        print(f"{key}.beats_classical_bound={str(beats).lower()}")
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    data_a = FringeData.from_csv(Path(args.run_a).read_text(encoding="utf-8"))
    data_b = FringeData.from_csv(Path(args.run_b).read_text(encoding="utf-8"))
    if data_a.phi_grid != data_b.phi_grid:
        raise GridMismatch("phase grids differ between the two runs")
    fit_a = _fit_pair(data_a, args.pair_a)
    fit_b = _fit_pair(data_b, args.pair_b)
    dphi = wrap_phase(fit_a.phi0 - fit_b.phi0)
    dv = fit_a.visibility - fit_b.visibility
    sigma_dphi = math.hypot(fit_a.sigma_phi0, fit_b.sigma_phi0)
    sigma_dv = math.hypot(fit_a.sigma_visibility, fit_b.sigma_visibility)
    pi_offset = abs(abs(dphi) - math.pi) < args.pi_tol
    print(f"A: {args.run_a} [{args.pair_a}] phi0={fit_a.phi0:+.4f} V={fit_a.visibility:.4f}")
    print(f"B: {args.run_b} [{args.pair_b}] phi0={fit_b.phi0:+.4f} V={fit_b.visibility:.4f}")
    print(f"delta_phi0={dphi:.6f}")
    print(f"sigma_delta_phi0={sigma_dphi:.6f}")
    print(f"delta_visibility={dv:.6f}")
    print(f"sigma_delta_visibility={sigma_dv:.6f}")
    print(f"pi_offset={str(pi_offset).lower()}")
    return 0


def cmd_validate_bench(args: argparse.Namespace) -> int:
    try:
        text = Path(args.bench_file).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read {args.bench_file}: {exc}", file=sys.stderr)
        return 3
    bench, diags = parse_with_diagnostics(text)
    for d in diags:
        print(str(d))
    errors = [d for d in diags if d.severity == "error"]
    if errors:
        return 3
    print(f"ok: {len(bench.path_names)} paths, {len(bench.pipeline)} elements, "
          f"{len(bench.detectors)} detectors")
    return 0


def cmd_reproduce_paper(args: argparse.Namespace) -> int:
    """Three sweeps mirroring the bench's headline figure and fidelities."""
    bench = load(args.bench)
    sigma_passive = (calibrate_sigma(1.0, args.passive_visibility)
                     if args.passive_sigma is None else args.passive_sigma)
    sigma_added = (calibrate_sigma(args.passive_visibility, args.active_visibility)
                   if args.dephasing_sigma is None else args.dephasing_sigma)
    sigma_total = math.hypot(sigma_passive, sigma_added)

    def cfg(mode: RunMode, sigma: float) -> RunConfig:
        return RunConfig(mode=mode, trials_per_phi=args.trials,
                         phi_grid=default_phi_grid(args.phi_steps),
                         noise=NoiseModel(dephasing_sigma=sigma),
                         timing=TimingModel())

    runs = {
        "passive": run_sweep(bench, cfg(RunMode.PASSIVE, sigma_passive),
                             seed=args.seed, workers=args.workers),
        "inhibited": run_sweep(bench, cfg(RunMode.ACTIVE_INHIBITED, sigma_total),
                               seed=args.seed + 1, workers=args.workers),
        "active": run_sweep(bench, cfg(RunMode.ACTIVE, sigma_total),
                            seed=args.seed + 2, workers=args.workers),
    }
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for name, data in runs.items():
            (out / f"{name}.csv").write_text(data.to_csv(), encoding="utf-8")

    # passive exact teleportation shows on (D1, D2*); the D2-triggered state
    # shows on (D2, D2*): sigma_z-flipped when inhibited, restored when active
    fit_passive = _fit_pair(runs["passive"], "D1-D2*")
    fit_inhib = _fit_pair(runs["inhibited"], "D2-D2*")
    fit_active = _fit_pair(runs["active"], "D2-D2*")

    print(f"dephasing: passive sigma={sigma_passive:.4f} rad, "
          f"delay-line adds {sigma_added:.4f} rad (total {sigma_total:.4f})")
    print()
    print("fringe (coincidences vs phase), upper=exact teleportation:")
    print(f"  passive   D1-D2* {sparkline(runs['passive'].counts['D1-D2*'])}")
    print(f"  inhibited D2-D2* {sparkline(runs['inhibited'].counts['D2-D2*'])}")
    print(f"  active    D2-D2* {sparkline(runs['active'].counts['D2-D2*'])}")
    print()
    rows = [
        ("passive", fit_passive),
        ("inhibited", fit_inhib),
        ("active", fit_active),
    ]
    for name, fit in rows:
        f = fidelity_from_visibility(fit.visibility)
        sf = error_propagation(fit)
        verdict = "beats" if classical_bound_check(f) else "below"
        print(f"{name:9s} V={fit.visibility:.4f}+-{fit.sigma_visibility:.4f} "
              f"phi0={fit.phi0:+.4f} F={f:.4f}+-{sf:.4f} ({verdict} 2/3 bound)")
    dphi_active = wrap_phase(fit_active.phi0 - fit_passive.phi0)
    dphi_inhib = wrap_phase(fit_inhib.phi0 - fit_passive.phi0)
    print()
    print(f"active vs passive    delta_phi0={dphi_active:+.4f} (correction restores the fringe)")
    print(f"inhibited vs passive delta_phi0={dphi_inhib:+.4f} (sigma_z flip, expect +-pi)")
    print(f"F_passive={fidelity_from_visibility(fit_passive.visibility):.6f}")
    print(f"F_active={fidelity_from_visibility(fit_active.visibility):.6f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fockbench",
        description="vacuum/one-photon qubit teleportation bench simulator",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="Monte Carlo phase sweep -> fringe CSV")
    _add_run_flags(p_run)
    p_run.add_argument("--out", default="out")
    p_run.add_argument("--manifest", default=None,
                       help="re-run the configuration stored in a manifest")
    p_run.add_argument("--log-events", action="store_true",
                       help="also write one trial's feed-forward event log")
    p_run.set_defaults(func=cmd_run)

    p_an = sub.add_parser("analyze", help="fit fringes, report V/F per pair")
    p_an.add_argument("fringe_csv")
    p_an.set_defaults(func=cmd_analyze)

    p_cmp = sub.add_parser("compare", help="phase offset between two runs")
    p_cmp.add_argument("run_a")
    p_cmp.add_argument("run_b")
    p_cmp.add_argument("--pair-a", default="D1-D2*", choices=PAIR_NAMES)
    p_cmp.add_argument("--pair-b", default="D1-D2*", choices=PAIR_NAMES)
    p_cmp.add_argument("--pi-tol", type=float, default=0.1)
    p_cmp.set_defaults(func=cmd_compare)

    p_val = sub.add_parser("validate-bench", help="parse and check a bench file")
    p_val.add_argument("bench_file")
    p_val.set_defaults(func=cmd_validate_bench)

    p_rep = sub.add_parser("reproduce-paper",
                           help="passive/inhibited/active comparison and fidelities")
    p_rep.add_argument("--trials", type=int, default=20000)
    p_rep.add_argument("--phi-steps", type=int, default=25)
    p_rep.add_argument("--seed", type=int, default=0)
    p_rep.add_argument("--workers", type=int, default=1)
    p_rep.add_argument("--bench", default=None)
    p_rep.add_argument("--out", default=None)
    p_rep.add_argument("--passive-visibility", type=float, default=0.906)
    p_rep.add_argument("--active-visibility", type=float, default=0.80)
    p_rep.add_argument("--passive-sigma", type=float, default=None,
                       help="override the calibrated passive dephasing")
    p_rep.add_argument("--dephasing-sigma", type=float, default=None,
                       help="override the calibrated delay-line dephasing")
    p_rep.set_defaults(func=cmd_reproduce_paper)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BenchError as exc:
        for d in exc.diagnostics:
            print(str(d), file=sys.stderr)
        return 3
    except (OSError, GridMismatch) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except FockbenchError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
