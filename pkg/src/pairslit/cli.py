"""``simulate`` entry point: run one scenario end to end and write its outputs."""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import PRESETS, ConfigError, RunConfig, parse_config
from .detection import (
    CoincidenceReport,
    compare,
    count_arrays,
    is_asymmetric_pair,
    is_mirror_pair,
    singles_profile,
    sqt_joint_probability,
    sqt_joint_probability_closed_form,
    symmetric_line_probability,
)
from .ensembles import EnsembleKind, sample_batch
from .trajectories import IntegratorConfig, integrate_batch

CHUNK = 10_000
BINS_PER_FRINGE = 20
ORACLE_RTOL = 1e-9


@dataclass
class ScenarioResult:
    report: CoincidenceReport
    document: dict
    files: dict[str, Path] = field(default_factory=dict)


def _window_dict(win, L):
    return {
        "label": win.label,
        "x_lo": win.x_lo,
        "width": win.width,
        "x_lo_over_L": win.x_lo / L,
        "width_over_L": win.width / L,
    }


def _jsonable(x):
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def run_scenario(cfg: RunConfig, write: bool = True) -> ScenarioResult:
    geom, p, spec = cfg.geometry, cfg.params, cfg.ensemble
    P, Q = cfg.detector_p, cfg.detector_q
    L = p.fringe_spacing
    integ = IntegratorConfig()

    init = sample_batch(spec, p, y0=geom.launch_y)
    n = len(init)

    out_dir = Path(cfg.output_dir)
    files: dict[str, Path] = {}
    if write:
        out_dir.mkdir(parents=True, exist_ok=True)

    traj_file = None
    if write and cfg.dump_trajectories:
        files["trajectories"] = out_dir / "trajectories.csv"
        traj_file = open(files["trajectories"], "w", newline="")
        traj_file.write("pair_id,t,x1,y1,x2,y2\n")

    x1s = np.empty(n)
    x2s = np.empty(n)
    arrive = np.empty(n)
    drift = 0.0
    crossing = 0
    try:
        for lo in range(0, n, CHUNK):
            hi = min(n, lo + CHUNK)
            res = integrate_batch(init.x1[lo:hi], init.x2[lo:hi], init.t0[lo:hi], p, geom, integ,
                                  record=traj_file is not None)
            x1s[lo:hi] = res.x1
            x2s[lo:hi] = res.x2
            arrive[lo:hi] = res.arrival_time
            drift = max(drift, float(res.drift.max()))
            crossing += int(res.crossed.sum())
            if traj_file is not None:
                for j in range(hi - lo):
                    rows = res.samples[j, : res.n_samples[j]]
                    ids = np.full((rows.shape[0], 1), lo + j, dtype=float)
                    np.savetxt(traj_file, np.hstack([ids, rows]), delimiter=",",
                               fmt=["%d", "%.17g", "%.17g", "%.17g", "%.17g", "%.17g"])
    finally:
        if traj_file is not None:
            traj_file.close()

    counts = count_arrays(x1s, x2s, P, Q)
    p_sqt = sqt_joint_probability(p, P, Q, cfg.normalization_window)
    p_closed = None
    if math.isinf(p.envelope_sigma):
        p_closed = sqt_joint_probability_closed_form(p, P, Q, cfg.normalization_window)
        if abs(p_closed - p_sqt) > ORACLE_RTOL * max(abs(p_closed), 1e-300):
            raise RuntimeError(f"oracle mismatch: quadrature {p_sqt!r} vs closed form {p_closed!r}")

    mirror = is_mirror_pair(P, Q)
    p_line = None
    if spec.kind is EnsembleKind.TIME_SYMMETRIC:
        p_line = symmetric_line_probability(p, P, Q, cfg.sample_half_width)
    if p_line is not None and mirror:
        target, p_ref = "symmetric_line", p_line
    else:
        target, p_ref = "sqt_joint", p_sqt

    p_hat = counts.rate
    cmp = compare(p_hat, n, p_ref)
    report = CoincidenceReport(
        mode=f"{p.statistics.value}/{spec.kind.value}",
        n_pairs=n,
        coincidences=counts.coincidences,
        singles_P=counts.singles_P,
        singles_Q=counts.singles_Q,
        p_dbb=p_hat,
        p_dbb_stderr=cmp.stderr,
        p_sqt=p_sqt,
        p_symmetric_line=p_line,
        comparison_target=target,
        p_reference=p_ref,
        z_score=cmp.z_score,
        verdict=cmp.verdict,
        window_config={"P": _window_dict(P, L), "Q": _window_dict(Q, L),
                       "mirror": mirror, "asymmetric": is_asymmetric_pair(P, Q)},
        normalization_window=cfg.normalization_window,
    )

    order = np.sort(arrive)
    gaps = np.diff(order)
    document = report.to_dict()
    document.update({
        "p_sqt_closed_form": p_closed,
        "fringe_spacing": L,
        "geometry": {
            "lambda": geom.wavelength,
            "slit_separation": geom.slit_separation,
            "slit_width": geom.slit_width,
            "screen_distance": geom.screen_distance,
            "launch_y": geom.launch_y,
            "half_angle": geom.half_angle,
        },
        "wave": {
            "statistics": p.statistics.value,
            "envelope_sigma": _jsonable(p.envelope_sigma),
            "hbar": p.hbar,
            "mass": p.mass,
            "norm_scale": p.norm_scale,
            "kA": [float(v) for v in p.vectors.kA],
            "kB": [float(v) for v in p.vectors.kB],
        },
        "ensemble": {
            "kind": spec.kind.value,
            "n_pairs": spec.n_pairs,
            "seed": spec.seed,
            "launch_spacing": spec.launch_spacing,
            "sample_window_over_L": spec.sample_window,
            "sample_half_width": cfg.sample_half_width,
        },
        "trajectories": {
            "step": integ.step_for(p, geom),
            "max_symmetry_drift": drift,
            "max_symmetry_drift_over_L": drift / L,
            "pairs_crossing_axis": crossing,
            "min_arrival_gap": float(gaps.min()) if gaps.size else None,
        },
    })

    if write:
        files["report"] = out_dir / "report.json"
        files["report"].write_text(json.dumps(document, indent=2, sort_keys=True) + "\n")

        bins = max(1, round(2 * BINS_PER_FRINGE * spec.sample_window))
        edges, hist = singles_profile(np.concatenate([x1s, x2s]), bins, cfg.sample_half_width)
        files["singles"] = out_dir / "singles.csv"
        with open(files["singles"], "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["bin_lo", "bin_hi", "count"])
            for a, b, c in zip(edges[:-1], edges[1:], hist):
                w.writerow([repr(float(a)), repr(float(b)), int(c)])

        if cfg.dump_initials:
            files["initials"] = out_dir / "initials.csv"
            with open(files["initials"], "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["pair_id", "t0", "x1_0", "x2_0"])
                for i in range(n):
                    w.writerow([i, repr(float(init.t0[i])), repr(float(init.x1[i])),
                                repr(float(init.x2[i]))])

    return ScenarioResult(report, document, files)


def format_table(doc: dict) -> str:
    L = doc["fringe_spacing"]
    P, Q = doc["window_config"]["P"], doc["window_config"]["Q"]
    line_rate = doc["p_symmetric_line"]
    rows = [
        ("mode", doc["mode"]),
        ("pairs", f"{doc['n_pairs']}"),
        ("fringe spacing L", f"{L:.6g}"),
        ("detector P / L", f"[{P['x_lo_over_L']:.4g}, {P['x_lo_over_L'] + P['width_over_L']:.4g})"),
        ("detector Q / L", f"[{Q['x_lo_over_L']:.4g}, {Q['x_lo_over_L'] + Q['width_over_L']:.4g})"),
        ("singles P / Q", f"{doc['singles_P']} / {doc['singles_Q']}"),
        ("coincidences", f"{doc['coincidences']}"),
        ("dBB rate", f"{doc['p_dbb']:.6g} +/- {doc['p_dbb_stderr']:.3g}"),
        ("SQT joint rate", f"{doc['p_sqt']:.6g}"),
        ("symmetric-line rate", "-" if line_rate is None else f"{line_rate:.6g}"),
        ("compared against", doc["comparison_target"]),
        ("z", f"{doc['z_score']:.3f}"),
        ("verdict", doc["verdict"]),
        ("max |x1+x2 drift| / L", f"{doc['trajectories']['max_symmetry_drift_over_L']:.3g}"),
        ("pairs crossing x=0", f"{doc['trajectories']['pairs_crossing_axis']}"),
    ]
    width = max(len(k) for k, _ in rows)
    return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows)


class _Parser(argparse.ArgumentParser):
    # usage mistakes are configuration errors (exit 1), not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(
        prog="simulate",
        description="Two-boson double slit: Bohmian coincidence counts vs the Born-rule prediction.",
    )
    ap.add_argument("--config", type=Path, help="flat key = value config file")
    ap.add_argument("--preset", choices=sorted(PRESETS), help="start from a shipped scenario")
    ap.add_argument("--pairs", type=int, help="override n_pairs")
    ap.add_argument("--seed", type=int, help="override seed")
    ap.add_argument("--out", type=Path, default=Path("out"), help="output directory (default: out)")
    ap.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                    help="override any config key; repeatable")
    ap.add_argument("--dump-trajectories", action="store_true")
    ap.add_argument("--dump-initials", action="store_true")
    ap.add_argument("--quiet", action="store_true", help="suppress the summary table")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.config is None and args.preset is None:
            raise ConfigError("config", "give --config FILE and/or --preset NAME")
        source = ""
        if args.config is not None:
            try:
                source = args.config.read_text()
            except OSError as exc:
                raise ConfigError("config", str(exc)) from None
        overrides = {}
        for item in args.set:
            if "=" not in item:
                raise ConfigError("--set", f"expected KEY=VALUE, got {item!r}")
            k, v = item.split("=", 1)
            overrides[k.strip()] = v.strip()
        if args.pairs is not None:
            overrides["n_pairs"] = str(args.pairs)
        if args.seed is not None:
            overrides["seed"] = str(args.seed)
        cfg = parse_config(source, overrides, preset=args.preset, output_dir=args.out,
                           dump_trajectories=args.dump_trajectories,
                           dump_initials=args.dump_initials)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1

    try:
        result = run_scenario(cfg)
    except Exception as exc:  # noqa: BLE001 - any failure past validation is a runtime error
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    if not args.quiet:
        print(format_table(result.document))
        print(f"wrote {', '.join(str(p) for p in result.files.values())}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
