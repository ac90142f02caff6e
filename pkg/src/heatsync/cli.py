"""Command-line entry point: certify / design / simulate / spectrum / sweep.

Scenario configs are JSON with explicit keys; agent indices in files are
1-based.  Exit codes: 0 success (certificate feasible where applicable),
1 domain-level negative outcome (infeasible, uncontrollable, divergence),
2 usage or config parse error.  All emitted files are deterministic:
floats are written as shortest round-trip decimals and JSON keys sorted,
so re-running a command on the same config reproduces outputs byte for byte.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .certify import (
    NetworkConfig,
    certificate_matrix,
    evaluate_certificate,
)
from .errors import Divergence, HeatSyncError, NoConvergence
from .gains import design as design_gains
from .graph import FollowerGraph, build_graph
from .pdesim import (
    SimConfig,
    analytic_open_loop_spectrum,
    fit_decay_rate,
    simulate,
    spectral_abscissa,
    sync_errors,
)
from .scenarios import (
    DEMO_ALPHA,
    DEMO_BETA,
    DEMO_T_END,
    PRESET_NAMES,
    demo_graph,
    preset_gains,
)

FEASIBILITY_MARGIN = 1e-9
DEFAULT_SNAPSHOTS = (0.1, 0.5, 1.0, 2.5)


class ConfigError(Exception):
    """Config file unreadable or malformed (exit code 2)."""


@dataclass
class Scenario:
    net: NetworkConfig
    sim: SimConfig
    preset: str | None
    raw: dict


def _fmt(value: float) -> str:
    """Shortest round-trip decimal for CSV cells."""
    return repr(float(value))


def _graph_from_dict(d: dict) -> FollowerGraph:
    try:
        return build_graph(d["n"], d.get("edges", []), d.get("leader_set", []))
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"bad graph block: {exc}") from exc


def load_scenario(path) -> Scenario:
    """Read and resolve a scenario config file.

    A ``scenario_preset`` pins the demo network, physics, gains, forcing,
    initial profiles and horizon; the ``sim`` block still controls the
    numerics (nx, dt, scheme, output stride).  Without a preset the file
    must carry the graph and physics explicitly.
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")

    sim_block = raw.get("sim", {})
    if not isinstance(sim_block, dict):
        raise ConfigError("'sim' must be a JSON object")
    preset = raw.get("scenario_preset")
    try:
        if preset is not None:
            if preset not in PRESET_NAMES:
                raise ConfigError(
                    f"unknown scenario_preset {preset!r}; expected one of {PRESET_NAMES}"
                )
            k, g = preset_gains(preset)
            graph = demo_graph()
            alpha, beta = DEMO_ALPHA, DEMO_BETA
            source = "paper"
            t_end = DEMO_T_END
            initial = "sectionV"
        else:
            if "graph" not in raw:
                raise ConfigError("config needs a 'graph' block or a scenario_preset")
            graph = _graph_from_dict(raw["graph"])
            alpha = float(raw.get("alpha", 0.0))
            beta = float(raw.get("beta", 1.0))
            k = raw.get("k", 0.0)
            g = raw.get("g", 0.0)
            source = sim_block.get("source", "off")
            t_end = float(sim_block.get("t_end", 2.5))
            initial = sim_block.get("initial_conditions")
            if isinstance(initial, dict):
                initial = (initial["followers"], initial["leader"])
        net = NetworkConfig(graph=graph, alpha=alpha, beta=beta, k=k, g=g)
        sim = SimConfig(
            nx=int(sim_block.get("nx", 101)),
            dt=float(sim_block.get("dt", 1e-3)),
            t_end=t_end,
            source=source,
            scheme=sim_block.get("scheme", "crank_nicolson"),
            output_stride=int(sim_block.get("output_stride", 10)),
            initial_conditions=initial,
            leader_seventh_harmonic=bool(
                sim_block.get("leader_seventh_harmonic", False)
            ),
        )
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad config {path}: {exc}") from exc
    return Scenario(net=net, sim=sim, preset=preset, raw=raw)


def _resolved_params(scn: Scenario, command: str) -> dict:
    net, sim = scn.net, scn.sim
    gains_k = net.k_scalar if net.k_scalar is not None else list(net.k_vector)
    gains_g = net.g_scalar if net.g_scalar is not None else list(net.g_vector)
    return {
        "command": command,
        "version": __version__,
        "preset": scn.preset or "",
        "n": net.n,
        "edges": ";".join(f"{i}-{j}" for (i, j) in net.graph.edges),
        "leader_set": ";".join(str(v) for v in sorted(net.graph.leader_set)),
        "alpha": net.alpha,
        "beta": net.beta,
        "k": gains_k if isinstance(gains_k, float) else json.dumps(gains_k),
        "g": gains_g if isinstance(gains_g, float) else json.dumps(gains_g),
        "nx": sim.nx,
        "dt": sim.dt,
        "t_end": sim.t_end,
        "source": sim.source,
        "scheme": sim.scheme,
        "output_stride": sim.output_stride,
        "feasibility_margin": FEASIBILITY_MARGIN,
    }


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _report_path(config_path, kind: str) -> Path:
    p = Path(config_path)
    return p.with_name(p.stem + f".{kind}.json")


def cmd_certify(args) -> int:
    scn = load_scenario(args.config)
    cert = evaluate_certificate(certificate_matrix(scn.net), FEASIBILITY_MARGIN)
    print(f"certificate size: {2 * scn.net.n} x {2 * scn.net.n}")
    print(f"max eigenvalue:   {_fmt(cert.max_eig)}")
    print(f"feasible:         {'true' if cert.feasible else 'false'}")
    print(f"margin:           {_fmt(cert.margin)}")
    report = _resolved_params(scn, "certify")
    report.update(
        {
            "max_eig": cert.max_eig,
            "feasible": cert.feasible,
            "margin": cert.margin,
        }
    )
    _write_json(_report_path(args.config, "certify"), report)
    return 0 if cert.feasible else 1


def cmd_design(args) -> int:
    scn = load_scenario(args.config)
    if scn.preset is None and ("k" in scn.raw or "g" in scn.raw):
        print("note: k/g in config are ignored; design synthesizes them", file=sys.stderr)
    gd = design_gains(scn.net.graph, scn.net.alpha, scn.net.beta)
    for plan in gd.per_component:
        print(
            f"component {plan.component}: n={plan.n_nodes}, s={plan.leader_count}, "
            f"k window ({_fmt(plan.window.lo)}, {_fmt(plan.window.hi)})"
        )
    print(f"chosen k:         {_fmt(gd.k)}")
    print(f"coupling gain g:  {_fmt(gd.g)}")
    print(f"max eigenvalue:   {_fmt(gd.certificate.max_eig)}")
    print(f"margin:           {_fmt(gd.certificate.margin)}")
    # The report doubles as a scenario config, so it can be fed straight
    # back into `certify`.
    report = {
        "graph": {
            "n": scn.net.n,
            "edges": [list(e) for e in scn.net.graph.edges],
            "leader_set": sorted(scn.net.graph.leader_set),
        },
        "alpha": scn.net.alpha,
        "beta": scn.net.beta,
        "k": gd.k,
        "g": gd.g,
        "command": "design",
        "version": __version__,
        "k_window_lo": gd.k_window.lo,
        "k_window_hi": gd.k_window.hi,
        "max_eig": gd.certificate.max_eig,
        "margin": gd.certificate.margin,
        "components": [
            {
                "nodes": list(p.component),
                "n": p.n_nodes,
                "s": p.leader_count,
                "window_lo": p.window.lo,
                "window_hi": p.window.hi,
            }
            for p in gd.per_component
        ],
    }
    _write_json(_report_path(args.config, "design"), report)
    return 0


def _parse_snapshots(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad snapshot list {text!r}: {exc}") from exc


def cmd_simulate(args) -> int:
    scn = load_scenario(args.config)
    snapshots = (
        _parse_snapshots(args.snapshots)
        if args.snapshots
        else [t for t in DEFAULT_SNAPSHOTS if t <= scn.sim.t_end + 1e-12]
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    traj = simulate(scn.net, scn.sim)
    series = sync_errors(traj)
    n = scn.net.n

    err_path = out_dir / "errors.csv"
    with err_path.open("w") as fh:
        cols = ["t"] + [f"err_agent_{i + 1}" for i in range(n)] + ["err_total", "pairwise_max"]
        fh.write(",".join(cols) + "\n")
        for fi, t in enumerate(series.times):
            row = [_fmt(t)]
            row += [_fmt(series.per_agent_l2[i, fi]) for i in range(n)]
            row += [_fmt(series.total_l2[fi]), _fmt(series.pairwise_max[fi])]
            fh.write(",".join(row) + "\n")

    bdy_path = out_dir / "boundary.csv"
    with bdy_path.open("w") as fh:
        cols = ["t"] + [f"z_{i + 1}" for i in range(n)] + ["z_leader"]
        fh.write(",".join(cols) + "\n")
        for fi, t in enumerate(traj.times):
            row = [_fmt(t)]
            row += [_fmt(traj.z[i, fi, -1]) for i in range(n)]
            row.append(_fmt(traj.z_leader[fi, -1]))
            fh.write(",".join(row) + "\n")

    snap_idx = [int(np.argmin(np.abs(series.times - t))) for t in snapshots]
    avg_path = out_dir / "avg_error.csv"
    with avg_path.open("w") as fh:
        cols = ["x"] + [f"ebar_t_{t:g}" for t in snapshots]
        fh.write(",".join(cols) + "\n")
        for xi, x in enumerate(series.grid):
            row = [_fmt(x)] + [_fmt(series.avg_error_field[fi, xi]) for fi in snap_idx]
            fh.write(",".join(row) + "\n")

    manifest = _resolved_params(scn, "simulate")
    manifest["snapshots"] = ";".join(f"{t:g}" for t in snapshots)
    manifest["snapshot_times_resolved"] = ";".join(
        _fmt(series.times[i]) for i in snap_idx
    )
    manifest["outputs"] = "errors.csv;boundary.csv;avg_error.csv"
    _write_json(out_dir / "manifest.json", manifest)
    print(f"wrote {err_path}, {bdy_path}, {avg_path}")
    return 0


def cmd_spectrum(args) -> int:
    scn = load_scenario(args.config)
    modes = analytic_open_loop_spectrum(scn.net.alpha, scn.net.beta, n_modes=6)
    print("analytic open-loop modes:", ", ".join(_fmt(m) for m in modes))
    absc = spectral_abscissa(scn.net, scn.sim)
    print(f"discrete closed-loop spectral abscissa: {_fmt(absc)}")
    return 0


def _parse_range(text: str, name: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"--{name} must look like lo:hi:n, got {text!r}")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ConfigError(f"bad --{name} range {text!r}: {exc}") from exc
    if count < 2:
        raise ConfigError(f"--{name} needs at least 2 points, got {count}")
    return np.linspace(lo, hi, count)


def cmd_sweep(args) -> int:
    scn = load_scenario(args.config)
    k_values = _parse_range(args.k, "k")
    g_values = _parse_range(args.g, "g")
    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    run_sim = bool(args.simulate)
    cols = ["k", "g", "max_eig_omega", "feasible"] + (["decay_rate"] if run_sim else [])
    successes = 0
    with out_path.open("w") as fh:
        fh.write(",".join(cols) + "\n")
        for k in k_values:
            for g in g_values:
                row = [_fmt(k), _fmt(g)]
                try:
                    cfg = scn.net.with_gains(k=float(k), g=float(g))
                    cert = evaluate_certificate(
                        certificate_matrix(cfg), FEASIBILITY_MARGIN
                    )
                    row += [_fmt(cert.max_eig), "true" if cert.feasible else "false"]
                    if run_sim:
                        traj = simulate(cfg, scn.sim)
                        series = sync_errors(traj)
                        t_end = scn.sim.t_end
                        window = (min(0.5, t_end / 5.0), min(2.0, t_end))
                        row.append(_fmt(fit_decay_rate(series, window)))
                    successes += 1
                except (HeatSyncError, ValueError):
                    # failed cell: keep the gains, blank the metric columns
                    row = row[:2] + [""] * (len(cols) - 2)
                fh.write(",".join(row) + "\n")
    print(f"wrote {out_path} ({len(k_values) * len(g_values)} cells)")
    return 0 if successes > 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heatsync",
        description=(
            "Certify, synthesize and simulate leader synchronization of "
            "coupled one-dimensional heat equations."
        ),
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("certify", help="check the synchronization certificate")
    p.add_argument("config")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("design", help="synthesize boundary and coupling gains")
    p.add_argument("config")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("simulate", help="run the closed loop and write CSVs")
    p.add_argument("config")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--snapshots", help="comma-separated times for avg_error.csv")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("spectrum", help="analytic modes and discrete abscissa")
    p.add_argument("config")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("sweep", help="grid sweep over gains")
    p.add_argument("config")
    p.add_argument("--k", required=True, help="boundary gain range lo:hi:n")
    p.add_argument("--g", required=True, help="coupling gain range lo:hi:n")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--simulate", action="store_true", help="also fit decay rates")
    p.set_defaults(func=cmd_sweep)
    return parser


def _merge_range_flags(argv: list[str]) -> list[str]:
    # argparse treats "-4:0:3" as a flag; fold range values into --k=... form.
    merged = []
    skip = False
    for i, tok in enumerate(argv):
        if skip:
            skip = False
            continue
        if tok in ("--k", "--g") and i + 1 < len(argv):
            merged.append(f"{tok}={argv[i + 1]}")
            skip = True
        else:
            merged.append(tok)
    return merged


def main(argv=None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    try:
        args = parser.parse_args(_merge_range_flags(list(argv)))
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help; pass both through
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Divergence as exc:
        print(f"simulation diverged: {exc}", file=sys.stderr)
        return 1
    except NoConvergence as exc:
        print(f"no convergence: {exc}", file=sys.stderr)
        return 1
    except HeatSyncError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
