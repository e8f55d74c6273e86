"""Command-line front end.

Every subcommand writes a ``run.json`` provenance record into the output
directory: the full parameter set (including derived values such as an
auto-selected delay) plus a sha256 checksum of every artifact.  Runs are
deterministic: identical arguments and seeds produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .embed import (
    DegenerateSeriesError,
    ami_curve,
    bbox_diameter,
    delay_embed,
    epsilon_from_xi,
    first_minimum,
    load_cloud,
    save_cloud,
)
from .landmarks import load_landmarks, save_landmarks, select_evenly_spaced, select_maxmin
from .mscan import (
    dm_filtration,
    lifespan_matrix,
    save_dimension_barcode_csv,
    save_existence_csv,
    save_lifespan_csv,
    sweep,
)
from .persistence import (
    ContractViolationError,
    betti_grid,
    persistent_homology,
    representative_cycles,
    save_barcode,
)
from .render import render_barcode, render_heatmap, render_skeleton
from .signal import (
    IntegrationError,
    OdeParams,
    SeriesFormatError,
    add_uniform_noise,
    integrate_lorenz,
    load_series,
    observe,
    save_series,
    save_trajectory,
)
from .witness import (
    ResourceLimitError,
    distance_matrix,
    edge_births,
    flag_expand,
    load_filtration,
    save_filtration,
    skeleton_export,
)

_USER_ERRORS = (
    ValueError,
    OSError,
    IntegrationError,
    SeriesFormatError,
    DegenerateSeriesError,
    ContractViolationError,
    ResourceLimitError,
)


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _out_path(args, name) -> Path:
    p = Path(name)
    if not p.is_absolute():
        p = Path(args.out_dir) / p
    p.parent.mkdir(parents=True, exist_ok=True)
    return p


def _write_run(args, params: dict, artifacts: list[Path]) -> None:
    record = {
        "subcommand": args.command,
        "version": __version__,
        "seed": args.seed,
        "threads": args.threads,
        "params": params,
        "artifacts": [
            {"path": str(p), "sha256": _sha256(p), "bytes": p.stat().st_size}
            for p in sorted(artifacts)
        ],
    }
    run_path = Path(args.out_dir) / "run.json"
    run_path.parent.mkdir(parents=True, exist_ok=True)
    with open(run_path, "w", encoding="utf-8") as fh:
        json.dump(record, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _parse_floats(text: str, n: int, what: str) -> tuple:
    parts = text.split(",")
    if len(parts) != n:
        raise ValueError(f"{what} must have {n} comma-separated values, got {text!r}")
    return tuple(float(p) for p in parts)


def _load_series_arg(args) -> "ScalarSeries":
    return load_series(args.input, format=args.format, sample_interval=args.sample_interval)


def _resolve_tau(args, series) -> tuple[int, dict]:
    """Parse --tau; 'auto' selects the first minimum of the AMI curve."""
    if args.tau != "auto":
        tau = int(args.tau)
        if tau < 1:
            raise ValueError("--tau must be at least 1")
        return tau, {"tau_steps": tau, "tau_source": "explicit"}
    curve = ami_curve(series, tau_max=args.tau_max, bins=args.bins)
    tau = first_minimum(curve)
    if tau is None:
        raise ValueError(f"no mutual-information minimum found for tau in [1, {args.tau_max - 1}]")
    return tau, {"tau_steps": tau, "tau_source": "ami_first_minimum", "tau_max": args.tau_max, "bins": curve.bins}


def cmd_generate(args) -> int:
    params = OdeParams(r=args.r, b=args.b, sigma=args.sigma)
    ic = _parse_floats(args.ic, 3, "--ic")
    traj = integrate_lorenz(
        params=params, ic=ic, dt=args.dt, n_steps=args.steps, transient_steps=args.transient
    )
    series = observe(traj, args.observe)
    out = _out_path(args, args.out)
    save_series(series, out)
    artifacts = [out]
    if args.traj_out:
        traj_out = _out_path(args, args.traj_out)
        save_trajectory(traj, traj_out)
        artifacts.append(traj_out)
    _write_run(
        args,
        {
            "system": args.system,
            "r": args.r,
            "b": args.b,
            "sigma": args.sigma,
            "dt": args.dt,
            "steps": args.steps,
            "transient": args.transient,
            "ic": list(ic),
            "observe": args.observe,
        },
        artifacts,
    )
    return 0


def cmd_noise(args) -> int:
    series = _load_series_arg(args)
    noisy = add_uniform_noise(series, args.nu, args.seed)
    out = _out_path(args, args.out)
    save_series(noisy, out)
    _write_run(args, {"nu": args.nu, "input": args.input}, [out])
    return 0


def cmd_ami(args) -> int:
    series = _load_series_arg(args)
    curve = ami_curve(series, tau_max=args.tau_max, bins=args.bins)
    out = _out_path(args, args.out)
    with open(out, "w", encoding="utf-8") as fh:
        fh.write("tau,ami_bits\n")
        for tau, v in enumerate(curve.values):
            fh.write(f"{tau},{v!r}\n")
    tau_min = first_minimum(curve)
    _write_run(
        args,
        {
            "input": args.input,
            "tau_max": args.tau_max,
            "bins": curve.bins,
            "first_minimum": tau_min,
        },
        [out],
    )
    return 0


def cmd_embed(args) -> int:
    series = _load_series_arg(args)
    tau, tau_params = _resolve_tau(args, series)
    m_anchor = args.m_anchor if args.m_anchor is not None else args.m
    cloud = delay_embed(series, args.m, tau, m_anchor=m_anchor)
    out = _out_path(args, args.out)
    save_cloud(cloud, out)
    _write_run(
        args,
        {"input": args.input, "m": args.m, "m_anchor": m_anchor, **tau_params},
        [out],
    )
    return 0


def cmd_landmarks(args) -> int:
    cloud = load_cloud(args.input)
    if args.every is not None:
        lms = select_evenly_spaced(cloud, args.every)
        params = {"input": args.input, "method": "evenly_spaced", "every": args.every}
    else:
        lms = select_maxmin(cloud, args.maxmin, args.seed)
        params = {"input": args.input, "method": "maxmin", "ell": args.maxmin}
    out = _out_path(args, args.out)
    save_landmarks(lms, out)
    _write_run(args, {**params, "ell_selected": lms.ell}, [out])
    return 0


def cmd_complex(args) -> int:
    cloud = load_cloud(args.witnesses)
    lms = load_landmarks(args.landmarks)
    if args.xi is not None:
        scale = epsilon_from_xi(args.xi, cloud)
        eps = scale.epsilon
        scale_params = {"xi": args.xi, "epsilon": eps, "diameter": scale.diameter}
    else:
        eps = args.epsilon
        scale_params = {"epsilon": eps, "diameter": bbox_diameter(cloud)}
    dm = distance_matrix(cloud, lms)
    ef = edge_births(dm)
    del dm
    ff = flag_expand(ef, dim_cap=args.dim_cap, max_value=eps, max_simplices=args.max_simplices)
    out = _out_path(args, args.out)
    save_filtration(ff, out)
    artifacts = [out]
    if args.edges_out:
        edges_out = _out_path(args, args.edges_out)
        skeleton_export(ff, eps, lms, edges_out)
        artifacts.append(edges_out)
    _write_run(
        args,
        {
            "witnesses": args.witnesses,
            "landmarks": args.landmarks,
            "dim_cap": args.dim_cap,
            "max_simplices": args.max_simplices,
            "simplex_count": len(ff),
            **scale_params,
        },
        artifacts,
    )
    return 0


def cmd_barcode(args) -> int:
    ff = load_filtration(args.filtration)
    bc = persistent_homology(ff)
    out = _out_path(args, args.out)
    save_barcode(bc, out)
    artifacts = [out]
    params = {"filtration": args.filtration, "intervals": len(bc.intervals)}
    if args.eps_grid:
        lo, hi, count = _parse_floats(args.eps_grid, 3, "--eps-grid")
        grid_out = _out_path(args, args.grid_out or (Path(args.out).stem + "_grid.csv"))
        grid = np.linspace(lo, hi, int(count))
        with open(grid_out, "w", encoding="utf-8") as fh:
            fh.write("epsilon," + ",".join(f"beta{k}" for k in range(bc.dim_cap)) + "\n")
            for eps, betti in betti_grid(bc, grid):
                fh.write(f"{eps!r}," + ",".join(str(b) for b in betti) + "\n")
        artifacts.append(grid_out)
        params["eps_grid"] = [lo, hi, int(count)]
    if args.cycles_out:
        cycles_out = _out_path(args, args.cycles_out)
        reps = representative_cycles(bc, args.cycles_k, args.cycles_top)
        with open(cycles_out, "w", encoding="utf-8") as fh:
            fh.write("cycle,k,birth,death,simplex\n")
            for ci, (iv, simplices) in enumerate(reps):
                death = "inf" if iv.death == float("inf") else repr(iv.death)
                for verts in simplices:
                    label = "-".join(str(v) for v in verts)
                    fh.write(f"{ci},{iv.k},{iv.birth!r},{death},{label}\n")
        artifacts.append(cycles_out)
        params["cycles_k"] = args.cycles_k
        params["cycles_top"] = args.cycles_top
    _write_run(args, params, artifacts)
    return 0


def cmd_mscan(args) -> int:
    series = _load_series_arg(args)
    tau, tau_params = _resolve_tau(args, series)
    sw = sweep(series, tau, args.xi, args.every, args.m_max)
    matrix = lifespan_matrix(sw)

    lifespan_out = _out_path(args, "lifespan.csv")
    save_lifespan_csv(matrix, lifespan_out)
    existence_out = _out_path(args, "existence.csv")
    save_existence_csv(sw, existence_out)
    dimbar_out = _out_path(args, f"dimension_barcode_{args.barcode_landmark}.csv")
    save_dimension_barcode_csv(sw, args.barcode_landmark, dimbar_out)
    dmf = dm_filtration(sw, dim_cap=args.dim_cap)
    dm_out = _out_path(args, "dm_barcode.csv")
    save_barcode(dmf.barcode, dm_out)

    _write_run(
        args,
        {
            "input": args.input,
            "xi": args.xi,
            "every": args.every,
            "m_max": args.m_max,
            "dim_cap": args.dim_cap,
            "barcode_landmark": args.barcode_landmark,
            "ell": sw.ell,
            "diameters": sw.diameters,
            "epsilons": sw.epsilons,
            **tau_params,
        },
        [lifespan_out, existence_out, dimbar_out, dm_out],
    )
    return 0


def cmd_render(args) -> int:
    out = _out_path(args, args.out)
    if args.kind == "barcode":
        svg = render_barcode(args.input)
        params = {"kind": args.kind, "input": args.input}
    elif args.kind == "heatmap":
        svg = render_heatmap(args.input)
        params = {"kind": args.kind, "input": args.input}
    else:
        view = _parse_floats(args.view, 2, "--view") if args.view else None
        svg = render_skeleton(args.edges, args.landmarks, view=view)
        params = {
            "kind": args.kind,
            "edges": args.edges,
            "landmarks": args.landmarks,
            "view": list(view) if view else None,
        }
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(svg)
    _write_run(args, params, [out])
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for any randomized step")
    common.add_argument("--out-dir", default=".", help="directory for outputs and run.json")
    common.add_argument(
        "--threads", type=int, default=0,
        help="0 = auto; accepted for interface stability, results never depend on it",
    )

    series_input = argparse.ArgumentParser(add_help=False)
    series_input.add_argument("--in", dest="input", required=True, help="input series file")
    series_input.add_argument("--format", choices=["native", "csv"], default="native")
    series_input.add_argument(
        "--sample-interval", type=float, default=None, help="sampling interval for --format csv"
    )

    parser = argparse.ArgumentParser(
        prog="topo-recon",
        description="Topology of delay reconstructions: witness complexes and persistence.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", parents=[common], help="integrate a system and observe a scalar")
    p.add_argument("system", choices=["lorenz"])
    p.add_argument("--r", type=float, default=28.0)
    p.add_argument("--b", type=float, default=8.0 / 3.0)
    p.add_argument("--sigma", type=float, default=10.0)
    p.add_argument("--dt", type=float, default=0.001)
    p.add_argument("--steps", type=int, default=100_000)
    p.add_argument("--transient", type=int, default=10_000)
    p.add_argument("--ic", default="1,1,1", help="initial condition x,y,z")
    p.add_argument("--observe", default="x", help="coordinate to record (x, y, z, or an index)")
    p.add_argument("--out", required=True, help="series output path")
    p.add_argument("--traj-out", default=None, help="optional full-trajectory CSV output")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("noise", parents=[common, series_input], help="add seeded uniform noise")
    p.add_argument("--nu", type=float, required=True, help="full width of the uniform noise")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_noise)

    p = sub.add_parser("ami", parents=[common, series_input], help="average mutual information curve")
    p.add_argument("--tau-max", type=int, required=True)
    p.add_argument("--bins", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ami)

    p = sub.add_parser("embed", parents=[common, series_input], help="delay-coordinate embedding")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--tau", default="auto", help="delay in samples, or 'auto' for the AMI minimum")
    p.add_argument("--tau-max", type=int, default=400, help="AMI search bound for --tau auto")
    p.add_argument("--bins", type=int, default=None, help="AMI histogram bins for --tau auto")
    p.add_argument("--m-anchor", type=int, default=None, help="anchor dimension (defaults to m)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("landmarks", parents=[common], help="select landmarks from a cloud")
    p.add_argument("--in", dest="input", required=True, help="input cloud CSV")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--every", type=int, default=None, help="equal-time stride")
    group.add_argument("--maxmin", type=int, default=None, help="greedy max-min count")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_landmarks)

    p = sub.add_parser("complex", parents=[common], help="fuzzy witness flag filtration")
    p.add_argument("--witnesses", required=True, help="witness cloud CSV")
    p.add_argument("--landmarks", required=True, help="landmark CSV")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--xi", type=float, default=None, help="scale as a fraction of cloud diameter")
    group.add_argument("--epsilon", type=float, default=None, help="absolute scale cap")
    p.add_argument("--dim-cap", type=int, default=3)
    p.add_argument("--max-simplices", type=int, default=100_000_000)
    p.add_argument("--out", required=True, help="filtration JSON output")
    p.add_argument("--edges-out", default=None, help="optional 1-skeleton CSV at the cap scale")
    p.set_defaults(func=cmd_complex)

    p = sub.add_parser("barcode", parents=[common], help="persistent homology of a filtration")
    p.add_argument("--filtration", required=True, help="filtration JSON input")
    p.add_argument("--out", required=True, help="barcode CSV output")
    p.add_argument("--eps-grid", default=None, help="min,max,count for a sampled Betti table")
    p.add_argument("--grid-out", default=None, help="output CSV for --eps-grid")
    p.add_argument("--cycles-out", default=None, help="output CSV of representative cycles")
    p.add_argument("--cycles-k", type=int, default=1)
    p.add_argument("--cycles-top", type=int, default=2)
    p.set_defaults(func=cmd_barcode)

    p = sub.add_parser("mscan", parents=[common, series_input], help="embedding-dimension sweep")
    p.add_argument("--tau", default="auto")
    p.add_argument("--tau-max", type=int, default=400)
    p.add_argument("--bins", type=int, default=None)
    p.add_argument("--xi", type=float, required=True)
    p.add_argument("--every", type=int, default=500)
    p.add_argument("--m-max", type=int, default=8)
    p.add_argument("--dim-cap", type=int, default=2, help="flag cap for the lifespan filtration")
    p.add_argument("--barcode-landmark", type=int, default=0)
    p.set_defaults(func=cmd_mscan)

    p = sub.add_parser("render", parents=[common], help="render CSV artifacts to SVG")
    p.add_argument("kind", choices=["barcode", "heatmap", "skeleton"])
    p.add_argument("--in", dest="input", default=None, help="input CSV (barcode, heatmap)")
    p.add_argument("--edges", default=None, help="edge CSV (skeleton)")
    p.add_argument("--landmarks", default=None, help="landmark CSV (skeleton)")
    p.add_argument("--view", default=None, help="az,el rotation in degrees (3-d skeletons)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_render)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "render":
        if args.kind in ("barcode", "heatmap") and not args.input:
            print("error: render requires --in for barcode and heatmap", file=sys.stderr)
            return 2
        if args.kind == "skeleton" and not (args.edges and args.landmarks):
            print("error: render skeleton requires --edges and --landmarks", file=sys.stderr)
            return 2
    try:
        return args.func(args)
    except _USER_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
