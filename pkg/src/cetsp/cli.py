"""Command line front end.

Subcommands: gen, solve, export-lp, fit-reg, render, oracle, bench.  Solver
options come from flags; --config <file> applies a JSON override on top
(same keys as the config block embedded in solution files).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from cetsp import report
from cetsp.instances import generate_instance, load_instance, save_instance, write_instance
from cetsp.metrics import ObjectiveConfig, RegressionModel, fit_regression
from cetsp.milp import build_model, export_lp
from cetsp.oracle import brute_force_opt, certified_optima
from cetsp.solver import SolverConfig, build_regions, solve_fragmented, validate_solution


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--region", choices=("square", "hexagon"), default="square")
    p.add_argument("--objective", choices=("manhattan", "regression"), default="manhattan")
    p.add_argument("--proj8", action="store_true", help="add the 8-axis projection term")
    p.add_argument("--proj-weight", type=float, default=1.0)
    p.add_argument("--reg-model", type=Path, help="regression model JSON (from fit-reg)")
    p.add_argument("--max-outer-iters", type=int, default=50)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--config", type=Path, help="JSON file overriding the flags above")


def _solver_config(args: argparse.Namespace) -> SolverConfig:
    cfg = {
        "region_kind": args.region,
        "mode": args.objective,
        "projection8": args.proj8,
        "projection_weight": args.proj_weight,
        "regression": None,
        "max_outer_iters": args.max_outer_iters,
        "improvement_tol": args.tol,
    }
    if args.reg_model:
        cfg["regression"] = json.loads(args.reg_model.read_text(encoding="utf-8"))
    if args.config:
        cfg.update(json.loads(args.config.read_text(encoding="utf-8")))
    reg = cfg["regression"]
    model = None
    if reg is not None:
        model = RegressionModel(
            c_dx=float(reg["c_dx"]),
            c_dy=float(reg["c_dy"]),
            mean_dx=float(reg["mean_dx"]),
            mean_dy=float(reg["mean_dy"]),
            bias=float(reg["bias"]),
        )
    return SolverConfig(
        region_kind=cfg["region_kind"],
        objective=ObjectiveConfig(
            mode=cfg["mode"],
            projection8=bool(cfg["projection8"]),
            projection_weight=float(cfg["projection_weight"]),
        ),
        regression=model,
        max_outer_iters=int(cfg["max_outer_iters"]),
        improvement_tol=float(cfg["improvement_tol"]),
    )


def cmd_gen(args: argparse.Namespace) -> int:
    inst = generate_instance(
        args.n, bbox=(args.width, args.height), r_range=(args.rmin, args.rmax), seed=args.seed
    )
    if args.out:
        save_instance(inst, args.out)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(write_instance(inst))
    return 0


def cmd_solve(args: argparse.Namespace) -> int:
    inst = load_instance(args.instance)
    cfg = _solver_config(args)
    rs = solve_fragmented(inst, cfg)
    rep = validate_solution(inst, rs)
    print(f"instance={inst.name}")
    print(f"route={' '.join(str(i) for i in rs.order)}")
    print(f"manhattan_cost={rs.manhattan_cost!r}")
    print(f"euclidean_cost={rs.euclidean_cost!r}")
    print(f"iterations={rs.iterations}")
    print(f"valid={'yes' if rep.ok else 'NO ' + repr(rep)}")
    print(f"time_ms={rs.time_ms:.1f}")
    if args.out:
        Path(args.out).write_text(report.solution_json(inst, cfg, rs), encoding="utf-8")
    if args.svg:
        Path(args.svg).write_text(report.render_svg(inst, rs, cfg.region_kind), encoding="utf-8")
    return 0 if rep.ok else 1


def cmd_export_lp(args: argparse.Namespace) -> int:
    inst = load_instance(args.instance)
    cfg = _solver_config(args)
    model = build_model(
        inst,
        region_kind=cfg.region_kind,
        lin=args.lin,
        cfg=cfg.objective,
        model=cfg.regression,
    )
    out = Path(args.out_dir) / f"{model.name}.lp"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(export_lp(model), encoding="utf-8")
    print(f"wrote {out}")
    return 0


def cmd_fit_reg(args: argparse.Namespace) -> int:
    model = fit_regression(args.samples, args.range, args.seed)
    text = model.to_json() + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_render(args: argparse.Namespace) -> int:
    inst = load_instance(args.instance)
    sol = json.loads(Path(args.solution).read_text(encoding="utf-8"))
    from cetsp.tsp import RouteState, positions_of

    order = tuple(int(i) for i in sol["route"])
    rs = RouteState(
        order=order,
        u=positions_of(order),
        hitting_points=tuple((float(x), float(y)) for x, y in sol["hitting_points"]),
        manhattan_cost=float(sol["manhattan_cost"]),
        euclidean_cost=float(sol["euclidean_cost"]),
        iterations=int(sol.get("iterations", 0)),
        time_ms=float(sol.get("time_ms", 0.0)),
    )
    kind = sol.get("config", {}).get("region_kind", "square")
    Path(args.out).write_text(report.render_svg(inst, rs, kind), encoding="utf-8")
    print(f"wrote {args.out}")
    return 0


def cmd_oracle(args: argparse.Namespace) -> int:
    if args.certify:
        rows = certified_optima(
            seeds=range(1, args.count + 1),
            n=args.n,
            bbox=(args.width, args.height),
            r_range=(args.rmin, args.rmax),
            region_kind=args.region,
        )
        lines = [
            "# exact reference optima: brute-force order enumeration + fixed-order LP",
            f"# region_kind={args.region} bbox={args.width}x{args.height} "
            f"radii=[{args.rmin},{args.rmax}] metric=manhattan",
            "seed,n,optimal_cost",
        ]
        lines += [f"{s},{n},{c!r}" for s, n, c in rows]
        text = "\n".join(lines) + "\n"
        if args.out:
            Path(args.out).write_text(text, encoding="utf-8")
            print(f"wrote {args.out}")
        else:
            sys.stdout.write(text)
        return 0
    if not args.instance:
        print("oracle: need an instance file (or --certify)", file=sys.stderr)
        return 2
    inst = load_instance(args.instance)
    regions = build_regions(inst, args.region)
    order, points, cost = brute_force_opt(inst, regions)
    print(f"instance={inst.name}")
    print(f"order={' '.join(str(i) for i in order)}")
    print(f"optimal_cost={cost!r}")
    if args.out:
        payload = {
            "instance": inst.name,
            "region_kind": args.region,
            "order": order,
            "hitting_points": [[x, y] for x, y in points],
            "optimal_cost": cost,
        }
        Path(args.out).write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    if args.instances:
        instances = [load_instance(p) for p in args.instances]
    else:
        instances = [
            generate_instance(args.gen_n, seed=args.seed + k) for k in range(args.gen_count)
        ]
    regression = None
    if not args.quick:
        if args.reg_model:
            regression = RegressionModel.from_json(args.reg_model.read_text(encoding="utf-8"))
        else:
            regression = fit_regression(args.reg_samples, args.reg_range, args.reg_seed)
    configs = report.config_suite(regression=regression, quick=args.quick)
    rows, summary, best_of = report.bench(instances, configs)

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report.write_bench_csv(rows, out / "bench.csv")
    report.write_summary_csv(summary, out / "bench_summary.csv")
    report.plot_are(summary, out / "are_by_config.png")
    by_name = {i.name: i for i in instances}
    for name, (label, rs) in sorted(best_of.items()):
        kind = dict(configs)[label].region_kind
        report.plot_solution(
            by_name[name], rs, kind, out / f"traj_{name}.png", title=f"{name} best: {label}"
        )
    for r in summary:
        print(f"{r['config']}: are={r['are']:.4f} n_best={r['n_best']}")
    print(f"wrote {out / 'bench.csv'}, {out / 'bench_summary.csv'}, figures in {out}")
    return 0


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="cetsp", description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("gen", help="generate a random instance")
    p.add_argument("--n", type=int, default=12)
    p.add_argument("--width", type=float, default=1000.0)
    p.add_argument("--height", type=float, default=1000.0)
    p.add_argument("--rmin", type=float, default=50.0)
    p.add_argument("--rmax", type=float, default=150.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="run the fragmented relocation solver")
    p.add_argument("instance", type=Path)
    _add_solver_flags(p)
    p.add_argument("--out", type=Path, help="write the solution JSON here")
    p.add_argument("--svg", type=Path, help="render the tour as SVG here")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("export-lp", help="write a MILP in CPLEX LP format")
    p.add_argument("instance", type=Path)
    _add_solver_flags(p)
    p.add_argument("--lin", choices=("lin1", "lin2"), default="lin2")
    p.add_argument("--out-dir", type=Path, default=Path("."))
    p.set_defaults(func=cmd_export_lp)

    p = sub.add_parser("fit-reg", help="fit the affine distance surrogate")
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--range", type=float, default=1200.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_fit_reg)

    p = sub.add_parser("render", help="draw a saved solution as SVG")
    p.add_argument("instance", type=Path)
    p.add_argument("solution", type=Path)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("oracle", help="exact reference optimum (small instances)")
    p.add_argument("instance", type=Path, nargs="?")
    p.add_argument("--region", choices=("square", "hexagon"), default="hexagon")
    p.add_argument("--certify", action="store_true", help="emit a certified-optima CSV")
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--width", type=float, default=1000.0)
    p.add_argument("--height", type=float, default=1000.0)
    p.add_argument("--rmin", type=float, default=60.0)
    p.add_argument("--rmax", type=float, default=160.0)
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("bench", help="compare configurations over instances")
    p.add_argument("instances", type=Path, nargs="*")
    p.add_argument("--gen-count", type=int, default=4)
    p.add_argument("--gen-n", type=int, default=10)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--quick", action="store_true", help="Manhattan-only suite")
    p.add_argument("--reg-model", type=Path)
    p.add_argument("--reg-samples", type=int, default=100_000)
    p.add_argument("--reg-range", type=float, default=1200.0)
    p.add_argument("--reg-seed", type=int, default=0)
    p.add_argument("--out-dir", type=Path, default=Path("bench_out"))
    p.set_defaults(func=cmd_bench)

    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
