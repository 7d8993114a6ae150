"""Command-line interface: inference, rule export, surfaces, experiments, serve.

Exit codes: 0 success, 2 usage error (argparse), 1 runtime failure,
3 experiment non-convergence (summary still written).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import engine as engine_mod
from . import fuzzy, sim
from .fuzzy import ACTIVITY_CODES, CHRONOTYPE_CODES, InputState
from .learning import LearnerConfig

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2
EXIT_NONCONVERGED = 3


def _categorical(codes, what):
    def parse(value):
        if value in codes:
            return codes[value]
        try:
            code = float(value)
        except ValueError:
            code = None
        if code is not None and code in codes.values():
            return code
        raise argparse.ArgumentTypeError(
            f"invalid {what} {value!r}; valid: {sorted(codes)} or codes {sorted(codes.values())}")
    return parse


def _eta_list(value):
    try:
        etas = [float(v) for v in value.split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad eta list {value!r}")
    if not etas or any(e <= 0 for e in etas):
        raise argparse.ArgumentTypeError("etas must be positive")
    return etas


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cabinlight",
        description="Adaptive fuzzy lighting controller (inference, learning, service)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("infer", help="one-shot light intensity suggestion")
    p.add_argument("--dgi", type=float, required=True)
    p.add_argument("--age", type=float, required=True)
    p.add_argument("--activity", type=_categorical(ACTIVITY_CODES, "activity"),
                   required=True)
    p.add_argument("--chronotype", type=_categorical(CHRONOTYPE_CODES, "chronotype"),
                   required=True)
    p.add_argument("--profile", type=Path, help="learned profile file to infer with")

    p = sub.add_parser("experiment", help="reproduce a reference experiment set")
    p.add_argument("--set", dest="set_number", type=int, choices=(1, 2, 3),
                   required=True)
    p.add_argument("--eta", type=_eta_list, default=[0.1])
    p.add_argument("--eta-m", type=float, default=None,
                   help="mean learning rate (default 0.002)")
    p.add_argument("--preference", type=float, default=None,
                   help="override the preset user preference")
    p.add_argument("--max-trials", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=Path("."),
                   help="directory for trace and summary files")

    p = sub.add_parser("surface", help="export an inference surface grid")
    p.add_argument("--vars", required=True,
                   help="two comma-separated variables, e.g. dgi,age")
    p.add_argument("--fix", required=True,
                   help="comma-separated name=value for the remaining inputs")
    p.add_argument("--res", type=int, default=50)
    p.add_argument("--out", type=Path, default=Path("surface.tsv"))

    p = sub.add_parser("rules", help="export the generated rule base")
    p.add_argument("--export", type=Path, required=True)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--state-dir", type=Path, default=Path("cabinlight-state"))

    return parser


def cmd_infer(args) -> int:
    state = InputState(dgi=args.dgi, age=args.age,
                       activity=args.activity, chronotype=args.chronotype)
    if args.profile:
        try:
            profile = engine_mod.load_profile(args.profile)
        except engine_mod.CorruptProfile as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_RUNTIME
        variables, rules = profile.variables, profile.rules
    else:
        variables = fuzzy.build_default_variables()
        rules = fuzzy.build_rule_base(variables)
    print(f"{fuzzy.infer(state, rules, variables):.4f}")
    return EXIT_OK


def cmd_experiment(args) -> int:
    cfg = LearnerConfig(eta_m=args.eta_m) if args.eta_m else LearnerConfig()
    spec = sim.preset_spec(args.set_number, cfg=cfg, seed=args.seed,
                           max_trials=args.max_trials)
    if args.preference is not None:
        spec.user.true_preference = args.preference
    traces = sim.learning_rate_sweep(spec, args.eta)
    args.out.mkdir(parents=True, exist_ok=True)
    summary = ["eta\tconverged_at\tfinal_suggested\tfinal_means"]
    failed = False
    for eta in sorted(traces):
        trace = traces[eta]
        sim.export_trace(trace, args.out / f"set{args.set_number}_eta{eta}.tsv")
        last = trace.records[-1]
        means = ",".join(f"{m:.6f}" for m in last.means)
        converged = trace.converged_at if trace.converged_at is not None else "none"
        summary.append(f"{eta}\t{converged}\t{last.suggested:.6f}\t{means}")
        if trace.converged_at is None:
            failed = True
    summary_path = args.out / f"set{args.set_number}_summary.tsv"
    summary_path.write_text("\n".join(summary) + "\n")
    print(summary_path)
    for line in summary:
        print(line)
    return EXIT_NONCONVERGED if failed else EXIT_OK


def cmd_surface(args) -> int:
    names = [v.strip() for v in args.vars.split(",") if v.strip()]
    if len(names) != 2 or names[0] == names[1]:
        print("error: --vars needs two distinct variables", file=sys.stderr)
        return EXIT_USAGE
    fixed = {"dgi": 22.0, "age": 30.0, "activity": 5.0, "chronotype": 25.0}
    for pair in args.fix.split(","):
        if not pair.strip():
            continue
        try:
            key, value = pair.split("=")
        except ValueError:
            print(f"error: bad --fix entry {pair!r}", file=sys.stderr)
            return EXIT_USAGE
        key = key.strip()
        if key not in fixed:
            print(f"error: unknown variable {key!r}", file=sys.stderr)
            return EXIT_USAGE
        value = value.strip()
        if key == "activity" and value in ACTIVITY_CODES:
            fixed[key] = ACTIVITY_CODES[value]
        elif key == "chronotype" and value in CHRONOTYPE_CODES:
            fixed[key] = CHRONOTYPE_CODES[value]
        else:
            fixed[key] = float(value)
    variables = fuzzy.build_default_variables()
    rules = fuzzy.build_rule_base(variables)
    state = InputState(**fixed)
    try:
        a_vals, b_vals, grid = fuzzy.surface_grid(names[0], names[1], state,
                                                  args.res, rules, variables)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    lines = [f"{names[0]}\t{names[1]}\tintensity"]
    for i, va in enumerate(a_vals):
        for j, vb in enumerate(b_vals):
            lines.append(f"{va:.6f}\t{vb:.6f}\t{grid[i][j]:.6f}")
    args.out.write_text("\n".join(lines) + "\n")
    print(args.out)
    return EXIT_OK


def cmd_rules(args) -> int:
    variables = fuzzy.build_default_variables()
    rules = fuzzy.build_rule_base(variables)
    fuzzy.export_rules(rules, variables, args.export)
    print(f"{args.export}: {len(rules)} rules")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .api import create_app

    app = create_app(args.state_dir)
    try:
        uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    except (OSError, SystemExit) as exc:
        print(f"error: could not serve on {args.host}:{args.port} ({exc})",
              file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


_HANDLERS = {
    "infer": cmd_infer,
    "experiment": cmd_experiment,
    "surface": cmd_surface,
    "rules": cmd_rules,
    "serve": cmd_serve,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except fuzzy.AllRulesSilent as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
