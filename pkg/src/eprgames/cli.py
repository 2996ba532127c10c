"""Command-line front end.

Exit codes: 0 success, 2 usage error, 1 domain error (JSON on stderr).
Every artifact carries the resolved configuration; CSV output puts it on a
leading ``# config: {...}`` comment line.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import correlation as cg
from . import epr, games, lhv, quantum
from .errors import DomainError, EprGamesError
from .gfunctions import PI, big_G, builtin, parse_g, q_transform

FLOAT_FMT = "%.12g"


class UsageError(Exception):
    pass


@dataclass
class Result:
    config: dict
    data: dict | None = None
    columns: list[str] | None = None
    rows: list[list] = field(default_factory=list)
    default_format: str = "json"


# --- output ------------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return FLOAT_FMT % float(v)
    return str(v)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def render(result: Result, fmt: str | None) -> str:
    fmt = fmt or result.default_format
    if fmt == "csv":
        if result.columns is None:
            raise UsageError("this command has no tabular output; use --format json")
        lines = ["# config: " + json.dumps(_jsonable(result.config), sort_keys=True),
                 ",".join(result.columns)]
        lines += [",".join(_fmt(v) for v in row) for row in result.rows]
        return "\n".join(lines) + "\n"
    payload = {"config": result.config}
    if result.data is not None:
        payload.update(result.data)
    if result.columns is not None:
        payload["columns"] = result.columns
        payload["rows"] = result.rows
    return json.dumps(_jsonable(payload), indent=2) + "\n"


# --- argument helpers --------------------------------------------------------

def _angle(args, value):
    if value is None:
        return None
    return math.radians(value) if args.deg else float(value)


INPUT_SLACK = 1e-4


def _snap(value: float, lo: float, hi: float, name: str) -> float:
    """Clamp typed-in values that overshoot a bound by rounding only."""
    if lo - INPUT_SLACK <= value <= hi + INPUT_SLACK:
        return min(max(value, lo), hi)
    raise DomainError(f"{name}={value} outside [{lo}, {hi}]")


def _renormalize(values, name: str) -> list[float]:
    norm = math.sqrt(sum(v * v for v in values))
    if abs(norm - 1.0) > 1e-3:
        raise DomainError(f"{name} has norm {norm}, not 1")
    return [v / norm for v in values]


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + n.replace("_", "-") for n in missing))


def _g_from_args(args):
    eps = _angle(args, args.eps)
    if args.delta is None and eps is None:
        return parse_g(args.g)
    name = args.g.partition("?")[0]
    return builtin(name, delta=args.delta, eps=eps)


def _game_config(game: games.BimatrixGame) -> dict:
    return game.to_dict()


def _profile_list(points):
    return [list(p.as_tuple()) for p in points]


# --- handlers ----------------------------------------------------------------

def cmd_game_solve(args) -> Result:
    _need(args, "game")
    game = games.load_game(args.game)
    ns = games.mixed_nash(game)
    pure = games.pure_nash(game)
    strict = set(games.strict_pure_nash(game))
    return Result(
        {"command": "game solve", "game": args.game, "seed": args.seed},
        {
            "cells": _game_config(game)["cells"],
            "coeffs_a": list(game.coeffs_a),
            "coeffs_b": list(game.coeffs_b),
            "pure_nash": [{"cell": list(c), "labels": list(game.cell_label(c)),
                           "strict": c in strict,
                           "pareto_optimal": games.is_pareto_optimal(game, c)} for c in pure],
            "mixed_nash": _profile_list(ns.points),
            "segments": [[list(s.start.as_tuple()), list(s.end.as_tuple())] for s in ns.segments],
            "continuum": ns.continuum,
        },
    )


def cmd_game_payoff(args) -> Result:
    _need(args, "game", "pa", "pb")
    game = games.load_game(args.game)
    pa, pb = games.payoff(game, games.MixedProfile(args.pa, args.pb))
    return Result({"command": "game payoff", "game": args.game, "pa": args.pa, "pb": args.pb,
                   "seed": args.seed}, {"payoffs": [pa, pb]})


def _spec(args) -> cg.CorrelationGame:
    return cg.CorrelationGame(games.load_game(args.game), _g_from_args(args),
                              cg.CorrelationModel.named(args.model))


def _spec_config(args, spec) -> dict:
    return {"game": args.game, "g": spec.g.to_dict(), "model": spec.model.kind, "seed": args.seed}


def cmd_corr_solve(args) -> Result:
    _need(args, "game", "g")
    spec = _spec(args)
    classical = games.mixed_nash(spec.game)
    q = cg.quantum_pure_ne(spec, grid_n=args.grid)
    grid = cg.ne_grid_search(spec, args.grid)
    profiles = q.profiles
    payoffs = [list(cg.quantum_payoff(spec, p)) for p in profiles]
    cfg = {"command": "corr-game solve", **_spec_config(args, spec), "grid": args.grid}
    return Result(cfg, {
        "classical_ne": _profile_list(classical.points),
        "quantum_ne": list(profiles[0].as_tuple()) if len(profiles) == 1 else _profile_list(profiles),
        "quantum_ne_all": _profile_list(profiles),
        "angles": [[s.theta for s in q.components_a], [s.theta for s in q.components_b]],
        "method": q.method,
        "payoffs": payoffs,
        "grid_ne": _profile_list(grid.points),
        "grid_continuum": grid.continuum,
    })


def cmd_corr_sweep(args) -> Result:
    _need(args, "game", "g")
    spec = _spec(args)
    thetas = np.linspace(0.0, PI, args.steps + 1)
    rows = []
    for ta in thetas:
        pa_vals, pb_vals = cg.payoff_at_angles(spec, ta, thetas)
        for tb, pa, pb in zip(thetas, pa_vals, pb_vals):
            rows.append([float(ta), float(tb), float(pa), float(pb)])
    cfg = {"command": "corr-game sweep", **_spec_config(args, spec), "steps": args.steps}
    return Result(cfg, None, ["theta_a", "theta_b", "P_A", "P_B"], rows, "csv")


def cmd_epr_simulate(args) -> Result:
    _need(args, "theta_a", "theta_b")
    ta, tb = _angle(args, args.theta_a), _angle(args, args.theta_b)
    model = cg.CorrelationModel.named(args.model)
    g = _g_from_args(args) if args.g else None
    if g is not None and (args.pa is not None or args.pb is not None):
        raise UsageError("give either --g or --pa/--pb, not both")
    if g is None:
        _need(args, "pa", "pb")
        cfg_obj = epr.ProtocolConfig(ta, tb, args.pa, args.pb, model, args.runs, args.seed)
    else:
        cfg_obj = epr.ProtocolConfig.from_angles(g, ta, tb, model=model, runs=args.runs, seed=args.seed)
    records = epr.run_protocol(cfg_obj, workers=args.workers)
    report = epr.arbiter_report(records)
    data = {"report": report.to_dict(),
            "model_correlations": {
                "ac": model.corr_vs_z(ta), "cb": model.corr_vs_z(tb),
                "ab": model.corr_pair(cg.axis_a(ta), cg.axis_b(tb))}}
    cfg = {"command": "epr simulate", **cfg_obj.to_dict()}
    if args.game:
        game = games.load_game(args.game)
        reward_g = g or builtin("g1")
        data["reward"] = list(epr.reward(report, game, reward_g))
        data["expected_reward"] = list(cg.payoff_from_correlations(
            game, reward_g, model.corr_vs_z(ta), model.corr_vs_z(tb)))
        cfg["game"], cfg["reward_g"] = args.game, reward_g.to_dict()
    if args.dump_records:
        Path(args.dump_records).write_text(records.to_csv())
        cfg["dump_records"] = args.dump_records
    return Result(cfg, data)


def _load_measure(path: str) -> lhv.LhvMeasure:
    try:
        values = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise DomainError(f"measure file {path!r} not found") from None
    except json.JSONDecodeError as exc:
        raise DomainError(f"measure file {path!r} is not JSON: {exc}") from None
    if isinstance(values, dict):
        values = values.get("m", values)
    return lhv.LhvMeasure(values)


def cmd_lhv_analyze(args) -> Result:
    _need(args, "measure")
    measure = _load_measure(args.measure)
    entries = lhv.entries_from(args.game)
    stats = lhv.lhv_to_stats(measure)
    data = {
        "measure": measure.to_list(),
        "negative_indices": list(measure.negative_indices),
        "stats": stats.to_list(),
        "validation": lhv.validate_stats(stats).as_dict(),
        "chsh": lhv.chsh_from_measure(measure),
        "payoffs_from_stats": {n: list(lhv.payoff_from_stats(stats, entries, n)) for n in lhv.PAIR_NAMES},
    }
    try:
        red = lhv.perfect_corr_reduce(measure)
    except EprGamesError as exc:
        data["reduction"] = exc.to_dict()
    else:
        data["reduction"] = red.as_dict()
        split = lhv.correlated_payoffs(entries, red)
        data["split_payoffs"] = {
            who: {n: {"a": sp.a, "b": sp.b, "total": sp.total} for n, sp in parts.items()}
            for who, parts in split.items()
        }
        try:
            data["ne_analysis"] = lhv.pd_ne_analysis(entries, measure).as_dict()
        except EprGamesError as exc:
            data["ne_analysis"] = exc.to_dict()
    cfg = {"command": "lhv analyze", "measure_file": args.measure, "game": args.game,
           "entries": [entries.K, entries.L, entries.M, entries.N], "seed": args.seed}
    return Result(cfg, data)


def cmd_lhv_scan(args) -> Result:
    entries = lhv.entries_from(args.game)
    if args.steps < 1:
        raise UsageError("--steps must be at least 1")
    xs = np.linspace(args.start, args.stop, args.steps + 1)
    rows = []
    for x, res in lhv.scan_m13(entries, xs):
        rows.append([x, res.profile[0], res.profile[1], res.ne_exists, res.conditions[0],
                     res.conditions[1], res.summed_margin, res.payoffs[0], res.payoffs[1]])
    cfg = {"command": "lhv scan-m13", "game": args.game, "from": args.start, "to": args.stop,
           "steps": args.steps, "family": "m4=1, m13=x, m16=-x", "seed": args.seed}
    cols = ["m13", "s2", "s2p", "ne_exists", "cond_a", "cond_b", "summed_margin", "P_A", "P_B"]
    return Result(cfg, None, cols, rows, "csv")


def cmd_quantum_chsh(args) -> Result:
    _need(args, "c00", "c11", "xb", "zb")
    c00, c11 = _renormalize([args.c00, args.c11], "(c00, c11)")
    xb, zb = _renormalize([args.xb, args.zb], "(xb, zb)")
    value = quantum.chsh_quantum(c00, c11, x_b=xb, z_b=zb)
    settings = quantum.chsh_settings(xb, zb)
    state = quantum.PureState.normalized([c00, 0, 0, c11])
    return Result(
        {"command": "quantum chsh", "c00": c00, "c11": c11, "xb": xb, "zb": zb, "seed": args.seed},
        {"chsh": value, "chsh_operator": quantum.chsh_operator(state, settings),
         "classical_bound": 2.0, "violates": abs(value) > 2.0},
    )


def cmd_quantum_eisert(args) -> Result:
    _need(args, "gamma")
    game = games.load_game(args.game)
    (r, _), (s, _) = game.cells[0]
    (t, _), (u, _) = game.cells[1]
    if args.qq:
        ta, pa = quantum.QUANTUM_MOVE
        tb, pb = quantum.QUANTUM_MOVE
    else:
        ta, pa = _angle(args, args.theta_a or 0.0), _angle(args, args.phi_a or 0.0)
        tb, pb = _angle(args, args.theta_b or 0.0), _angle(args, args.phi_b or 0.0)
    ta, tb = _snap(ta, 0.0, PI, "theta_a"), _snap(tb, 0.0, PI, "theta_b")
    pa, pb = _snap(pa, 0.0, PI / 2, "phi_a"), _snap(pb, 0.0, PI / 2, "phi_b")
    gamma = _snap(_angle(args, args.gamma), 0.0, PI / 2, "gamma")
    pay = quantum.eisert_pd((r, s, t, u), ta, pa, tb, pb, gamma)
    return Result(
        {"command": "quantum eisert", "game": args.game, "gamma": gamma, "theta_a": ta, "phi_a": pa,
         "theta_b": tb, "phi_b": pb, "seed": args.seed},
        {"payoffs": list(pay)},
    )


def cmd_quantum_meyer(args) -> Result:
    return Result({"command": "quantum meyer", "flip_prob": args.flip_prob, "seed": args.seed},
                  {"q_win_prob": quantum.meyer_penny_flip(args.flip_prob),
                   "classical_q_win_prob": quantum.classical_penny_flip(args.flip_prob)})


def cmd_gfun_plot(args) -> Result:
    _need(args, "g")
    g = _g_from_args(args)
    thetas = np.linspace(0.0, PI, args.steps + 1)
    vals = g.eval(thetas)
    quantum_eff = big_G(g, -np.cos(thetas))
    rows = [[float(t), float(v), float(q)] for t, v, q in zip(thetas, vals, quantum_eff)]
    cfg = {"command": "gfun plot", "g": g.to_dict(), "steps": args.steps, "seed": args.seed}
    return Result(cfg, {"invertible": g.invertible()}, ["theta", "g", "g_quantum"], rows, "csv")


def cmd_gfun_q(args) -> Result:
    _need(args, "g", "p")
    g = _g_from_args(args)
    return Result({"command": "gfun q", "g": g.to_dict(), "p": args.p, "seed": args.seed},
                  {"preimages": list(g.inverse_set(args.p).angles),
                   "q_transform": list(q_transform(g, args.p)),
                   "invertible": g.invertible()})


# --- schemas -----------------------------------------------------------------

SCHEMAS = {
    "game solve": {"cells": "2x2 of [A, B]", "coeffs_a": "[K, L, M, N]", "coeffs_b": "[K, L, M, N]",
                   "pure_nash": "list of {cell, labels, strict, pareto_optimal}",
                   "mixed_nash": "list of [p_a, p_b]", "segments": "list of [[p_a, p_b], [p_a, p_b]]",
                   "continuum": "bool"},
    "game payoff": {"payoffs": "[P_A, P_B]"},
    "corr-game solve": {"classical_ne": "list of [p_a, p_b]", "quantum_ne": "[p_a, p_b] or list",
                        "quantum_ne_all": "list of [p_a, p_b]", "angles": "[[theta_a...], [theta_b...]]",
                        "method": "closed_form | grid", "payoffs": "per profile, list of [P_A, P_B]",
                        "grid_ne": "list of [p_a, p_b]", "grid_continuum": "bool"},
    "corr-game sweep": {"columns": ["theta_a", "theta_b", "P_A", "P_B"]},
    "epr simulate": {"report": "{n, p_a, p_b, correlations{ac,cb,ab,cc}, counts, missing}",
                     "model_correlations": "{ac, cb, ab}", "reward": "[P_A, P_B] (with --game)",
                     "expected_reward": "[P_A, P_B] (with --game)"},
    "lhv analyze": {"measure": "16 reals", "negative_indices": "1-based labels", "stats": "16 reals",
                    "validation": "{normalized, consistent, nonnegative, residuals}", "chsh": "real",
                    "payoffs_from_stats": "pair -> [P_A, P_B]", "reduction": "{r, r2, s, s2, ...} or error",
                    "split_payoffs": "A|B -> pair -> {a, b, total}", "ne_analysis": "{ne_exists, profile, ...}"},
    "lhv scan-m13": {"columns": ["m13", "s2", "s2p", "ne_exists", "cond_a", "cond_b",
                                 "summed_margin", "P_A", "P_B"]},
    "quantum chsh": {"chsh": "real", "chsh_operator": "real", "classical_bound": 2.0, "violates": "bool"},
    "quantum eisert": {"payoffs": "[P_A, P_B]"},
    "quantum meyer": {"q_win_prob": "real", "classical_q_win_prob": "real"},
    "gfun plot": {"columns": ["theta", "g", "g_quantum"], "invertible": "bool"},
    "gfun q": {"preimages": "angles", "q_transform": "list of reals", "invertible": "bool"},
}


# --- parser ------------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--out", help="write the artifact to this file instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), help="output format")
    p.add_argument("--seed", type=int, default=0, help="random seed (echoed into the output)")
    p.add_argument("--quiet", action="store_true", help="suppress notes on stderr")
    p.add_argument("--deg", action="store_true", help="read angle options in degrees")
    p.add_argument("--schema", action="store_true", help="print the output schema and exit")
    return p


def _g_options(p):
    p.add_argument("--g", help="built-in name (g1..g8, optionally g3?delta=..&eps=..) or JSON file")
    p.add_argument("--delta", type=float)
    p.add_argument("--eps", type=float, help="breakpoint angle")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    root = argparse.ArgumentParser(prog="eprgames", description="EPR-type two-player games")
    sub = root.add_subparsers(dest="group", required=True)

    def leaf(group_sub, name, key, handler, help_):
        p = group_sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(handler=handler, schema_key=key)
        return p

    g_game = sub.add_parser("game", help="classical 2x2 games").add_subparsers(dest="cmd", required=True)
    p = leaf(g_game, "solve", "game solve", cmd_game_solve, "pure and mixed equilibria")
    p.add_argument("--game")
    p = leaf(g_game, "payoff", "game payoff", cmd_game_payoff, "payoffs at a mixed profile")
    p.add_argument("--game")
    p.add_argument("--pa", type=float)
    p.add_argument("--pb", type=float)

    g_corr = sub.add_parser("corr-game", help="correlation games").add_subparsers(dest="cmd", required=True)
    for name, key, handler, help_ in (("solve", "corr-game solve", cmd_corr_solve, "equilibria"),
                                      ("sweep", "corr-game sweep", cmd_corr_sweep, "payoff surface")):
        p = leaf(g_corr, name, key, handler, help_)
        p.add_argument("--game", default="pd1")
        _g_options(p)
        p.add_argument("--model", default="singlet", choices=sorted(cg.MODEL_ALIASES))
        if name == "solve":
            p.add_argument("--grid", type=int, default=1001, help="grid points per player")
        else:
            p.add_argument("--steps", type=int, default=60)

    g_epr = sub.add_parser("epr", help="Monte Carlo protocol").add_subparsers(dest="cmd", required=True)
    p = leaf(g_epr, "simulate", "epr simulate", cmd_epr_simulate, "simulate runs and report")
    p.add_argument("--model", default="singlet", choices=sorted(cg.MODEL_ALIASES))
    p.add_argument("--theta-a", type=float)
    p.add_argument("--theta-b", type=float)
    p.add_argument("--pa", type=float)
    p.add_argument("--pb", type=float)
    _g_options(p)
    p.add_argument("--runs", type=int, default=100_000)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--game", help="also compute the arbiter's reward for this game")
    p.add_argument("--dump-records", help="write the run list as CSV")

    g_lhv = sub.add_parser("lhv", help="four-coin and hidden-variable analysis").add_subparsers(dest="cmd", required=True)
    p = leaf(g_lhv, "analyze", "lhv analyze", cmd_lhv_analyze, "analyze a 16-weight measure")
    p.add_argument("--measure", help="JSON array of 16 reals")
    p.add_argument("--game", default="pd1", help="pd1, pd2 or K,L,M,N")
    p = leaf(g_lhv, "scan-m13", "lhv scan-m13", cmd_lhv_scan, "sweep the negative-weight family")
    p.add_argument("--from", dest="start", type=float, default=-0.3)
    p.add_argument("--to", dest="stop", type=float, default=0.1)
    p.add_argument("--steps", type=int, default=400)
    p.add_argument("--game", default="pd2", help="pd1, pd2 or K,L,M,N")

    g_q = sub.add_parser("quantum", help="exact qubit references").add_subparsers(dest="cmd", required=True)
    p = leaf(g_q, "chsh", "quantum chsh", cmd_quantum_chsh, "CHSH value on c00|00>+c11|11>")
    for name in ("--c00", "--c11", "--xb", "--zb"):
        p.add_argument(name, type=float)
    p = leaf(g_q, "eisert", "quantum eisert", cmd_quantum_eisert, "quantized prisoners' dilemma")
    p.add_argument("--game", default="pd1")
    p.add_argument("--gamma", type=float)
    p.add_argument("--qq", action="store_true", help="both players use the quantum move")
    for name in ("--theta-a", "--phi-a", "--theta-b", "--phi-b"):
        p.add_argument(name, type=float)
    p = leaf(g_q, "meyer", "quantum meyer", cmd_quantum_meyer, "penny-flip win probability")
    p.add_argument("--flip-prob", type=float, default=0.5)

    g_g = sub.add_parser("gfun", help="g-functions").add_subparsers(dest="cmd", required=True)
    p = leaf(g_g, "plot", "gfun plot", cmd_gfun_plot, "tabulate g on [0, pi]")
    _g_options(p)
    p.add_argument("--steps", type=int, default=200)
    p = leaf(g_g, "q", "gfun q", cmd_gfun_q, "preimages and effective probabilities")
    _g_options(p)
    p.add_argument("--p", type=float)
    return root


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.schema:
            text = json.dumps({"command": args.schema_key, "fields": SCHEMAS[args.schema_key]}, indent=2) + "\n"
        else:
            text = render(args.handler(args), args.format)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"eprgames: error: {exc}", file=sys.stderr)
        return 2
    except EprGamesError as exc:
        print(json.dumps(exc.to_dict()), file=sys.stderr)
        return 1
    if args.out:
        Path(args.out).write_text(text)
        if not args.quiet:
            print(f"wrote {args.out}", file=sys.stderr)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
