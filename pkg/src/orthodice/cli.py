"""Command-line interface: ``orthodice <group> <command> [options]``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

import numpy as np

from . import dice, law, orthopoly, stc
from .applications import cards, goe, gravity, shotnoise
from .errors import OrthoDiceError

SCHEMA_VERSION = "1.0"
SEED_ENV = "ORTHODICE_SEED"


@dataclass
class Result:
    columns: list
    rows: list
    meta: dict = field(default_factory=dict)


class UsageError(Exception):
    pass


# argument parsing helpers


def rational_arg(text: str) -> Fraction:
    try:
        value = Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from exc
    if "/" not in text and any(ch in text for ch in ".eE"):
        print(f"warning: decimal {text} read as exact {value}", file=sys.stderr)
    return value


def int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}") from exc


def float_list(text: str) -> list[float]:
    """Comma list, or ``lo:hi:step`` for an inclusive range."""
    try:
        if ":" in text:
            lo, hi, step = (float(x) for x in text.split(":"))
            if step <= 0:
                raise ValueError
            n = int(math.floor((hi - lo) / step + 1e-9)) + 1
            return [round(lo + i * step, 12) for i in range(n)]
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected floats or lo:hi:step: {text!r}") from exc


def point_arg(text: str) -> tuple[float, float, float]:
    vals = float_list(text)
    if len(vals) != 3:
        raise argparse.ArgumentTypeError(f"expected x,y,z: {text!r}")
    return tuple(vals)


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}")


# rendering


def _is_rational(x) -> bool:
    return isinstance(x, Rational) and not isinstance(x, (int, bool, np.integer)) and x.denominator != 1


def _plain(x):
    if isinstance(x, bool):
        return x
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, Rational):
        if x.denominator == 1:
            return int(x.numerator)
        return {"exact": f"{x.numerator}/{x.denominator}", "decimal": float(x)}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (int, str)) or x is None:
        return x
    return int(x) if hasattr(x, "__index__") else str(x)


def _flat_columns(result: Result):
    """Split every rational-valued column into ``name`` (p/q) and ``name_decimal``."""
    rational_cols = {
        j for j in range(len(result.columns)) if any(_is_rational(row[j]) for row in result.rows)
    }
    header = []
    for j, name in enumerate(result.columns):
        header.append(name)
        if j in rational_cols:
            header.append(f"{name}_decimal")
    rows = []
    for row in result.rows:
        out = []
        for j, v in enumerate(row):
            if j in rational_cols:
                v = Fraction(v)
                out.append(f"{v.numerator}/{v.denominator}" if v.denominator != 1 else str(v.numerator))
                out.append(repr(float(v)))
            else:
                p = _plain(v)
                out.append("" if p is None else repr(p) if isinstance(p, float) else str(p))
        rows.append(out)
    return header, rows


def render(command: str, result: Result, fmt: str) -> str:
    if fmt == "json":
        payload = {
            "columns": list(result.columns),
            "rows": [dict(zip(result.columns, (_plain(v) for v in row))) for row in result.rows],
            "meta": _plain(result.meta),
        }
        envelope = {"schema_version": SCHEMA_VERSION, "command": command, "payload": payload}
        return json.dumps(envelope, indent=2, allow_nan=False) + "\n"
    header, rows = _flat_columns(result)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return buf.getvalue()
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(header)]
    lines = ["  ".join(h.rjust(w) for h, w in zip(header, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in rows]
    for k, v in result.meta.items():
        lines.append(f"# {k}: {json.dumps(_plain(v))}")
    return "\n".join(lines) + "\n"


# dice / count


DIE_COLUMNS = ["k", "m", "n", "c", "sides", "position"]


def _die_row(d: dice.OrthogonalDie):
    return [d.k, d.m, d.n, d.mean_c, d.sides_p, d.position]


def cmd_dice_list(args):
    return Result(DIE_COLUMNS, [_die_row(d) for d in dice.enumerate_orthogonal(args.count)])


def cmd_dice_from_index(args):
    return Result(DIE_COLUMNS, [_die_row(dice.die_from_index(args.k))])


def cmd_dice_from_prime(args):
    d = dice.die_from_prime_product(args.p, check_prime=args.check_prime)
    meta = {"prime": d.prime} if d.prime is not None else {}
    return Result(DIE_COLUMNS, [_die_row(d)], meta)


def cmd_dice_classify(args):
    sp = dice.SupportPair(args.m, args.n)
    cls = dice.classify(sp)
    return Result(
        ["m", "n", "mean", "variance", "class", "degenerate"],
        [[sp.m, sp.n, sp.mean, sp.variance, cls.variant.value, cls.degenerate]],
    )


def cmd_dice_nearest(args):
    return Result(DIE_COLUMNS, [_die_row(dice.nearest_die(args.c))])


def cmd_dice_first_at_least(args):
    return Result(DIE_COLUMNS, [_die_row(dice.first_die_with_mean_at_least(args.c))])


def cmd_dice_decompose(args):
    d = dice.die_from_index(args.k)
    dec = dice.decompose(d)
    return Result(["k", "center", "halfwidth"], [[d.k, dec.center, dec.halfwidth]])


def cmd_count_coprime23(args):
    value = dice.count_coprime23_oracle(args.n) if args.oracle else dice.count_coprime23(args.n)
    return Result(["n", "count", "method"], [[args.n, value, "gcd-scan" if args.oracle else "closed-form"]])


# law


def cmd_law_pmf(args):
    pmf = law.thinned_pmf(dice.SupportPair(args.m, args.n), args.a)
    rows = [[pmf.offset + i, p] for i, p in enumerate(pmf.probs) if p]
    return Result(["j", "probability"], rows, {"a": args.a})


def cmd_law_moments(args):
    sp = dice.SupportPair(args.m, args.n)
    rows = [
        [r, law.factorial_moment(sp, args.a, r), law.raw_moment(sp, args.a, r)] for r in range(args.max_order + 1)
    ]
    tm = law.thinned_moments(law.moment_summary(sp), args.a)
    return Result(["order", "factorial_moment", "raw_moment"], rows, {"mean": tm.c, "variance": tm.delta_sq})


def cmd_law_converge(args):
    rows = law.convergence_sequence(args.k0, args.indices, args.grid, args.tail_tol)
    return Result(
        ["l", "a", "tvd", "supdist"],
        [[r.l, r.a, r.tvd, r.sup_dist] for r in rows],
        {"k0": args.k0, "poisson_mean": dice.mean_of_index(args.k0)},
    )


# sim


def _sim_model(args):
    sp = dice.SupportPair(args.m, args.n)
    if args.model == "cards":
        return cards.deck_model(sp)
    if args.model == "goe":
        return goe.goe_model(sp)
    if args.model == "uniform":
        return stc.MeasureModel(sp, stc.uniform_interval(0.0, 1.0), name="uniform")
    raise UsageError(f"unknown model {args.model!r}")


def _sim_functional(model_name: str, spec: str) -> stc.Functional:
    """Functionals by name: cards ``points:SUIT`` / ``count:SUIT``; goe ``gap`` / ``gap:R``;
    uniform ``indicator:LO,HI`` / ``identity``."""
    kind, _, arg = spec.partition(":")
    try:
        if model_name == "cards" and kind == "points":
            return cards.suit_point_functional(arg)
        if model_name == "cards" and kind == "count":
            return cards.suit_count_functional(arg)
        if model_name == "goe" and kind == "gap":
            return goe.gap_functional(float(arg) if arg else None)
        if model_name == "uniform" and kind == "identity":
            return stc.Functional("identity", lambda x, m: x)
        if model_name == "uniform" and kind == "indicator":
            lo, hi = float_list(arg)
            return stc.Functional(spec, lambda x, m: ((x >= lo) & (x < hi)).astype(float))
    except (ValueError, argparse.ArgumentTypeError) as exc:
        raise UsageError(f"bad functional {spec!r}: {exc}") from exc
    raise UsageError(f"functional {spec!r} is not available for model {model_name!r}")


def cmd_sim_estimate(args):
    model = _sim_model(args)
    f = _sim_functional(args.model, args.functional)
    g = _sim_functional(args.model, args.other) if args.other else None
    if args.statistic == "covariance" and g is None:
        raise UsageError("--statistic covariance needs --other")
    rep = stc.estimate_functional(
        model, f, args.reps, args.seed, args.statistic, g, threads=args.threads, bootstrap=args.bootstrap
    )
    lo, hi = rep.ci()
    return Result(
        ["statistic", "estimate", "std_error", "ci_low", "ci_high", "n_replicates", "seed"],
        [[rep.statistic, rep.point_estimate, rep.std_error, lo, hi, rep.n_replicates, rep.seed]],
        {"model": args.model, "functional": args.functional, "other": args.other},
    )


# applications


def cmd_cards_table(args):
    t = cards.cards_covariance_table(dice.SupportPair(args.m, args.n))
    return Result(
        ["m", "n", "c", "delta_sq", "mean", "variance", "covariance", "correlation", "class"],
        [
            [
                args.m,
                args.n,
                t.c,
                t.delta_sq,
                t.mean,
                t.variance,
                t.covariance,
                t.correlation,
                dice.classify(t.support).variant.value,
            ]
        ],
    )


def cmd_cards_partition(args):
    pp = cards.cards_partition_pmf(args.hand, args.counts)
    return Result(
        ["hand", "counts", "without_replacement", "with_replacement"],
        [[args.hand, ",".join(map(str, args.counts)), pp.without_replacement, pp.with_replacement]],
    )


def cmd_cards_game(args):
    res = cards.cards_game_simulation(dice.SupportPair(args.m, args.n), args.rounds, args.seed, args.threads)
    if args.scatter:
        rows = [[int(v) if j < 2 else float(v) for j, v in enumerate(r)] for r in res.scatter]
        return Result(list(res.SCATTER_COLUMNS), rows, {"class": res.variant, "seed": args.seed})
    rows = [[k, res.accuracy[k], res.std_error[k]] for k in res.accuracy]
    return Result(
        ["strategy", "accuracy", "std_error"],
        rows,
        {"class": res.variant, "baseline": res.baseline, "hit_rate": list(res.hit_rate), "seed": args.seed},
    )


def cmd_goe_summary(args):
    rows = goe.goe_summary(args.r_grid, args.method, args.seed, args.samples, args.threads)
    return Result(
        ["r", "a_r", "nu_f", "nu_f2", "var_ratio_orthogonal", "var_ratio_dirac"],
        [[r.r, r.a_r, r.nu_f, r.nu_f2, r.var_ratio_orthogonal, r.var_ratio_dirac] for r in rows],
        {"method": args.method, "samples": args.samples, "seed": args.seed},
    )


def cmd_goe_wigner(args):
    y = goe.wigner_sample(args.seed, args.n)
    ks = goe.wigner_ks(y)
    meta = {
        "mean": float(y.mean()),
        "second_moment": float((y * y).mean()),
        "ks_statistic": float(ks.statistic),
        "ks_pvalue": float(ks.pvalue),
        "seed": args.seed,
    }
    if args.summary:
        return Result(["n", "mean", "second_moment"], [[args.n, meta["mean"], meta["second_moment"]]], meta)
    return Result(["i", "gap"], [[i, float(v)] for i, v in enumerate(y)], meta)


def cmd_shotnoise(args):
    model = shotnoise.ShotNoiseModel.from_index(args.die_index, args.T, args.ap, args.bp)
    grid = np.linspace(0.0, args.T, args.grid) if isinstance(args.grid, int) else np.asarray(args.grid)
    if args.paths:
        sim = shotnoise.shotnoise_simulate(
            model, grid, 2, args.seed, args.threads, n_paths=args.paths, path_points=args.path_points
        )
        rows = [[float(t), *map(float, sim.paths[:, j])] for j, t in enumerate(sim.path_grid)]
        return Result(
            ["t", *(f"path_{i}" for i in range(args.paths))],
            rows,
            {"die_index": args.die_index, "seed": args.seed, "max_ou_excess": sim.max_ou_excess},
        )
    sim = shotnoise.shotnoise_simulate(model, grid, args.reps, args.seed, args.threads, n_paths=0)
    mean, cov = shotnoise.moment_grid(model, grid)
    rows = []
    for i, t in enumerate(grid):
        nxt = min(i + 1, len(grid) - 1)
        rows.append(
            [
                float(t),
                float(sim.mean[i]),
                float(mean[i]),
                float(sim.mean_se[i]),
                float(sim.var[i]),
                float(cov[i, i]),
                float(sim.var_se[i]),
                float(grid[nxt]),
                float(sim.cov[i, nxt]),
                float(cov[i, nxt]),
                float(sim.cov_se[i, nxt]),
            ]
        )
    return Result(
        [
            "t",
            "mean_mc",
            "mean_exact",
            "mean_se",
            "var_mc",
            "var_exact",
            "var_se",
            "t_next",
            "cov_mc",
            "cov_exact",
            "cov_se",
        ],
        rows,
        {"die_index": args.die_index, "reps": args.reps, "seed": args.seed},
    )


def _gravity_support(args):
    if args.die_index is not None:
        return dice.die_from_index(args.die_index).support
    if args.m is None or args.n is None:
        raise UsageError("custom gravity needs --die-index or both --m and --n")
    return dice.SupportPair(args.m, args.n)


def cmd_gravity(args):
    if args.preset == "milkyway":
        rep = gravity.milky_way_preset(args.seed, b_m=int(args.bm), d_m2=args.dm2, n_points=args.points)
        d = rep.die
        meta = {
            "prime_rank": rep.prime_rank,
            "b_m_times_c": rep.mass_total,
            "z": list(rep.z),
            "w": list(rep.w),
            "mean_z": rep.reference.mean_z,
            "var_z": rep.reference.var_z,
            "cov_wz": rep.reference.cov_wz,
            "kernel_mc": rep.kernel_mc,
            "density": "exponential disk stand-in (illustrative)",
        }
        return Result(DIE_COLUMNS, [_die_row(d)], meta)
    density = (
        gravity.GaussianDensity(args.sigma)
        if args.density == "gaussian"
        else gravity.ExponentialDisk(args.scale_length, args.scale_height)
    )
    softening = None if args.no_softening else (args.softening if args.softening is not None else gravity.AUTO)
    model = gravity.GravityModel(density, args.bm, args.dm2, args.G, softening)
    est = gravity.gravity_estimate(model, _gravity_support(args), args.z, args.w, args.reps, args.seed, args.threads)
    ref = est.reference
    rows = [
        ["mean_z", est.mean_z.point_estimate, est.mean_z.std_error, ref.mean_z],
        ["var_z", est.var_z.point_estimate, est.var_z.std_error, ref.var_z],
        ["cov_wz", est.cov_wz.point_estimate, est.cov_wz.std_error, ref.cov_wz],
    ]
    return Result(["quantity", "estimate", "std_error", "reference"], rows, {"seed": args.seed})


def cmd_poly_report(args):
    rep = orthopoly.convergence_report(args.k0, args.indices, args.degree, args.p)
    if args.plot:
        return Result(rep.plot_header, rep.plot_rows, {"k0": rep.k0, "theta": rep.theta, "degree": rep.degree})
    cols = ["l", "a"] + [f"d_p{p}" for p in args.p]
    rows = [[r.l, r.a] + [r.distances[p] for p in args.p] for r in rep.rows]
    return Result(cols, rows, {"k0": rep.k0, "theta": rep.theta, "degree": rep.degree})


# parser


def _common(p, seed=False, threads=False):
    p.add_argument("--format", choices=("json", "csv", "table"), default="table")
    if seed:
        p.add_argument("--seed", type=int, default=None, help=f"defaults to ${SEED_ENV} or 0")
    if threads:
        p.add_argument("--threads", type=int, default=1)
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="orthodice", description="Orthogonal dice and mixed binomial processes.")
    groups = parser.add_subparsers(dest="group", required=True)

    g = groups.add_parser("dice", help="orthogonal dice").add_subparsers(dest="cmd", required=True)
    p = _common(g.add_parser("list"))
    p.add_argument("--count", type=int, required=True)
    p.set_defaults(func=cmd_dice_list, name="dice list")
    p = _common(g.add_parser("from-index"))
    p.add_argument("k", type=int)
    p.set_defaults(func=cmd_dice_from_index, name="dice from-index")
    p = _common(g.add_parser("from-prime"))
    p.add_argument("p", type=int)
    p.add_argument("--check-prime", action="store_true")
    p.set_defaults(func=cmd_dice_from_prime, name="dice from-prime")
    p = _common(g.add_parser("classify"))
    p.add_argument("m", type=int)
    p.add_argument("n", type=int)
    p.set_defaults(func=cmd_dice_classify, name="dice classify")
    p = _common(g.add_parser("nearest"))
    p.add_argument("c", type=rational_arg)
    p.set_defaults(func=cmd_dice_nearest, name="dice nearest")
    p = _common(g.add_parser("first-at-least"))
    p.add_argument("c", type=rational_arg)
    p.set_defaults(func=cmd_dice_first_at_least, name="dice first-at-least")
    p = _common(g.add_parser("decompose"))
    p.add_argument("k", type=int)
    p.set_defaults(func=cmd_dice_decompose, name="dice decompose")

    g = groups.add_parser("count", help="counting helpers").add_subparsers(dest="cmd", required=True)
    p = _common(g.add_parser("coprime23"))
    p.add_argument("n", type=int)
    p.add_argument("--oracle", action="store_true", help="use the gcd scan")
    p.set_defaults(func=cmd_count_coprime23, name="count coprime23")

    g = groups.add_parser("law", help="thinned laws").add_subparsers(dest="cmd", required=True)
    for name, func in (("pmf", cmd_law_pmf), ("moments", cmd_law_moments)):
        p = _common(g.add_parser(name))
        p.add_argument("--m", type=int, required=True)
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--a", type=rational_arg, default=Fraction(1))
        if name == "moments":
            p.add_argument("--max-order", type=int, default=4)
        p.set_defaults(func=func, name=f"law {name}")
    p = _common(g.add_parser("converge"))
    p.add_argument("--k0", type=int, required=True)
    p.add_argument("--indices", type=int_list, required=True)
    p.add_argument("--grid", type=int, default=law.DEFAULT_GRID)
    p.add_argument("--tail-tol", type=float, default=law.DEFAULT_TAIL_TOL)
    p.set_defaults(func=cmd_law_converge, name="law converge")

    g = groups.add_parser("sim", help="Monte Carlo").add_subparsers(dest="cmd", required=True)
    p = _common(g.add_parser("estimate"), seed=True, threads=True)
    p.add_argument("--model", choices=("cards", "goe", "uniform"), required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--functional", required=True)
    p.add_argument("--other")
    p.add_argument("--statistic", choices=("mean", "variance", "covariance"), default="mean")
    p.add_argument("--reps", type=int, required=True)
    p.add_argument("--bootstrap", type=int, default=0)
    p.set_defaults(func=cmd_sim_estimate, name="sim estimate")

    apps = groups.add_parser("app", help="applications").add_subparsers(dest="app", required=True)
    c = apps.add_parser("cards").add_subparsers(dest="cmd", required=True)
    p = _common(c.add_parser("table"))
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_cards_table, name="app cards table")
    p = _common(c.add_parser("partition"))
    p.add_argument("--hand", type=int, required=True)
    p.add_argument("--counts", type=int_list, required=True)
    p.set_defaults(func=cmd_cards_partition, name="app cards partition")
    p = _common(c.add_parser("game"), seed=True, threads=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rounds", type=int, required=True)
    p.add_argument("--scatter", action="store_true", help="emit per-round (K, Mf) data")
    p.set_defaults(func=cmd_cards_game, name="app cards game")

    c = apps.add_parser("goe").add_subparsers(dest="cmd", required=True)
    p = _common(c.add_parser("summary"), seed=True, threads=True)
    p.add_argument("--r-grid", type=float_list, default=list(goe.DEFAULT_R_GRID))
    p.add_argument("--method", choices=("montecarlo", "quadrature"), default="montecarlo")
    p.add_argument("--samples", type=int, default=goe.DEFAULT_SAMPLES)
    p.set_defaults(func=cmd_goe_summary, name="app goe summary")
    # single keyed stream: --threads is accepted for uniformity and cannot change output
    p = _common(c.add_parser("wigner"), seed=True, threads=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--summary", action="store_true", help="moments only, no samples")
    p.set_defaults(func=cmd_goe_wigner, name="app goe wigner")

    p = _common(apps.add_parser("shotnoise"), seed=True, threads=True)
    p.add_argument("--T", type=float, default=10.0)
    p.add_argument("--ap", type=float, default=1.0)
    p.add_argument("--bp", type=float, default=1.0)
    p.add_argument("--die-index", type=int, required=True)
    p.add_argument("--grid", type=_grid_arg, default=20, help="point count or comma list of times")
    p.add_argument("--reps", type=int, default=10**4)
    p.add_argument("--paths", type=int, default=0, help="emit this many sample paths instead of moments")
    p.add_argument("--path-points", type=int, default=2001)
    p.set_defaults(func=cmd_shotnoise, name="app shotnoise")

    p = _common(apps.add_parser("gravity"), seed=True, threads=True)
    p.add_argument("--preset", choices=("milkyway",))
    p.add_argument("--density", choices=("gaussian", "disk"), default="gaussian")
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--scale-length", type=float, default=2.6)
    p.add_argument("--scale-height", type=float, default=0.3)
    p.add_argument("--die-index", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--bm", type=float, default=4.0)
    p.add_argument("--dm2", type=float, default=4.0)
    p.add_argument("--G", type=float, default=1.0)
    p.add_argument("--z", type=point_arg, default=(4.0, 0.0, 0.0))
    p.add_argument("--w", type=point_arg, default=(0.0, 4.0, 0.0))
    p.add_argument("--softening", type=float)
    p.add_argument("--no-softening", action="store_true")
    p.add_argument("--reps", type=int, default=10**4)
    p.add_argument("--points", type=int, default=10**6, help="point samples for the preset")
    p.set_defaults(func=cmd_gravity, name="app gravity")

    g = groups.add_parser("poly", help="orthogonal polynomials").add_subparsers(dest="cmd", required=True)
    p = _common(g.add_parser("report"))
    p.add_argument("--k0", type=int, required=True)
    p.add_argument("--indices", type=int_list, required=True)
    p.add_argument("--degree", type=int, default=3)
    p.add_argument("--p", type=int_list, default=[1, 2])
    p.add_argument("--plot", action="store_true", help="emit weighted polynomial curves")
    p.set_defaults(func=cmd_poly_report, name="poly report")
    return parser


def _grid_arg(text: str):
    if "," in text:
        return float_list(text)
    try:
        return int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a count or comma list: {text!r}") from exc


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if hasattr(args, "seed") and args.seed is None:
            args.seed = default_seed()
        if getattr(args, "threads", 1) < 1:
            raise UsageError("--threads must be >= 1")
        result = args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"orthodice: error: {exc}", file=sys.stderr)
        return 2
    except (OrthoDiceError, ValueError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(render(args.name, result, args.format))
    return 0


if __name__ == "__main__":
    sys.exit(main())
