"""Command-line surface: simulate -> fit -> diagnose -> summarize workflows.

Exit status: 0 on success, 1 for validation problems (bad flags, malformed
data, impossible configs), 2 for runtime failures (sampler blowups, failed
convergence gate).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np
import pandas as pd

from .andersen import fit_andersen
from .diagnostics import (
    acceptance_report,
    posterior_predictive,
    psrf_matrix_from_samples,
    psrf_multivariate,
    waic,
)
from .engine import run_chain
from .errors import DataError
from .io import (
    RunConfig,
    SCHEMA_VERSION,
    load_responses,
    load_samples,
    dichotomize,
    parse_config_file,
    parse_rule,
    persist_samples,
    save_responses,
)
from .progress import (
    export_interaction_map,
    lambda_density_export,
    map_rows,
    summarize_progress,
)
from .simulate import GroupScenario, generate_group_scenario, run_replications


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # argparse exits 2 by default; the contract wants 1 for usage errors
        raise DataError(f"{message}\n{self.format_usage()}")


def _csv_ints(text):
    return [int(x) for x in str(text).split(",") if x.strip()]


def _csv_floats(text):
    return [float(x) for x in str(text).split(",") if x.strip()]


def _add_run_flags(sp):
    sp.add_argument("--config", metavar="PATH", help="key=value config file")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--chains", type=int)
    sp.add_argument("--iters", type=int)
    sp.add_argument("--burnin", type=int)
    sp.add_argument("--thin", type=int)
    sp.add_argument("--dim", type=int)
    sp.add_argument("--metric", choices=["euclidean", "poincare"])
    sp.add_argument("--radius", type=float)
    sp.add_argument("--out")


def _run_config(args, **extra) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        cfg.apply(parse_config_file(args.config))
    flags = {
        "seed": getattr(args, "seed", None),
        "chains": getattr(args, "chains", None),
        "iterations": getattr(args, "iters", None),
        "burnin": getattr(args, "burnin", None),
        "thin": getattr(args, "thin", None),
        "dim": getattr(args, "dim", None),
        "metric": getattr(args, "metric", None),
        "radius": getattr(args, "radius", None),
        "out": getattr(args, "out", None),
    }
    cfg.apply({k: v for k, v in flags.items() if v is not None})
    cfg.apply(extra)
    cfg.validate()
    return cfg


def _write_json(path, payload):
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(path)


def _load_fit_dir(path):
    """A fit directory holds either one persisted chain or chain_k/ subdirs."""
    path = Path(path)
    if (path / "manifest.json").exists():
        return [load_samples(path)]
    subdirs = sorted(
        (d for d in path.glob("chain_*") if d.is_dir()),
        key=lambda d: int(d.name.split("_")[1]),
    )
    if not subdirs:
        raise DataError(f"no persisted chains under {path}")
    return [load_samples(d) for d in subdirs]


def _pool_chains(runs):
    first = runs[0]
    if len(runs) == 1:
        return first
    if any(r.model != first.model for r in runs):
        raise DataError("cannot pool chains from different models")
    if any(not np.array_equal(r.obs_index, first.obs_index) for r in runs):
        raise DataError("cannot pool chains fitted to different data")
    kw = {}
    for f in dataclasses.fields(first):
        v = getattr(first, f.name)
        if isinstance(v, np.ndarray) and f.name != "obs_index":
            kw[f.name] = np.concatenate([getattr(r, f.name) for r in runs], axis=0)
    merged = {}
    for r in runs:
        for key, (acc, prop) in r.acceptance.items():
            slot = merged.setdefault(key, [0, 0])
            slot[0] += acc
            slot[1] += prop
    kw["acceptance"] = {k: tuple(v) for k, v in merged.items()}
    return dataclasses.replace(first, **kw)


def _require_latent(samples):
    if samples.model != "latent-process":
        raise DataError(
            f"this command needs a latent-process fit, got model {samples.model!r}"
        )


# ---------------------------------------------------------------------------
# subcommands


def cmd_simulate(args):
    sc = GroupScenario(
        group_sizes=tuple(_csv_ints(args.groups)),
        p=args.items,
        t1_prob=args.t1_prob,
        t2_probs=tuple(_csv_floats(args.t2_probs)),
        seed=args.seed if args.seed is not None else 0,
    )
    data, labels = generate_group_scenario(sc)
    if not args.out:
        raise DataError("simulate needs --out for the responses CSV")
    save_responses(data, args.out)
    print(args.out)
    if args.labels_out:
        pd.DataFrame(
            {"individual": np.arange(1, sc.n + 1), "group": labels}
        ).to_csv(args.labels_out, index=False, lineterminator="\n")
        print(args.labels_out)
    return 0


def cmd_fit(args):
    cfg = _run_config(args, input=args.data, model=args.model)
    if cfg.input is None:
        raise DataError("fit needs a responses CSV")
    if cfg.out is None:
        raise DataError("fit needs --out for the samples directory")
    data = load_responses(cfg.input)
    outdir = Path(cfg.out)
    outdir.mkdir(parents=True, exist_ok=True)
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.chains)
    for k in range(cfg.chains):
        child = int(seeds[k].generate_state(1, dtype=np.uint64)[0])
        chain_cfg = cfg.to_chain_config(seed=child)
        if cfg.model == "andersen":
            samples = fit_andersen(data, chain_cfg)
        else:
            samples = run_chain(data, chain_cfg)
        persist_samples(samples, outdir / f"chain_{k+1}")
        print(outdir / f"chain_{k+1}")
    _write_json(
        outdir / "run.json",
        {
            "schema_version": SCHEMA_VERSION,
            "command": "fit",
            "config": cfg.echo(),
        },
    )
    return 0


def cmd_diagnose(args):
    runs = _load_fit_dir(args.fit)
    outdir = Path(args.out) if args.out else Path(args.fit)
    outdir.mkdir(parents=True, exist_ok=True)
    pooled = _pool_chains(runs)

    w = waic(pooled.loglik)
    _write_json(
        outdir / "waic.json",
        {
            "lppd": w.lppd,
            "p_waic": w.p_waic,
            "elpd_waic": w.elpd_waic,
            "waic": w.waic,
            "n_chains": len(runs),
            "retained": int(pooled.n_retained),
        },
    )

    _write_json(outdir / "acceptance.json", acceptance_report(pooled))

    if len(runs) >= 2:
        if runs[0].model == "latent-process":
            stack = psrf_matrix_from_samples(runs)
        else:
            S = min(r.n_retained for r in runs)
            stack = np.stack(
                [
                    np.concatenate(
                        [
                            r.alpha[:S].reshape(S, -1),
                            r.beta[:S],
                            r.sigma_alpha2[:S, None],
                        ],
                        axis=1,
                    )
                    for r in runs
                ],
                axis=0,
            )
        res = psrf_multivariate(stack)
        _write_json(
            outdir / "psrf.json",
            {
                "psrf": res.psrf,
                "cutoff": res.cutoff,
                "n_params": res.n_params,
                "n_chains": res.n_chains,
                "converged": res.converged,
            },
        )
        if not res.converged:
            print(
                f"convergence gate failed: psrf {res.psrf:.6f} >= cutoff {res.cutoff:.6f}",
                file=sys.stderr,
            )
            return 2
    else:
        _write_json(
            outdir / "psrf.json",
            {"psrf": None, "note": "psrf needs at least 2 chains"},
        )
    return 0


def cmd_summarize(args):
    runs = _load_fit_dir(args.fit)
    pooled = _pool_chains(runs)
    _require_latent(pooled)
    outdir = Path(args.out) if args.out else Path(args.fit)
    outdir.mkdir(parents=True, exist_ok=True)
    rows = summarize_progress(pooled, threshold=args.threshold)
    _write_json(
        outdir / "summaries.json",
        {
            "threshold": args.threshold,
            "rows": [
                {
                    "individual": r.individual + 1,
                    "time": r.time,
                    "p10": r.p10,
                    "median": r.median,
                    "p90": r.p90,
                    "p2_5": r.p2_5,
                    "p97_5": r.p97_5,
                    "prob_progress": r.prob_progress,
                    "classified_progress": r.classified,
                }
                for r in rows
            ],
        },
    )
    ids = [i - 1 for i in _csv_ints(args.ids)] if args.ids else None
    grid, columns = lambda_density_export(pooled, ids=ids)
    frame = {"lambda": grid}
    for key, dens in columns.items():
        i, t = key.split(":")
        frame[f"individual_{int(i)+1}_t{t}"] = dens
    pd.DataFrame(frame).to_csv(
        outdir / "density.csv", index=False, float_format="%.10g", lineterminator="\n"
    )
    print(outdir / "density.csv")
    return 0


def cmd_predict(args):
    runs = _load_fit_dir(args.fit)
    pooled = _pool_chains(runs)
    _require_latent(pooled)
    data = load_responses(args.data)
    rng = np.random.default_rng(args.seed if args.seed is not None else 0)
    res = posterior_predictive(data, pooled, n_draws=args.draws, rng=rng)
    outdir = Path(args.out) if args.out else Path(args.fit)
    outdir.mkdir(parents=True, exist_ok=True)
    rows = list(res.rows())
    for row in rows:
        row["individual"] += 1
    pd.DataFrame(rows)[
        ["individual", "time", "observed", "lo", "mid", "hi"]
    ].to_csv(outdir / "ppc.csv", index=False, float_format="%.10g", lineterminator="\n")
    print(outdir / "ppc.csv")
    return 0


def cmd_export_map(args):
    runs = _load_fit_dir(args.fit)
    pooled = _pool_chains(runs)
    _require_latent(pooled)
    outdir = Path(args.out) if args.out else Path(args.fit)
    outdir.mkdir(parents=True, exist_ok=True)
    config = export_interaction_map(pooled)
    pd.DataFrame(list(map_rows(config))).to_csv(
        outdir / "map.csv", index=False, float_format="%.10g", lineterminator="\n"
    )
    print(outdir / "map.csv")
    return 0


def cmd_compare(args):
    labels, table = [], {}
    for fit in args.fits:
        runs = _load_fit_dir(fit)
        pooled = _pool_chains(runs)
        space = getattr(pooled, "space", None)
        if space is None:
            label = pooled.model
        elif space.rho is not None:
            label = f"{pooled.model} poincare rho={space.rho:g}"
        else:
            label = f"{pooled.model} euclidean q={space.q}"
        if label not in table:
            labels.append(label)
            table[label] = []
        table[label].append(waic(pooled.loglik).waic)

    rows = []
    for label in labels:
        w = np.asarray(table[label], dtype=float)
        p10, p50, p90 = np.percentile(w, [10.0, 50.0, 90.0])
        rows.append(
            {"model": label, "waic_p10": float(p10), "waic_median": float(p50),
             "waic_p90": float(p90), "fits": int(w.size)}
        )
    best = min(range(len(rows)), key=lambda k: rows[k]["waic_median"])
    for k, row in enumerate(rows):
        row["minimizer"] = k == best

    width = max(len(r["model"]) for r in rows)
    print(f"{'model':<{width}}  {'waic10':>12}  {'median':>12}  {'waic90':>12}  min")
    for row in rows:
        flag = "*" if row["minimizer"] else ""
        print(
            f"{row['model']:<{width}}  {row['waic_p10']:>12.3f}  "
            f"{row['waic_median']:>12.3f}  {row['waic_p90']:>12.3f}  {flag}"
        )
    if args.out:
        _write_json(args.out, {"rows": rows})
    return 0


def cmd_study(args):
    sc = GroupScenario(
        group_sizes=tuple(_csv_ints(args.groups)),
        p=args.items,
        t1_prob=args.t1_prob,
        t2_probs=tuple(_csv_floats(args.t2_probs)),
        seed=args.seed if args.seed is not None else 0,
    )
    report = run_replications(
        sc,
        q_list=_csv_ints(args.dims),
        n_reps=args.reps,
        shorten=args.shorten,
        thin=args.thin if args.thin is not None else 5,
    )
    payload = report.to_dict()
    payload["scenario"] = {
        "group_sizes": list(sc.group_sizes),
        "p": sc.p,
        "t1_prob": sc.t1_prob,
        "t2_probs": list(sc.t2_probs),
        "seed": sc.seed,
    }
    payload["shorten"] = args.shorten
    for q in report.q_list:
        p10, p50, p90 = report.waic_percentiles[q]
        print(
            f"q={q}: waic {p10:.1f} / {p50:.1f} / {p90:.1f}  "
            f"minimizer {report.minimizer_freq[q]:.0%}"
        )
    if report.failures:
        print(f"{len(report.failures)} failed fits recorded", file=sys.stderr)
    if args.out:
        _write_json(args.out, payload)
    return 0


def cmd_dichotomize(args):
    rule = parse_rule(args.map) if args.map else None
    if not args.out:
        raise DataError("dichotomize needs --out")
    dichotomize(args.data, args.out, rule)
    print(args.out)
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> _Parser:
    parser = _Parser(prog="latentprogress", description=__doc__)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    sp = sub.add_parser("simulate", parents=[], help="draw a group-probability panel")
    sp.add_argument("--groups", required=True, help="comma list of group sizes")
    sp.add_argument("--items", type=int, required=True)
    sp.add_argument("--t1-prob", type=float, required=True)
    sp.add_argument("--t2-probs", required=True, help="comma list, one per group")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--out", required=True)
    sp.add_argument("--labels-out")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("fit", help="sample the posterior and persist chains")
    sp.add_argument("data", nargs="?", help="responses CSV (or config input=)")
    sp.add_argument("--model", choices=["latent-process", "andersen"],
                    default="latent-process")
    _add_run_flags(sp)
    sp.set_defaults(func=cmd_fit)

    sp = sub.add_parser("diagnose", help="waic, psrf gate, acceptance rates")
    sp.add_argument("fit", help="fit directory")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_diagnose)

    sp = sub.add_parser("summarize", help="rate-of-progress tables and densities")
    sp.add_argument("fit")
    sp.add_argument("--threshold", type=float, default=0.5)
    sp.add_argument("--ids", help="comma list of 1-based individuals for density.csv")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_summarize)

    sp = sub.add_parser("predict", help="posterior predictive proportion checks")
    sp.add_argument("fit")
    sp.add_argument("--data", required=True)
    sp.add_argument("--draws", type=int, default=1000)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_predict)

    sp = sub.add_parser("export-map", help="aligned interaction map medians")
    sp.add_argument("fit")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_export_map)

    sp = sub.add_parser("compare", help="WAIC table across fits")
    sp.add_argument("fits", nargs="+")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("study", help="replication study over latent dimensions")
    sp.add_argument("--groups", required=True)
    sp.add_argument("--items", type=int, required=True)
    sp.add_argument("--t1-prob", type=float, required=True)
    sp.add_argument("--t2-probs", required=True)
    sp.add_argument("--dims", default="1,2,3")
    sp.add_argument("--reps", type=int, default=10)
    sp.add_argument("--shorten", type=float, default=10.0)
    sp.add_argument("--thin", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_study)

    sp = sub.add_parser("dichotomize", help="ordinal categories to binary panel")
    sp.add_argument("data")
    sp.add_argument("--out")
    sp.add_argument("--map", help="CATEGORY:BIT comma list (default 1:1,2:0,3:0,4:0)")
    sp.set_defaults(func=cmd_dichotomize)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "func", None) is None:
            parser.print_usage(sys.stderr)
            return 1
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except RuntimeError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
