"""Command line interface.

Subcommands: ``centrality``, ``sample``, ``converge`` and ``bound``.  Every
option can also come from a JSON ``--config`` file whose keys are the option
names (``alpha_frac`` or ``alpha-frac``); flags given on the command line win.
Exit codes: 0 success, 2 configuration error, 3 domain error, 4 numeric error.
"""
import argparse
import json
import os
import sys

from . import centrality as cent
from . import convergence as conv
from . import fileio, presets, sampling
from .errors import ConfigError, DomainError, NumericError

EXIT_CONFIG, EXIT_DOMAIN, EXIT_NUMERIC = 2, 3, 4

# option name -> default, per command
DEFAULTS = {
    "centrality": {
        "graphon": None, "kind": None, "alpha": None, "alpha_frac": None, "beta": None,
        "resolution": 512, "samples": 512, "out": ".", "prefix": None, "plot": True,
    },
    "sample": {
        "graphon": None, "N": None, "mode": "deterministic", "tau": 0.0, "kappa": None,
        "seed": 0, "out": ".", "prefix": None, "dense_csv": False,
    },
    "converge": {
        "preset": None, "graphon": None, "kind": None, "alpha": None, "alpha_frac": None, "beta": None,
        "N": None, "seeds": 20, "mode": "deterministic", "tau": 0.0, "delta": 0.01, "master_seed": 0,
        "jobs": 1, "out": ".", "prefix": None, "plot": True,
    },
    "bound": {
        "N": None, "L": 0.0, "K": 0, "delta": 0.01, "kappa": 1.0, "tau": None, "mode": "deterministic",
        "graphon": None, "out": None,
    },
}


def _int_list(text):
    try:
        return [int(t) for t in str(text).replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers, got {text!r}") from None


def build_parser():
    p = argparse.ArgumentParser(prog="graphon-centrality", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON file with option values")
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--prefix", help="output file name prefix")

    kinds = list(cent.KINDS)
    c = sub.add_parser("centrality", help="centrality function of a graphon")
    common(c)
    c.add_argument("--graphon", help="example-sbm, example-fr, example-wg, constant:p or a JSON file")
    c.add_argument("--kind", choices=kinds)
    c.add_argument("--alpha", type=float, help="Katz parameter")
    c.add_argument("--alpha-frac", type=float, help="Katz parameter as a fraction of 1/lambda_1")
    c.add_argument("--beta", type=float, help="PageRank damping")
    c.add_argument("--resolution", type=int, help="grid size for kernel graphons (power of two)")
    c.add_argument("--samples", type=int, help="number of CSV sample points")
    c.add_argument("--no-plot", dest="plot", action="store_const", const=False)

    s = sub.add_parser("sample", help="sample a graph from a graphon")
    common(s)
    s.add_argument("--graphon")
    s.add_argument("--N", type=int)
    s.add_argument("--mode", choices=sampling.MODES)
    s.add_argument("--tau", type=float)
    s.add_argument("--kappa", type=float, help="fixed sparsity, overrides --tau")
    s.add_argument("--seed", type=int)
    s.add_argument("--dense-csv", action="store_const", const=True, help="also write the 0/1 matrix")

    v = sub.add_parser("converge", help="convergence experiment")
    common(v)
    v.add_argument("--preset", choices=sorted(presets.EXPERIMENTS))
    v.add_argument("--graphon")
    v.add_argument("--kind", choices=kinds)
    v.add_argument("--alpha", type=float)
    v.add_argument("--alpha-frac", type=float)
    v.add_argument("--beta", type=float)
    v.add_argument("--N", type=_int_list, help="sample sizes, e.g. '64,128,256'")
    v.add_argument("--seeds", type=int, help="realisations per N")
    v.add_argument("--mode", choices=sampling.MODES)
    v.add_argument("--tau", type=float)
    v.add_argument("--delta", type=float)
    v.add_argument("--master-seed", type=int)
    v.add_argument("--jobs", type=int, help="worker threads")
    v.add_argument("--no-plot", dest="plot", action="store_const", const=False)

    b = sub.add_parser("bound", help="evaluate the operator-norm bounds")
    b.add_argument("--config")
    b.add_argument("--N", type=_int_list)
    b.add_argument("--L", type=float)
    b.add_argument("--K", type=int)
    b.add_argument("--delta", type=float)
    b.add_argument("--kappa", type=float)
    b.add_argument("--tau", type=float, help="use kappa = N^-tau")
    b.add_argument("--mode", choices=sampling.MODES)
    b.add_argument("--graphon", help="also check the sample-size condition for this graphon")
    b.add_argument("--out", help="write the JSON result to this file")
    return p


def resolve_options(command, args):
    """Merge defaults, a preset, a config file and explicit flags; later sources win."""
    opts = dict(DEFAULTS[command])
    config = {}
    if args.config:
        doc = fileio.read_json(args.config)
        if not isinstance(doc, dict):
            raise ConfigError(f"{args.config}: config must be a JSON object")
        for key, val in doc.items():
            k = key.replace("-", "_")
            if k not in opts:
                raise ConfigError(f"{args.config}: unknown key {key!r} for command {command!r}")
            config[k] = val
    preset = getattr(args, "preset", None) or config.get("preset")
    if command == "converge" and preset:
        opts.update(presets.experiment(preset))
        opts["preset"] = preset
    opts.update(config)
    for k in opts:
        val = getattr(args, k, None)
        if val is not None:
            opts[k] = val
    return opts


def _require(opts, *keys):
    missing = [k for k in keys if opts.get(k) is None]
    if missing:
        raise ConfigError("missing required option(s): " + ", ".join("--" + k.replace("_", "-") for k in missing))


def _alpha(opts, W):
    if opts.get("kind") != "katz":
        return None
    if opts.get("alpha") is not None and opts.get("alpha_frac") is not None:
        raise ConfigError("give either --alpha or --alpha-frac, not both")
    if opts.get("alpha_frac") is not None:
        frac = float(opts["alpha_frac"])
        if not 0 < frac < 1:
            raise DomainError(f"--alpha-frac must lie in (0, 1), got {frac}")
        return frac / cent.principal_eigenvalue(W, opts.get("resolution") or 512)
    if opts.get("alpha") is None:
        raise ConfigError("Katz needs --alpha or --alpha-frac")
    return float(opts["alpha"])


def _beta(opts):
    if opts.get("kind") != "pagerank":
        return None
    if opts.get("beta") is None:
        raise ConfigError("PageRank needs --beta")
    return float(opts["beta"])


def _label(ref):
    if isinstance(ref, str) and os.path.exists(ref):
        return os.path.splitext(os.path.basename(ref))[0]
    return str(ref).replace(":", "-")


def cmd_centrality(opts):
    _require(opts, "graphon", "kind")
    W = presets.resolve_graphon(opts["graphon"])
    kind = opts["kind"]
    c = cent.graphon_centrality(W, kind, _alpha(opts, W), _beta(opts), resolution=int(opts["resolution"]))
    prefix = os.path.join(opts["out"], opts["prefix"] or f"{_label(opts['graphon'])}-{kind}")
    doc = c.to_dict()
    fileio.write_json(prefix + ".json", doc)
    x, y = c.samples(int(opts["samples"]))
    fileio.write_csv(prefix + ".csv", [("x", "value")] + list(zip(x.tolist(), y.tolist())))
    files = [prefix + ".json", prefix + ".csv"]
    if opts["plot"]:
        from .plotting import plot_centrality

        files.append(plot_centrality(c, prefix + ".svg", title=f"{W.name or W.variant}: {kind}"))
    summary = {"kind": kind, "params": c.params, "representation": doc["representation"], "files": files}
    if "coefficients" in doc and len(doc["coefficients"]) <= 16:
        summary["coefficients"] = doc["coefficients"]
    elif "values" in doc and len(doc["values"]) <= 16:
        summary["values"] = doc["values"]
    summary["meta"] = doc["meta"]
    return summary


def cmd_sample(opts):
    _require(opts, "graphon", "N")
    W = presets.resolve_graphon(opts["graphon"])
    g = sampling.sample_graph(W, int(opts["N"]), opts["mode"], float(opts["tau"]), int(opts["seed"]), opts["kappa"])
    prefix = os.path.join(opts["out"], opts["prefix"] or f"{_label(opts['graphon'])}-N{g.N}-seed{g.seed}")
    fileio.write_json(prefix + ".json", g.to_dict())
    files = [prefix + ".json"]
    if opts["dense_csv"]:
        fileio.write_csv(prefix + ".csv", g.S.tolist())
        files.append(prefix + ".csv")
    return {**{k: v for k, v in g.header().items() if k != "latents"}, "files": files}


def cmd_converge(opts):
    _require(opts, "graphon", "kind", "N")
    W = presets.resolve_graphon(opts["graphon"])
    kind = opts["kind"]
    report = conv.run_convergence(
        W, kind, list(opts["N"]), int(opts["seeds"]), opts["mode"], float(opts["tau"]),
        alpha=_alpha(opts, W), beta=_beta(opts), master_seed=int(opts["master_seed"]),
        delta=float(opts["delta"]), jobs=int(opts["jobs"]),
    )
    name = opts["prefix"] or opts.get("preset") or f"{_label(opts['graphon'])}-{kind}-convergence"
    prefix = os.path.join(opts["out"], name)
    fileio.write_json(prefix + ".json", report.to_dict())
    fileio.write_csv(prefix + ".csv", conv.report_csv_rows(report))
    files = [prefix + ".json", prefix + ".csv"]
    if opts["plot"]:
        from .plotting import plot_convergence

        files.append(plot_convergence(report, prefix + ".svg"))
    table = [{k: r[k] for k in ("N", "aligned", "mean_error", "std_error", "n_seeds")} for r in report.rows]
    return {"rows": table, "fitted_rate": report.fitted_rate, "fitted_C": report.fitted_C, "flags": report.flags, "files": files}


def cmd_bound(opts):
    _require(opts, "N")
    Ns = opts["N"] if isinstance(opts["N"], list) else [int(opts["N"])]
    bp = conv.BoundParams(float(opts["L"]), int(opts["K"]), float(opts["delta"]), opts["mode"])
    W = presets.resolve_graphon(opts["graphon"]) if opts.get("graphon") else None
    rows = []
    for N in Ns:
        kappa = sampling.kappa_schedule(N, float(opts["tau"])) if opts.get("tau") is not None else float(opts["kappa"])
        r = conv.rho(N, bp)
        row = {"N": N, "kappa": kappa, "d_N": r.d_N, "rho": r.rho, "sampled_bound": conv.sampled_bound(N, kappa, bp)}
        if W is not None:
            cond = conv.max_degree_condition(W, N, bp)
            row["degree_condition"] = cond._asdict()
        rows.append(row)
    out = {"L": bp.L, "K": bp.K, "delta": bp.delta, "mode": bp.mode, "rows": rows}
    if opts.get("out"):
        fileio.write_json(opts["out"], out)
    return out


COMMANDS = {"centrality": cmd_centrality, "sample": cmd_sample, "converge": cmd_converge, "bound": cmd_bound}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        opts = resolve_options(args.command, args)
        result = COMMANDS[args.command](opts)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    sys.stdout.write(fileio.canonical_json(result))
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
