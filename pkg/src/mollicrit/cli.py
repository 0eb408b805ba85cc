"""Command-line front end.

Exit codes: 0 success, 1 a numerical check failed, 2 usage or
configuration error.  Every output file is accompanied by its run
manifest: JSON outputs embed it under ``"manifest"``, other files get a
``<name>.manifest.json`` sidecar.  Outputs depend only on the inputs, so
re-running a manifest reproduces them byte for byte; wall-clock timings are
written only with ``--timings``.
"""

import argparse
import csv
import io
import json
import os
import sys
import warnings
from dataclasses import asdict, dataclass
from pathlib import Path

from . import __version__, kernels
from .config import load_config, mollifier_config
from .constants import DEFAULT
from .errors import ConvergenceError, MollicritError, NumericalWarning
from .gfun import GFunParams, bk_table_csv, gfun_table_csv
from .mollikit import ArithmeticTables, g_dirichlet_poly, mollifier_coefficients
from .proportion import run_proportion
from .suite import report_csv, run_lemma_suite
from .zetakernel import CriticalWindow, count_zeros

EXIT_OK, EXIT_CHECK, EXIT_USAGE = 0, 1, 2


@dataclass(frozen=True)
class RunManifest:
    command: str
    arguments: dict
    config_path: str
    config_sha256: str
    output_dir: str
    tool_version: str = __version__
    deterministic: bool = True

    def to_dict(self):
        return asdict(self)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _threads(args):
    if args.threads is not None:
        return args.threads
    env = os.environ.get("MOLLICRIT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise MollicritError(f"MOLLICRIT_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def _complex_list(text):
    try:
        return [complex(p.strip().replace(" ", "")) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse complex list {text!r}") from None


def build_parser():
    p = _Parser(prog="mollicrit", description="Numerics for mollified critical-line zero proportions.")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--threads", type=int, default=None, help="worker threads (default: MOLLICRIT_THREADS or all cores)")
    p.add_argument("--out", default=".", help="output directory (default: current directory)")
    p.add_argument("--timings", action="store_true", help="also record wall-clock times (breaks byte identity)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify-lemmas", help="run the numerical identity suite, write lemma_report.csv")
    v.add_argument("--config")
    v.add_argument("--points", type=int, default=20, help="random points per continuation check")

    z = sub.add_parser("zeros", help="count sign changes of Z(t) on (t_min, t_max]")
    z.add_argument("--t-max", type=float, required=True)
    z.add_argument("--t-min", type=float, default=0.0)
    z.add_argument("--window", type=float, default=None, help="split into windows of this width, one row each")

    pr = sub.add_parser("proportion", help="I(R) and the bound factor")
    pr.add_argument("--config")
    pr.add_argument("--T", type=float, default=None)
    pr.add_argument("--grid", type=int, default=None, help="coarse Simpson grid (odd); the doubled grid is also used")
    pr.add_argument("--evaluation", choices=("convolved", "factored"), default="convolved")
    pr.add_argument("--zeros", action="store_true", help="also count zeros on [T, 2T]")

    g = sub.add_parser("gfun-table", help="continuation, approximate equation and direct sum of g")
    g.add_argument("--config")
    g.add_argument("--points", type=_complex_list, default=None, help="comma list such as 1.5+5j,0.6+5j")

    b = sub.add_parser("bk-table", help="sine coefficients of tanh(alpha x / 2)")
    b.add_argument("--alpha", type=float, required=True)
    b.add_argument("--K", type=int, default=32)

    m = sub.add_parser("mollifier-export", help="write the mollifier (and G) coefficients")
    m.add_argument("--config")
    m.add_argument("--T", type=float, default=None)
    m.add_argument("--format", choices=("bin", "csv"), default="bin")
    m.add_argument("--with-g", action="store_true")
    return p


def _manifest(args, cf):
    skip = {"threads", "out", "command", "timings", "config"}
    arguments = {}
    for k, v in sorted(vars(args).items()):
        if k in skip:
            continue
        arguments[k] = [str(x) for x in v] if isinstance(v, list) else v
    return RunManifest(
        command=args.command,
        arguments=arguments,
        config_path=getattr(args, "config", None) or "",
        config_sha256=cf.digest if cf is not None else "",
        output_dir=args.out,
    )


def _write(out_dir, name, data, manifest, sidecar=True):
    path = Path(out_dir) / name
    mode = "wb" if isinstance(data, bytes) else "w"
    kw = {} if mode == "wb" else {"encoding": "utf-8", "newline": ""}
    with open(path, mode, **kw) as fh:
        fh.write(data)
    if sidecar:
        with open(str(path) + ".manifest.json", "w", encoding="utf-8") as fh:
            fh.write(json.dumps(manifest.to_dict(), indent=2, sort_keys=True) + "\n")
    return path


def cmd_verify_lemmas(args):
    cf = load_config(args.config)
    mcfg = mollifier_config(cf)
    rows = run_lemma_suite(cf, mcfg, n_points=args.points)
    man = _manifest(args, cf)
    _write(args.out, "lemma_report.csv", report_csv(rows), man)
    failed = [r for r in rows if r.status == "fail"]
    warned = [r for r in rows if r.status == "warn"]
    for r in failed:
        print(f"FAIL {r.check}: {r.value:.3e} > {r.tolerance:.1e} {r.detail}", file=sys.stderr)
    for r in warned:
        print(f"WARN {r.check}: {r.detail}", file=sys.stderr)
    print(f"{len(rows) - len(failed) - len(warned)} passed, {len(failed)} failed, {len(warned)} warnings")
    return EXIT_CHECK if failed else EXIT_OK


def _zero_windows(t_min, t_max, width):
    if width is None or width >= t_max - t_min:
        return [(t_min, t_max)]
    if width <= 0:
        raise MollicritError("--window must be positive")
    edges = [t_min]
    while edges[-1] + width < t_max:
        edges.append(t_min + width * len(edges))
    edges.append(t_max)
    return list(zip(edges[:-1], edges[1:]))


def cmd_zeros(args):
    if args.t_max > DEFAULT.window_ceiling:
        raise MollicritError(f"--t-max {args.t_max:g} exceeds the ceiling {DEFAULT.window_ceiling:g}")
    if args.t_min < 0:
        raise MollicritError("--t-min must be non-negative")
    man = _manifest(args, None)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(("t_lo", "t_hi", "n_sign_changes", "n_rvm", "s_residual"))
    zbuf = io.StringIO()
    zw = csv.writer(zbuf, lineterminator="\r\n")
    zw.writerow(("index", "t", "bracket_lo", "bracket_hi"))
    total = 0
    if args.t_max > args.t_min:
        idx = 0
        for lo, hi in _zero_windows(args.t_min, args.t_max, args.window):
            rep = count_zeros(CriticalWindow(lo, hi), threads=_threads(args))
            w.writerow(rep.csv_row())
            total += rep.n_sign_changes
            for t, (a, b) in zip(rep.zero_locations, rep.brackets):
                idx += 1
                zw.writerow((idx, format(t, ".17g"), format(a, ".17g"), format(b, ".17g")))
    _write(args.out, "zeros.csv", buf.getvalue(), man)
    _write(args.out, "zero_locations.csv", zbuf.getvalue(), man)
    print(f"{total} sign changes on ({args.t_min:g}, {args.t_max:g}]")
    return EXIT_OK


def cmd_proportion(args):
    cf = load_config(args.config)
    cfg = mollifier_config(cf, T=args.T)
    run = run_proportion(cfg, grid_n=args.grid, evaluation=args.evaluation, with_zeros=args.zeros,
                         threads=_threads(args))
    man = _manifest(args, cf)
    d = run.to_dict(include_timing=args.timings)
    d["warning"] = "undersampled: grid doubling changed I(R) by more than 1%" if run.undersampled else ""
    d["manifest"] = man.to_dict()
    _write(args.out, "proportion.json", json.dumps(d, indent=2, sort_keys=True) + "\n", man, sidecar=False)
    _write(args.out, "proportion.csv", run.to_csv(), man)
    print(f"I(R) = {run.I_R:.12g} +- {run.quadrature_error_estimate:.2g}, bound = {run.bound:.12g}")
    if run.undersampled:
        print("warning: undersampled grid", file=sys.stderr)
    return EXIT_OK


def cmd_gfun_table(args):
    cf = load_config(args.config)
    p = GFunParams(cf.get("gfun.alpha", 0.5), cf.get("gfun.T", 50.0), cf.get("gfun.N_truncation"))
    points = args.points or [1.5 + 5j, 1.1 + 3j, 2.0 + 10j, 0.6 + 5j, 0.5 + 20j, 0.3 + 40j]
    man = _manifest(args, cf)
    _write(args.out, "gfun_table.csv", gfun_table_csv(points, p), man)
    return EXIT_OK


def cmd_bk_table(args):
    man = _manifest(args, None)
    _write(args.out, "bk_table.csv", bk_table_csv(args.alpha, args.K), man)
    return EXIT_OK


def cmd_mollifier_export(args):
    cf = load_config(args.config)
    cfg = mollifier_config(cf, T=args.T)
    man = _manifest(args, cf)
    tables = ArithmeticTables.build(max(2, int(cfg.y + 1e-9))) if cfg.kind != "identity" else None
    polys = [("mollifier", mollifier_coefficients(cfg, tables))]
    if args.with_g:
        polys.append(("g", g_dirichlet_poly(cfg)))
    for name, dp in polys:
        if args.format == "bin":
            _write(args.out, f"{name}.bin", dp.to_bytes(), man)
        else:
            _write(args.out, f"{name}.csv", dp.to_csv(), man)
    return EXIT_OK


_COMMANDS = {
    "verify-lemmas": cmd_verify_lemmas,
    "zeros": cmd_zeros,
    "proportion": cmd_proportion,
    "gfun-table": cmd_gfun_table,
    "bk-table": cmd_bk_table,
    "mollifier-export": cmd_mollifier_export,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.threads is not None and args.threads < 1:
            raise MollicritError("--threads must be positive")
        kernels.set_threads(_threads(args))
        Path(args.out).mkdir(parents=True, exist_ok=True)
        with warnings.catch_warnings():
            warnings.simplefilter("default", NumericalWarning)
            return _COMMANDS[args.command](args)
    except ConvergenceError as exc:
        print(f"mollicrit: numerical failure: {exc}", file=sys.stderr)
        return EXIT_CHECK
    except MollicritError as exc:
        print(f"mollicrit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"mollicrit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
