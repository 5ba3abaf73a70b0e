"""
Command-line front end.

    mossgwas moss      --data FILE [--k K] ...
    mossgwas mwindow   --data FILE --window-size W
    mossgwas recode    --data FILE --out PREFIX
    mossgwas simulate  --out FILE [--config JSON] ...

Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure of
every model.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from typing import List, Optional

from . import __version__
from .core import DataError, Dataset, default_dimens_path, load_dataset, write_dataset
from .evidence import PriorConfig
from .pipeline import NumericalFailure, moss_gwas
from .simulate import SimConfig, simulate_dataset
from .stage1 import SearchConfig, default_threads
from .window import moving_window, recode_data

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4

logger = logging.getLogger("mossgwas")


class UsageError(Exception):
    pass


def _positive_float(s):
    v = float(s)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {s}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mossgwas", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, data=True):
        if data:
            p.add_argument("--data", required=True, help="CSV/TSV with header; response last")
            p.add_argument("--dimens", default=None,
                           help="sidecar file, comma list or 'auto'; default: DATA.dimens if present, else auto")
            p.add_argument("--labels", action="store_true",
                           help="map non-integer labels to codes in first-appearance order")
            p.add_argument("--alpha", type=_positive_float, default=1.0)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=None, help="output path or prefix")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--threads", type=int, default=default_threads())
        p.add_argument("-v", "--verbose", action="store_true")

    p = sub.add_parser("moss", help="two-stage stochastic search")
    common(p)
    p.add_argument("--c", type=float, default=0.1)
    p.add_argument("--c-prime", type=float, default=1e-4)
    p.add_argument("--q", type=float, default=0.1)
    p.add_argument("--replicates", type=int, default=5)
    p.add_argument("--max-vars", type=int, default=3)
    p.add_argument("--conf-vars", default=None, help="comma-separated column names forced into every regression")
    p.add_argument("--k", type=int, default=None, help="cross-validation folds; omit for stage 1 only")

    p = sub.add_parser("mwindow", help="moving-window regression scan")
    common(p)
    p.add_argument("--window-size", type=int, required=True)

    p = sub.add_parser("recode", help="optimal binary recoding of three-category columns")
    common(p)

    p = sub.add_parser("simulate", help="simulate a case-control dataset")
    common(p, data=False)
    p.add_argument("--config", default=None, help="JSON file of simulation settings")
    p.add_argument("--n-cases", type=int, default=None)
    p.add_argument("--n-controls", type=int, default=None)
    p.add_argument("--p", type=int, default=None)
    p.add_argument("--causal", default=None, help="two comma-separated 0-based SNP indices")
    return parser


def _dimens_arg(value, data_path):
    if value is None:
        # a sidecar written next to the data (as by `simulate`) wins over auto
        sidecar = default_dimens_path(data_path)
        return sidecar if os.path.exists(sidecar) else None
    if value == "auto":
        return None
    if os.path.exists(value):
        return value
    try:
        return [int(x) for x in value.split(",")]
    except ValueError:
        raise UsageError(f"--dimens: not a file or comma list: {value!r}") from None


def _load(args) -> Dataset:
    data = load_dataset(args.data, _dimens_arg(args.dimens, args.data), labels=args.labels)
    if data.n_dropped:
        logger.info("dropped %d row(s) with missing values", data.n_dropped)
    return data


def _emit(args, text: str, doc: dict) -> None:
    body = json.dumps(doc, indent=2) + "\n"
    if args.out:
        with open(args.out + ".txt", "w") as fh:
            fh.write(text)
        with open(args.out + ".json", "w") as fh:
            fh.write(body)
    sys.stdout.write(body if args.format == "json" else text)


def run_moss_command(args) -> int:
    data = _load(args)
    conf = []
    if args.conf_vars:
        conf = [data.column_index(s.strip()) for s in args.conf_vars.split(",") if s.strip()]
        if data.response_index in conf:
            raise UsageError("the response cannot be a confounding variable")
    if args.k is not None and args.k < 2:
        raise UsageError("--k must be at least 2")
    try:
        cfg = SearchConfig(c=args.c, cPrime=args.c_prime, q=args.q, replicates=args.replicates,
                           maxVars=args.max_vars, confVars=tuple(conf), seed=args.seed)
    except ValueError as err:
        raise UsageError(str(err)) from None
    report = moss_gwas(data, PriorConfig(args.alpha), cfg, k=args.k, threads=args.threads)
    _emit(args, report.to_text(), report.to_dict())
    return EXIT_OK


def run_mwindow_command(args) -> int:
    data = _load(args)
    try:
        rows = moving_window(data, PriorConfig(args.alpha), args.window_size)
    except ValueError as err:
        raise UsageError(str(err)) from None
    tsv = "formula\tlogMargLik\n" + "".join(f"{r.formula}\t{r.logMargLik:.3f}\n" for r in rows)
    doc = {"windowSize": args.window_size,
           "windows": [{"formula": r.formula, "snps": list(r.snps), "logMargLik": r.logMargLik}
                       for r in rows]}
    if args.out:
        with open(args.out + ".tsv", "w") as fh:
            fh.write(tsv)
    _emit(args, tsv, doc)
    return EXIT_OK


def run_recode_command(args) -> int:
    data = _load(args)
    res = recode_data(data, PriorConfig(args.alpha))
    doc = {"recoded_dimens": list(res.dimens),
           "codings": res.codings,
           "code_maps": {k: list(v) for k, v in res.code_maps.items()}}
    if args.out:
        write_dataset(res.data, args.out + ".csv", args.out + ".dimens")
        with open(args.out + ".codemap.json", "w") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
    n_bin = sum(1 for c in res.codings.values() if c != "original")
    text = f"{n_bin} of {len(res.codings)} three-category columns recoded as binary\n"
    sys.stdout.write(json.dumps(doc, indent=2) + "\n" if args.format == "json" else text)
    return EXIT_OK


def run_simulate_command(args) -> int:
    overrides = {"n_cases": args.n_cases, "n_controls": args.n_controls, "p": args.p,
                 "seed": args.seed}
    if args.causal:
        overrides["causal"] = tuple(int(x) for x in args.causal.split(","))
    try:
        if args.config:
            cfg = SimConfig.from_json(args.config, **overrides)
        else:
            cfg = SimConfig(**{k: v for k, v in overrides.items() if v is not None})
    except (TypeError, ValueError) as err:
        raise UsageError(str(err)) from None
    data = simulate_dataset(cfg)
    out = args.out or "simulated.csv"
    if not out.endswith((".csv", ".tsv")):
        out += ".csv"
    write_dataset(data, out, default_dimens_path(out))
    causal = [data.names[c] for c in cfg.causal]
    sys.stdout.write(f"wrote {data.n} subjects x {cfg.p} SNPs to {out}; causal SNPs: {', '.join(causal)}\n")
    return EXIT_OK


COMMANDS = {
    "moss": run_moss_command,
    "mwindow": run_mwindow_command,
    "recode": run_recode_command,
    "simulate": run_simulate_command,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as err:
        parser.error(str(err))
    except (DataError, FileNotFoundError) as err:
        print(f"data error: {err}", file=sys.stderr)
        return EXIT_DATA
    except NumericalFailure as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
