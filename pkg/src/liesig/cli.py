"""Command-line interface.

Exit codes: 0 success, 2 unparseable input or arguments, 3 numeric-domain
error (a rotation step too close to angle pi), 4 coefficient budget exceeded.
Outputs are written only when a command succeeds.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import io
from .exceptions import AntipodalRotation, BudgetExceeded
from .kernel import NormalizationConfig, gram_matrix, tensor_normalize
from .lie_groups import SO3
from .paths import DiscretePath, apply_transform, parse_transform
from .randwalk import ExperimentConfig, WalkConfig, random_walk_matrices, run_experiment
from .signature import lead_matrix, level2_matrix, signature

log = logging.getLogger("liesig")

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_DOMAIN = 3
EXIT_BUDGET = 4


def _transform_arg(value: str) -> str:
    try:
        parse_transform(value)
    except ValueError as err:
        raise argparse.ArgumentTypeError(str(err)) from None
    return value


def _psi(args) -> NormalizationConfig:
    return NormalizationConfig(args.psi_cap, args.psi_decay, profile=args.psi_profile)


def cmd_signature(args) -> int:
    path = apply_transform(io.read_path(args.input), args.transform)
    t = signature(path, args.level, args.mode)
    if args.normalize:
        t = tensor_normalize(t, _psi(args))[1]
    io.write_tensor(args.output, t)
    return EXIT_OK


def _collect_inputs(source: Path) -> list[Path]:
    if source.is_dir():
        files = sorted(
            p for p in source.iterdir() if p.suffix.lower() in (".json", ".csv") and p.is_file()
        )
    else:
        base = source.parent
        files = []
        for line in source.read_text().splitlines():
            line = line.strip()
            if line and not line.startswith("#"):
                p = Path(line)
                files.append(p if p.is_absolute() else base / p)
    if not files:
        raise io.DocumentError(f"{source}: no path files found")
    return files


def sidecar_path(output) -> Path:
    output = Path(output)
    return output.with_name(output.stem + ".meta.json")


def cmd_gram(args) -> int:
    files = _collect_inputs(Path(args.input))
    paths = [io.read_path(f) for f in files]
    ids = [f.stem for f in files]
    mode = args.mode
    if mode is None and args.kernel == "naive":
        mode = "continuous"
    gram = gram_matrix(paths, args.level, args.kernel, args.normalize, _psi(args), mode, ids)
    io.write_matrix_csv(args.output, gram.values, header=ids)
    io.write_document(sidecar_path(args.output), gram.metadata())
    return EXIT_OK


def _trials_csv(reports) -> str:
    lines = ["trial,mmd,threshold,p_value,reject"]
    for i, r in enumerate(reports):
        lines.append(f"{i},{r.mmd!r},{r.threshold!r},{r.p_value!r},{int(r.reject)}")
    return "\n".join(lines) + "\n"


def cmd_hypotest(args) -> int:
    doc = io.read_document(args.config)
    if args.seed is not None:
        doc["seed"] = args.seed
    doc.setdefault("seed", 0)
    cfg = ExperimentConfig.from_dict(doc)
    log.info(
        "running %d trials (%s representation, M=%d)", cfg.trials, cfg.representation, cfg.level
    )
    summary, null = run_experiment(cfg, return_null=True)
    out = Path(args.output)
    trials_csv = Path(args.trials_csv) if args.trials_csv else out.with_name(out.stem + ".trials.csv")
    null_csv = trials_csv.with_name(out.stem + ".null.csv")
    io.write_document(out, summary.to_dict())
    io.atomic_write_text(trials_csv, _trials_csv(summary.reports))
    io.atomic_write_text(null_csv, "mmd\n" + "".join(f"{x!r}\n" for x in null.tolist()))
    log.info("%s rate %.4f", summary.error_type, summary.error_rate)
    return EXIT_OK


def cmd_randwalk(args) -> int:
    doc = io.read_document(args.config)
    count = int(doc.pop("count", 1))
    seed = doc.pop("seed", 0) if args.seed is None else args.seed
    walk_doc = doc.pop("walk", None)
    if walk_doc is None:
        walk_doc = doc
    elif doc:
        raise io.DocumentError(f"unknown randwalk fields: {sorted(doc)}")
    cfg = WalkConfig.from_dict(walk_doc)
    walks = random_walk_matrices(cfg, count, np.random.default_rng(seed))
    outdir = Path(args.output)
    names = []
    docs = []
    for i, w in enumerate(walks):
        names.append(f"walk_{i:04d}.json")
        docs.append(io.path_to_dict(DiscretePath(SO3, (w,))))
    outdir.mkdir(parents=True, exist_ok=True)
    for name, d in zip(names, docs):
        io.write_document(outdir / name, d)
    io.atomic_write_text(outdir / "manifest.txt", "\n".join(names) + "\n")
    return EXIT_OK


def cmd_leadmat(args) -> int:
    path = apply_transform(io.read_path(args.input), args.transform)
    io.write_matrix_csv(args.output, lead_matrix(path, args.mode))
    return EXIT_OK


def cmd_level2(args) -> int:
    path = apply_transform(io.read_path(args.input), args.transform)
    io.write_matrix_csv(args.output, level2_matrix(path, args.mode))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="liesig", description="Signatures and signature kernels for Lie group time series."
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_psi(p):
        p.add_argument("--psi-cap", type=float, default=4.0, help="psi cap M (default 4)")
        p.add_argument("--psi-decay", type=float, default=1.0, help="psi decay a (default 1)")
        p.add_argument("--psi-profile", choices=("printed", "squared"), default="printed",
                       help="tail of psi beyond sqrt(M) (default printed)")

    p = sub.add_parser("signature", help="truncated signature of one path")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--mode", choices=("continuous", "discrete"), default="continuous")
    p.add_argument("--transform", type=_transform_arg, default="none",
                   help="none | time | idinit | swin:<lags>")
    p.add_argument("--normalize", action="store_true")
    add_psi(p)
    p.set_defaults(func=cmd_signature)

    p = sub.add_parser("gram", help="Gram matrix over a directory or manifest of paths")
    p.add_argument("input", help="directory of path files or a manifest listing them")
    p.add_argument("output", help="CSV output; metadata goes to <stem>.meta.json")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--kernel", choices=("horner", "naive"), default="horner")
    p.add_argument("--mode", choices=("continuous", "discrete"), default=None,
                   help="signature used by the naive kernel (default continuous)")
    p.add_argument("--normalize", action="store_true")
    add_psi(p)
    p.set_defaults(func=cmd_gram)

    p = sub.add_parser("hypotest", help="repeated two-sample tests on SO(3) random walks")
    p.add_argument("config")
    p.add_argument("output")
    p.add_argument("--trials-csv", default=None, help="per-trial CSV (default <stem>.trials.csv)")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_hypotest)

    p = sub.add_parser("randwalk", help="sample SO(3) random walks to path files")
    p.add_argument("config")
    p.add_argument("output", help="output directory")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_randwalk)

    for name, func, text in (
        ("leadmat", cmd_leadmat, "lead matrix of one path as CSV"),
        ("level2", cmd_level2, "level-2 signature matrix of one path as CSV"),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("input")
        p.add_argument("output")
        p.add_argument("--mode", choices=("continuous", "discrete"), default="continuous")
        p.add_argument("--transform", type=_transform_arg, default="none")
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        stream=sys.stderr,
        format="liesig: %(message)s",
    )
    try:
        return args.func(args)
    except AntipodalRotation as err:
        print(f"liesig: error: {err}", file=sys.stderr)
        if err.step is not None:
            print(f"liesig: offending step index: {err.step}", file=sys.stderr)
        return EXIT_DOMAIN
    except BudgetExceeded as err:
        print(f"liesig: error: {err}", file=sys.stderr)
        return EXIT_BUDGET
    except (OSError, ValueError, KeyError, TypeError) as err:
        print(f"liesig: error: {err}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
