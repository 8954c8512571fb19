"""Command line front end.

Every subcommand writes one JSON document (default) or CSV table that echoes
its configuration, so identical invocations give byte-identical output.

Exit codes: 0 success, 2 invalid input, 3 resource cap exceeded.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

from ._validation import format_digits, format_rational, parse_digits, parse_rational
from .dynamics import UniformSampler, frequency_experiment
from .exceptions import DepthShortfall, ResourceCapExceeded, ValidationError
from .expansion import cylinder, encode, partial_sums, q_from_g
from .measure import (
    DEFAULT_MAX_WORK,
    a_k_measure,
    cover_measure,
    hausdorff_alpha_volume,
    hausdorff_ratio_threshold,
    parse_constraint,
)
from .random_eta import (
    discreteness_criterion,
    parse_matrix,
    sample_eta_batch,
    samples_csv_rows,
    singularity_experiment,
)

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_CAP = 3


class UsageError(ValidationError):
    pass


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _config(args, *names) -> dict:
    cfg = {"command": args.command, "seed": args.seed}
    for name in names:
        value = getattr(args, name)
        cfg[name] = format_rational(value) if isinstance(value, Fraction) else value
    return cfg


# each command returns (document, rows); rows is a header-first table or None


def cmd_expand(args):
    x = parse_rational(args.x)
    g = encode(x)
    q = q_from_g(g)
    sums = partial_sums(g)
    shown = len(g) if args.depth is None else min(args.depth, len(g))
    doc = {
        "config": _config(args, "x", "depth"),
        "x": format_rational(x),
        "q": list(q.digits[:shown]),
        "g": list(g.digits[:shown]),
        "length": len(g),
        "partial_sums": [format_rational(s) for s in sums[:shown]],
        "value": format_rational(sums[-1]),
        "exact_match": sums[-1] == x,
    }
    rows = [["k", "q", "g", "partial_sum"]]
    rows += [[k + 1, q[k], g[k], format_rational(sums[k])] for k in range(shown)]
    return doc, rows


def cmd_cylinder(args):
    prefix = parse_digits(args.prefix)
    cyl = cylinder(prefix)
    doc = {
        "config": _config(args, "prefix"),
        "prefix": list(cyl.prefix),
        "sigma": list(cyl.sigma),
        "left": format_rational(cyl.left),
        "right": format_rational(cyl.right),
        "length": format_rational(cyl.length),
    }
    rows = [["prefix", "left", "right", "length"],
            [format_digits(cyl.prefix), doc["left"], doc["right"], doc["length"]]]
    return doc, rows


def cmd_measure(args):
    constraint = parse_constraint(_read_text(args.constraint))
    estimate = cover_measure(
        constraint, args.depth, args.cutoff, args.precision, args.max_work
    )
    doc = {"config": _config(args, "constraint", "depth", "cutoff", "precision", "max_work")}
    doc["constraint_levels"] = [str(level) for level in constraint.levels]
    doc.update(estimate.to_dict())
    rows = [["lower", "upper", "depth", "cutoff", "exact"],
            [doc["lower"], doc["upper"], args.depth, args.cutoff, estimate.exact]]
    return doc, rows


def cmd_hausdorff(args):
    alpha = parse_rational(args.alpha)
    threshold = hausdorff_ratio_threshold(args.n, alpha)
    table = []
    for k in range(1, args.k_max + 1):
        volume = hausdorff_alpha_volume(args.n, alpha, k, args.precision)
        table.append({"k": k, "volume": format_rational(volume)})
    doc = {
        "config": _config(args, "n", "alpha", "k_max", "precision"),
        "decreasing_from_k": threshold,
        "volume_is_upper_bound": True,
        "relative_resolution": f"2^-{args.precision}",
        "table": table,
    }
    rows = [["k", "volume"]] + [[r["k"], r["volume"]] for r in table]
    return doc, rows


def cmd_a_k_measure(args):
    estimate = a_k_measure(args.digit, args.k, args.cutoff, args.precision, args.max_work)
    doc = {"config": _config(args, "digit", "k", "cutoff", "precision", "max_work")}
    doc.update(estimate.to_dict())
    rows = [["digit", "k", "lower", "upper", "exact"],
            [args.digit, args.k, doc["lower"], doc["upper"], estimate.exact]]
    return doc, rows


def cmd_frequency(args):
    report = frequency_experiment(
        UniformSampler(args.bits, args.seed), args.samples, args.depth, args.digit, args.workers
    )
    doc = report.summary()
    doc["config"]["command"] = args.command
    rows = list(csv.reader(io.StringIO(report.to_csv())))
    return doc, rows


def cmd_eta(args):
    matrix = parse_matrix(_read_text(args.matrix))
    drawn = sample_eta_batch(matrix, args.depth, args.samples, args.seed, args.workers)
    verdict = discreteness_criterion(matrix, args.depth)
    doc = {
        "config": _config(args, "matrix", "samples", "depth"),
        "matrix_rows": matrix.describe(),
        "purity": verdict.to_dict(),
        "samples": [
            {
                "index": s.index,
                "digits": format_digits(s.digits),
                "left": format_rational(s.cylinder.left),
                "right": format_rational(s.cylinder.right),
                "width": format_rational(s.cylinder.length),
            }
            for s in drawn
        ],
    }
    rows = [["index", "left", "right", "digits"]] + samples_csv_rows(drawn)
    return doc, rows


def cmd_singularity(args):
    matrix = parse_matrix(_read_text(args.matrix))
    report = singularity_experiment(
        matrix, args.digit, args.samples, args.depth, args.seed, args.bits, args.workers
    )
    doc = report.summary()
    doc["config"]["command"] = args.command
    doc["config"]["matrix_file"] = args.matrix
    rows = [["index", "left", "right", "digits"]] + samples_csv_rows(report.samples)
    return doc, rows


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", help="write here instead of stdout")
    common.add_argument("--workers", type=int, default=1)

    parser = argparse.ArgumentParser(
        prog="pierce", description="Exact Pierce-expansion experiments."
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("expand", parents=[common], help="digits and partial sums of a rational")
    p.add_argument("x", help="rational in (0,1), e.g. 2/5")
    p.add_argument("--depth", type=int)
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("cylinder", parents=[common], help="endpoints of a digit-prefix cylinder")
    p.add_argument("prefix", nargs="?", default="", help="comma separated digits")
    p.set_defaults(func=cmd_cylinder)

    p = sub.add_parser("measure", parents=[common], help="cover measure of a digit constraint")
    p.add_argument("constraint", help="constraint file")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--cutoff", type=int)
    p.add_argument("--precision", type=int, help="fixed-point bits instead of exact sums")
    p.add_argument("--max-work", type=int, default=DEFAULT_MAX_WORK)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("hausdorff", parents=[common], help="alpha-volumes of the canonical covers")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", required=True)
    p.add_argument("--k-max", type=int, required=True)
    p.add_argument("--precision", type=int, default=256)
    p.set_defaults(func=cmd_hausdorff)

    p = sub.add_parser("a-k-measure", parents=[common], help="measure of {g_k = digit}")
    p.add_argument("--digit", type=int, default=1)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--cutoff", type=int)
    p.add_argument("--precision", type=int)
    p.add_argument("--max-work", type=int, default=DEFAULT_MAX_WORK)
    p.set_defaults(func=cmd_a_k_measure)

    p = sub.add_parser("frequency", parents=[common], help="digit counts of uniform samples")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--depth", type=int, default=100)
    p.add_argument("--bits", type=int, default=1024)
    p.add_argument("--digit", type=int, default=1)
    p.set_defaults(func=cmd_frequency)

    p = sub.add_parser("eta", parents=[common], help="sample the random series")
    p.add_argument("matrix", help="stochastic matrix file")
    p.add_argument("--samples", type=int, default=10)
    p.add_argument("--depth", type=int, default=100)
    p.set_defaults(func=cmd_eta)

    p = sub.add_parser("singularity", parents=[common], help="eta vs Lebesgue digit frequencies")
    p.add_argument("matrix", help="stochastic matrix file")
    p.add_argument("--digit", type=int, default=1)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--depth", type=int, default=100)
    p.add_argument("--bits", type=int, default=1024)
    p.set_defaults(func=cmd_singularity)
    return parser


def _render(doc, rows, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        doc, rows = args.func(args)
    except ResourceCapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ValidationError, DepthShortfall) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    text = _render(doc, rows, args.format)
    if args.out:
        Path(args.out).write_text(text)
        log.info("wrote %s", args.out)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
