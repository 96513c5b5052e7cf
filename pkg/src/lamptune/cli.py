"""Command-line entry point: ``lamptune <subcommand> ...``."""

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .dataset import format_scale, load_csv, minmax_scale, parse_scale, resolve_data_path
from .errors import InputError, NumericalError
from .lamp import DEFAULT_EXTENT, project_dataset, read_anchors, read_projection, write_projection
from .metrics import DEFAULT_K, PUBLISHED_WEIGHTS, MetricWeights, score_projection
from .render import RenderSpec, render_scatter
from .trainer import evaluate, fit_weights, read_grades, split_train_test
from .tuner import SweepConfig, best_scale, coarse_then_fine, comparison_report, sweep

log = logging.getLogger("lamptune")

METRIC_FIELDS = ("dataset", "scale", "seed", "k", "m1", "m2", "m3", "score")


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors: exit 1, not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_data_args(p):
    p.add_argument("--data", required=True,
                   help="CSV path, or a bundled dataset: iris, wine, vehicle, segment")
    p.add_argument("--label", default="class", help="label column name or 0-based index")
    p.add_argument("--columns", help="comma-separated feature columns to keep")


def _add_weights_arg(p):
    p.add_argument("--weights", help="weights JSON {w1, w2, w3}; default: published weights")


def build_parser():
    parser = _Parser(prog="lamptune", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("project", help="LAMP projection of a dataset to CSV and SVG")
    _add_data_args(p)
    p.add_argument("--scale", default="raw", type=parse_scale)
    p.add_argument("--controls", type=int, help="control count (default ceil(sqrt(n)))")
    p.add_argument("--anchors", help="anchors override CSV with columns index,x,y")
    p.add_argument("--extent", type=float, default=DEFAULT_EXTENT,
                   help="side of the box the seeded anchors are fitted to; 0 keeps raw PCA")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="projection CSV path")
    p.add_argument("--svg", help="SVG path (default: next to --out)")
    p.add_argument("--no-svg", action="store_true")

    p = sub.add_parser("evaluate", help="score a projection: one metric report row")
    _add_data_args(p)
    p.add_argument("--projection", required=True, help="projection CSV (row,x,y,label)")
    p.add_argument("--scale", default="raw", type=parse_scale,
                   help="scaling applied to the data before comparison")
    p.add_argument("--k", type=int, default=DEFAULT_K)
    p.add_argument("--seed", type=int, default=0, help="recorded in the report row")
    _add_weights_arg(p)
    p.add_argument("--out", help="append the row to this CSV (header written if new)")

    p = sub.add_parser("train", help="fit metric weights to graded projections")
    p.add_argument("--grades", required=True, help="CSV m1,m2,m3,grade,dataset,scale,seed")
    p.add_argument("--ratio", type=float, default=0.7)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--by-dataset", action="store_true",
                   help="apply the split ratio within each dataset")
    p.add_argument("--out", default=".", help="output directory")

    p = sub.add_parser("tune", help="sweep the scale and report the best one")
    _add_data_args(p)
    p.add_argument("--min", type=float, default=0.1, dest="lo")
    p.add_argument("--max", type=float, default=1.0, dest="hi")
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--scales", help="explicit comma-separated grid (overrides min/max/steps)")
    p.add_argument("--protocol", choices=("grid", "coarse-fine"), default="grid",
                   help="coarse-fine: decade grid 0.01..100, then refine around the best")
    p.add_argument("--include-raw", action="store_true")
    p.add_argument("--k", type=int, default=DEFAULT_K)
    p.add_argument("--controls", type=int)
    p.add_argument("--extent", type=float, default=DEFAULT_EXTENT)
    p.add_argument("--seed", type=int, default=0)
    _add_weights_arg(p)
    p.add_argument("--out", help="sweep JSON path (default: stdout)")
    p.add_argument("--svg-dir", help="write one SVG per scale into this directory")

    p = sub.add_parser("render", help="SVG scatter plot of a projection CSV")
    p.add_argument("--projection", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--title", help="annotation text")
    p.add_argument("--size", type=int, default=480)

    p = sub.add_parser("report", help="summarise metric report rows per dataset")
    p.add_argument("--metrics", required=True, nargs="+", help="metric report CSV files")
    p.add_argument("--out", help="summary CSV path (default: text table on stdout)")
    return parser


def _load(args):
    columns = args.columns.split(",") if args.columns else None
    path = resolve_data_path(args.data)
    return load_csv(path, label_column=args.label, columns=columns, name=Path(args.data).stem)


def _weights(args):
    if not args.weights:
        return PUBLISHED_WEIGHTS
    with open(args.weights, encoding="utf-8") as fh:
        try:
            return MetricWeights.from_dict(json.load(fh))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"{args.weights}: bad weights file: {exc}") from None


def _metric_row(name, scale, seed, metrics, score):
    return [name, format_scale(scale), seed, metrics.k_used,
            repr(float(metrics.m1)), repr(float(metrics.m2)), repr(float(metrics.m3)), repr(float(score))]


def _annotation(metrics, score):
    return (f"m1={metrics.m1:.3f}  m2={metrics.m2:.3f}  m3={metrics.m3:.3f}  "
            f"score={score:.3f}")


def cmd_project(args):
    data = _load(args)
    indices = anchors = None
    if args.anchors:
        indices, anchors = read_anchors(args.anchors)
    extent = args.extent if args.extent > 0 else None
    scaled, proj = project_dataset(data, scale=args.scale, seed=args.seed,
                                   controls=args.controls, anchors=anchors,
                                   extent=extent, indices=indices)
    write_projection(args.out, proj, data.labels)
    log.info("wrote %s", args.out)
    if not args.no_svg:
        svg_path = args.svg or str(Path(args.out).with_suffix(".svg"))
        Path(svg_path).write_text(render_scatter(proj.coords, data.labels), encoding="utf-8")
        log.info("wrote %s", svg_path)
    return 0


def cmd_evaluate(args):
    data = minmax_scale(_load(args), args.scale)
    coords, _ = read_projection(args.projection)
    metrics, score = score_projection(data, coords, k=args.k, weights=_weights(args))
    row = _metric_row(data.name, args.scale, args.seed, metrics, score)
    if args.out:
        out = Path(args.out)
        fresh = not out.exists() or out.stat().st_size == 0
        with open(out, "a", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            if fresh:
                w.writerow(METRIC_FIELDS)
            w.writerow(row)
    else:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(METRIC_FIELDS)
        w.writerow(row)
    return 0


def cmd_train(args):
    samples = read_grades(args.grades)
    split = split_train_test(samples, args.ratio, args.seed, by_dataset=args.by_dataset)
    weights = fit_weights(split.train)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "weights.json").write_text(json.dumps(weights.to_dict(), indent=2) + "\n",
                                      encoding="utf-8")
    stats = {"train": evaluate(split.train, weights)}
    if split.test:
        stats["test"] = evaluate(split.test, weights)
    with open(out / "stats.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["split", "mae", "median", "std"])
        for name, st in stats.items():
            w.writerow([name, repr(st.mae), repr(st.median), repr(st.std)])
    with open(out / "histogram.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["split", "lo", "hi", "count"])
        for name, st in stats.items():
            edges = st.bin_edges
            for i, count in enumerate(st.histogram):
                w.writerow([name, edges[i], edges[i + 1], int(count)])
    with open(out / "split.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["dataset", "train", "test", "total"])
        counts = split.counts_by_dataset()
        for name, (tr, te, tot) in counts.items():
            w.writerow([name, tr, te, tot])
        w.writerow(["total", len(split.train), len(split.test), len(samples)])
    print(json.dumps(weights.to_dict()))
    return 0


def _sweep_svgs(data, table, config, directory):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for e in table.entries:
        _, proj = project_dataset(data, scale=e.scale, seed=config.seed, extent=config.extent,
                           indices=table.control_indices)
        spec = RenderSpec(annotation=f"scale={format_scale(e.scale)}  "
                          + _annotation(e.metrics, e.score))
        name = f"{data.name}_scale_{format_scale(e.scale)}.svg"
        (directory / name).write_text(render_scatter(proj.coords, data.labels, spec),
                                      encoding="utf-8")


def cmd_tune(args):
    data = _load(args)
    scales = None
    if args.scales:
        scales = tuple(parse_scale(s) for s in args.scales.split(",") if s.strip())
    config = SweepConfig(a=args.lo, b=args.hi, steps=args.steps, k=args.k,
                         weights=_weights(args), seed=args.seed,
                         include_raw=args.include_raw, controls=args.controls,
                         extent=args.extent, scales=scales)
    if args.protocol == "coarse-fine":
        coarse, fine = coarse_then_fine(data, config)
        doc = {"dataset": data.name, "protocol": "coarse-fine",
               "config": config.to_dict(),
               "coarse": coarse.to_dict(), "fine": fine.to_dict(),
               "best_scale": fine.to_dict()["best_scale"],
               "comparison": comparison_report(data.name, coarse, fine)}
        tables = (coarse, fine)
    else:
        table = sweep(data, config)
        doc = {"dataset": data.name, "protocol": "grid", "config": config.to_dict(),
               **table.to_dict()}
        tables = (table,)
    text = json.dumps(doc, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if args.svg_dir:
        for table in tables:
            _sweep_svgs(data, table, config, args.svg_dir)
    log.info("best scale: %s", format_scale(best_scale(tables[-1])))
    return 0


def cmd_render(args):
    coords, labels = read_projection(args.projection)
    spec = RenderSpec(width=args.size, height=args.size, annotation=args.title)
    Path(args.out).write_text(render_scatter(coords, labels, spec), encoding="utf-8")
    return 0


def cmd_report(args):
    rows = []
    for path in args.metrics:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            missing = set(METRIC_FIELDS) - set(reader.fieldnames or ())
            if missing:
                raise InputError(f"{path}: missing columns {sorted(missing)}")
            rows.extend(reader)
    if not rows:
        raise InputError("no metric rows to summarise")
    summary = []
    for name in dict.fromkeys(r["dataset"] for r in rows):
        group = [r for r in rows if r["dataset"] == name]
        scores = np.array([float(r["score"]) for r in group])
        best = group[int(np.argmax(scores))]
        summary.append({
            "dataset": name, "rows": len(group),
            "best_scale": best["scale"], "best_score": float(scores.max()),
            "mean_score": float(scores.mean()),
            "mean_m1": float(np.mean([float(r["m1"]) for r in group])),
            "mean_m2": float(np.mean([float(r["m2"]) for r in group])),
            "mean_m3": float(np.mean([float(r["m3"]) for r in group])),
        })
    fields = list(summary[0])
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            w = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
            w.writeheader()
            w.writerows(summary)
    else:
        sys.stdout.write(_text_table(fields, summary))
    return 0


def _text_table(fields, rows):
    cells = [[f"{r[f]:.4f}" if isinstance(r[f], float) else str(r[f]) for f in fields]
             for r in rows]
    widths = [max(len(f), *(len(c[i]) for c in cells)) for i, f in enumerate(fields)]
    buf = io.StringIO()
    buf.write("  ".join(f.ljust(w) for f, w in zip(fields, widths)).rstrip() + "\n")
    for c in cells:
        buf.write("  ".join(v.ljust(w) for v, w in zip(c, widths)).rstrip() + "\n")
    return buf.getvalue()


COMMANDS = {
    "project": cmd_project,
    "evaluate": cmd_evaluate,
    "train": cmd_train,
    "tune": cmd_tune,
    "render": cmd_render,
    "report": cmd_report,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except NumericalError as exc:
        print(f"lamptune: numerical failure: {exc}", file=sys.stderr)
        return 2
    except (InputError, OSError, ValueError) as exc:
        print(f"lamptune: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
