"""Command-line interface: extract, dist, knn, bench, band-dump, synth."""

from __future__ import annotations

import argparse
import logging
import sys
import warnings
from dataclasses import replace

import numpy as np

from . import bench
from .banding import BandMask, parse_approach
from .datasets import generate_synthetic, load_ucr, save_ucr
from .descriptor import FeatureParams, FeatureSet, extract_features
from .dtw import constraint_band, full_dtw, sdtw_distance
from .errors import BandInvariantError, DataError, InvalidInputError

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INVARIANT = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _feature_flags(p):
    g = p.add_argument_group("feature parameters")
    g.add_argument("--octaves", type=int, default=None)
    g.add_argument("--levels", type=int, default=2)
    g.add_argument("--epsilon", type=float, default=0.0096)
    g.add_argument("--base-sigma", type=float, default=1.6)
    g.add_argument("--bins", type=int, default=64, help="descriptor length")
    g.add_argument("--no-normalize", action="store_true")


def _match_flags(p):
    p.add_argument("--approach", required=True)
    p.add_argument("--symmetric", action="store_true")
    p.add_argument("--delta", choices=("absolute", "squared"), default="absolute")
    p.add_argument("--tau-a", type=float, default=None)
    p.add_argument("--tau-s", type=float, default=4.0)
    p.add_argument("--tau-d", type=float, default=1.5)


def _params(a) -> FeatureParams:
    try:
        return FeatureParams(a.octaves, a.levels, a.epsilon, a.base_sigma, a.bins,
                             not a.no_normalize)
    except InvalidInputError as exc:
        raise UsageError(str(exc)) from None


def _spec(name):
    try:
        return parse_approach(name)
    except InvalidInputError as exc:
        raise UsageError(str(exc)) from None


def _series_ref(token, dataset=None):
    """``FILE:IDX`` or a bare index into ``dataset``."""
    path, sep, idx = token.rpartition(":")
    if not sep:
        path, idx = dataset, token
    if path is None:
        raise UsageError(f"{token!r}: expected FILE:IDX (or pass --dataset)")
    try:
        i = int(idx)
    except ValueError:
        raise UsageError(f"{token!r}: index must be an integer") from None
    ds = load_ucr(path)
    if not 0 <= i < len(ds):
        raise UsageError(f"{token!r}: index out of range (dataset has {len(ds)} series)")
    return ds.series[i]


def _match_kw(a):
    return dict(tau_a=a.tau_a, tau_s=a.tau_s, tau_d=a.tau_d)


def cmd_extract(a):
    ds = load_ucr(a.dataset)
    params = _params(a)
    feats, secs = bench.cached_features(ds, params, a.cache)
    for i, f in enumerate(feats):
        print(f"{i}\t{ds.labels[i]}\t{len(f)}")
    total = sum(len(f) for f in feats)
    print(f"# series={len(ds)} features={total} mean={total / len(ds):.2f} "
          f"extract_ms={secs * 1e3:.1f}", file=sys.stderr)


def cmd_dist(a):
    x = _series_ref(a.a, a.dataset)
    y = _series_ref(a.b, a.dataset)
    spec = _spec(a.approach)
    params = _params(a)
    if spec is None:
        r = full_dtw(x, y, a.delta, with_path=False)
    else:
        need = spec.mode != "fc.fw"
        fx = extract_features(x, params) if need else []
        fy = extract_features(y, params) if need else []
        r = sdtw_distance(x, y, fx, fy, spec, a.symmetric, a.delta, with_path=False,
                          **_match_kw(a))
    print(f"{r.distance!r}\t{r.cells_filled}")


def cmd_knn(a):
    ds = load_ucr(a.dataset)
    n = len(ds)
    if not 1 <= a.k <= n - 1:
        raise UsageError(f"-k must be in [1, {n - 1}]")
    spec = _spec(a.approach)
    feats = None
    if spec is not None:
        feats, _ = bench.cached_features(ds, _params(a), a.cache)
        feats = [FeatureSet(f) for f in feats]
    dist = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            x, y = ds.series[i], ds.series[j]
            if spec is None:
                d = full_dtw(x, y, a.delta, with_path=False).distance
            else:
                d = sdtw_distance(x, y, feats[i], feats[j], spec, a.symmetric, a.delta,
                                  with_path=False, **_match_kw(a)).distance
            dist[i, j] = dist[j, i] = d
    labels = ds.labels.tolist()
    hits = 0
    for q, ranking in enumerate(bench.rankings(dist)):
        got = bench.knn_label_set(ranking, labels, a.k)
        hits += labels[q] in got and len(got) == 1
        print(f"{q}\t{labels[q]}\t{','.join(map(str, sorted(got)))}\t"
              f"{' '.join(map(str, ranking[:a.k]))}")
    print(f"# leave-one-out accuracy={hits / n:.4f}", file=sys.stderr)


def cmd_bench(a):
    try:
        config = bench.load_config(a.config)
    except InvalidInputError as exc:
        raise UsageError(str(exc)) from None
    except OSError as exc:
        raise DataError(str(exc)) from None
    if a.output:
        config = replace(config, output=a.output)
    for rep in bench.run_benchmark(config):
        print(f"# {rep.dataset}: {rep.n_series} series, {rep.n_pairs} pairs, "
              f"extraction {rep.extract_ms:.1f} ms, "
              f"{rep.excluded_pairs} pairs excluded from err_dist")
        print("\t".join(bench.REPORT_COLUMNS))
        for r in rep.rows:
            print("\t".join(f"{r[c]:.6g}" if isinstance(r[c], float) else str(r[c])
                            for c in bench.REPORT_COLUMNS))


def cmd_band_dump(a):
    x = _series_ref(a.i, a.dataset)
    y = _series_ref(a.j, a.dataset)
    spec = _spec(a.approach)
    if spec is None:
        band = BandMask.full(x.size, y.size)
    else:
        params = _params(a)
        band = constraint_band(x, y, extract_features(x, params),
                               extract_features(y, params), spec, a.symmetric,
                               **_match_kw(a))
    sys.stdout.write(band.dump())


def cmd_synth(a):
    ds = generate_synthetic(a.classes, a.per_class, a.length, a.warp, a.noise, a.seed)
    save_ucr(ds, a.output)
    print(f"# wrote {len(ds)} series of length {a.length} to {a.output}", file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="salientdtw",
                description="Salient-feature constrained DTW tools and benchmark.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("extract", help="extract salient features of a dataset")
    s.add_argument("dataset")
    s.add_argument("--cache", default=None, help="feature cache file (read/write)")
    _feature_flags(s)
    s.set_defaults(func=cmd_extract)

    s = sub.add_parser("dist", help="distance between two series")
    s.add_argument("a", help="FILE:IDX")
    s.add_argument("b", help="FILE:IDX")
    s.add_argument("--dataset", default=None, help="dataset for bare indices")
    _match_flags(s)
    _feature_flags(s)
    s.set_defaults(func=cmd_dist)

    s = sub.add_parser("knn", help="k nearest neighbors of every series")
    s.add_argument("dataset")
    s.add_argument("-k", type=int, required=True)
    s.add_argument("--cache", default=None)
    _match_flags(s)
    _feature_flags(s)
    s.set_defaults(func=cmd_knn)

    s = sub.add_parser("bench", help="run a benchmark config")
    s.add_argument("--config", required=True)
    s.add_argument("--output", default=None, help="override the output directory")
    s.set_defaults(func=cmd_bench)

    s = sub.add_parser("band-dump", help='print a band as "i lo hi" lines')
    s.add_argument("i", help="FILE:IDX, or an index with --dataset")
    s.add_argument("j", help="FILE:IDX, or an index with --dataset")
    s.add_argument("--dataset", default=None)
    _match_flags(s)
    _feature_flags(s)
    s.set_defaults(func=cmd_band_dump)

    s = sub.add_parser("synth", help="write a synthetic warped-bump dataset")
    s.add_argument("--classes", type=int, required=True)
    s.add_argument("--per-class", type=int, required=True)
    s.add_argument("--length", type=int, required=True)
    s.add_argument("--warp", type=float, default=0.0)
    s.add_argument("--noise", type=float, default=0.0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_synth)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    with warnings.catch_warnings():
        warnings.simplefilter("default")
        try:
            args.func(args)
        except UsageError as exc:
            print(f"salientdtw: error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        except BandInvariantError as exc:
            print(f"salientdtw: invariant violation: {exc}", file=sys.stderr)
            return EXIT_INVARIANT
        except (DataError, InvalidInputError, OSError) as exc:
            print(f"salientdtw: data error: {exc}", file=sys.stderr)
            return EXIT_DATA
        except AssertionError as exc:
            print(f"salientdtw: invariant violation: {exc}", file=sys.stderr)
            return EXIT_INVARIANT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
