"""Evaluation metrics, feature cache, config files, and the benchmark runner."""

from __future__ import annotations

import csv
import logging
import time
import warnings
from collections import Counter
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .banding import parse_approach
from .datasets import Dataset, generate_synthetic, load_ucr
from .descriptor import FeatureParams, FeatureSet, SalientFeature, extract_features
from .dtw import banded_dtw, constraint_band, full_dtw
from .errors import DataError, InvalidInputError
from .scale_space import SalientPoint

log = logging.getLogger(__name__)

DEFAULT_APPROACHES = ("dtw", "fc.fw@6%", "fc.fw@10%", "fc.fw@20%", "fc.aw",
                      "ac.fw@6%", "ac.fw@10%", "ac.fw@20%", "ac.aw", "ac2.aw")
REPORT_COLUMNS = ("approach", "k", "acc_ret", "err_dist", "acc_cls", "timegain",
                  "mean_cells_filled", "match_ms", "dp_ms")
TIMING_COLUMNS = ("timegain", "match_ms", "dp_ms")


# -- metrics ---------------------------------------------------------------

def rankings(dist: np.ndarray) -> list[list[int]]:
    """Per query, the other items by ascending distance (ties by index)."""
    n = dist.shape[0]
    idx = np.arange(n)
    out = []
    for q in range(n):
        others = idx[idx != q]
        out.append(others[np.lexsort((others, dist[q, others]))].tolist())
    return out


def metric_acc_ret(k: int, top_full, top_constrained) -> float:
    """Mean top-k overlap fraction between two per-query rankings."""
    if k < 1:
        raise InvalidInputError("k must be >= 1")
    if len(top_full) != len(top_constrained):
        raise InvalidInputError("rankings cover different query sets")
    if not top_full:
        raise InvalidInputError("no queries")
    if any(len(r) < k for r in top_full) or any(len(r) < k for r in top_constrained):
        raise InvalidInputError(f"k={k} exceeds the number of candidates per query")
    return float(np.mean([len(set(a[:k]) & set(b[:k])) / k
                          for a, b in zip(top_full, top_constrained)]))


def metric_err_dist(full, constrained, return_excluded=False):
    """Mean relative excess ``(d* - d) / d`` over pairs with ``d > 0``."""
    full = np.asarray(full, dtype=np.float64)
    constrained = np.asarray(constrained, dtype=np.float64)
    if full.shape != constrained.shape:
        raise InvalidInputError("distance lists differ in length")
    valid = full > 0
    if not valid.any():
        raise InvalidInputError("no valid pairs (all full-DTW distances are 0)")
    err = float(np.mean((constrained[valid] - full[valid]) / full[valid]))
    if return_excluded:
        return err, int((~valid).sum())
    return err


def knn_label_set(ranking, labels, k: int) -> frozenset:
    """Labels with the highest count among the first ``k`` neighbors."""
    counts = Counter(labels[j] for j in ranking[:k])
    top = max(counts.values())
    return frozenset(lab for lab, c in counts.items() if c == top)


def metric_acc_cls(k: int, labels_full, labels_constrained) -> float:
    """Mean Jaccard overlap of per-query kNN label sets.

    Each entry is either a label set (used as is) or the labels of a query's
    ranked neighbors, reduced to the majority set of its first ``k``.
    """
    if len(labels_full) != len(labels_constrained) or not labels_full:
        raise InvalidInputError("label lists must be non-empty and equal length")

    def as_set(entry):
        if isinstance(entry, (set, frozenset)):
            return set(entry)
        counts = Counter(list(entry)[:k])
        if not counts:
            return set()
        top = max(counts.values())
        return {lab for lab, c in counts.items() if c == top}

    vals = []
    for a, b in zip(labels_full, labels_constrained):
        a, b = as_set(a), as_set(b)
        if not a or not b:
            raise InvalidInputError("empty label set")
        vals.append(len(a & b) / len(a | b))
    return float(np.mean(vals))


def metric_timegain(time_full: float, time_constrained: float) -> float:
    if not time_full > 0:
        raise InvalidInputError("time_full must be > 0")
    return (time_full - time_constrained) / time_full


# -- feature cache -----------------------------------------------------------

CACHE_MAGIC = "#salientdtw-features"
CACHE_VERSION = 1


def save_features(path, features: dict, params: FeatureParams) -> None:
    """Write ``{series_id: [SalientFeature, ...]}`` as versioned tab-separated text.

    Per series a line ``S <id> <count>`` followed by one ``F`` line per
    feature: id, position, sigma, scope_start, scope_end, amplitude, octave,
    level, index, dog_value, then the descriptor values.
    """
    with open(path, "w") as fh:
        fh.write(f"{CACHE_MAGIC} v{CACHE_VERSION} fingerprint={params.fingerprint()}\n")
        for sid, feats in features.items():
            fh.write(f"S\t{sid}\t{len(feats)}\n")
            for f in feats:
                p = f.point
                vals = [p.position, p.sigma, p.scope_start, p.scope_end, f.amplitude]
                row = [str(sid)] + [repr(float(v)) for v in vals]
                row += [str(p.octave), str(p.level), str(p.index), repr(float(p.dog_value))]
                row += [repr(float(v)) for v in f.descriptor]
                fh.write("F\t" + "\t".join(row) + "\n")


def load_features(path, params: FeatureParams):
    """Read a cache written by :func:`save_features`.

    Returns None (with a warning) when the file is missing, stale, or was
    built with different feature parameters.
    """
    path = Path(path)
    if not path.exists():
        return None
    with open(path) as fh:
        header = fh.readline().split()
        expect = [CACHE_MAGIC, f"v{CACHE_VERSION}", f"fingerprint={params.fingerprint()}"]
        if header != expect:
            warnings.warn(f"feature cache {path} does not match the feature "
                          "parameters; rebuilding", stacklevel=2)
            return None
        out = {}
        current = None
        for lineno, line in enumerate(fh, 2):
            parts = line.rstrip("\n").split("\t")
            try:
                if parts[0] == "S":
                    current = out.setdefault(parts[1], [])
                elif parts[0] == "F":
                    sid = parts[1]
                    pos, sig, st, en, amp = (float(v) for v in parts[2:7])
                    octave, level, index = (int(v) for v in parts[7:10])
                    point = SalientPoint(pos, sig, octave, level, float(parts[10]),
                                         st, en, index)
                    desc = np.array([float(v) for v in parts[11:]])
                    current.append(SalientFeature(point, desc, amp, sid))
                else:
                    raise ValueError(parts[0])
            except (ValueError, IndexError, AttributeError, TypeError):
                raise DataError(f"{path}:{lineno}: malformed feature cache line") from None
    return out


def cached_features(dataset: Dataset, params: FeatureParams, cache=None):
    """Features per series, from ``cache`` when valid; returns (features, extract seconds)."""
    ids = [f"{dataset.name}:{i}" for i in range(len(dataset))]
    if cache is not None:
        loaded = load_features(cache, params)
        if loaded is not None and all(s in loaded for s in ids):
            return [loaded[s] for s in ids], 0.0
    t0 = time.perf_counter()
    feats = [extract_features(s, params, sid) for s, sid in zip(dataset.series, ids)]
    elapsed = time.perf_counter() - t0
    if cache is not None:
        save_features(cache, dict(zip(ids, feats)), params)
    return feats, elapsed


# -- configuration -----------------------------------------------------------

def _floats(text):
    return tuple(float(v) for v in text.split(",") if v.strip())


@dataclass(frozen=True)
class BenchConfig:
    datasets: tuple = ()            # each entry: path or path+path (concatenated)
    synthetic: tuple | None = None  # (classes, per_class, length, warp, noise)
    approaches: tuple = DEFAULT_APPROACHES
    octaves: int | None = None
    levels: int = 2
    epsilon: float = 0.0096
    base_sigma: float = 1.6
    descriptor_bins: int = 64
    normalize: bool = True
    tau_a: float | None = None
    tau_a_fraction: float = 0.25
    tau_s: float = 4.0
    tau_d: float = 1.5
    width_lower_bound: float = 0.20
    neighbor_radius: int = 1
    k: tuple = (5, 10)
    symmetric: bool = False
    delta: str = "absolute"
    seed: int = 0
    output: str = "bench_out"
    cache_dir: str | None = None

    def __post_init__(self):
        for name in self.approaches:
            self.spec(name)
        if not self.datasets and self.synthetic is None:
            raise InvalidInputError("config names no dataset (datasets= or synthetic=)")
        if any(k < 1 for k in self.k):
            raise InvalidInputError("k values must be >= 1")

    def spec(self, name):
        return parse_approach(name, self.width_lower_bound, self.neighbor_radius)

    @property
    def feature_params(self) -> FeatureParams:
        return FeatureParams(self.octaves, self.levels, self.epsilon, self.base_sigma,
                             self.descriptor_bins, self.normalize)

    @property
    def match_kw(self) -> dict:
        return dict(tau_a=self.tau_a, tau_s=self.tau_s, tau_d=self.tau_d,
                    tau_a_fraction=self.tau_a_fraction)


_BOOL = {"1": True, "true": True, "yes": True, "on": True,
         "0": False, "false": False, "no": False, "off": False}


def _convert(key, text):
    text = text.strip()
    if key == "datasets":
        return tuple(v.strip() for v in text.split(",") if v.strip())
    if key == "approaches":
        return tuple(v.strip() for v in text.split(",") if v.strip())
    if key == "synthetic":
        vals = _floats(text)
        if len(vals) != 5:
            raise InvalidInputError("synthetic = classes,per_class,length,warp,noise")
        return (int(vals[0]), int(vals[1]), int(vals[2]), vals[3], vals[4])
    if key == "k":
        return tuple(int(v) for v in text.split(",") if v.strip())
    if key in ("normalize", "symmetric"):
        if text.lower() not in _BOOL:
            raise InvalidInputError(f"{key}: expected a boolean, got {text!r}")
        return _BOOL[text.lower()]
    if key in ("octaves", "tau_a", "cache_dir"):
        if text.lower() in ("", "none", "auto"):
            return None
        return int(text) if key == "octaves" else (float(text) if key == "tau_a" else text)
    if key in ("levels", "descriptor_bins", "neighbor_radius", "seed"):
        return int(text)
    if key in ("delta", "output"):
        return text
    return float(text)


def parse_config(text: str, base_dir=None) -> BenchConfig:
    """Parse flat ``key = value`` lines; ``#`` starts a comment; unknown keys are errors."""
    known = {f.name for f in fields(BenchConfig)}
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidInputError(f"config line {lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in known:
            raise InvalidInputError(f"config line {lineno}: unknown key {key!r}")
        try:
            values[key] = _convert(key, val)
        except ValueError as exc:
            raise InvalidInputError(f"config line {lineno}: {exc}") from None
    if base_dir is not None and "datasets" in values:
        values["datasets"] = tuple(
            "+".join(str(Path(base_dir, p)) if not Path(p).is_absolute() else p
                     for p in entry.split("+"))
            for entry in values["datasets"])
    return BenchConfig(**values)


def load_config(path) -> BenchConfig:
    path = Path(path)
    return parse_config(path.read_text(), base_dir=path.parent)


# -- benchmark ---------------------------------------------------------------

@dataclass
class ApproachResult:
    name: str
    distances: np.ndarray      # N x N, mirrored from the i < j pairs
    cells: np.ndarray          # N x N cells filled
    match_s: float = 0.0       # summed over pairs
    dp_s: float = 0.0


@dataclass
class BenchReport:
    dataset: str
    n_series: int
    n_pairs: int
    rows: list = field(default_factory=list)     # dicts keyed by REPORT_COLUMNS
    results: dict = field(default_factory=dict)  # approach -> ApproachResult
    extract_ms: float = 0.0
    excluded_pairs: int = 0

    def row(self, approach, k):
        for r in self.rows:
            if r["approach"] == approach and r["k"] == k:
                return r
        raise KeyError((approach, k))


def _datasets(config: BenchConfig):
    out = []
    for entry in config.datasets:
        out.append(load_ucr(*entry.split("+")))
    if config.synthetic is not None:
        c, p, length, warp, noise = config.synthetic
        out.append(generate_synthetic(c, p, length, warp, noise, config.seed))
    return out


def evaluate_dataset(dataset: Dataset, config: BenchConfig, features=None,
                     extract_s: float = 0.0) -> BenchReport:
    """All-pairs distances per approach, then the four metrics per k."""
    n = len(dataset)
    if n < 2:
        raise InvalidInputError("a benchmark needs at least 2 series")
    kmax = max(config.k)
    if kmax > n - 1:
        raise InvalidInputError(f"k={kmax} exceeds corpus size - 1 = {n - 1}")
    if features is None:
        features, extract_s = cached_features(dataset, config.feature_params)
    fsets = [FeatureSet(f) for f in features]
    series = dataset.series
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    names = list(dict.fromkeys(("dtw",) + tuple(config.approaches)))

    results = {}
    for name in names:
        spec = config.spec(name)
        res = ApproachResult(name, np.zeros((n, n)), np.zeros((n, n), dtype=np.int64))
        clock = time.perf_counter
        for i, j in pairs:
            x, y = series[i], series[j]
            if spec is None:
                t0 = clock()
                r = full_dtw(x, y, config.delta)
                t1 = t0
            else:
                t0 = clock()
                band = constraint_band(x, y, fsets[i], fsets[j], spec, config.symmetric,
                                       **config.match_kw)
                t1 = clock()
                r = banded_dtw(x, y, band, config.delta)
            t2 = clock()
            res.match_s += t1 - t0
            res.dp_s += t2 - t1
            res.distances[i, j] = res.distances[j, i] = r.distance
            res.cells[i, j] = res.cells[j, i] = r.cells_filled
        results[name] = res
        log.info("%s: %s done (%.1f ms)", dataset.name, name,
                 (res.match_s + res.dp_s) * 1e3)

    iu = np.triu_indices(n, 1)
    full = results["dtw"]
    full_rank = rankings(full.distances)
    labels = dataset.labels.tolist()
    report = BenchReport(dataset.name, n, len(pairs), results=results,
                         extract_ms=extract_s * 1e3)
    for name in config.approaches:
        res = results[name]
        rank = rankings(res.distances)
        err, excluded = metric_err_dist(full.distances[iu], res.distances[iu], True)
        report.excluded_pairs = excluded
        gain = metric_timegain(full.dp_s, res.match_s + res.dp_s)
        for k in config.k:
            lab_full = [knn_label_set(r, labels, k) for r in full_rank]
            lab_c = [knn_label_set(r, labels, k) for r in rank]
            report.rows.append({
                "approach": name,
                "k": k,
                "acc_ret": metric_acc_ret(k, full_rank, rank),
                "err_dist": err,
                "acc_cls": metric_acc_cls(k, lab_full, lab_c),
                "timegain": 0.0 if name == "dtw" else gain,
                "mean_cells_filled": float(res.cells[iu].mean()),
                "match_ms": res.match_s / len(pairs) * 1e3,
                "dp_ms": res.dp_s / len(pairs) * 1e3,
            })
    return report


def run_benchmark(config: BenchConfig, write=True) -> list[BenchReport]:
    """Run every dataset of ``config``; optionally write CSV and plot-data files."""
    reports = []
    for ds in _datasets(config):
        cache = None
        if config.cache_dir is not None:
            Path(config.cache_dir).mkdir(parents=True, exist_ok=True)
            cache = Path(config.cache_dir, f"{ds.name}.features.tsv")
        feats, ext = cached_features(ds, config.feature_params, cache)
        report = evaluate_dataset(ds, config, feats, ext)
        reports.append(report)
        if write:
            write_report(report, config.output)
    return reports


def _fmt(v):
    return repr(float(v)) if isinstance(v, float) else str(v)


def write_report(report: BenchReport, outdir) -> Path:
    """Write ``<dataset>.csv`` plus per-figure tab-separated plot data."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{report.dataset}.csv"
    with open(csv_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(REPORT_COLUMNS)
        for r in report.rows:
            w.writerow([_fmt(r[c]) for c in REPORT_COLUMNS])

    ks = sorted({r["k"] for r in report.rows})
    approaches = list(dict.fromkeys(r["approach"] for r in report.rows))
    first = {a: report.row(a, ks[0]) for a in approaches}

    def tsv(name, header, lines):
        with open(out / f"{report.dataset}_{name}.tsv", "w") as fh:
            fh.write("\t".join(header) + "\n")
            for line in lines:
                fh.write("\t".join(_fmt(v) for v in line) + "\n")

    for k in ks:
        rows = [report.row(a, k) for a in approaches]
        tsv(f"retrieval_k{k}", ("approach", "timegain", "acc_ret"),
            [(r["approach"], r["timegain"], r["acc_ret"]) for r in rows])
        tsv(f"classification_k{k}", ("approach", "timegain", "acc_cls"),
            [(r["approach"], r["timegain"], r["acc_cls"]) for r in rows])
    tsv("disterr", ("approach", "err_dist", "timegain"),
        [(a, first[a]["err_dist"], first[a]["timegain"]) for a in approaches])
    tsv("timesplit", ("approach", "match_ms", "dp_ms"),
        [(a, first[a]["match_ms"], first[a]["dp_ms"]) for a in approaches])
    with open(out / f"{report.dataset}_extraction.tsv", "w") as fh:
        fh.write(f"series\textract_ms_total\n{report.n_series}\t{_fmt(report.extract_ms)}\n")
    return csv_path


def read_report_csv(path) -> list[dict]:
    """Parse a report CSV back into row dicts with typed values."""
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            row = {c: float(rec[c]) for c in REPORT_COLUMNS[2:]}
            row["approach"] = rec["approach"]
            row["k"] = int(rec["k"])
            rows.append(row)
    return rows
