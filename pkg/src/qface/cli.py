"""Command-line front end.

Exit codes: 0 success, 2 data error, 3 numerical error, 64 usage error.
Set ``QFACE_THREADS`` to cap BLAS/LAPACK threads.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import re
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import baseline
from .dataset import ColorImage, SyntheticSpec, TrainingSet, export_rgb, load_manifest, synth_dataset
from .errors import DataError, NumericalError
from .model import fit, load_model, model_from_fit, save_model
from .reconstruct import ratio_table_csv, reconstruct, reconstruction_report
from .quaternion import QMatrix
from .recognize import build_gallery, evaluate, project_set
from .toy import toy_case, toy_table_csv

log = logging.getLogger("qface")

EXIT_DATA = 2
EXIT_NUMERICAL = 3
EXIT_USAGE = 64
METHODS = ("sr-2dcpca", "2dcpca", "2dpca")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    command: str
    manifest: Path | None
    synthetic: SyntheticSpec | None
    mode: str
    r_range: tuple[int, int] | None
    seed: int
    out: Path
    model: Path | None

    @classmethod
    def from_args(cls, args) -> RunConfig:
        synthetic = SyntheticSpec.parse(args.synthetic) if getattr(args, "synthetic", None) else None
        manifest = Path(args.manifest) if getattr(args, "manifest", None) else None
        model = Path(args.model) if getattr(args, "model", None) else None
        if args.command != "toy" and (manifest is None) == (synthetic is None):
            raise UsageError("give exactly one data source: --manifest or --synthetic")
        r_range = None
        if getattr(args, "r_range", None):
            m = re.fullmatch(r"(\d+)\.\.(\d+)", args.r_range)
            if not m:
                raise UsageError(f"--r-range must look like A..B, got {args.r_range!r}")
            r_range = (int(m.group(1)), int(m.group(2)))
        elif getattr(args, "r", None) is not None:
            r_range = (args.r, args.r)
        if r_range is not None and not 1 <= r_range[0] <= r_range[1]:
            raise UsageError(f"invalid r range {r_range}")
        return cls(args.command, manifest, synthetic, getattr(args, "mode", "sr-2dcpca"), r_range,
                   args.seed, Path(args.out), model)

    def load(self) -> tuple[TrainingSet, TrainingSet | None]:
        if self.manifest is not None:
            return load_manifest(self.manifest)
        return synth_dataset(self.synthetic, self.seed)

    def rs(self, n: int) -> list[int]:
        lo, hi = self.r_range or (1, n)
        if hi > n:
            raise UsageError(f"r must not exceed the image width n={n}, got {hi}")
        return list(range(lo, hi + 1))


def write_atomic(path: Path, data: str | bytes) -> None:
    tmp = path.with_name(path.name + ".tmp")
    if isinstance(data, str):
        tmp.write_text(data, encoding="utf-8", newline="")
    else:
        tmp.write_bytes(data)
    os.replace(tmp, path)


# ---------------------------------------------------------------------------
# method adapters
# ---------------------------------------------------------------------------

class _Fitted:
    """Full decomposition for one method; truncation to any r is cheap."""

    def __init__(self, method: str, train: TrainingSet):
        self.method = method
        self.train = train
        if method == "2dpca":
            self.mean, self.vals, self.vecs = baseline.fit_2dpca(train)
            self.spectrum = self.vals
            self.weights = None
        else:
            self.rep, self.mean = fit(train, method)
            self.spectrum = self.rep.eigen.eigenvalues
            self.weights = self.rep.weights.weights

    def model(self, r: int):
        if self.method == "2dpca":
            return baseline.model_2dpca(self.mean, self.vals, self.vecs, r)
        return model_from_fit(self.rep, self.mean, r, self.method, self.train.classes)


def _gallery(model, train: TrainingSet):
    if isinstance(model, baseline.RealEigenfaceModel):
        return baseline.build_gallery_2dpca(train, model)
    return build_gallery(train, model)


def _evaluate(model, gallery, tests: TrainingSet):
    if isinstance(model, baseline.RealEigenfaceModel):
        return baseline.evaluate_2dpca(model, gallery, tests)
    return evaluate(model, gallery, tests)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_train(cfg: RunConfig) -> int:
    train, _ = cfg.load()
    r = cfg.rs(train.image_shape[1])[-1]
    t0 = time.perf_counter()
    fitted = _Fitted(cfg.mode, train)
    model = fitted.model(r)
    gallery = _gallery(model, train)
    elapsed = time.perf_counter() - t0
    cfg.out.mkdir(parents=True, exist_ok=True)
    save_model(model, cfg.out / "model.qfm", gallery)
    info = {
        "mode": cfg.mode,
        "r": r,
        "samples": train.size,
        "classes": len(train.classes),
        "image_shape": list(train.image_shape),
        "spectrum": [float(v) for v in fitted.spectrum],
        "W": None if fitted.weights is None else [float(v) for v in fitted.weights],
        "wall_time_s": elapsed,
    }
    write_atomic(cfg.out / "train_log.json", json.dumps(info, indent=2) + "\n")
    log.info("trained %s with r=%d on %d samples in %.3fs", cfg.mode, r, train.size, elapsed)
    if fitted.weights is not None:
        log.info("relaxation vector W = %s", np.array2string(fitted.weights, precision=4))
    log.info("leading eigenvalues: %s", np.array2string(fitted.spectrum[: min(r, 10)], precision=4))
    return 0


def _sweep(cfg: RunConfig, train: TrainingSet, tests: TrainingSet, methods) -> list:
    """One decomposition per method, truncated to every r in the range."""
    reports = []
    rs = cfg.rs(train.image_shape[1])
    for method in methods:
        fitted = _Fitted(method, train)
        log.info("%s: one eigendecomposition, truncated for r = %d..%d", method, rs[0], rs[-1])
        for r in rs:
            model = fitted.model(r)
            reports.append(_evaluate(model, _gallery(model, train), tests))
    return reports


def _curve_csv(reports, seed: int | None = None) -> str:
    head = "seed,r,method,accuracy\n" if seed is not None else "r,method,accuracy\n"
    lines = [head]
    for rep in reports:
        prefix = f"{seed}," if seed is not None else ""
        lines.append(f"{prefix}{rep.r},{rep.method},{rep.accuracy!r}\n")
    return "".join(lines)


def cmd_evaluate(cfg: RunConfig) -> int:
    train, tests = cfg.load()
    if tests is None or tests.size == 0:
        raise DataError("the test split is empty")
    if cfg.model is not None:
        model, gallery = load_model(cfg.model)
        if gallery is None:
            gallery = _gallery(model, train)
        lo, hi = cfg.r_range or (1, model.r)
        if hi > model.r:
            raise UsageError(f"the model holds r={model.r} eigenfaces; cannot evaluate r={hi}")
        reports = [_evaluate(model.truncate(r), gallery.truncate(r), tests) for r in range(lo, hi + 1)]
    else:
        methods = METHODS if cfg.mode == "all" else (cfg.mode,)
        reports = _sweep(cfg, train, tests, methods)
    cfg.out.mkdir(parents=True, exist_ok=True)
    for rep in reports:
        write_atomic(cfg.out / f"predictions_{rep.method}_r{rep.r}.csv", rep.to_csv())
    write_atomic(cfg.out / "curve.csv", _curve_csv(reports))
    summary = [rep.summary() for rep in reports]
    write_atomic(cfg.out / "summary.json", json.dumps(summary, indent=2, sort_keys=True) + "\n")
    for rep in reports:
        log.info("%-10s r=%-3d accuracy=%.4f  (%.3f ms/query)", rep.method, rep.r, rep.accuracy, rep.latency_ms)
    return 0


def _safe_name(source: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "_", source).strip("_") or "sample"


def cmd_reconstruct(cfg: RunConfig) -> int:
    train, _ = cfg.load()
    if cfg.model is not None:
        model, _ = load_model(cfg.model)
        if isinstance(model, baseline.RealEigenfaceModel):
            raise UsageError("reconstruct needs a quaternion (2dcpca or sr-2dcpca) model")
        lo, hi = cfg.r_range or (model.r, model.r)
        if hi > model.r:
            raise UsageError(f"the model holds r={model.r} eigenfaces; cannot reconstruct at r={hi}")
        models = [model.truncate(r) for r in range(lo, hi + 1)]
    else:
        if cfg.mode == "2dpca":
            raise UsageError("reconstruct supports the quaternion modes only")
        fitted = _Fitted(cfg.mode, train)
        models = [fitted.model(r) for r in cfg.rs(train.image_shape[1])]
    img_dir = cfg.out / "reconstructions"
    img_dir.mkdir(parents=True, exist_ok=True)
    reports = []
    for model in models:
        feats = project_set(train, model)
        for s in range(train.size):
            rec = reconstruct(QMatrix(feats[:, s]), model)
            ColorImage.from_rgb(export_rgb(rec)).write(img_dir / f"{_safe_name(train.sources[s])}_r{model.r}.ppm")
        reports.append(reconstruction_report(train, model))
        log.info("r=%d mean ratio %.6f", model.r, float(np.nanmean(reports[-1].ratios)))
    write_atomic(cfg.out / "ratios.csv", ratio_table_csv(reports))
    return 0


def cmd_toy(cfg: RunConfig, cases: int) -> int:
    results = [toy_case(cfg.seed + k) for k in range(cases)]
    table = toy_table_csv(results)
    cfg.out.mkdir(parents=True, exist_ok=True)
    write_atomic(cfg.out / "toy.csv", table)
    sys.stdout.write(table)
    return 0


def cmd_benchmark(cfg: RunConfig, seeds: int) -> int:
    """All three methods over ``seeds`` consecutive seeds of the synthetic set."""
    if cfg.synthetic is None:
        raise UsageError("benchmark needs --synthetic (a manifest has a single fixed split)")
    rows, summary = [], {}
    for k in range(seeds):
        seed = cfg.seed + k
        train, tests = synth_dataset(cfg.synthetic, seed)
        if tests is None:
            raise DataError("synthetic spec produced no test samples (set test=T)")
        reports = _sweep(cfg, train, tests, METHODS)
        rows.append(_curve_csv(reports, seed).split("\n", 1)[1])
        for rep in reports:
            s = summary.setdefault(rep.method, {"accuracy": [], "latency_ms": []})
            s["accuracy"].append(rep.accuracy)
            s["latency_ms"].append(rep.latency_ms)
    cfg.out.mkdir(parents=True, exist_ok=True)
    write_atomic(cfg.out / "benchmark.csv", "seed,r,method,accuracy\n" + "".join(rows))
    report = {
        m: {"mean_accuracy": float(np.mean(v["accuracy"])), "mean_latency_ms": float(np.mean(v["latency_ms"]))}
        for m, v in summary.items()
    }
    write_atomic(cfg.out / "benchmark.json", json.dumps(report, indent=2, sort_keys=True) + "\n")
    for m, v in report.items():
        log.info("%-10s mean accuracy %.4f", m, v["mean_accuracy"])
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qface", description="Quaternion 2D color PCA for face recognition.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def data_args(p, modes=METHODS):
        p.add_argument("--manifest", help="CSV with header path,label,split")
        p.add_argument("--synthetic", help="classes=K,per=N,w=W,h=H,noise=S[,test=T,gap=G,hetero=H]")
        p.add_argument("--mode", choices=modes, default="sr-2dcpca")
        g = p.add_mutually_exclusive_group()
        g.add_argument("--r", type=int)
        g.add_argument("--r-range", dest="r_range", metavar="A..B")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default="qface-out")

    p = sub.add_parser("train", help="train a model and store it with its gallery")
    data_args(p)
    p = sub.add_parser("evaluate", help="accuracy per r on the test split")
    data_args(p, METHODS + ("all",))
    p.add_argument("--model")
    p = sub.add_parser("reconstruct", help="reconstruct training images and report ratios")
    data_args(p, METHODS[:2])
    p.add_argument("--model")
    p = sub.add_parser("toy", help="two-class 2-D point example")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cases", type=int, default=3)
    p.add_argument("--out", default="qface-out")
    p = sub.add_parser("benchmark", help="compare all methods over several seeds")
    data_args(p)
    p.add_argument("--seeds", type=int, default=5)
    return parser


def _thread_limit():
    value = os.environ.get("QFACE_THREADS")
    if not value:
        return None
    try:
        n = int(value)
    except ValueError:
        raise UsageError(f"QFACE_THREADS must be an integer, got {value!r}") from None
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=max(n, 1))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        limiter = _thread_limit()
        try:
            cfg = RunConfig.from_args(args)
            if cfg.command == "train":
                return cmd_train(cfg)
            if cfg.command == "evaluate":
                return cmd_evaluate(cfg)
            if cfg.command == "reconstruct":
                return cmd_reconstruct(cfg)
            if cfg.command == "toy":
                return cmd_toy(cfg, args.cases)
            return cmd_benchmark(cfg, args.seeds)
        finally:
            if limiter is not None:
                limiter.restore_original_limits()
    except UsageError as exc:
        print(f"qface: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"qface: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"qface: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
