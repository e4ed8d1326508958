"""``qig`` command line: point evaluations, sweeps, fits and verification suites.

Exit codes: 0 success, 1 configuration error, 2 evaluated with point errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .asymptotics import fit_exponent, low_temp_expansion, predict_R_lowT
from .errors import QigError, SingularLocusError, ValidationError
from .expfamily import CONVENTIONS, ExpFamilyModel, ModelPoint, eigen_data, log_partition
from .geometry import cubic_fd, metric_spectral, scalar_curvature
from .modelfile import load_generic_file
from .tfim import (
    Tfim0dParams,
    Tfim1dParams,
    geometry_1d,
    metric_1d,
    psi_1d,
    tfim0d_model,
    tfim0d_point,
    zero_T_elliptic_1d,
)
from .verify import run_suite

EXIT_OK, EXIT_CONFIG, EXIT_POINT_ERRORS = 0, 1, 2
OUTPUTS = ("psi", "metric", "cubic", "curvature", "lowT", "C")
MODELS = ("tfim0d", "tfim1d", "generic")
MAX_POINTS = 10 ** 7
NEAR_CRITICAL_1D = 0.05
FLAGS = ("betaDelta", "degenerate", "near_critical", "error")


@dataclass(frozen=True)
class Axis:
    label: str
    start: float
    stop: float
    count: int
    log: bool = False

    def values(self) -> np.ndarray:
        if self.count == 1:
            return np.array([self.start])
        if self.log:
            return np.geomspace(self.start, self.stop, self.count)
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class SweepConfig:
    model: str
    convention: str
    base: dict
    axes: tuple = ()
    outputs: tuple = ("curvature",)
    quad_tol: float = 1e-10
    generic: Optional[tuple] = field(default=None, compare=False)

    def grid(self):
        """Input dictionaries in deterministic order (last axis varies fastest)."""
        if not self.axes:
            yield dict(self.base)
            return
        for combo in itertools.product(*(a.values() for a in self.axes)):
            d = dict(self.base)
            d.update({a.label: float(v) for a, v in zip(self.axes, combo)})
            yield d

    @property
    def size(self) -> int:
        return math.prod(a.count for a in self.axes) if self.axes else 1


def parse_axis(text: str) -> Axis:
    """Parse ``label=start:stop:count[:log]``."""
    try:
        label, rng = text.split("=", 1)
        parts = rng.split(":")
        if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] not in ("log", "lin")):
            raise ValueError
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ValidationError(f"bad sweep range {text!r}; expected label=start:stop:count[:log]") from None
    log = len(parts) == 4 and parts[3] == "log"
    if count < 1:
        raise ValidationError(f"sweep {label!r}: count must be >= 1")
    if not start < stop:
        raise ValidationError(f"sweep {label!r}: start must be < stop")
    if log and start <= 0:
        raise ValidationError(f"sweep {label!r}: log spacing needs start > 0")
    return Axis(label.strip(), start, stop, count, log)


def parse_outputs(raw: Sequence[str]) -> tuple:
    names = [s.strip() for item in raw for s in item.split(",") if s.strip()]
    if not names:
        raise ValidationError("empty output selection")
    for n in names:
        if n not in OUTPUTS:
            raise ValidationError(f"unknown output {n!r}; choose from {OUTPUTS}")
    return tuple(dict.fromkeys(names))


# ------------------------------------------------------------------ evaluation


def _matrix_fields(prefix: str, labels, g) -> dict:
    n = len(labels)
    return {f"{prefix}_{labels[i]}{labels[j]}": float(g[i, j]) for i in range(n) for j in range(i, n)}


def _cubic_fields(labels, t) -> dict:
    n = len(labels)
    return {f"psi3_{labels[i]}{labels[j]}{labels[k]}": float(t[i, j, k])
            for i in range(n) for j in range(i, n) for k in range(j, n)}


def _curvature_fields(rep) -> dict:
    return {"R": rep.scalar, "R1212": rep.R1212, "F": rep.F, "detg": rep.detg}


def _lowT_fields(exp, convention: str) -> dict:
    pred = predict_R_lowT(exp.C, exp.beta, exp.delta)
    s = 1.0 if convention == "scaled" else 1.0 / exp.beta
    value = None if pred.value is None else pred.value * s
    return {"Delta": exp.delta, "epsilon": exp.epsilon, "R_lowT": value,
            "log_R_lowT": pred.log_value + math.log(s), "lowT_valid": pred.valid}


class _Evaluation:
    """Per-point output builder shared by the three model kinds."""

    def __init__(self, cfg: SweepConfig, inputs: dict):
        self.cfg = cfg
        self.inputs = inputs
        self.out: dict = {}
        self.flags = {"betaDelta": None, "degenerate": False, "near_critical": False, "error": ""}

    def run(self) -> dict:
        try:
            getattr(self, f"_eval_{self.cfg.model}")()
        except QigError as exc:
            self.flags["error"] = f"{type(exc).__name__}: {exc}"
        record = {"model": self.cfg.model, "convention": self.cfg.convention}
        record.update({k: self.inputs[k] for k in sorted(self.inputs)})
        record.update(self.out)
        record.update(self.flags)
        return record

    def _generic_outputs(self, model: ExpFamilyModel, point: ModelPoint):
        conv = self.cfg.convention
        data = eigen_data(model, point)
        e = data.decomp.eigenvalues
        self.flags["degenerate"] = data.decomp.degenerate
        if len(e) > 1:
            self.flags["betaDelta"] = float(e[0] - e[1])
        labels = model.labels
        metric = cubic = None
        for name in self.cfg.outputs:
            if name == "psi":
                rep = log_partition(model, point)
                self.out["psi"] = rep.psi_massieu if conv == "massieu" else rep.psi_scaled
            elif name == "metric":
                metric = metric or metric_spectral(model, point, conv)
                self.out.update(_matrix_fields("g", labels, metric.g))
                self.out.update(_matrix_fields("gc", labels, metric.g_classical))
            elif name == "cubic":
                cubic = cubic or cubic_fd(model, point, conv)
                self.out.update(_cubic_fields(labels, cubic.psi3))
                self.out["fd_symmetry_residual"] = cubic.symmetry_residual
            elif name == "curvature":
                metric = metric or metric_spectral(model, point, conv)
                cubic = cubic or cubic_fd(model, point, conv)
                self.out.update(_curvature_fields(scalar_curvature(metric, cubic)))
                self.out["fd_step"] = float(np.max(cubic.fd_step))
            elif name in ("lowT", "C"):
                exp = low_temp_expansion(model, point)
                if name == "C":
                    self.out["C"] = exp.C
                else:
                    self.out.update(_lowT_fields(exp, conv))

    def _eval_tfim0d(self):
        p = Tfim0dParams(self.inputs["beta"], self.inputs["Gamma"], self.inputs["h"])
        if p.r == 0.0:
            self.flags["betaDelta"] = 0.0
            raise SingularLocusError("r = 0 (Gamma = h = 0) is the singular locus of the 0D model")
        self._generic_outputs(tfim0d_model(), tfim0d_point(p))

    def _eval_generic(self):
        model, point = self.cfg.generic
        theta = tuple(self.inputs[label] for label in model.labels)
        self._generic_outputs(model, ModelPoint(theta, self.inputs["beta"]))

    def _eval_tfim1d(self):
        conv, tol = self.cfg.convention, self.cfg.quad_tol
        p = Tfim1dParams(self.inputs["beta"], self.inputs["J"], self.inputs["Gamma"])
        self.flags["betaDelta"] = p.beta_delta
        self.flags["near_critical"] = abs(1.0 - p.g_ratio) < NEAR_CRITICAL_1D
        labels = ("theta", "x")
        s = 1.0 if conv == "massieu" else 1.0 / p.beta
        geom = None
        for name in self.cfg.outputs:
            if name == "psi":
                self.out["psi"] = psi_1d(p, tol, conv)
            elif name == "metric":
                self.out.update(_matrix_fields("g", labels, s * metric_1d(p.theta, p.x, tol)))
            elif name in ("cubic", "curvature"):
                geom = geom or geometry_1d(p, tol, conv)
                if name == "cubic":
                    self.out.update(_cubic_fields(labels, geom[1].psi3))
                else:
                    self.out.update(_curvature_fields(geom[2]))
                    self.out["fd_step"] = float(np.max(geom[1].fd_step))
            elif name == "C":
                self.out["g"] = p.g_ratio
                self.out["C"] = zero_T_elliptic_1d(p).C
            elif name == "lowT":
                self.out.update(_lowT_fields(zero_T_elliptic_1d(p), conv))
        if geom is not None or "psi" in self.cfg.outputs or "metric" in self.cfg.outputs:
            self.out["quad_tol"] = tol


def evaluate(cfg: SweepConfig, inputs: dict) -> dict:
    return _Evaluation(cfg, inputs).run()


def _evaluate_packed(args):
    return evaluate(*args)


def run_sweep(cfg: SweepConfig, workers: int = 1) -> list:
    """Evaluate every grid point; results come back in grid order."""
    points = list(cfg.grid())
    if workers <= 1 or len(points) < 2:
        return [evaluate(cfg, p) for p in points]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_evaluate_packed, [(cfg, p) for p in points], chunksize=max(1, len(points) // (4 * workers))))


# ------------------------------------------------------------------ output


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return "%.17g" % v
    return str(v)


def _json_value(v):
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def _columns(records: list) -> list:
    cols: list = []
    for rec in records:
        for k in rec:
            if k not in cols:
                cols.append(k)
    # flags always last, in fixed order
    return [c for c in cols if c not in FLAGS] + list(FLAGS)


def write_records(records: list, fmt: str, stream) -> None:
    if fmt == "csv":
        cols = _columns(records)
        w = csv.writer(stream, lineterminator="\n")
        w.writerow(cols)
        for rec in records:
            w.writerow([_fmt(rec.get(c)) for c in cols])
    elif fmt == "jsonl":
        for rec in records:
            stream.write(json.dumps({k: _json_value(v) for k, v in rec.items()}) + "\n")
    else:
        payload = [{k: _json_value(v) for k, v in rec.items()} for rec in records]
        stream.write(json.dumps(payload[0] if len(payload) == 1 else payload, indent=2) + "\n")


# ------------------------------------------------------------------ argument handling


def _build_config(args, sweeps: Sequence[str]) -> SweepConfig:
    if args.convention not in CONVENTIONS:
        raise ValidationError(f"unknown convention {args.convention!r}")
    if not args.quad_tol > 0:
        raise ValidationError("--quad-tol must be positive")
    outputs = parse_outputs(args.out)
    generic = None
    if args.model == "tfim0d":
        base = {"beta": args.beta, "Gamma": args.Gamma, "h": args.h}
    elif args.model == "tfim1d":
        base = {"beta": args.beta, "J": args.J, "Gamma": args.Gamma}
    else:
        if not args.model_file:
            raise ValidationError("--model generic requires --model-file")
        generic = load_generic_file(args.model_file)
        model, point = generic
        base = dict(zip(model.labels, point.theta))
        base["beta"] = args.beta if args.beta_given else point.beta
        if args.theta:
            values = [float(v) for v in args.theta.split(",")]
            if len(values) != model.n:
                raise ValidationError(f"--theta needs {model.n} values")
            base.update(zip(model.labels, values))
    axes = tuple(parse_axis(s) for s in sweeps)
    for a in axes:
        if a.label not in base:
            raise ValidationError(f"cannot sweep {a.label!r}; model inputs are {sorted(base)}")
    if len({a.label for a in axes}) != len(axes):
        raise ValidationError("each label may be swept only once")
    cfg = SweepConfig(args.model, args.convention, base, axes, outputs, args.quad_tol, generic)
    if cfg.size > MAX_POINTS:
        raise ValidationError(f"sweep has {cfg.size} points; the limit is {MAX_POINTS}")
    # reject invalid fixed parameters up front
    for d in itertools.islice(cfg.grid(), 1):
        if args.model == "tfim0d":
            Tfim0dParams(d["beta"], d["Gamma"], d["h"])
        elif args.model == "tfim1d":
            Tfim1dParams(d["beta"], d["J"], d["Gamma"])
    return cfg


class _BetaAction(argparse.Action):
    def __call__(self, parser, namespace, values, option_string=None):
        setattr(namespace, self.dest, values)
        namespace.beta_given = True


def _add_model_args(p: argparse.ArgumentParser, default_format: str) -> None:
    p.add_argument("--model", choices=MODELS, default="tfim0d")
    p.add_argument("--model-file", help="generic-model JSON file")
    p.add_argument("--theta", help="comma-separated canonical parameters for --model generic")
    p.add_argument("--beta", type=float, default=1.0, action=_BetaAction)
    p.add_argument("--J", type=float, default=1.0)
    p.add_argument("--Gamma", type=float, default=1.0)
    p.add_argument("--h", type=float, default=0.0)
    p.add_argument("--convention", default="massieu", help="massieu (ln Z) or scaled (ln Z / beta)")
    p.add_argument("--out", action="append", default=None,
                   help=f"outputs, comma-separated or repeated; from {', '.join(OUTPUTS)} (default curvature)")
    p.add_argument("--quad-tol", type=float, default=1e-10)
    p.add_argument("--format", choices=("csv", "jsonl", "json"), default=default_format)
    p.add_argument("--output", "-o", help="write records to this file instead of stdout")
    p.set_defaults(beta_given=False)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qig", description="BKM information geometry of quantum exponential families")
    sub = parser.add_subparsers(dest="command", required=True)
    pt = sub.add_parser("point", help="evaluate one parameter point")
    _add_model_args(pt, "json")
    sw = sub.add_parser("sweep", help="evaluate a parameter grid")
    _add_model_args(sw, "csv")
    sw.add_argument("--sweep", action="append", default=[], metavar="LABEL=START:STOP:COUNT[:log]")
    sw.add_argument("--workers", type=int, default=1)
    ft = sub.add_parser("fit", help="fit a power law value ~ |control - shift|^(-exponent) to CSV columns")
    ft.add_argument("csv_file", help="CSV produced by 'qig sweep' ('-' for stdin)")
    ft.add_argument("--x", required=True, help="control column")
    ft.add_argument("--y", default="C", help="value column")
    ft.add_argument("--shift", type=float, default=0.0, help="subtract before taking |.| (1 for g near 1)")
    vf = sub.add_parser("verify", help="run a verification suite")
    vf.add_argument("--suite", default="all")
    return parser


def _emit(records: list, args) -> None:
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            write_records(records, args.format, fh)
    else:
        write_records(records, args.format, sys.stdout)


def _cmd_evaluate(args, sweeps) -> int:
    if args.out is None:
        args.out = ["curvature"]
    cfg = _build_config(args, sweeps)
    records = run_sweep(cfg, getattr(args, "workers", 1))
    _emit(records, args)
    errors = sum(1 for r in records if r["error"])
    if args.command == "sweep" or errors:
        print(f"{len(records)} points, {errors} with errors", file=sys.stderr)
    return EXIT_POINT_ERRORS if errors else EXIT_OK


def _cmd_fit(args) -> int:
    text = sys.stdin.read() if args.csv_file == "-" else open(args.csv_file, encoding="utf-8").read()
    rows = list(csv.DictReader(io.StringIO(text)))
    if not rows or args.x not in rows[0] or args.y not in rows[0]:
        raise ValidationError(f"columns {args.x!r} and {args.y!r} must both be present")
    samples = [(abs(float(r[args.x]) - args.shift), float(r[args.y])) for r in rows if r[args.y] and not r.get("error")]
    fit = fit_exponent(samples)
    print(json.dumps({"exponent": fit.exponent, "intercept": fit.intercept,
                      "r_squared": fit.r_squared, "window": list(fit.window), "points": len(samples)}, indent=2))
    return EXIT_OK


def _cmd_verify(args) -> int:
    report = run_suite(args.suite)
    print(json.dumps(report.to_dict(), indent=2))
    return EXIT_OK if report.passed else EXIT_POINT_ERRORS


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        if args.command == "point":
            return _cmd_evaluate(args, [])
        if args.command == "sweep":
            return _cmd_evaluate(args, args.sweep)
        if args.command == "fit":
            return _cmd_fit(args)
        return _cmd_verify(args)
    except (ValidationError, OSError) as exc:
        print(f"qig: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
