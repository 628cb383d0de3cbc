"""Command-line front end: ``quatspec {qft,spectrum,svd,clip,bench,selftest,kernel}``.

Exit codes: 0 ok, 1 selftest failure, 2 malformed input file, 3 bad flags,
4 oracle size guard, 5 missing spatial support.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import bench as bench_mod
from .circulant import left_spectrum, make_operator
from .errors import OracleSizeError, QuatDomainError, ShapeMismatchError
from .qft import Normalization, QftPlan, Side, fast_transform
from .qtensor_io import QTensorFile, QTensorParseError, dumps, load
from .quat_core import DEFAULT_AXIS, Axis
from .quat_linalg import QTensor, qsvd
from .selftest import FAULTS, run_selftest
from .spectral_clip import (
    ORACLE_MAX_SIDE,
    clip_detailed,
    default_padded_size,
    pad_kernel,
    singular_values,
    substitute_kernel,
    violation_rate,
)

log = logging.getLogger("quatspec")

EXIT_OK = 0
EXIT_SELFTEST = 1
EXIT_PARSE = 2
EXIT_FLAGS = 3
EXIT_ORACLE = 4
EXIT_SUPPORT = 5

# eigen-residuals of larger operators are checked on a seeded column sample
RESIDUAL_FULL_LIMIT = 4096
RESIDUAL_SAMPLE = 256


class CliError(Exception):
    def __init__(self, code: int, message: str) -> None:
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(EXIT_FLAGS, message)


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def parse_axis(text: str) -> Axis:
    try:
        parts = [float(p) for p in text.split(",")]
    except ValueError:
        raise CliError(EXIT_FLAGS, f"--axis expects three comma-separated reals, got {text!r}") from None
    if len(parts) != 3 or not all(math.isfinite(p) for p in parts):
        raise CliError(EXIT_FLAGS, f"--axis expects three comma-separated reals, got {text!r}")
    try:
        return Axis(*parts)
    except QuatDomainError as exc:
        raise CliError(EXIT_FLAGS, f"--axis: {exc}") from None


def parse_int_list(text: str, flag: str) -> tuple[int, ...]:
    try:
        values = tuple(int(p) for p in text.split(","))
    except ValueError:
        raise CliError(EXIT_FLAGS, f"{flag} expects comma-separated integers, got {text!r}") from None
    if not values or any(v < 1 for v in values):
        raise CliError(EXIT_FLAGS, f"{flag} values must be positive, got {text!r}")
    return values


def _read(path: str) -> QTensorFile:
    try:
        return load(path)
    except QTensorParseError as exc:
        raise CliError(EXIT_PARSE, str(exc)) from None


def _emit(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _padded_shape(tensor: QTensor, padded: str | None, support) -> tuple[int, ...]:
    """Target operator shape: --padded if given, the default rule for bare supports, else as is."""
    if padded is not None:
        shape = parse_int_list(padded, "--padded")
        if len(shape) == 1 and tensor.ndim == 2:
            shape = shape * 2
        if len(shape) != tensor.ndim or any(s < t for s, t in zip(shape, tensor.shape)):
            raise CliError(EXIT_FLAGS, f"--padded {padded} cannot hold a tensor of shape {tensor.shape}")
        return shape
    if support is not None and tuple(support) == tensor.shape:
        return tuple(default_padded_size(s) for s in tensor.shape)
    return tensor.shape


# ---------------------------------------------------------------------------
# commands


def cmd_qft(args) -> int:
    doc = _read(args.input)
    plan = QftPlan(
        doc.tensor.shape,
        args.axis,
        Side.parse(args.side),
        args.inverse,
        Normalization.ASYMMETRIC if args.asym else Normalization.SYMMETRIC,
    )
    _emit(dumps(fast_transform(doc.tensor, plan)), args.output)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    doc = _read(args.input)
    op = make_operator(doc.tensor)
    spec = left_spectrum(op, args.axis)
    if op.size <= RESIDUAL_FULL_LIMIT:
        columns = None
        checked = op.size
    else:
        rng = np.random.default_rng(args.seed)
        columns = np.sort(rng.choice(op.size, RESIDUAL_SAMPLE, replace=False))
        checked = RESIDUAL_SAMPLE
    residual = spec.residual(op, columns)
    flat = spec.values.data.reshape(-1, 4)
    report = {
        "axis": [args.axis.x, args.axis.y, args.axis.z],
        "shape": list(spec.shape),
        "ordering": "value k is the left eigenvalue for column k of Q^{-axis} (Kronecker columns for grids)",
        "coordinate_map": "grid (i, j) of an M x N signal is vector index i + M*j; values listed row-major",
        "w": flat[:, 0].tolist(),
        "x": flat[:, 1].tolist(),
        "y": flat[:, 2].tolist(),
        "z": flat[:, 3].tolist(),
        "residual_max": residual,
        "residual_columns": checked,
    }
    _emit(json.dumps(report, indent=2) + "\n", args.output)
    return EXIT_OK


def cmd_svd(args) -> int:
    doc = _read(args.input)
    shape = _padded_shape(doc.tensor, args.padded, None)
    kernel = pad_kernel(doc.tensor, shape)
    if args.oracle and max(shape) > ORACLE_MAX_SIDE:
        raise CliError(EXIT_ORACLE, f"--oracle limited to {ORACLE_MAX_SIDE} per side, operator is {shape}")
    values = singular_values(kernel, args.axis)
    ascending = values[::-1]
    lines = ["index,value"] + [f"{i},{_fmt(v)}" for i, v in enumerate(ascending)]
    _emit("\n".join(lines) + "\n", args.output)
    if args.oracle:
        slow = qsvd(make_operator(kernel).materialize())
        dev = float(np.max(np.abs(values - slow), initial=0.0))
        print(f"oracle_max_deviation={_fmt(dev)}", file=sys.stderr)
    return EXIT_OK


def cmd_clip(args) -> int:
    if not args.threshold > 0.0:
        raise CliError(EXIT_FLAGS, "--threshold must be positive")
    if not args.tolerance >= 0.0:
        raise CliError(EXIT_FLAGS, "--tolerance must be non-negative")
    if args.iterations < 1:
        raise CliError(EXIT_FLAGS, "--iterations must be at least 1")
    doc = _read(args.input)
    spatial = not args.no_spatial_clip
    if spatial and doc.support is None:
        raise CliError(EXIT_SUPPORT, "input has no \"support\"; add it or pass --no-spatial-clip")
    shape = _padded_shape(doc.tensor, args.padded, doc.support)
    kernel = pad_kernel(doc.tensor, shape)
    support = doc.support if doc.support is not None else doc.tensor.shape
    res = clip_detailed(
        kernel,
        args.threshold,
        args.axis,
        support=support,
        spatial=spatial,
        iterations=args.iterations,
    )
    pre = singular_values(kernel, args.axis)
    spectral = singular_values(res.spectral_kernel, args.axis)
    post = singular_values(res.kernel, args.axis)
    rate = violation_rate(res.kernel, args.threshold, args.tolerance, args.samples, args.seed)
    report = {
        "no-op": res.no_op,
        "threshold": args.threshold,
        "tolerance": args.tolerance,
        "axis": [args.axis.x, args.axis.y, args.axis.z],
        "shape": list(kernel.shape),
        "support": list(support),
        "spatial_clip": spatial,
        "pre_max_sigma": float(pre[0]),
        "pre_mean_sigma": float(pre.mean()),
        "post_spectral_max_sigma": float(spectral[0]),
        "post_max_sigma": float(post[0]),
        "post_mean_sigma": float(post.mean()),
        "violation_rate": rate,
        "samples": args.samples,
        "seed": args.seed,
        "rescaled_blocks": res.rescaled_blocks,
    }
    out = doc if res.no_op else QTensorFile(res.kernel, doc.support)
    _emit(dumps(out), args.output)
    text = json.dumps(report, indent=2) + "\n"
    if args.report is None:
        sys.stderr.write(text)
    else:
        _emit(text, args.report)
    return EXIT_OK


def cmd_bench(args) -> int:
    sizes = parse_int_list(args.sizes, "--sizes")
    rows = bench_mod.run_bench(sizes, seed=args.seed, axis=args.axis)
    lines = ["N,clip_ms,oracle_ms"]
    for r in rows:
        oracle = "" if r.oracle_ms is None else f"{r.oracle_ms:.6f}"
        lines.append(f"{r.n},{r.clip_ms:.6f},{oracle}")
    _emit("\n".join(lines) + "\n", args.output)
    clip_slope, oracle_slope = bench_mod.slopes(rows)
    print(f"clip_slope={clip_slope:.4f}", file=sys.stderr)
    if not math.isnan(oracle_slope):
        print(f"oracle_slope={oracle_slope:.4f}", file=sys.stderr)
    return EXIT_OK


def cmd_selftest(args) -> int:
    ok = run_selftest(sys.stdout, seed=args.seed, inject_fault=args.inject_fault)
    return EXIT_OK if ok else EXIT_SELFTEST


def cmd_kernel(args) -> int:
    shape = parse_int_list(args.shape, "--shape")
    if len(shape) not in (1, 2):
        raise CliError(EXIT_FLAGS, "--shape must have one or two entries")
    if args.kind == "substitute":
        if len(shape) != 2 or shape[0] != shape[1]:
            raise CliError(EXIT_FLAGS, "the substitute kernel is square: use --shape k,k")
        tensor = substitute_kernel(shape[0])
    elif args.kind == "random":
        tensor = QTensor.random(shape, np.random.default_rng(args.seed))
    else:
        data = np.zeros(shape + (4,))
        data[(0,) * len(shape) + (0,)] = 1.0
        tensor = QTensor(data)
    _emit(dumps(QTensorFile(tensor, shape)), args.output)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--axis", type=parse_axis, default=DEFAULT_AXIS, help="transform axis x,y,z (default 1,1,1)")
    common.add_argument("--seed", type=int, default=0, help="seed for every random draw (default 0)")
    common.add_argument("-o", "--output", default=None, help="output path (default stdout)")

    parser = _Parser(prog="quatspec", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("qft", parents=[common], help="left/right quaternion Fourier transform of a tensor file")
    p.add_argument("input")
    p.add_argument("--side", choices=["L", "R"], default="L")
    p.add_argument("--inverse", action="store_true")
    p.add_argument("--asym", action="store_true", help="coefficient 1 forward, 1/N inverse")
    p.set_defaults(func=cmd_qft)

    p = sub.add_parser("spectrum", parents=[common], help="left eigenvalues of the circulant with this kernel")
    p.add_argument("input")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("svd", parents=[common], help="singular values as CSV, ascending")
    p.add_argument("input")
    p.add_argument("--padded", default=None, help="operator size N (or M,N); the kernel is zero-padded top-left")
    p.add_argument("--oracle", action="store_true", help="also compare against the brute-force QSVD")
    p.set_defaults(func=cmd_svd)

    p = sub.add_parser("clip", parents=[common], help="clip the spectral norm of a kernel")
    p.add_argument("input")
    p.add_argument("--threshold", type=float, required=True)
    p.add_argument("--tolerance", type=float, default=0.1, help="Monte-Carlo slack a in ||Bx|| <= (1+a)T")
    p.add_argument("--no-spatial-clip", action="store_true")
    p.add_argument("--padded", default=None, help="operator size; default 4k rounded up to even for a bare k-support")
    p.add_argument("--iterations", type=int, default=1, help="alternating spectral/spatial passes (default 1)")
    p.add_argument("--samples", type=int, default=1000, help="Monte-Carlo sample count")
    p.add_argument("--report", default=None, help="report path (default stderr)")
    p.set_defaults(func=cmd_clip)

    p = sub.add_parser("bench", parents=[common], help="time clip against the oracle")
    p.add_argument("--sizes", default="4,8,16,32,64,128,256")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("selftest", parents=[common], help="run the invariant suite")
    p.add_argument("--inject-fault", choices=FAULTS, default=None, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_selftest)

    p = sub.add_parser("kernel", parents=[common], help="write a kernel file (substitute, random or delta)")
    p.add_argument("--kind", choices=["substitute", "random", "delta"], default="substitute")
    p.add_argument("--shape", default="9,9")
    p.set_defaults(func=cmd_kernel)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except CliError as exc:
        print(f"quatspec: {exc}", file=sys.stderr)
        return exc.code
    except OracleSizeError as exc:
        print(f"quatspec: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    except (ShapeMismatchError, QuatDomainError) as exc:
        print(f"quatspec: {exc}", file=sys.stderr)
        return EXIT_FLAGS


if __name__ == "__main__":
    sys.exit(main())
