"""Command-line front end: ``quatutv <command> ...``."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bounds import relative_error
from .errors import ConfigError, QuatError
from .experiments import bench, bounds_csv, factor_with, load_config, run_bounds_check, run_sweep, sweep_csv
from .media import load_bundle, load_frames, load_image, load_qmat, load_qten, save_bundle, save_frames, save_image
from .qfactor import qqrcp, qsvd
from .qmatrix import QMatrix
from .qtensor import QTensor, TransformSpec
from .sketch import SketchParams, cor_qurv, truncate_cor
from .tensor_utv import cor_qturv, qtulv, qturv, tqt_svd, truncate_tqt
from .utv import qulv, qurv

FACTOR_METHODS = ("qsvd", "qurv", "qulv", "qqrcp", "cor-qurv", "tqt-svd", "qturv", "qtulv", "cor-qturv")


def _load_any(path: str):
    p = Path(path)
    head = b""
    if p.is_file():
        with p.open("rb") as fh:
            head = fh.read(5)
    if head == b"QMAT1":
        return load_qmat(p)
    if head == b"QTEN1":
        return load_qten(p)
    if p.is_dir():
        return load_frames(p)
    return load_image(p)


def _write(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _cmd_factor(args) -> int:
    a = _load_any(args.input)
    method = args.method
    tensor_method = method in ("tqt-svd", "qturv", "qtulv", "cor-qturv")
    if tensor_method != isinstance(a, QTensor):
        raise ConfigError(f"method {method} does not match a {'tensor' if isinstance(a, QTensor) else 'matrix'} input",
                          "method")
    if method in ("cor-qurv", "cor-qturv") and args.l is None:
        raise ConfigError(f"{method} needs --l", "l")
    params = SketchParams(args.l, args.p, args.seed) if args.l is not None else None
    spec = TransformSpec.named(args.transform, a.tube_dims) if isinstance(a, QTensor) else None
    f = {
        "qsvd": lambda: qsvd(a),
        "qurv": lambda: qurv(a),
        "qulv": lambda: qulv(a),
        "qqrcp": lambda: qqrcp(a),
        "cor-qurv": lambda: cor_qurv(a, params),
        "tqt-svd": lambda: tqt_svd(a, spec),
        "qturv": lambda: qturv(a, spec),
        "qtulv": lambda: qtulv(a, spec),
        "cor-qturv": lambda: cor_qturv(a, params, spec),
    }[method]()
    save_bundle(f, args.output)
    rec = f.approx() if hasattr(f, "approx") else f.reconstruct()
    print(f"{method}: wrote {args.output} (reconstruction RE {relative_error(a, rec):.3e})")
    return 0


def _cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    out = args.output or cfg.output
    _write(sweep_csv(run_sweep(cfg)), out)
    return 0


def _cmd_bounds(args) -> int:
    cfg = load_config(args.config)
    report = run_bounds_check(cfg)
    _write(bounds_csv(report), args.output or cfg.output)
    return 0 if report.violations == 0 else 3


def _sketch_size(args, dims) -> int:
    l = args.l if args.l is not None else args.k + 5
    return min(l, min(dims))


def _cmd_image(args) -> int:
    a = load_image(args.input)
    if args.method == "cor-qurv":
        params = SketchParams(_sketch_size(args, a.shape), args.p, args.seed)
        f = cor_qurv(a, params)
        approx = truncate_cor(f, min(args.k, params.l))
    else:
        f, trunc = factor_with(args.method, a)
        approx = trunc(f, args.k)
    if args.output:
        save_image(args.output, approx)
    if args.bundle:
        save_bundle(f, args.bundle)
    print(f"{args.method} K={args.k}: RE {relative_error(a, approx):.6e}")
    return 0


def _cmd_video(args) -> int:
    a = load_frames(args.input, f=args.frames)
    spec = TransformSpec.named(args.transform, a.tube_dims)
    if args.method == "cor-qturv":
        params = SketchParams(_sketch_size(args, a.dims[:2]), args.p, args.seed)
        f = cor_qturv(a, params, spec)
        approx = truncate_tqt(f, min(args.k, params.l))
    else:
        f = {"qturv": qturv, "tqt-svd": tqt_svd, "qtulv": qtulv}[args.method](a, spec)
        approx = truncate_tqt(f, args.k)
    if args.output:
        save_frames(args.output, approx)
    if args.bundle:
        save_bundle(f, args.bundle)
    print(f"{args.method} K={args.k}: RE {relative_error(a, approx):.6e}")
    return 0


def _cmd_bench(args) -> int:
    bench(size=args.size, l=args.l, p=args.p, tensor_dims=tuple(args.tensor_dims), repeat=args.repeat,
          seed=args.seed)
    return 0


def _cmd_inspect(args) -> int:
    obj = load_bundle(args.bundle)
    if isinstance(obj, (QMatrix, QTensor)):
        print(repr(obj))
        return 0
    fields = {k: v for k, v in vars(obj).items()}
    print(type(obj).__name__)
    for k, v in fields.items():
        print(f"  {k}: {v!r}" if not hasattr(v, "shape") else f"  {k}: shape {v.shape}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quatutv", description="Quaternion UTV decompositions and experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("factor", help="factor a matrix/tensor file or image and write a bundle")
    p.add_argument("--method", choices=FACTOR_METHODS, required=True)
    p.add_argument("--input", required=True, help="QMAT1/QTEN1 file, PPM/raw image or frame directory")
    p.add_argument("--output", required=True, help="bundle path")
    p.add_argument("--l", type=int, help="sketch size for randomized methods")
    p.add_argument("--p", type=int, default=0, help="power parameter")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--transform", choices=("dct", "identity"), default="dct")
    p.set_defaults(func=_cmd_factor)

    p = sub.add_parser("sweep", help="RE versus K sweep from a config file (CSV)")
    p.add_argument("--config", required=True)
    p.add_argument("--output", help="CSV path (overrides the config)")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("bounds-check", help="Monte-Carlo check of the error bounds (CSV)")
    p.add_argument("--config", required=True)
    p.add_argument("--output", help="CSV path (overrides the config)")
    p.set_defaults(func=_cmd_bounds)

    for name, func, methods, default in (
        ("compress-image", _cmd_image, ("cor-qurv", "qurv", "qulv", "qsvd", "qqrcp"), "cor-qurv"),
        ("compress-video", _cmd_video, ("cor-qturv", "qturv", "qtulv", "tqt-svd"), "cor-qturv"),
    ):
        p = sub.add_parser(name, help=f"rank-K approximation ({name.split('-')[1]})")
        p.add_argument("--input", required=True)
        p.add_argument("--output", help="output image path or frame directory")
        p.add_argument("--bundle", help="also write the factors to this bundle")
        p.add_argument("--k", type=int, required=True, help="target rank K")
        p.add_argument("--l", type=int, help="sketch size (default K + 5)")
        p.add_argument("--p", type=int, default=1)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--method", choices=methods, default=default)
        if name == "compress-video":
            p.add_argument("--frames", type=int, help="use the first F frames")
            p.add_argument("--transform", choices=("dct", "identity"), default="dct")
        p.set_defaults(func=func)

    p = sub.add_parser("bench", help="informational timings of every method")
    p.add_argument("--size", type=int, default=200)
    p.add_argument("--l", type=int, default=20)
    p.add_argument("--p", type=int, default=1)
    p.add_argument("--tensor-dims", type=int, nargs="+", default=[60, 60, 8])
    p.add_argument("--repeat", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("inspect", help="summarize a bundle")
    p.add_argument("bundle")
    p.set_defaults(func=_cmd_inspect)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        where = f" (field {exc.field})" if exc.field else ""
        print(f"quatutv: config error{where}: {exc}", file=sys.stderr)
        return 2
    except (QuatError, OSError) as exc:
        print(f"quatutv: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
