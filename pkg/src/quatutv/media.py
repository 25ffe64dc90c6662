"""Color images and videos as pure quaternion arrays, plus factor bundles.

A pixel with channels (R, G, B) becomes the pure quaternion
``R i + G j + B k``. Supported inputs are binary PPM (P6, 8-bit) and raw
planar RGB8 (the R plane, then G, then B, each rows x cols bytes) whose size
comes from a ``<file>.dims`` sidecar holding ``rows cols``.

Factor bundles start with ``QBUNDLE1\\n``, a little-endian u64 header length
and a JSON header, followed by the QMAT1/QTEN1 blocks listed in the header.
"""
from __future__ import annotations

import io
import json
import os
import struct
from pathlib import Path

import numpy as np

from .errors import FormatVersionMismatch, FrameSizeMismatch, IoError, ParseError
from .qfactor import QRFactors, SVDFactors
from .qmatrix import QMatrix, read_qmat
from .qtensor import QTensor, TransformSpec, read_qten
from .sketch import CoRFactors, SketchParams
from .tensor_utv import TensorCoRFactors, TensorUTVFactors
from .utv import UTVFactors

BUNDLE_MAGIC = b"QBUNDLE1\n"
PPM = "ppm"
RAW = "raw"
FRAME_SUFFIXES = (".ppm", ".rgb", ".raw")


# ---------------------------------------------------------------------------
# images
# ---------------------------------------------------------------------------

def _read_bytes(path) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc


def _write_bytes(path, data: bytes) -> None:
    try:
        Path(path).write_bytes(data)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def _ppm_tokens(buf: bytes, count: int):
    """Read ``count`` whitespace-separated header tokens, skipping comments."""
    tokens, pos = [], 0
    while len(tokens) < count:
        while pos < len(buf) and buf[pos:pos + 1].isspace():
            pos += 1
        if pos < len(buf) and buf[pos:pos + 1] == b"#":
            end = buf.find(b"\n", pos)
            if end < 0:
                raise ParseError("unterminated comment in PPM header")
            pos = end + 1
            continue
        start = pos
        while pos < len(buf) and not buf[pos:pos + 1].isspace() and buf[pos:pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise ParseError("truncated PPM header")
        tokens.append(buf[start:pos])
    # exactly one whitespace byte separates the header from the raster
    return tokens, pos + 1


def decode_ppm(buf: bytes) -> np.ndarray:
    """P6 bytes -> uint8 array of shape (rows, cols, 3)."""
    if not buf.startswith(b"P6"):
        raise ParseError(f"not a binary PPM (magic {buf[:2]!r})")
    tokens, pos = _ppm_tokens(buf, 4)
    try:
        cols, rows, maxval = (int(t) for t in tokens[1:])
    except ValueError as exc:
        raise ParseError(f"bad PPM header fields {tokens[1:]}") from exc
    if cols < 1 or rows < 1:
        raise ParseError(f"bad PPM dimensions {cols}x{rows}")
    if not 0 < maxval < 256:
        raise ParseError(f"only 8-bit PPM is supported (maxval {maxval})")
    need = rows * cols * 3
    raster = buf[pos:pos + need]
    if len(raster) != need:
        raise ParseError(f"PPM raster has {len(raster)} bytes, expected {need}")
    return np.frombuffer(raster, dtype=np.uint8).reshape(rows, cols, 3)


def encode_ppm(rgb: np.ndarray) -> bytes:
    rows, cols, _ = rgb.shape
    return f"P6\n{cols} {rows}\n255\n".encode() + np.ascontiguousarray(rgb, dtype=np.uint8).tobytes()


def _sidecar(path) -> Path:
    return Path(str(path) + ".dims")


def read_dims(path) -> tuple[int, int]:
    text = _read_bytes(_sidecar(path)).decode(errors="replace").split()
    try:
        rows, cols = (int(t) for t in text)
    except ValueError as exc:
        raise ParseError(f"sidecar {_sidecar(path)} must hold 'rows cols'") from exc
    return rows, cols


def decode_raw(buf: bytes, dims) -> np.ndarray:
    rows, cols = dims
    if rows < 1 or cols < 1:
        raise ParseError(f"bad raw dimensions {dims}")
    if len(buf) != 3 * rows * cols:
        raise ParseError(f"raw RGB8 file has {len(buf)} bytes, expected {3 * rows * cols}")
    return np.frombuffer(buf, dtype=np.uint8).reshape(3, rows, cols).transpose(1, 2, 0)


def encode_raw(rgb: np.ndarray) -> bytes:
    return np.ascontiguousarray(np.asarray(rgb, dtype=np.uint8).transpose(2, 0, 1)).tobytes()


def _guess_format(path) -> str:
    return PPM if str(path).lower().endswith(".ppm") else RAW


def load_rgb(path, fmt: str | None = None, dims=None) -> np.ndarray:
    fmt = fmt or _guess_format(path)
    buf = _read_bytes(path)
    if fmt == PPM:
        return decode_ppm(buf)
    if fmt == RAW:
        return decode_raw(buf, read_dims(path) if dims is None else dims)
    raise ParseError(f"unknown image format {fmt!r}")


def rgb_to_quaternion(rgb: np.ndarray) -> np.ndarray:
    rgb = np.asarray(rgb)
    out = np.zeros(rgb.shape[:-1] + (4,))
    out[..., 1:] = rgb
    return out


def quaternion_to_rgb(data: np.ndarray) -> np.ndarray:
    """Imaginary parts rounded and clipped to 0..255; the real part is dropped."""
    return np.clip(np.rint(np.asarray(data)[..., 1:]), 0, 255).astype(np.uint8)


def load_image(path, fmt: str | None = None, dims=None) -> QMatrix:
    """Load a color image as a pure quaternion matrix (rows x cols)."""
    return QMatrix(rgb_to_quaternion(load_rgb(path, fmt, dims)), copy=False)


def save_image(path, img: QMatrix, fmt: str | None = None) -> None:
    """Write a quaternion matrix as an 8-bit image (with a sidecar for raw)."""
    fmt = fmt or _guess_format(path)
    rgb = quaternion_to_rgb(img.data)
    if fmt == PPM:
        _write_bytes(path, encode_ppm(rgb))
    elif fmt == RAW:
        _write_bytes(path, encode_raw(rgb))
        _write_bytes(_sidecar(path), f"{rgb.shape[0]} {rgb.shape[1]}\n".encode())
    else:
        raise ParseError(f"unknown image format {fmt!r}")


def _frame_paths(source) -> list[Path]:
    if isinstance(source, (str, os.PathLike)) and Path(source).is_dir():
        paths = sorted(p for p in Path(source).iterdir() if p.suffix.lower() in FRAME_SUFFIXES)
        if not paths:
            raise IoError(f"no frames found in {source}")
        return paths
    if isinstance(source, (str, os.PathLike)):
        return [Path(source)]
    return [Path(p) for p in source]


def load_frames(source, dims=None, f: int | None = None, fmt: str | None = None) -> QTensor:
    """Stack the first ``f`` frames (all by default) into a rows x cols x f tensor.

    ``source`` is a directory (frames sorted by name) or a list of paths.
    """
    paths = _frame_paths(source)
    if f is not None:
        if f < 1:
            raise ParseError(f"frame count must be >= 1, got {f}")
        if len(paths) < f:
            raise IoError(f"asked for {f} frames, found {len(paths)}")
        paths = paths[:f]
    frames = []
    for p in paths:
        rgb = load_rgb(p, fmt, dims)
        if frames and rgb.shape != frames[0].shape:
            raise FrameSizeMismatch(f"{p} is {rgb.shape[:2]}, expected {frames[0].shape[:2]}")
        frames.append(rgb)
    return QTensor(rgb_to_quaternion(np.stack(frames, axis=2)), copy=False)


def save_frames(directory, video: QTensor, fmt: str = PPM) -> list[Path]:
    d = Path(directory)
    try:
        d.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create {d}: {exc}") from exc
    flat = video.flat()
    ext = ".ppm" if fmt == PPM else ".rgb"
    paths = []
    for s in range(flat.shape[2]):
        p = d / f"frame{s:05d}{ext}"
        save_image(p, QMatrix(flat[:, :, s]), fmt)
        paths.append(p)
    return paths


def save_qmat(path, a: QMatrix) -> None:
    _write_bytes(path, a.to_bytes())


def load_qmat(path) -> QMatrix:
    return read_qmat(io.BytesIO(_read_bytes(path)))


def save_qten(path, t: QTensor) -> None:
    _write_bytes(path, t.to_bytes())


def load_qten(path) -> QTensor:
    return read_qten(io.BytesIO(_read_bytes(path)))


# ---------------------------------------------------------------------------
# factor bundles
# ---------------------------------------------------------------------------

def _real_block(values) -> QMatrix:
    v = np.atleast_2d(np.asarray(values, dtype=np.float64))
    return QMatrix.from_components(v)


def _spec_blocks(spec: TransformSpec):
    meta = {"family": spec.family, "tube_dims": list(spec.tube_dims)}
    blocks = []
    if spec.family == "custom":
        for k, (m, mi) in enumerate(zip(spec.matrices, spec.inverses)):
            blocks += [(f"spec{k}", _real_block(m)), (f"spec_inv{k}", _real_block(mi))]
    return meta, blocks


def _params_meta(params: SketchParams | None):
    if params is None:
        return None
    return {"l": params.l, "p": params.p, "seed": params.seed, "shortcut": params.shortcut}


def _to_blocks(f):
    """``(type, meta, [(role, block)])`` for a supported object."""
    if isinstance(f, QMatrix):
        return "QMatrix", {}, [("A", f)]
    if isinstance(f, QTensor):
        return "QTensor", {}, [("A", f)]
    if isinstance(f, QRFactors):
        meta = {"perm": None if f.perm is None else [int(i) for i in f.perm]}
        return "QRFactors", meta, [("Q", f.Q), ("R", f.R)]
    if isinstance(f, SVDFactors):
        return "SVDFactors", {}, [("U", f.U), ("sigma", _real_block(f.sigma[:, None])), ("V", f.V)]
    if isinstance(f, UTVFactors):
        return "UTVFactors", {"kind": f.kind}, [("U", f.U), ("T", f.T), ("V", f.V)]
    if isinstance(f, CoRFactors):
        return "CoRFactors", {"params": _params_meta(f.params)}, [("U", f.U), ("R", f.R), ("V", f.V)]
    if isinstance(f, TensorUTVFactors):
        smeta, sblocks = _spec_blocks(f.spec)
        return "TensorUTVFactors", {"kind": f.kind, "spec": smeta}, [("U", f.U), ("T", f.T), ("V", f.V)] + sblocks
    if isinstance(f, TensorCoRFactors):
        smeta, sblocks = _spec_blocks(f.spec)
        meta = {"params": _params_meta(f.params), "spec": smeta}
        return "TensorCoRFactors", meta, [("U", f.U), ("R", f.R), ("V", f.V)] + sblocks
    raise TypeError(f"cannot bundle {type(f).__name__}")


def bundle_bytes(f) -> bytes:
    kind, meta, blocks = _to_blocks(f)
    header = {
        "type": kind,
        "meta": meta,
        "blocks": [{"role": r, "format": "QMAT1" if isinstance(b, QMatrix) else "QTEN1"} for r, b in blocks],
    }
    head = json.dumps(header, sort_keys=True).encode()
    return BUNDLE_MAGIC + struct.pack("<Q", len(head)) + head + b"".join(b.to_bytes() for _, b in blocks)


def save_bundle(f, path) -> None:
    """Write a factor bundle (any factor type, QMatrix or QTensor)."""
    _write_bytes(path, bundle_bytes(f))


def _spec_from(meta, blocks) -> TransformSpec:
    family, dims = meta["family"], tuple(meta["tube_dims"])
    if family != "custom":
        return TransformSpec.named(family, dims)
    mats = [blocks[f"spec{k}"].w for k in range(len(dims))]
    invs = [blocks[f"spec_inv{k}"].w for k in range(len(dims))]
    return TransformSpec(tuple(mats), tuple(invs), family)


def _params_from(meta):
    return None if meta is None else SketchParams(**meta)


def parse_bundle(buf: bytes):
    if not buf.startswith(BUNDLE_MAGIC):
        raise FormatVersionMismatch(f"not a factor bundle (magic {buf[:len(BUNDLE_MAGIC)]!r})")
    stream = io.BytesIO(buf)
    stream.read(len(BUNDLE_MAGIC))
    raw_len = stream.read(8)
    if len(raw_len) != 8:
        raise FormatVersionMismatch("truncated bundle header")
    (hlen,) = struct.unpack("<Q", raw_len)
    head = stream.read(hlen)
    if len(head) != hlen:
        raise FormatVersionMismatch("truncated bundle header")
    try:
        header = json.loads(head)
        kind, meta, layout = header["type"], header["meta"], header["blocks"]
    except (ValueError, KeyError, TypeError) as exc:
        raise FormatVersionMismatch(f"malformed bundle header: {exc}") from exc
    blocks = {}
    for entry in layout:
        reader = read_qmat if entry["format"] == "QMAT1" else read_qten
        blocks[entry["role"]] = reader(stream)
    b = blocks
    if kind in ("QMatrix", "QTensor"):
        return b["A"]
    if kind == "QRFactors":
        perm = meta.get("perm")
        return QRFactors(b["Q"], b["R"], None if perm is None else np.asarray(perm, dtype=np.int64))
    if kind == "SVDFactors":
        return SVDFactors(b["U"], b["sigma"].w[:, 0].copy(), b["V"])
    if kind == "UTVFactors":
        return UTVFactors(b["U"], b["T"], b["V"], meta["kind"])
    if kind == "CoRFactors":
        return CoRFactors(b["U"], b["R"], b["V"], _params_from(meta.get("params")))
    if kind == "TensorUTVFactors":
        return TensorUTVFactors(b["U"], b["T"], b["V"], _spec_from(meta["spec"], b), meta["kind"])
    if kind == "TensorCoRFactors":
        return TensorCoRFactors(b["U"], b["R"], b["V"], _spec_from(meta["spec"], b), _params_from(meta["params"]))
    raise FormatVersionMismatch(f"unknown bundle type {kind!r}")


def load_bundle(path):
    return parse_bundle(_read_bytes(path))
