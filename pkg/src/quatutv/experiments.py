"""Experiment drivers behind the command line: RE sweeps, bound checks, bench.

Configs are flat ``key = value`` files (``#`` starts a comment)::

    kind = synthetic-product      # synthetic-product | synthetic-spectrum | image | video
    dims = 200x200                # MxN for matrices, MxNxF for tensors
    rank = 40
    methods = qsvd, qurv, qqrcp
    k = 10:10:100                 # start:step:stop, stop inclusive
    l = 20
    p = 0, 1, 2
    seeds = 0:10                  # half-open range or comma list
    transform = dct
    output = sweep.csv
"""
from __future__ import annotations

import csv
import io
import math
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from .bounds import (BoundInputs, det_bound_matrix, det_bound_tensor, expected_bound_matrix,
                     expected_bound_tensor, realized_sketch_norms, relative_error)
from .errors import ConfigError, QuatError
from .qfactor import qqrcp, qsvd, truncate_svd
from .qtensor import TransformSpec
from .sketch import SketchParams, cor_qurv, draw_test_matrix, rand_qsvd, truncate_cor
from .synthetic import (inverse_square, low_rank_product, tensor_low_rank_product, tensor_with_spectrum,
                        with_spectrum)
from .tensor_utv import cor_qturv, qtulv, qturv, tqt_svd, truncate_tqt
from .utv import qulv, qurv, truncate_qqrcp, truncate_utv

SWEEP_HEADER = "# quatutv-sweep v1"
BOUNDS_HEADER = "# quatutv-bounds v1"
SWEEP_COLUMNS = ["method", "K", "p", "seed", "RE", "seconds"]
BOUNDS_COLUMNS = ["trial", "seed", "observed_error", "det_bound", "expected_bound", "ratio", "det_ok", "full_row_rank"]
# absolute slack, relative to ||A||_F, when flagging bound dominance
DOMINANCE_SLACK = 1e-10

KINDS = ("synthetic-product", "synthetic-spectrum", "image", "video")
MATRIX_METHODS = ("qsvd", "qurv", "qulv", "qqrcp", "cor-qurv", "rand-qsvd")
TENSOR_METHODS = ("tqt-svd", "qturv", "qtulv", "cor-qturv")
RANDOMIZED = ("cor-qurv", "rand-qsvd", "cor-qturv")
SPECTRA = ("inverse-square", "exact-rank")
SPECTRUM_ALIASES = {"1/i^2": "inverse-square", "1/i2": "inverse-square", "1/i²": "inverse-square"}
KNOWN_KEYS = {"kind", "dims", "rank", "spectrum", "methods", "k", "l", "p", "seeds", "transform", "output",
              "input", "trials", "P", "K", "data_seed", "shortcut", "frames"}


@dataclass
class ExperimentConfig:
    kind: str
    dims: tuple = ()
    rank: int | None = None
    spectrum: str = "inverse-square"
    methods: list = field(default_factory=list)
    k_values: list = field(default_factory=list)
    l: int | None = None
    p_values: list = field(default_factory=lambda: [0])
    seeds: list = field(default_factory=lambda: [0])
    transform: str = "dct"
    output: str | None = None
    input: str | None = None
    trials: int | None = None
    P: int = 2
    K: int | None = None
    data_seed: int = 0
    shortcut: bool = False
    frames: int | None = None

    @property
    def is_tensor(self) -> bool:
        return self.kind == "video" or len(self.dims) >= 3


def _int(value: str, name: str) -> int:
    try:
        return int(value)
    except ValueError as exc:
        raise ConfigError(f"{name} must be an integer, got {value!r}", name) from exc


def _int_list(value: str, name: str) -> list[int]:
    value = value.strip()
    if ":" in value:
        parts = [_int(v, name) for v in value.split(":")]
        if len(parts) != 2 or parts[1] <= parts[0]:
            raise ConfigError(f"{name} range must be start:stop with stop > start", name)
        return list(range(parts[0], parts[1]))
    return [_int(v, name) for v in value.split(",") if v.strip()]


def _sweep(value: str) -> list[int]:
    parts = value.split(":")
    if len(parts) == 1:
        return [_int(parts[0], "k")]
    if len(parts) != 3:
        raise ConfigError("k must be start:step:stop", "k")
    start, step, stop = (_int(v, "k") for v in parts)
    if step < 1 or start < 1 or stop < start:
        raise ConfigError(f"bad K sweep {value!r}", "k")
    return list(range(start, stop + 1, step))


def _dims(value: str) -> tuple:
    parts = value.lower().replace(",", "x").split("x")
    dims = tuple(_int(v.strip(), "dims") for v in parts if v.strip())
    if len(dims) < 2 or min(dims) < 1:
        raise ConfigError(f"bad dims {value!r}", "dims")
    return dims


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a ``key = value`` config."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value", None)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KNOWN_KEYS:
            raise ConfigError(f"unknown key {key!r}", key)
        raw[key] = value

    kind = raw.get("kind")
    if kind not in KINDS:
        raise ConfigError(f"kind must be one of {', '.join(KINDS)}", "kind")
    cfg = ExperimentConfig(kind=kind)
    if "dims" in raw:
        cfg.dims = _dims(raw["dims"])
    if "rank" in raw:
        cfg.rank = _int(raw["rank"], "rank")
    if "spectrum" in raw:
        spec = SPECTRUM_ALIASES.get(raw["spectrum"], raw["spectrum"])
        if spec not in SPECTRA:
            raise ConfigError(f"spectrum must be one of {', '.join(SPECTRA)}", "spectrum")
        cfg.spectrum = spec
    cfg.methods = [m.strip() for m in raw.get("methods", "").split(",") if m.strip()]
    if "k" in raw:
        cfg.k_values = _sweep(raw["k"])
    if "l" in raw:
        cfg.l = _int(raw["l"], "l")
    if "p" in raw:
        cfg.p_values = _int_list(raw["p"], "p")
    if "seeds" in raw:
        cfg.seeds = _int_list(raw["seeds"], "seeds")
    cfg.transform = raw.get("transform", cfg.transform)
    cfg.output = raw.get("output")
    cfg.input = raw.get("input")
    if "trials" in raw:
        cfg.trials = _int(raw["trials"], "trials")
    if "P" in raw:
        cfg.P = _int(raw["P"], "P")
    if "K" in raw:
        cfg.K = _int(raw["K"], "K")
    if "data_seed" in raw:
        cfg.data_seed = _int(raw["data_seed"], "data_seed")
    if "frames" in raw:
        cfg.frames = _int(raw["frames"], "frames")
    if "shortcut" in raw:
        cfg.shortcut = raw["shortcut"].lower() in ("1", "true", "yes", "on")
    _validate(cfg)
    return cfg


def _validate(cfg: ExperimentConfig) -> None:
    if cfg.kind in ("image", "video"):
        if not cfg.input:
            raise ConfigError(f"kind {cfg.kind} needs input", "input")
    elif not cfg.dims:
        raise ConfigError("synthetic kinds need dims", "dims")
    if cfg.kind == "synthetic-product" and (cfg.rank is None or cfg.rank < 1):
        raise ConfigError("synthetic-product needs rank >= 1", "rank")
    if cfg.kind == "synthetic-spectrum" and cfg.spectrum == "exact-rank" and (cfg.rank is None or cfg.rank < 1):
        raise ConfigError("the exact-rank spectrum needs rank >= 1", "rank")
    if cfg.transform not in ("dct", "identity"):
        raise ConfigError("transform must be dct or identity", "transform")
    if any(p < 0 for p in cfg.p_values) or not cfg.p_values:
        raise ConfigError("p values must be >= 0", "p")
    if not cfg.seeds:
        raise ConfigError("need at least one seed", "seeds")
    if cfg.l is not None and cfg.l < 1:
        raise ConfigError("l must be >= 1", "l")
    if cfg.dims:
        if cfg.is_tensor and len(cfg.dims) < 3:
            raise ConfigError("tensor kinds need at least three dims", "dims")
        if cfg.l is not None and cfg.l > min(cfg.dims[:2]):
            raise ConfigError(f"l={cfg.l} exceeds the matrix dimensions", "l")
        if cfg.k_values and max(cfg.k_values) > min(cfg.dims[:2]):
            raise ConfigError("K sweep exceeds the matrix dimensions", "k")
    allowed = TENSOR_METHODS if cfg.is_tensor else MATRIX_METHODS
    bad = [m for m in cfg.methods if m not in allowed]
    if bad:
        raise ConfigError(f"methods {bad} are not valid for kind {cfg.kind} (choose from {', '.join(allowed)})",
                          "methods")
    if any(m in RANDOMIZED for m in cfg.methods):
        if cfg.l is None:
            raise ConfigError("randomized methods need l", "l")
        if cfg.k_values and max(cfg.k_values) > cfg.l:
            raise ConfigError(f"K sweep exceeds the sketch size l={cfg.l}", "k")


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}", "config") from exc


# ---------------------------------------------------------------------------
# data
# ---------------------------------------------------------------------------

def _spectrum(cfg: ExperimentConfig, n: int) -> np.ndarray:
    if cfg.spectrum == "exact-rank":
        s = np.zeros(n)
        s[: cfg.rank] = 1.0
        return s
    return inverse_square(n)


def _spec(cfg: ExperimentConfig, tube_dims) -> TransformSpec:
    return TransformSpec.named(cfg.transform, tube_dims)


def build_data(cfg: ExperimentConfig):
    """The matrix or tensor described by the config."""
    from .media import load_frames, load_image

    if cfg.kind == "image":
        return load_image(cfg.input)
    if cfg.kind == "video":
        return load_frames(cfg.input, f=cfg.frames)
    if cfg.is_tensor:
        m, n, *tube = cfg.dims
        if cfg.kind == "synthetic-product":
            return tensor_low_rank_product(m, n, tube, cfg.rank, _spec(cfg, tube), cfg.data_seed)
        return tensor_with_spectrum(m, n, tube, _spectrum(cfg, min(m, n)), _spec(cfg, tube), cfg.data_seed).A
    m, n = cfg.dims
    if cfg.kind == "synthetic-product":
        return low_rank_product(m, n, cfg.rank, cfg.data_seed)
    return with_spectrum(m, n, _spectrum(cfg, min(m, n)), cfg.data_seed).A


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepRow:
    method: str
    K: int
    p: int | None
    seed: int | None
    RE: float
    seconds: float


def _timed(fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - t0


def factor_with(method, a, spec=None):
    """Run a deterministic method; returns ``(factors, truncate)``."""
    if method == "qsvd":
        return qsvd(a), truncate_svd
    if method == "qurv":
        return qurv(a), truncate_utv
    if method == "qulv":
        return qulv(a), truncate_utv
    if method == "qqrcp":
        return qqrcp(a), truncate_qqrcp
    if method == "tqt-svd":
        return tqt_svd(a, spec), truncate_tqt
    if method == "qturv":
        return qturv(a, spec), truncate_tqt
    if method == "qtulv":
        return qtulv(a, spec), truncate_tqt
    raise ConfigError(f"unknown method {method!r}", "methods")


def _randomized(method, a, params, spec):
    if method == "cor-qurv":
        return cor_qurv(a, params), truncate_cor
    if method == "rand-qsvd":
        return rand_qsvd(a, params), truncate_svd
    return cor_qturv(a, params, spec), truncate_tqt


def run_sweep(cfg: ExperimentConfig, data=None) -> list[SweepRow]:
    """RE (and wall time) for every (method, K, p, seed) in the config."""
    if not cfg.methods:
        raise ConfigError("method list is empty", "methods")
    a = build_data(cfg) if data is None else data
    dims = a.dims if hasattr(a, "dims") else a.shape
    r = min(dims[:2])
    ks = cfg.k_values or list(range(1, r + 1))
    if max(ks) > r:
        raise ConfigError(f"K sweep exceeds min dimension {r}", "k")
    spec = _spec(cfg, a.tube_dims) if cfg.is_tensor else None
    rows = []
    for method in cfg.methods:
        if method in RANDOMIZED:
            for p in cfg.p_values:
                for seed in cfg.seeds:
                    params = SketchParams(cfg.l, p, seed, cfg.shortcut)
                    f, secs = _timed(_randomized, method, a, params, spec)
                    for k in ks:
                        approx, t = _timed(f[1], f[0], k)
                        rows.append(SweepRow(method, k, p, seed, relative_error(a, approx), secs + t))
        else:
            f, secs = _timed(factor_with, method, a, spec)
            for k in ks:
                approx, t = _timed(f[1], f[0], k)
                rows.append(SweepRow(method, k, None, None, relative_error(a, approx), secs + t))
    return rows


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def sweep_csv(rows) -> str:
    out = io.StringIO()
    out.write(SWEEP_HEADER + "\n")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for r in rows:
        w.writerow([r.method, r.K, _fmt(r.p), _fmt(r.seed), _fmt(r.RE), f"{r.seconds:.6f}"])
    return out.getvalue()


# ---------------------------------------------------------------------------
# bound checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundRow:
    trial: int
    seed: int
    observed_error: float
    det_bound: float
    expected_bound: float
    full_row_rank: bool
    det_ok: bool

    @property
    def ratio(self) -> float:
        return self.observed_error / self.det_bound if self.det_bound > 0 else (0.0 if self.observed_error == 0 else math.inf)


@dataclass(frozen=True)
class BoundReport:
    rows: list
    expected_bound: float
    mean_observed: float
    tail: float

    @property
    def violations(self) -> int:
        return sum(not r.det_ok for r in self.rows if r.full_row_rank)

    @property
    def rank_deficient(self) -> int:
        return sum(not r.full_row_rank for r in self.rows)

    @property
    def mean_ok(self) -> bool:
        return self.mean_observed <= self.expected_bound


def run_bounds_check(cfg: ExperimentConfig) -> BoundReport:
    """Monte-Carlo comparison of CoR errors against the deterministic and expected bounds."""
    if cfg.kind != "synthetic-spectrum":
        raise ConfigError("bounds-check needs kind = synthetic-spectrum (the spectrum must be known)", "kind")
    if cfg.l is None:
        raise ConfigError("bounds-check needs l", "l")
    if cfg.K is None:
        raise ConfigError("bounds-check needs K", "K")
    trials = cfg.trials if cfg.trials is not None else len(cfg.seeds)
    if trials < 1:
        raise ConfigError("trials must be >= 1", "trials")
    seeds = cfg.seeds if len(cfg.seeds) >= trials else list(range(trials))
    p = cfg.p_values[0]
    m, n = cfg.dims[:2]
    l, P, K = cfg.l, cfg.P, cfg.K
    try:
        BoundInputs(np.ones(min(m, n)), K, P, l, p, m, n)
    except QuatError as exc:
        raise ConfigError(str(exc), "K") from exc

    rows = []
    if cfg.is_tensor:
        tube = cfg.dims[2:]
        spec = _spec(cfg, tube)
        st = tensor_with_spectrum(m, n, tube, _spectrum(cfg, min(m, n)), spec, cfg.data_seed)
        a = st.A
        base = [BoundInputs(st.sigma[s], K, P, l, p, m, n) for s in range(len(st.V))]
        expected = expected_bound_tensor(base, len(base))
        tail = math.sqrt(sum(b.tail**2 for b in base))
    else:
        sm = with_spectrum(m, n, _spectrum(cfg, min(m, n)), cfg.data_seed)
        a = sm.A
        base_m = BoundInputs(sm.sigma, K, P, l, p, m, n)
        expected = expected_bound_matrix(base_m)
        tail = base_m.tail
    scale = a.frobenius()
    for t in range(trials):
        seed = seeds[t]
        omega = draw_test_matrix(n, l, seed)
        params = SketchParams(l, p, seed, cfg.shortcut)
        if cfg.is_tensor:
            approx = cor_qturv(a, params, spec, omega=omega).approx()
            norms = [realized_sketch_norms(v, omega, l, P) for v in st.V]
            rank_ok = all(nr.full_row_rank for nr in norms)
            det = det_bound_tensor([b.with_sketch(nr.omega1_pinv_norm, nr.omega2_norm)
                                    for b, nr in zip(base, norms)]) if rank_ok else math.inf
        else:
            approx = cor_qurv(a, params, omega=omega).approx()
            nr = realized_sketch_norms(sm.V, omega, l, P)
            rank_ok = nr.full_row_rank
            det = det_bound_matrix(base_m.with_sketch(nr.omega1_pinv_norm, nr.omega2_norm)) if rank_ok else math.inf
        err = (a - approx).frobenius()
        rows.append(BoundRow(t, seed, err, det, expected, rank_ok, err <= det + DOMINANCE_SLACK * scale))
    mean = float(np.mean([r.observed_error for r in rows]))
    return BoundReport(rows, expected, mean, tail)


def bounds_csv(report: BoundReport) -> str:
    out = io.StringIO()
    out.write(BOUNDS_HEADER + "\n")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(BOUNDS_COLUMNS)
    for r in report.rows:
        w.writerow([r.trial, r.seed, repr(r.observed_error), repr(r.det_bound), repr(r.expected_bound),
                    repr(r.ratio), int(r.det_ok), int(r.full_row_rank)])
    out.write(
        f"# summary trials={len(report.rows)} det_violations={report.violations} "
        f"rank_deficient={report.rank_deficient} mean_observed={report.mean_observed!r} "
        f"expected_bound={report.expected_bound!r} mean_ok={int(report.mean_ok)}\n"
    )
    return out.getvalue()


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------

def bench(size: int = 200, l: int = 20, p: int = 1, tensor_dims=(60, 60, 8), repeat: int = 1,
          seed: int = 0, stream=None) -> list[tuple[str, float, float]]:
    """Time each method on 1/i^2 test problems; informational only.

    Returns ``(label, best seconds, RE)`` rows and prints a table to ``stream``.
    """
    stream = sys.stdout if stream is None else stream
    a = with_spectrum(size, size, inverse_square(size), seed).A
    params = SketchParams(l, p, seed)
    cases = [
        ("qqrcp", lambda: truncate_qqrcp(qqrcp(a), l)),
        ("qurv (thin)", lambda: truncate_utv(qurv(a, thin=True), l)),
        ("qurv (full)", lambda: truncate_utv(qurv(a), l)),
        ("qsvd", lambda: truncate_svd(qsvd(a), l)),
        (f"cor-qurv l={l} p={p}", lambda: cor_qurv(a, params).approx()),
        (f"rand-qsvd l={l} p={p}", lambda: rand_qsvd(a, params).reconstruct()),
    ]
    m, n, *tube = tensor_dims
    t = tensor_with_spectrum(m, n, tube, inverse_square(min(m, n)), seed=seed).A
    lt = min(l, m, n)
    tparams = SketchParams(lt, p, seed)
    cases += [
        ("qturv", lambda: truncate_tqt(qturv(t), lt)),
        ("tqt-svd", lambda: truncate_tqt(tqt_svd(t), lt)),
        (f"cor-qturv l={lt} p={p}", lambda: cor_qturv(t, tparams).approx()),
    ]
    results = []
    stream.write(f"# bench: {size}x{size} matrix, {'x'.join(map(str, tensor_dims))} tensor, "
                 f"rank {l} approximations (timings are machine dependent)\n")
    stream.write(f"{'method':<28}{'seconds':>12}{'RE':>14}\n")
    for label, fn in cases:
        best = math.inf
        for _ in range(max(1, repeat)):
            approx, secs = _timed(fn)
            best = min(best, secs)
        ref = t if label.startswith(("qturv", "tqt", "cor-qturv")) else a
        re = relative_error(ref, approx)
        results.append((label, best, re))
        stream.write(f"{label:<28}{best:>12.4f}{re:>14.3e}\n")
    return results
