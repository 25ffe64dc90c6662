"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -s`` to see the per-criterion detail
lines; the terminal summary lists every criterion either way.
"""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import adjoint_singular_values, real_counterpart_norm
from quatutv.bounds import relative_error
from quatutv.experiments import bench, parse_config, run_bounds_check
from quatutv.qfactor import qqrcp, qsvd, truncate_svd
from quatutv.qmatrix import QMatrix, frobenius, unitarity_error
from quatutv.qtensor import QTensor, TransformSpec, apply_transform, identity_tensor, qt_conj_transpose, qt_product
from quatutv.sketch import SketchParams, cor_qurv
from quatutv.synthetic import (inverse_square, low_rank_product, tensor_low_rank_product, tensor_with_spectrum,
                               with_spectrum)
from quatutv.tensor_utv import cor_qturv, qturv, tqt_svd, truncate_tqt
from quatutv.utv import qulv, qurv, truncate_qqrcp, truncate_utv

criterion = pytest.mark.criterion


def report(n, ok, detail):
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, detail


def unitary_ok(u):
    return unitarity_error(u) <= 1e-10 * math.sqrt(u.cols)


@pytest.fixture(scope="module")
def inverse_square_300():
    return with_spectrum(300, 300, inverse_square(300), seed=0).A


@pytest.fixture(scope="module")
def inverse_square_tensor():
    return tensor_with_spectrum(60, 60, (8,), inverse_square(60), seed=0)


@criterion(1)
def test_exact_factorization():
    rng = np.random.default_rng(1)
    worst_re, worst_u, bad = 0.0, 0.0, []
    for trial in range(50):
        m, n = int(rng.integers(1, 121)), int(rng.integers(1, 101))
        a = QMatrix.random(m, n, rng)
        for name, f in (("qurv", qurv(a)), ("qulv", qulv(a)), ("qqrcp", qqrcp(a)), ("qsvd", qsvd(a))):
            re = relative_error(a, f.reconstruct())
            us = [f.Q] if name == "qqrcp" else [f.U, f.V]
            uerr = max(unitarity_error(u) / math.sqrt(u.cols) for u in us)
            worst_re, worst_u = max(worst_re, re), max(worst_u, uerr)
            if re > 1e-10 or not all(unitary_ok(u) for u in us):
                bad.append((trial, name, m, n))
    report(1, not bad, f"50 matrices, max RE {worst_re:.2e}, max unitarity {worst_u:.2e}/sqrt(dim), failures {bad}")


@criterion(2)
def test_oracle_equivalence():
    rng = np.random.default_rng(2)
    worst_s, worst_f = 0.0, 0.0
    for _ in range(20):
        m, n = int(rng.integers(1, 60)), int(rng.integers(1, 60))
        a = QMatrix.random(m, n, rng)
        ref = adjoint_singular_values(a.data)
        worst_s = max(worst_s, float(np.max(np.abs(qsvd(a).sigma - ref)) / ref[0]))
        worst_f = max(worst_f, abs(frobenius(a) - real_counterpart_norm(a.data) / 2) / frobenius(a))
    report(2, worst_s <= 1e-10 and worst_f <= 1e-12,
           f"20 matrices, max sigma rel diff {worst_s:.2e}, max Frobenius rel diff {worst_f:.2e}")


@criterion(3)
def test_rank_deficient_ordering():
    a = low_rank_product(200, 200, 40, seed=3)
    fs, fu, fq = qsvd(a), qurv(a), qqrcp(a)
    ks = range(10, 101, 10)
    svd = [relative_error(a, truncate_svd(fs, k)) for k in ks]
    urv = [relative_error(a, truncate_utv(fu, k)) for k in ks]
    qr = [relative_error(a, truncate_qqrcp(fq, k)) for k in ks]
    order = all(s <= u + 1e-12 and u <= q + 1e-12 for s, u, q in zip(svd, urv, qr))
    monotone = all(np.all(np.diff(c) <= 1e-12) for c in (svd, urv, qr))
    report(3, order and monotone,
           f"K=10..100: ordering {order}, nonincreasing {monotone}, RE at K=40 {svd[3]:.1e}/{urv[3]:.1e}/{qr[3]:.1e}")


@criterion(4)
def test_inverse_square_spectrum(inverse_square_300):
    a = inverse_square_300
    fs, fu = qsvd(a), qurv(a)
    i4 = np.arange(1, 301, dtype=float) ** -4
    worst_svd, worst_ratio = 0.0, 0.0
    for k in range(2, 21, 2):
        opt = math.sqrt(i4[k:].sum()) / math.sqrt(i4.sum())
        worst_svd = max(worst_svd, abs(relative_error(a, truncate_svd(fs, k)) - opt))
        worst_ratio = max(worst_ratio, relative_error(a, truncate_utv(fu, k)) / opt)
    report(4, worst_svd <= 1e-8 and worst_ratio <= 2.0,
           f"K=2..20: max |RE_qsvd - optimal| {worst_svd:.1e}, max RE_qurv/optimal {worst_ratio:.3f}")


BOUND_CFG = "kind = synthetic-spectrum\ndims = {dims}\nl = 20\nP = 2\nK = 10\np = 1\ntrials = {trials}\n"


@criterion(5)
def test_deterministic_bound_dominance():
    rep = run_bounds_check(parse_config(BOUND_CFG.format(dims="100x80", trials=100)))
    ok = rep.violations == 0 and rep.rank_deficient == 0 and len(rep.rows) == 100
    worst = max(r.ratio for r in rep.rows)
    report(5, ok, f"{len(rep.rows) - rep.violations}/100 dominated, rank deficient {rep.rank_deficient}, "
                  f"max error/bound {worst:.3f}")


@criterion(6)
def test_expected_bound_dominance():
    mat = run_bounds_check(parse_config(BOUND_CFG.format(dims="100x80", trials=50)))
    ten = run_bounds_check(parse_config(BOUND_CFG.format(dims="60x60x8", trials=50)))
    ok = mat.mean_ok and ten.mean_ok and ten.violations == 0
    report(6, ok, f"matrix mean {mat.mean_observed:.3e} <= {mat.expected_bound:.3e}; "
                  f"tensor mean {ten.mean_observed:.3e} <= {ten.expected_bound:.3e}, "
                  f"tensor det violations {ten.violations}")


@criterion(7)
def test_power_iteration_ordering(inverse_square_300, inverse_square_tensor):
    a, t = inverse_square_300, inverse_square_tensor.A
    med = {}
    for p in (0, 1, 2):
        med["matrix", p] = np.median([relative_error(a, cor_qurv(a, SketchParams(20, p, s)).approx())
                                      for s in range(10)])
        med["tensor", p] = np.median([relative_error(t, cor_qturv(t, SketchParams(20, p, s)).approx())
                                      for s in range(10)])
    ok = all(med[k, 2] <= med[k, 1] <= med[k, 0] for k in ("matrix", "tensor"))
    detail = "; ".join(f"{k} p=0,1,2: " + ", ".join(f"{med[k, p]:.3e}" for p in (0, 1, 2))
                       for k in ("matrix", "tensor"))
    report(7, ok, detail)


_algebra = {"cases": 0, "worst": 0.0}
dims = st.integers(1, 4)


@settings(max_examples=200)
@given(dims, dims, dims, st.lists(dims, min_size=1, max_size=2), st.sampled_from(["dct", "identity"]),
       st.integers(0, 2**32 - 1))
def _algebra_case(i1, i2, i3, tube, family, seed):
    spec = TransformSpec.named(family, tube)
    rng = np.random.default_rng(seed)
    a = QTensor.random(i1, i2, *tube, seed=rng)
    b = QTensor.random(i2, i3, *tube, seed=rng)
    c = QTensor.random(i3, i1, *tube, seed=rng)

    def rel(x, y):
        return (x - y).frobenius() / max(x.frobenius(), 1e-300)

    errs = [
        rel(a, qt_product(a, identity_tensor(i2, spec), spec)),
        rel(qt_product(qt_product(a, b, spec), c, spec), qt_product(a, qt_product(b, c, spec), spec)),
        rel(qt_conj_transpose(qt_product(a, b, spec), spec),
            qt_product(qt_conj_transpose(b, spec), qt_conj_transpose(a, spec), spec)),
    ]
    if family == "dct":
        errs.append(abs(apply_transform(a, spec).frobenius() - a.frobenius()) / a.frobenius())
    _algebra["cases"] += 1
    _algebra["worst"] = max(_algebra["worst"], *errs)
    assert max(errs) <= 1e-10


@criterion(8)
def test_tensor_algebra_and_collapse():
    _algebra_case()
    spec = TransformSpec.identity((1,))
    worst = 0.0
    for seed in range(5):
        a2 = QMatrix.random(9, 7, seed)
        a = QTensor(a2.data[:, :, None, :])
        t, m = qturv(a, spec), qurv(a2)
        for x, y in ((t.U, m.U), (t.T, m.T), (t.V, m.V)):
            worst = max(worst, float(np.max(np.abs(x.data[:, :, 0] - y.data))))
        sig = tqt_svd(a, spec).T.data[np.arange(7), np.arange(7), 0, 0]
        worst = max(worst, float(np.max(np.abs(sig - qsvd(a2).sigma))))
    ok = _algebra["cases"] >= 200 and _algebra["worst"] <= 1e-10 and worst <= 1e-11
    report(8, ok, f"{_algebra['cases']} property cases, max algebra error {_algebra['worst']:.1e}; "
                  f"collapse max diff {worst:.1e}")


@criterion(9)
def test_exact_low_rank_capture():
    res = [relative_error(a, cor_qurv(a, SketchParams(14, 0, s)).approx())
           for s, a in ((s, low_rank_product(100, 80, 10, seed=100 + s)) for s in range(20))]
    t = tensor_low_rank_product(60, 60, (8,), 8, seed=9)
    tres = [relative_error(t, cor_qturv(t, SketchParams(12, 0, s)).approx()) for s in range(5)]
    hits = sum(r <= 1e-8 for r in res)
    ok = hits == 20 and max(tres) <= 1e-7
    report(9, ok, f"matrix {hits}/20 seeds <= 1e-8 (max {max(res):.1e}); tensor max RE {max(tres):.1e}")


@criterion(10)
def test_bench_is_informational(capsys):
    rows = bench(size=200, l=20, p=1, tensor_dims=(60, 60, 8))
    table = capsys.readouterr().out
    with capsys.disabled():
        print("\n" + table, end="")
    times = {label.split()[0]: secs for label, secs, _ in rows}
    report(10, len(rows) == 9 and all(np.isfinite(s) for _, s, _ in rows),
           f"informational: qurv {times['qurv']:.2f}s, qsvd {times['qsvd']:.2f}s, "
           f"cor-qurv {times['cor-qurv']:.3f}s")
