"""Acceptance suite: one PASS/FAIL line per criterion.

The lines are collected into the pytest terminal summary; run
``python3 tests/test_acceptance.py`` for a standalone report.
"""

import time

import numpy as np
import pytest

from ghzw_calculus import cfa, diagram as dg, ghzw, rewrite, slocc
from ghzw_calculus.tensor import (
    Tensor,
    Tolerance,
    apply_local,
    compose,
    effect,
    kron,
    ket,
    max_abs_diff,
    proportionality_residual,
    state,
)

TIGHT = Tolerance(1e-12, 1e-12)
LOOSE = Tolerance(1e-8, 1e-8)
PLDU_TOL = 1e-9
REWRITE_TOL = Tolerance(1e-9, 1e-9)


def _invertible(rng, cond_max=1e3):
    while True:
        m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        if np.linalg.cond(m) < cond_max:
            return m


REPORT_LINES: list[str] = []


def _report(n: int, ok: bool, detail: str, t0: float):
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail} ({time.perf_counter() - t0:.2f}s)"
    print(line)
    REPORT_LINES.append(line)
    return line


# ------------------------------------------------------------------ 1


def criterion_1():
    G, W = cfa.GHZ, cfa.W
    rg, rw = cfa.check_cfa(G, TIGHT), cfa.check_cfa(W, TIGHT)
    mu_delta = np.array([[0, 2], [0, 0]])
    exact = np.array_equal(W.mu_delta.matrix, mu_delta)
    ok = rg.passed and rw.passed and cfa.check_special(G, TIGHT) and cfa.check_antispecial(W, TIGHT) and exact
    return ok, f"cfa residuals ghz={rg.max_residual:.1e} w={rw.max_residual:.1e}, w mu.delta exact={exact}"


# ------------------------------------------------------------------ 2


def criterion_2():
    worst = 0.0
    for m in range(2, 7):
        worst = max(worst, max_abs_diff(cfa.spider(cfa.GHZ, 0, m), slocc.ghz_state(m)))
        worst = max(worst, max_abs_diff(cfa.spider(cfa.W, 0, m), slocc.w_state(m)))
    return worst < 1e-12, f"max spider residual {worst:.1e} over m=2..6"


# ------------------------------------------------------------------ 3


def criterion_3():
    circles = [cfa.GHZ.circle, cfa.W.circle]
    closed = [dg.evaluate(rewrite.spider_diagram(a, 0, 0, loops=1)).value() for a in ("ghz", "w")]
    trace = np.trace(cfa.W.mu_delta.matrix)
    scalars = [
        dg.evaluate(dg.parse_dsl(s)).value()
        for s in (
            "(seq (unit w) tick (counit w))",
            "(seq (unit ghz) tick (counit w))",
            "(seq (unit ghz) (counit w))",
        )
    ]
    ok = (
        all(abs(c - 2) < 1e-12 for c in circles + closed)
        and abs(trace) < 1e-12
        and all(abs(s - 1) < 1e-12 for s in scalars)
    )
    return ok, f"circles={[complex(c).real for c in closed]}, tr(mu.delta)={abs(trace):.1e}, scalars={[s.real for s in scalars]}"


# ------------------------------------------------------------------ 4


def criterion_4():
    rng = np.random.default_rng(4)
    ghz, w = slocc.ghz_state(3), slocc.w_state(3)
    wrong = 0
    for _ in range(100):
        maps = [_invertible(rng) for _ in range(3)]
        wrong += slocc.tripartite_classify(apply_local(ghz, maps)).leaf != "ghz"
        wrong += slocc.tripartite_classify(apply_local(w, maps)).leaf != "w"
    return wrong == 0, f"{wrong} misclassifications over 200 states"


# ------------------------------------------------------------------ 5


def _pipeline(base: Tensor, counit, expect: str, L: np.ndarray):
    psi = apply_local(base, [L, L, L])
    xi = compose(effect(counit), Tensor(np.linalg.inv(L), 1, 1))
    c = cfa.cfa_from_state(psi, xi)
    rep = cfa.check_cfa(c, LOOSE)
    cls = cfa.classify_cfa(c, LOOSE)
    norm_ok = (
        cfa.check_special(cls.normalized, LOOSE)
        if expect == "ghz"
        else cfa.check_antispecial(cls.normalized, LOOSE)
    )
    ok = rep.passed and cls.kind == expect and norm_ok and cls.residual < 1e-8
    return ok, max(rep.max_residual, cls.residual)


def criterion_5():
    rng = np.random.default_rng(5)
    bad, worst = 0, 0.0
    for _ in range(50):
        L = _invertible(rng)
        for base, counit, kind in ((cfa.GHZ3, [1, 1], "ghz"), (cfa.W3, [1, 0], "w")):
            ok, res = _pipeline(base, counit, kind, L)
            bad += not ok
            worst = max(worst, res)
    return bad == 0, f"{bad} failures over 100 pipelines, worst residual {worst:.1e}"


# ------------------------------------------------------------------ 6


def _same_cfa(a, b, projective=False):
    res = 0.0
    for name in ("mult", "unit", "comult", "counit"):
        x, y = getattr(a, name), getattr(b, name)
        res = max(res, proportionality_residual(x, y) if projective else max_abs_diff(x, y))
    return res


def criterion_6():
    tick = ghzw.make_tick(cfa.GHZ, cfa.W)
    tick_exact = np.array_equal(tick.matrix, ghzw.NOT.matrix)
    rep = ghzw.pair_check(ghzw.CANONICAL_PAIR, TIGHT)
    first, second = ghzw.partner_from_scfa(cfa.GHZ)
    conj = cfa.transport(cfa.W, ghzw.NOT.matrix)
    res_p = min(
        max(_same_cfa(first, cfa.W), _same_cfa(second, conj)),
        max(_same_cfa(second, cfa.W), _same_cfa(first, conj)),
    )
    back = ghzw.partner_from_acfa(first)
    res_rt = _same_cfa(back, cfa.GHZ, projective=True)
    ok = tick_exact and rep.passed and rep.max_residual < 1e-12 and res_p < 1e-12 and res_rt < 1e-12
    return ok, (
        f"tick==NOT {tick_exact}, pair checks failed={rep.failures}, "
        f"partners residual {res_p:.1e}, round trip {res_rt:.1e}"
    )


# ------------------------------------------------------------------ 7


def _round_key(t: Tensor):
    return (t.arity, tuple(np.round(t.entries, 9).tolist()))


def _agreement(alg: str, kind: str):
    diagrams = rewrite.enumerate_connected(alg, 6)
    oracle = [_round_key(dg.evaluate(d)) for d in diagrams]
    reps: dict[tuple, int] = {}
    wrong = 0
    for k, d in enumerate(diagrams):
        # compare against the first diagram with the same oracle value
        r = reps.setdefault(oracle[k], k)
        if r != k and not rewrite.decide_equal(diagrams[r], d, kind):
            wrong += 1
    # distinct oracle values of equal arity must be told apart
    by_arity: dict[tuple, list[int]] = {}
    for key, r in reps.items():
        by_arity.setdefault(key[0], []).append(r)
    for rs in by_arity.values():
        for i, a in enumerate(rs):
            for b in rs[i + 1 :]:
                wrong += rewrite.decide_equal(diagrams[a], diagrams[b], kind)
    return len(diagrams), len(reps), wrong


def criterion_7():
    parts, wrong = [], 0
    for alg, kind in (("ghz", "scfa"), ("w", "acfa")):
        n, classes, bad = _agreement(alg, kind)
        wrong += bad
        parts.append(f"{alg}: {n} diagrams, {classes} classes, {bad} disagreements")
    harness = [rewrite.soundness_harness(seed=7 + i, trials=500 // 3 + (i == 0) * 2, mode=m, tol=REWRITE_TOL)
               for i, m in enumerate(("ghz", "w", "mixed"))]
    applied = sum(h.applied for h in harness)
    worst = max(h.max_residual for h in harness)
    ok = wrong == 0 and all(h.passed for h in harness) and applied == 500 and worst < 1e-9
    parts.append(f"{applied} rewrites, worst residual {worst:.1e}")
    return ok, "; ".join(parts)


# ------------------------------------------------------------------ 8


def _random_state(rng, n):
    return state(rng.normal(size=2**n) + 1j * rng.normal(size=2**n))


def criterion_8():
    rng = np.random.default_rng(8)
    bad, worst = 0, 0.0
    for k in range(50):
        n = 1 + k % 3
        cert = ghzw.qmux_check(_random_state(rng, n), _random_state(rng, n), seed=k)
        bad += not (cert.passed and cert.residual < 1e-8)
        worst = max(worst, cert.residual)
    return bad == 0, f"{bad} failed certificates of 50, worst residual {worst:.1e}"


# ------------------------------------------------------------------ 9


def _pldu_inputs(rng):
    mats = []
    for _ in range(180):
        mats.append(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
    for k in range(20):
        u = rng.normal(size=2) + 1j * rng.normal(size=2)
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        if k % 5 == 0:
            v[0] = 0  # vanishing first column
        elif k % 5 == 1:
            u[0] = 0  # zero pivot, row swap needed
        a = np.outer(u, v)
        if k % 5 > 1:
            a = a + 1e-8 * rng.normal(size=(2, 2))
        mats.append(a)
    return mats


def criterion_9():
    rng = np.random.default_rng(9)
    mats = _pldu_inputs(rng)
    singular = sum(abs(np.linalg.det(a)) < 1e-6 for a in mats)
    worst = 0.0
    for a in mats:
        f = ghzw.pldu_decompose(a)
        worst = max(worst, np.max(np.abs(f.product() - a)))
        worst = max(worst, np.max(np.abs(dg.evaluate(ghzw.pldu_diagram(f)).matrix - a)))
    ok = worst < PLDU_TOL and singular >= 20 and len(mats) == 200
    return ok, f"{len(mats)} matrices ({singular} near-singular), worst residual {worst:.1e}"


# ------------------------------------------------------------------ 10

KETS = {
    "w/bell": ["0000", "0110", "0101", "1001", "1010"],
    "product/bell": ["0000", "1101", "1110"],
    "ghz/product": ["0000", "0111", "1010"],
}
EXPECTED = {
    "w/bell": {"w", "bell"},
    "product/bell": {"product", "bell"},
    "ghz/product": {"ghz", "product"},
}


def _leaf_names(label):
    # a bipartite child labelled bisep carries a Bell pair
    return {"bell" if x.leaf == "bisep" else x.leaf for x in label.leaves()}


def _superposition(bits):
    out = ket(bits[0])
    for b in bits[1:]:
        out = out + ket(b)
    return out


def criterion_10():
    labels = {k: slocc.superclass_label(_superposition(v)) for k, v in KETS.items()}
    matched = {k: _leaf_names(labels[k]) == EXPECTED[k] for k in KETS}
    rng = np.random.default_rng(10)
    unstable = 0
    for base in (slocc.ghz_state(4), slocc.w_state(4)):
        ref = slocc.superclass_label(base)
        for _ in range(20):
            maps = [np.eye(2)] + [_invertible(rng) for _ in range(3)]
            unstable += slocc.superclass_label(apply_local(base, maps)) != ref
    ok = all(matched.values()) and unstable == 0
    shown = ", ".join(f"{k}->{labels[k]}" for k in KETS)
    return ok, f"{shown}; {unstable} unstable labels of 40"


# ------------------------------------------------------------------ 11


def _xi_is(w, coeffs):
    return proportionality_residual(w.xi, effect(coeffs)) < 1e-12


def criterion_11():
    ghz, w = slocc.ghz_state(3), slocc.w_state(3)
    mg = slocc.strong_maximal(ghz, candidates=[[1, 1]])
    mw = slocc.strong_maximal(w, candidates=[[1, 0]])
    accepted = (
        mg is not None
        and mw is not None
        and all(_xi_is(x, [1, 1]) for x in mg)
        and all(_xi_is(x, [1, 0]) for x in mw)
        and max(x.snake_residual for x in mg + mw) < 1e-12
    )
    bell_0 = kron(ket("0"), state([1, 0, 0, 1]))
    prod = ket("000")
    rejected = slocc.strong_maximal(bell_0) is None and slocc.strong_maximal(prod) is None
    frob = slocc.is_frobenius_state(ghz) is not None and slocc.is_frobenius_state(w) is not None
    plus = state([1, 1])
    not_frob = all(
        slocc.is_frobenius_state(p) is None
        for p in (prod, kron(kron(plus, plus), plus), bell_0)
    )
    ok = accepted and rejected and frob and not_frob
    return ok, f"witnesses accepted={accepted}, non-maximal rejected={rejected}, frobenius={frob}, products rejected={not_frob}"


CRITERIA = [
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
    criterion_10,
    criterion_11,
]


@pytest.mark.parametrize("n", range(1, len(CRITERIA) + 1))
def test_criterion(n):
    t0 = time.perf_counter()
    try:
        ok, detail = CRITERIA[n - 1]()
    except Exception as exc:
        _report(n, False, f"{type(exc).__name__}: {exc}", t0)
        raise
    _report(n, ok, detail, t0)
    assert ok, detail
    assert time.perf_counter() - t0 < 10.0, "criterion exceeded its time budget"


if __name__ == "__main__":
    failed = 0
    for k, fn in enumerate(CRITERIA, start=1):
        t0 = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as exc:  # report and keep going
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        _report(k, ok, detail, t0)
        failed += not ok
    raise SystemExit(1 if failed else 0)
