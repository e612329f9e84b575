import numpy as np
import pytest
from hypothesis import given, strategies as st

from ghzw_calculus import cfa, diagram as dg, ghzw
from ghzw_calculus.ghzw import CANONICAL_PAIR, NOT, GhzwPair, PairError
from ghzw_calculus.tensor import Tensor, Tolerance, max_abs_diff, proportionality_residual, state

from conftest import random_invertible

seeds = st.integers(0, 2**32 - 1)
LOOSE = Tolerance(1e-8, 1e-8)


def test_make_tick_is_not():
    assert np.array_equal(ghzw.make_tick(cfa.GHZ, cfa.W).matrix, NOT.matrix)


def test_canonical_pair_checks():
    rep = ghzw.pair_check(CANONICAL_PAIR)
    assert rep.passed, rep.failures
    assert set(rep.residuals) == set(ghzw.PAIR_CHECKS)
    assert all(abs(v - 1) < 1e-12 for v in rep.scalars.values())


def test_identity_tick_fails_only_tick_checks():
    rep = ghzw.pair_check(GhzwPair(cfa.GHZ, cfa.W, Tensor(np.eye(2), 1, 1)))
    assert sorted(rep.failures) == ["e", "f"]


def test_both_partners_form_pairs():
    assert ghzw.pair_check(GhzwPair(cfa.GHZ, cfa.transport(cfa.W, NOT.matrix), NOT)).passed


def test_unrelated_acfa_fails():
    skew = cfa.transport(cfa.W, np.array([[1, 1], [0, 1]]))
    assert not ghzw.pair_check(GhzwPair(cfa.GHZ, skew, NOT)).passed


def test_pair_json_round_trip():
    back = GhzwPair.from_json(CANONICAL_PAIR.to_json())
    assert ghzw.pair_check(back).passed


@given(seeds)
def test_transported_pair_still_passes(seed):
    L = random_invertible(np.random.default_rng(seed), cond_max=20)
    rep = ghzw.pair_check(CANONICAL_PAIR.transported(L), LOOSE)
    assert rep.passed, rep.residuals


def test_partners_of_canonical_scfa():
    first, second = ghzw.partner_from_scfa(cfa.GHZ)
    assert max_abs_diff(first.mult, cfa.W.mult) < 1e-12
    conj = cfa.transport(cfa.W, NOT.matrix)
    assert max_abs_diff(second.comult, conj.comult) < 1e-12


@given(seeds)
def test_partner_round_trip(seed):
    L = random_invertible(np.random.default_rng(seed), cond_max=50)
    g = cfa.transport(cfa.GHZ, L)
    for partner in ghzw.partner_from_scfa(g, LOOSE):
        assert cfa.check_antispecial(partner, LOOSE)
        back = ghzw.partner_from_acfa(partner, LOOSE)
        for name in ("mult", "comult", "unit", "counit"):
            assert proportionality_residual(getattr(back, name), getattr(g, name)) < 1e-7


def test_partner_rejects_wrong_class():
    with pytest.raises(PairError):
        ghzw.partner_from_scfa(cfa.W)
    with pytest.raises(PairError):
        ghzw.partner_from_acfa(cfa.GHZ)


def test_dot_transpose_of_not_is_not():
    assert max_abs_diff(ghzw.dot_transpose(cfa.GHZ, NOT), NOT) < 1e-12


def test_qmux_diagram_arity():
    for n in (1, 2, 3):
        d = ghzw.qmux_diagram(n)
        assert (d.n_inputs, d.n_outputs) == (2 * n, n + 1)


@given(seeds, st.integers(1, 3))
def test_qmux_certificate(seed, n):
    rng = np.random.default_rng(seed)
    psi = state(rng.normal(size=2**n) + 1j * rng.normal(size=2**n))
    phi = state(rng.normal(size=2**n) + 1j * rng.normal(size=2**n))
    cert = ghzw.qmux_check(psi, phi, seed=seed)
    assert cert.passed and cert.residual < 1e-8


def test_qmux_rejects_vanishing_overlap():
    with pytest.raises(PairError):
        ghzw.qmux_check(state([1, 0]), state([1, 1]))


@pytest.mark.parametrize(
    "a",
    [
        [[1, 2], [3, 4]],
        [[0, 1], [1, 0]],
        [[0, 2], [0, 5]],
        [[0, 0], [0, 0]],
        [[1, 1], [1, 1]],
        [[0, 0], [3, 0]],
    ],
)
def test_pldu_edge_cases(a):
    a = np.array(a, dtype=complex)
    f = ghzw.pldu_decompose(a)
    assert np.allclose(f.product(), a, atol=1e-12)
    assert np.allclose(dg.evaluate(ghzw.pldu_diagram(f)).matrix, a, atol=1e-12)
    assert np.allclose(np.tril(f.u, -1), 0) and np.allclose(np.diag(f.l), 1)


@given(seeds)
def test_pldu_reconstructs(seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    f = ghzw.pldu_decompose(a)
    assert np.max(np.abs(f.product() - a)) < 1e-9
    assert np.max(np.abs(dg.evaluate(ghzw.pldu_diagram(f)).matrix - a)) < 1e-9


def test_pldu_shape_checked():
    with pytest.raises(PairError):
        ghzw.pldu_decompose(np.eye(3))


def test_synthesize_binds_and_evaluates():
    t = ghzw.synthesize("(seq (par (state a) id) (mult w))", {"a": [0, 1]})
    assert np.allclose(t.matrix, np.eye(2))
