import numpy as np
import pytest
from hypothesis import given, strategies as st

from ghzw_calculus import cfa
from ghzw_calculus.cfa import GHZ, W, CFA, CfaError
from ghzw_calculus.tensor import Tensor, Tolerance, apply_local, compose, effect, ket, max_abs_diff, proportionality_residual

from conftest import random_invertible

LOOSE = Tolerance(1e-8, 1e-8)
seeds = st.integers(0, 2**32 - 1)


def test_canonical_algebras_pass():
    assert cfa.check_cfa(GHZ).passed
    assert cfa.check_cfa(W).passed
    assert cfa.check_special(GHZ) and not cfa.check_antispecial(GHZ)
    assert cfa.check_antispecial(W) and not cfa.check_special(W)


def test_w_derived_values():
    assert np.array_equal(W.mu_delta.matrix, [[0, 2], [0, 0]])
    assert np.array_equal(W.lolli.entries, [2, 0])
    assert np.array_equal(W.cololli.entries, [0, 2])
    assert W.circle == 2 and GHZ.circle == 2


def test_antispecial_loop_factorises():
    outer = np.outer(W.lolli.entries, W.cololli.entries)
    assert np.allclose(W.dim * W.mu_delta.matrix, outer)


def test_basis_cfa_higher_dimension():
    c = cfa.basis_cfa(3)
    assert cfa.check_cfa(c).passed
    assert cfa.check_special(c)
    assert c.circle == 3


def test_broken_algebra_names_failure():
    bad = CFA("bad", GHZ.mult, GHZ.unit, GHZ.comult, effect([1, 0]))
    rep = cfa.check_cfa(bad)
    assert not rep.passed
    assert any("counit" in f for f in rep.failures)


def test_wrong_arity_rejected():
    with pytest.raises(CfaError):
        CFA("x", GHZ.comult, GHZ.unit, GHZ.mult, GHZ.counit)


def test_unknown_algebra():
    with pytest.raises(CfaError):
        cfa.get_algebra("nope")


def test_json_round_trip():
    c = CFA.from_json(W.to_json())
    assert max_abs_diff(c.mult, W.mult) == 0 and c.name == "w"


@pytest.mark.parametrize("m", range(1, 6))
def test_ghz_spider_states(m):
    expected = np.zeros(2**m)
    expected[0] = expected[-1] = 1
    assert np.array_equal(cfa.spider(GHZ, 0, m).entries, expected)


def test_w_spider_has_single_excitations():
    v = cfa.spider(W, 0, 4).entries
    ones = [k for k in range(16) if v[k]]
    assert ones == [1, 2, 4, 8]


def test_spider_identity_and_generators():
    assert max_abs_diff(cfa.spider(W, 1, 1), Tensor(np.eye(2), 1, 1)) == 0
    assert max_abs_diff(cfa.spider(W, 2, 1), W.mult) == 0
    assert max_abs_diff(cfa.spider(GHZ, 1, 2), GHZ.comult) == 0


def test_copiable_points():
    pts = cfa.copiable_points(GHZ)
    assert sorted(tuple(p.entries.real) for p in pts) == [(0, 1), (1, 0)]
    w_pts = cfa.copiable_points(W)
    assert len(w_pts) == 1 and np.allclose(w_pts[0].entries, [1, 0])


def test_state_round_trip_recovers_canonical():
    psi, _, xi = cfa.state_from_cfa(GHZ)
    c = cfa.cfa_from_state(psi, xi)
    for name in ("mult", "unit", "comult", "counit"):
        assert max_abs_diff(getattr(c, name), getattr(GHZ, name)) < 1e-12


def test_cfa_from_asymmetric_state_fails():
    with pytest.raises(CfaError):
        cfa.cfa_from_state(ket("001"), effect([1, 1]))


def test_classify_identity_transport():
    c = cfa.transport(GHZ, np.eye(2))
    assert cfa.classify_cfa(c).kind == "ghz"


def test_extend_to_cfa_recovers_axioms():
    c = cfa.extend_to_cfa(W.mult, W.unit)
    assert cfa.check_cfa(c).passed
    g = cfa.extend_to_cfa(GHZ.mult, GHZ.unit)
    assert cfa.check_cfa(g).passed


def test_partial_trace_of_comult_is_lolli():
    assert max_abs_diff(cfa.cfa_partial_trace(W, W.comult), W.lolli) < 1e-12


@given(seeds, st.sampled_from(["ghz", "w"]))
def test_transport_preserves_axioms_and_class(seed, kind):
    L = random_invertible(np.random.default_rng(seed))
    c = cfa.transport(cfa.get_algebra(kind), L)
    assert cfa.check_cfa(c, LOOSE).passed
    cls = cfa.classify_cfa(c, LOOSE)
    assert cls.kind == kind
    assert cls.residual < 1e-8


@given(seeds)
def test_ghz_normalize_rebuilds_state(seed):
    rng = np.random.default_rng(seed)
    maps = [random_invertible(rng) for _ in range(3)]
    L = maps[0]
    psi = apply_local(cfa.GHZ3, [L, L, L])
    M, lam = cfa.ghz_normalize(psi)
    assert max_abs_diff(apply_local(cfa.GHZ3, [M, M, M]).scale(lam), psi) < 1e-8 * max(1, psi.norm())


@given(seeds)
def test_w_normalize_reaches_w(seed):
    rng = np.random.default_rng(seed)
    L = random_invertible(rng)
    c = cfa.transport(W, L)
    L1, L2, L3 = cfa.w_normalize(c)
    out = apply_local(cfa.spider(c, 0, 3), [L1, L2, L3])
    assert proportionality_residual(out, cfa.W3) < 1e-8


@given(seeds)
def test_induced_algebra_is_frobenius(seed):
    rng = np.random.default_rng(seed)
    L = random_invertible(rng)
    psi = apply_local(cfa.W3, [L, L, L])
    xi = compose(effect([1, 0]), Tensor(np.linalg.inv(L), 1, 1))
    c = cfa.cfa_from_state(psi, xi)
    assert cfa.check_cfa(c, LOOSE).passed
    assert max_abs_diff(cfa.spider(c, 0, 3), psi) < 1e-8 * max(1, psi.norm())
