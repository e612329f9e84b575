import numpy as np
import pytest
from hypothesis import given, strategies as st

from ghzw_calculus import slocc
from ghzw_calculus.slocc import SloccLabel
from ghzw_calculus.tensor import apply_local, effect, ket, kron, proportionality_residual, state

from conftest import random_invertible

seeds = st.integers(0, 2**32 - 1)
GHZ3, W3 = slocc.ghz_state(3), slocc.w_state(3)
BELL = state([1, 0, 0, 1])


def brute_hyperdet(t):
    # Cayley's form via 2x2 determinants of the slices
    a = t.array
    d = lambda m: m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    A, B = a[0], a[1]
    # det(A + x B) = d(A) + x (cross) + x^2 d(B); hyperdet is its discriminant
    cross = d(A + B) - d(A) - d(B)
    return cross**2 - 4 * d(A) * d(B)


def test_standard_states():
    assert np.array_equal(GHZ3.entries, [1, 0, 0, 0, 0, 0, 0, 1])
    assert np.array_equal(W3.entries, [0, 1, 1, 0, 1, 0, 0, 0])
    assert slocc.w_state(4).entries.sum() == 4


def test_hyperdeterminant_values():
    assert slocc.hyperdeterminant(GHZ3) == pytest.approx(1)
    assert slocc.hyperdeterminant(W3) == 0


@given(seeds)
def test_hyperdeterminant_matches_discriminant(seed):
    rng = np.random.default_rng(seed)
    t = state(rng.normal(size=8) + 1j * rng.normal(size=8))
    assert abs(slocc.hyperdeterminant(t) - brute_hyperdet(t)) < 1e-9


@pytest.mark.parametrize(
    "t,label",
    [
        (GHZ3, "ghz"),
        (W3, "w"),
        (ket("000"), "product"),
        (kron(ket("0"), BELL), "bisep(1)"),
        (kron(BELL, ket("1")), "bisep(3)"),
        (state(np.zeros(8)), "zero"),
    ],
)
def test_tripartite_classes(t, label):
    assert str(slocc.tripartite_classify(t)) == label


@given(seeds)
def test_classification_is_slocc_invariant(seed):
    rng = np.random.default_rng(seed)
    maps = [random_invertible(rng) for _ in range(3)]
    for base, name in ((GHZ3, "ghz"), (W3, "w"), (kron(ket("0"), BELL), "bisep")):
        assert slocc.tripartite_classify(apply_local(base, maps)).leaf == name


def test_state_json_round_trip():
    t = state([1, 2j, 0, 1])
    assert slocc.state_from_json(slocc.state_to_json(t)) == t


def test_label_pairs_are_unordered():
    a, b = SloccLabel.make_leaf("w"), SloccLabel.make_leaf("product")
    assert SloccLabel.node(a, b) == SloccLabel.node(b, a)
    assert str(SloccLabel.node(a, b)) == "{product, w}"
    with pytest.raises(slocc.SloccError):
        SloccLabel.make_leaf("cluster")


def test_bipartite_maximal():
    assert slocc.bipartite_maximal(BELL) is not None
    assert slocc.bipartite_maximal(ket("00")) is None


def test_strong_maximal_witnesses():
    mg = slocc.strong_maximal(GHZ3, candidates=[[1, 1]])
    assert mg is not None and len(mg) == 3
    assert all(proportionality_residual(w.xi, effect([1, 1])) < 1e-12 for w in mg)
    mw = slocc.strong_maximal(W3, candidates=[[1, 0]])
    assert all(proportionality_residual(w.xi, effect([1, 0])) < 1e-12 for w in mw)
    assert max(w.snake_residual for w in mg + mw) < 1e-12


@pytest.mark.parametrize("t", [ket("000"), kron(ket("0"), BELL), kron(BELL, ket("1"))])
def test_strong_maximal_fails_without_tripartite_entanglement(t):
    assert slocc.strong_maximal(t) is None


def test_strong_symmetric():
    assert slocc.is_symmetric(W3)
    assert not slocc.is_symmetric(ket("001"))
    phi = slocc.strong_symmetric(GHZ3)
    assert phi is not None
    assert slocc.is_symmetric(slocc.glue(GHZ3, GHZ3, phi))


def test_frobenius_states():
    for t in (GHZ3, W3):
        found = slocc.is_frobenius_state(t)
        assert found is not None
    plus = state([1, 1])
    assert slocc.is_frobenius_state(ket("000")) is None
    assert slocc.is_frobenius_state(kron(kron(plus, plus), plus)) is None


@given(seeds)
def test_uniform_L_solve(seed):
    rng = np.random.default_rng(seed)
    L = random_invertible(rng)
    for base in (GHZ3, W3):
        psi = apply_local(base, [L, L, L])
        M = slocc.uniform_L_solve(psi, base)
        assert M is not None
        assert proportionality_residual(psi, apply_local(base, [M] * 3)) < 1e-8


def test_local_equivalence_rejects_other_class():
    assert slocc.local_equivalence(GHZ3, W3, restarts=2) is None


def test_superclass_of_standard_states():
    assert str(slocc.superclass_label(slocc.ghz_state(4))) == "{product, product}"
    assert str(slocc.superclass_label(slocc.w_state(4))) == "{product, w}"


@given(seeds)
def test_superclass_stable_under_local_changes(seed):
    rng = np.random.default_rng(seed)
    maps = [np.eye(2)] + [random_invertible(rng) for _ in range(3)]
    for base in (slocc.ghz_state(4), slocc.w_state(4)):
        assert slocc.superclass_label(apply_local(base, maps)) == slocc.superclass_label(base)
