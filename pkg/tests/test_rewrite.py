from functools import lru_cache
from itertools import combinations, combinations_with_replacement, permutations

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, strategies as st

from ghzw_calculus import diagram as dg, rewrite
from ghzw_calculus.diagram import parse_dsl
from ghzw_calculus.rewrite import RewriteError, decide_equal, normalize_single
from ghzw_calculus.tensor import max_abs_diff

seeds = st.integers(0, 2**32 - 1)
ARITY = {op: dg.GENERATOR_OPS[op] for op in rewrite._OPS}


def test_catalog_is_sound():
    rules = rewrite.builtin_rules()
    assert len(rules) == 30
    for r in rules:
        assert r.residual() < 1e-12, r.name
        if r.bidirectional:
            assert r.reversed().residual() < 1e-12


def test_antispecial_scalar():
    r = rewrite.rule_by_name("antispecial")
    assert r.scalar == 2
    lhs = dg.evaluate(r.lhs).matrix
    assert np.allclose(2 * lhs, dg.evaluate(r.rhs).matrix)


def test_catalog_json_round_trip():
    back = rewrite.catalog_from_json(rewrite.catalog_to_json())
    assert [r.name for r in back] == [r.name for r in rewrite.builtin_rules()]
    with pytest.raises(RewriteError):
        rewrite.catalog_from_json('[{"name": "x"}]')


def test_rule_arity_mismatch_rejected():
    with pytest.raises(RewriteError):
        rewrite.RewriteRule("bad", parse_dsl("(mult ghz)"), dg.identity(1))


def test_find_and_apply_special():
    d = parse_dsl("(seq (unit ghz) (comult ghz) (mult ghz) (counit ghz))")
    r = rewrite.rule_by_name("special")
    ms = rewrite.find_matches(r, d)
    assert len(ms) == 1
    out = rewrite.apply(r, d, ms[0])
    assert len(out.nodes) == 2
    assert dg.evaluate(out) == dg.evaluate(d)


def test_no_match_across_boundary():
    d = parse_dsl("(par (comult ghz) (mult ghz))")
    assert rewrite.find_matches(rewrite.rule_by_name("special"), d) == []


def test_simplify_removes_unit():
    d = parse_dsl("(seq (par (unit w) id) (mult w) (comult w))")
    out, factor = rewrite.simplify(d)
    assert len(out.nodes) < len(d.nodes)
    assert max_abs_diff(dg.evaluate(d).scale(factor), dg.evaluate(out)) < 1e-12


@pytest.mark.parametrize("alg,kind", [("ghz", "scfa"), ("w", "acfa")])
def test_spider_normal_form(alg, kind):
    d = parse_dsl(f"(seq (par (mult {alg}) id) (mult {alg}) (comult {alg}))")
    nfs, canon, factor = normalize_single(d, kind)
    assert [str(n) for n in nfs] == ["spider(3,2)"]
    assert max_abs_diff(dg.evaluate(d), dg.evaluate(canon).scale(factor)) < 1e-12


def test_w_loops():
    one = parse_dsl("(seq (comult w) (mult w))")
    nfs, canon, factor = normalize_single(one, "acfa")
    assert nfs[0].variant == "acfa_loop_product"
    assert max_abs_diff(dg.evaluate(one), dg.evaluate(canon).scale(factor)) < 1e-12
    two = parse_dsl("(seq (comult w) (mult w) (comult w) (mult w))")
    assert normalize_single(two, "acfa")[0][0].variant == "acfa_zero"
    assert np.allclose(dg.evaluate(two).array, 0)


def test_closed_w_tree_is_zero():
    d = parse_dsl("(seq (unit w) (counit w))")
    assert np.allclose(dg.evaluate(d).value(), 0)
    assert decide_equal(d, parse_dsl("(seq (unit w) (comult w) (mult w) (comult w) (mult w) (counit w))"), "acfa")


def test_decide_equal_examples():
    a = parse_dsl("(seq (par (mult ghz) id) (mult ghz))")
    b = parse_dsl("(seq (par id (mult ghz)) (mult ghz))")
    c = parse_dsl("(seq (par id (mult ghz)) (mult ghz) (comult ghz) (mult ghz))")
    assert decide_equal(a, b, "scfa")
    assert decide_equal(a, c, "scfa")
    assert not decide_equal(a, c, "cfa")  # loop number differs
    with pytest.raises(RewriteError):
        decide_equal(a, parse_dsl("(seq (par id (mult w)) (mult w))"), "scfa")


def test_cfa_descriptor_is_sound_for_both_algebras():
    for alg in ("ghz", "w"):
        ds = rewrite.enumerate_connected(alg, 4)
        for x in ds[:60]:
            for y in ds[:60]:
                if decide_equal(x, y, "cfa"):
                    assert dg.evaluate(x) == dg.evaluate(y)


def test_enumeration_counts():
    counts = [len(rewrite.enumerate_connected("ghz", k)) for k in range(1, 5)]
    assert counts == [4, 14, 52, 225]


def _brute_force(max_nodes):
    """Connected acyclic port-linear graphs, deduplicated by graph isomorphism."""
    found = {k: [] for k in range(1, max_nodes + 1)}
    for k in range(1, max_nodes + 1):
        for ops in combinations_with_replacement(sorted(ARITY), k):
            outs = [(u, i) for u, op in enumerate(ops) for i in range(ARITY[op][1])]
            ins = [(u, j) for u, op in enumerate(ops) for j in range(ARITY[op][0])]
            for size in range(min(len(outs), len(ins)) + 1):
                for src in combinations(outs, size):
                    for dst in permutations(ins, size):
                        g = nx.MultiDiGraph()
                        g.add_nodes_from((u, {"op": op}) for u, op in enumerate(ops))
                        g.add_edges_from((s[0], t[0]) for s, t in zip(src, dst))
                        if not nx.is_directed_acyclic_graph(g) or not nx.is_weakly_connected(g):
                            continue
                        if not any(
                            nx.is_isomorphic(g, h, node_match=lambda a, b: a["op"] == b["op"]) for h in found[k]
                        ):
                            found[k].append(g)
    return [len(found[k]) for k in range(1, max_nodes + 1)]


def test_enumeration_matches_brute_force():
    per_size = _brute_force(3)
    cumulative = list(np.cumsum(per_size))
    assert cumulative == [len(rewrite.enumerate_connected("w", k)) for k in range(1, 4)]


def _code_of(d):
    d = dg.eliminate_swaps(d)
    ids = sorted(d.nodes)
    pos = {nid: k for k, nid in enumerate(ids)}
    ops = [d.nodes[i].op for i in ids]
    wires = [((pos[s[1]], s[2]), (pos[t[1]], t[2])) for s, t in d.wires if s[0] == "node" and t[0] == "node"]
    return rewrite._canonical_code(ops, wires)


@lru_cache(maxsize=1)
def _enumerated_codes():
    return {rewrite._canonical_code(o, w) for o, w in rewrite._enumerate_shapes(6, rewrite._OPS)}


@given(seeds)
def test_random_connected_diagrams_are_enumerated(seed):
    codes = _enumerated_codes()
    d = dg.eliminate_swaps(rewrite.random_diagram(np.random.default_rng(seed), "ghz", 6))
    for comp in dg.split_components(d):
        if comp.diagram.nodes:
            assert _code_of(comp.diagram) in codes


@given(seeds, st.sampled_from(["ghz", "w", "mixed"]))
def test_random_rewrites_preserve_semantics(seed, mode):
    rep = rewrite.soundness_harness(seed=seed, trials=5, mode=mode, max_nodes=8)
    assert rep.passed, rep.failures
    assert rep.max_residual < 1e-9


@given(seeds, st.sampled_from([("ghz", "scfa"), ("w", "acfa")]))
def test_normal_form_value_matches(seed, pair):
    alg, kind = pair
    d = rewrite.random_diagram(np.random.default_rng(seed), alg, 8)
    _, canon, factor = normalize_single(d, kind)
    assert max_abs_diff(dg.evaluate(d), dg.evaluate(canon).scale(factor)) < 1e-9 * max(1, dg.evaluate(d).norm())
