"""Rewriting of string diagrams and single-algebra normal forms.

A rule ``(lhs, rhs, scalar)`` asserts ``scalar * [[lhs]] = [[rhs]]`` under
the canonical pair, so applying it forward multiplies the value by
``scalar`` and applying it backward divides by it.

Normal forms of connected single-algebra diagrams follow from their
``(n, m, loops)`` descriptor:

* special algebras: every open component is the spider ``S^n_m``;
* anti-special algebras: no loop gives the spider, one loop gives
  ``circle^-(n+m-1) * lolli^m o cololli^n``, more loops give zero;
* closed components are scalars.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import permutations, product as iproduct
from typing import Iterable, Sequence

import numpy as np

from . import diagram as dg
from .tensor import DEFAULT_TOL, Tensor, Tolerance, max_abs_diff, proportionality_residual

__all__ = [
    "RewriteRule",
    "RewriteError",
    "Match",
    "NormalForm",
    "builtin_rules",
    "rule_by_name",
    "find_matches",
    "apply",
    "simplify",
    "normalize_single",
    "component_forms",
    "decide_equal",
    "soundness_harness",
    "HarnessReport",
    "enumerate_connected",
    "random_diagram",
    "spider_diagram",
    "lolli_diagram",
    "cololli_diagram",
    "catalog_to_json",
    "catalog_from_json",
]

KINDS = ("scfa", "acfa", "cfa")


class RewriteError(ValueError):
    pass


# ---------------------------------------------------------------- small diagrams


def _p(text: str) -> dg.Diagram:
    return dg.parse_dsl(text, algebras=None)


@lru_cache(maxsize=None)
def lolli_diagram(alg: str) -> dg.Diagram:
    return _p(f"(seq (cup {alg}) (par (comult {alg}) id) (par id (cap {alg})))")


@lru_cache(maxsize=None)
def cololli_diagram(alg: str) -> dg.Diagram:
    return _p(f"(seq (par id (cup {alg})) (par (mult {alg}) id) (cap {alg}))")


def _comb(op: str, alg: str, k: int) -> dg.Diagram:
    """Left comb of ``k - 1`` multiplications (or comultiplications)."""
    d = dg.identity(1)
    for j in range(1, k):
        if op == "mult":
            d = dg.seq(dg.par(d, dg.identity(1)), dg.generator("mult", alg))
        else:
            d = dg.seq(d, dg.par(dg.generator("comult", alg), dg.identity(j - 1)))
    return d


@lru_cache(maxsize=None)
def spider_diagram(alg: str, n: int, m: int, loops: int = 0) -> dg.Diagram:
    """Comb spider ``S^n_m`` with ``loops`` bubbles on its central wire."""
    parts = [dg.generator("unit", alg) if n == 0 else _comb("mult", alg, n)]
    for _ in range(loops):
        parts.append(dg.generator("comult", alg))
        parts.append(dg.generator("mult", alg))
    parts.append(dg.generator("counit", alg) if m == 0 else _comb("comult", alg, m))
    return dg.seq(*parts)


# ---------------------------------------------------------------- rules


@dataclass(frozen=True, eq=False)
class RewriteRule:
    name: str
    lhs: dg.Diagram
    rhs: dg.Diagram
    scalar: complex = 1.0
    bidirectional: bool = False

    def __post_init__(self):
        if self.lhs.arity != self.rhs.arity:
            raise RewriteError(f"rule {self.name}: sides have different arities")
        if not self.lhs.nodes:
            raise RewriteError(f"rule {self.name}: empty left-hand side")

    def reversed(self) -> "RewriteRule":
        return RewriteRule(self.name + "^-1", self.rhs, self.lhs, 1 / self.scalar, self.bidirectional)

    def residual(self, semantics: dg.Semantics | None = None) -> float:
        a = dg.evaluate(self.lhs, semantics)
        b = dg.evaluate(self.rhs, semantics)
        return max_abs_diff(a.scale(self.scalar), b)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "lhs": json.loads(dg.to_json(self.lhs)),
            "rhs": json.loads(dg.to_json(self.rhs)),
            "scalar": [float(complex(self.scalar).real), float(complex(self.scalar).imag)],
            "bidirectional": self.bidirectional,
        }

    @classmethod
    def from_json(cls, obj) -> "RewriteRule":
        try:
            return cls(
                obj["name"],
                dg.from_json(obj["lhs"]),
                dg.from_json(obj["rhs"]),
                complex(*obj["scalar"]),
                bool(obj.get("bidirectional", False)),
            )
        except (KeyError, TypeError) as exc:
            raise RewriteError(f"malformed rule JSON: {exc}") from exc


def _cfa_rules(a: str) -> list[RewriteRule]:
    R = RewriteRule
    m, c, u, e = (f"({op} {a})" for op in ("mult", "comult", "unit", "counit"))
    return [
        R(f"assoc_{a}", _p(f"(seq (par {m} id) {m})"), _p(f"(seq (par id {m}) {m})"), 1, True),
        R(f"coassoc_{a}", _p(f"(seq {c} (par {c} id))"), _p(f"(seq {c} (par id {c}))"), 1, True),
        R(f"unit_l_{a}", _p(f"(seq (par {u} id) {m})"), dg.identity(1)),
        R(f"unit_r_{a}", _p(f"(seq (par id {u}) {m})"), dg.identity(1)),
        R(f"counit_l_{a}", _p(f"(seq {c} (par {e} id))"), dg.identity(1)),
        R(f"counit_r_{a}", _p(f"(seq {c} (par id {e}))"), dg.identity(1)),
        R(f"frobenius_{a}", _p(f"(seq (par id {c}) (par {m} id))"), _p(f"(seq {m} {c})"), 1, True),
        R(f"frobenius_r_{a}", _p(f"(seq (par {c} id) (par id {m}))"), _p(f"(seq {m} {c})"), 1, True),
        R(f"comm_{a}", _p(f"(seq swap {m})"), _p(m), 1, True),
        R(f"cocomm_{a}", _p(f"(seq {c} swap)"), _p(c), 1, True),
    ]


@lru_cache(maxsize=None)
def _builtin_rules() -> tuple[RewriteRule, ...]:
    R = RewriteRule
    circle = 2.0
    rules = _cfa_rules("ghz") + _cfa_rules("w")
    rules += [
        R("special", _p("(seq (comult ghz) (mult ghz))"), dg.identity(1)),
        R("antispecial", _p("(seq (comult w) (mult w))"), dg.seq(cololli_diagram("w"), lolli_diagram("w")), circle),
        R("tick_invol", _p("(seq tick tick)"), dg.identity(1)),
        R("tick_counit", _p("(seq tick (counit ghz))"), _p("(counit ghz)")),
        R("copy_unit", _p("(seq (unit w) (comult ghz))"), _p("(par (unit w) (unit w))")),
        R(
            "copy_lolli",
            dg.seq(lolli_diagram("w"), dg.generator("comult", "ghz")),
            dg.par(lolli_diagram("w"), lolli_diagram("w")),
            circle,
        ),
        R("tick_unit_copy", _p("(seq (unit w) tick (comult w))"), _p("(par (seq (unit w) tick) (seq (unit w) tick))")),
        R("scalar_one_a", _p("(seq (unit w) tick (counit w))"), dg.empty()),
        R("scalar_one_b", _p("(seq (unit ghz) tick (counit w))"), dg.empty()),
        R("scalar_one_c", _p("(seq (unit ghz) (counit w))"), dg.empty()),
    ]
    for r in rules:
        res = r.residual()
        if res > 1e-12:
            raise RewriteError(f"built-in rule {r.name} fails its semantic check (residual {res:.3g})")
    return tuple(rules)


def builtin_rules() -> list[RewriteRule]:
    """The rule catalog, semantically checked on first use."""
    return list(_builtin_rules())


def rule_by_name(name: str) -> RewriteRule:
    for r in _builtin_rules():
        if r.name == name:
            return r
    raise RewriteError(f"no rule named {name!r}")


def catalog_to_json(rules: Iterable[RewriteRule] | None = None) -> str:
    rules = builtin_rules() if rules is None else list(rules)
    return json.dumps({"version": 1, "rules": [r.to_json() for r in rules]}, sort_keys=True)


def catalog_from_json(text: str) -> list[RewriteRule]:
    obj = json.loads(text)
    if not isinstance(obj, dict) or obj.get("version") != 1:
        raise RewriteError("unsupported catalog version")
    return [RewriteRule.from_json(r) for r in obj.get("rules", [])]


# ---------------------------------------------------------------- matching


@dataclass(frozen=True)
class Match:
    """Embedding of a rule's left-hand side into a host diagram.

    ``inputs[k]`` is the host source feeding lhs input ``k``; ``outputs[k]``
    is the host target fed by lhs output ``k``.
    """

    rule: str
    node_map: tuple[tuple[int, int], ...]
    inputs: tuple
    outputs: tuple

    @property
    def image(self) -> set[int]:
        return {h for _, h in self.node_map}


def _search_order(lhs: dg.Diagram) -> list[int]:
    adj: dict[int, list[int]] = {i: [] for i in lhs.nodes}
    for s, t in lhs.wires:
        if s[0] == "node" and t[0] == "node":
            adj[s[1]].append(t[1])
            adj[t[1]].append(s[1])
    order: list[int] = []
    for start in sorted(lhs.nodes):
        if start in order:
            continue
        queue = [start]
        while queue:
            v = queue.pop(0)
            if v in order:
                continue
            order.append(v)
            queue.extend(sorted(adj[v]))
    return order


def find_matches(rule: RewriteRule, d: dg.Diagram) -> list[Match]:
    """All embeddings of ``rule.lhs`` whose replacement leaves a valid diagram."""
    lhs = rule.lhs
    if any(s[0] == "in" and t[0] == "out" for s, t in lhs.wires):
        raise RewriteError(f"rule {rule.name}: left-hand side has a bare wire")
    order = _search_order(lhs)
    by_key: dict = {}
    for h, n in d.nodes.items():
        by_key.setdefault(n.key(), []).append(h)
    internal = [(s, t) for s, t in lhs.wires if s[0] == "node" and t[0] == "node"]
    found: list[Match] = []

    def consistent(m: dict) -> bool:
        for s, t in internal:
            if s[1] in m and t[1] in m:
                if d.target_of(("node", m[s[1]], s[2])) != ("node", m[t[1]], t[2]):
                    return False
        return True

    def forced(v: int, m: dict):
        for s, t in internal:
            if t[1] == v and s[1] in m:
                tgt = d.target_of(("node", m[s[1]], s[2]))
                return [tgt[1]] if tgt[0] == "node" and tgt[2] == t[2] else []
            if s[1] == v and t[1] in m:
                src = d.source_of(("node", m[t[1]], t[2]))
                return [src[1]] if src[0] == "node" and src[2] == s[2] else []
        return None

    def rec(k: int, m: dict):
        if k == len(order):
            mt = _finish(rule, d, m)
            if mt is not None:
                found.append(mt)
            return
        v = order[k]
        cands = forced(v, m)
        if cands is None:
            cands = by_key.get(lhs.nodes[v].key(), [])
        used = set(m.values())
        for h in cands:
            if h in used or d.nodes[h].key() != lhs.nodes[v].key():
                continue
            m[v] = h
            if consistent(m):
                rec(k + 1, m)
            del m[v]

    rec(0, {})
    return found


def _finish(rule: RewriteRule, d: dg.Diagram, m: dict) -> Match | None:
    lhs = rule.lhs
    image = set(m.values())
    inputs = [None] * lhs.n_inputs
    outputs = [None] * lhs.n_outputs
    for s, t in lhs.wires:
        if s[0] == "in":
            src = d.source_of(("node", m[t[1]], t[2]))
            if src[0] == "node" and src[1] in image:
                return None
            inputs[s[1]] = src
        elif t[0] == "out":
            tgt = d.target_of(("node", m[s[1]], s[2]))
            if tgt[0] == "node" and tgt[1] in image:
                return None
            outputs[t[1]] = tgt
    mt = Match(rule.name, tuple(sorted(m.items())), tuple(inputs), tuple(outputs))
    try:
        apply(rule, d, mt)
    except dg.DiagramError:
        return None  # the replacement would close a directed cycle
    return mt


def apply(rule: RewriteRule, d: dg.Diagram, match: Match) -> dg.Diagram:
    """Replace the matched copy of ``rule.lhs`` by ``rule.rhs``."""
    if match.rule != rule.name:
        raise RewriteError("match belongs to a different rule")
    nm = dict(match.node_map)
    for v, h in nm.items():
        if h not in d.nodes or d.nodes[h].key() != rule.lhs.nodes[v].key():
            raise RewriteError("stale match: host node changed")
    image = set(nm.values())
    for s, t in rule.lhs.wires:
        if s[0] == "node" and t[0] == "node":
            if d.target_of(("node", nm[s[1]], s[2])) != ("node", nm[t[1]], t[2]):
                raise RewriteError("stale match: wiring changed")
        elif s[0] == "in":
            if d.source_of(("node", nm[t[1]], t[2])) != match.inputs[s[1]]:
                raise RewriteError("stale match: input changed")
        elif t[0] == "out":
            if d.target_of(("node", nm[s[1]], s[2])) != match.outputs[t[1]]:
                raise RewriteError("stale match: output changed")

    def touches(ep):
        return ep[0] == "node" and ep[1] in image

    nodes = {i: n for i, n in d.nodes.items() if i not in image}
    wires = [(s, t) for s, t in d.wires if not touches(s) and not touches(t)]
    base = max(d.nodes, default=-1) + 1
    rhs = rule.rhs
    new_id = {v: base + k for k, v in enumerate(sorted(rhs.nodes))}
    for v, n in rhs.nodes.items():
        nodes[new_id[v]] = n

    def src_ep(e):
        return match.inputs[e[1]] if e[0] == "in" else ("node", new_id[e[1]], e[2])

    def dst_ep(e):
        return match.outputs[e[1]] if e[0] == "out" else ("node", new_id[e[1]], e[2])

    wires += [(src_ep(s), dst_ep(t)) for s, t in rhs.wires]
    return dg.Diagram(nodes, tuple(wires), d.n_inputs, d.n_outputs)


def simplify(
    d: dg.Diagram, rules: Sequence[RewriteRule] | None = None, max_steps: int = 200
) -> tuple[dg.Diagram, complex]:
    """Greedy rewriting with node-count-decreasing rules.

    Returns the final diagram and the accumulated factor ``f`` with
    ``f * [[d]] = [[result]]``. Stops at a fixpoint or after ``max_steps``.
    """
    rules = builtin_rules() if rules is None else list(rules)
    shrinking = [r for r in rules if len(r.rhs.nodes) < len(r.lhs.nodes)]
    shrinking.sort(key=lambda r: len(r.rhs.nodes) - len(r.lhs.nodes))
    factor = 1.0 + 0j
    for _ in range(max_steps):
        for r in shrinking:
            ms = find_matches(r, d)
            if ms:
                d = apply(r, d, ms[0])
                factor *= r.scalar
                break
        else:
            break
    return d, factor


# ---------------------------------------------------------------- normal forms


@dataclass(frozen=True)
class NormalForm:
    """Normal form of one connected component.

    ``variant`` is ``spider``, ``acfa_loop_product``, ``acfa_zero``,
    ``scalar`` or ``descriptor`` (the plain ``(n, m, loops)`` form for
    algebras with no further assumption). ``inverse_dim_power`` is the power
    of ``1/circle`` in a loop product; ``value`` is the number a closed
    component evaluates to.
    """

    variant: str
    n: int
    m: int
    loops: int
    algebra: str
    inverse_dim_power: int = 0
    value: complex | None = None

    def key(self):
        if self.variant == "scalar":
            v = complex(self.value)
            return (self.variant, round(v.real, 9), round(v.imag, 9))
        if self.variant == "acfa_zero":
            return (self.variant, self.n, self.m)
        if self.variant == "descriptor":
            return (self.variant, self.n, self.m, self.loops)
        return (self.variant, self.n, self.m, self.inverse_dim_power)

    def __str__(self):
        if self.variant == "spider":
            return f"spider({self.n},{self.m})"
        if self.variant == "acfa_loop_product":
            return f"circle^-{self.inverse_dim_power} lolli^{self.m} cololli^{self.n}"
        if self.variant == "scalar":
            return f"scalar({complex(self.value):.12g})"
        if self.variant == "descriptor":
            return f"cfa({self.n},{self.m},{self.loops})"
        return f"zero({self.n},{self.m})"


def _single_algebra(d: dg.Diagram) -> str:
    bad = [n for n in d.nodes.values() if n.kind not in ("generator", "swap")]
    if bad:
        raise RewriteError("single-algebra normalisation excludes ticks and variables")
    algs = d.algebras()
    if len(algs) > 1:
        raise RewriteError(f"mixed-algebra diagram: {sorted(algs)}")
    return next(iter(algs), "")


def _component_nf(comp: dg.Component, alg: str, kind: str, sem: dg.Semantics) -> NormalForm:
    n, m, loops = len(comp.inputs), len(comp.outputs), comp.loops
    closed = n == 0 and m == 0
    if kind == "cfa":
        return NormalForm("descriptor", n, m, loops, alg)
    c = sem.algebra(alg) if alg else None
    if kind == "scfa":
        if closed:
            return NormalForm("scalar", 0, 0, loops, alg, value=complex(c.counit.entries @ c.unit.entries))
        return NormalForm("spider", n, m, loops, alg)
    if loops >= 2:
        return NormalForm("acfa_zero", n, m, loops, alg)
    if closed:
        v = complex(c.counit.entries @ c.unit.entries) if loops == 0 else complex(c.circle)
        return NormalForm("scalar", 0, 0, loops, alg, value=v)
    if loops == 0:
        return NormalForm("spider", n, m, 0, alg)
    return NormalForm("acfa_loop_product", n, m, 1, alg, inverse_dim_power=n + m - 1)


@lru_cache(maxsize=None)
def _nf_diagram(nf: NormalForm) -> dg.Diagram:
    """Representative diagram; its value times the form's factor is the
    component's value."""
    a = nf.algebra
    if nf.variant == "spider":
        return spider_diagram(a, nf.n, nf.m)
    if nf.variant == "descriptor":
        return spider_diagram(a, nf.n, nf.m, nf.loops)
    if nf.variant == "scalar":
        return dg.empty()
    ins = [cololli_diagram(a)] * nf.n
    outs = [lolli_diagram(a)] * nf.m
    if nf.variant == "acfa_loop_product":
        return dg.par(*(ins + outs)) if ins or outs else dg.empty()
    # zero: detached lollis beside a vanishing closed tree
    zero = dg.seq(dg.generator("unit", a), dg.generator("counit", a))
    return dg.par(*(ins + outs + [zero]))


def _place(parts: list[tuple[dg.Diagram, tuple, tuple]], n: int, m: int) -> dg.Diagram:
    """Juxtapose parts and route their boundaries to the given slots."""
    nodes: dict = {}
    wires = []
    base = 0
    for d, ins, outs in parts:
        d2 = d.relabel(base)
        base += len(d2.nodes)
        nodes.update(d2.nodes)
        for s, t in d2.wires:
            s = ("in", ins[s[1]]) if s[0] == "in" else s
            t = ("out", outs[t[1]]) if t[0] == "out" else t
            wires.append((s, t))
    return dg.Diagram(nodes, tuple(wires), n, m)


def component_forms(
    d: dg.Diagram, kind: str, semantics: dg.Semantics | None = None
) -> tuple[list[dg.Component], list[NormalForm]]:
    """Connected components of ``d`` and their normal forms."""
    if kind not in KINDS:
        raise RewriteError(f"kind must be one of {KINDS}")
    alg = _single_algebra(d)
    sem = semantics or dg.DEFAULT_SEMANTICS
    comps = dg.split_components(d)
    return comps, [_component_nf(c, alg, kind, sem) for c in comps]


def _factor(nf: NormalForm, sem: dg.Semantics) -> complex:
    if nf.variant == "scalar":
        return complex(nf.value)
    if nf.variant == "acfa_loop_product":
        return complex(sem.algebra(nf.algebra).circle) ** (-nf.inverse_dim_power)
    return 1.0 + 0j


def normalize_single(
    d: dg.Diagram, kind: str, semantics: dg.Semantics | None = None
) -> tuple[list[NormalForm], dg.Diagram, complex]:
    """Normal form of every component, the canonical diagram, and the factor
    ``f`` with ``[[d]] = f * [[canonical]]``."""
    sem = semantics or dg.DEFAULT_SEMANTICS
    comps, nfs = component_forms(d, kind, sem)
    parts = []
    factor = 1.0 + 0j
    for comp, nf in zip(comps, nfs):
        factor *= _factor(nf, sem)
        parts.append((_nf_diagram(nf), comp.inputs, comp.outputs))
    return nfs, _place(parts, d.n_inputs, d.n_outputs), factor


def _semantic_key(d: dg.Diagram, kind: str, sem: dg.Semantics):
    """(is_zero, scalar factor, open atoms) for special/anti-special kinds."""
    comps, nfs = component_forms(d, kind, sem)
    atoms = []
    factor = 1.0 + 0j
    for comp, nf in zip(comps, nfs):
        if nf.variant == "acfa_zero" or (nf.variant == "scalar" and abs(nf.value) == 0):
            return True, 0j, ()
        factor *= _factor(nf, sem)
        if nf.variant == "spider":
            atoms.append(("spider", comp.inputs, comp.outputs))
        elif nf.variant == "acfa_loop_product":
            atoms += [("cololli", (k,), ()) for k in comp.inputs]
            atoms += [("lolli", (), (k,)) for k in comp.outputs]
    return False, factor, tuple(sorted(atoms))


def decide_equal(
    d1: dg.Diagram,
    d2: dg.Diagram,
    kind: str,
    semantics: dg.Semantics | None = None,
    tol: Tolerance = DEFAULT_TOL,
) -> bool:
    """Equality of two single-algebra diagrams from their normal forms.

    For ``scfa`` and ``acfa`` the answer is exact for the algebra class. For
    ``cfa`` only the descriptors are compared, which is sound (equal
    descriptors give equal maps) but may call some equal maps different.
    """
    if d1.arity != d2.arity:
        return False
    a1, a2 = _single_algebra(d1), _single_algebra(d2)
    if a1 and a2 and a1 != a2:
        raise RewriteError("diagrams use different algebras")
    sem = semantics or dg.DEFAULT_SEMANTICS
    if kind == "cfa":
        def desc(d):
            out = []
            for comp in dg.split_components(d):
                out.append((comp.inputs, comp.outputs, comp.loops))
            return sorted(out)

        return desc(d1) == desc(d2)
    if kind not in KINDS:
        raise RewriteError(f"kind must be one of {KINDS}")
    z1, f1, k1 = _semantic_key(d1, kind, sem)
    z2, f2, k2 = _semantic_key(d2, kind, sem)
    if z1 or z2:
        return z1 and z2
    return k1 == k2 and abs(f1 - f2) <= tol.bound(max(abs(f1), abs(f2)))


# ---------------------------------------------------------------- enumeration

_OPS = ("mult", "comult", "unit", "counit")
_OP_RANK = {op: k for k, op in enumerate(sorted(dg.GENERATOR_OPS))}


def _reachable(adj: dict[int, set[int]], a: int, b: int) -> bool:
    seen, stack = set(), [a]
    while stack:
        v = stack.pop()
        if v == b:
            return True
        if v in seen:
            continue
        seen.add(v)
        stack.extend(adj.get(v, ()))
    return False


def _canonical_code(ops: list[str], wires: list) -> tuple:
    """Canonical form of a directed multigraph with typed nodes.

    Port order is ignored, which is sound because every generator is
    commutative or cocommutative. Colour refinement orders the nodes; ties
    left after refinement are broken by trying every order within each
    colour class and keeping the smallest edge list.
    """
    n = len(ops)
    succ = [[] for _ in range(n)]
    pred = [[] for _ in range(n)]
    for (u, _), (v, _) in wires:
        succ[u].append(v)
        pred[v].append(u)
    colour = [_OP_RANK[op] for op in ops]
    n_colours = len(set(colour))
    for _ in range(n):
        sig = [
            (colour[u], tuple(sorted([colour[v] for v in succ[u]])), tuple(sorted([colour[v] for v in pred[u]])))
            for u in range(n)
        ]
        uniq = sorted(set(sig))
        ranks = {x: k for k, x in enumerate(uniq)}
        colour = [ranks[x] for x in sig]
        if len(uniq) == n_colours:
            break
        n_colours = len(uniq)
    classes: dict = {}
    for u in range(n):
        classes.setdefault(colour[u], []).append(u)
    keys = sorted(classes)
    best = None
    for perm_parts in iproduct(*(permutations(classes[k]) for k in keys)):
        order = [u for part in perm_parts for u in part]
        pos = {u: i for i, u in enumerate(order)}
        edges = tuple(sorted((pos[u], pos[v]) for (u, _), (v, _) in wires))
        code = (tuple(ops[u] for u in order), edges)
        if best is None or code < best:
            best = code
    return best


def _to_diagram(ops: list[str], wires: list, alg: str) -> dg.Diagram:
    nodes = {i: dg.Node("generator", algebra=alg, op=op) for i, op in enumerate(ops)}
    used_out = {w[0] for w in wires}
    used_in = {w[1] for w in wires}
    ws = [(("node", u, i), ("node", v, j)) for (u, i), (v, j) in wires]
    n_in = n_out = 0
    for u, op in enumerate(ops):
        nin, nout = dg.GENERATOR_OPS[op]
        for j in range(nin):
            if (u, j) not in used_in:
                ws.append((("in", n_in), ("node", u, j)))
                n_in += 1
        for i in range(nout):
            if (u, i) not in used_out:
                ws.append((("node", u, i), ("out", n_out)))
                n_out += 1
    return dg.Diagram(nodes, tuple(ws), n_in, n_out)


def enumerate_connected(alg: str, max_nodes: int, ops: Sequence[str] = _OPS) -> list[dg.Diagram]:
    """Every connected diagram over ``ops`` of one algebra with at most
    ``max_nodes`` nodes, up to isomorphism ignoring port and boundary order.

    Each connected diagram with ``k + 1`` nodes arises from one with ``k``
    nodes by attaching a node whose removal keeps it connected, so growing
    one node at a time reaches all of them.
    """
    return [_to_diagram(o, w, alg) for o, w in _enumerate_shapes(max_nodes, tuple(ops))]


@lru_cache(maxsize=8)
def _enumerate_shapes(max_nodes: int, ops: tuple[str, ...]) -> tuple:
    level = {}
    for op in ops:
        level.setdefault(_canonical_code([op], []), ([op], []))
    result = list(level.values())
    for _size in range(1, max_nodes):
        nxt = {}
        for ops_, wires in level.values():
            used_out = {w[0] for w in wires}
            used_in = {w[1] for w in wires}
            free_out = [(u, i) for u, op in enumerate(ops_) for i in range(dg.GENERATOR_OPS[op][1]) if (u, i) not in used_out]
            free_in = [(u, j) for u, op in enumerate(ops_) for j in range(dg.GENERATOR_OPS[op][0]) if (u, j) not in used_in]
            adj: dict[int, set[int]] = {}
            for (u, _), (v, _) in wires:
                adj.setdefault(u, set()).add(v)
            new = len(ops_)
            for op in ops:
                nin, nout = dg.GENERATOR_OPS[op]
                in_choices = [None] + free_out
                out_choices = [None] + free_in
                for ins in iproduct(in_choices, repeat=nin):
                    picked = [x for x in ins if x is not None]
                    if len(set(picked)) != len(picked):
                        continue
                    for outs in iproduct(out_choices, repeat=nout):
                        picked_o = [x for x in outs if x is not None]
                        if len(set(picked_o)) != len(picked_o) or not (picked or picked_o):
                            continue
                        # new node sits after the sources and before the targets
                        if any(_reachable(adj, t[0], s[0]) for t in picked_o for s in picked):
                            continue
                        w2 = list(wires)
                        w2 += [(s, (new, j)) for j, s in enumerate(ins) if s is not None]
                        w2 += [((new, i), t) for i, t in enumerate(outs) if t is not None]
                        o2 = ops_ + [op]
                        code = _canonical_code(o2, w2)
                        if code not in nxt:
                            nxt[code] = (o2, w2)
        level = nxt
        result += list(level.values())
    return tuple(result)


# ---------------------------------------------------------------- random diagrams and harness


def _atoms(mode: str) -> list[dg.Diagram]:
    algs = {"ghz": ["ghz"], "w": ["w"], "mixed": ["ghz", "w"]}[mode]
    atoms = []
    for a in algs:
        atoms += [dg.generator(op, a) for op in ("mult", "comult", "unit", "counit")]
        atoms += [dg.identity(1)]
    if mode == "mixed":
        atoms += [dg.tick(), dg.swap()]
    else:
        atoms += [dg.swap()]
    for r in builtin_rules():
        if _rule_fits(r, algs, mode):
            atoms.append(r.lhs)
    return atoms


def _rule_fits(r: RewriteRule, algs: list[str], mode: str) -> bool:
    nodes = list(r.lhs.nodes.values()) + list(r.rhs.nodes.values())
    if mode != "mixed" and any(n.kind == "tick" for n in nodes):
        return False
    return all(n.algebra in algs for n in nodes if n.kind == "generator")


def random_diagram(rng: np.random.Generator, mode: str = "mixed", max_nodes: int = 10) -> dg.Diagram:
    """Random layered diagram mixing generators and rule left-hand sides."""
    atoms = _atoms(mode)
    d = atoms[rng.integers(len(atoms))]
    while len(d.nodes) < max_nodes:
        fits = [a for a in atoms if a.n_inputs <= d.n_outputs and len(d.nodes) + len(a.nodes) <= max_nodes]
        side = [a for a in atoms if len(d.nodes) + len(a.nodes) <= max_nodes]
        if not side:
            break
        if fits and rng.random() < 0.8:
            a = fits[rng.integers(len(fits))]
            k = int(rng.integers(d.n_outputs - a.n_inputs + 1))
            layer = dg.par(dg.identity(k), a, dg.identity(d.n_outputs - a.n_inputs - k))
            d = dg.compose_seq(d, layer)
        else:
            a = side[rng.integers(len(side))]
            d = dg.compose_par(d, a) if rng.random() < 0.5 else dg.compose_par(a, d)
        if d.n_inputs + d.n_outputs > 8:
            break
    return d


@dataclass
class HarnessReport:
    trials: int
    applied: int
    max_residual: float
    by_rule: dict[str, int] = field(default_factory=dict)
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def soundness_harness(
    seed: int = 0,
    trials: int = 500,
    mode: str = "mixed",
    max_nodes: int = 10,
    tol: Tolerance = DEFAULT_TOL,
    semantics: dg.Semantics | None = None,
) -> HarnessReport:
    """Apply random applicable rules to random diagrams and compare values."""
    rng = np.random.default_rng(seed)
    algs = {"ghz": ["ghz"], "w": ["w"], "mixed": ["ghz", "w"]}[mode]
    rules = [r for r in builtin_rules() if _rule_fits(r, algs, mode)]
    rules += [r.reversed() for r in rules if r.bidirectional]
    report = HarnessReport(trials, 0, 0.0)
    done = 0
    attempts = 0
    while done < trials and attempts < 50 * trials:
        attempts += 1
        d = random_diagram(rng, mode, max_nodes)
        options = [(r, ms) for r in rules if (ms := find_matches(r, d))]
        if not options:
            continue
        r, ms = options[rng.integers(len(options))]
        mt = ms[rng.integers(len(ms))]
        after = apply(r, d, mt)
        before_t = dg.evaluate(d, semantics).scale(r.scalar)
        after_t = dg.evaluate(after, semantics)
        res = max_abs_diff(before_t, after_t)
        scale = max(1.0, before_t.norm())
        report.max_residual = max(report.max_residual, res / scale)
        report.by_rule[r.name] = report.by_rule.get(r.name, 0) + 1
        if not tol.accepts(res, scale):
            report.failures.append(f"{r.name}: residual {res:.3g}")
        done += 1
    report.applied = done
    if done < trials:
        report.failures.append(f"only {done} of {trials} trials found a match")
    return report
