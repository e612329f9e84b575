"""String diagrams as open port graphs.

A diagram has numbered nodes, ordered boundary input and output slots, and
wires. A wire runs from a *source* (a node output port or a boundary input
slot) to a *target* (a node input port or a boundary output slot):

    ("node", id, port)   node port (output port as a source, input as a target)
    ("in", k)            boundary input slot k
    ("out", k)           boundary output slot k

Every port and slot is used by exactly one wire and the node graph is acyclic;
feedback is expressed with explicit cap and cup nodes.

For connectivity and loop counting, boundary slots and nodes (ticks included)
are vertices and wires are edges, except that a swap node is expanded into
its two crossing strands.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .tensor import Tensor, TensorError, swap as swap_tensor

__all__ = [
    "Node",
    "Diagram",
    "DiagramError",
    "DslSyntaxError",
    "Semantics",
    "CanonicalDescriptor",
    "GENERATOR_OPS",
    "generator",
    "tick",
    "swap",
    "identity",
    "variable_state",
    "variable_effect",
    "empty",
    "compose_seq",
    "compose_par",
    "seq",
    "par",
    "parse_dsl",
    "evaluate",
    "bind",
    "loop_count",
    "components",
    "is_connected",
    "iso_check",
    "descriptor",
    "eliminate_swaps",
    "split_components",
    "Component",
    "to_json",
    "from_json",
    "to_dot",
]

SCHEMA_VERSION = 1

GENERATOR_OPS = {
    "mult": (2, 1),
    "comult": (1, 2),
    "unit": (0, 1),
    "counit": (1, 0),
    "cap": (2, 0),
    "cup": (0, 2),
}


class DiagramError(ValueError):
    pass


class DslSyntaxError(DiagramError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{msg} at line {line}, column {col}")
        self.line = line
        self.col = col


# ---------------------------------------------------------------- nodes


@dataclass(frozen=True)
class Node:
    """Node kind: ``generator``, ``tick``, ``swap``, ``state`` or ``effect``."""

    kind: str
    algebra: str | None = None
    op: str | None = None
    name: str | None = None
    legs: int = 1
    vector: tuple[complex, ...] | None = None

    def __post_init__(self):
        if self.kind == "generator":
            if self.op not in GENERATOR_OPS:
                raise DiagramError(f"unknown generator op {self.op!r}")
            if not self.algebra:
                raise DiagramError("generator needs an algebra")
        elif self.kind in ("state", "effect"):
            if not self.name:
                raise DiagramError("variable needs a name")
            if self.legs < 0:
                raise DiagramError("negative leg count")
        elif self.kind not in ("tick", "swap"):
            raise DiagramError(f"unknown node kind {self.kind!r}")

    @cached_property
    def arity(self) -> tuple[int, int]:
        """(inputs, outputs)."""
        if self.kind == "generator":
            return GENERATOR_OPS[self.op]
        if self.kind == "tick":
            return (1, 1)
        if self.kind == "swap":
            return (2, 2)
        if self.kind == "state":
            return (0, self.legs)
        return (self.legs, 0)

    @property
    def n_in(self) -> int:
        return self.arity[0]

    @property
    def n_out(self) -> int:
        return self.arity[1]

    def key(self):
        return (self.kind, self.algebra, self.op, self.name, self.legs, self.vector)

    def label(self) -> str:
        if self.kind == "generator":
            return f"{self.op}:{self.algebra}"
        if self.kind in ("state", "effect"):
            return f"{self.kind}:{self.name}"
        return self.kind

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.kind == "generator":
            out.update(algebra=self.algebra, op=self.op)
        elif self.kind in ("state", "effect"):
            out.update(name=self.name, legs=self.legs)
            if self.vector is not None:
                out["vector"] = [[float(z.real), float(z.imag)] for z in self.vector]
        return out

    @classmethod
    def from_json(cls, obj: Mapping) -> "Node":
        try:
            kind = obj["kind"]
            vec = obj.get("vector")
            if vec is not None:
                vec = tuple(complex(re_, im) for re_, im in vec)
            return cls(
                kind=kind,
                algebra=obj.get("algebra"),
                op=obj.get("op"),
                name=obj.get("name"),
                legs=int(obj.get("legs", 1)),
                vector=vec,
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DiagramError(f"malformed node: {exc}") from exc


Endpoint = tuple
Wire = tuple[Endpoint, Endpoint]


# ---------------------------------------------------------------- diagrams


@dataclass(frozen=True, eq=False)
class Diagram:
    nodes: Mapping[int, Node]
    wires: tuple[Wire, ...]
    n_inputs: int
    n_outputs: int
    _src_of: dict = field(init=False, repr=False, compare=False)
    _dst_of: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "nodes", dict(self.nodes))
        object.__setattr__(self, "wires", tuple((tuple(s), tuple(d)) for s, d in self.wires))
        self._validate()

    def _validate(self):
        src_of: dict = {}
        dst_of: dict = {}
        arity = {i: n.arity for i, n in self.nodes.items()}
        for s, d in self.wires:
            if not s or s[0] not in ("node", "in"):
                raise DiagramError(f"bad wire endpoint {s!r}")
            if not d or d[0] not in ("node", "out"):
                raise DiagramError(f"bad wire endpoint {d!r}")
            self._check_endpoint(s, arity, source=True)
            self._check_endpoint(d, arity, source=False)
            if s in dst_of:
                raise DiagramError(f"port {s!r} used twice")
            if d in src_of:
                raise DiagramError(f"port {d!r} used twice")
            dst_of[s] = d
            src_of[d] = s
        expected = len(self.wires)
        n_src = self.n_inputs + sum(a[1] for a in arity.values())
        n_dst = self.n_outputs + sum(a[0] for a in arity.values())
        if n_src != expected or n_dst != expected:
            raise DiagramError("dangling port: every port must carry exactly one wire")
        object.__setattr__(self, "_src_of", src_of)
        object.__setattr__(self, "_dst_of", dst_of)
        self._check_acyclic()

    def _check_endpoint(self, ep, arity, source: bool):
        if ep[0] == "node":
            if len(ep) != 3 or ep[1] not in arity:
                raise DiagramError(f"dangling wire endpoint {ep!r}")
            limit = arity[ep[1]][1 if source else 0]
            if not 0 <= ep[2] < limit:
                raise DiagramError(f"port index out of range in {ep!r}")
        else:
            limit = self.n_inputs if ep[0] == "in" else self.n_outputs
            if len(ep) != 2 or not 0 <= ep[1] < limit:
                raise DiagramError(f"boundary slot out of range in {ep!r}")

    def _check_acyclic(self):
        order = self.topological_order()
        if len(order) != len(self.nodes):
            raise DiagramError("wiring has a directed cycle")

    def topological_order(self) -> list[int]:
        indeg = {i: 0 for i in self.nodes}
        succ: dict[int, list[int]] = {i: [] for i in self.nodes}
        for s, d in self.wires:
            if s[0] == "node" and d[0] == "node":
                succ[s[1]].append(d[1])
                indeg[d[1]] += 1
        ready = sorted(i for i, k in indeg.items() if k == 0)
        order = []
        while ready:
            i = ready.pop(0)
            order.append(i)
            for j in succ[i]:
                indeg[j] -= 1
                if indeg[j] == 0:
                    ready.append(j)
        return order

    # -- access

    def source_of(self, target: Endpoint) -> Endpoint:
        return self._src_of[tuple(target)]

    def target_of(self, source: Endpoint) -> Endpoint:
        return self._dst_of[tuple(source)]

    @property
    def arity(self) -> tuple[int, int]:
        return (self.n_inputs, self.n_outputs)

    def __len__(self):
        return len(self.nodes)

    def algebras(self) -> set[str]:
        return {n.algebra for n in self.nodes.values() if n.kind == "generator"}

    def relabel(self, offset: int = 0) -> "Diagram":
        """Renumber nodes to ``offset, offset+1, ...`` in id order."""
        mapping = {old: offset + k for k, old in enumerate(sorted(self.nodes))}
        return self.rename(mapping)

    def rename(self, mapping: Mapping[int, int]) -> "Diagram":
        def ep(e):
            return ("node", mapping[e[1]], e[2]) if e[0] == "node" else e

        return Diagram(
            {mapping[i]: n for i, n in self.nodes.items()},
            tuple((ep(s), ep(d)) for s, d in self.wires),
            self.n_inputs,
            self.n_outputs,
        )

    def __repr__(self):
        return f"Diagram(nodes={len(self.nodes)}, in={self.n_inputs}, out={self.n_outputs})"


# ---------------------------------------------------------------- builders


def _single(node: Node) -> Diagram:
    wires = [(("in", k), ("node", 0, k)) for k in range(node.n_in)]
    wires += [(("node", 0, k), ("out", k)) for k in range(node.n_out)]
    return Diagram({0: node}, tuple(wires), node.n_in, node.n_out)


def generator(op: str, algebra: str) -> Diagram:
    return _single(Node("generator", algebra=algebra, op=op))


def tick() -> Diagram:
    return _single(Node("tick"))


def swap() -> Diagram:
    return _single(Node("swap"))


def identity(n: int = 1) -> Diagram:
    return Diagram({}, tuple((("in", k), ("out", k)) for k in range(n)), n, n)


def empty() -> Diagram:
    return Diagram({}, (), 0, 0)


def _vector_tuple(vector, legs: int | None, dim: int = 2):
    if vector is None:
        return None, (1 if legs is None else legs)
    vec = tuple(complex(z) for z in np.asarray(vector, dtype=complex).reshape(-1))
    k = 0
    while dim**k < len(vec):
        k += 1
    if dim**k != len(vec):
        raise DiagramError(f"vector length {len(vec)} is not a power of {dim}")
    if legs is not None and legs != k:
        raise DiagramError(f"vector has {k} legs, expected {legs}")
    return vec, k


def variable_state(name: str, vector=None, legs: int | None = None) -> Diagram:
    vec, k = _vector_tuple(vector, legs)
    return _single(Node("state", name=name, legs=k, vector=vec))


def variable_effect(name: str, vector=None, legs: int | None = None) -> Diagram:
    vec, k = _vector_tuple(vector, legs)
    return _single(Node("effect", name=name, legs=k, vector=vec))


def compose_seq(f: Diagram, g: Diagram) -> Diagram:
    """``f`` then ``g`` (the map ``g o f``)."""
    if f.n_outputs != g.n_inputs:
        raise DiagramError(f"seq arity mismatch: {f.n_outputs} outputs feed {g.n_inputs} inputs")
    f2 = f.relabel(0)
    g2 = g.relabel(len(f2.nodes))
    f_into = {d[1]: s for s, d in f2.wires if d[0] == "out"}
    g_from = {s[1]: d for s, d in g2.wires if s[0] == "in"}
    wires = [w for w in f2.wires if w[1][0] != "out"]
    wires += [w for w in g2.wires if w[0][0] != "in"]
    wires += [(f_into[k], g_from[k]) for k in range(f.n_outputs)]
    return Diagram({**f2.nodes, **g2.nodes}, tuple(wires), f.n_inputs, g.n_outputs)


def compose_par(f: Diagram, g: Diagram) -> Diagram:
    """``f`` beside ``g``; boundary orders are concatenated."""
    f2 = f.relabel(0)
    g2 = g.relabel(len(f2.nodes))

    def shift(e):
        if e[0] == "in":
            return ("in", e[1] + f.n_inputs)
        if e[0] == "out":
            return ("out", e[1] + f.n_outputs)
        return e

    wires = list(f2.wires) + [(shift(s), shift(d)) for s, d in g2.wires]
    return Diagram({**f2.nodes, **g2.nodes}, tuple(wires), f.n_inputs + g.n_inputs, f.n_outputs + g.n_outputs)


def seq(*ds: Diagram) -> Diagram:
    if not ds:
        raise DiagramError("seq needs at least one diagram")
    out = ds[0]
    for d in ds[1:]:
        out = compose_seq(out, d)
    return out


def par(*ds: Diagram) -> Diagram:
    if not ds:
        return empty()
    out = ds[0]
    for d in ds[1:]:
        out = compose_par(out, d)
    return out


# ---------------------------------------------------------------- DSL

_TOKEN = re.compile(r"\s+|;[^\n]*|(?P<tok>\(|\)|\[|\]|,|[^\s()\[\],;]+)")


def _tokenize(text: str) -> list[tuple[str, int, int]]:
    toks = []
    line, line_start = 1, 0
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:  # pragma: no cover - the pattern matches any character
            raise DslSyntaxError("unexpected character", line, pos - line_start + 1)
        if m.group("tok") is not None:
            toks.append((m.group("tok"), line, pos - line_start + 1))
        chunk = m.group(0)
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rfind("\n") + 1
        pos = m.end()
    return toks


class _Parser:
    def __init__(self, text: str, algebras: Iterable[str] | None):
        self.toks = _tokenize(text)
        self.i = 0
        if algebras is None:
            from .cfa import algebra_names

            algebras = algebra_names()
        self.algebras = set(algebras)

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self, what="token"):
        t = self.peek()
        if t is None:
            last = self.toks[-1] if self.toks else ("", 1, 0)
            raise DslSyntaxError(f"unexpected end of input, expected {what}", last[1], last[2] + len(last[0]))
        self.i += 1
        return t

    def expect(self, tok):
        t = self.next(repr(tok))
        if t[0] != tok:
            raise DslSyntaxError(f"expected {tok!r}, found {t[0]!r}", t[1], t[2])
        return t

    def parse(self) -> Diagram:
        d = self.expr()
        t = self.peek()
        if t is not None:
            raise DslSyntaxError(f"trailing input {t[0]!r}", t[1], t[2])
        return d

    def expr(self) -> Diagram:
        t = self.next("expression")
        word = t[0]
        if word == "id":
            return identity(1)
        if word == "tick":
            return tick()
        if word == "swap":
            return swap()
        if word != "(":
            raise DslSyntaxError(f"unexpected token {word!r}", t[1], t[2])
        head = self.next("form name")
        h = head[0]
        if h in ("seq", "par"):
            parts = [self.expr()]
            while self.peek() is not None and self.peek()[0] != ")":
                parts.append(self.expr())
            self.expect(")")
            if len(parts) < 2:
                raise DslSyntaxError(f"({h} ...) needs at least two parts", head[1], head[2])
            if h == "par":
                return par(*parts)
            out = parts[0]
            for p in parts[1:]:
                if out.n_outputs != p.n_inputs:
                    raise DslSyntaxError(
                        f"seq arity mismatch: {out.n_outputs} outputs feed {p.n_inputs} inputs",
                        head[1],
                        head[2],
                    )
                out = compose_seq(out, p)
            return out
        if h in GENERATOR_OPS:
            alg = self.next("algebra name")
            if alg[0] not in self.algebras:
                raise DslSyntaxError(f"unknown algebra {alg[0]!r}", alg[1], alg[2])
            self.expect(")")
            return generator(h, alg[0])
        if h in ("state", "effect"):
            name = self.next("variable name")
            if name[0] in "()[],":
                raise DslSyntaxError("expected a variable name", name[1], name[2])
            nums = []
            bracket = False
            while True:
                t = self.next("')'")
                if t[0] == ")":
                    if bracket:
                        raise DslSyntaxError("unclosed '['", t[1], t[2])
                    break
                if t[0] == "[":
                    if bracket or nums:
                        raise DslSyntaxError("unexpected '['", t[1], t[2])
                    bracket = True
                    continue
                if t[0] == "]":
                    if not bracket:
                        raise DslSyntaxError("unexpected ']'", t[1], t[2])
                    bracket = False
                    continue
                if t[0] == ",":
                    continue
                try:
                    nums.append(complex(t[0]))
                except ValueError:
                    raise DslSyntaxError(f"bad complex number {t[0]!r}", t[1], t[2]) from None
            build = variable_state if h == "state" else variable_effect
            try:
                return build(name[0], nums if nums else None)
            except DiagramError as exc:
                raise DslSyntaxError(str(exc), name[1], name[2]) from None
        raise DslSyntaxError(f"unknown form {h!r}", head[1], head[2])


def parse_dsl(text: str, algebras: Iterable[str] | None = None) -> Diagram:
    """Parse the s-expression diagram language.

    ``(seq a b ...)`` runs ``a`` first; ``(par a b ...)`` places parts side by
    side. ``algebras`` restricts the accepted algebra names (default: every
    registered algebra).
    """
    return _Parser(text, algebras).parse()


# ---------------------------------------------------------------- semantics

NOT = np.array([[0, 1], [1, 0]], dtype=complex)


@dataclass(frozen=True)
class Semantics:
    """Interpretation of generator nodes.

    ``algebras`` maps names to CFAs; names not found fall back to the global
    registry. ``tick`` defaults to the NOT gate.
    """

    algebras: Mapping[str, object] = field(default_factory=dict)
    tick: Tensor | None = None
    dim: int = 2

    def algebra(self, name: str):
        if name in self.algebras:
            return self.algebras[name]
        from .cfa import get_algebra

        return get_algebra(name)

    def node_array(self, node: Node) -> np.ndarray:
        if node.kind == "generator":
            c = self.algebra(node.algebra)
            return getattr(c, node.op).array
        if node.kind == "tick":
            return (self.tick.array if self.tick is not None else NOT)
        if node.kind == "swap":
            return swap_tensor(self.dim).array
        if node.vector is None:
            raise DiagramError(f"unbound variable {node.name!r}")
        return np.asarray(node.vector, dtype=complex).reshape((self.dim,) * node.legs)


DEFAULT_SEMANTICS = Semantics()


def _contract(factors: list[tuple[np.ndarray, list]], order: list) -> np.ndarray:
    """Greedy pairwise contraction of labelled factors; returns the array with
    legs in ``order``."""
    factors = list(factors)
    while len(factors) > 1:
        best = None
        for i in range(len(factors)):
            for j in range(i + 1, len(factors)):
                shared = set(factors[i][1]) & set(factors[j][1])
                size = len(factors[i][1]) + len(factors[j][1]) - 2 * len(shared)
                key = (0 if shared else 1, size)
                if best is None or key < best[0]:
                    best = (key, i, j)
        _, i, j = best
        (a, la), (b, lb) = factors[i], factors[j]
        shared = [x for x in la if x in lb]
        # repeated labels within one factor cannot occur: every wire has two ends
        c = np.tensordot(a, b, axes=([la.index(x) for x in shared], [lb.index(x) for x in shared]))
        lc = [x for x in la if x not in shared] + [x for x in lb if x not in shared]
        factors = [f for k, f in enumerate(factors) if k not in (i, j)] + [(c, lc)]
    arr, labels = factors[0] if factors else (np.array(1, dtype=complex), [])
    if sorted(labels, key=repr) != sorted(order, key=repr):
        raise DiagramError("internal contraction error")
    return np.transpose(arr, [labels.index(x) for x in order]) if order else arr


def evaluate(d: Diagram, semantics: Semantics | None = None) -> Tensor:
    """Tensor denoted by ``d``: outputs in boundary order, then inputs."""
    sem = semantics or DEFAULT_SEMANTICS
    wire_id = {w: k for k, w in enumerate(d.wires)}
    by_src = {s: wire_id[(s, t)] for s, t in d.wires}
    by_dst = {t: wire_id[(s, t)] for s, t in d.wires}
    factors = []
    for nid, node in d.nodes.items():
        arr = np.asarray(sem.node_array(node), dtype=complex)
        labels = [by_src[("node", nid, p)] for p in range(node.n_out)]
        labels += [by_dst[("node", nid, p)] for p in range(node.n_in)]
        if arr.shape != (sem.dim,) * len(labels):
            raise DiagramError(f"tensor for {node.label()} has shape {arr.shape}")
        factors.append((arr, labels))
    out_labels, in_labels = [], []
    for k in range(d.n_outputs):
        out_labels.append(("o", k))
    for k in range(d.n_inputs):
        in_labels.append(("i", k))
    # boundary legs: rename the wire label at each slot
    rename = {}
    for k in range(d.n_inputs):
        rename[by_src[("in", k)]] = ("i", k)
    for k in range(d.n_outputs):
        w = by_dst[("out", k)]
        if w in rename:  # a bare wire from an input slot to an output slot
            factors.append((np.eye(sem.dim, dtype=complex), [("o", k), rename[w]]))
        else:
            rename[w] = ("o", k)
    factors = [(a, [rename.get(x, x) for x in ls]) for a, ls in factors]
    arr = _contract(factors, out_labels + in_labels)
    return Tensor(arr, d.n_outputs, d.n_inputs, sem.dim)


def bind(d: Diagram, values: Mapping[str, Sequence[complex]]) -> Diagram:
    """Attach concrete vectors to named variable states and effects."""
    nodes = {}
    for nid, n in d.nodes.items():
        if n.kind in ("state", "effect") and n.name in values:
            vec, k = _vector_tuple(values[n.name], None)
            if k != n.legs and n.vector is None and n.legs != 1:
                raise DiagramError(f"variable {n.name!r} expects {n.legs} legs")
            n = Node(n.kind, name=n.name, legs=k, vector=vec)
        nodes[nid] = n
    return Diagram(nodes, d.wires, d.n_inputs, d.n_outputs)


# ---------------------------------------------------------------- graph queries


def eliminate_swaps(d: Diagram) -> Diagram:
    """The same map with every swap node replaced by crossing wires."""
    if not any(n.kind == "swap" for n in d.nodes.values()):
        return d

    def resolve_back(src):
        # a swap passes input port p straight through to output port 1 - p
        while src[0] == "node" and d.nodes[src[1]].kind == "swap":
            src = d.source_of(("node", src[1], 1 - src[2]))
        return src

    wires = tuple(
        (resolve_back(s), t)
        for s, t in d.wires
        if not (t[0] == "node" and d.nodes[t[1]].kind == "swap")
    )
    nodes = {i: n for i, n in d.nodes.items() if n.kind != "swap"}
    return Diagram(nodes, wires, d.n_inputs, d.n_outputs)


def _vertex(ep):
    return ("n", ep[1]) if ep[0] == "node" else (ep[0], ep[1])


def _component_groups(d: Diagram):
    """Union-find components of the swap-free multigraph, in boundary order."""
    verts = [("n", i) for i in d.nodes]
    verts += [("in", k) for k in range(d.n_inputs)] + [("out", k) for k in range(d.n_outputs)]
    edges = [(_vertex(s), _vertex(t)) for s, t in d.wires]
    parent = {v: v for v in verts}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    groups: dict = {}
    for v in verts:
        groups.setdefault(find(v), {"verts": [], "edges": 0})["verts"].append(v)
    for a, _ in edges:
        groups[find(a)]["edges"] += 1

    def first(g, kind):
        return min((v[1] for v in g["verts"] if v[0] == kind), default=10**9)

    return sorted(groups.values(), key=lambda g: (first(g, "in"), first(g, "out"), first(g, "n")))


def loop_count(d: Diagram) -> list[int]:
    """Cycle rank ``E - V + 1`` of every connected component."""
    return [g["edges"] - len(g["verts"]) + 1 for g in _component_groups(eliminate_swaps(d))]


def is_connected(d: Diagram) -> bool:
    return len(_component_groups(eliminate_swaps(d))) <= 1


@dataclass(frozen=True)
class Component:
    diagram: Diagram
    inputs: tuple[int, ...]
    outputs: tuple[int, ...]
    loops: int


def split_components(d: Diagram) -> list[Component]:
    """Connected components with the parent's boundary slots they use."""
    d = eliminate_swaps(d)
    groups = _component_groups(d)
    if len(groups) == 1:
        g = groups[0]
        return [Component(d, tuple(range(d.n_inputs)), tuple(range(d.n_outputs)), g["edges"] - len(g["verts"]) + 1)]
    out = []
    for g in groups:
        node_ids = {v[1] for v in g["verts"] if v[0] == "n"}
        ins = tuple(sorted(v[1] for v in g["verts"] if v[0] == "in"))
        outs = tuple(sorted(v[1] for v in g["verts"] if v[0] == "out"))
        imap = {k: j for j, k in enumerate(ins)}
        omap = {k: j for j, k in enumerate(outs)}

        def ep(e):
            if e[0] == "in":
                return ("in", imap[e[1]])
            if e[0] == "out":
                return ("out", omap[e[1]])
            return e

        wires = [
            (ep(s), ep(t))
            for s, t in d.wires
            if (s[0] == "node" and s[1] in node_ids) or (s[0] == "in" and s[1] in imap)
        ]
        sub = Diagram({i: d.nodes[i] for i in node_ids}, tuple(wires), len(ins), len(outs))
        out.append(Component(sub, ins, outs, g["edges"] - len(g["verts"]) + 1))
    return out


def components(d: Diagram) -> list[Diagram]:
    return [c.diagram for c in split_components(d)]


@dataclass(frozen=True)
class CanonicalDescriptor:
    n_inputs: int
    m_outputs: int
    loops: int
    algebra: str | None


def descriptor(d: Diagram) -> CanonicalDescriptor:
    """(n, m, loops) of a connected single-algebra diagram."""
    comps = split_components(d)
    if len(comps) != 1:
        raise DiagramError("descriptor needs a connected diagram")
    algs = d.algebras()
    if len(algs) > 1:
        raise DiagramError("descriptor needs a single-algebra diagram")
    return CanonicalDescriptor(d.n_inputs, d.n_outputs, comps[0].loops, next(iter(algs), None))


# ---------------------------------------------------------------- isomorphism


def iso_check(a: Diagram, b: Diagram) -> bool:
    """Boundary-, kind- and port-preserving isomorphism test."""
    if a.arity != b.arity or len(a.nodes) != len(b.nodes) or len(a.wires) != len(b.wires):
        return False
    if sorted(n.key() for n in a.nodes.values()) != sorted(n.key() for n in b.nodes.values()):
        return False

    def map_ep(e, m):
        if e[0] == "node":
            return ("node", m[e[1]], e[2])
        return e

    def propagate(m: dict, inv: dict, queue: list) -> bool:
        """Follow wires from mapped endpoints; False on conflict."""
        while queue:
            ea = queue.pop()
            # ea is an endpoint of a whose partner across its wire must map to
            # the partner of the image endpoint in b
            is_source = ea[0] == "in" or ea[0] == "node" and ea[3] == "out"
            if ea[0] == "node":
                key_a = ("node", ea[1], ea[2])
                key_b = ("node", m[ea[1]], ea[2])
            else:
                key_a = key_b = ea
            if is_source:
                pa, pb = a.target_of(key_a), b.target_of(key_b)
            else:
                pa, pb = a.source_of(key_a), b.source_of(key_b)
            if pa[0] != pb[0]:
                return False
            if pa[0] != "node":
                if pa != pb:
                    return False
                continue
            if pa[2] != pb[2]:
                return False
            na, nb = pa[1], pb[1]
            if na in m:
                if m[na] != nb:
                    return False
                continue
            if nb in inv or a.nodes[na].key() != b.nodes[nb].key():
                return False
            m[na] = nb
            inv[nb] = na
            node = a.nodes[na]
            queue.extend(("node", na, p, "out") for p in range(node.n_out))
            queue.extend(("node", na, p, "in") for p in range(node.n_in))
        return True

    m: dict = {}
    inv: dict = {}
    seeds = [("in", k) for k in range(a.n_inputs)] + [("out", k) for k in range(a.n_outputs)]
    if not propagate(m, inv, seeds):
        return False

    def search(m, inv) -> bool:
        rest = [i for i in sorted(a.nodes) if i not in m]
        if not rest:
            return True
        na = rest[0]
        key = a.nodes[na].key()
        node = a.nodes[na]
        for nb in sorted(b.nodes):
            if nb in inv or b.nodes[nb].key() != key:
                continue
            m2, inv2 = dict(m), dict(inv)
            m2[na] = nb
            inv2[nb] = na
            q = [("node", na, p, "out") for p in range(node.n_out)]
            q += [("node", na, p, "in") for p in range(node.n_in)]
            if propagate(m2, inv2, q) and search(m2, inv2):
                return True
        return False

    return search(m, inv)


# ---------------------------------------------------------------- serialization


def to_json(d: Diagram) -> str:
    ids = sorted(d.nodes)
    obj = {
        "version": SCHEMA_VERSION,
        "inputs": d.n_inputs,
        "outputs": d.n_outputs,
        "nodes": [{"id": i, **d.nodes[i].to_json()} for i in ids],
        "wires": [{"src": list(s), "dst": list(t)} for s, t in d.wires],
    }
    return json.dumps(obj, sort_keys=True)


def from_json(text) -> Diagram:
    obj = json.loads(text) if isinstance(text, (str, bytes)) else text
    if not isinstance(obj, dict):
        raise DiagramError("diagram JSON must be an object")
    if obj.get("version") != SCHEMA_VERSION:
        raise DiagramError(f"unsupported diagram schema version {obj.get('version')!r}")
    try:
        nodes = {int(n["id"]): Node.from_json(n) for n in obj["nodes"]}
        if len(nodes) != len(obj["nodes"]):
            raise DiagramError("duplicate node id")

        def ep(e):
            if not isinstance(e, list) or not e:
                raise DiagramError(f"bad endpoint {e!r}")
            if e[0] == "node":
                return ("node", int(e[1]), int(e[2]))
            return (str(e[0]), int(e[1]))

        wires = tuple((ep(w["src"]), ep(w["dst"])) for w in obj["wires"])
        return Diagram(nodes, wires, int(obj["inputs"]), int(obj["outputs"]))
    except (KeyError, TypeError, IndexError) as exc:
        raise DiagramError(f"malformed diagram JSON: {exc}") from exc


_COLORS = {"ghz": "white", "w": "black"}


def to_dot(d: Diagram, name: str = "diagram") -> str:
    """Graphviz digraph; ticks become edge labels."""
    lines = [f"digraph {name} {{", "  rankdir=TB;"]
    for k in range(d.n_inputs):
        lines.append(f'  in{k} [shape=point, xlabel="in {k}"];')
    for k in range(d.n_outputs):
        lines.append(f'  out{k} [shape=point, xlabel="out {k}"];')
    palette = ["lightblue", "orange", "palegreen", "pink", "khaki"]
    extra: dict[str, str] = {}
    for i in sorted(d.nodes):
        n = d.nodes[i]
        if n.kind == "tick":
            continue
        if n.kind == "generator":
            col = _COLORS.get(n.algebra) or extra.setdefault(n.algebra, palette[len(extra) % len(palette)])
            font = "white" if col == "black" else "black"
            lines.append(
                f'  n{i} [label="{n.op}", style=filled, fillcolor={col}, fontcolor={font}, '
                f'tooltip="{n.algebra}"];'
            )
        elif n.kind == "swap":
            lines.append(f'  n{i} [label="swap", shape=box];')
        else:
            lines.append(f'  n{i} [label="{n.name}", shape=triangle];')

    def name_of(e):
        if e[0] == "in":
            return f"in{e[1]}"
        if e[0] == "out":
            return f"out{e[1]}"
        return f"n{e[1]}"

    for s, t in d.wires:
        if t[0] == "node" and d.nodes[t[1]].kind == "tick":
            continue
        ticks = 0
        while s[0] == "node" and d.nodes[s[1]].kind == "tick":
            ticks += 1
            s = d.source_of(("node", s[1], 0))
        attrs = [f'taillabel="{s[2]}"' if s[0] == "node" else "", f'headlabel="{t[2]}"' if t[0] == "node" else ""]
        if ticks:
            attrs.append('label="' + "|" * ticks + '"')
        attr = ", ".join(a for a in attrs if a)
        lines.append(f"  {name_of(s)} -> {name_of(t)}" + (f" [{attr}]" if attr else "") + ";")
    lines.append("}")
    return "\n".join(lines) + "\n"
