"""Interacting GHZ/W pairs: the tick, pair checks, partners, QMUX and PLDU.

The white structure is a special CFA, the black one anti-special; diagrams
refer to them as ``ghz`` and ``w``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import diagram as dg
from .cfa import CFA, GHZ, W, CfaError, check_antispecial, check_special, copiable_points, transport
from .slocc import local_equivalence
from .tensor import (
    DEFAULT_TOL,
    Tensor,
    Tolerance,
    effect,
    from_matrix,
    kron,
    proportionality_residual,
    state,
)

__all__ = [
    "NOT",
    "GhzwPair",
    "PairReport",
    "PairError",
    "CANONICAL_PAIR",
    "make_tick",
    "pair_check",
    "partner_from_scfa",
    "partner_from_acfa",
    "dot_transpose",
    "qmux_diagram",
    "qmux_target",
    "qmux_check",
    "QmuxCertificate",
    "PLDU",
    "pldu_decompose",
    "pldu_diagram",
    "synthesize",
]

NOT = from_matrix(np.array([[0, 1], [1, 0]]), 1, 1)


class PairError(ValueError):
    pass


def make_tick(scfa: CFA, acfa: CFA) -> Tensor:
    """``(cap_black (x) 1)(1 (x) cup_white)``."""
    if scfa.dim != acfa.dim:
        raise PairError("algebras act on different dimensions")
    arr = np.einsum("xa,ay->yx", acfa.cap.array, scfa.cup.array)
    return Tensor(arr, 1, 1, scfa.dim)


@dataclass(frozen=True, eq=False)
class GhzwPair:
    scfa: CFA
    acfa: CFA
    tick: Tensor | None = None

    def __post_init__(self):
        if self.tick is None:
            object.__setattr__(self, "tick", make_tick(self.scfa, self.acfa))
        if self.tick.arity != (1, 1) or self.tick.dim != self.scfa.dim:
            raise PairError("tick must be a 1->1 map on the algebra space")

    def semantics(self) -> dg.Semantics:
        algs = {"ghz": self.scfa, "w": self.acfa, self.scfa.name: self.scfa, self.acfa.name: self.acfa}
        return dg.Semantics(algs, self.tick, self.scfa.dim)

    def transported(self, L) -> "GhzwPair":
        L = np.asarray(L, dtype=complex)
        t = L @ self.tick.matrix @ np.linalg.inv(L)
        return GhzwPair(transport(self.scfa, L), transport(self.acfa, L), from_matrix(t, 1, 1))

    def to_json(self) -> dict:
        return {"scfa": self.scfa.to_json(), "acfa": self.acfa.to_json(), "tick": self.tick.to_json()}

    @classmethod
    def from_json(cls, obj) -> "GhzwPair":
        if isinstance(obj, str):
            obj = json.loads(obj)
        try:
            tick = Tensor.from_json(obj["tick"]) if obj.get("tick") is not None else None
            return cls(CFA.from_json(obj["scfa"]), CFA.from_json(obj["acfa"]), tick)
        except (KeyError, TypeError) as exc:
            raise PairError(f"malformed pair JSON: {exc}") from exc


CANONICAL_PAIR = GhzwPair(GHZ, W, NOT)

PAIR_CHECKS = {
    "a": "tick is an involution",
    "b": "white counit absorbs the tick",
    "c": "white comultiplication copies the black unit",
    "d": "white comultiplication copies the lolli up to the circle",
    "e": "black comultiplication copies the ticked black unit",
    "f": "the three unit/counit scalars equal one",
    "g": "black unit and lolli are independent",
}


@dataclass
class PairReport:
    residuals: dict[str, float]
    tol: Tolerance
    failures: list[str] = field(default_factory=list)
    scalars: dict[str, complex] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())


def _maxabs(x) -> float:
    return float(np.max(np.abs(np.asarray(x)))) if np.size(x) else 0.0


def pair_check(pair: GhzwPair, tol: Tolerance = DEFAULT_TOL) -> PairReport:
    """Residuals of checks ``a`` to ``g`` (see ``PAIR_CHECKS``).

    ``g`` is reported as 0 when the black unit and lolli span the space and
    1 otherwise.
    """
    w, b, t = pair.scfa, pair.acfa, pair.tick.matrix
    eta_b = b.unit.entries
    lolli = b.lolli.entries
    res: dict[str, float] = {}
    res["a"] = _maxabs(t @ t - np.eye(w.dim))
    res["b"] = _maxabs(w.counit.entries @ t - w.counit.entries)
    dw = w.comult.matrix
    res["c"] = _maxabs(dw @ eta_b - np.kron(eta_b, eta_b))
    res["d"] = _maxabs(w.circle * (dw @ lolli) - np.kron(lolli, lolli))
    te = t @ eta_b
    res["e"] = proportionality_residual(
        state(b.comult.matrix @ te), state(np.kron(te, te))
    )
    scal = {
        "counit_b.tick.unit_b": complex(b.counit.entries @ t @ eta_b),
        "counit_b.tick.unit_w": complex(b.counit.entries @ t @ w.unit.entries),
        "counit_b.unit_w": complex(b.counit.entries @ w.unit.entries),
    }
    res["f"] = max(abs(v - 1) for v in scal.values())
    s = np.linalg.svd(np.stack([eta_b, lolli], axis=1), compute_uv=False)
    res["g"] = 0.0 if s[-1] > tol.bound(s[0]) else 1.0
    scale = {"d": max(1.0, np.linalg.norm(lolli) ** 2)}
    failures = [k for k, r in res.items() if not tol.accepts(r, scale.get(k, 1.0))]
    return PairReport(res, tol, failures, scal)


def _pair_basis_check(scfa: CFA, acfa: CFA, tol: Tolerance):
    if not check_special(scfa, tol):
        raise PairError("white algebra is not special")
    if not check_antispecial(acfa, tol):
        raise PairError("black algebra is not anti-special")


def partner_from_scfa(scfa: CFA, tol: Tolerance = DEFAULT_TOL, seed: int = 0) -> tuple[CFA, CFA]:
    """The two anti-special partners of a special CFA on C^2.

    With copiable points ``e0, e1`` the first partner copies ``e0`` and sends
    ``e1`` to ``e0 e1 + e1 e0`` with unit ``e1``; the second swaps the roles.
    """
    if scfa.dim != 2:
        raise PairError("partners are defined on C^2 only")
    if not check_special(scfa, tol):
        raise PairError("input algebra is not special")
    pts = copiable_points(scfa, seed, tol)
    if len(pts) != 2:
        raise PairError(f"expected two copiable points, found {len(pts)}")
    L = np.stack([p.entries for p in pts], axis=1)
    if abs(np.linalg.det(L)) <= tol.bound(np.linalg.norm(L) ** 2):
        raise PairError("copiable points are not a basis")
    first = transport(W, L, name=f"{scfa.name}_partner")
    second = transport(W, L @ NOT.matrix, name=f"{scfa.name}_partner_alt")
    return first, second


def partner_from_acfa(acfa: CFA, tol: Tolerance = DEFAULT_TOL) -> CFA:
    """The special CFA copying the black unit and ``lolli / circle``."""
    if acfa.dim != 2:
        raise PairError("partners are defined on C^2 only")
    if not check_antispecial(acfa, tol):
        raise PairError("input algebra is not anti-special")
    e0 = acfa.lolli.entries / acfa.circle
    e1 = acfa.unit.entries
    L = np.stack([e0, e1], axis=1)
    if abs(np.linalg.det(L)) <= tol.bound(np.linalg.norm(L) ** 2):
        raise PairError("unit and lolli are dependent")
    return transport(GHZ, L, name=f"{acfa.name}_partner")


def dot_transpose(c: CFA | GhzwPair, f: Tensor) -> Tensor:
    """Bend every leg of ``f`` with the caps and cups of ``c`` (the black
    algebra for a pair)."""
    alg = c.acfa if isinstance(c, GhzwPair) else c
    if f.dim != alg.dim:
        raise PairError("dimension mismatch")
    m, n = f.out_arity, f.in_arity
    arr = f.array
    cup = alg.cup.array  # cup[x, a]
    cap = alg.cap.array  # cap[b, y]
    # new outputs come from the old inputs through cups, new inputs enter
    # the old outputs through caps
    for k in range(n):
        arr = np.tensordot(arr, cup, axes=([m], [1]))  # old input -> trailing new output
    for k in range(m):
        arr = np.tensordot(arr, cap, axes=([0], [0]))  # old output -> trailing new input
    return Tensor(arr, n, m, alg.dim)


# ---------------------------------------------------------------- QMUX


def qmux_diagram(n: int) -> dg.Diagram:
    """Multiplexor on two branches of ``n`` wires each.

    Inputs ``0..n-1`` carry the first branch, ``n..2n-1`` the second. Each
    input meets a black comultiplication. The first legs are collected by a
    chain of white multiplications (first-branch legs ticked) whose ticked
    result is output 0; the second legs of wire ``k`` in both branches meet at
    a black multiplication with ticks on both inputs and the output, giving
    output ``k + 1``.
    """
    if n < 1:
        raise PairError("qmux needs at least one wire per branch")
    nodes: dict[int, dg.Node] = {}
    wires = []
    counter = [0]

    def add(node):
        i = counter[0]
        counter[0] += 1
        nodes[i] = node
        return i

    def gen(op, alg):
        return add(dg.Node("generator", algebra=alg, op=op))

    def ticked(src):
        t = add(dg.Node("tick"))
        wires.append((src, ("node", t, 0)))
        return ("node", t, 0)

    splits = []
    for k in range(2 * n):
        d = gen("comult", "w")
        wires.append((("in", k), ("node", d, 0)))
        splits.append(d)
    control = [ticked(("node", d, 0)) if k < n else ("node", d, 0) for k, d in enumerate(splits)]
    acc = control[0]
    for src in control[1:]:
        m = gen("mult", "ghz")
        wires.append((acc, ("node", m, 0)))
        wires.append((src, ("node", m, 1)))
        acc = ("node", m, 0)
    wires.append((ticked(acc), ("out", 0)))
    for k in range(n):
        m = gen("mult", "w")
        wires.append((ticked(("node", splits[k], 1)), ("node", m, 0)))
        wires.append((ticked(("node", splits[n + k], 1)), ("node", m, 1)))
        wires.append((ticked(("node", m, 0)), ("out", k + 1)))
    return dg.Diagram(nodes, tuple(wires), 2 * n, n + 1)


def qmux_target(psi: Tensor, phi: Tensor) -> Tensor:
    """``<1..1|phi> |0 psi> + <1..1|psi> |1 phi>``."""
    ov_psi, ov_phi = psi.entries[-1], phi.entries[-1]
    return state(np.concatenate([ov_phi * psi.entries, ov_psi * phi.entries]))


@dataclass
class QmuxCertificate:
    output: Tensor
    target: Tensor
    maps: list[np.ndarray]
    residual: float
    passed: bool


def qmux_check(
    psi: Tensor,
    phi: Tensor,
    pair: GhzwPair = CANONICAL_PAIR,
    tol: Tolerance = Tolerance(1e-8, 1e-8),
    seed: int = 0,
) -> QmuxCertificate:
    """Evaluate the multiplexor on ``psi (x) phi`` and certify SLOCC
    equivalence with :func:`qmux_target`."""
    if psi.in_arity or phi.in_arity or psi.out_arity != phi.out_arity or psi.out_arity < 1:
        raise PairError("qmux needs two states on the same number of qubits")
    for name, t in (("psi", psi), ("phi", phi)):
        if abs(t.entries[-1]) <= tol.bound(t.norm()):
            raise PairError(
                f"<1..1|{name}> vanishes; re-represent the state by a SLOCC-equivalent one first"
            )
    n = psi.out_arity
    d = dg.compose_seq(
        dg.compose_par(_state_diagram("psi", psi), _state_diagram("phi", phi)), qmux_diagram(n)
    )
    out = dg.evaluate(d, pair.semantics())
    target = qmux_target(psi, phi)
    maps = [np.eye(2, dtype=complex)] * (n + 1)
    res = proportionality_residual(out, target)
    if res > tol.bound(1.0):
        found = local_equivalence(target, out, seed=seed, tol=tol)
        if found is not None:
            maps, res = found
    return QmuxCertificate(out, target, maps, res, res <= tol.bound(1.0))


def _state_diagram(name: str, t: Tensor) -> dg.Diagram:
    return dg.variable_state(name, t.entries, legs=t.out_arity)


# ---------------------------------------------------------------- PLDU


@dataclass(frozen=True)
class PLDU:
    """``a = p @ l @ d @ u @ q`` with unit-triangular ``l`` and ``u``.

    ``q`` is the identity unless the first column of ``a`` vanishes while the
    second does not. ``xi``, ``phi`` and ``psi`` are the single-qubit states
    realising ``l``, ``d`` and ``u`` diagrammatically.
    """

    p: np.ndarray
    l: np.ndarray
    d: np.ndarray
    u: np.ndarray
    q: np.ndarray
    xi: np.ndarray
    phi: np.ndarray
    psi: np.ndarray

    @property
    def p_is_not(self) -> bool:
        return bool(self.p[0, 0] == 0)

    @property
    def q_is_not(self) -> bool:
        return bool(self.q[0, 0] == 0)

    def product(self) -> np.ndarray:
        return self.p @ self.l @ self.d @ self.u @ self.q

    def to_json(self) -> dict:
        def enc(m):
            return [[float(z.real), float(z.imag)] for z in np.asarray(m).reshape(-1)]

        return {k: enc(getattr(self, k)) for k in ("p", "l", "d", "u", "q", "xi", "phi", "psi")}


def _ldu(b: np.ndarray):
    l21 = b[1, 0] / b[0, 0]
    u12 = b[0, 1] / b[0, 0]
    d2 = b[1, 1] - l21 * b[0, 1]
    return l21, b[0, 0], d2, u12


def pldu_decompose(a, tol: Tolerance = DEFAULT_TOL) -> PLDU:
    """Gaussian elimination with a row swap only when the top-left pivot
    vanishes."""
    a = np.asarray(a, dtype=complex)
    if a.shape != (2, 2):
        raise PairError("pldu expects a 2x2 matrix")
    eye = np.eye(2, dtype=complex)
    flip = NOT.matrix.astype(complex)
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    zero = tol.bound(scale)
    p, q = eye, eye
    if abs(a[0, 0]) > zero:
        b = a
    elif abs(a[1, 0]) > zero:
        p, b = flip, flip @ a
    elif max(abs(a[0, 1]), abs(a[1, 1])) > zero:
        q = flip
        b = a @ flip
        if abs(b[0, 0]) <= zero:
            p, b = flip, flip @ b
    else:
        b = None
    if b is None:
        l21 = d1 = d2 = u12 = 0j
    else:
        l21, d1, d2, u12 = _ldu(b)
    l = np.array([[1, 0], [l21, 1]], dtype=complex)
    d = np.diag([d1, d2]).astype(complex)
    u = np.array([[1, u12], [0, 1]], dtype=complex)
    return PLDU(
        p,
        l,
        d,
        u,
        q,
        xi=np.array([l21, 1], dtype=complex),
        phi=np.array([d1, d2], dtype=complex),
        psi=np.array([u12, 1], dtype=complex),
    )


def pldu_diagram(f: PLDU) -> dg.Diagram:
    """Diagram whose value is ``f.product()`` under the canonical pair.

    ``u`` multiplies by ``psi`` in the black algebra, ``d`` by ``phi`` in the
    white one, and ``l`` is the black multiplication by ``xi`` conjugated by
    ticks.
    """

    def mult_by(name, vec, alg):
        return dg.seq(dg.par(dg.variable_state(name, vec), dg.identity(1)), dg.generator("mult", alg))

    parts = []
    if f.q_is_not:
        parts.append(dg.tick())
    parts.append(mult_by("psi", f.psi, "w"))
    parts.append(mult_by("phi", f.phi, "ghz"))
    parts.append(dg.seq(dg.tick(), mult_by("xi", f.xi, "w"), dg.tick()))
    if f.p_is_not:
        parts.append(dg.tick())
    return dg.seq(*parts)


def synthesize(
    source: str | dg.Diagram,
    bindings: dict | None = None,
    semantics: dg.Semantics | None = None,
) -> Tensor:
    """Evaluate a diagram (or DSL text) after binding its variables."""
    d = dg.parse_dsl(source) if isinstance(source, str) else source
    if bindings:
        d = dg.bind(d, bindings)
    return dg.evaluate(d, semantics)
