"""Commutative Frobenius algebras on finite-dimensional spaces.

A CFA is stored as its four structure tensors. Index conventions follow
:mod:`ghzw_calculus.tensor`: ``mult.array[a, x, y]`` is the coefficient of
``|a>`` in ``mu(|x> (x) |y>)``, ``comult.array[a, b, x]`` that of ``|ab>`` in
``delta|x>``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping

import numpy as np

from .tensor import (
    DEFAULT_TOL,
    Tensor,
    TensorError,
    Tolerance,
    compose,
    effect,
    identity,
    kron,
    proportional,
    state,
)

__all__ = [
    "CFA",
    "CfaError",
    "CfaReport",
    "CfaClassification",
    "GHZ",
    "W",
    "basis_cfa",
    "register_algebra",
    "get_algebra",
    "algebra_names",
    "check_cfa",
    "check_special",
    "check_antispecial",
    "special_residual",
    "antispecial_residuals",
    "spider",
    "cfa_partial_trace",
    "copiable_points",
    "state_from_cfa",
    "cfa_from_state",
    "compact_partner",
    "classify_cfa",
    "ghz_normalize",
    "w_normalize",
    "w_uniform_normalize",
    "extend_to_cfa",
    "transport",
    "contract_leg",
    "cfa_residuals",
    "GHZ3",
    "W3",
]

AXIOMS = ("assoc", "coassoc", "unit", "counit", "frobenius", "comm", "cocomm")


class CfaError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class CFA:
    name: str
    mult: Tensor
    unit: Tensor
    comult: Tensor
    counit: Tensor

    def __post_init__(self):
        shapes = {
            "mult": (self.mult, (2, 1)),
            "unit": (self.unit, (0, 1)),
            "comult": (self.comult, (1, 2)),
            "counit": (self.counit, (1, 0)),
        }
        dims = {t.dim for t, _ in shapes.values()}
        if len(dims) != 1:
            raise CfaError("structure tensors have different dimensions")
        for label, (t, arity) in shapes.items():
            if t.arity != arity:
                raise CfaError(f"{label} must have (in, out) arity {arity}, got {t.arity}")

    @property
    def dim(self) -> int:
        return self.mult.dim

    @cached_property
    def cap(self) -> Tensor:
        return compose(self.counit, self.mult)

    @cached_property
    def cup(self) -> Tensor:
        return compose(self.comult, self.unit)

    @cached_property
    def lolli(self) -> Tensor:
        """Right partial trace of the comultiplication."""
        d = self.comult.array
        return Tensor(np.einsum("akk->a", d), 1, 0, self.dim)

    @cached_property
    def cololli(self) -> Tensor:
        """Right partial trace of the multiplication."""
        m = self.mult.array
        return Tensor(np.einsum("kxk->x", m), 0, 1, self.dim)

    @cached_property
    def circle(self) -> complex:
        return compose(self.cap, self.cup).value()

    @cached_property
    def mu_delta(self) -> Tensor:
        return compose(self.mult, self.comult)

    def tensors(self) -> dict[str, Tensor]:
        return {
            "mult": self.mult,
            "unit": self.unit,
            "comult": self.comult,
            "counit": self.counit,
            "cap": self.cap,
            "cup": self.cup,
        }

    def renamed(self, name: str) -> "CFA":
        return CFA(name, self.mult, self.unit, self.comult, self.counit)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "dim": self.dim,
            "mult": self.mult.to_json(),
            "unit": self.unit.to_json(),
            "comult": self.comult.to_json(),
            "counit": self.counit.to_json(),
        }

    @classmethod
    def from_json(cls, obj) -> "CFA":
        if isinstance(obj, str):
            obj = json.loads(obj)
        try:
            c = cls(
                str(obj.get("name", "custom")),
                Tensor.from_json(obj["mult"]),
                Tensor.from_json(obj["unit"]),
                Tensor.from_json(obj["comult"]),
                Tensor.from_json(obj["counit"]),
            )
        except (KeyError, TypeError, TensorError) as exc:
            raise CfaError(f"malformed CFA JSON: {exc}") from exc
        if "dim" in obj and int(obj["dim"]) != c.dim:
            raise CfaError("declared dim does not match tensors")
        return c

    def __repr__(self):
        return f"CFA({self.name!r}, dim={self.dim})"


def _mk(arr, out_arity, in_arity, dim=2) -> Tensor:
    return Tensor(np.asarray(arr, dtype=complex), out_arity, in_arity, dim)


def basis_cfa(d: int = 2, name: str | None = None) -> CFA:
    """The CFA copying the standard basis of C^d."""
    mult = np.zeros((d, d, d))
    comult = np.zeros((d, d, d))
    for i in range(d):
        mult[i, i, i] = 1
        comult[i, i, i] = 1
    return CFA(
        name or ("ghz" if d == 2 else f"basis{d}"),
        _mk(mult, 1, 2, d),
        _mk(np.ones(d), 1, 0, d),
        _mk(comult, 2, 1, d),
        _mk(np.ones(d), 0, 1, d),
    )


def _w_algebra() -> CFA:
    mult = np.zeros((2, 2, 2))
    mult[1, 1, 1] = 1
    mult[0, 0, 1] = 1
    mult[0, 1, 0] = 1
    comult = np.zeros((2, 2, 2))
    comult[0, 0, 0] = 1
    comult[0, 1, 1] = 1
    comult[1, 0, 1] = 1
    return CFA("w", _mk(mult, 1, 2), _mk([0, 1], 1, 0), _mk(comult, 2, 1), _mk([1, 0], 0, 1))


GHZ = basis_cfa(2, "ghz")
W = _w_algebra()

_REGISTRY: dict[str, CFA] = {"ghz": GHZ, "w": W}


def register_algebra(c: CFA, name: str | None = None) -> CFA:
    """Make ``c`` available to the diagram language under ``name``."""
    name = name or c.name
    if name in ("ghz", "w"):
        raise CfaError(f"{name!r} is a built-in algebra")
    if not name.isidentifier():
        raise CfaError(f"bad algebra name {name!r}")
    c = c if c.name == name else c.renamed(name)
    _REGISTRY[name] = c
    return c


def get_algebra(name: str) -> CFA:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise CfaError(f"unknown algebra {name!r}") from None


def algebra_names() -> list[str]:
    return list(_REGISTRY)


# ---------------------------------------------------------------- axioms


@dataclass(frozen=True)
class CfaReport:
    residuals: Mapping[str, float]
    tol: Tolerance = DEFAULT_TOL
    scale: float = 1.0

    @property
    def failures(self) -> list[str]:
        return [k for k, r in self.residuals.items() if not self.tol.accepts(r, self.scale)]

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values(), default=0.0)

    def __bool__(self):
        return self.passed


def _maxabs(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def cfa_residuals(c: CFA) -> dict[str, float]:
    M, D = c.mult.array, c.comult.array
    e, f = c.unit.array, c.counit.array
    I = np.eye(c.dim)
    out = {}
    out["assoc"] = _maxabs(
        np.einsum("akz,kxy->axyz", M, M) - np.einsum("axk,kyz->axyz", M, M)
    )
    out["coassoc"] = _maxabs(
        np.einsum("pqk,krx->pqrx", D, D) - np.einsum("pkx,qrk->pqrx", D, D)
    )
    out["unit"] = max(
        _maxabs(np.einsum("akx,k->ax", M, e) - I),
        _maxabs(np.einsum("axk,k->ax", M, e) - I),
    )
    out["counit"] = max(
        _maxabs(np.einsum("k,kbx->bx", f, D) - I),
        _maxabs(np.einsum("k,bkx->bx", f, D) - I),
    )
    dm = np.einsum("pqk,kxy->pqxy", D, M)
    out["frobenius"] = max(
        _maxabs(np.einsum("pxk,kqy->pqxy", M, D) - dm),
        _maxabs(np.einsum("pkx,qky->pqxy", D, M) - dm),
    )
    out["comm"] = _maxabs(M - M.transpose(0, 2, 1))
    out["cocomm"] = _maxabs(D - D.transpose(1, 0, 2))
    return out


def check_cfa(c: CFA, tol: Tolerance = DEFAULT_TOL) -> CfaReport:
    """Residual of every CFA axiom; passes iff each is within ``tol``."""
    return CfaReport(cfa_residuals(c), tol)


def special_residual(c: CFA) -> float:
    return _maxabs(c.mu_delta.matrix - np.eye(c.dim))


def antispecial_residuals(c: CFA) -> dict[str, float]:
    """``dim * mu delta = lolli cololli`` and, in dim >= 2, ``Tr(mu delta) = 0``."""
    loop = compose(c.lolli, c.cololli)
    res = {"antispecial": _maxabs(c.dim * c.mu_delta.matrix - loop.matrix)}
    if c.dim >= 2:
        res["double_loop"] = abs(complex(np.trace(c.mu_delta.matrix)))
    return res


def check_special(c: CFA, tol: Tolerance = DEFAULT_TOL) -> bool:
    return tol.accepts(special_residual(c))


def check_antispecial(c: CFA, tol: Tolerance = DEFAULT_TOL) -> bool:
    scale = max(1.0, c.lolli.norm() * c.cololli.norm())
    return all(tol.accepts(r, scale) for r in antispecial_residuals(c).values())


# ---------------------------------------------------------------- spiders


def _mult_comb(c: CFA, n: int) -> Tensor:
    t = identity(1, c.dim)
    for _ in range(n - 1):
        t = compose(c.mult, kron(t, identity(1, c.dim)))
    return t


def _comult_comb(c: CFA, m: int) -> Tensor:
    t = identity(1, c.dim)
    for _ in range(m - 1):
        t = compose(kron(t, identity(1, c.dim)), c.comult)
    return t


def spider(c: CFA, n: int, m: int) -> Tensor:
    """The connected tree with ``n`` inputs and ``m`` outputs."""
    if n < 0 or m < 0:
        raise CfaError("spider legs must be nonnegative")
    top = c.unit if n == 0 else _mult_comb(c, n)
    bottom = c.counit if m == 0 else _comult_comb(c, m)
    if n == 0 and m == 0:
        return compose(c.counit, c.unit)
    if m == 0:
        return compose(c.counit, top)
    if n == 0:
        return compose(bottom, c.unit)
    return compose(bottom, top)


def cfa_partial_trace(c: CFA, m: Tensor, leg: int | None = None, in_leg: int | None = None) -> Tensor:
    """Partial trace of ``m`` built from the cap and cup of ``c``.

    ``leg`` is an output leg (default: the last one) and ``in_leg`` the input
    leg it is closed against (default: aligned from the right).
    """
    if m.dim != c.dim:
        raise CfaError("dimension mismatch")
    if m.out_arity < 1 or m.in_arity < 1:
        raise CfaError("partial trace needs at least one input and one output")
    leg = m.out_arity - 1 if leg is None else leg
    if in_leg is None:
        in_leg = m.in_arity - (m.out_arity - leg)
    if not (0 <= leg < m.out_arity and 0 <= in_leg < m.in_arity):
        raise CfaError("bad trace legs")
    # cup feeds the traced input, cap closes the traced output with the
    # cup's other end
    cap, cup = c.cap.array, c.cup.array
    arr = np.moveaxis(m.array, [leg, m.out_arity + in_leg], [-2, -1])
    res = np.einsum("...ac,cb,ab->...", arr, cup, cap)
    return Tensor(res, m.out_arity - 1, m.in_arity - 1, c.dim)


# ---------------------------------------------------------------- copiable points


def _dedupe(vectors: list[np.ndarray], tol: float) -> list[np.ndarray]:
    out: list[np.ndarray] = []
    for v in vectors:
        u = v / np.linalg.norm(v)
        if all(abs(abs(np.vdot(w / np.linalg.norm(w), u)) - 1) > tol for w in out):
            out.append(v)
    return out


def _nilpotent_direction(m: np.ndarray) -> np.ndarray:
    nil = m - np.trace(m) / m.shape[0] * np.eye(m.shape[0])
    col = nil[:, int(np.argmax(np.linalg.norm(nil, axis=0)))]
    if np.linalg.norm(col) == 0:
        return np.eye(m.shape[0])[:, 0].astype(complex)
    return col / np.linalg.norm(col)


def copiable_points(c: CFA, seed: int = 0, tol: Tolerance = DEFAULT_TOL) -> list[Tensor]:
    """Nonzero ``x`` with ``delta x = x (x) x``.

    Candidates are eigenvectors of left multiplication by a random element;
    each is rescaled so that it is copied exactly, and kept only if the
    rescaled vector passes the copy test.
    """
    if c.dim != 2:
        raise CfaError("copiable_points requires dim 2")
    M, D = c.mult.array, c.comult.array
    rng = np.random.default_rng(seed)
    best: list[np.ndarray] = []
    for _ in range(8):
        r = rng.normal(size=c.dim) + 1j * rng.normal(size=c.dim)
        left = np.einsum("axy,x->ay", M, r)
        vals, vecs = np.linalg.eig(left)
        cands = [vecs[:, k] for k in range(vecs.shape[1])]
        if abs(vals[0] - vals[1]) <= 1e-6 * max(1.0, abs(vals).max()):
            # defective case: the eigenvector is the range of the nilpotent part
            cands.append(_nilpotent_direction(left))
        found = []
        for v in cands:
            dv = np.einsum("abx,x->ab", D, v)
            vv = np.outer(v, v)
            lam = np.vdot(vv.reshape(-1), dv.reshape(-1)) / np.vdot(vv.reshape(-1), vv.reshape(-1))
            if abs(lam) <= 1e-12:
                continue
            x = lam * v
            resid = _maxabs(np.einsum("abx,x->ab", D, x) - np.outer(x, x))
            if tol.accepts(resid, max(1.0, np.linalg.norm(x) ** 2)):
                found.append(x)
        found = _dedupe(found, 1e-6)
        if len(found) > len(best):
            best = found
        # distinct eigenvalues mean the random element was generic enough
        if len(found) == c.dim or abs(vals[0] - vals[1]) > 1e-3 * max(1.0, abs(vals).max()):
            break
    best.sort(key=lambda x: (-round(abs(x[0]) / np.linalg.norm(x), 9), float(np.angle(x[1]))))
    return [Tensor(x, 1, 0, c.dim) for x in best]


# ---------------------------------------------------------------- states and algebras


def state_from_cfa(c: CFA) -> tuple[Tensor, Tensor, Tensor]:
    """``(Psi, Phi, xi)``: the three-legged spider, the cap and the counit."""
    return spider(c, 0, 3), c.cap, c.counit


def compact_partner(t: Tensor, tol: Tolerance = DEFAULT_TOL) -> Tensor:
    """The unique bipartite tensor forming a compact structure with ``t``.

    A bipartite state gives an effect and vice versa; both are the inverse of
    the ``dim x dim`` reshape.
    """
    if t.arity == (0, 2):
        mat = t.array
        out_shape = (2, 0)
    elif t.arity == (2, 0):
        mat = t.array
        out_shape = (0, 2)
    else:
        raise CfaError("compact_partner expects a bipartite state or effect")
    if abs(np.linalg.det(mat)) <= tol.bound(np.linalg.norm(mat) ** 2):
        raise CfaError("degenerate bipartite tensor has no compact partner")
    inv = np.linalg.inv(mat)
    return Tensor(inv, out_shape[1], out_shape[0], t.dim)


def contract_leg(psi: Tensor, xi: Tensor, leg: int = 0) -> Tensor:
    """Plug the one-leg effect ``xi`` into leg ``leg`` of the state ``psi``."""
    if xi.arity != (1, 0) or psi.in_arity != 0:
        raise CfaError("contract_leg expects a state and a one-leg effect")
    arr = np.tensordot(xi.array, psi.array, axes=([0], [leg]))
    return Tensor(arr, psi.out_arity - 1, 0, psi.dim)


def cfa_from_state(psi: Tensor, xi: Tensor, name: str = "induced", tol: Tolerance = DEFAULT_TOL) -> CFA:
    """Build ``(mu, eta, delta, epsilon)`` from a tripartite state and an effect.

    ``cup = (xi (x) 1 (x) 1) psi`` must be invertible. With ``cap`` its compact
    partner: ``delta`` bends the first leg of ``psi`` into an input with
    ``cap``, ``mu`` bends the last two, ``epsilon = xi`` and
    ``eta = (1 (x) xi) cup``.
    """
    if psi.arity != (0, 3) or xi.arity != (1, 0):
        raise CfaError("cfa_from_state expects a 3-leg state and a 1-leg effect")
    cup = contract_leg(psi, xi, 0)
    try:
        cap = compact_partner(cup, tol)
    except CfaError:
        raise CfaError("cup induced by xi is degenerate: state is not strongly maximal at xi") from None
    P, K, C = psi.array, cap.array, cup.array
    comult = np.einsum("xa,abc->bcx", K, P)
    mult = np.einsum("xb,yc,abc->axy", K, K, P)
    unit = np.einsum("ab,b->a", C, xi.array)
    return CFA(
        name,
        Tensor(mult, 1, 2, psi.dim),
        Tensor(unit, 1, 0, psi.dim),
        Tensor(comult, 2, 1, psi.dim),
        xi,
    )


def transport(c: CFA, L, name: str | None = None) -> CFA:
    """Move ``c`` along the change of basis ``L`` (outputs by ``L``, inputs by
    ``L^-1``)."""
    from .tensor import conj_by

    L = np.asarray(L, dtype=complex)
    return CFA(
        name or c.name,
        conj_by(c.mult, L),
        conj_by(c.unit, L),
        conj_by(c.comult, L),
        conj_by(c.counit, L),
    )


# ---------------------------------------------------------------- classification


GHZ3 = state([1, 0, 0, 0, 0, 0, 0, 1])
W3 = state([0, 1, 1, 0, 1, 0, 0, 0])


def _unit_phase(v: np.ndarray) -> np.ndarray:
    v = v / np.linalg.norm(v)
    k = int(np.argmax(np.abs(v) + 1e-12 * np.arange(len(v))[::-1]))
    return v * np.exp(-1j * np.angle(v[k]))


def _is_symmetric(psi: Tensor, tol: Tolerance) -> bool:
    from itertools import permutations

    a = psi.array
    scale = psi.norm()
    return all(
        tol.accepts(_maxabs(a - a.transpose(p)), scale) for p in permutations(range(a.ndim))
    )


def _maximal_witness(psi: Tensor, seed: int = 0) -> Tensor:
    """An effect ``xi`` making the leg-0 contraction of ``psi`` invertible."""
    cands = [[1, 1], [1, 0], [0, 1], [1, -1]]
    rng = np.random.default_rng(seed)
    cands += [list(rng.normal(size=2) + 1j * rng.normal(size=2)) for _ in range(8)]
    scale = psi.norm() ** 2
    best, best_det = None, 0.0
    for cnd in cands:
        xi = effect(cnd)
        d = abs(np.linalg.det(contract_leg(psi, xi).array)) / max(np.linalg.norm(cnd) ** 2, 1e-300)
        if d > best_det:
            best, best_det = xi, d
        if d > 1e-3 * scale:
            return xi
    if best is None or best_det <= 1e-12 * scale:
        raise CfaError("state is not strongly maximal on its first leg")
    return best


def ghz_normalize(psi: Tensor, tol: Tolerance = DEFAULT_TOL, seed: int = 0) -> tuple[np.ndarray, complex]:
    """Return ``(L, lam)`` with ``psi = lam * (L (x) L (x) L)|GHZ>``.

    The columns of ``L`` are the copiable points of the comultiplication
    induced by ``psi``; the first column absorbs the ratio of the two
    weights so that a single scalar remains.
    """
    from .slocc import tripartite_classify

    if psi.arity != (0, 3) or psi.dim != 2:
        raise CfaError("ghz_normalize expects a qubit tripartite state")
    label = tripartite_classify(psi, tol)
    if label.leaf != "ghz":
        raise CfaError(f"wrong class: state is {label}, not ghz")
    if not _is_symmetric(psi, Tolerance(1e-8, 1e-8)):
        raise CfaError("ghz_normalize expects a symmetric state")
    xi = _maximal_witness(psi, seed)
    induced = cfa_from_state(psi, xi, tol=Tolerance(1e-12, 1e-12))
    pts = copiable_points(induced, seed=seed, tol=Tolerance(1e-7, 1e-7))
    if len(pts) != 2:
        raise CfaError("could not find two copiable points")
    e0, e1 = (_unit_phase(p.entries) for p in pts)
    basis = np.stack([np.einsum("a,b,c->abc", e, e, e).reshape(-1) for e in (e0, e1)], axis=1)
    coef, *_ = np.linalg.lstsq(basis, psi.entries, rcond=None)
    c0, c1 = coef
    if abs(c0) == 0 or abs(c1) == 0:
        raise CfaError("degenerate GHZ decomposition")
    L = np.stack([e0 * (c0 / c1) ** (1 / 3), e1], axis=1)
    lam = complex(c1)
    rebuilt = lam * _uniform_apply(L, GHZ3)
    if not rebuilt.allclose(psi, Tolerance(max(tol.abs_eps, 1e-8), max(tol.rel_eps, 1e-8))):
        raise CfaError("GHZ normalization failed its residual check")
    return L, lam


def _uniform_apply(L: np.ndarray, t: Tensor) -> Tensor:
    from .tensor import apply_local

    return apply_local(t, [L] * t.out_arity)


def w_uniform_normalize(psi: Tensor, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Closed form ``L`` with ``psi = (L (x) L (x) L)|W>`` for symmetric W-class
    states.

    The leg-0 contraction determinant is a binary quadratic form in the
    effect; for the W class it is a perfect square whose root direction is
    ``L|0>``. Writing ``psi`` in a basis adapted to that direction gives
    ``L|1>``.
    """
    if psi.arity != (0, 3) or psi.dim != 2:
        raise CfaError("w_uniform_normalize expects a qubit tripartite state")
    P = psi.array
    A0, A1 = P[0], P[1]
    d0, d1 = np.linalg.det(A0), np.linalg.det(A1)
    d01 = (np.linalg.det(A0 + A1) - d0 - d1) / 2
    Q = np.array([[d0, d01], [d01, d1]])
    if _maxabs(Q) <= tol.bound(psi.norm() ** 2):
        raise CfaError("contraction determinant vanishes: state is not W-class")
    col = Q[:, int(np.argmax(np.linalg.norm(Q, axis=0)))]
    u = _unit_phase(col)
    w = np.array([-np.conj(u[1]), np.conj(u[0])])
    B = np.stack([u, w], axis=1)
    Pp = _uniform_apply(np.linalg.inv(B), psi).array
    gamma, beta = Pp[0, 0, 1], Pp[0, 0, 0] / 3
    if abs(gamma) <= tol.bound(psi.norm()):
        raise CfaError("state is not W-class")
    L = np.stack([u, beta * u + gamma * w], axis=1)
    if not _uniform_apply(L, W3).allclose(psi, Tolerance(max(tol.abs_eps, 1e-8), max(tol.rel_eps, 1e-8))):
        raise CfaError("W normalization failed its residual check")
    return L


def w_normalize(c: CFA, tol: Tolerance = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Local maps ``(L1, L2, L3)`` with ``(L1 (x) L2 (x) L3)(delta (x) 1) delta eta``
    proportional to ``|W>``, for an anti-special algebra on qubits.

    Follows the construction through the normalised lolli ``t``: ``delta t =
    a tt``, ``delta t_perp = d(st + t t_perp)`` with ``d = 1 - a``, and the two
    slices of ``delta eta`` give ``s'`` and ``t'``.
    """
    if c.dim != 2:
        raise CfaError("w_normalize requires dim 2")
    if check_special(c, tol):
        raise CfaError("wrong class: algebra is special")
    lolli = c.lolli.entries
    nl = np.linalg.norm(lolli)
    if nl <= tol.abs_eps:
        raise CfaError("lolli vanishes")
    D = c.comult.array / nl
    t = lolli / nl
    tp = np.array([-np.conj(t[1]), np.conj(t[0])])

    def delta(v):
        return np.einsum("abx,x->ab", D, v)

    dt = delta(t)
    a = np.conj(t) @ dt @ np.conj(t)
    if _maxabs(dt - a * np.outer(t, t)) > tol.bound(1.0):
        raise CfaError("lolli is not copied: algebra is not anti-special")
    d = 1 - a
    if abs(d) <= tol.abs_eps:
        raise CfaError("d = 0: comultiplication is separable")
    if abs(a) <= tol.abs_eps:
        raise CfaError("a = 0: lolli is annihilated")
    psi = delta(tp)
    u = psi @ np.conj(t)
    s = u / d
    if abs(s @ np.conj(tp)) <= tol.abs_eps * max(1.0, np.linalg.norm(s)):
        raise CfaError("s is proportional to t: comultiplication is separable")
    de = np.einsum("abx,x->ab", D, c.unit.entries)
    s_p = a * (np.conj(t) @ de)
    t_p = d * (np.conj(tp) @ de)
    M3 = np.stack([t_p, s_p], axis=1)
    if abs(np.linalg.det(M3)) <= tol.abs_eps * max(1.0, np.linalg.norm(M3) ** 2):
        raise CfaError("s' and t' are proportional")
    L1 = np.linalg.inv(np.stack([t, s], axis=1))
    L2 = np.linalg.inv(np.stack([t, tp], axis=1))
    L3 = np.linalg.inv(M3)
    return L1, L2, L3


@dataclass(frozen=True)
class CfaClassification:
    kind: str  # "ghz" or "w"
    L: np.ndarray
    normalized: CFA
    lam: complex = 1.0
    residual: float = 0.0
    extra: dict = field(default_factory=dict)


def classify_cfa(c: CFA, tol: Tolerance = DEFAULT_TOL, seed: int = 0) -> CfaClassification:
    """Decide GHZ- or W-class and produce the locally equivalent special or
    anti-special algebra.

    The induced state ``S^0_3`` is kept; a new counit is chosen from the
    constructive normal form, giving a new cup. ``L`` (old cap after new cup)
    relates the two: ``delta' = delta L^-1`` and ``mu' = mu (L^-1 (x) L^-1)``.
    """
    from .slocc import tripartite_classify

    if c.dim != 2:
        raise CfaError("classify_cfa requires dim 2")
    psi = spider(c, 0, 3)
    label = tripartite_classify(psi, tol)
    if label.leaf == "ghz":
        Lg, lam = ghz_normalize(psi, tol, seed)
        Lg = Lg * lam ** (1 / 3)
        xi_new = compose(effect([1, 1]), Tensor(np.linalg.inv(Lg), 1, 1))
        kind = "ghz"
    elif label.leaf == "w":
        Lw = w_uniform_normalize(psi, tol)
        xi_new = compose(effect([1, 0]), Tensor(np.linalg.inv(Lw), 1, 1))
        kind = "w"
    else:
        raise CfaError(f"induced state is {label}: not a valid CFA on C^2")
    new = cfa_from_state(psi, xi_new, name=f"{c.name}_{'special' if kind == 'ghz' else 'antispecial'}")
    L = np.einsum("xa,ay->yx", c.cap.array, new.cup.array)
    Li = np.linalg.inv(L)
    mu2 = np.einsum("axy,xp,yq->apq", c.mult.array, Li, Li)
    de2 = np.einsum("abx,xp->abp", c.comult.array, Li)
    residual = max(_maxabs(mu2 - new.mult.array), _maxabs(de2 - new.comult.array))
    ok = check_special(new, tol) if kind == "ghz" else check_antispecial(new, tol)
    if not ok:
        raise CfaError("normalised algebra failed its (anti-)special check")
    return CfaClassification(kind, L, new, residual=residual)


def extend_to_cfa(mult: Tensor, unit: Tensor, name: str = "extended", tol: Tolerance = DEFAULT_TOL) -> CFA:
    """Find a counit and comultiplication extending a unital algebra on C^2."""
    from .slocc import tripartite_classify

    if mult.arity != (2, 1) or unit.arity != (0, 1) or mult.dim != 2:
        raise CfaError("extend_to_cfa expects a qubit multiplication and unit")
    M, e = mult.array, unit.array
    assoc = _maxabs(np.einsum("akz,kxy->axyz", M, M) - np.einsum("axk,kyz->axyz", M, M))
    unit_res = max(
        _maxabs(np.einsum("akx,k->ax", M, e) - np.eye(2)),
        _maxabs(np.einsum("axk,k->ax", M, e) - np.eye(2)),
    )
    scale = max(1.0, float(np.linalg.norm(M)) ** 2)
    if not (tol.accepts(assoc, scale) and tol.accepts(unit_res, scale)):
        raise CfaError("not an associative unital algebra")
    label = tripartite_classify(Tensor(M, 3, 0), tol)
    # left multiplication by a generic element: eigenvectors are idempotent
    # directions (semisimple case) or the nilpotent direction
    rng = np.random.default_rng(0)
    r = rng.normal(size=2) + 1j * rng.normal(size=2)
    left = np.einsum("axy,x->ay", M, r)
    if label.leaf == "ghz":
        _, vecs = np.linalg.eig(left)
        cols = []
        for k in range(2):
            v = vecs[:, k]
            vv = np.einsum("axy,x,y->a", M, v, v)
            lam = np.vdot(v, vv) / np.vdot(v, v)
            cols.append(v / lam)
        L1 = np.stack(cols, axis=1)
        base = [1, 1]
    elif label.leaf == "w":
        n = _nilpotent_direction(left)
        L1 = np.stack([e, n], axis=1)
        base = [0, 1]
    else:
        raise CfaError(f"multiplication tensor is {label}: cannot be unital")
    counit = compose(effect(base), Tensor(np.linalg.inv(L1), 1, 1))
    cap = compose(counit, mult)
    cup = compact_partner(cap, tol)
    comult = np.einsum("axk,kb->abx", M, cup.array)
    c = CFA(name, mult, unit, Tensor(comult, 2, 1), counit)
    report = check_cfa(c, Tolerance(max(tol.abs_eps, 1e-8), max(tol.rel_eps, 1e-8)))
    if not report.passed:
        raise CfaError(f"extension failed axioms {report.failures}")
    return c
