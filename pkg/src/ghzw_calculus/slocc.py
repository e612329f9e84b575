"""SLOCC classification of small qubit states.

States are 0-input tensors in big-endian qubit order (qubit 1 is the first
leg and the most significant bit of the amplitude index).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import permutations
from typing import Sequence

import numpy as np
from scipy.optimize import least_squares

from .tensor import (
    DEFAULT_TOL,
    Tensor,
    TensorError,
    Tolerance,
    apply_local,
    effect,
    proportionality_residual,
    right_singular_space,
    state,
)

__all__ = [
    "SloccLabel",
    "SloccError",
    "MaximalityWitness",
    "hyperdeterminant",
    "reduced_ranks",
    "tripartite_classify",
    "bipartite_maximal",
    "strong_maximal",
    "strong_symmetric",
    "is_frobenius_state",
    "uniform_L_solve",
    "local_equivalence",
    "superclass_label",
    "ghz_state",
    "w_state",
    "state_to_json",
    "state_from_json",
]


class SloccError(ValueError):
    pass


# ---------------------------------------------------------------- labels

_LEAF_RANK = {"zero": -1, "qubit": 0, "product": 0, "bell": 1, "bisep": 1, "w": 2, "ghz": 3}


@dataclass(frozen=True)
class SloccLabel:
    """A leaf class, or an unordered pair (or singleton) of sub-labels."""

    leaf: str | None = None
    position: int | None = None
    children: tuple["SloccLabel", ...] = ()

    @classmethod
    def make_leaf(cls, name: str, position: int | None = None) -> "SloccLabel":
        if name not in _LEAF_RANK:
            raise SloccError(f"unknown leaf {name!r}")
        return cls(leaf=name, position=position)

    @classmethod
    def node(cls, *children: "SloccLabel") -> "SloccLabel":
        if not 1 <= len(children) <= 2:
            raise SloccError("a superclass node has one or two children")
        return cls(children=tuple(sorted(children, key=lambda c: c.sort_key())))

    @property
    def is_leaf(self) -> bool:
        return self.leaf is not None

    def sort_key(self):
        if self.is_leaf:
            return (0, _LEAF_RANK[self.leaf], self.position or 0, self.leaf, ())
        return (1, 0, 0, "", tuple(c.sort_key() for c in self.children))

    def leaves(self) -> list["SloccLabel"]:
        if self.is_leaf:
            return [self]
        return [x for c in self.children for x in c.leaves()]

    def __str__(self):
        if self.is_leaf:
            return f"{self.leaf}({self.position})" if self.position is not None else self.leaf
        return "{" + ", ".join(str(c) for c in self.children) + "}"

    def to_json(self):
        if self.is_leaf:
            return {"leaf": self.leaf, "position": self.position}
        return {"pair": [c.to_json() for c in self.children]}


def _leaf(name, position=None):
    return SloccLabel.make_leaf(name, position)


# ---------------------------------------------------------------- standard states


def ghz_state(n: int) -> Tensor:
    amps = np.zeros(2**n, dtype=complex)
    amps[0] = amps[-1] = 1
    return state(amps)


def w_state(n: int) -> Tensor:
    amps = np.zeros(2**n, dtype=complex)
    for k in range(n):
        amps[1 << k] = 1
    return state(amps)


def state_to_json(t: Tensor) -> dict:
    if t.in_arity != 0 or t.dim != 2:
        raise SloccError("state JSON holds qubit states only")
    return {"n": t.out_arity, "amplitudes": [[float(z.real), float(z.imag)] for z in t.entries]}


def state_from_json(obj) -> Tensor:
    if isinstance(obj, str):
        obj = json.loads(obj)
    try:
        n = int(obj["n"])
        amps = [complex(re, im) for re, im in obj["amplitudes"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise SloccError(f"malformed state JSON: {exc}") from exc
    if len(amps) != 2**n:
        raise SloccError(f"expected {2**n} amplitudes, got {len(amps)}")
    return Tensor(amps, n, 0, 2)


def _check_state(t: Tensor, n: int | None = None):
    if t.in_arity != 0 or t.dim != 2:
        raise SloccError("expected a qubit state")
    if n is not None and t.out_arity != n:
        raise SloccError(f"expected a {n}-qubit state, got {t.out_arity}")


# ---------------------------------------------------------------- tripartite invariants

# Cayley's 2x2x2 hyperdeterminant as a list of (coefficient, four indices)
_HD_TERMS = [
    (1, (0, 0, 7, 7)),
    (1, (1, 1, 6, 6)),
    (1, (2, 2, 5, 5)),
    (1, (4, 4, 3, 3)),
    (-2, (0, 1, 6, 7)),
    (-2, (0, 2, 5, 7)),
    (-2, (0, 4, 3, 7)),
    (-2, (1, 2, 5, 6)),
    (-2, (1, 4, 3, 6)),
    (-2, (2, 4, 3, 5)),
    (4, (0, 3, 5, 6)),
    (4, (1, 2, 4, 7)),
]


def hyperdeterminant(t: Tensor) -> complex:
    _check_state(t, 3)
    a = t.entries
    return complex(sum(c * a[i] * a[j] * a[k] * a[l] for c, (i, j, k, l) in _HD_TERMS))


def reduced_ranks(t: Tensor, tol: Tolerance = DEFAULT_TOL, rank_eps: float = 1e-9) -> list[int]:
    """Rank of each one-qubit versus rest reshape."""
    ranks = []
    arr = t.array
    for leg in range(t.out_arity):
        m = np.moveaxis(arr, leg, 0).reshape(2, -1)
        s = np.linalg.svd(m, compute_uv=False)
        if s[0] <= tol.abs_eps:
            ranks.append(0)
        else:
            ranks.append(int(np.sum(s > max(rank_eps, tol.rel_eps) * s[0])))
    return ranks


def tripartite_classify(t: Tensor, tol: Tolerance = DEFAULT_TOL, hd_eps: float = 1e-12) -> SloccLabel:
    """ghz, w, bisep(i), product or zero for a three-qubit state.

    ``hd_eps`` bounds ``|hyperdet| / |t|^4`` below which the hyperdeterminant
    counts as zero.
    """
    _check_state(t, 3)
    nrm = t.norm()
    if nrm <= tol.abs_eps:
        return _leaf("zero")
    ranks = reduced_ranks(t, tol)
    if abs(hyperdeterminant(t)) > hd_eps * nrm**4 and all(r == 2 for r in ranks):
        return _leaf("ghz")
    ones = [i for i, r in enumerate(ranks) if r == 1]
    if not ones:
        return _leaf("w")
    if len(ones) == 1:
        return _leaf("bisep", ones[0] + 1)
    return _leaf("product")


# ---------------------------------------------------------------- maximality


@dataclass(frozen=True)
class MaximalityWitness:
    leg: int
    xi: Tensor
    phi: Tensor
    snake_residual: float


def bipartite_maximal(psi: Tensor, tol: Tolerance = DEFAULT_TOL) -> Tensor | None:
    """The effect ``Phi`` forming a compact structure with ``psi``, if any."""
    from .cfa import CfaError, compact_partner

    _check_state(psi, 2)
    try:
        return compact_partner(psi, tol)
    except CfaError:
        return None


def _snake(cup: Tensor, cap: Tensor) -> float:
    m = np.einsum("xa,ay->yx", cap.array, cup.array)
    return float(np.max(np.abs(m - np.eye(2))))


def _leg_contraction(psi: Tensor, xi: Tensor, leg: int) -> Tensor:
    from .cfa import contract_leg

    return contract_leg(psi, xi, leg)


def _quadratic_coefficients(psi: Tensor, leg: int) -> tuple[complex, complex, complex]:
    """Coefficients of ``det((xi on leg) psi)`` as a form in ``(xi0, xi1)``."""
    arr = np.moveaxis(psi.array, leg, 0)
    d0, d1 = np.linalg.det(arr[0]), np.linalg.det(arr[1])
    cross = np.linalg.det(arr[0] + arr[1]) - d0 - d1
    return complex(d0), complex(cross), complex(d1)


_WITNESS_CANDIDATES = ([1, 1], [1, 0], [0, 1], [1, -1])


def strong_maximal(
    psi: Tensor,
    candidates: Sequence[Sequence[complex]] | None = None,
    tol: Tolerance = DEFAULT_TOL,
) -> list[MaximalityWitness] | None:
    """Per-leg witnesses ``xi`` making the contracted bipartite state maximal.

    Existence on a leg is decided from the three coefficients of the
    determinant form. ``candidates`` (effect coefficient lists) are tried
    first when choosing the witness.
    """
    from .cfa import compact_partner

    _check_state(psi, 3)
    scale = psi.norm() ** 2
    if scale == 0:
        return None
    cands = list(candidates or []) + list(_WITNESS_CANDIDATES)
    out = []
    for leg in range(3):
        coeffs = _quadratic_coefficients(psi, leg)
        if max(abs(c) for c in coeffs) <= tol.bound(scale):
            return None
        chosen = None
        for cnd in cands:
            xi = effect(cnd)
            det = np.linalg.det(_leg_contraction(psi, xi, leg).array)
            if abs(det) > tol.bound(scale * float(np.linalg.norm(cnd)) ** 2):
                chosen = xi
                break
        if chosen is None:  # cannot happen for a nonzero binary quadratic form
            raise SloccError("no witness among candidates")
        cup = _leg_contraction(psi, chosen, leg)
        phi = compact_partner(cup, tol)
        out.append(MaximalityWitness(leg, chosen, phi, _snake(cup, phi)))
    return out


def is_symmetric(psi: Tensor, tol: Tolerance = DEFAULT_TOL) -> bool:
    arr = psi.array
    scale = psi.norm()
    n = arr.ndim
    gens = [tuple(range(k)) + (k + 1, k) + tuple(range(k + 2, n)) for k in range(n - 1)]
    return all(np.max(np.abs(arr - arr.transpose(p))) <= tol.bound(scale) for p in gens)


def _glue(psi: Tensor, partner: Tensor, phi: np.ndarray) -> np.ndarray:
    """``(1..1 (x) Phi (x) 1..1)(psi (x) partner)`` as an array."""
    a = np.tensordot(psi.array, phi, axes=([psi.out_arity - 1], [0]))
    return np.tensordot(a, partner.array, axes=([a.ndim - 1], [0]))


def glue(psi: Tensor, partner: Tensor, phi: Tensor) -> Tensor:
    if phi.arity != (2, 0):
        raise SloccError("glue effect must be bipartite")
    arr = _glue(psi, partner, phi.array)
    return Tensor(arr, arr.ndim, 0, 2)


def _symmetry_defect(arr: np.ndarray) -> float:
    n = arr.ndim
    worst = 0.0
    for k in range(n - 1):
        p = list(range(n))
        p[k], p[k + 1] = p[k + 1], p[k]
        worst = max(worst, float(np.max(np.abs(arr - arr.transpose(p)))))
    return worst


def strong_symmetric(
    psi: Tensor,
    partner: Tensor | None = None,
    phi: Tensor | None = None,
    tol: Tolerance = DEFAULT_TOL,
) -> Tensor | None:
    """A bipartite effect gluing ``psi`` to ``partner`` (default: ``psi``) into a
    nonzero symmetric state.

    Symmetry is linear in ``Phi``; the admissible effects form the nullspace of
    the stacked adjacent-transposition constraints. Preference goes to the
    compact partners of the maximality witnesses, then to the nullspace
    element with the largest determinant, then to any with a nonzero glue.
    """
    _check_state(psi)
    partner = psi if partner is None else partner
    _check_state(partner)
    for t in (psi, partner):
        if not is_symmetric(t, tol):
            raise SloccError("strong_symmetric expects symmetric states")
    scale = psi.norm() * partner.norm()

    def admissible(p: np.ndarray) -> bool:
        g = _glue(psi, partner, p)
        gn = float(np.linalg.norm(g))
        return gn > tol.bound(scale * np.linalg.norm(p)) and _symmetry_defect(g) <= tol.bound(gn)

    if phi is not None:
        return phi if admissible(phi.array) else None

    basis = np.eye(4).reshape(4, 2, 2)
    cols = []
    for b in basis:
        g = _glue(psi, partner, b)
        n = g.ndim
        blocks = []
        for k in range(n - 1):
            p = list(range(n))
            p[k], p[k + 1] = p[k + 1], p[k]
            blocks.append((g.transpose(p) - g).reshape(-1))
        cols.append(np.concatenate(blocks) if blocks else np.zeros(1))
    A = np.stack(cols, axis=1)
    _, s, vh = np.linalg.svd(A)
    s_full = np.concatenate([s, np.zeros(4 - len(s))])
    null = [vh[k].conj().reshape(2, 2) for k in range(4) if s_full[k] <= tol.bound(max(1.0, s_full[0]))]
    if not null:
        return None

    cands: list[np.ndarray] = []
    if psi.out_arity == 3:
        wit = strong_maximal(psi, tol=tol)
        if wit:
            cands.append(wit[0].phi.array)
    for p in cands:
        if admissible(p):
            return Tensor(p, 0, 2, 2)
    # the null space element with the most invertible Phi
    rng = np.random.default_rng(0)
    pool = list(null)
    if len(null) > 1:
        pool += [sum(v * c for v, c in zip(null, rng.normal(size=len(null)))) for _ in range(16)]
        pool += [null[0] + null[1]]
    pool = [p / np.linalg.norm(p) for p in pool if np.linalg.norm(p) > 0]
    pool.sort(key=lambda p: -abs(np.linalg.det(p)))
    for p in pool:
        if admissible(p):
            return Tensor(p, 0, 2, 2)
    pool.sort(key=lambda p: -np.linalg.norm(_glue(psi, partner, p)))
    for p in pool:
        if admissible(p):
            return Tensor(p, 0, 2, 2)
    return None


def is_frobenius_state(
    psi: Tensor, tol: Tolerance = DEFAULT_TOL, seed: int = 0, n_random: int = 32
) -> tuple[Tensor, Tensor] | None:
    """``(Phi, xi)`` exhibiting ``psi`` as a Frobenius state, or None.

    Candidate counits: the transported canonical counit for the class of
    ``psi``, then ``n_random`` seeded random effects. Each candidate is
    accepted when the algebra it induces passes every CFA axiom and the
    induced cap glues ``psi`` symmetrically.
    """
    from .cfa import CfaError, check_cfa, cfa_from_state, ghz_normalize, w_uniform_normalize

    _check_state(psi, 3)
    if not is_symmetric(psi, tol):
        return None
    label = tripartite_classify(psi, tol)
    cands: list[np.ndarray] = []
    try:
        if label.leaf == "ghz":
            L, lam = ghz_normalize(psi, tol, seed)
            L = L * lam ** (1 / 3)
            cands.append(np.array([1, 1]) @ np.linalg.inv(L))
        elif label.leaf == "w":
            L = w_uniform_normalize(psi, tol)
            cands.append(np.array([1, 0]) @ np.linalg.inv(L))
    except CfaError:
        pass
    rng = np.random.default_rng(seed)
    cands += [rng.normal(size=2) + 1j * rng.normal(size=2) for _ in range(n_random)]
    check_tol = Tolerance(max(tol.abs_eps, 1e-8), max(tol.rel_eps, 1e-8))
    for c in cands:
        xi = effect(c)
        try:
            alg = cfa_from_state(psi, xi, tol=tol)
        except CfaError:
            continue
        scale = max(1.0, max(t.norm() for t in alg.tensors().values()) ** 2)
        report = check_cfa(alg)
        if not all(check_tol.accepts(r, scale) for r in report.residuals.values()):
            continue
        if strong_symmetric(psi, phi=alg.cap, tol=check_tol) is None:
            continue
        return alg.cap, xi
    return None


# ---------------------------------------------------------------- local equivalence


def _params_to_maps(x: np.ndarray, k: int) -> list[np.ndarray]:
    z = x[: 4 * k] + 1j * x[4 * k :]
    return [z[4 * i : 4 * i + 4].reshape(2, 2) for i in range(k)]


def _proj_residual_vec(target_u: np.ndarray, v: np.ndarray) -> np.ndarray:
    nv = np.linalg.norm(v)
    if nv == 0:
        return np.ones(2 * v.size)
    vu = v / nv
    r = vu - np.vdot(target_u, vu) * target_u
    return np.concatenate([r.real, r.imag])


def local_equivalence(
    a: Tensor,
    b: Tensor,
    uniform: bool = False,
    seed: int = 0,
    restarts: int = 12,
    tol: Tolerance = DEFAULT_TOL,
) -> tuple[list[np.ndarray], float] | None:
    """Search local maps with ``a`` proportional to ``(L1 (x) ... (x) Ln) b``.

    Returns the maps and the certified residual, or None when the search
    finds nothing acceptable. A returned answer is always checked.
    """
    _check_state(a)
    _check_state(b, a.out_arity)
    n = a.out_arity
    au = a.entries / np.linalg.norm(a.entries)
    k = 1 if uniform else n

    def maps_of(x):
        ms = _params_to_maps(x, k)
        return ms * n if uniform else ms

    def fun(x):
        return _proj_residual_vec(au, apply_local(b, maps_of(x)).entries)

    rng = np.random.default_rng(seed)
    starts = [np.concatenate([np.tile(np.eye(2).reshape(-1), k), np.zeros(4 * k)])]
    starts += [rng.normal(size=8 * k) for _ in range(restarts)]
    best = None
    for x0 in starts:
        try:
            sol = least_squares(fun, x0, xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=4000)
        except (ValueError, np.linalg.LinAlgError):
            continue
        maps = maps_of(sol.x)
        if any(abs(np.linalg.det(m)) < 1e-10 * max(1.0, np.linalg.norm(m) ** 2) for m in maps):
            continue
        res = proportionality_residual(a, apply_local(b, maps))
        if best is None or res < best[1]:
            best = (maps, res)
        if res <= tol.bound(1.0):
            break
    if best is None or best[1] > tol.bound(1.0):
        return None
    return best


def uniform_L_solve(
    psi: Tensor, phi: Tensor, tol: Tolerance = DEFAULT_TOL, seed: int = 0
) -> np.ndarray | None:
    """Invertible ``L`` with ``L^(x)N phi`` proportional to ``psi``.

    Closed forms cover ``N = 3`` with ``phi`` proportional to GHZ or W;
    otherwise a seeded multi-start least-squares search runs. Every returned
    map has passed the proportionality certificate.
    """
    from .cfa import CfaError, ghz_normalize, w_uniform_normalize

    _check_state(psi)
    _check_state(phi, psi.out_arity)
    for t in (psi, phi):
        if not is_symmetric(t, Tolerance(1e-8, 1e-8)):
            raise SloccError("uniform_L_solve expects symmetric states")
    n = psi.out_arity
    cert = Tolerance(max(tol.abs_eps, 1e-8), 0.0)

    def certified(L) -> bool:
        if abs(np.linalg.det(L)) <= 1e-12 * max(1.0, np.linalg.norm(L) ** 2):
            return False
        return proportionality_residual(psi, apply_local(phi, [L] * n)) <= cert.abs_eps

    if n == 3:
        try:
            if proportionality_residual(phi, ghz_state(3)) <= 1e-12:
                L, lam = ghz_normalize(psi, tol, seed)
                if certified(L):
                    return L
            if proportionality_residual(phi, w_state(3)) <= 1e-12:
                L = w_uniform_normalize(psi, tol)
                if certified(L):
                    return L
        except CfaError:
            pass
    found = local_equivalence(psi, phi, uniform=True, seed=seed, tol=cert)
    if found is None:
        return None
    L = found[0][0]
    return L if certified(L) else None


# ---------------------------------------------------------------- superclasses

_GENERIC_SEED = 12345


def _bipartite_label(t: Tensor, tol: Tolerance) -> SloccLabel:
    m = t.entries.reshape(2, 2)
    s = np.linalg.svd(m, compute_uv=False)
    if s[0] <= tol.abs_eps:
        return _leaf("zero")
    return _leaf("bell" if s[1] > tol.bound(s[0]) else "product")


def _pencil_roots(qc: np.ndarray, tol: float) -> list[np.ndarray]:
    """Projective roots ``(alpha, beta)`` of a binary form given by
    coefficients of ``alpha^(d-k) beta^k``."""
    qc = np.asarray(qc, dtype=complex)
    scale = np.max(np.abs(qc))
    if scale == 0:
        return []
    d = len(qc) - 1
    nz = np.nonzero(np.abs(qc) > tol * scale)[0]
    roots = []
    # trailing zero coefficients mean alpha divides the form
    last = nz[-1]
    if last < d:
        roots.append(np.array([0.0, 1.0], dtype=complex))
    poly = qc[: last + 1]  # in t = beta/alpha, highest power last
    if len(poly) > 1:
        for r in np.roots(poly[::-1]):
            v = np.array([1.0, r], dtype=complex)
            roots.append(v / np.linalg.norm(v))
    return roots


def _rank_drop_members(basis: Sequence[np.ndarray], tol: float) -> list[np.ndarray]:
    """Members ``alpha s1 + beta s2`` of a pencil of three-qubit states where
    some one-qubit reshape has rank at most one."""
    s1, s2 = (b.reshape(2, 2, 2) for b in basis)
    found: list[np.ndarray] = []
    for leg in range(3):
        A = np.moveaxis(s1, leg, 0).reshape(2, 4)
        B = np.moveaxis(s2, leg, 0).reshape(2, 4)
        # the 2x2 minors of alpha A + beta B, as quadratic forms in (alpha, beta)
        rows = []
        for i in range(4):
            for j in range(i + 1, 4):
                def minor(X, Y):
                    return X[0, i] * Y[1, j] - X[0, j] * Y[1, i]
                c0 = minor(A, A)
                c1 = minor(A, B) + minor(B, A)
                c2 = minor(B, B)
                rows.append([c0, c1, c2])
        C = np.array(rows)
        _, s, vh = np.linalg.svd(C)
        scale = max(s[0], 1e-300)
        rank = int(np.sum(s > tol * scale))
        if rank == 0:
            return []  # every member drops rank on this leg; nothing special
        if rank == 3:
            continue
        if rank == 2:
            v = vh[2].conj()
            # v must look like (alpha^2, alpha beta, beta^2)
            if abs(v[0]) >= abs(v[2]):
                cand = np.array([v[0], v[1]])
            else:
                cand = np.array([v[1], v[2]])
            if np.linalg.norm(cand) > 0:
                cand = cand / np.linalg.norm(cand)
                vec = np.array([cand[0] ** 2, cand[0] * cand[1], cand[1] ** 2])
                if np.linalg.norm(C @ vec) <= 1e-6 * scale:
                    found.append(cand)
        else:  # one independent quadratic
            found.extend(_pencil_roots(C[np.argmax(np.linalg.norm(C, axis=1))], 1e-9))
    return found


def _same_point(p: np.ndarray, q: np.ndarray, eps: float = 1e-5) -> bool:
    return abs(abs(np.vdot(p, q)) - 1) < eps


def _pencil_label(basis: list[np.ndarray], tol: Tolerance) -> SloccLabel:
    """Canonical label of a two-dimensional span of three-qubit states.

    The label is invariant under local maps: it records the class of a
    generic member together with the members of strictly lower class, which
    are located exactly from rank drops and hyperdeterminant roots.
    """
    s1, s2 = basis
    rng = np.random.default_rng(_GENERIC_SEED)
    ab = rng.normal(size=2) + 1j * rng.normal(size=2)
    generic = tripartite_classify(state(ab[0] * s1 + ab[1] * s2), tol)

    members: list[np.ndarray] = []
    for p in _rank_drop_members(basis, 1e-9):
        if not any(_same_point(p, q) for q in members):
            members.append(p)
    specials: list[SloccLabel] = []
    for p in members:
        lab = tripartite_classify(state(p[0] * s1 + p[1] * s2), Tolerance(1e-9, 1e-7))
        specials.append(lab)
    if generic.leaf == "ghz":
        # W-class members sit at hyperdeterminant roots away from rank drops
        ts = np.array([0.0, 0.5, 1.0, 1.5, 2.0])
        vals = []
        for t in ts:
            v = state(s1 + t * s2)
            vals.append(hyperdeterminant(v))
        V = np.vander(ts, 5, increasing=True)
        coef = np.linalg.solve(V, np.array(vals))  # hd(alpha=1, beta=t)
        roots = _pencil_roots(coef, 1e-10)
        distinct: list[np.ndarray] = []
        for r in roots:
            if not any(_same_point(r, q, 1e-4) for q in distinct):
                distinct.append(r)
        for r in distinct:
            if any(_same_point(r, q, 1e-4) for q in members):
                continue
            specials.append(_leaf("w"))
    specials = [s for s in specials if _LEAF_RANK[s.leaf] < _LEAF_RANK[generic.leaf]]
    specials.sort(key=lambda s: s.sort_key())
    if len(specials) >= 2:
        return SloccLabel.node(specials[0], specials[1])
    if len(specials) == 1:
        return SloccLabel.node(generic, specials[0])
    return SloccLabel.node(generic, generic)


def superclass_label(psi: Tensor, tol: Tolerance = DEFAULT_TOL) -> SloccLabel:
    """Recursive superclass label from the right singular subspace.

    Two qubits: product or bell. Three: :func:`tripartite_classify`. More:
    the span of the right singular vectors of the ``2 x 2^(N-1)`` reshape,
    labelled by its spanning states. For four qubits the spanning pair is
    canonicalised inside the span (see :func:`_pencil_label`) so the label
    does not depend on the local frame of qubits 2..4; beyond that the
    singular vectors themselves are labelled recursively.
    """
    _check_state(psi)
    n = psi.out_arity
    if n < 2:
        raise SloccError("superclass_label needs at least two qubits")
    if psi.norm() <= tol.abs_eps:
        raise SloccError("zero state has no superclass")
    if n == 2:
        return _bipartite_label(psi, tol)
    if n == 3:
        return tripartite_classify(psi, tol)
    try:
        vecs = right_singular_space(psi, tol)
    except TensorError as exc:
        raise SloccError(str(exc)) from exc
    if len(vecs) == 1:
        return SloccLabel.node(superclass_label(vecs[0], tol))
    if n == 4:
        return _pencil_label([v.entries for v in vecs], tol)
    return SloccLabel.node(*(superclass_label(v, tol) for v in vecs))
