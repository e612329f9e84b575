"""Dense complex tensors with ordered input and output legs.

A tensor with ``out_arity`` output legs and ``in_arity`` input legs, each of
dimension ``dim``, is stored as a numpy array of shape ``(dim,) * (out + in)``.
Output legs come first, then input legs, and the flattened entries are in
row-major order. Equivalently ``t.matrix`` is the ``dim**out x dim**in``
matrix of the linear map.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Tolerance",
    "DEFAULT_TOL",
    "Tensor",
    "TensorError",
    "kron",
    "compose",
    "swap_legs",
    "proportional",
    "right_singular_space",
    "standard_partial_trace",
    "identity",
    "swap",
    "ket",
    "bra",
    "scalar",
    "state",
    "effect",
    "from_matrix",
    "max_abs_diff",
    "kron_all",
    "inverse_perm",
    "proportionality_residual",
    "conj_by",
    "apply_local",
]


class TensorError(ValueError):
    pass


@dataclass(frozen=True)
class Tolerance:
    abs_eps: float = 1e-9
    rel_eps: float = 1e-9

    def __post_init__(self):
        for v in (self.abs_eps, self.rel_eps):
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"tolerance must be finite and nonnegative, got {v}")

    def bound(self, scale: float = 1.0) -> float:
        return self.abs_eps + self.rel_eps * scale

    def accepts(self, residual: float, scale: float = 1.0) -> bool:
        return residual <= self.bound(scale)


DEFAULT_TOL = Tolerance()


class Tensor:
    """Immutable dense tensor; see the module docstring for the layout."""

    __slots__ = ("_data", "in_arity", "out_arity", "dim")

    def __init__(self, data, out_arity: int, in_arity: int, dim: int = 2):
        if dim < 1 or out_arity < 0 or in_arity < 0:
            raise TensorError("bad tensor shape")
        arr = np.array(data, dtype=complex)
        n = out_arity + in_arity
        if arr.size != dim**n:
            raise TensorError(
                f"expected {dim}**{n} = {dim**n} entries, got {arr.size}"
            )
        arr = arr.reshape((dim,) * n)
        arr.setflags(write=False)
        object.__setattr__(self, "_data", arr)
        object.__setattr__(self, "out_arity", out_arity)
        object.__setattr__(self, "in_arity", in_arity)
        object.__setattr__(self, "dim", dim)

    def __setattr__(self, key, value):
        raise AttributeError("Tensor is immutable")

    @property
    def array(self) -> np.ndarray:
        """Read-only view with one axis per leg (outputs first)."""
        return self._data

    @property
    def entries(self) -> np.ndarray:
        return self._data.reshape(-1)

    @property
    def matrix(self) -> np.ndarray:
        return self._data.reshape(self.dim**self.out_arity, self.dim**self.in_arity)

    @property
    def arity(self) -> tuple[int, int]:
        return (self.in_arity, self.out_arity)

    @property
    def is_scalar(self) -> bool:
        return self.in_arity == 0 and self.out_arity == 0

    def value(self) -> complex:
        if not self.is_scalar:
            raise TensorError("not a scalar")
        return complex(self._data.reshape(()))

    def norm(self) -> float:
        return float(np.linalg.norm(self.entries))

    def __repr__(self):
        return f"Tensor(out={self.out_arity}, in={self.in_arity}, dim={self.dim})"

    # arithmetic helpers, all returning new tensors
    def scale(self, c: complex) -> "Tensor":
        return Tensor(self._data * c, self.out_arity, self.in_arity, self.dim)

    def __mul__(self, c):
        if isinstance(c, Tensor):
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def __add__(self, other: "Tensor") -> "Tensor":
        _check_same_shape(self, other)
        return Tensor(self._data + other._data, self.out_arity, self.in_arity, self.dim)

    def __sub__(self, other: "Tensor") -> "Tensor":
        _check_same_shape(self, other)
        return Tensor(self._data - other._data, self.out_arity, self.in_arity, self.dim)

    def __neg__(self):
        return self.scale(-1)

    def __matmul__(self, other: "Tensor") -> "Tensor":
        """``g @ f`` is ``compose(g, f)``."""
        return compose(self, other)

    def __eq__(self, other):
        if not isinstance(other, Tensor):
            return NotImplemented
        return (
            self.arity == other.arity
            and self.dim == other.dim
            and np.array_equal(self._data, other._data)
        )

    def __hash__(self):
        return hash((self.arity, self.dim, self._data.tobytes()))

    def allclose(self, other: "Tensor", tol: Tolerance = DEFAULT_TOL) -> bool:
        _check_same_shape(self, other)
        scale = max(self.norm(), other.norm())
        return tol.accepts(max_abs_diff(self, other), scale)

    def dagger(self) -> "Tensor":
        return from_matrix(self.matrix.conj().T, self.out_arity, self.in_arity, self.dim)

    def to_json(self) -> dict:
        return {
            "in": self.in_arity,
            "out": self.out_arity,
            "dim": self.dim,
            "entries": [[float(z.real), float(z.imag)] for z in self.entries],
        }

    @classmethod
    def from_json(cls, obj) -> "Tensor":
        if isinstance(obj, str):
            obj = json.loads(obj)
        try:
            n_in, n_out = int(obj["in"]), int(obj["out"])
            dim = int(obj.get("dim", 2))
            entries = [complex(re, im) for re, im in obj["entries"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise TensorError(f"malformed tensor JSON: {exc}") from exc
        return cls(entries, n_out, n_in, dim)


def _check_same_shape(a: Tensor, b: Tensor):
    if a.arity != b.arity or a.dim != b.dim:
        raise TensorError(f"shape mismatch: {a!r} vs {b!r}")


def max_abs_diff(a: Tensor, b: Tensor) -> float:
    _check_same_shape(a, b)
    if a.entries.size == 0:
        return 0.0
    return float(np.max(np.abs(a.entries - b.entries)))


def from_matrix(m, out_arity: int, in_arity: int, dim: int = 2) -> Tensor:
    return Tensor(np.asarray(m, dtype=complex).reshape(-1), out_arity, in_arity, dim)


def scalar(c: complex, dim: int = 2) -> Tensor:
    return Tensor([c], 0, 0, dim)


def identity(n: int = 1, dim: int = 2) -> Tensor:
    return from_matrix(np.eye(dim**n), n, n, dim)


def swap(dim: int = 2) -> Tensor:
    return swap_legs(identity(2, dim), [0, 1], [1, 0])


def _legs_from_bits(bits: str | Sequence[int]) -> list[int]:
    return [int(b) for b in bits]


def ket(bits: str | Sequence[int], dim: int = 2) -> Tensor:
    """Computational basis state, e.g. ``ket("01")``."""
    legs = _legs_from_bits(bits)
    arr = np.zeros((dim,) * len(legs), dtype=complex)
    arr[tuple(legs)] = 1
    return Tensor(arr, len(legs), 0, dim)


def bra(bits: str | Sequence[int], dim: int = 2) -> Tensor:
    legs = _legs_from_bits(bits)
    arr = np.zeros((dim,) * len(legs), dtype=complex)
    arr[tuple(legs)] = 1
    return Tensor(arr, 0, len(legs), dim)


def _legs_for_length(length: int, dim: int) -> int:
    n = round(math.log(length, dim)) if length > 1 else 0
    if dim**n != length:
        raise TensorError(f"length {length} is not a power of {dim}")
    return n


def state(amplitudes: Iterable[complex], dim: int = 2) -> Tensor:
    """State (0 inputs) from a flat amplitude list, big-endian leg order."""
    amps = np.asarray(list(amplitudes), dtype=complex)
    return Tensor(amps, _legs_for_length(amps.size, dim), 0, dim)


def effect(coefficients: Iterable[complex], dim: int = 2) -> Tensor:
    """Effect (0 outputs) whose entries are exactly the given coefficients."""
    c = np.asarray(list(coefficients), dtype=complex)
    return Tensor(c, 0, _legs_for_length(c.size, dim), dim)


def kron(a: Tensor, b: Tensor) -> Tensor:
    if a.dim != b.dim:
        raise TensorError(f"dimension mismatch: {a.dim} vs {b.dim}")
    oa, ia, ob, ib = a.out_arity, a.in_arity, b.out_arity, b.in_arity
    # outer product has axes (a_out, a_in, b_out, b_in); reorder to outputs first
    outer = np.multiply.outer(a.array, b.array)
    order = (
        list(range(oa))
        + list(range(oa + ia, oa + ia + ob))
        + list(range(oa, oa + ia))
        + list(range(oa + ia + ob, oa + ia + ob + ib))
    )
    return Tensor(outer.transpose(order), oa + ob, ia + ib, a.dim)


def kron_all(*ts: Tensor) -> Tensor:
    if not ts:
        raise TensorError("kron_all needs at least one tensor")
    out = ts[0]
    for t in ts[1:]:
        out = kron(out, t)
    return out


def compose(g: Tensor, f: Tensor) -> Tensor:
    """``g`` after ``f``."""
    if g.dim != f.dim:
        raise TensorError(f"dimension mismatch: {g.dim} vs {f.dim}")
    if f.out_arity != g.in_arity:
        raise TensorError(
            f"cannot plug {f.out_arity} outputs into {g.in_arity} inputs"
        )
    return from_matrix(g.matrix @ f.matrix, g.out_arity, f.in_arity, g.dim)


def _check_perm(perm: Sequence[int], n: int):
    if sorted(perm) != list(range(n)):
        raise TensorError(f"{list(perm)} is not a permutation of {n} legs")


def swap_legs(t: Tensor, perm_in: Sequence[int], perm_out: Sequence[int]) -> Tensor:
    """Reorder legs: new output leg k is old output leg ``perm_out[k]``, and
    likewise for inputs."""
    perm_in, perm_out = list(perm_in), list(perm_out)
    _check_perm(perm_out, t.out_arity)
    _check_perm(perm_in, t.in_arity)
    order = perm_out + [t.out_arity + p for p in perm_in]
    return Tensor(t.array.transpose(order), t.out_arity, t.in_arity, t.dim)


def inverse_perm(perm: Sequence[int]) -> list[int]:
    inv = [0] * len(perm)
    for k, p in enumerate(perm):
        inv[p] = k
    return inv


def proportional(a: Tensor, b: Tensor, tol: Tolerance = DEFAULT_TOL) -> complex | None:
    """Return ``lam`` with ``a = lam * b`` or None.

    Uses the Cauchy-Schwarz defect: with ``lam = <b,a>/<b,b>`` the residual
    ``|a - lam b|`` is zero exactly when equality holds in Cauchy-Schwarz.
    """
    _check_same_shape(a, b)
    va, vb = a.entries, b.entries
    na, nb = np.linalg.norm(va), np.linalg.norm(vb)
    if na <= tol.abs_eps and nb <= tol.abs_eps:
        return 1.0 + 0j
    if na <= tol.abs_eps or nb <= tol.abs_eps:
        return None
    lam = np.vdot(vb, va) / np.vdot(vb, vb)
    resid = np.linalg.norm(va - lam * vb)
    if resid > tol.bound(na) or abs(lam) == 0:
        return None
    return complex(lam)


def proportionality_residual(a: Tensor, b: Tensor) -> float:
    """Scale-free distance of ``a`` from the line through ``b``."""
    _check_same_shape(a, b)
    va, vb = a.entries, b.entries
    na, nb = np.linalg.norm(va), np.linalg.norm(vb)
    if na == 0 and nb == 0:
        return 0.0
    if na == 0 or nb == 0:
        return 1.0
    ua, ub = va / na, vb / nb
    return float(np.linalg.norm(ua - np.vdot(ub, ua) * ub))


def right_singular_space(t: Tensor, tol: Tolerance = DEFAULT_TOL) -> list[Tensor]:
    """Orthonormal basis of the row space of the ``dim x dim**(N-1)`` reshape of
    an N-leg state (first leg indexes rows)."""
    if t.in_arity != 0 or t.out_arity < 1:
        raise TensorError("right_singular_space expects a state with at least one leg")
    m = t.entries.reshape(t.dim, -1)
    _, s, vh = np.linalg.svd(m)
    if s.size == 0 or s[0] <= tol.abs_eps:
        raise TensorError("zero tensor has no singular space")
    keep = s > tol.bound(s[0])
    return [Tensor(vh[k], t.out_arity - 1, 0, t.dim) for k in range(len(s)) if keep[k]]


def standard_partial_trace(m: Tensor, leg: int, in_leg: int | None = None) -> Tensor:
    """Contract output leg ``leg`` with an input leg using the standard basis.

    By default the input leg is aligned with ``leg`` from the right, so for a
    map on ``H' (x) H`` the last leg traces out ``H``, for a comultiplication
    ``H -> H (x) H`` leg 1 gives the right trace, and for a multiplication
    the right input is paired with the output.
    """
    if not 0 <= leg < m.out_arity:
        raise TensorError(f"bad output leg {leg}")
    if in_leg is None:
        in_leg = m.in_arity - (m.out_arity - leg)
    if not 0 <= in_leg < m.in_arity:
        raise TensorError(f"bad input leg {in_leg}")
    arr = np.trace(m.array, axis1=leg, axis2=m.out_arity + in_leg)
    return Tensor(arr, m.out_arity - 1, m.in_arity - 1, m.dim)


def conj_by(t: Tensor, L: np.ndarray) -> Tensor:
    """Transport ``t`` along the change of basis ``L``: every output leg gets
    ``L`` and every input leg gets ``L^-1``."""
    L = np.asarray(L, dtype=complex)
    Li = np.linalg.inv(L)
    arr = t.array
    for k in range(t.out_arity):
        arr = np.moveaxis(np.tensordot(L, arr, axes=([1], [k])), 0, k)
    for k in range(t.in_arity):
        ax = t.out_arity + k
        arr = np.moveaxis(np.tensordot(arr, Li, axes=([ax], [0])), -1, ax)
    return Tensor(arr, t.out_arity, t.in_arity, t.dim)


def apply_local(t: Tensor, maps: Sequence[np.ndarray]) -> Tensor:
    """Apply one matrix per output leg of a state-like tensor."""
    if len(maps) != t.out_arity:
        raise TensorError("need one local map per output leg")
    arr = t.array
    for k, L in enumerate(maps):
        arr = np.moveaxis(np.tensordot(np.asarray(L, dtype=complex), arr, axes=([1], [k])), 0, k)
    return Tensor(arr, t.out_arity, t.in_arity, t.dim)
