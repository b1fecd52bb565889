"""Dense operators, states and vectors on (possibly bipartite) Hilbert spaces.

Conventions
-----------
* Number basis ``|0>, ..., |d-1>`` for every factor.
* Composite indices are flattened row-major with the system factor first,
  i.e. ``|i_S, i_R>`` sits at position ``i_S * d_R + i_R``.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import lgamma, log
from typing import Iterable

import numpy as np
from scipy.special import gammainc

from .errors import ShapeError, StateError, TruncationError

#: PSD, trace and hermiticity tolerances for state validation.
EPS_PSD = 1e-10
EPS_TRACE = 1e-10
EPS_HERM = 1e-10
EPS_NORM = 1e-10

#: Default bound on discarded coherent-state weight (strict mode only).
TRUNCATION_BOUND = 1e-6


@dataclass(frozen=True)
class SpaceShape:
    """Ordered tensor factors of a Hilbert space, e.g. ``(d_S, d_R)``."""

    factors: tuple[int, ...]

    def __post_init__(self):
        factors = tuple(int(f) for f in self.factors)
        if not factors or any(f < 1 for f in factors):
            raise ShapeError(f"dimensions must be >= 1, got {self.factors}")
        object.__setattr__(self, "factors", factors)

    @property
    def total(self) -> int:
        return int(np.prod(self.factors))

    @property
    def is_bipartite(self) -> bool:
        return len(self.factors) == 2

    def __add__(self, other: "SpaceShape") -> "SpaceShape":
        return SpaceShape(self.factors + other.factors)

    def __str__(self):
        return "x".join(map(str, self.factors))


def as_shape(space) -> SpaceShape:
    if isinstance(space, SpaceShape):
        return space
    if isinstance(space, (int, np.integer)):
        return SpaceShape((int(space),))
    return SpaceShape(tuple(space))


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.complex128, copy=True)
    arr.setflags(write=False)
    return arr


class Operator:
    """Complex square matrix tagged with the space it acts on.

    Instances are immutable; arithmetic returns new operators.
    """

    __slots__ = ("data", "space")

    def __init__(self, data, space=None):
        data = _frozen(data)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise ShapeError(f"operator matrix must be square, got {data.shape}")
        space = as_shape(data.shape[0] if space is None else space)
        if space.total != data.shape[0]:
            raise ShapeError(
                f"matrix of size {data.shape[0]} does not match space {space}")
        self.data = data
        self.space = space

    @classmethod
    def _wrap(cls, data, space):
        # Internal constructor: skips validation for outputs of trusted maps.
        obj = object.__new__(cls)
        obj.data = data if not data.flags.writeable else _frozen(data)
        obj.space = space
        return obj

    @classmethod
    def identity(cls, space) -> "Operator":
        space = as_shape(space)
        return cls(np.eye(space.total), space)

    @property
    def dim(self) -> int:
        return self.space.total

    def dag(self) -> "Operator":
        return Operator._wrap(self.data.conj().T, self.space)

    def trace(self) -> complex:
        return complex(np.trace(self.data))

    def is_hermitian(self, tol: float = EPS_HERM) -> bool:
        return bool(np.max(np.abs(self.data - self.data.conj().T), initial=0.0) < tol)

    def eigvalsh(self) -> np.ndarray:
        return np.linalg.eigvalsh(0.5 * (self.data + self.data.conj().T))

    def _check(self, other: "Operator"):
        if self.space != other.space:
            raise ShapeError(f"space mismatch: {self.space} vs {other.space}")

    def __add__(self, other):
        self._check(other)
        return Operator._wrap(self.data + other.data, self.space)

    def __sub__(self, other):
        self._check(other)
        return Operator._wrap(self.data - other.data, self.space)

    def __neg__(self):
        return Operator._wrap(-self.data, self.space)

    def __mul__(self, scalar):
        return Operator._wrap(self.data * complex(scalar), self.space)

    __rmul__ = __mul__

    def __matmul__(self, other):
        self._check(other)
        return Operator._wrap(self.data @ other.data, self.space)

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)

    def __repr__(self):
        return f"{type(self).__name__}(space={self.space}, data=\n{self.data})"


class State(Operator):
    """Density operator: Hermitian, positive semidefinite, unit trace.

    Validation happens here once; maps that provably preserve states build
    their outputs with :meth:`Operator._wrap` and skip it.
    """

    __slots__ = ()

    def __init__(self, data, space=None):
        super().__init__(data, space)
        m = self.data
        herm = np.max(np.abs(m - m.conj().T), initial=0.0)
        if herm >= EPS_HERM:
            raise StateError(f"not Hermitian (max |M - M^dag| = {herm:.3g})")
        tr = np.trace(m).real
        if abs(tr - 1.0) >= EPS_TRACE:
            raise StateError(f"trace {tr!r} differs from 1")
        lo = self.eigvalsh().min()
        if lo < -EPS_PSD:
            raise StateError(f"negative eigenvalue {lo:.3g}")

    @classmethod
    def pure(cls, vector: "Vector") -> "State":
        """The projection ``P[phi] = |phi><phi|``."""
        a = vector.amplitudes
        return cls._wrap(_frozen(np.outer(a, a.conj())), vector.space)

    @classmethod
    def maximally_mixed(cls, space) -> "State":
        space = as_shape(space)
        return cls._wrap(_frozen(np.eye(space.total) / space.total), space)

    @classmethod
    def number(cls, n: int, d: int) -> "State":
        return cls.pure(basis_vector(n, d))

    def purity(self) -> float:
        return float(np.real(np.trace(self.data @ self.data)))


class Vector:
    """Unit vector in the number basis."""

    __slots__ = ("amplitudes", "space", "truncation_weight")

    def __init__(self, amplitudes, space=None, truncation_weight: float = 0.0):
        amps = np.array(amplitudes, dtype=np.complex128).reshape(-1)
        space = as_shape(amps.size if space is None else space)
        if space.total != amps.size:
            raise ShapeError(f"vector of size {amps.size} does not match {space}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) >= EPS_NORM:
            raise StateError(f"vector norm {norm!r} differs from 1")
        amps.setflags(write=False)
        self.amplitudes = amps
        self.space = space
        self.truncation_weight = float(truncation_weight)

    @classmethod
    def normalised(cls, amplitudes, space=None) -> "Vector":
        amps = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
        return cls(amps / np.linalg.norm(amps), space)

    @property
    def dim(self) -> int:
        return self.space.total

    def projector(self) -> State:
        return State.pure(self)

    def __matmul__(self, other: "Vector") -> "Vector":
        """Tensor product of vectors (system first)."""
        return Vector(np.kron(self.amplitudes, other.amplitudes),
                      self.space + other.space)

    def __repr__(self):
        return f"Vector(space={self.space}, amplitudes={self.amplitudes})"


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

def basis_vector(n: int, d: int) -> Vector:
    if not 0 <= n < d:
        raise ShapeError(f"basis index {n} outside 0..{d - 1}")
    amps = np.zeros(d, dtype=np.complex128)
    amps[n] = 1.0
    return Vector(amps)


def plus_state(d: int) -> Vector:
    """Uniform superposition ``sum_n |n> / sqrt(d)``."""
    return Vector(np.full(d, 1 / np.sqrt(d)))


def coherent_truncation_weight(beta: complex, d: int) -> float:
    """Poisson weight ``P(n >= d)`` dropped when truncating ``|beta>`` at ``d``."""
    lam = abs(beta) ** 2
    if lam == 0.0:
        return 0.0
    return float(gammainc(d, lam))


def coherent_state(beta: complex, d: int, *, strict: bool = False,
                   bound: float = TRUNCATION_BOUND) -> Vector:
    """Truncated and renormalised coherent state.

    Coefficients are proportional to ``beta**n / sqrt(n!)`` for ``n < d``.
    The pre-normalisation tail weight is stored on the returned vector as
    ``truncation_weight``; with ``strict=True`` a weight above ``bound``
    raises :class:`TruncationError`.
    """
    if d < 1:
        raise ShapeError(f"dimension must be >= 1, got {d}")
    weight = coherent_truncation_weight(beta, d)
    if strict and weight > bound:
        raise TruncationError(
            f"coherent state beta={beta} at d={d} drops weight {weight:.3g} > {bound:.3g}")
    n = np.arange(d)
    if beta == 0:
        amps = (n == 0).astype(np.complex128)
    else:
        # log-space avoids overflow of beta**n / sqrt(n!) for large d
        logmag = n * log(abs(beta)) - 0.5 * np.array([lgamma(k + 1) for k in n])
        amps = np.exp(logmag - logmag.max() + 1j * n * np.angle(beta))
        amps /= np.linalg.norm(amps)
    return Vector(amps, truncation_weight=weight)


def random_vector(d: int, rng: np.random.Generator) -> Vector:
    return Vector.normalised(rng.normal(size=d) + 1j * rng.normal(size=d))


def random_state(d: int, rng: np.random.Generator, rank: int | None = None) -> State:
    """Random density matrix of the given rank (full rank by default)."""
    rank = d if rank is None else rank
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = g @ g.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return State(rho / np.trace(rho).real)


def random_operator(d: int, rng: np.random.Generator, space=None) -> Operator:
    return Operator(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)), space)


def random_hermitian(d: int, rng: np.random.Generator) -> Operator:
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return Operator(0.5 * (a + a.conj().T))


def random_effect(d: int, rng: np.random.Generator) -> Operator:
    """Random operator with spectrum in [0, 1]."""
    h = random_hermitian(d, rng).data
    _, vecs = np.linalg.eigh(h)
    vals = rng.uniform(0, 1, size=d)
    return Operator((vecs * vals) @ vecs.conj().T)


def quadrature(d: int) -> Operator:
    """Truncated ``a + a^dag``; for ``d = 2`` this is ``sigma_x``."""
    off = np.sqrt(np.arange(1, d))
    return Operator(np.diag(off, 1) + np.diag(off, -1))


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def tensor(a: Operator, b: Operator) -> Operator:
    """Kronecker product with the first argument as the leading factor."""
    data = np.kron(a.data, b.data)
    space = a.space + b.space
    cls = State if isinstance(a, State) and isinstance(b, State) else Operator
    return cls._wrap(data, space)


def tensor_all(ops: Iterable[Operator]) -> Operator:
    ops = list(ops)
    out = ops[0]
    for op in ops[1:]:
        out = tensor(out, op)
    return out


def _bipartite(c: Operator) -> tuple[int, int]:
    if not c.space.is_bipartite:
        raise ShapeError(f"expected a bipartite operator, got space {c.space}")
    return c.space.factors


def partial_trace_reference(c: Operator) -> Operator:
    """Trace out the second (reference) factor of a bipartite operator."""
    ds, dr = _bipartite(c)
    out = np.einsum("ikjk->ij", c.data.reshape(ds, dr, ds, dr))
    cls = State if isinstance(c, State) else Operator
    return cls._wrap(out, SpaceShape((ds,)))


def partial_trace_system(c: Operator) -> Operator:
    """Trace out the first (system) factor of a bipartite operator."""
    ds, dr = _bipartite(c)
    out = np.einsum("kikj->ij", c.data.reshape(ds, dr, ds, dr))
    cls = State if isinstance(c, State) else Operator
    return cls._wrap(out, SpaceShape((dr,)))


def trace_distance(rho: Operator, sigma: Operator) -> float:
    """Half the trace norm of ``rho - sigma``."""
    if rho.space != sigma.space:
        raise ShapeError(f"space mismatch: {rho.space} vs {sigma.space}")
    s = np.linalg.svd(rho.data - sigma.data, compute_uv=False)
    return float(0.5 * s.sum())


def expectation(rho: Operator, a: Operator) -> complex:
    """``tr[rho A]``."""
    if rho.space != a.space:
        raise ShapeError(f"space mismatch: {rho.space} vs {a.space}")
    # tr[XY] = sum_ij X_ij Y_ji without forming the product
    return complex(np.sum(rho.data * a.data.T))


def max_entry(m) -> float:
    """Largest entry magnitude, the default diagnostic norm."""
    return float(np.max(np.abs(np.asarray(m)), initial=0.0))


def operator_norm(m) -> float:
    return float(np.linalg.norm(np.asarray(m), 2))
