"""Number operators, phase shifts and the symmetrisation map.

A :class:`NumberOperator` is diagonal in the number basis and carries its
integer eigenvalues in basis order. Repeated eigenvalues are degenerate
eigenspaces. With ``modulus=None`` the symmetry group is the full circle
U(1); with an integer modulus ``m`` it is the cyclic subgroup generated by
``exp(2 pi i N / m)``, and sectors are eigenvalues taken mod ``m``.

``tau`` keeps the blocks of an operator that connect equal sectors. For
these diagonal generators it is a mask, so ``tau`` and ``tau_star`` share
one implementation.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import QuadratureError, ShapeError
from .hilbert import Operator, SpaceShape, State, as_shape, max_entry


def wrap_angle(theta: float) -> float:
    """Map an angle into (-pi, pi]."""
    t = float(np.mod(theta + np.pi, 2 * np.pi)) - np.pi
    if t <= -np.pi + 1e-15:
        t = np.pi
    return t


@dataclass(frozen=True, eq=True)
class NumberOperator:
    eigenvalues: tuple[int, ...]
    modulus: int | None = None
    space: SpaceShape = field(default=None, compare=True)

    def __post_init__(self):
        eig = np.asarray(self.eigenvalues)
        if eig.ndim != 1 or eig.size == 0:
            raise ShapeError("eigenvalues must be a non-empty list")
        if not np.all(np.equal(np.mod(eig, 1), 0)):
            raise ValueError(f"number eigenvalues must be integers: {self.eigenvalues}")
        object.__setattr__(self, "eigenvalues", tuple(int(e) for e in eig))
        if self.modulus is not None and self.modulus < 1:
            raise ValueError(f"modulus must be >= 1, got {self.modulus}")
        space = as_shape(len(eig) if self.space is None else self.space)
        if space.total != len(eig):
            raise ShapeError(f"{len(eig)} eigenvalues for space {space}")
        object.__setattr__(self, "space", space)

    @classmethod
    def fock(cls, d: int) -> "NumberOperator":
        """Nondegenerate ``N = diag(0, 1, ..., d-1)`` generating U(1)."""
        return cls(tuple(range(d)))

    @classmethod
    def cyclic(cls, d: int, modulus: int | None = None) -> "NumberOperator":
        """``diag(0..d-1)`` generating the cyclic group of order ``modulus``."""
        return cls(tuple(range(d)), modulus=d if modulus is None else modulus)

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    @property
    def is_cyclic(self) -> bool:
        return self.modulus is not None

    @cached_property
    def values(self) -> np.ndarray:
        return np.asarray(self.eigenvalues, dtype=np.int64)

    @cached_property
    def labels(self) -> np.ndarray:
        """Sector label of each basis vector."""
        v = self.values
        return v if self.modulus is None else np.mod(v, self.modulus)

    @cached_property
    def sector_mask(self) -> np.ndarray:
        """Boolean matrix, True where row and column lie in the same sector."""
        lab = self.labels
        m = lab[:, None] == lab[None, :]
        m.setflags(write=False)
        return m

    @property
    def matrix(self) -> Operator:
        return Operator(np.diag(self.values.astype(float)), self.space)

    def sectors(self) -> dict[int, np.ndarray]:
        """Sector label -> basis indices spanning its eigenspace."""
        lab = self.labels
        return {int(k): np.flatnonzero(lab == k) for k in np.unique(lab)}

    def projections(self) -> dict[int, Operator]:
        out = {}
        for k, idx in self.sectors().items():
            p = np.zeros((self.dim, self.dim))
            p[idx, idx] = 1.0
            out[k] = Operator(p, self.space)
        return out

    @property
    def max_gap(self) -> int:
        """Largest eigenvalue difference, the degree of the conjugation orbit."""
        return int(self.values.max() - self.values.min())


def composite_number(n_s: NumberOperator, n_r: NumberOperator) -> NumberOperator:
    """``N_T = N_S (x) I + I (x) N_R`` on the composite space."""
    if n_s.modulus != n_r.modulus:
        raise ShapeError(
            f"system and reference groups differ (moduli {n_s.modulus}, {n_r.modulus})")
    eig = (n_s.values[:, None] + n_r.values[None, :]).reshape(-1)
    return NumberOperator(tuple(eig), n_s.modulus, n_s.space + n_r.space)


def _check(a: Operator, n: NumberOperator):
    if a.space != n.space:
        raise ShapeError(f"operator space {a.space} does not match number space {n.space}")


def phase_shift(n: NumberOperator, theta: float) -> Operator:
    """``U(theta) = exp(i N theta)``."""
    theta = wrap_angle(theta)
    return Operator._wrap(np.diag(np.exp(1j * n.values * theta)), n.space)


def conjugate(a: Operator, n: NumberOperator, theta: float) -> np.ndarray:
    """Matrix of ``U(theta) A U(theta)^*``, computed entrywise."""
    ph = np.exp(1j * n.values * theta)
    return a.data * ph[:, None] * ph.conj()[None, :]


def tau(a: Operator, n: NumberOperator) -> Operator:
    """Block-diagonal part of ``a`` with respect to the sectors of ``n``."""
    _check(a, n)
    return Operator._wrap(np.where(n.sector_mask, a.data, 0), a.space)


def tau_star(rho: State, n: NumberOperator) -> State:
    """Predual of :func:`tau`; dephases a state between sectors."""
    _check(rho, n)
    return State._wrap(np.where(n.sector_mask, rho.data, 0), rho.space)


def group_grid(n: NumberOperator, quadrature_points: int | None = None) -> np.ndarray:
    """Angles averaged over by :func:`twirl`.

    Cyclic groups use their own elements ``2 pi k / m``. For U(1) the grid is
    ``-pi + 2 pi k / K`` and must satisfy ``K > max_gap`` for exactness.
    """
    if n.is_cyclic:
        m = n.modulus
        if quadrature_points not in (None, m):
            raise QuadratureError(
                f"cyclic group of order {m} is averaged over its {m} elements, "
                f"got quadrature_points={quadrature_points}")
        return 2 * np.pi * np.arange(m) / m
    k = n.max_gap + 1 if quadrature_points is None else int(quadrature_points)
    if k <= n.max_gap:
        raise QuadratureError(
            f"{k} grid points cannot integrate harmonics up to {n.max_gap}; "
            f"need at least {n.max_gap + 1}")
    return -np.pi + 2 * np.pi * np.arange(k) / k


def twirl(a: Operator, n: NumberOperator, quadrature_points: int | None = None) -> Operator:
    """Haar average of ``U(theta) A U(theta)^*`` on an exact uniform grid."""
    _check(a, n)
    grid = group_grid(n, quadrature_points)
    acc = np.zeros_like(a.data)
    for theta in grid:
        acc += conjugate(a, n, theta)
    return Operator._wrap(acc / len(grid), a.space)


def invariance_defect(a: Operator, n: NumberOperator) -> float:
    """Max-entry size of the failure of ``a`` to commute with the group action.

    For U(1) this is the commutator ``[A, N]``. For a cyclic group the
    generator ``U(2 pi / m)`` is used instead, since commuting with ``N``
    is stronger than cyclic invariance.
    """
    _check(a, n)
    if n.is_cyclic:
        return max_entry(conjugate(a, n, 2 * np.pi / n.modulus) - a.data)
    v = n.values
    return max_entry(a.data * (v[None, :] - v[:, None]))
