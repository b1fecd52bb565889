"""Covariant phase POVMs on the circle, represented by finite arc partitions.

Two constructors matter:

* :func:`canonical_phase` bins the canonical phase of a truncated oscillator.
  Its matrix elements on an arc ``[a, b)`` are exact integrals of the
  all-ones kernel,
  ``<r|F([a, b))|s> = (1/2pi) int_a^b exp(i (r - s) t) dt``.
  The ``+`` sign in the exponent is what makes
  ``U(t) F(X) U(t)^* = F(X + t)`` hold with ``U(t) = exp(+i N t)``.
* :func:`cyclic_angle_pvm` is the sharp angle of a ``d``-level rotor under
  the cyclic group of order ``d``: rank-one projections onto discrete Fourier
  vectors, one per arc centred at ``2 pi k / d``.
"""
from __future__ import annotations

from dataclasses import InitVar, dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptySelection, ShapeError
from .hilbert import EPS_PSD, Operator, State, Vector, as_shape, max_entry
from .symmetry import NumberOperator, wrap_angle

CANONICAL = "canonical-binned"
CYCLIC = "cyclic-sharp"
CUSTOM = "custom"
KINDS = (CANONICAL, CYCLIC, CUSTOM)

#: Tolerance for the resolution of identity of constructed POVMs.
EPS_SUM = 1e-12
#: Tolerance for the covariance invariant of number/phase pairs.
EPS_COVARIANCE = 1e-10


@dataclass(frozen=True)
class ArcPartition:
    """``K`` equal arcs ``[offset + 2 pi k / K, offset + 2 pi (k+1) / K)``."""

    bin_count: int
    offset: float = -np.pi

    def __post_init__(self):
        if self.bin_count < 1:
            raise ValueError(f"bin count must be >= 1, got {self.bin_count}")

    @property
    def width(self) -> float:
        return 2 * np.pi / self.bin_count

    @property
    def edges(self) -> np.ndarray:
        return self.offset + self.width * np.arange(self.bin_count + 1)

    def arc(self, k: int) -> tuple[float, float]:
        e = self.offset + self.width * k
        return e, e + self.width

    @property
    def midpoints(self) -> np.ndarray:
        return self.offset + self.width * (np.arange(self.bin_count) + 0.5)

    def index_of(self, theta: float) -> int:
        """Index of the arc containing ``theta`` (taken mod 2 pi)."""
        u = np.mod(theta - self.offset, 2 * np.pi)
        return int(np.floor(u / self.width + 1e-12)) % self.bin_count


@dataclass(frozen=True)
class PhasePOVM:
    partition: ArcPartition
    effects: tuple[Operator, ...]
    kind: str = CUSTOM

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown POVM kind {self.kind!r}; expected one of {KINDS}")
        effects = tuple(self.effects)
        if len(effects) != self.partition.bin_count:
            raise ShapeError(
                f"{len(effects)} effects for {self.partition.bin_count} bins")
        space = effects[0].space
        if any(e.space != space for e in effects):
            raise ShapeError("effects live on different spaces")
        object.__setattr__(self, "effects", effects)
        for k, e in enumerate(effects):
            ev = e.eigvalsh()
            if ev.min() < -EPS_PSD or ev.max() > 1 + EPS_PSD:
                raise ValueError(
                    f"effect {k} has spectrum [{ev.min():.3g}, {ev.max():.3g}] outside [0, 1]")
        total = sum(e.data for e in effects)
        defect = max_entry(total - np.eye(space.total))
        if defect >= EPS_SUM:
            raise ValueError(f"effects sum to identity only within {defect:.3g}")

    @property
    def space(self):
        return self.effects[0].space

    @property
    def dim(self) -> int:
        return self.space.total

    @property
    def bin_count(self) -> int:
        return self.partition.bin_count

    @property
    def nodes(self) -> np.ndarray:
        """Representative angle of each bin (its midpoint)."""
        return self.partition.midpoints

    def stack(self) -> np.ndarray:
        """Effects as an array of shape ``(K, d, d)``."""
        return np.stack([e.data for e in self.effects])

    def effect_of(self, bins: Iterable[int]) -> Operator:
        bins = sorted(set(int(b) for b in bins))
        if not bins:
            raise EmptySelection("no bins selected")
        return Operator._wrap(sum(self.effects[b].data for b in bins), self.space)


@dataclass(frozen=True)
class NumberPhasePair:
    """A number operator and a phase POVM covariant with respect to it."""

    number: NumberOperator
    phase: PhasePOVM
    check: InitVar[bool] = True

    def __post_init__(self, check):
        if self.number.space != self.phase.space:
            raise ShapeError(
                f"number space {self.number.space} differs from POVM space {self.phase.space}")
        if check:
            defect = covariance_defect(self)
            if defect >= EPS_COVARIANCE:
                raise ValueError(f"POVM is not covariant: defect {defect:.3g}")


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

def canonical_effect(d: int, a: float, b: float) -> Operator:
    """Canonical-phase effect of the arc ``[a, b)``, in closed form."""
    n = np.arange(d)
    q = (n[:, None] - n[None, :]).astype(float)
    out = np.empty((d, d), dtype=np.complex128)
    off = q != 0
    out[off] = (np.exp(1j * q[off] * b) - np.exp(1j * q[off] * a)) / (2j * np.pi * q[off])
    out[~off] = (b - a) / (2 * np.pi)
    return Operator._wrap(out, as_shape(d))


def canonical_phase(d: int, bins: int) -> PhasePOVM:
    """Binned canonical phase of an oscillator truncated to ``d`` levels."""
    if d < 1:
        raise ShapeError(f"dimension must be >= 1, got {d}")
    part = ArcPartition(bins)
    effects = tuple(canonical_effect(d, *part.arc(k)) for k in range(bins))
    return PhasePOVM(part, effects, CANONICAL)


def fourier_vector(d: int, theta: float) -> np.ndarray:
    """``(1/sqrt d) sum_n exp(i n theta) |n>``."""
    return np.exp(1j * np.arange(d) * theta) / np.sqrt(d)


def cyclic_angle_pvm(d: int) -> PhasePOVM:
    """Sharp angle observable with values ``2 pi k / d``.

    Arcs are centred on the angle values, so bin ``k`` (offset ``-pi/d``)
    holds the projection onto the Fourier vector at ``2 pi k / d``.
    """
    if d < 1:
        raise ShapeError(f"dimension must be >= 1, got {d}")
    part = ArcPartition(d, offset=-np.pi / d)
    effects = []
    for theta in part.midpoints:
        f = fourier_vector(d, theta)
        effects.append(Operator._wrap(np.outer(f, f.conj()), as_shape(d)))
    return PhasePOVM(part, tuple(effects), CYCLIC)


def uniform_phase(d: int, bins: int) -> PhasePOVM:
    """The uninformative covariant POVM ``F(X) = |X| / 2pi * I``."""
    part = ArcPartition(bins)
    eff = Operator._wrap(np.eye(d, dtype=np.complex128) / bins, as_shape(d))
    return PhasePOVM(part, (eff,) * bins, CUSTOM)


def angle_operator(povm: PhasePOVM) -> Operator:
    """``sum_k theta_k F(X_k)`` with node angles wrapped to (-pi, pi]."""
    thetas = [wrap_angle(t) for t in povm.nodes]
    return Operator._wrap(np.einsum("k,kij->ij", thetas, povm.stack()), povm.space)


def phase_peaked_state(d: int, width: float, centre: float = 0.0) -> Vector:
    """Top eigenvector of the canonical effect of an arc around ``centre``.

    This maximises the probability of finding the phase within the arc,
    and gives a phase-localised alternative to coherent states.
    """
    eff = canonical_effect(d, -width / 2, width / 2).data
    vals, vecs = np.linalg.eigh(0.5 * (eff + eff.conj().T))
    v = vecs[:, -1]
    # fix the global phase so the vacuum amplitude is real and positive
    k = np.argmax(np.abs(v))
    v = v * np.exp(-1j * np.angle(v[k]))
    if centre:
        v = v * np.exp(1j * np.arange(d) * centre)
    return Vector.normalised(v)


# ---------------------------------------------------------------------------
# diagnostics
# ---------------------------------------------------------------------------

def covariance_defect(pair: NumberPhasePair) -> float:
    """Worst violation of ``U(t) F(X_k) U(t)^* = F(X_k + t)``.

    Only shifts by whole bin widths are tested, so that ``X_k + t`` is
    again a bin.
    """
    number, povm = pair.number, pair.phase
    if number.space != povm.space:
        raise ShapeError(f"number space {number.space} differs from POVM space {povm.space}")
    K = povm.bin_count
    width = povm.partition.width
    stack = povm.stack()
    worst = 0.0
    for j in range(1, K):
        ph = np.exp(1j * number.values * j * width)
        rotated = stack * ph[None, :, None] * ph.conj()[None, None, :]
        target = np.roll(stack, -j, axis=0)
        worst = max(worst, max_entry(rotated - target))
    return worst


def norm1_diagnostic(povm: PhasePOVM, bins: Iterable[int]) -> float:
    """``sup_phi <phi|F(X) phi>`` for ``X`` the union of the given bins."""
    eff = povm.effect_of(bins)
    return float(eff.eigvalsh().max())


def measure_of_state(povm: PhasePOVM, omega: State) -> np.ndarray:
    """Outcome distribution ``p_k = tr[omega F(X_k)]``."""
    if omega.space != povm.space:
        raise ShapeError(f"state space {omega.space} differs from POVM space {povm.space}")
    p = np.einsum("kij,ji->k", povm.stack(), omega.data)
    return np.real(p)


def characteristic(omega: State, offsets: Sequence[int]) -> np.ndarray:
    """Fourier coefficients ``int exp(i p t) mu(dt)`` of the canonical phase
    distribution of ``omega``, for each integer ``p`` in ``offsets``.

    Equal to ``sum_s omega[s, s - p]`` in the number basis.
    """
    m = omega.data
    return np.array([np.trace(m, offset=-int(p)) for p in offsets])


def canonical_measure(omega: State, bins: int) -> np.ndarray:
    """Binned canonical phase distribution of ``omega``."""
    return measure_of_state(canonical_phase(omega.dim, bins), omega)


def arc_mass(omega: State, a: float, b: float) -> float:
    """Canonical-phase probability of the arc ``[a, b)``."""
    eff = canonical_effect(omega.dim, a, b)
    return float(np.real(np.sum(eff.data * omega.data.T)))
