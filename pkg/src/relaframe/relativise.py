"""Relativisation, its predual, and restriction to the system.

The relativisation of a system operator ``A`` with respect to a covariant
reference POVM ``F`` is

    yen(A) = int U_S(t) A U_S(t)^* (x) F(dt),

an operator on system (x) reference that is invariant under the joint phase
shift. Three evaluation paths are provided:

``closed``
    Exact for the (unbinned) canonical phase of the reference. The integral
    reduces to a selection rule,
    ``yen(A)[(n,r),(m,s)] = A[n,m]`` iff ``nu_n - nu_m + r - s = 0``.
``quadrature``
    The same integral on a uniform grid of ``K`` nodes using the POVM density
    ``|e(t)><e(t)| / 2pi``. The integrand is a trigonometric polynomial, so the
    grid is exact once ``K`` exceeds the combined spectral spread. This is
    the independent cross-check of ``closed``.
``binned``
    ``sum_k U_S(t_k) A U_S(t_k)^* (x) F(X_k)`` over the bins of a finite POVM
    with ``t_k`` the bin midpoints. Exact for the cyclic sharp angle. For a
    binned canonical phase this is relativisation with respect to the
    coarse-grained POVM, which damps off-diagonal entries.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import QuadratureError, QuadratureWarning, ShapeError
from .hilbert import (Operator, SpaceShape, State, as_shape, max_entry, operator_norm,
                      tensor)
from .povm import CANONICAL, CYCLIC, NumberPhasePair
from .symmetry import NumberOperator, composite_number, tau, tau_star

CLOSED = "closed"
QUADRATURE = "quadrature"
BINNED = "binned"
PATHS = (CLOSED, QUADRATURE, BINNED)


@dataclass(frozen=True)
class RelativisationContext:
    """System number operator plus covariant reference number/phase pair."""

    system_number: NumberOperator
    reference: NumberPhasePair
    path: str | None = None
    quadrature_points: int | None = None

    def __post_init__(self):
        if len(self.system_number.space.factors) != 1:
            raise ShapeError("system number operator must act on a single factor")
        # also checks that the system and reference groups agree
        composite_number(self.system_number, self.reference.number)
        path = self.path or (CLOSED if self.reference.phase.kind == CANONICAL else BINNED)
        if path not in PATHS:
            raise ValueError(f"unknown path {path!r}; expected one of {PATHS}")
        if path in (CLOSED, QUADRATURE) and self.reference.phase.kind != CANONICAL:
            raise ValueError(f"path {path!r} requires a canonical reference phase")
        object.__setattr__(self, "path", path)

    @classmethod
    def canonical(cls, d_s: int, d_r: int, bins: int, path: str | None = None,
                  quadrature_points: int | None = None) -> "RelativisationContext":
        from .povm import canonical_phase
        pair = NumberPhasePair(NumberOperator.fock(d_r), canonical_phase(d_r, bins))
        return cls(NumberOperator.fock(d_s), pair, path, quadrature_points)

    @classmethod
    def cyclic(cls, d_s: int, d_r: int | None = None) -> "RelativisationContext":
        from .povm import cyclic_angle_pvm
        d_r = d_s if d_r is None else d_r
        pair = NumberPhasePair(NumberOperator.cyclic(d_r), cyclic_angle_pvm(d_r))
        return cls(NumberOperator.cyclic(d_s, modulus=d_r), pair)

    def with_path(self, path: str, quadrature_points: int | None = None):
        return RelativisationContext(self.system_number, self.reference, path,
                                     quadrature_points)

    @property
    def d_s(self) -> int:
        return self.system_number.dim

    @property
    def d_r(self) -> int:
        return self.reference.number.dim

    @property
    def system_space(self) -> SpaceShape:
        return self.system_number.space

    @property
    def reference_space(self) -> SpaceShape:
        return self.reference.number.space

    @property
    def total_space(self) -> SpaceShape:
        return self.system_space + self.reference_space

    @property
    def total_number(self) -> NumberOperator:
        return composite_number(self.system_number, self.reference.number)

    @property
    def min_quadrature_points(self) -> int:
        """Smallest exact grid for the ``quadrature`` path."""
        return self.system_number.max_gap + self.reference.number.max_gap + 1

    def grid(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Nodes, weights and reference operators ``(K, d_R, d_R)`` of the
        discrete paths."""
        if self.path == BINNED:
            povm = self.reference.phase
            K = povm.bin_count
            coarse = self.system_number.max_gap + self.reference.number.max_gap
            if povm.kind != CYCLIC and K <= coarse:
                warnings.warn(
                    f"binned relativisation with {K} bins aliases harmonics up to {coarse}",
                    QuadratureWarning, stacklevel=3)
            return povm.nodes, np.ones(K), povm.stack()
        if self.path == QUADRATURE:
            K = self.quadrature_points or self.min_quadrature_points
            if K < self.min_quadrature_points:
                raise QuadratureError(
                    f"{K} nodes cannot integrate exactly; need at least "
                    f"{self.min_quadrature_points}")
            nodes = -np.pi + 2 * np.pi * np.arange(K) / K
            nu = self.reference.number.values
            e = np.exp(1j * nodes[:, None] * nu[None, :])
            dens = e[:, :, None] * e.conj()[:, None, :]
            return nodes, np.full(K, 1.0 / K), dens
        raise ValueError("the closed path has no grid")


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _check_space(op: Operator, space: SpaceShape, what: str):
    if op.space != space:
        raise ShapeError(f"{what} lives on {op.space}, expected {space}")


def _selection(ctx: RelativisationContext) -> np.ndarray:
    """Boolean ``sel[n, r, m, s]``: joint charge ``nu_n + r`` equals ``nu_m + s``."""
    nu = ctx.system_number.values
    mu = ctx.reference.number.values
    p = nu[:, None] - nu[None, :]
    q = mu[:, None] - mu[None, :]
    return (p[:, None, :, None] + q[None, :, None, :]) == 0


def _offset_weights(ctx: RelativisationContext, omega: np.ndarray) -> np.ndarray:
    """``W[n, m] = sum {omega[s, r] : mu_r - mu_s = nu_m - nu_n}``.

    This is the Fourier coefficient of the canonical phase distribution of
    ``omega`` at frequency ``nu_n - nu_m``.
    """
    nu = ctx.system_number.values
    mu = ctx.reference.number.values
    q = mu[:, None] - mu[None, :]  # indexed [r, s]
    out = np.zeros((len(nu), len(nu)), dtype=np.complex128)
    diffs = nu[None, :] - nu[:, None]
    for p in np.unique(diffs):
        out[diffs == p] = np.sum(omega.T[q == p])
    return out


def _phases(values: np.ndarray, nodes: np.ndarray) -> np.ndarray:
    return np.exp(1j * nodes[:, None] * values[None, :])


def _rotations(ctx: RelativisationContext, a: np.ndarray, nodes: np.ndarray,
               inverse: bool = False) -> np.ndarray:
    """Stack of ``U(t_k) a U(t_k)^*`` (or ``U^* a U`` if ``inverse``)."""
    ph = _phases(ctx.system_number.values, nodes)
    if inverse:
        ph = ph.conj()
    return a[None, :, :] * ph[:, :, None] * ph.conj()[:, None, :]


# ---------------------------------------------------------------------------
# the maps
# ---------------------------------------------------------------------------

def yen(ctx: RelativisationContext, a: Operator, path: str | None = None) -> Operator:
    """Relativise a system operator to an invariant operator on S (x) R."""
    _check_space(a, ctx.system_space, "operator")
    if path is not None and path != ctx.path:
        ctx = ctx.with_path(path, ctx.quadrature_points)
    ds, dr = ctx.d_s, ctx.d_r
    if ctx.path == CLOSED:
        y4 = np.where(_selection(ctx), a.data[:, None, :, None], 0)
    else:
        nodes, weights, refs = ctx.grid()
        rot = _rotations(ctx, a.data, nodes) * weights[:, None, None]
        y4 = np.einsum("knm,krs->nrms", rot, refs)
    return Operator._wrap(y4.reshape(ds * dr, ds * dr), ctx.total_space)


def yen_star(ctx: RelativisationContext, sigma: Operator) -> State:
    """Predual of :func:`yen`: derelativise a composite state."""
    _check_space(sigma, ctx.total_space, "state")
    ds, dr = ctx.d_s, ctx.d_r
    s4 = sigma.data.reshape(ds, dr, ds, dr)
    if ctx.path == CLOSED:
        out = np.einsum("nrms,msnr->mn", _selection(ctx), s4)
    else:
        nodes, weights, refs = ctx.grid()
        # G_k[m, n] = sum_rs F_k[r, s] sigma[(m, s), (n, r)]
        g = np.einsum("krs,msnr->kmn", refs, s4) * weights[:, None, None]
        ph = _phases(ctx.system_number.values, nodes)
        out = np.einsum("kmn,km,kn->mn", g, ph.conj(), ph)
    cls = State if isinstance(sigma, State) else Operator
    return cls._wrap(out, ctx.system_space)


def yen_star_product(ctx: RelativisationContext, rho_s: State, rho_r: State) -> State:
    """``yen_*(rho_S (x) rho_R)`` without forming the product state."""
    _check_space(rho_s, ctx.system_space, "system state")
    _check_space(rho_r, ctx.reference_space, "reference state")
    if ctx.path == CLOSED:
        out = rho_s.data * _offset_weights(ctx, rho_r.data).T
    else:
        nodes, weights, refs = ctx.grid()
        mu = np.real(np.einsum("kij,ji->k", refs, rho_r.data)) * weights
        out = np.einsum("k,kmn->mn", mu, _rotations(ctx, rho_s.data, nodes, inverse=True))
    return State._wrap(out, ctx.system_space)


def gamma_restrict(omega: State, c: Operator) -> Operator:
    """Restriction ``Gamma_omega``: partial trace of ``(I (x) omega) C`` over R."""
    if not c.space.is_bipartite:
        raise ShapeError(f"expected a bipartite operator, got {c.space}")
    ds, dr = c.space.factors
    _check_space(omega, as_shape(dr), "reference state")
    out = np.einsum("nrms,sr->nm", c.data.reshape(ds, dr, ds, dr), omega.data)
    return Operator._wrap(out, as_shape(ds))


def gamma_yen(ctx: RelativisationContext, omega: State, a: Operator) -> Operator:
    """``(Gamma_omega o yen)(A)``: average of rotated ``A`` over the phase
    distribution of ``omega``."""
    _check_space(a, ctx.system_space, "operator")
    _check_space(omega, ctx.reference_space, "reference state")
    if ctx.path == CLOSED:
        out = a.data * _offset_weights(ctx, omega.data)
    else:
        nodes, weights, refs = ctx.grid()
        mu = np.einsum("kij,ji->k", refs, omega.data) * weights
        out = np.einsum("k,knm->nm", mu, _rotations(ctx, a.data, nodes))
    return Operator._wrap(out, ctx.system_space)


# ---------------------------------------------------------------------------
# superoperators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SuperOperator:
    """Linear map on operators as a matrix on row-major vectorisations.

    ``matrix`` has shape ``(d_out**2, d_in**2)``; column ``i * d_in + j`` is
    the image of the matrix unit ``|i><j|``.
    """

    in_space: SpaceShape
    out_space: SpaceShape
    matrix: np.ndarray

    @classmethod
    def from_map(cls, fn: Callable[[Operator], Operator], in_space,
                 out_space) -> "SuperOperator":
        in_space, out_space = as_shape(in_space), as_shape(out_space)
        di, do = in_space.total, out_space.total
        mat = np.empty((do * do, di * di), dtype=np.complex128)
        for col in range(di * di):
            unit = np.zeros(di * di, dtype=np.complex128)
            unit[col] = 1.0
            img = fn(Operator._wrap(unit.reshape(di, di), in_space))
            _check_space(img, out_space, "image")
            mat[:, col] = img.data.reshape(-1)
        return cls(in_space, out_space, mat)

    @classmethod
    def identity(cls, space) -> "SuperOperator":
        space = as_shape(space)
        return cls(space, space, np.eye(space.total ** 2, dtype=np.complex128))

    def __call__(self, op: Operator) -> Operator:
        _check_space(op, self.in_space, "input")
        d = self.out_space.total
        return Operator._wrap((self.matrix @ op.data.reshape(-1)).reshape(d, d),
                              self.out_space)

    def _four(self) -> np.ndarray:
        do, di = self.out_space.total, self.in_space.total
        return self.matrix.reshape(do, do, di, di)

    def predual(self) -> "SuperOperator":
        """The map ``Phi_*`` with ``tr[Phi(A) rho] = tr[A Phi_*(rho)]``."""
        m4 = self._four().transpose(3, 2, 1, 0)
        di, do = self.in_space.total, self.out_space.total
        return SuperOperator(self.out_space, self.in_space, m4.reshape(di * di, do * do))

    def __matmul__(self, other: "SuperOperator") -> "SuperOperator":
        """Composition ``self o other``."""
        if other.out_space != self.in_space:
            raise ShapeError(f"cannot compose {other.out_space} -> {self.in_space}")
        return SuperOperator(other.in_space, self.out_space, self.matrix @ other.matrix)

    def choi(self) -> np.ndarray:
        """``sum_ij |i><j| (x) Phi(|i><j|)`` with the input factor first."""
        do, di = self.out_space.total, self.in_space.total
        return self._four().transpose(2, 0, 3, 1).reshape(di * do, di * do)


def choi_cp_check(phi: SuperOperator) -> tuple[float, float]:
    """Minimal Choi eigenvalue and trace-preservation defect of ``phi``.

    Complete positivity holds iff the first number is non-negative (up to
    rounding). The defect is ``max_ij |tr phi(|i><j|) - delta_ij|``.
    """
    j = phi.choi()
    herm = 0.5 * (j + j.conj().T)
    min_eig = float(np.linalg.eigvalsh(herm).min())
    di = phi.in_space.total
    traces = np.einsum("aaij->ij", phi._four())
    return min_eig, max_entry(traces - np.eye(di))


def yen_superop(ctx: RelativisationContext) -> SuperOperator:
    return SuperOperator.from_map(lambda a: yen(ctx, a), ctx.system_space, ctx.total_space)


def yen_star_superop(ctx: RelativisationContext) -> SuperOperator:
    return SuperOperator.from_map(lambda s: yen_star(ctx, s), ctx.total_space,
                                  ctx.system_space)


def tau_superop(n: NumberOperator) -> SuperOperator:
    return SuperOperator.from_map(lambda a: tau(a, n), n.space, n.space)


def tau_star_superop(n: NumberOperator) -> SuperOperator:
    return SuperOperator.from_map(lambda s: tau_star(s, n), n.space, n.space)


def gamma_superop(omega: State, system_space) -> SuperOperator:
    """Heisenberg-picture restriction ``Gamma_omega`` from S (x) R to S."""
    system_space = as_shape(system_space)
    return SuperOperator.from_map(lambda c: gamma_restrict(omega, c),
                                  system_space + omega.space, system_space)


def embedding_superop(omega: State, system_space) -> SuperOperator:
    """``V_omega: rho -> rho (x) omega``, the predual of ``Gamma_omega``."""
    system_space = as_shape(system_space)
    return SuperOperator.from_map(lambda r: tensor(r, omega), system_space,
                                  system_space + omega.space)


# ---------------------------------------------------------------------------
# structural diagnostics
# ---------------------------------------------------------------------------

def _norm(m: np.ndarray, norm: str) -> float:
    if norm == "max":
        return max_entry(m)
    if norm == "op":
        return operator_norm(m)
    if norm == "hs":
        # Hilbert-Schmidt norm per dimension
        return float(np.linalg.norm(m) / np.sqrt(m.shape[0]))
    raise ValueError(f"unknown norm {norm!r}")


def star_hom_defect(ctx: RelativisationContext, a: Operator, b: Operator,
                    norm: str = "max") -> float:
    """``||yen(AB) - yen(A) yen(B)||``; zero for sharp reference POVMs."""
    _check_space(a, ctx.system_space, "operator")
    _check_space(b, ctx.system_space, "operator")
    lhs = yen(ctx, a @ b).data
    rhs = yen(ctx, a).data @ yen(ctx, b).data
    return _norm(lhs - rhs, norm)


def invariance_check(ctx: RelativisationContext, a: Operator, norm: str = "max") -> float:
    """``||tau_T(yen(A)) - yen(A)||`` with ``tau_T`` generated by ``N_S + N_R``."""
    y = yen(ctx, a)
    return _norm(tau(y, ctx.total_number).data - y.data, norm)
