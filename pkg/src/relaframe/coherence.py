"""Localisation limits, the delocalised twirl, and mutual coherence.

The experiments here compare "absolute" system quantities with their
relativised counterparts along a sequence of increasingly phase-localised
reference states. Every limit is reported as a finite table, never
extrapolated.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import SequenceError, ShapeError
from .hilbert import (Operator, State, Vector, coherent_state, expectation,
                      operator_norm, tensor, trace_distance)
from .povm import arc_mass, canonical_phase, measure_of_state, phase_peaked_state
from .relativise import RelativisationContext, gamma_yen, yen, yen_star
from .symmetry import NumberOperator, composite_number, tau_star
from .tables import ResultTable, is_non_increasing

COHERENT = "coherent-amplitude"
PHASE_PEAKED = "phase-peaked"
CUSTOM = "custom"
SEQUENCE_KINDS = (COHERENT, PHASE_PEAKED)

#: Default witness tolerance separating structural zeros from rounding noise.
WITNESS_TOL = 1e-8
#: Slack allowed in monotonicity checks along a sequence.
MONOTONE_SLACK = 1e-6


@dataclass(frozen=True)
class LocalisationSequence:
    """Reference states ``phi_i`` increasingly localised around phase 0."""

    kind: str
    parameters: tuple[float, ...]
    dimension: int
    states: tuple[Vector, ...]

    def __post_init__(self):
        if not self.states:
            raise SequenceError("localisation sequence is empty")
        if len(self.parameters) != len(self.states):
            raise SequenceError("one parameter per state is required")
        if any(v.dim != self.dimension for v in self.states):
            raise ShapeError(f"sequence states must all have dimension {self.dimension}")

    @classmethod
    def coherent(cls, amplitudes: Sequence[float], d: int) -> "LocalisationSequence":
        amps = tuple(float(a) for a in amplitudes)
        return cls(COHERENT, amps, d, tuple(coherent_state(a, d) for a in amps))

    @classmethod
    def phase_peaked(cls, widths: Sequence[float], d: int) -> "LocalisationSequence":
        ws = tuple(float(w) for w in widths)
        return cls(PHASE_PEAKED, ws, d, tuple(phase_peaked_state(d, w) for w in ws))

    @classmethod
    def custom(cls, states: Sequence[Vector],
               parameters: Sequence[float] | None = None) -> "LocalisationSequence":
        states = tuple(states)
        if not states:
            raise SequenceError("localisation sequence is empty")
        params = tuple(range(len(states))) if parameters is None else tuple(parameters)
        return cls(CUSTOM, tuple(float(p) for p in params), states[0].dim, states)

    @classmethod
    def build(cls, kind: str, values: Sequence[float], d: int) -> "LocalisationSequence":
        if kind == COHERENT:
            return cls.coherent(values, d)
        if kind == PHASE_PEAKED:
            return cls.phase_peaked(values, d)
        raise SequenceError(f"unknown sequence kind {kind!r}; expected one of {SEQUENCE_KINDS}")

    def __len__(self):
        return len(self.states)

    @property
    def truncation_weights(self) -> list[float]:
        return [v.truncation_weight for v in self.states]

    def concentrations(self, bins: int = 16) -> list[float]:
        """Canonical-phase mass of the arc of width ``2 pi / bins`` centred on 0."""
        h = np.pi / bins
        return [arc_mass(State.pure(v), -h, h) for v in self.states]

    def is_localising(self, bins: int = 16, slack: float = MONOTONE_SLACK) -> bool:
        c = self.concentrations(bins)
        return all(b >= a - slack for a, b in zip(c, c[1:]))


@dataclass(frozen=True)
class CoherenceReport:
    witness_s: float
    witness_r: float
    tolerance: float

    @property
    def verdict(self) -> str:
        if self.witness_s > self.tolerance and self.witness_r > self.tolerance:
            return "mutually-coherent"
        return "mutually-incoherent"

    @property
    def consistent(self) -> bool:
        """Both witnesses fall on the same side of the tolerance."""
        return (self.witness_s > self.tolerance) == (self.witness_r > self.tolerance)


def relational_state(n_s: NumberOperator, n_r: NumberOperator, rho_s: State,
                     rho_r: State) -> State:
    """``tau_*(rho_S (x) rho_R)`` with ``tau`` generated by ``N_S + N_R``."""
    if rho_s.space != n_s.space or rho_r.space != n_r.space:
        raise ShapeError("states do not match their number operators")
    return tau_star(tensor(rho_s, rho_r), composite_number(n_s, n_r))


def mutual_coherence_witness(n_s: NumberOperator, n_r: NumberOperator, rho_s: State,
                             rho_r: State, tolerance: float = WITNESS_TOL) -> CoherenceReport:
    """Distinguishability of a pair from its one-sided dephasings by
    invariant observables.

    Invariant effects are exactly the fixed points of ``tau``, so the best
    invariant distinction between two composite states is the trace distance
    of their ``tau_*`` images.
    """
    base = relational_state(n_s, n_r, rho_s, rho_r)
    ws = trace_distance(base, relational_state(n_s, n_r, tau_star(rho_s, n_s), rho_r))
    wr = trace_distance(base, relational_state(n_s, n_r, rho_s, tau_star(rho_r, n_r)))
    return CoherenceReport(ws, wr, tolerance)


def _check_sequence(ctx: RelativisationContext, seq: LocalisationSequence):
    if seq.dimension != ctx.d_r:
        raise ShapeError(f"sequence dimension {seq.dimension} differs from d_R = {ctx.d_r}")


def absolute_vs_relative(ctx: RelativisationContext, rho_s: State, a: Operator,
                         seq: LocalisationSequence) -> ResultTable:
    """Error of the absolute description ``tr[rho A]`` along a sequence.

    ``err_pointwise`` is ``|tr[rho ((Gamma_phi o yen)(A) - A)]|`` and
    ``err_invariant`` is ``|tr[tau_*(rho (x) P[phi]) yen(A)] - tr[rho A]|``.
    The two agree by duality. ``err_opnorm`` is the operator-norm distance
    ``||(Gamma_phi o yen)(A) - A||``.
    """
    if not a.is_hermitian():
        raise ValueError("observable must be Hermitian")
    _check_sequence(ctx, seq)
    n_s, n_r = ctx.system_number, ctx.reference.number
    absolute = expectation(rho_s, a)
    ya = yen(ctx, a)
    rows = []
    for i, (param, phi) in enumerate(zip(seq.parameters, seq.states)):
        omega = State.pure(phi)
        restricted = gamma_yen(ctx, omega, a)
        e_point = abs(expectation(rho_s, restricted) - absolute)
        rel = relational_state(n_s, n_r, rho_s, omega)
        e_inv = abs(expectation(rel, ya) - absolute)
        e_op = operator_norm(restricted.data - a.data)
        rows.append((i, param, phi.truncation_weight, e_point, e_inv, e_op))
    return ResultTable(
        ("index", "parameter", "truncation_weight", "err_pointwise", "err_invariant",
         "err_opnorm"),
        rows, {"sequence_kind": seq.kind, "path": ctx.path},
        plots=(("parameter", "err_pointwise"), ("parameter", "err_opnorm")))


def derelativised_state_limit(ctx: RelativisationContext, rho_s: State,
                              seq: LocalisationSequence) -> ResultTable:
    """Trace distance between ``yen_*(tau_*(rho (x) P[phi_i]))`` and ``rho``."""
    _check_sequence(ctx, seq)
    n_s, n_r = ctx.system_number, ctx.reference.number
    rows = []
    for i, (param, phi) in enumerate(zip(seq.parameters, seq.states)):
        rel = relational_state(n_s, n_r, rho_s, State.pure(phi))
        delta = trace_distance(yen_star(ctx, rel), rho_s)
        rows.append((i, param, phi.truncation_weight, delta))
    return ResultTable(("index", "parameter", "truncation_weight", "trace_distance"),
                       rows, {"sequence_kind": seq.kind, "path": ctx.path},
                       plots=(("parameter", "trace_distance"),))


def homodyne_compare(ctx: RelativisationContext, beta: complex, seq: LocalisationSequence,
                     bins: int | None = None, truncation_bound: float = 1e-6) -> ResultTable:
    """Absolute phase statistics of ``|beta>`` against relative-phase statistics
    obtained with reference states ``phi_i``.

    For each bin ``X_k``, ``lhs_k = <beta|F_S(X_k)|beta>`` and
    ``rhs_k = tr[yen(F_S(X_k)) tau_*(P[beta (x) phi_i])]``. Rows report the
    total-variation distance between the two distributions, and the contrast
    between the statistics of ``|beta>`` and its dephased version.
    """
    _check_sequence(ctx, seq)
    K = bins or ctx.reference.phase.bin_count
    vec = coherent_state(beta, ctx.d_s, strict=True, bound=truncation_bound)
    rho = State.pure(vec)
    f_s = canonical_phase(ctx.d_s, K)
    lhs = measure_of_state(f_s, rho)
    dephased = measure_of_state(f_s, tau_star(rho, ctx.system_number))
    contrast = 0.5 * float(np.abs(lhs - dephased).sum())
    n_s, n_r = ctx.system_number, ctx.reference.number
    rows, rhs_all = [], []
    for i, (param, phi) in enumerate(zip(seq.parameters, seq.states)):
        rel = relational_state(n_s, n_r, rho, State.pure(phi))
        # tr[yen(E) sigma] = tr[E yen_*(sigma)] avoids forming K composite effects
        rhs = measure_of_state(f_s, yen_star(ctx, rel))
        tv = 0.5 * float(np.abs(lhs - rhs).sum())
        rows.append((i, param, phi.truncation_weight, tv, contrast))
        rhs_all.append([float(x) for x in rhs])
    meta = {"beta": [float(np.real(beta)), float(np.imag(beta))], "bins": K,
            "lhs": [float(x) for x in lhs], "dephased": [float(x) for x in dephased],
            "rhs": rhs_all, "path": ctx.path}
    return ResultTable(("index", "parameter", "truncation_weight", "tv", "contrast"),
                       rows, meta, plots=(("parameter", "tv"),))


def monotone_report(table: ResultTable, column: str, slack: float = MONOTONE_SLACK) -> bool:
    return is_non_increasing(table.column(column), slack)
