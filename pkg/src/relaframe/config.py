"""Experiment configuration documents.

A config is a YAML (or JSON) mapping::

    experiment: convergence        # see EXPERIMENTS
    model: canonical               # or cyclic
    dims: {system: 2, reference: 64}
    bins: 16                       # default 4 * dims.system
    sequence: {kind: coherent-amplitude, values: [1, 2, 4, 8]}
    states:
      system: {kind: plus}
      reference: {kind: coherent, amplitude: 2.0, phase: 0.0}
    tolerances: {witness: 1.0e-8}
    seed: 0
    trials: 20
    output: {format: csv, path: results.csv}

Unknown keys are rejected. Every violation is reported, not just the first.
"""
from __future__ import annotations

from typing import Annotated, Literal, Union

import yaml
from pydantic import (BaseModel, ConfigDict, Field, NonNegativeInt, PositiveFloat,
                      PositiveInt, model_validator)
from pydantic import ValidationError as PydanticValidationError

from .errors import ParseError, ValidationError

EXPERIMENTS = ("convergence", "derelativise", "twirl-check", "mutual-coherence",
               "homodyne", "structure-suite")


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class NumberSpec(_Strict):
    kind: Literal["number"]
    n: NonNegativeInt = 0
    dephase: bool = False


class CoherentSpec(_Strict):
    kind: Literal["coherent"]
    amplitude: float = Field(ge=0)
    phase: float = 0.0
    dephase: bool = False


class PlusSpec(_Strict):
    kind: Literal["plus"]
    dephase: bool = False


class RandomSpec(_Strict):
    kind: Literal["random"]
    seed: int
    rank: PositiveInt | None = None
    dephase: bool = False


StateSpec = Annotated[Union[NumberSpec, CoherentSpec, PlusSpec, RandomSpec],
                      Field(discriminator="kind")]


class Dims(_Strict):
    system: PositiveInt
    reference: PositiveInt = 64


class SequenceSpec(_Strict):
    kind: Literal["coherent-amplitude", "phase-peaked"] = "coherent-amplitude"
    values: list[PositiveFloat] = Field(default=[1.0, 2.0, 4.0, 8.0], min_length=1)


class States(_Strict):
    system: StateSpec = PlusSpec(kind="plus")
    reference: StateSpec = CoherentSpec(kind="coherent", amplitude=2.0)


class Tolerances(_Strict):
    structural: PositiveFloat = 1e-10
    witness: PositiveFloat = 1e-8
    monotone_slack: PositiveFloat = 1e-6
    truncation: PositiveFloat = 1e-6


class Output(_Strict):
    format: Literal["csv", "json", "plotdata"] = "csv"
    path: str | None = None


class ExperimentConfig(_Strict):
    experiment: Literal[EXPERIMENTS]  # type: ignore[valid-type]
    model: Literal["canonical", "cyclic"] = "canonical"
    dims: Dims
    bins: PositiveInt | None = None
    sequence: SequenceSpec = SequenceSpec()
    states: States = States()
    tolerances: Tolerances = Tolerances()
    seed: int = 0
    trials: PositiveInt = 20
    output: Output = Output()

    @model_validator(mode="after")
    def _defaults(self):
        if self.bins is None:
            object.__setattr__(self, "bins", 4 * self.dims.system)
        return self

    def effective(self) -> dict:
        """The full config with defaults materialised, JSON-compatible."""
        return self.model_dump(mode="json")


def _semantic_errors(cfg: ExperimentConfig) -> list[tuple[str, str]]:
    errors = []
    d = {"system": cfg.dims.system, "reference": cfg.dims.reference}
    for side in ("system", "reference"):
        spec = getattr(cfg.states, side)
        if spec.kind == "number" and spec.n >= d[side]:
            errors.append((f"states.{side}.n",
                           f"number eigenstate {spec.n} does not fit dimension {d[side]}"))
        if spec.kind == "random" and spec.rank is not None and spec.rank > d[side]:
            errors.append((f"states.{side}.rank",
                           f"rank {spec.rank} exceeds dimension {d[side]}"))
    if cfg.experiment == "homodyne":
        if cfg.states.system.kind != "coherent":
            errors.append(("states.system.kind",
                           "homodyne needs a coherent system state"))
        if cfg.model != "canonical":
            errors.append(("model", "homodyne compares canonical phase statistics; "
                                    "use model 'canonical'"))
    return errors


def _format_pydantic(exc: PydanticValidationError) -> list[tuple[str, str]]:
    out = []
    for err in exc.errors():
        loc = ".".join(str(p) for p in err["loc"])
        msg = err["msg"]
        if err["type"] not in ("missing", "extra_forbidden") and "input" in err:
            msg = f"{msg} (got {err['input']!r})"
        if err["type"] == "extra_forbidden":
            msg = "unknown key"
        out.append((loc, msg))
    return out


def load_document(text: bytes | str) -> dict:
    """Parse structured text into a mapping, raising :class:`ParseError`."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"config is not valid UTF-8: {exc}") from exc
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ParseError(f"malformed config: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError(f"config must be a mapping at top level, got {type(doc).__name__}")
    return doc


def validate_document(doc: dict) -> ExperimentConfig:
    try:
        cfg = ExperimentConfig.model_validate(doc)
    except PydanticValidationError as exc:
        raise ValidationError(_format_pydantic(exc)) from None
    errors = _semantic_errors(cfg)
    if errors:
        raise ValidationError(errors)
    return cfg


def parse_config(text: bytes | str) -> ExperimentConfig:
    return validate_document(load_document(text))
