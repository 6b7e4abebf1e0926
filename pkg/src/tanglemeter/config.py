"""Flow parameters and tolerances, with JSON loading for the CLI."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass


@dataclass(frozen=True)
class FlowConfig:
    """Parameters of the feedback-controlled reduction flows.

    dt0 is the initial time step of both flows (halved whenever a step
    would decrease the reference population during the unitary flow).
    tol_linear / tol_cubic are the convergence thresholds on the linear
    and third-order coefficients; tol_phase bounds the residual imaginary
    parts after phase fixing; tol_det and tol_gamma control the singular
    branch of the invertible flow.
    """

    dt0: float = 0.1
    tol_linear: float = 1e-9
    tol_phase: float = 1e-9
    max_iters: int = 50_000
    tol_cubic: float = 1e-9
    tol_det: float = 1e-8
    tol_gamma: float = 1e-7

    def replace(self, **kwargs):
        return dataclasses.replace(self, **kwargs)


# Tolerances that live outside the flow loops; the CLI config file may
# override any of them.
DEFAULT_EPS_REF = 1e-10       # reference-population guard in nilpotential()
DEFAULT_TOL_CRITERION = 1e-9  # bipartition entanglement criterion
DEFAULT_TOL_CLASS = 1e-7      # class-template matching
DEFAULT_TOL_RADICAND = 1e-10  # GHZ-limit branch switch in reconstruction

_FLOW_KEYS = {f.name for f in dataclasses.fields(FlowConfig)}
_EXTRA_KEYS = {"eps_ref", "tol_criterion", "tol_class", "tol_radicand"}


@dataclass(frozen=True)
class ToolConfig:
    """Full configuration: flow parameters plus module-level tolerances."""

    flow: FlowConfig = FlowConfig()
    eps_ref: float = DEFAULT_EPS_REF
    tol_criterion: float = DEFAULT_TOL_CRITERION
    tol_class: float = DEFAULT_TOL_CLASS
    tol_radicand: float = DEFAULT_TOL_RADICAND

    def to_dict(self):
        out = dataclasses.asdict(self.flow)
        out.update(
            eps_ref=self.eps_ref,
            tol_criterion=self.tol_criterion,
            tol_class=self.tol_class,
            tol_radicand=self.tol_radicand,
        )
        return out

    @classmethod
    def from_dict(cls, data):
        unknown = set(data) - _FLOW_KEYS - _EXTRA_KEYS
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        flow = FlowConfig(**{k: data[k] for k in data if k in _FLOW_KEYS})
        extra = {k: data[k] for k in data if k in _EXTRA_KEYS}
        return cls(flow=flow, **extra)

    @classmethod
    def from_json_file(cls, path):
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ValueError("config file must contain a JSON object")
        return cls.from_dict(data)
