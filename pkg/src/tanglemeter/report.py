"""Assembly of the JSON analysis report for one state.

The report is a plain dict of JSON-serializable values (complex numbers
as [re, im] pairs) and round-trips losslessly through json.dumps /
json.loads.
"""

from __future__ import annotations

import numpy as np

from .classification import classify
from .config import ToolConfig
from .errors import ConvergenceError, ReconstructionError
from .invariants import canonic_amplitudes, invariants3, invariants4
from .measures import k4_from_canonic, kappa4, s2
from .sl_reduction import gammas, reduce_sl
from .su_reduction import reduce_su

__all__ = ["analyze_state", "AnalysisError"]


class AnalysisError(RuntimeError):
    pass


def _c(z):
    return [float(np.real(z)), float(np.imag(z))]


def _cvec(values):
    return [_c(z) for z in values]


def analyze_state(state, config=None, source="<state>", seed=None):
    """Full pipeline report for a three- or four-qubit state."""
    config = config or ToolConfig()
    cfg = config.flow
    report = {
        "input": {
            "source": str(source),
            "n": state.n,
            "amps": _cvec(state.amps),
        },
        "seed": seed,
        "config": config.to_dict(),
    }
    su, _op = reduce_su(state, cfg)
    report["su_tanglemeter"] = {
        "coeffs": _cvec(su.poly.coeffs),
        "achieved_population": su.achieved_population,
        "iterations": su.iterations,
        "residual": su.residual,
    }
    if state.n == 3:
        inv = invariants3(state.normalized())
        report["invariants"] = {
            "i1": inv.i1, "i2": inv.i2, "i3": inv.i3,
            "i45": _c(inv.i45), "tau": inv.tau,
        }
        return report
    if state.n != 4:
        raise AnalysisError("analysis is implemented for n in {3, 4}")

    spectrum = gammas(su, tol_gamma=cfg.tol_gamma)
    sl, _slop = reduce_sl(su, cfg)
    sl_block = {
        "family": sl.family,
        "coeffs": _cvec(sl.poly.coeffs),
        "iterations": sl.iterations,
        "residual": sl.residual,
        "gammas": _cvec(spectrum.gammas),
        "d4": _c(spectrum.d4),
        "zero_count": spectrum.zero_count,
    }
    if sl.family == "general":
        sl_block["betas"] = _cvec(sl.betas)
    if sl.family.startswith("special"):
        sl_block["fit_params"] = _cvec(sl.fit_params)
        sl_block["fit_residual"] = sl.fit_residual
    report["sl_tanglemeter"] = sl_block

    inv = invariants4(state.normalized(), tol_radicand=config.tol_radicand)
    report["invariants"] = {
        "i2": _c(inv.i2),
        "i4": _cvec(inv.i4),
        "i6": _cvec(inv.i6),
        "q_roots": _cvec(inv.q_roots),
        "chosen_q": None if inv.chosen_q is None else _c(inv.chosen_q),
    }

    label = classify(sl, spectrum, tol_class=config.tol_class)
    report["classification"] = {
        "tag": label.tag,
        "params": _cvec(label.params),
        "residual": label.residual,
        "masks": list(label.masks),
    }

    measures = {
        "kappa4": _c(kappa4(su.state)),
        "k4": k4_from_canonic(su.state),
        "class_label": label.tag,
    }
    if sl.family == "general":
        measures["s2"] = s2(sl)
    try:
        amps = canonic_amplitudes(inv, tol_radicand=config.tol_radicand)
        s1 = float(np.sum(np.abs(amps) ** 2))
        measures["s1"] = s1
        measures["nonunitarity"] = abs(float(np.log(s1)))
    except ReconstructionError as err:
        measures["s1"] = None
        measures["nonunitarity"] = None
        measures["s1_error"] = str(err)
    report["measures"] = measures
    return report
