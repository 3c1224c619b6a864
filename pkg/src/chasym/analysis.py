"""Norm metrics, decay powers, convergence rates, and report persistence.

Per-region comparison of a numerical snapshot against the matched asymptotic
evaluator: L2 by the trapezoid rule over the grid nodes inside the region,
sup as the max over the same nodes.  The fast-decay sector and the outer
soliton sectors compare against zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import asymptotics
from .painleve import PiiFamily, PiiSolution, solve_bvp
from .spatial_schemes import GridField

__all__ = [
    "RegionNorms",
    "ComparisonReport",
    "DecayEstimate",
    "build_evaluators",
    "region_norms",
    "decay_power",
    "rate_of_convergence",
    "report_to_json",
    "write_region_csv",
]


@dataclass(frozen=True)
class RegionNorms:
    label: str
    x_lo: float
    x_hi: float
    n_points: int
    e_l2: float | None
    e_sup: float | None


@dataclass(frozen=True)
class ComparisonReport:
    t: float
    q0: float
    epsilon: float
    C: float
    regions: tuple[RegionNorms, ...]

    def region(self, label: str) -> RegionNorms:
        for r in self.regions:
            if r.label == label:
                return r
        raise KeyError(label)


def build_evaluators(q0: float,
                     pii_trans1: PiiSolution | None = None,
                     pii_trans2: PiiSolution | None = None) -> dict:
    """Map region label -> vectorised evaluator u_asym(x_array, t).

    The Painleve solutions may be passed in (one BVP solve serves every
    snapshot); missing ones are solved on first use.
    """
    solutions = {"trans1": pii_trans1, "trans2": pii_trans2}

    def trans_solution(label: str) -> PiiSolution:
        if solutions[label] is None:
            if label == "trans1":
                solutions[label] = solve_bvp(PiiFamily.HASTINGS_MCLEOD, 1.0)
            else:
                r = asymptotics.transition2_reflection_modulus(q0)
                solutions[label] = solve_bvp(PiiFamily.ABLOWITZ_SEGUR, r)
        return solutions[label]

    def zeros(x, t):
        return np.zeros_like(np.asarray(x, dtype=float))

    def soliton(x, t):
        return np.array([asymptotics.eval_soliton(xi, t, q0) for xi in x])

    def osc1(x, t):
        return np.array([asymptotics.eval_region2(xi, t, q0) for xi in x])

    def osc2(x, t):
        return np.array([asymptotics.eval_region3(xi, t, q0) for xi in x])

    def trans1(x, t):
        sol = trans_solution("trans1")
        return np.array([asymptotics.eval_transition1(xi, t, q0, sol) for xi in x])

    def trans2(x, t):
        sol = trans_solution("trans2")
        return np.array([asymptotics.eval_transition2(xi, t, q0, sol) for xi in x])

    return {
        "soliton_i1": soliton,
        "soliton_i2": zeros,
        "osc1": osc1,
        "osc2": osc2,
        "fast_decay": zeros,
        "trans1": trans1,
        "trans2": trans2,
    }


def _interval_metrics(u_num: GridField, t: float, lo: float, hi: float,
                      evaluator) -> tuple[int, float, float, np.ndarray | None]:
    x = u_num.x
    mask = (x >= lo) & (x < hi)
    n = int(mask.sum())
    if n == 0:
        return 0, math.nan, math.nan, None
    xs = x[mask]
    diff = u_num.values[mask] - evaluator(xs, t)
    e_sup = float(np.max(np.abs(diff)))
    e_l2sq = float(np.trapezoid(diff * diff, xs)) if n > 1 else 0.0
    return n, e_l2sq, e_sup, diff


def region_norms(u_num: GridField, t: float,
                 partition: asymptotics.RegionPartition,
                 evaluators: dict) -> ComparisonReport:
    """Per-region L2/sup differences between snapshot and asymptotics.

    The two sectors of ``soliton_i2`` are reported as separate rows
    (``soliton_i2_left`` / ``soliton_i2_right``); regions without grid nodes
    are recorded with n_points = 0 and omitted norms.
    """
    rows = []
    for label in asymptotics.REGION_LABELS:
        ev = evaluators[label]
        pieces = partition.interval_list(label)
        names = ([label] if len(pieces) == 1 else
                 [f"{label}_left", f"{label}_right"])
        for name, (lo, hi) in zip(names, pieces):
            n, e_l2sq, e_sup, _ = _interval_metrics(u_num, t, lo, hi, ev)
            if n == 0:
                rows.append(RegionNorms(name, lo, hi, 0, None, None))
            else:
                rows.append(RegionNorms(name, lo, hi, n,
                                        math.sqrt(e_l2sq), e_sup))
    return ComparisonReport(t=t, q0=partition.q0, epsilon=partition.epsilon,
                            C=partition.C, regions=tuple(rows))


@dataclass(frozen=True)
class DecayEstimate:
    label: str
    T: float
    E_at_T: float
    power: float
    kind: str  # "L" for regions i/iv, "A" for the oscillatory regions


def decay_power(E_at_T: float, T: float, kind: str, label: str = "") -> DecayEstimate:
    """Numerical decay power -log E(T)/log T (unit-constant convention)."""
    if kind not in ("L", "A"):
        raise ValueError("decay_power: kind must be 'L' or 'A'")
    if not E_at_T > 0.0:
        raise ValueError("decay_power: E must be positive")
    if not T > 1.0:
        raise ValueError("decay_power: T must exceed 1")
    return DecayEstimate(label=label, T=T, E_at_T=E_at_T,
                         power=-math.log(E_at_T) / math.log(T), kind=kind)


def rate_of_convergence(series) -> float:
    """Least-squares slope of -log E against log t over the given window."""
    pts = [(float(t), float(e)) for t, e in series]
    if len(pts) < 3:
        raise ValueError("rate_of_convergence: need at least 3 points")
    ts = np.array([p[0] for p in pts])
    es = np.array([p[1] for p in pts])
    if np.any(es <= 0.0):
        raise ValueError("rate_of_convergence: all E must be positive")
    if np.any(np.diff(ts) <= 0.0):
        raise ValueError("rate_of_convergence: t must be increasing")
    lx = np.log(ts)
    ly = -np.log(es)
    lx0 = lx - lx.mean()
    denom = float(lx0 @ lx0)
    if denom == 0.0:
        raise ValueError("rate_of_convergence: degenerate abscissae")
    return float(lx0 @ (ly - ly.mean())) / denom


# ---------------------------------------------------------------------------
# persistence (deterministic formatting: fixed key order, 15 significant digits)
# ---------------------------------------------------------------------------

def _fmt(x) -> str:
    if x is None:
        return "null"
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    v = float(x)
    if math.isnan(v):
        return "null"
    if math.isinf(v):
        return '"inf"' if v > 0 else '"-inf"'
    return f"{v:.15g}"


def report_to_json(report: ComparisonReport) -> str:
    lines = ["{"]
    lines.append(f'  "t": {_fmt(report.t)},')
    lines.append(f'  "q0": {_fmt(report.q0)},')
    lines.append(f'  "epsilon": {_fmt(report.epsilon)},')
    lines.append(f'  "C": {_fmt(report.C)},')
    lines.append('  "regions": [')
    rows = []
    for r in report.regions:
        rows.append('    {"label": "%s", "x_lo": %s, "x_hi": %s, '
                    '"n_points": %d, "e_l2": %s, "e_sup": %s}'
                    % (r.label, _fmt(r.x_lo), _fmt(r.x_hi), r.n_points,
                       _fmt(r.e_l2), _fmt(r.e_sup)))
    lines.append(",\n".join(rows))
    lines.append("  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_region_csv(u_num: GridField, t: float,
                     partition: asymptotics.RegionPartition,
                     evaluators: dict, path: str) -> None:
    """Batch dump ``x,u_num,u_asym,region`` over every populated region."""
    x = u_num.x
    with open(path, "w", encoding="ascii") as fh:
        fh.write("x,u_num,u_asym,region\n")
        for label in asymptotics.REGION_LABELS:
            ev = evaluators[label]
            pieces = partition.interval_list(label)
            names = ([label] if len(pieces) == 1 else
                     [f"{label}_left", f"{label}_right"])
            for name, (lo, hi) in zip(names, pieces):
                mask = (x >= lo) & (x < hi)
                if not mask.any():
                    continue
                xs = x[mask]
                ua = ev(xs, t)
                for xi, un, ua_i in zip(xs, u_num.values[mask], ua):
                    fh.write(f"{xi:.17g},{un:.17g},{ua_i:.17g},{name}\n")
