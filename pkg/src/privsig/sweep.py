"""Privacy-ratio sweeps and the critical-ratio search."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from .config import GameConfig, SweepSpec
from .dynamics import default_initial_pair, thresholded_dynamics
from .game import ReceiverPolicy, expected_distortion, leakage
from .solve import sender_best_response

#: Distortion at or below this counts as "zero" when locating the transition.
ZERO_DISTORTION = 1e-3
#: Width the critical-ratio bracket is bisected down to.
CRITICAL_WIDTH = 1e-3


@dataclass(frozen=True)
class SweepRow:
    rho: float
    expected_distortion: float
    mutual_information: float
    potential: float
    iterations: int
    converged: bool
    method: str


def _point(cfg: GameConfig, rho: float, method: str) -> SweepRow:
    g = cfg.build_single(rho)
    if method == "explicit":
        if g.y_space.size != g.x_space.size:
            raise ValueError("explicit method needs message alphabet = state alphabet")
        beta = ReceiverPolicy.identity(g.x_space.size)
        res = sender_best_response(g, beta, cfg.solver)
        alpha = res.policy
        iterations, converged = res.iterations, res.converged
    elif method == "dynamics":
        a0, b0 = default_initial_pair(g)
        rep = thresholded_dynamics(g, a0, b0, cfg.dynamics.epsilon, cfg.solver)
        alpha, beta = rep.final_pair
        iterations, converged = rep.iterations_used, rep.reached_eps_nash
    else:
        raise ValueError(f"unknown sweep method {method!r}")
    xi = expected_distortion(g, alpha, beta)
    zeta = cfg.report_information(leakage(g, alpha))
    return SweepRow(float(rho), xi, zeta, xi + rho * zeta, iterations, converged, method)


def run_sweep(cfg: GameConfig, method: str = "explicit") -> list[SweepRow]:
    """Solve the game across the configured rho grid, rows in rho order."""
    if not isinstance(cfg.rho, SweepSpec):
        raise ValueError("config rho must be a sweep specification")
    return [_point(cfg, float(r), method) for r in cfg.rho.grid()]


def _bisect_critical(cfg: GameConfig, method: str, lo: float, hi: float) -> float:
    while hi - lo > CRITICAL_WIDTH:
        mid = 0.5 * (lo + hi)
        if _point(cfg, mid, method).expected_distortion <= ZERO_DISTORTION:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def critical_rho_from_rows(cfg: GameConfig, rows: list[SweepRow], method: str) -> float | None:
    """Bisection-refined rho where distortion first departs from zero.

    Returns None when the grid shows no transition (all-zero or never-zero).
    """
    lo = None
    for i, row in enumerate(rows):
        if row.expected_distortion <= ZERO_DISTORTION:
            if i + 1 < len(rows) and rows[i + 1].expected_distortion > ZERO_DISTORTION:
                lo = i
    if lo is None:
        return None
    return _bisect_critical(cfg, method, rows[lo].rho, rows[lo + 1].rho)


def critical_rho_scan(cfg: GameConfig, method: str = "explicit", points: int = 26) -> float | None:
    """Locate the critical ratio with a coarse scan plus bisection."""
    if not isinstance(cfg.rho, SweepSpec):
        raise ValueError("config rho must be a sweep specification")
    spec = dataclasses.replace(cfg.rho, steps=points)
    coarse = [_point(cfg, float(r), method) for r in spec.grid()]
    return critical_rho_from_rows(cfg, coarse, method)


def sweep_report(cfg: GameConfig, rows: list[SweepRow], method: str) -> dict:
    """Summary for report.json: critical ratio under both log bases."""
    critical = {cfg.log_base: critical_rho_from_rows(cfg, rows, method)}
    other = "bits" if cfg.log_base == "nats" else "nats"
    critical[other] = critical_rho_scan(dataclasses.replace(cfg, log_base=other), method)
    report = {
        "log_base": cfg.log_base,
        "method": method,
        "points": len(rows),
        "rho_start": rows[0].rho if rows else None,
        "rho_stop": rows[-1].rho if rows else None,
        "critical_rho": critical,
        "all_converged": all(r.converged for r in rows),
    }
    if cfg.reference_critical_rho is not None:
        report["reference_critical_rho"] = cfg.reference_critical_rho
        found = {b: v for b, v in critical.items() if v is not None}
        if found:
            report["nearest_base"] = min(
                found, key=lambda b: abs(found[b] - cfg.reference_critical_rho)
            )
    return report
