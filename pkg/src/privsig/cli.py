"""Command-line harness.

Exit codes: 0 on success, 2 on configuration/schema problems, 3 when a solver
or dynamics run fails to converge. All file outputs land under --out.
"""
from __future__ import annotations

import json
import os
import sys

import click
import numpy as np

from . import multi as multi_mod
from .config import (
    ConfigError,
    GameConfig,
    receiver_policy_from_json,
    receiver_policy_to_json,
    resolve_config,
    sender_policy_from_json,
    sender_policy_to_json,
)
from .dynamics import (
    best_response_dynamics,
    default_initial_pair,
    thresholded_dynamics,
    trajectory_rows,
)
from .game import expected_distortion, leakage, potential, receiver_cost, sender_cost
from .solve import epsilon_nash_check, explicit_equilibrium, sender_best_response
from .sweep import run_sweep, sweep_report

EXIT_CONFIG = 2
EXIT_NO_CONVERGENCE = 3


def _fail_config(exc: ConfigError):
    for line in exc.errors:
        click.echo(f"error: {line}", err=True)
    sys.exit(EXIT_CONFIG)


def _load(config_path: str, seed: int | None, log_base: str | None) -> GameConfig:
    import dataclasses

    cfg = resolve_config(config_path)
    if seed is not None:
        cfg = dataclasses.replace(cfg, seed=seed)
    if log_base is not None:
        cfg = dataclasses.replace(cfg, log_base=log_base)
    return cfg


def _outdir(out: str) -> str:
    os.makedirs(out, exist_ok=True)
    return out


def _write(out: str, name: str, text: str) -> str:
    path = os.path.join(out, name)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return path


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(out: str, name: str, header: list[str], rows: list[tuple]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    return _write(out, name, "\n".join(lines) + "\n")


def _write_trajectory(out: str, report) -> str:
    header = ["k", "mover", "potential", "sender_cost", "receiver_cost", "accepted"]
    return _write_csv(out, "trajectory.csv", header, trajectory_rows(report))


def _json_report(out: str, doc: dict) -> str:
    return _write(out, "report.json", json.dumps(doc, indent=2) + "\n")


config_opt = click.option("--config", "config_path", required=True, help="Config file or bundled preset name.")
out_opt = click.option("--out", default="out", show_default=True, help="Output directory.")
seed_opt = click.option("--seed", type=int, default=None, help="Override the config seed.")
base_opt = click.option(
    "--log-base", type=click.Choice(["nats", "bits"]), default=None, help="Override the config log base."
)


@click.group()
def main():
    """Equilibrium solvers for finite-alphabet privacy signaling games."""


@main.command()
@config_opt
def validate(config_path):
    """Check a config file and report every schema violation."""
    try:
        cfg = resolve_config(config_path)
    except ConfigError as exc:
        _fail_config(exc)
    shape = "x".join(str(s) for s in cfg.joint.shape)
    click.echo(f"config OK: mode={cfg.mode}, joint {shape}, log_base={cfg.log_base}")


@main.command()
@config_opt
@out_opt
@seed_opt
@base_opt
@click.option(
    "--method",
    type=click.Choice(["explicit", "dynamics"]),
    default="explicit",
    show_default=True,
    help="Equilibrium construction to use.",
)
def solve(config_path, out, seed, log_base, method):
    """Compute one equilibrium at the configured scalar rho."""
    try:
        cfg = _load(config_path, seed, log_base)
        rho = cfg.scalar_rho()
        g = cfg.build_single(rho)
    except ConfigError as exc:
        _fail_config(exc)
    out = _outdir(out)

    converged = True
    iterations = 0
    if method == "explicit":
        try:
            alpha, beta = explicit_equilibrium(g, cfg.solver)
        except ValueError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_CONFIG)
        res = sender_best_response(g, beta, cfg.solver)
        converged, iterations = res.converged, res.iterations
    else:
        a0, b0 = default_initial_pair(g)
        rep = thresholded_dynamics(g, a0, b0, cfg.dynamics.epsilon, cfg.solver)
        alpha, beta = rep.final_pair
        converged, iterations = rep.reached_eps_nash, rep.iterations_used

    check = epsilon_nash_check(g, alpha, beta, cfg.dynamics.epsilon, cfg.solver)
    xi = expected_distortion(g, alpha, beta)
    zeta_nats = leakage(g, alpha)
    _write(out, "alpha.json", sender_policy_to_json(alpha))
    _write(out, "beta.json", receiver_policy_to_json(beta))
    _json_report(out, {
        "mode": "single",
        "method": method,
        "rho": rho,
        "log_base": cfg.log_base,
        "expected_distortion": xi,
        "leakage_nats": zeta_nats,
        "leakage_bits": zeta_nats / float(np.log(2.0)),
        "sender_cost": xi + g.rho * zeta_nats,
        "epsilon": cfg.dynamics.epsilon,
        "member": check.member,
        "sender_gap": check.sender_gap,
        "receiver_gap": check.receiver_gap,
        "sender_stationarity_gap": check.sender_stationarity_gap,
        "iterations": iterations,
        "converged": converged,
    })
    click.echo(
        f"rho={rho:g} ({cfg.log_base}): distortion={xi:.6f}, leakage={cfg.report_information(zeta_nats):.6f}"
    )
    if not converged:
        click.echo("error: solver did not converge", err=True)
        sys.exit(EXIT_NO_CONVERGENCE)


@main.command()
@config_opt
@out_opt
@seed_opt
@base_opt
@click.option(
    "--variant",
    type=click.Choice(["plain", "thresholded"]),
    default=None,
    help="Override the config dynamics variant.",
)
def dynamics(config_path, out, seed, log_base, variant):
    """Run best-response play at the configured scalar rho."""
    try:
        cfg = _load(config_path, seed, log_base)
        rho = cfg.scalar_rho()
        g = cfg.build_single(rho)
    except ConfigError as exc:
        _fail_config(exc)
    out = _outdir(out)
    variant = variant or cfg.dynamics.variant
    a0, b0 = default_initial_pair(g)
    if variant == "thresholded":
        rep = thresholded_dynamics(g, a0, b0, cfg.dynamics.epsilon, cfg.solver)
    else:
        rep = best_response_dynamics(
            g, a0, b0, cfg.dynamics.epsilon, cfg.solver, cfg.dynamics.max_rounds
        )
    alpha, beta = rep.final_pair
    _write_trajectory(out, rep)
    _write(out, "alpha.json", sender_policy_to_json(alpha))
    _write(out, "beta.json", receiver_policy_to_json(beta))
    _json_report(out, {
        "mode": "single",
        "variant": variant,
        "rho": rho,
        "log_base": cfg.log_base,
        "epsilon": rep.epsilon,
        "reached_eps_nash": rep.reached_eps_nash,
        "iterations_used": rep.iterations_used,
        "iteration_bound": rep.iteration_bound,
        "potential": potential(g, alpha, beta),
        "expected_distortion": receiver_cost(g, alpha, beta),
        "sender_cost": sender_cost(g, alpha, beta),
    })
    if rep.iteration_bound is not None:
        click.echo(f"iterations used: {rep.iterations_used} (bound: {rep.iteration_bound})")
    else:
        click.echo(f"iterations used: {rep.iterations_used}")
    if not rep.reached_eps_nash:
        click.echo("error: dynamics did not reach an epsilon-equilibrium", err=True)
        sys.exit(EXIT_NO_CONVERGENCE)


@main.command()
@config_opt
@out_opt
@seed_opt
@base_opt
def multi(config_path, out, seed, log_base):
    """Run randomized best-response play for a multi-sender game."""
    try:
        cfg = _load(config_path, seed, log_base)
        rho = cfg.scalar_rho()
        g = cfg.build_multi(rho)
    except ConfigError as exc:
        _fail_config(exc)
    out = _outdir(out)
    alphas0, beta0 = multi_mod.default_initial_state_multi(g)
    rep = multi_mod.random_best_response_dynamics(
        g,
        alphas0,
        beta0,
        cfg.dynamics.epsilon,
        cfg.solver,
        cfg.dynamics.max_rounds,
        cfg.seed,
    )
    alphas, beta = rep.final_pair
    _write_trajectory(out, rep)
    for i, pol in enumerate(alphas.policies, start=1):
        _write(out, f"alpha_{i}.json", sender_policy_to_json(pol))
    _write(out, "beta.json", receiver_policy_to_json(beta))
    audit = multi_mod.epsilon_nash_check_multi(g, alphas, beta, rep.epsilon, cfg.solver)
    _json_report(out, {
        "mode": "multi",
        "n": g.n,
        "rho": rho,
        "log_base": cfg.log_base,
        "seed": cfg.seed,
        "epsilon": rep.epsilon,
        "reached_eps_nash": rep.reached_eps_nash,
        "iterations_used": rep.iterations_used,
        "member": audit.member,
        "receiver_gap": audit.receiver_gap,
        "sender_gaps": list(audit.sender_gaps),
        "expected_distortion": multi_mod.receiver_cost_multi(g, alphas, beta),
        "potential": multi_mod.potential_multi(g, alphas, beta),
        "leakage_nats": [multi_mod.leakage_j(g, alphas, j) for j in range(g.n)],
        "coalition_leakage_nats": [
            multi_mod.coalition_leakage(g, alphas, j) for j in range(g.n)
        ],
    })
    click.echo(
        f"rounds used: {rep.iterations_used}, reached: {rep.reached_eps_nash}, "
        f"distortion: {multi_mod.receiver_cost_multi(g, alphas, beta):.6f}"
    )
    if not rep.reached_eps_nash:
        click.echo("error: dynamics did not reach an epsilon-equilibrium", err=True)
        sys.exit(EXIT_NO_CONVERGENCE)


@main.command()
@config_opt
@out_opt
@seed_opt
@base_opt
@click.option(
    "--method",
    type=click.Choice(["explicit", "dynamics"]),
    default="explicit",
    show_default=True,
    help="Per-point equilibrium construction.",
)
def sweep(config_path, out, seed, log_base, method):
    """Sweep rho over the configured grid and locate the critical ratio."""
    try:
        cfg = _load(config_path, seed, log_base)
        if cfg.mode != "single":
            raise ConfigError(["mode: sweep supports single-sender configs"])
        rows = run_sweep(cfg, method)
    except ConfigError as exc:
        _fail_config(exc)
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    out = _outdir(out)
    header = [
        "rho", "expected_distortion", "mutual_information", "potential",
        "iterations", "converged", "method",
    ]
    _write_csv(out, "sweep.csv", header, [
        (r.rho, r.expected_distortion, r.mutual_information, r.potential,
         r.iterations, r.converged, r.method)
        for r in rows
    ])
    report = sweep_report(cfg, rows, method)
    _json_report(out, report)
    crit = report["critical_rho"]
    click.echo(f"sweep: {len(rows)} points, log_base={cfg.log_base}")
    for base in ("nats", "bits"):
        val = crit.get(base)
        click.echo(f"critical rho ({base}): {'none' if val is None else f'{val:.4f}'}")
    if "nearest_base" in report:
        click.echo(
            f"nearest base to reference {report['reference_critical_rho']:g}: "
            f"{report['nearest_base']}"
        )
    if not report["all_converged"]:
        click.echo("error: some sweep points did not converge", err=True)
        sys.exit(EXIT_NO_CONVERGENCE)


@main.command()
@config_opt
@out_opt
@seed_opt
@base_opt
@click.option("--alpha", "alpha_paths", multiple=True, required=True, help="Sender policy JSON (repeat for multi).")
@click.option("--beta", "beta_path", required=True, help="Receiver policy JSON.")
@click.option("--epsilon", type=float, default=None, help="Override the config epsilon.")
def verify(config_path, out, seed, log_base, alpha_paths, beta_path, epsilon):
    """Check whether saved policies form an epsilon-equilibrium."""
    try:
        cfg = _load(config_path, seed, log_base)
        rho = cfg.scalar_rho()
        eps = epsilon if epsilon is not None else cfg.dynamics.epsilon
        texts = []
        for path in alpha_paths:
            with open(path, "r", encoding="utf-8") as fh:
                texts.append(fh.read())
        with open(beta_path, "r", encoding="utf-8") as fh:
            beta_text = fh.read()
        if cfg.mode == "single":
            if len(texts) != 1:
                raise ConfigError(["alpha: single-sender verify takes exactly one policy"])
            g = cfg.build_single(rho)
            alpha = sender_policy_from_json(texts[0])
            beta = receiver_policy_from_json(beta_text)
            g.check_sender(alpha)
            g.check_receiver(beta)
            check = epsilon_nash_check(g, alpha, beta, eps, cfg.solver)
            doc = {
                "mode": "single",
                "epsilon": eps,
                "member": check.member,
                "sender_gap": check.sender_gap,
                "receiver_gap": check.receiver_gap,
                "sender_stationarity_gap": check.sender_stationarity_gap,
            }
            gaps = f"sender_gap={check.sender_gap:.3e}, receiver_gap={check.receiver_gap:.3e}"
        else:
            g = cfg.build_multi(rho)
            alphas = multi_mod.SenderPolicySet(
                tuple(sender_policy_from_json(t) for t in texts)
            )
            beta = receiver_policy_from_json(beta_text, multi=True)
            check = multi_mod.epsilon_nash_check_multi(g, alphas, beta, eps, cfg.solver)
            doc = {
                "mode": "multi",
                "epsilon": eps,
                "member": check.member,
                "receiver_gap": check.receiver_gap,
                "sender_gaps": list(check.sender_gaps),
            }
            gaps = f"receiver_gap={check.receiver_gap:.3e}, sender_gaps={list(check.sender_gaps)}"
    except ConfigError as exc:
        _fail_config(exc)
    except (OSError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    out = _outdir(out)
    _json_report(out, doc)
    verdict = "PASS" if doc["member"] else "FAIL"
    click.echo(f"epsilon-equilibrium check at eps={eps:g}: {verdict} ({gaps})")


if __name__ == "__main__":
    main()
