"""Epoch-managed solver loop: local constants, truncation, margin transitions."""

from __future__ import annotations

import math
import time

import numpy as np

from .agp import a_agp
from .core import (CountingOracle, IterationRecord, ObjectiveOracle, RunResult,
                   SloConfig, Subroutine, Termination, as_vector)
from .lipschitz import estimate_l1, estimate_l2
from .subroutines import LsParams, a_gp, a_ls, a_ng


class ContractViolation(RuntimeError):
    """A subroutine returned a point outside the epoch ball."""


def _epoch_constants(oracle, anchor, config: SloConfig, tau: int):
    """L1/L2 for the epoch, with the sampled-estimate safety factor applied."""
    sub = config.subroutine
    if sub is Subroutine.LS:
        return None, None, 1.0, 1.0
    ball = 3.0 * config.radius_D if sub is Subroutine.AGP else config.radius_D
    seed = (config.seed, tau)
    est1 = estimate_l1(oracle, anchor, ball, config.n_lipschitz_samples, seed)
    l1 = est1.value * (config.lipschitz_safety if est1.method == "sampled" else 1.0)
    est2, l2 = None, None
    if sub is Subroutine.AGP:
        est2 = estimate_l2(oracle, anchor, ball, config.n_lipschitz_samples, seed)
        l2 = est2.value * (config.lipschitz_safety if est2.method == "sampled" else 1.0)
    return est1, est2, max(1.0, l1), (max(1.0, l2) if l2 is not None else None)


def run_slo(oracle: ObjectiveOracle, x_start, config: SloConfig) -> RunResult:
    """Run the epoch framework with the configured subroutine until the
    gradient tolerance or a budget is reached."""
    counting = CountingOracle(oracle)
    x = as_vector(x_start).copy()
    root_eps = math.sqrt(config.epsilon)
    D, d = config.radius_D, config.margin_d
    slack = 1e-12 * max(1.0, D)
    t0 = time.monotonic()
    trace: list[IterationRecord] = []
    epochs_completed = 0
    termination = Termination.EpochBudget
    ls_params = LsParams(config.ls_sigma, config.ls_theta, config.ls_delta_bar,
                         config.ls_alpha, config.ls_max_backtracks)

    def record(tau, k, anchor, g_norm):
        trace.append(IterationRecord(
            epoch=tau, iter=k,
            f_value=counting.base.value(x),
            grad_norm=g_norm,
            dist_from_anchor=float(np.linalg.norm(x - anchor)),
            cum_grad_evals=counting.grad_evals,
            elapsed_s=time.monotonic() - t0,
        ))

    final_g = math.inf
    for tau in range(1, config.max_epochs + 1):
        anchor = x.copy()
        _, _, l1, l2 = _epoch_constants(counting, anchor, config, tau)
        k = 0
        while True:
            g = counting.gradient(x)
            final_g = float(np.linalg.norm(g))
            record(tau, k, anchor, final_g)
            if final_g < root_eps:
                return RunResult(x, final_g, Termination.GradientTolerance,
                                 trace, epochs_completed)
            if counting.grad_evals >= config.max_total_grad_evals:
                return RunResult(x, final_g, Termination.EvalBudget,
                                 trace, epochs_completed)
            if config.time_budget_s is not None and time.monotonic() - t0 > config.time_budget_s:
                return RunResult(x, final_g, Termination.TimeBudget,
                                 trace, epochs_completed)
            sub = config.subroutine
            if sub is Subroutine.GP:
                x_next = a_gp(counting, x, anchor, 1.0 / l1, D, grad=g)
            elif sub is Subroutine.NGD:
                x_next = a_ng(counting, x, l1, d, grad=g)
            elif sub is Subroutine.LS:
                x_next, _, _ = a_ls(counting, x, -g, ls_params, grad=g)
            else:
                x_next, _ = a_agp(counting, x, l1, l2, anchor, D, config.epsilon)
            dist = float(np.linalg.norm(x_next - anchor))
            if dist > D + slack:
                raise ContractViolation(
                    f"subroutine produced a point at distance {dist:g} > D = {D:g}"
                )
            x = x_next
            k += 1
            if dist >= D - d - slack:
                # the iterate entered the margin shell; close the epoch
                epochs_completed += 1
                break
    # epoch budget exhausted; log the final point before returning
    final_g = float(np.linalg.norm(counting.gradient(x)))
    record(config.max_epochs + 1, 0, x, final_g)
    if final_g < root_eps:
        termination = Termination.GradientTolerance
    return RunResult(x, final_g, termination, trace, epochs_completed)


def epoch_descent_floor(config: SloConfig) -> float:
    """Theoretical per-epoch objective drop for completed epochs."""
    root_eps = math.sqrt(config.epsilon)
    if config.subroutine in (Subroutine.GP, Subroutine.NGD):
        return root_eps * config.radius_D / 4.0
    if config.subroutine is Subroutine.AGP:
        return root_eps * config.radius_D / 32.0
    return 0.0  # LS epochs are single Armijo steps; only monotonicity is owed


def check_epoch_descent(result: RunResult, config: SloConfig) -> list[float]:
    """Per completed epoch: achieved f-drop minus the theoretical floor.

    Entries should all be >= -1e-10 on a valid run. The terminal partial
    epoch is excluded.
    """
    starts = {}
    for rec in result.trace:
        if rec.iter == 0 and rec.epoch not in starts:
            starts[rec.epoch] = rec.f_value
    floor = epoch_descent_floor(config)
    margins = []
    for tau in range(1, result.epochs_completed + 1):
        if tau not in starts or (tau + 1) not in starts:
            raise ValueError(f"trace is missing the start of epoch {tau} or {tau + 1}")
        margins.append((starts[tau] - starts[tau + 1]) - floor)
    return margins
