"""Iterative joint designs: alternating precoder/phase optimization, per-element
phase coordinate descent, the large-array two-route pipeline, UE-surface
association, and greedy surface on/off selection for energy efficiency.

All procedures are deterministic given (links, config, seed) and record their
objective trajectory verbatim in an :class:`OptimizationTrace`.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .arrays import LinkSet
from .metrics import (
    PowerModelParams,
    SystemState,
    bs_transmit_power,
    sinr_streams,
    total_power,
)
from .precoding import (
    IllConditionedChannel,
    PowerBudget,
    Precoder,
    best_rpl_beam,
    mf_precoder,
    power_split_rho,
    uniform_beta,
    waterfill_beta,
    zf_precoder,
)
from .ris import (
    ReflectionMatrix,
    coherent_phases_given_beam,
    combine_psi_average,
    combine_psi_partition,
    ris_transmit_power,
)

__all__ = [
    "OptimizerConfig",
    "OptimizationTrace",
    "OBJECTIVES",
    "alternating_optimize",
    "phase_coordinate_descent",
    "massive_design",
    "associate_ues",
    "ee_onoff_greedy",
    "zf_active_ris_iterate",
    "design_combiners",
]

OBJECTIVES = ("sum_rate", "min_power", "energy_efficiency")
ALLOCATIONS = ("waterfill", "uniform")
COMBINE_MODES = ("average", "partition")

_SIGN = {"sum_rate": 1.0, "min_power": -1.0, "energy_efficiency": 1.0}
_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0
_LN2 = np.log(2.0)


@dataclass(frozen=True)
class OptimizerConfig:
    """Knobs shared by every iterative design procedure.

    objective selects what traces record and what coordinate steps maximize
    (min_power is minimized); allocation picks the BS power split used inside
    the zero-forcing step; zf_constrained_phase_step keeps the zero-forcing
    and power constraints imposed during phase updates (setting it False
    scores phase candidates against the frozen precoder instead, re-solving
    only afterwards, so traces are recorded verbatim without a monotonicity
    guarantee).
    """

    max_iters: int = 100
    rel_tolerance: float = 1e-6
    phase_grid_points: int = 64
    rng_seed: int | None = None
    objective: str = "sum_rate"
    allocation: str = "waterfill"
    zf_constrained_phase_step: bool = True
    refine_iters: int = 32
    target_sinr: float = 1.0
    power_params: PowerModelParams | None = None
    combine: str = "average"
    final_zf: bool = True

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.rel_tolerance <= 0:
            raise ValueError("rel_tolerance must be positive")
        if self.phase_grid_points < 8:
            raise ValueError("phase_grid_points must be at least 8")
        if self.objective not in OBJECTIVES:
            raise ValueError(f"objective must be one of {OBJECTIVES}")
        if self.allocation not in ALLOCATIONS:
            raise ValueError(f"allocation must be one of {ALLOCATIONS}")
        if self.refine_iters < 0:
            raise ValueError("refine_iters must be non-negative")
        if self.target_sinr <= 0:
            raise ValueError("target_sinr must be positive")
        if self.combine not in COMBINE_MODES:
            raise ValueError(f"combine must be one of {COMBINE_MODES}")


@dataclass
class OptimizationTrace:
    """Objective trajectory of one optimization run, recorded verbatim."""

    objective: str
    objective_values: list[float] = field(default_factory=list)
    converged: bool = False
    iterations: int = 0
    rng_seed: int | None = None
    failure: str | None = None
    final_state: SystemState | None = None


def _as_groups(links) -> list[list[LinkSet]]:
    """Normalize links to a [surface][ue] nesting (flat list = one surface)."""
    if isinstance(links, LinkSet):
        return [[links]]
    links = list(links)
    if not links:
        raise ValueError("links must be non-empty")
    if all(isinstance(item, LinkSet) for item in links):
        return [links]
    groups = [list(row) for row in links]
    if any(len(row) != len(groups[0]) for row in groups) or not groups[0]:
        raise ValueError("nested links must list the same UEs per surface")
    return groups


def design_combiners(groups: list[list[LinkSet]]) -> list[np.ndarray]:
    """Receive vectors designed from the surface-side channels alone.

    UE k gets the dominant left singular vector of its stacked h2 blocks, so
    the combiner never depends on the reflection pattern or the precoder.
    """
    num_ris, num_ue = len(groups), len(groups[0])
    v = groups[0][0].num_ue_antennas
    out = []
    for k in range(num_ue):
        if v == 1:
            out.append(np.ones((1, 1), dtype=complex))
            continue
        stack = np.concatenate([groups[u][k].h2 for u in range(num_ris)], axis=1)
        if not np.any(stack):
            out.append(np.full((v, 1), 1.0 / np.sqrt(v), dtype=complex))
            continue
        left, _, _ = np.linalg.svd(stack)
        out.append(left[:, :1])
    return out


def _effective_rows(groups, psi_list, combiners, kappa):
    """Per-UE combined row channels w_k^H H_k and effective noise levels."""
    num_ris, num_ue = len(groups), len(groups[0])
    rows, noise = [], []
    for k in range(num_ue):
        w = combiners[k][:, 0]
        link0 = groups[0][k]
        row = w.conj() @ link0.h0
        n_k = link0.sigma2_w * float(np.sum(np.abs(w) ** 2))
        for u in range(num_ris):
            if kappa[u, k] == 0.0:
                continue
            link = groups[u][k]
            psi = psi_list[u]
            if psi.is_diagonal:
                scat = w.conj() @ (link.h2 * psi.values[None, :])
            else:
                scat = w.conj() @ link.h2 @ psi.as_matrix()
            row = row + scat @ link.h1
            if link.sigma_r2_w > 0:
                n_k += link.sigma_r2_w * float(np.sum(np.abs(scat) ** 2))
        rows.append(row)
        noise.append(n_k)
    return np.vstack(rows), np.asarray(noise)


def _zf_state(groups, psi_list, combiners, budgets, config, kappa=None):
    """Zero-forcing precoder + power allocation for fixed reflections.

    Returns (state, objective value). The value is exact for the constructed
    state because zero forcing renders per-UE SINR beta_k / noise_k.
    """
    num_ris, num_ue = len(groups), len(groups[0])
    if kappa is None:
        kappa = np.ones((num_ris, num_ue))
    heff, noise = _effective_rows(groups, psi_list, combiners, kappa)
    f_tilde = zf_precoder(heff)
    cost = np.sum(np.abs(f_tilde) ** 2, axis=0)
    if config.objective == "min_power":
        beta = config.target_sinr * noise
    elif config.allocation == "waterfill":
        beta = waterfill_beta(cost, noise, budgets.p_bs_max_w)
    else:
        beta = np.full(num_ue, uniform_beta(heff, budgets.p_bs_max_w))
    precoder = Precoder(f_tilde, beta)
    state = SystemState(
        links=groups,
        psi=list(psi_list),
        precoder=precoder,
        combiners=combiners,
        kappa=np.asarray(kappa, dtype=float),
    )
    value = _allocation_objective(state, beta, cost, noise, config)
    return state, value


def _allocation_objective(state, beta, cost, noise, config) -> float:
    if config.objective == "min_power":
        return float(np.sum(beta * cost))
    rate = float(np.sum(np.log1p(beta / noise)) / _LN2)
    if config.objective == "sum_rate":
        return rate
    params = config.power_params or PowerModelParams()
    return rate / total_power(state, params)


def _honest_objective(state: SystemState, config: OptimizerConfig) -> float:
    """Objective evaluated from the state as-is, no zero-forcing assumption."""
    if config.objective == "min_power":
        return bs_transmit_power(state.precoder)
    rate = 0.0
    for k in range(state.num_ues):
        gammas = sinr_streams(state, k)
        rate += float(state.weights[k]) * float(np.sum(np.log1p(gammas)) / _LN2)
    if state.bandwidth_hz is not None:
        rate *= state.bandwidth_hz
    if config.objective == "sum_rate":
        return rate
    params = config.power_params or PowerModelParams()
    return rate / total_power(state, params)


def _golden_max(fn, lo: float, hi: float, iters: int):
    """Fixed-iteration golden-section refinement; returns the best point seen."""
    best_x, best_v = lo, fn(lo)
    v_hi = fn(hi)
    if v_hi > best_v:
        best_x, best_v = hi, v_hi
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = fn(c), fn(d)
    for x, v in ((c, fc), (d, fd)):
        if v > best_v:
            best_x, best_v = x, v
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = fn(c)
            if fc > best_v:
                best_x, best_v = c, fc
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = fn(d)
            if fd > best_v:
                best_x, best_v = d, fd
    return best_x, best_v


def _cd_sweep(phases: np.ndarray, eval_fn, config: OptimizerConfig, sign: float):
    """One pass of per-element phase search: grid + golden refinement.

    eval_fn maps a full phase vector to the raw objective; sign +1 maximizes,
    -1 minimizes. The incumbent phase always competes, so a sweep never makes
    the signed objective worse.
    """
    phases = np.array(phases, dtype=float)
    current = sign * eval_fn(phases)
    grid = np.linspace(0.0, 2.0 * np.pi, config.phase_grid_points, endpoint=False)
    step = 2.0 * np.pi / config.phase_grid_points
    for n in range(phases.shape[0]):
        def signed(theta: float) -> float:
            candidate = phases.copy()
            candidate[n] = theta
            return sign * eval_fn(candidate)

        values = np.array([signed(theta) for theta in grid])
        best_idx = int(np.argmax(values))
        best_theta, best_val = float(grid[best_idx]), float(values[best_idx])
        if config.refine_iters > 0:
            theta_ref, val_ref = _golden_max(
                signed, best_theta - step, best_theta + step, config.refine_iters
            )
            if val_ref > best_val:
                best_theta, best_val = theta_ref, val_ref
        if best_val > current:
            phases[n] = best_theta % (2.0 * np.pi)
            current = best_val
    return phases, sign * current


def _rebuild_diagonal(psi: ReflectionMatrix, values: np.ndarray) -> ReflectionMatrix:
    return ReflectionMatrix(psi.kind, values, power_budget_w=psi.power_budget_w)


def phase_coordinate_descent(
    state: SystemState,
    objective,
    config: OptimizerConfig | None = None,
    ris_index: int = 0,
) -> ReflectionMatrix:
    """Per-element phase search on one surface, element modulus kept fixed.

    objective may be a callable mapping a candidate ReflectionMatrix to a raw
    objective value (direction taken from config.objective), or one of
    OBJECTIVES by name — named objectives re-solve the zero-forcing precoder
    for every candidate at the state's current transmit spend, so the search
    honors the zero-forcing structure rather than scoring a stale precoder.
    """
    config = config or OptimizerConfig()
    psi = state.psi[ris_index]
    if not psi.is_diagonal:
        raise ValueError("phase descent requires a diagonal reflection matrix")
    amplitudes = np.abs(psi.values)
    phases = np.angle(psi.values)

    if callable(objective):
        objective_fn = objective
        sign = _SIGN[config.objective]
    else:
        if objective not in OBJECTIVES:
            raise ValueError(f"objective must be callable or one of {OBJECTIVES}")
        name = str(objective)
        sign = _SIGN[name]
        solve_config = OptimizerConfig(
            max_iters=config.max_iters,
            rel_tolerance=config.rel_tolerance,
            phase_grid_points=config.phase_grid_points,
            rng_seed=config.rng_seed,
            objective=name,
            allocation=config.allocation,
            zf_constrained_phase_step=config.zf_constrained_phase_step,
            refine_iters=config.refine_iters,
            target_sinr=config.target_sinr,
            power_params=config.power_params,
            combine=config.combine,
            final_zf=config.final_zf,
        )
        spend = bs_transmit_power(state.precoder)
        if name != "min_power" and spend <= 0:
            raise ValueError("named objectives need a state with positive transmit power")
        budget = PowerBudget(spend if spend > 0 else 1.0)

        def objective_fn(candidate: ReflectionMatrix) -> float:
            psi_list = list(state.psi)
            psi_list[ris_index] = candidate
            _, value = _zf_state(
                state.links, psi_list, state.combiners, budget, solve_config, state.kappa
            )
            return value

    def eval_fn(phase_vec: np.ndarray) -> float:
        return objective_fn(
            _rebuild_diagonal(psi, amplitudes * np.exp(1j * phase_vec))
        )

    new_phases, _ = _cd_sweep(phases, eval_fn, config, sign)
    return _rebuild_diagonal(psi, amplitudes * np.exp(1j * new_phases))


def _random_passive(rng: np.random.Generator, groups) -> list[ReflectionMatrix]:
    return [
        ReflectionMatrix.passive(
            rng.uniform(0.0, 2.0 * np.pi, groups[u][0].num_ris_elements)
        )
        for u in range(len(groups))
    ]


def _relative_change(new: float, old: float) -> float:
    return abs(new - old) / max(abs(old), 1e-12)


def alternating_optimize(links, budgets: PowerBudget, config: OptimizerConfig | None = None):
    """Alternate zero-forcing precoding with per-element phase updates.

    Combiners are designed once from the surface-side channels; the reflection
    pattern starts at seeded random phases; each iteration re-solves the
    precoder and power allocation, then sweeps every surface element. With
    zf_constrained_phase_step (default) each phase candidate is scored through
    the same precoder pipeline, so the recorded objective never decreases.

    Returns (final state, trace). A zero-forcing failure mid-run is recorded
    in trace.failure and the best state so far is returned.
    """
    config = config or OptimizerConfig()
    groups = _as_groups(links)
    num_ue = len(groups[0])
    m = groups[0][0].num_bs_antennas
    if num_ue > m:
        raise ValueError("zero forcing needs at least as many BS antennas as UEs")
    for u in range(len(groups)):
        if num_ue > groups[u][0].num_ris_elements:
            raise ValueError("zero forcing needs at least as many surface elements as UEs")
    combiners = design_combiners(groups)
    rng = np.random.default_rng(config.rng_seed)
    psi_list = _random_passive(rng, groups)
    sign = _SIGN[config.objective]

    trace = OptimizationTrace(objective=config.objective, rng_seed=config.rng_seed)
    state, value = _zf_state(groups, psi_list, combiners, budgets, config)
    trace.objective_values.append(value)

    for iteration in range(1, config.max_iters + 1):
        previous = value
        try:
            for u in range(len(groups)):
                if config.zf_constrained_phase_step or config.objective == "min_power":
                    def objective_fn(candidate, _u=u):
                        trial = list(psi_list)
                        trial[_u] = candidate
                        return _zf_state(groups, trial, combiners, budgets, config)[1]
                else:
                    def objective_fn(candidate, _u=u, _state=state):
                        trial = list(_state.psi)
                        trial[_u] = candidate
                        probe = SystemState(
                            links=_state.links,
                            psi=trial,
                            precoder=_state.precoder,
                            stream_ue=_state.stream_ue,
                            combiners=_state.combiners,
                            kappa=_state.kappa,
                        )
                        return _honest_objective(probe, config)

                amplitudes = np.abs(psi_list[u].values)
                phases = np.angle(psi_list[u].values)
                new_phases, _ = _cd_sweep(
                    phases,
                    lambda ph, _u=u: objective_fn(
                        _rebuild_diagonal(psi_list[_u], amplitudes * np.exp(1j * ph))
                    ),
                    config,
                    sign,
                )
                psi_list[u] = _rebuild_diagonal(
                    psi_list[u], amplitudes * np.exp(1j * new_phases)
                )
            state, value = _zf_state(groups, psi_list, combiners, budgets, config)
        except IllConditionedChannel as exc:
            trace.failure = f"zero forcing failed at iteration {iteration}: {exc}"
            break
        trace.objective_values.append(value)
        trace.iterations = iteration
        if _relative_change(value, previous) < config.rel_tolerance:
            trace.converged = True
            break

    trace.final_state = state
    return state, trace


def massive_design(
    links,
    budgets: PowerBudget,
    *,
    config: OptimizerConfig | None = None,
    kappa: np.ndarray | None = None,
    dpl: bool = True,
) -> SystemState:
    """Closed-form large-array design: per-UE beams, combined phases, power split.

    Steps: matched-filter direct beams, strongest-element reflected beams with
    per-UE coherent phases, per-surface combining (config.combine: averaged
    phases or element partition), reflected beams re-matched to the joint
    cascade, direct/reflected power split, and (config.final_zf) a final
    zero-forcing stage across UEs. Warns when the array sizes do not dominate
    the UE count, where the per-UE designs stop being near-orthogonal.
    """
    config = config or OptimizerConfig()
    groups = _as_groups(links)
    num_ris, num_ue = len(groups), len(groups[0])
    m = groups[0][0].num_bs_antennas
    if kappa is None:
        kappa = np.ones((num_ris, num_ue))
    else:
        kappa = np.asarray(kappa, dtype=float)
    if m < 4 * num_ue or any(
        groups[u][0].num_ris_elements < 4 * num_ue for u in range(num_ris)
    ):
        warnings.warn(
            "large-array design assumes antenna and element counts well above the"
            " UE count; results may be far from optimal here",
            RuntimeWarning,
            stacklevel=2,
        )
    combiners = design_combiners(groups)
    h0_eff = [combiners[k][:, 0].conj() @ groups[0][k].h0 for k in range(num_ue)]
    h2_eff = [
        [combiners[k][:, 0].conj() @ groups[u][k].h2 for k in range(num_ue)]
        for u in range(num_ris)
    ]

    psi_list: list[ReflectionMatrix] = []
    for u in range(num_ris):
        h1 = groups[u][0].h1
        per_ue = []
        for k in range(num_ue):
            if kappa[u, k] == 0.0:
                continue
            beam, _ = best_rpl_beam(h2_eff[u][k], h1)
            psi_uk, _ = coherent_phases_given_beam(h2_eff[u][k], h1, beam)
            per_ue.append(psi_uk)
        if not per_ue:
            psi_list.append(ReflectionMatrix.identity(groups[u][0].num_ris_elements))
        elif len(per_ue) == 1:
            psi_list.append(per_ue[0])
        elif config.combine == "average":
            psi_list.append(combine_psi_average(per_ue))
        else:
            psi_list.append(combine_psi_partition(per_ue))

    columns, rhos = [], []
    for k in range(num_ue):
        cascade = np.zeros(m, dtype=complex)
        for u in range(num_ris):
            if kappa[u, k] == 0.0:
                continue
            psi = psi_list[u]
            cascade = cascade + (h2_eff[u][k] * psi.values) @ groups[u][k].h1
        a = float(np.linalg.norm(h0_eff[k]))
        b = float(np.linalg.norm(cascade))
        if dpl and a > 1e-15 and b > 1e-15:
            rho = power_split_rho(a, b)
            beam = np.sqrt(rho) * mf_precoder(h0_eff[k]) + np.sqrt(1.0 - rho) * mf_precoder(cascade)
        elif b > 1e-15:
            rho = 0.0
            beam = mf_precoder(cascade)
        elif a > 1e-15:
            rho = 1.0
            beam = mf_precoder(h0_eff[k])
        else:
            raise ValueError(f"UE {k} has neither a direct nor a reflected route")
        columns.append(beam / np.linalg.norm(beam))
        rhos.append(rho)

    if config.final_zf:
        state, _ = _zf_state(groups, psi_list, combiners, budgets, config, kappa)
        state.precoder = Precoder(state.precoder.f, state.precoder.beta, rho=np.asarray(rhos))
        return state
    f = np.stack(columns, axis=1)
    beta = np.full(num_ue, budgets.p_bs_max_w / num_ue)
    return SystemState(
        links=groups,
        psi=psi_list,
        precoder=Precoder(f, beta, rho=np.asarray(rhos)),
        combiners=combiners,
        kappa=kappa,
    )


def associate_ues(
    links_per_ris,
    psi_per_ris,
    policy: str = "single_best",
    threshold: float = 0.5,
) -> np.ndarray:
    """Assign UEs to surfaces by reflected-route strength.

    Gains are ||(h2 Psi) H1||_F per (surface, UE). single_best turns on only
    the strongest surface per UE (lowest index on ties);
    multi_all_above_threshold admits every surface within threshold x best.
    """
    groups = _as_groups(links_per_ris)
    num_ris, num_ue = len(groups), len(groups[0])
    if len(psi_per_ris) != num_ris:
        raise ValueError("one reflection matrix per surface is required")
    if policy not in ("single_best", "multi_all_above_threshold"):
        raise ValueError("policy must be single_best or multi_all_above_threshold")
    if policy == "multi_all_above_threshold" and not 0 < threshold <= 1:
        raise ValueError("threshold must lie in (0, 1]")
    gains = np.zeros((num_ris, num_ue))
    for u in range(num_ris):
        psi = psi_per_ris[u]
        for k in range(num_ue):
            link = groups[u][k]
            if psi.is_diagonal:
                route = (link.h2 * psi.values[None, :]) @ link.h1
            else:
                route = link.h2 @ psi.as_matrix() @ link.h1
            gains[u, k] = np.linalg.norm(route)
    kappa = np.zeros((num_ris, num_ue))
    if policy == "single_best":
        kappa[np.argmax(gains, axis=0), np.arange(num_ue)] = 1.0
    else:
        best = np.max(gains, axis=0)
        for k in range(num_ue):
            if best[k] == 0.0:
                kappa[0, k] = 1.0
            else:
                kappa[:, k] = (gains[:, k] >= threshold * best[k]).astype(float)
    return kappa


def ee_onoff_greedy(
    links,
    budgets: PowerBudget,
    power_params: PowerModelParams,
    rate_mins,
    config: OptimizerConfig | None = None,
):
    """Greedy surface on/off selection maximizing energy efficiency.

    Starts with every surface on (raising if the per-UE minimum rates are
    already infeasible there), then repeatedly switches off the surface whose
    removal improves EE the most while all rate minimums stay met; finally the
    all-off endpoint is adopted if it is feasible and strictly better. Rates
    are in bits/s/Hz, matching rate_mins.
    """
    config = config or OptimizerConfig()
    groups = _as_groups(links)
    num_ris, num_ue = len(groups), len(groups[0])
    mins = np.broadcast_to(np.asarray(rate_mins, dtype=float), (num_ue,))

    def solve(pattern: tuple[int, ...]):
        kappa = np.outer(np.asarray(pattern, dtype=float), np.ones(num_ue))
        try:
            state = massive_design(groups, budgets, config=config, kappa=kappa)
        except (ValueError, IllConditionedChannel) as exc:
            return None, -np.inf, f"design failed: {exc}"
        rates = np.array(
            [float(np.sum(np.log1p(sinr_streams(state, k))) / _LN2) for k in range(num_ue)]
        )
        if np.any(rates < mins):
            return None, -np.inf, "minimum rate violated"
        power = total_power(state, power_params)
        if power <= 0:
            return None, -np.inf, "zero total power"
        return state, float(np.sum(rates) / power), None

    all_on = (1,) * num_ris
    state, ee, reason = solve(all_on)
    if state is None:
        raise ValueError(
            f"rate constraints are infeasible even with every surface on ({reason})"
        )
    trace = OptimizationTrace(objective="energy_efficiency", rng_seed=config.rng_seed)
    pattern = all_on
    trace.objective_values.append(ee)

    improved = True
    while improved and sum(pattern) > 0:
        improved = False
        best_candidate = None
        for u in range(num_ris):
            if pattern[u] == 0:
                continue
            candidate = tuple(0 if i == u else p for i, p in enumerate(pattern))
            cand_state, cand_ee, _ = solve(candidate)
            if cand_state is not None and cand_ee > ee and (
                best_candidate is None or cand_ee > best_candidate[2]
            ):
                best_candidate = (candidate, cand_state, cand_ee)
        if best_candidate is not None:
            pattern, state, ee = best_candidate
            trace.objective_values.append(ee)
            improved = True

    if sum(pattern) > 0:
        off_state, off_ee, _ = solve((0,) * num_ris)
        if off_state is not None and off_ee > ee:
            pattern, state, ee = (0,) * num_ris, off_state, off_ee
            trace.objective_values.append(ee)

    trace.converged = True
    trace.iterations = len(trace.objective_values) - 1
    trace.final_state = state
    return state, trace


def zf_active_ris_iterate(links, budgets: PowerBudget, config: OptimizerConfig | None = None):
    """Alternating design for amplifying surfaces under a radiated-power cap.

    Each surface applies a common amplitude and per-element phases. Iterations
    sweep phases (candidates scored through the full precoder pipeline with
    the power cap enforced by uniform amplitude down-scaling), then line-search
    the common amplitude, keeping every recorded iterate feasible. With no
    surface power budget and zero surface noise the constraints vanish and the
    procedure is exactly `alternating_optimize`.
    """
    config = config or OptimizerConfig()
    groups = _as_groups(links)
    if budgets.p_ris_max_w is None and all(
        groups[u][k].sigma_r2_w == 0.0
        for u in range(len(groups))
        for k in range(len(groups[0]))
    ):
        return alternating_optimize(groups, budgets, config)

    num_ris, num_ue = len(groups), len(groups[0])
    m = groups[0][0].num_bs_antennas
    if num_ue > m:
        raise ValueError("zero forcing needs at least as many BS antennas as UEs")
    p_ris = budgets.p_ris_max_w
    combiners = design_combiners(groups)
    rng = np.random.default_rng(config.rng_seed)
    phases = [
        rng.uniform(0.0, 2.0 * np.pi, groups[u][0].num_ris_elements)
        for u in range(num_ris)
    ]
    gains = [1.0] * num_ris
    sign = _SIGN[config.objective]

    def build_psi(phase_list, gain_list):
        return [
            ReflectionMatrix(
                "active_diagonal",
                gain_list[u] * np.exp(1j * phase_list[u]),
                power_budget_w=p_ris,
            )
            for u in range(num_ris)
        ]

    def surface_power(psi_list, precoder):
        f_scaled = precoder.scaled()
        return [
            ris_transmit_power(
                psi_list[u], groups[u][0].h1, f_scaled, groups[u][0].sigma_r2_w
            )
            for u in range(num_ris)
        ]

    def active_solve(phase_list, gain_list):
        """Solve precoding at these phases/gains, projecting gains into the cap.

        Returns (state, objective value, effective gains); the state always
        satisfies the per-surface radiated-power cap.
        """
        gain_eff = list(gain_list)
        state = None
        for _ in range(8):
            psi_list = build_psi(phase_list, gain_eff)
            state, value = _zf_state(groups, psi_list, combiners, budgets, config)
            if p_ris is None:
                return state, value, gain_eff
            radiated = surface_power(psi_list, state.precoder)
            violated = False
            for u in range(num_ris):
                if radiated[u] > p_ris * (1.0 + 1e-12):
                    gain_eff[u] *= np.sqrt(p_ris / radiated[u])
                    violated = True
            if not violated:
                return state, value, gain_eff
        # Re-solving moved the cap again; clamp gains against the last
        # precoder (exact, since radiated power scales with the square of the
        # common gain when the precoder is fixed) and score the state as-is.
        psi_list = build_psi(phase_list, gain_eff)
        state = SystemState(
            links=groups,
            psi=psi_list,
            precoder=state.precoder,
            combiners=combiners,
        )
        return state, _honest_objective(state, config), gain_eff

    trace = OptimizationTrace(objective=config.objective, rng_seed=config.rng_seed)
    try:
        state, value, gains = active_solve(phases, gains)
    except IllConditionedChannel as exc:
        raise IllConditionedChannel(
            f"initial zero-forcing solve failed: {exc}"
        ) from exc
    trace.objective_values.append(value)

    for iteration in range(1, config.max_iters + 1):
        previous = value
        try:
            for u in range(num_ris):
                def eval_phases(phase_vec, _u=u):
                    trial = [p.copy() for p in phases]
                    trial[_u] = phase_vec
                    return active_solve(trial, gains)[1]

                phases[u], _ = _cd_sweep(phases[u], eval_phases, config, sign)

            if p_ris is not None:
                for u in range(num_ris):
                    incumbent_val = active_solve(phases, gains)[1]
                    best = (gains[u], incumbent_val)

                    def eval_gain(c, _u=u):
                        if c <= 0:
                            return -np.inf
                        trial = list(gains)
                        trial[_u] = c
                        _, val, eff = active_solve(phases, trial)
                        return sign * val

                    lo = max(gains[u] / 10.0, 1e-9)
                    hi = gains[u] * 10.0
                    c_best, v_best = _golden_max(eval_gain, lo, hi, config.refine_iters)
                    if v_best > sign * best[1]:
                        trial = list(gains)
                        trial[u] = c_best
                        _, val, eff = active_solve(phases, trial)
                        if sign * val >= v_best - abs(v_best) * 1e-12:
                            gains = eff

            state, value, gains = active_solve(phases, gains)
        except IllConditionedChannel as exc:
            trace.failure = f"zero forcing failed at iteration {iteration}: {exc}"
            break
        trace.objective_values.append(value)
        trace.iterations = iteration
        if _relative_change(value, previous) < config.rel_tolerance:
            trace.converged = True
            break

    trace.final_state = state
    return state, trace
