"""Experiment presets, Monte-Carlo sweep execution, and artifact emission.

A scenario is described by a validated config (YAML on disk, a dict or
:class:`ScenarioConfig` in memory): a preset name, geometry/noise/budget
blocks, an optional sweep over one preset-specific variable, a trial count,
and a base seed. ``run`` executes every (sweep value, trial) cell with
per-trial seed ``base + trial`` and returns one :class:`RunResult` row per
cell; ``emit`` writes the rows as CSV (RFC 4180, full float precision) or
JSON. Identical configs produce byte-identical artifacts.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass
from typing import Literal

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .arrays import (
    GainModel,
    ScenarioGeometry,
    UlaSpec,
    UpaSpec,
    group_links,
    random_paths,
    random_scenario,
    synthesize_channel,
    ula_steering,
    upa_shape,
)
from .conceptual import (
    CASE_IDS,
    FreeSpaceLink,
    ReflectedPath,
    TwoRayGeometry,
    snr_case,
    snr_free_space,
    snr_two_ray,
)
from .metrics import (
    PowerModelParams,
    SystemState,
    evaluate,
    sinr_to_db,
)
from .optimizer import (
    OptimizerConfig,
    alternating_optimize,
    design_combiners,
    ee_onoff_greedy,
    massive_design,
    zf_active_ris_iterate,
)
from .precoding import (
    Precoder,
    PowerBudget,
    best_rpl_beam,
    compose_split_precoder,
    mf_precoder,
    multi_ris_power_alloc,
    split_snr,
)
from .ris import coherent_phases_given_beam

__all__ = [
    "ScenarioConfig",
    "GeometryConfig",
    "NoiseConfig",
    "BudgetConfig",
    "PowerModelConfig",
    "OptimizerSettings",
    "SweepConfig",
    "ConceptualConfig",
    "RhoConfig",
    "EeConfig",
    "RunResult",
    "PRESETS",
    "PRESET_INFO",
    "SWEEP_VARIABLES",
    "run",
    "emit",
    "write_records",
    "load_config",
    "validate_config",
    "preset_columns",
    "result_columns",
    "to_records",
    "read_csv_records",
]

PRESETS = (
    "conceptual_cases",
    "single_ris_single_ue",
    "single_ris_multi_ue",
    "massive",
    "multi_ris",
    "ee_onoff",
    "rho_sweep",
    "scaling_sweep",
)

SWEEP_VARIABLES: dict[str, tuple[str, ...]] = {
    "conceptual_cases": ("d_m",),
    "scaling_sweep": ("d_m", "n"),
    "single_ris_single_ue": ("n", "m", "p_bs_max_w", "sigma2_w"),
    "single_ris_multi_ue": ("n", "m", "k", "p_bs_max_w"),
    "massive": ("n", "m", "k"),
    "multi_ris": ("u", "n"),
    "ee_onoff": ("u", "p_ris_element_w"),
    "rho_sweep": ("rho",),
}

BASE_COLUMNS = ("scenario", "trial", "seed", "sweep_variable", "sweep_value", "status")
TAIL_COLUMNS = ("iterations", "converged")

_CONCEPTUAL_COLUMNS = (
    "snr_db_free_space",
    "snr_db_two_ray_approx",
    "snr_db_two_ray_exact",
) + tuple(f"snr_db_{case}" for case in CASE_IDS)

_INTEGER_SWEEPS = {"n", "m", "k", "u"}


class _Base(BaseModel):
    model_config = ConfigDict(extra="forbid")


class GeometryConfig(_Base):
    """Array sizes, UE/surface counts, and multipath richness."""

    m: int = Field(8, ge=1, description="BS antennas")
    n: int | list[int] = Field(16, description="surface elements (list = per surface)")
    v: int = Field(1, ge=1, description="UE antennas")
    k: int = Field(1, ge=1, description="UEs")
    u: int = Field(1, ge=1, description="surfaces")
    l0: int = Field(2, ge=0, description="direct-link NLoS rays")
    l1: int = Field(2, ge=0, description="feed-link NLoS rays")
    l2: int = Field(2, ge=0, description="drop-link NLoS rays")
    blockage: bool = Field(False, description="zero out the direct link")
    k_factor: float = Field(10.0, ge=0.0, description="LoS-to-NLoS power ratio")
    nlos_var: float = Field(1.0, gt=0.0, description="NLoS ray gain variance")

    @model_validator(mode="after")
    def _check_sizes(self):
        sizes = [self.n] if isinstance(self.n, int) else self.n
        if any(size < 1 for size in sizes):
            raise ValueError("surface element counts must be >= 1")
        if isinstance(self.n, list) and len(self.n) != self.u:
            raise ValueError("per-surface element list must have u entries")
        return self

    def ris_sizes(self) -> tuple[int, ...]:
        if isinstance(self.n, int):
            return (self.n,) * self.u
        return tuple(self.n)


class NoiseConfig(_Base):
    sigma2_w: float = Field(1.0, gt=0.0, description="receiver noise power")
    sigma_r2_w: float = Field(0.0, ge=0.0, description="surface amplification noise power")


class BudgetConfig(_Base):
    p_bs_max_w: float = Field(1.0, gt=0.0, description="BS transmit power budget")
    p_ris_max_w: float | None = Field(
        None, gt=0.0, description="per-surface radiated power budget (active surfaces)"
    )


class PowerModelConfig(_Base):
    eta: float = Field(1.0, gt=0.0, le=1.0, description="PA efficiency")
    p_bs_circuit_w: float = Field(0.0, ge=0.0)
    p_ris_element_w: float = Field(0.0, ge=0.0)
    p_ue_circuit_w: float = Field(0.0, ge=0.0)


class OptimizerSettings(_Base):
    max_iters: int = Field(100, ge=1)
    rel_tolerance: float = Field(1e-6, gt=0.0)
    phase_grid_points: int = Field(64, ge=8)
    objective: Literal["sum_rate", "min_power", "energy_efficiency"] = "sum_rate"
    allocation: Literal["waterfill", "uniform"] = "waterfill"
    zf_constrained_phase_step: bool = True
    refine_iters: int = Field(32, ge=0)
    target_sinr: float = Field(1.0, gt=0.0)
    combine: Literal["average", "partition"] = "average"
    final_zf: bool = True


class SweepConfig(_Base):
    variable: str
    values: list[float] = Field(min_length=1)


class ConceptualConfig(_Base):
    """Geometry of the antenna-free reference links and two-path cases."""

    pt_w: float = Field(1.0, gt=0.0)
    c0: float = Field(1.0, gt=0.0, description="reference gain at 1 m")
    d0_m: float = Field(1000.0, gt=0.0, description="free-space distance")
    d_m: float = Field(1000.0, gt=0.0, description="two-ray ground distance")
    ht_m: float = Field(1.0, gt=0.0)
    hr_m: float = Field(1.0, gt=0.0)
    lambda_m: float = Field(1.0, gt=0.0)
    gt: float = Field(1.0, gt=0.0)
    gr: float = Field(1.0, gt=0.0)
    r1: float = Field(1.0, ge=0.0, description="path-1 reflection magnitude")
    d1_m: float = Field(100.0, gt=0.0)
    phi1_rad: float = 0.0
    r2: float = Field(0.8, ge=0.0, description="path-2 reflection magnitude")
    d2_m: float = Field(120.0, gt=0.0)
    phi2_rad: float = 1.0471975511965976
    amp_budget: float = Field(4.0, gt=0.0, description="reflector amplification budget")


class RhoConfig(_Base):
    """Fixed route amplitudes for the direct/reflected power-split sweep."""

    a_amp: float = Field(3.0, ge=0.0)
    b_amp: float = Field(4.0, ge=0.0)
    m: int = Field(1, ge=1)
    pt_w: float = Field(1.0, gt=0.0)


class EeConfig(_Base):
    rate_min_bps_hz: float = Field(0.0, ge=0.0, description="per-UE minimum rate")


class ScenarioConfig(_Base):
    """One complete, validated experiment description."""

    preset: Literal[
        "conceptual_cases",
        "single_ris_single_ue",
        "single_ris_multi_ue",
        "massive",
        "multi_ris",
        "ee_onoff",
        "rho_sweep",
        "scaling_sweep",
    ]
    geometry: GeometryConfig = Field(default_factory=GeometryConfig)
    noise: NoiseConfig = Field(default_factory=NoiseConfig)
    budgets: BudgetConfig = Field(default_factory=BudgetConfig)
    power_model: PowerModelConfig = Field(default_factory=PowerModelConfig)
    optimizer: OptimizerSettings = Field(default_factory=OptimizerSettings)
    conceptual: ConceptualConfig = Field(default_factory=ConceptualConfig)
    rho: RhoConfig = Field(default_factory=RhoConfig)
    ee: EeConfig = Field(default_factory=EeConfig)
    sweep: SweepConfig | None = None
    trials: int = Field(1, ge=1)
    seed: int = Field(0, ge=0)

    @model_validator(mode="after")
    def _check_preset(self):
        geo = self.geometry
        if self.sweep is not None:
            allowed = SWEEP_VARIABLES[self.preset]
            if self.sweep.variable not in allowed:
                raise ValueError(
                    f"preset {self.preset!r} sweeps one of {allowed},"
                    f" not {self.sweep.variable!r}"
                )
            var, values = self.sweep.variable, self.sweep.values
            if var in _INTEGER_SWEEPS:
                if any(v != int(v) or v < 1 for v in values):
                    raise ValueError(f"sweep values for {var!r} must be integers >= 1")
                if var == "u" and isinstance(geo.n, list):
                    raise ValueError("sweeping u requires a scalar geometry.n")
            elif var == "rho":
                if any(not 0.0 <= v <= 1.0 for v in values):
                    raise ValueError("rho sweep values must lie in [0, 1]")
            elif any(v <= 0 for v in values) and var != "p_ris_element_w":
                raise ValueError(f"sweep values for {var!r} must be positive")
            elif var == "p_ris_element_w" and any(v < 0 for v in values):
                raise ValueError("sweep values for 'p_ris_element_w' must be non-negative")

        if self.preset == "single_ris_single_ue" and (geo.k != 1 or geo.u != 1):
            raise ValueError("single_ris_single_ue requires geometry.k == 1 and geometry.u == 1")
        if self.preset == "single_ris_multi_ue":
            if geo.k < 2 or geo.u != 1:
                raise ValueError("single_ris_multi_ue requires geometry.k >= 2 and geometry.u == 1")
        if self.preset in ("single_ris_single_ue", "single_ris_multi_ue"):
            k_values = [geo.k]
            m_values = [geo.m]
            n_values = list(geo.ris_sizes())
            if self.sweep is not None:
                if self.sweep.variable == "k":
                    k_values = [int(v) for v in self.sweep.values]
                elif self.sweep.variable == "m":
                    m_values = [int(v) for v in self.sweep.values]
                elif self.sweep.variable == "n":
                    n_values = [int(v) for v in self.sweep.values]
            if max(k_values) > min(m_values) or max(k_values) > min(n_values):
                raise ValueError(
                    "zero forcing needs geometry.k <= every swept m and n value"
                )
        if self.preset == "multi_ris" and geo.k != 1:
            raise ValueError("multi_ris requires geometry.k == 1")
        if (
            self.preset == "scaling_sweep"
            and self.sweep is not None
            and self.sweep.variable == "n"
            and (geo.v != 1 or geo.u != 1)
        ):
            raise ValueError("scaling_sweep over n requires geometry.v == 1 and geometry.u == 1")
        return self


PRESET_INFO = (
    {
        "name": "conceptual_cases",
        "description": "Antenna-free reference SNRs: free-space, two-ray, and the six two-path combining cases.",
        "sweep_variables": list(SWEEP_VARIABLES["conceptual_cases"]),
    },
    {
        "name": "single_ris_single_ue",
        "description": "Alternating precoder/phase design for one UE behind one surface (active when surface noise or budget set).",
        "sweep_variables": list(SWEEP_VARIABLES["single_ris_single_ue"]),
    },
    {
        "name": "single_ris_multi_ue",
        "description": "Zero-forcing multi-UE downlink through one surface with per-element phase optimization.",
        "sweep_variables": list(SWEEP_VARIABLES["single_ris_multi_ue"]),
    },
    {
        "name": "massive",
        "description": "Closed-form large-array design: per-UE beams, combined surface phases, direct/reflected power split.",
        "sweep_variables": list(SWEEP_VARIABLES["massive"]),
    },
    {
        "name": "multi_ris",
        "description": "Several surfaces serving one UE with per-route beams and maximal-ratio power allocation.",
        "sweep_variables": list(SWEEP_VARIABLES["multi_ris"]),
    },
    {
        "name": "ee_onoff",
        "description": "Greedy surface on/off selection maximizing energy efficiency under per-UE rate minimums.",
        "sweep_variables": list(SWEEP_VARIABLES["ee_onoff"]),
    },
    {
        "name": "rho_sweep",
        "description": "Receive SNR versus the direct-route power fraction for fixed route amplitudes.",
        "sweep_variables": list(SWEEP_VARIABLES["rho_sweep"]),
    },
    {
        "name": "scaling_sweep",
        "description": "Distance scaling of the reference links (d_m) or element-count scaling of the coherent surface gain (n).",
        "sweep_variables": list(SWEEP_VARIABLES["scaling_sweep"]),
    },
)


@dataclass
class RunResult:
    """One emitted row: identity, status, and the preset's metric columns.

    wall_time_s is measured for diagnostics but never emitted, keeping
    artifacts byte-identical across runs.
    """

    scenario: str
    trial: int
    seed: int
    sweep_variable: str | None
    sweep_value: float | None
    status: str
    metrics: dict
    iterations: int | None = None
    converged: bool | None = None
    wall_time_s: float | None = None


def load_config(path: str) -> dict:
    """Read a YAML (or JSON) config file into a plain mapping."""
    with open(path, "r", encoding="utf-8") as fh:
        data = yaml.safe_load(fh)
    if not isinstance(data, dict):
        raise ValueError(f"config file {path!r} must contain a mapping at top level")
    return data


def validate_config(data) -> tuple[bool, list[dict]]:
    """Validate a raw config, returning (ok, issues with field paths)."""
    try:
        ScenarioConfig.model_validate(data)
    except ValidationError as exc:
        issues = [
            {
                "path": ".".join(str(part) for part in err["loc"]) or "<config>",
                "message": err["msg"],
            }
            for err in exc.errors()
        ]
        return False, issues
    return True, []


def _effective_sweep(cfg: ScenarioConfig) -> SweepConfig | None:
    if cfg.sweep is not None:
        return cfg.sweep
    if cfg.preset == "rho_sweep":
        return SweepConfig(variable="rho", values=np.linspace(0.0, 1.0, 101).tolist())
    if cfg.preset == "scaling_sweep":
        return SweepConfig(variable="d_m", values=[100.0, 1000.0, 10000.0])
    return None


def _apply_sweep(cfg: ScenarioConfig, variable: str | None, value) -> ScenarioConfig:
    if variable is None or variable == "rho":
        return cfg
    out = cfg.model_copy(deep=True)
    if variable == "n":
        out.geometry.n = int(value)
    elif variable == "m":
        out.geometry.m = int(value)
    elif variable == "k":
        out.geometry.k = int(value)
    elif variable == "u":
        out.geometry.u = int(value)
    elif variable == "p_bs_max_w":
        out.budgets.p_bs_max_w = float(value)
    elif variable == "sigma2_w":
        out.noise.sigma2_w = float(value)
    elif variable == "p_ris_element_w":
        out.power_model.p_ris_element_w = float(value)
    elif variable == "d_m":
        out.conceptual.d_m = float(value)
        out.conceptual.d0_m = float(value)
    else:
        raise ValueError(f"unknown sweep variable {variable!r}")
    return out


def preset_columns(cfg: ScenarioConfig) -> list[str]:
    """Metric column names for one run; identical across all of its rows."""
    sweep = _effective_sweep(cfg)
    var = sweep.variable if sweep is not None else None
    if cfg.preset == "conceptual_cases":
        return list(_CONCEPTUAL_COLUMNS)
    if cfg.preset == "scaling_sweep":
        if var == "n":
            return ["snr_lin", "snr_db"]
        return list(_CONCEPTUAL_COLUMNS[:3])
    if cfg.preset == "rho_sweep":
        return ["snr_lin", "snr_db"]
    k_max = cfg.geometry.k
    if var == "k" and sweep is not None:
        k_max = max(int(v) for v in sweep.values)
    columns = ["sum_rate"] + [f"sinr_db_ue{k}" for k in range(k_max)]
    columns += ["p_bs", "p_ris", "p_total", "ee"]
    if cfg.preset == "ee_onoff":
        columns.append("ris_on")
    return columns


def _power_params(cfg: ScenarioConfig) -> PowerModelParams:
    pm = cfg.power_model
    return PowerModelParams(
        eta=pm.eta,
        p_bs_circuit_w=pm.p_bs_circuit_w,
        p_ris_element_w=pm.p_ris_element_w,
        p_ue_circuit_w=pm.p_ue_circuit_w,
    )


def _optimizer_config(cfg: ScenarioConfig, seed: int) -> OptimizerConfig:
    opt = cfg.optimizer
    return OptimizerConfig(
        max_iters=opt.max_iters,
        rel_tolerance=opt.rel_tolerance,
        phase_grid_points=opt.phase_grid_points,
        rng_seed=seed,
        objective=opt.objective,
        allocation=opt.allocation,
        zf_constrained_phase_step=opt.zf_constrained_phase_step,
        refine_iters=opt.refine_iters,
        target_sinr=opt.target_sinr,
        power_params=_power_params(cfg),
        combine=opt.combine,
        final_zf=opt.final_zf,
    )


def _geometry(cfg: ScenarioConfig) -> ScenarioGeometry:
    geo = cfg.geometry
    return ScenarioGeometry(
        m=geo.m,
        n=geo.n if isinstance(geo.n, int) else tuple(geo.n),
        v=geo.v,
        k=geo.k,
        u=geo.u,
        l0=geo.l0,
        l1=geo.l1,
        l2=geo.l2,
        blockage=geo.blockage,
        gain=GainModel(nlos_var=geo.nlos_var, k_factor=geo.k_factor),
    )


def _groups(cfg: ScenarioConfig, seed: int):
    links = random_scenario(
        seed, _geometry(cfg), sigma2_w=cfg.noise.sigma2_w, sigma_r2_w=cfg.noise.sigma_r2_w
    )
    return group_links(links, cfg.geometry.u, cfg.geometry.k)


def _conceptual_metrics(cfg: ScenarioConfig) -> dict:
    cc = cfg.conceptual
    sigma2 = cfg.noise.sigma2_w
    free = FreeSpaceLink(d0_m=cc.d0_m, c0=cc.c0, pt_w=cc.pt_w, sigma2_w=sigma2)
    geom = TwoRayGeometry(
        d_m=cc.d_m, ht_m=cc.ht_m, hr_m=cc.hr_m, lambda_m=cc.lambda_m, gt=cc.gt, gr=cc.gr
    )
    approx, exact = snr_two_ray(geom, cc.pt_w, sigma2)
    metrics = {
        "snr_db_free_space": sinr_to_db(snr_free_space(free)),
        "snr_db_two_ray_approx": sinr_to_db(approx),
        "snr_db_two_ray_exact": sinr_to_db(exact),
    }
    p1 = ReflectedPath(r=cc.r1, d_m=cc.d1_m, phi_rad=cc.phi1_rad)
    p2 = ReflectedPath(r=cc.r2, d_m=cc.d2_m, phi_rad=cc.phi2_rad)
    for case in CASE_IDS:
        budget = cc.amp_budget if case == "reflector_amp_phase" else None
        snr = snr_case(case, p1, p2, cc.pt_w, sigma2, c0=cc.c0, amp_budget=budget)
        metrics[f"snr_db_{case}"] = sinr_to_db(snr)
    return metrics


def _run_conceptual(cfg: ScenarioConfig, seed: int, value):
    del seed, value
    return _conceptual_metrics(cfg), None, None


def _run_scaling(cfg: ScenarioConfig, seed: int, value):
    sweep = _effective_sweep(cfg)
    if sweep is None or sweep.variable == "d_m":
        metrics = _conceptual_metrics(cfg)
        return {name: metrics[name] for name in _CONCEPTUAL_COLUMNS[:3]}, None, None
    # Element-count scaling of the coherent single-UE reflected design.
    rng = np.random.default_rng(seed)
    geo = cfg.geometry
    n = int(value)
    bs = UlaSpec(geo.m)
    ris = UpaSpec(*upa_shape(n))
    ue = UlaSpec(1)
    gain = GainModel(nlos_var=geo.nlos_var, k_factor=geo.k_factor)
    feed_paths = random_paths(rng, 0, gain, bs, ris)
    drop_paths = random_paths(rng, 0, gain, ris, ue)
    h1 = synthesize_channel("bs_ris", feed_paths, bs, ris)
    h2 = synthesize_channel("ris_ue", drop_paths, ris, ue)
    beam = np.conj(ula_steering(bs, feed_paths[0].aod)) / np.sqrt(geo.m)
    psi, _ = coherent_phases_given_beam(h2[0], h1, beam)
    amplitude = abs(((h2[0] * psi.values) @ h1) @ beam)
    snr = cfg.budgets.p_bs_max_w * amplitude**2 / cfg.noise.sigma2_w
    return {"snr_lin": float(snr), "snr_db": sinr_to_db(snr)}, None, None


def _run_single_ris(cfg: ScenarioConfig, seed: int, value):
    del value
    groups = _groups(cfg, seed)
    config = _optimizer_config(cfg, seed)
    budgets = PowerBudget(cfg.budgets.p_bs_max_w, cfg.budgets.p_ris_max_w)
    active = cfg.noise.sigma_r2_w > 0 or cfg.budgets.p_ris_max_w is not None
    if active:
        state, trace = zf_active_ris_iterate(groups, budgets, config)
    else:
        state, trace = alternating_optimize(groups, budgets, config)
    metrics = evaluate(state, _power_params(cfg))
    return metrics, trace.iterations, trace.converged


def _run_massive(cfg: ScenarioConfig, seed: int, value):
    del value
    groups = _groups(cfg, seed)
    config = _optimizer_config(cfg, seed)
    budgets = PowerBudget(cfg.budgets.p_bs_max_w, cfg.budgets.p_ris_max_w)
    state = massive_design(groups, budgets, config=config)
    metrics = evaluate(state, _power_params(cfg))
    return metrics, None, None


def _run_multi_ris(cfg: ScenarioConfig, seed: int, value):
    del value
    groups = _groups(cfg, seed)
    combiners = design_combiners(groups)
    w = combiners[0][:, 0]
    h0_eff = w.conj() @ groups[0][0].h0
    beams, amplitudes, psi_list = [], [], []
    for u in range(len(groups)):
        link = groups[u][0]
        h2_eff = w.conj() @ link.h2
        beam, _ = best_rpl_beam(h2_eff, link.h1)
        psi, _ = coherent_phases_given_beam(h2_eff, link.h1, beam)
        cascade = (h2_eff * psi.values) @ link.h1
        psi_list.append(psi)
        beams.append(mf_precoder(cascade))
        amplitudes.append(float(np.linalg.norm(cascade)))
    if np.linalg.norm(h0_eff) > 1e-15:
        beams.append(mf_precoder(h0_eff))
        amplitudes.append(float(np.linalg.norm(h0_eff)))
    rho, _ = multi_ris_power_alloc(amplitudes)
    beam = compose_split_precoder(beams, rho)
    beam = beam / np.linalg.norm(beam)
    precoder = Precoder(beam[:, None], np.array([cfg.budgets.p_bs_max_w]))
    state = SystemState(links=groups, psi=psi_list, precoder=precoder, combiners=combiners)
    metrics = evaluate(state, _power_params(cfg))
    return metrics, None, None


def _run_ee_onoff(cfg: ScenarioConfig, seed: int, value):
    del value
    groups = _groups(cfg, seed)
    config = _optimizer_config(cfg, seed)
    budgets = PowerBudget(cfg.budgets.p_bs_max_w, cfg.budgets.p_ris_max_w)
    state, trace = ee_onoff_greedy(
        groups, budgets, _power_params(cfg), cfg.ee.rate_min_bps_hz, config
    )
    metrics = evaluate(state, _power_params(cfg))
    metrics["ris_on"] = "".join(
        "1" if np.any(state.kappa[u] > 0) else "0" for u in range(state.num_surfaces)
    )
    return metrics, trace.iterations, trace.converged


def _run_rho(cfg: ScenarioConfig, seed: int, value):
    del seed
    rho = float(value)
    rc = cfg.rho
    snr = split_snr(rc.a_amp, rc.b_amp, rho, m=rc.m, pt_w=rc.pt_w, sigma2_w=cfg.noise.sigma2_w)
    return {"snr_lin": float(snr), "snr_db": sinr_to_db(snr)}, None, None


_RUNNERS = {
    "conceptual_cases": _run_conceptual,
    "scaling_sweep": _run_scaling,
    "single_ris_single_ue": _run_single_ris,
    "single_ris_multi_ue": _run_single_ris,
    "massive": _run_massive,
    "multi_ris": _run_multi_ris,
    "ee_onoff": _run_ee_onoff,
    "rho_sweep": _run_rho,
}


def run(config) -> list[RunResult]:
    """Execute a scenario: every (sweep value, trial) cell becomes one row.

    config may be a ScenarioConfig, a dict, or a YAML file path. Per-trial
    seed is base seed + trial index; rows are sorted by (sweep value, trial),
    so output is deterministic for a fixed config. Optimizer failures are
    recorded in the row's status and the run continues.
    """
    if isinstance(config, str):
        config = load_config(config)
    cfg = ScenarioConfig.model_validate(config)
    sweep = _effective_sweep(cfg)
    variable = sweep.variable if sweep is not None else None
    values = list(sweep.values) if sweep is not None else [None]
    columns = preset_columns(cfg)
    runner = _RUNNERS[cfg.preset]

    results: list[RunResult] = []
    for value in values:
        applied = _apply_sweep(cfg, variable, value)
        for trial in range(cfg.trials):
            trial_seed = cfg.seed + trial
            started = time.perf_counter()
            try:
                metrics, iterations, converged = runner(applied, trial_seed, value)
                status = "ok"
            except Exception as exc:  # recorded per-row; the sweep continues
                metrics, iterations, converged = {}, None, None
                status = f"error: {exc}"
            results.append(
                RunResult(
                    scenario=cfg.preset,
                    trial=trial,
                    seed=trial_seed,
                    sweep_variable=variable,
                    sweep_value=None if value is None else float(value),
                    status=status,
                    metrics={name: metrics.get(name) for name in columns},
                    iterations=iterations,
                    converged=converged,
                    wall_time_s=time.perf_counter() - started,
                )
            )
    results.sort(
        key=lambda row: (
            row.sweep_value if row.sweep_value is not None else 0.0,
            row.trial,
        )
    )
    return results


def result_columns(results: list[RunResult]) -> list[str]:
    return list(BASE_COLUMNS) + list(results[0].metrics.keys()) + list(TAIL_COLUMNS)


def _native(value):
    """Convert numpy scalars to plain Python types for emission."""
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def to_records(results: list[RunResult]) -> list[dict]:
    """Rows as plain dicts with identical keys, wall time excluded."""
    records = []
    for row in results:
        record = {
            "scenario": row.scenario,
            "trial": row.trial,
            "seed": row.seed,
            "sweep_variable": row.sweep_variable,
            "sweep_value": row.sweep_value,
            "status": row.status,
        }
        record.update({key: _native(val) for key, val in row.metrics.items()})
        record["iterations"] = row.iterations
        record["converged"] = row.converged
        records.append(record)
    return records


def _csv_cell(value) -> str:
    value = _native(value)
    if value is None:
        return ""
    if isinstance(value, bool):
        return "True" if value else "False"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_records(columns: list[str], records: list[dict], format: str, path: str) -> None:
    """Write already-flattened records as CSV (RFC 4180, repr floats) or JSON."""
    if not records:
        raise ValueError("no results to emit")
    if format not in ("csv", "json"):
        raise ValueError("format must be 'csv' or 'json'")
    if format == "csv":
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            for record in records:
                writer.writerow([_csv_cell(record[name]) for name in columns])
    else:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(records, fh, indent=2, allow_nan=False)
            fh.write("\n")


def emit(results: list[RunResult], format: str = "csv", path: str = "results.csv") -> None:
    """Write rows to path as CSV (RFC 4180, '.' decimals, repr floats) or JSON."""
    if not results:
        raise ValueError("no results to emit")
    write_records(result_columns(results), to_records(results), format, path)


_INT_COLUMNS = {"trial", "seed", "iterations"}
_STR_COLUMNS = {"scenario", "status", "sweep_variable", "ris_on"}
_BOOL_COLUMNS = {"converged"}


def read_csv_records(path: str) -> list[dict]:
    """Parse an emitted CSV back into typed records (inverse of csv emit)."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        records = []
        for row in reader:
            record = {}
            for name, cell in zip(header, row):
                if cell == "":
                    record[name] = None
                elif name in _STR_COLUMNS:
                    record[name] = cell
                elif name in _INT_COLUMNS:
                    record[name] = int(cell)
                elif name in _BOOL_COLUMNS:
                    record[name] = cell == "True"
                else:
                    record[name] = float(cell)
            records.append(record)
    return records
