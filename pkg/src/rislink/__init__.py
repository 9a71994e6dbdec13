"""Link-level simulation and optimization for surface-assisted downlinks.

Layers, bottom up: antenna-free reference links (`conceptual`), array steering
and multipath channel synthesis (`arrays`), reflection matrices and coherent
phase designs (`ris`), precoders and power allocations (`precoding`), SINR /
rate / power metrics (`metrics`), iterative joint designs (`optimizer`), and
the preset-driven Monte-Carlo scenario engine (`scenario`). An HTTP facade
lives in `service` and the CLI in `cli`.
"""

from .arrays import (
    GainModel,
    LinkSet,
    PathComponent,
    ScenarioGeometry,
    UlaSpec,
    UpaSpec,
    group_links,
    random_paths,
    random_scenario,
    synthesize_channel,
    ula_steering,
    upa_shape,
    upa_steering,
)
from .conceptual import (
    CASE_IDS,
    FreeSpaceLink,
    ReflectedPath,
    TwoRayGeometry,
    snr_case,
    snr_free_space,
    snr_two_ray,
    two_path_gain,
)
from .metrics import (
    PowerModelParams,
    SystemState,
    bs_transmit_power,
    capacity_fixed_psi,
    energy_efficiency,
    evaluate,
    sinr_streams,
    sinr_to_db,
    sum_rate,
    total_power,
)
from .optimizer import (
    OptimizationTrace,
    OptimizerConfig,
    alternating_optimize,
    associate_ues,
    design_combiners,
    ee_onoff_greedy,
    massive_design,
    phase_coordinate_descent,
    zf_active_ris_iterate,
)
from .precoding import (
    IllConditionedChannel,
    PowerBudget,
    Precoder,
    best_rpl_beam,
    compose_split_precoder,
    maxsnr_beta,
    mf_precoder,
    multi_ris_power_alloc,
    power_split_rho,
    split_snr,
    uniform_beta,
    waterfill_beta,
    zf_precoder,
)
from .ris import (
    ReflectionMatrix,
    coherent_phases_given_beam,
    coherent_phases_rpl_only,
    coherent_phases_with_dpl,
    combine_psi_average,
    combine_psi_partition,
    composite_channel,
    default_partition,
    ris_transmit_power,
)
from .scenario import (
    RunResult,
    ScenarioConfig,
    emit,
    load_config,
    run,
    validate_config,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # conceptual
    "CASE_IDS",
    "FreeSpaceLink",
    "ReflectedPath",
    "TwoRayGeometry",
    "snr_case",
    "snr_free_space",
    "snr_two_ray",
    "two_path_gain",
    # arrays
    "GainModel",
    "LinkSet",
    "PathComponent",
    "ScenarioGeometry",
    "UlaSpec",
    "UpaSpec",
    "group_links",
    "random_paths",
    "random_scenario",
    "synthesize_channel",
    "ula_steering",
    "upa_shape",
    "upa_steering",
    # ris
    "ReflectionMatrix",
    "coherent_phases_given_beam",
    "coherent_phases_rpl_only",
    "coherent_phases_with_dpl",
    "combine_psi_average",
    "combine_psi_partition",
    "composite_channel",
    "default_partition",
    "ris_transmit_power",
    # precoding
    "IllConditionedChannel",
    "PowerBudget",
    "Precoder",
    "best_rpl_beam",
    "compose_split_precoder",
    "maxsnr_beta",
    "mf_precoder",
    "multi_ris_power_alloc",
    "power_split_rho",
    "split_snr",
    "uniform_beta",
    "waterfill_beta",
    "zf_precoder",
    # metrics
    "PowerModelParams",
    "SystemState",
    "bs_transmit_power",
    "capacity_fixed_psi",
    "energy_efficiency",
    "evaluate",
    "sinr_streams",
    "sinr_to_db",
    "sum_rate",
    "total_power",
    # optimizer
    "OptimizationTrace",
    "OptimizerConfig",
    "alternating_optimize",
    "associate_ues",
    "design_combiners",
    "ee_onoff_greedy",
    "massive_design",
    "phase_coordinate_descent",
    "zf_active_ris_iterate",
    # scenario
    "RunResult",
    "ScenarioConfig",
    "emit",
    "load_config",
    "run",
    "validate_config",
]
