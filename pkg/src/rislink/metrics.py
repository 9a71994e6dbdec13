"""Link-quality and power metrics over a fully assembled system state.

Evaluates per-stream SINR (with self/inter-user interference and, for active
surfaces, amplified surface noise), weighted sum rate, SVD water-filling
capacity for a fixed reflection pattern, the circuit-level power model, and
energy efficiency. Metric names are fixed here for the CSV schema:
``sum_rate``, ``sinr_db_ue{k}``, ``p_bs``, ``p_ris``, ``p_total``, ``ee``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .arrays import LinkSet
from .precoding import Precoder, waterfill_beta
from .ris import ReflectionMatrix

__all__ = [
    "SystemState",
    "PowerModelParams",
    "sinr_streams",
    "sum_rate",
    "capacity_fixed_psi",
    "bs_transmit_power",
    "total_power",
    "energy_efficiency",
    "sinr_to_db",
    "evaluate",
    "DB_FLOOR",
]

_LN2 = np.log(2.0)

DB_FLOOR = 1e-30
"""Linear floor applied before dB conversion so emitted values stay finite."""


def _log2_1p(x):
    """log2(1 + x) evaluated stably for tiny x."""
    return np.log1p(x) / _LN2


@dataclass(frozen=True)
class PowerModelParams:
    """Circuit-level power model: amplifier efficiency plus static draws."""

    eta: float = 1.0
    p_bs_circuit_w: float = 0.0
    p_ris_element_w: float = 0.0
    p_ue_circuit_w: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.eta <= 1.0:
            raise ValueError("eta must lie in (0, 1]")
        for name in ("p_bs_circuit_w", "p_ris_element_w", "p_ue_circuit_w"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


@dataclass
class SystemState:
    """Everything needed to score one downlink configuration.

    links is indexed [surface][ue]; psi holds one reflection matrix per
    surface; kappa[u, k] in {0, 1} switches surface u into UE k's composite
    channel. stream_ue maps precoder columns to served UEs and combiners[k]
    holds UE k's receive vectors, one column per owned stream.
    """

    links: list[list[LinkSet]]
    psi: list[ReflectionMatrix]
    precoder: Precoder
    stream_ue: tuple[int, ...] | None = None
    combiners: list[np.ndarray] | None = None
    kappa: np.ndarray | None = None
    bandwidth_hz: float | None = None
    weights: np.ndarray | None = None
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.links or not self.links[0]:
            raise ValueError("links must be a non-empty [surface][ue] nesting")
        num_ris = len(self.links)
        num_ue = len(self.links[0])
        if any(len(row) != num_ue for row in self.links):
            raise ValueError("every surface must list the same UEs")
        if len(self.psi) != num_ris:
            raise ValueError("one reflection matrix per surface is required")
        for u in range(num_ris):
            n_u = self.links[u][0].num_ris_elements
            if self.psi[u].num_elements != n_u:
                raise ValueError(f"psi[{u}] size does not match surface {u} links")
        m = self.links[0][0].num_bs_antennas
        if self.precoder.f.shape[0] != m:
            raise ValueError("precoder rows must match BS antenna count")
        num_streams = self.precoder.num_streams
        if self.stream_ue is None:
            if num_streams != num_ue:
                raise ValueError("stream_ue is required unless one stream per UE")
            self.stream_ue = tuple(range(num_ue))
        else:
            self.stream_ue = tuple(int(s) for s in self.stream_ue)
        if len(self.stream_ue) != num_streams:
            raise ValueError("stream_ue must name one UE per precoder column")
        if any(not 0 <= s < num_ue for s in self.stream_ue):
            raise ValueError("stream_ue entries must be valid UE indices")
        v = self.links[0][0].num_ue_antennas
        counts = [self.stream_ue.count(k) for k in range(num_ue)]
        if self.combiners is None:
            self.combiners = [
                np.ones((v, counts[k]), dtype=complex) / np.sqrt(v) for k in range(num_ue)
            ]
        else:
            fixed = []
            for k, w in enumerate(self.combiners):
                w = np.asarray(w, dtype=complex)
                if w.ndim == 1:
                    w = w[:, None]
                if w.shape != (v, counts[k]):
                    raise ValueError(
                        f"combiners[{k}] must be shaped ({v}, {counts[k]})"
                    )
                fixed.append(w)
            self.combiners = fixed
        if self.kappa is None:
            self.kappa = np.ones((num_ris, num_ue))
        else:
            self.kappa = np.asarray(self.kappa, dtype=float)
            if self.kappa.shape != (num_ris, num_ue):
                raise ValueError("kappa must be shaped (num surfaces, num UEs)")
            if not np.all(np.isin(self.kappa, (0.0, 1.0))):
                raise ValueError("kappa entries must be 0 or 1")
        if self.weights is None:
            self.weights = np.ones(num_ue)
        else:
            self.weights = np.asarray(self.weights, dtype=float)
            if self.weights.shape != (num_ue,):
                raise ValueError("weights must have one entry per UE")
            if np.any(self.weights < 0):
                raise ValueError("weights must be non-negative")
        if self.bandwidth_hz is not None and self.bandwidth_hz <= 0:
            raise ValueError("bandwidth_hz must be positive when given")

    @property
    def num_surfaces(self) -> int:
        return len(self.links)

    @property
    def num_ues(self) -> int:
        return len(self.links[0])

    def combined_channel(self, k: int) -> np.ndarray:
        """Direct channel of UE k plus every switched-on reflected route."""
        h = np.array(self.links[0][k].h0, dtype=complex)
        for u in range(self.num_surfaces):
            if self.kappa[u, k] == 0.0:
                continue
            link = self.links[u][k]
            psi = self.psi[u]
            if psi.is_diagonal:
                h = h + (link.h2 * psi.values[None, :]) @ link.h1
            else:
                h = h + link.h2 @ psi.as_matrix() @ link.h1
        return h


def sinr_streams(state: SystemState, k: int) -> np.ndarray:
    """Per-stream SINR at UE k.

    Desired power |w^H H_k f_s|^2 against the sum of all other streams'
    leakage, amplified surface noise sigma_r^2 ||w^H H_2 Psi||^2 for every
    switched-on surface, and thermal noise sigma^2 ||w||^2.
    """
    if not 0 <= k < state.num_ues:
        raise ValueError("UE index out of range")
    own = [s for s, ue in enumerate(state.stream_ue) if ue == k]
    if not own:
        return np.zeros(0)
    h_k = state.combined_channel(k)
    w_k = state.combiners[k]
    f = state.precoder.scaled()
    gains = np.abs(w_k.conj().T @ h_k @ f) ** 2  # (own streams, all streams)
    desired = gains[np.arange(len(own)), own]
    interference = np.sum(gains, axis=1) - desired

    sigma2 = state.links[0][k].sigma2_w
    noise = sigma2 * np.sum(np.abs(w_k) ** 2, axis=0)
    ris_noise = np.zeros(len(own))
    for u in range(state.num_surfaces):
        link = state.links[u][k]
        if state.kappa[u, k] == 0.0 or link.sigma_r2_w == 0.0:
            continue
        psi = state.psi[u]
        if psi.is_diagonal:
            rows = w_k.conj().T @ (link.h2 * psi.values[None, :])
        else:
            rows = w_k.conj().T @ link.h2 @ psi.as_matrix()
        ris_noise = ris_noise + link.sigma_r2_w * np.sum(np.abs(rows) ** 2, axis=1)
    return desired / (interference + ris_noise + noise)


def sum_rate(sinrs, weights=None, bandwidth_hz: float | None = None) -> float:
    """Weighted sum rate sum_k w_k sum_s log2(1 + sinr), times bandwidth if given.

    sinrs is a per-UE sequence of per-stream SINR arrays; weights default to 1.
    Result is in bits/s/Hz, or bits/s when bandwidth_hz is supplied.
    """
    per_ue = [np.atleast_1d(np.asarray(g, dtype=float)) for g in sinrs]
    if any(np.any(g < 0) for g in per_ue):
        raise ValueError("SINR values must be non-negative")
    if weights is None:
        weights = np.ones(len(per_ue))
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (len(per_ue),):
        raise ValueError("weights must have one entry per UE")
    rate = sum(w * float(np.sum(_log2_1p(g))) for w, g in zip(weights, per_ue))
    if bandwidth_hz is not None:
        rate *= bandwidth_hz
    return float(rate)


def capacity_fixed_psi(h: np.ndarray, p_max: float, sigma2: float) -> float:
    """Capacity of a fixed MIMO channel: SVD eigenbeams + water-filled powers.

    Returns max log2 det(I + Q H^H H / sigma2) over Tr(Q) <= p_max, computed
    mode-by-mode as sum log2(1 + q_i s_i^2 / sigma2) with water-filling q.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2:
        raise ValueError("h must be a 2-D channel matrix")
    if p_max <= 0 or sigma2 <= 0:
        raise ValueError("p_max and sigma2 must be positive")
    sv = np.linalg.svd(h, compute_uv=False)
    sv = sv[sv > sv[0] * 1e-15] if sv.size and sv[0] > 0 else sv[:0]
    if sv.size == 0:
        raise ValueError("channel matrix is zero")
    mode_noise = sigma2 / sv**2
    q = waterfill_beta(np.ones(sv.size), mode_noise, p_max)
    return float(np.sum(_log2_1p(q / mode_noise)))


def bs_transmit_power(precoder: Precoder) -> float:
    """Radiated BS power: sum of squared scaled-column norms."""
    return float(np.sum(np.abs(precoder.scaled()) ** 2))


def total_power(state: SystemState, params: PowerModelParams) -> float:
    """Consumed power: PA draw plus BS, per-element surface, and UE circuits.

    A surface contributes N_u * p_ris_element_w only while switched on for at
    least one UE (kappa row non-zero).
    """
    total = bs_transmit_power(state.precoder) / params.eta + params.p_bs_circuit_w
    for u in range(state.num_surfaces):
        if np.any(state.kappa[u] > 0):
            total += state.links[u][0].num_ris_elements * params.p_ris_element_w
    total += state.num_ues * params.p_ue_circuit_w
    return float(total)


def energy_efficiency(state: SystemState, params: PowerModelParams) -> float:
    """Sum rate divided by total consumed power (bits/J when bandwidth set)."""
    power = total_power(state, params)
    if power <= 0.0:
        raise ValueError("total power must be positive for energy efficiency")
    rate = sum_rate(
        [sinr_streams(state, k) for k in range(state.num_ues)],
        weights=state.weights,
        bandwidth_hz=state.bandwidth_hz,
    )
    return rate / power


def sinr_to_db(sinr_lin: float) -> float:
    """Linear SINR to dB with a floor keeping the result finite."""
    return float(10.0 * np.log10(max(float(sinr_lin), DB_FLOOR)))


def evaluate(state: SystemState, params: PowerModelParams | None = None) -> dict:
    """Score a state into the fixed metric-column dictionary.

    Multi-stream UEs report a rate-equivalent SINR (prod(1+g) - 1) so the dB
    column stays a scalar per UE.
    """
    if params is None:
        params = PowerModelParams()
    sinrs = [sinr_streams(state, k) for k in range(state.num_ues)]
    rate = sum_rate(sinrs, weights=state.weights, bandwidth_hz=state.bandwidth_hz)
    row: dict = {"sum_rate": rate}
    for k, gammas in enumerate(sinrs):
        equivalent = float(np.prod(1.0 + gammas) - 1.0) if gammas.size else 0.0
        row[f"sinr_db_ue{k}"] = sinr_to_db(equivalent)
    row["p_bs"] = bs_transmit_power(state.precoder)
    p_ris = 0.0
    for u in range(state.num_surfaces):
        if np.any(state.kappa[u] > 0):
            p_ris += state.links[u][0].num_ris_elements * params.p_ris_element_w
    row["p_ris"] = p_ris
    p_total = total_power(state, params)
    row["p_total"] = p_total
    row["ee"] = rate / p_total if p_total > 0 else None
    return row
