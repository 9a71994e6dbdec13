"""Antenna-array steering vectors and sparse multipath channel synthesis.

The base station and user equipments carry uniform linear arrays; the
reflecting surface is a uniform planar array. Channels are sums of a
line-of-sight ray plus a configurable number of non-line-of-sight rays,
each an outer product of receive/transmit steering vectors scaled by a
complex gain.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "UlaSpec",
    "UpaSpec",
    "PathComponent",
    "LinkSet",
    "GainModel",
    "ScenarioGeometry",
    "ula_steering",
    "upa_steering",
    "synthesize_channel",
    "random_paths",
    "random_scenario",
    "group_links",
    "upa_shape",
]

CHANNEL_KINDS = ("bs_ue", "bs_ris", "ris_ue")


@dataclass(frozen=True)
class UlaSpec:
    """Uniform linear array: element count and spacing in wavelengths."""

    p: int
    spacing_wl: float = 0.5

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("element count must be >= 1")
        if self.spacing_wl <= 0:
            raise ValueError("spacing must be positive")


@dataclass(frozen=True)
class UpaSpec:
    """Uniform planar array: per-axis element counts and spacings in wavelengths."""

    nx: int
    ny: int
    spacing_x_wl: float = 0.5
    spacing_y_wl: float = 0.5

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise ValueError("element counts must be >= 1")
        if self.spacing_x_wl <= 0 or self.spacing_y_wl <= 0:
            raise ValueError("spacings must be positive")

    @property
    def n(self) -> int:
        return self.nx * self.ny


@dataclass(frozen=True)
class PathComponent:
    """One propagation ray: complex gain plus departure/arrival angles.

    Angles are scalars (radians) for linear-array ends and (azimuth, elevation)
    pairs for planar-array ends.
    """

    gain: complex
    aod: float | tuple[float, float]
    aoa: float | tuple[float, float]
    is_los: bool = False


@dataclass(frozen=True)
class LinkSet:
    """The three channel matrices of one BS-RIS-UE triple plus noise levels.

    h0: direct BS->UE channel (V x M), all-zero when the direct link is blocked
    h1: BS->RIS feed channel (N x M)
    h2: RIS->UE drop channel (V x N)
    """

    h0: np.ndarray
    h1: np.ndarray
    h2: np.ndarray
    sigma2_w: float
    sigma_r2_w: float = 0.0

    def __post_init__(self):
        for name in ("h0", "h1", "h2"):
            m = getattr(self, name)
            if not isinstance(m, np.ndarray) or m.ndim != 2:
                raise ValueError(f"{name} must be a 2-D ndarray")
        v, m = self.h0.shape
        n = self.h1.shape[0]
        if self.h1.shape[1] != m:
            raise ValueError("h1 column count must match h0 column count (BS antennas)")
        if self.h2.shape != (v, n):
            raise ValueError("h2 must be (UE antennas) x (RIS elements)")
        if self.sigma2_w <= 0:
            raise ValueError("sigma2_w must be positive")
        if self.sigma_r2_w < 0:
            raise ValueError("sigma_r2_w must be non-negative")

    @property
    def num_bs_antennas(self) -> int:
        return self.h0.shape[1]

    @property
    def num_ue_antennas(self) -> int:
        return self.h0.shape[0]

    @property
    def num_ris_elements(self) -> int:
        return self.h1.shape[0]


def ula_steering(spec: UlaSpec, theta_rad: float) -> np.ndarray:
    """Steering vector of a linear array toward angle theta.

    Entry p is exp(-j*2*pi*p*vartheta) with vartheta = spacing_wl*sin(theta).
    Entries are unit modulus and the first entry is exactly 1, so the squared
    norm equals the element count.
    """
    if abs(theta_rad) > np.pi / 2 + 1e-12:
        raise ValueError("theta must lie in [-pi/2, pi/2]")
    vartheta = spec.spacing_wl * np.sin(theta_rad)
    return np.exp(-2j * np.pi * vartheta * np.arange(spec.p))


def upa_steering(spec: UpaSpec, azimuth_rad: float, elevation_rad: float) -> np.ndarray:
    """Steering vector of a planar array: Kronecker product of the two axis responses.

    mu_x = spacing_x*cos(azimuth)*sin(elevation), mu_y = spacing_y*sin(azimuth)*sin(elevation);
    element (ix*ny + iy) equals ax[ix]*ay[iy].
    """
    mu_x = spec.spacing_x_wl * np.cos(azimuth_rad) * np.sin(elevation_rad)
    mu_y = spec.spacing_y_wl * np.sin(azimuth_rad) * np.sin(elevation_rad)
    ax = np.exp(-2j * np.pi * mu_x * np.arange(spec.nx))
    ay = np.exp(-2j * np.pi * mu_y * np.arange(spec.ny))
    return np.kron(ax, ay)


def _steer(spec: UlaSpec | UpaSpec, angle) -> np.ndarray:
    if isinstance(spec, UlaSpec):
        if not np.isscalar(angle):
            raise ValueError("linear-array angles must be scalars")
        return ula_steering(spec, float(angle))
    azimuth, elevation = angle
    return upa_steering(spec, float(azimuth), float(elevation))


def synthesize_channel(
    kind: str,
    paths: list[PathComponent],
    tx_spec: UlaSpec | UpaSpec,
    rx_spec: UlaSpec | UpaSpec,
) -> np.ndarray:
    """Sum-of-rays channel matrix: sum_l gain_l * a_rx(aoa_l) a_tx(aod_l)^T."""
    if kind not in CHANNEL_KINDS:
        raise ValueError(f"unknown channel kind {kind!r}; expected one of {CHANNEL_KINDS}")
    if not paths:
        raise ValueError("at least one path is required")
    expected = {
        "bs_ue": (UlaSpec, UlaSpec),
        "bs_ris": (UlaSpec, UpaSpec),
        "ris_ue": (UpaSpec, UlaSpec),
    }[kind]
    if not isinstance(tx_spec, expected[0]) or not isinstance(rx_spec, expected[1]):
        raise ValueError(f"channel kind {kind!r} expects tx/rx array types {expected}")

    rx_n = rx_spec.p if isinstance(rx_spec, UlaSpec) else rx_spec.n
    tx_n = tx_spec.p if isinstance(tx_spec, UlaSpec) else tx_spec.n
    h = np.zeros((rx_n, tx_n), dtype=complex)
    for path in paths:
        a_rx = _steer(rx_spec, path.aoa)
        a_tx = _steer(tx_spec, path.aod)
        h += path.gain * np.outer(a_rx, a_tx)
    return h


@dataclass(frozen=True)
class GainModel:
    """Path-gain statistics: NLoS complex-Gaussian variance and LoS power ratio."""

    nlos_var: float = 1.0
    k_factor: float = 10.0

    def __post_init__(self):
        if self.nlos_var <= 0:
            raise ValueError("nlos_var must be positive")
        if self.k_factor < 0:
            raise ValueError("k_factor must be non-negative")


def _random_angle(rng: np.random.Generator, spec: UlaSpec | UpaSpec):
    if isinstance(spec, UlaSpec):
        return float(rng.uniform(-np.pi / 2, np.pi / 2))
    return (float(rng.uniform(-np.pi, np.pi)), float(rng.uniform(0.0, np.pi / 2)))


def random_paths(
    rng: np.random.Generator,
    num_nlos: int,
    gain_model: GainModel,
    tx_spec: UlaSpec | UpaSpec,
    rx_spec: UlaSpec | UpaSpec,
    include_los: bool = True,
) -> list[PathComponent]:
    """Draw a LoS ray (optionally) plus num_nlos NLoS rays with random angles.

    NLoS gains are complex Gaussian with variance nlos_var; the LoS gain has
    deterministic magnitude sqrt(k_factor*nlos_var) and a uniform random phase.
    """
    paths: list[PathComponent] = []
    if include_los:
        los_mag = np.sqrt(gain_model.k_factor * gain_model.nlos_var)
        gain = los_mag * np.exp(1j * rng.uniform(0.0, 2.0 * np.pi))
        paths.append(
            PathComponent(
                gain=complex(gain),
                aod=_random_angle(rng, tx_spec),
                aoa=_random_angle(rng, rx_spec),
                is_los=True,
            )
        )
    std = np.sqrt(gain_model.nlos_var / 2.0)
    for _ in range(num_nlos):
        gain = std * (rng.standard_normal() + 1j * rng.standard_normal())
        paths.append(
            PathComponent(
                gain=complex(gain),
                aod=_random_angle(rng, tx_spec),
                aoa=_random_angle(rng, rx_spec),
            )
        )
    return paths


def upa_shape(n: int) -> tuple[int, int]:
    """Factor a scalar element count into the most-square (nx, ny) pair, nx <= ny."""
    if n < 1:
        raise ValueError("element count must be >= 1")
    for nx in range(int(np.sqrt(n)), 0, -1):
        if n % nx == 0:
            return nx, n // nx
    return 1, n


@dataclass(frozen=True)
class ScenarioGeometry:
    """Dimensions and path counts for one random scenario draw.

    n may be a single element count shared by all RISs or a per-RIS list.
    """

    m: int = 8
    n: int | tuple[int, ...] = 16
    v: int = 1
    k: int = 1
    u: int = 1
    l0: int = 2
    l1: int = 2
    l2: int = 2
    blockage: bool = False
    gain: GainModel = field(default_factory=GainModel)

    def __post_init__(self):
        if min(self.m, self.v, self.k, self.u) < 1:
            raise ValueError("m, v, k and u must be >= 1")
        if min(self.l0, self.l1, self.l2) < 0:
            raise ValueError("path counts must be non-negative")
        if any(n < 1 for n in self.ris_sizes):
            raise ValueError("RIS element counts must be >= 1")
        if not isinstance(self.n, int) and len(self.ris_sizes) != self.u:
            raise ValueError("per-RIS element list must have u entries")

    @property
    def ris_sizes(self) -> tuple[int, ...]:
        if isinstance(self.n, int):
            return (self.n,) * self.u
        return tuple(self.n)


def random_scenario(
    rng_seed: int,
    geometry: ScenarioGeometry,
    sigma2_w: float = 1.0,
    sigma_r2_w: float = 0.0,
) -> list[LinkSet]:
    """Draw one full set of channels for the given geometry, deterministically.

    Returns U*K LinkSets in RIS-major order (index u*K + k). Each UE's direct
    channel h0 is drawn once and shared across its per-RIS LinkSets; blockage
    zeroes h0 entirely.
    """
    rng = np.random.default_rng(rng_seed)
    bs = UlaSpec(geometry.m)
    ue = UlaSpec(geometry.v)
    ris_specs = [UpaSpec(*upa_shape(n)) for n in geometry.ris_sizes]

    h0s = []
    for _ in range(geometry.k):
        if geometry.blockage:
            h0s.append(np.zeros((geometry.v, geometry.m), dtype=complex))
        else:
            paths = random_paths(rng, geometry.l0, geometry.gain, bs, ue)
            h0s.append(synthesize_channel("bs_ue", paths, bs, ue))

    h1s = []
    for ris in ris_specs:
        paths = random_paths(rng, geometry.l1, geometry.gain, bs, ris)
        h1s.append(synthesize_channel("bs_ris", paths, bs, ris))

    links: list[LinkSet] = []
    for u_idx, ris in enumerate(ris_specs):
        for k_idx in range(geometry.k):
            paths = random_paths(rng, geometry.l2, geometry.gain, ris, ue)
            h2 = synthesize_channel("ris_ue", paths, ris, ue)
            links.append(
                LinkSet(
                    h0=h0s[k_idx],
                    h1=h1s[u_idx],
                    h2=h2,
                    sigma2_w=sigma2_w,
                    sigma_r2_w=sigma_r2_w,
                )
            )
    return links


def group_links(links: list[LinkSet], u: int, k: int) -> list[list[LinkSet]]:
    """Reshape a flat RIS-major LinkSet list into [ris][ue] nesting."""
    if len(links) != u * k:
        raise ValueError(f"expected {u * k} LinkSets, got {len(links)}")
    return [links[i * k : (i + 1) * k] for i in range(u)]
