"""Closed-form SNR models for one- and two-path links with simple reflectors.

These are the analytically textbook-checkable building blocks: free-space decay,
the two-ray ground-reflection model, and a family of two-reflector receive-SNR
cases distinguished by where channel knowledge lives (receiver combining,
transmitter phase/amplitude control, or phase/amplitude control at the
reflectors themselves).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "FreeSpaceLink",
    "TwoRayGeometry",
    "ReflectedPath",
    "CASE_IDS",
    "snr_free_space",
    "snr_two_ray",
    "two_path_gain",
    "snr_case",
]

CASE_IDS = (
    "fading",
    "mrc_rx",
    "tx_phase_only",
    "tx_full_csi",
    "reflector_phase",
    "reflector_amp_phase",
)


@dataclass(frozen=True)
class FreeSpaceLink:
    """A single line-of-sight link: distance, propagation constant, power, noise."""

    d0_m: float
    c0: float
    pt_w: float
    sigma2_w: float

    def __post_init__(self):
        if self.d0_m <= 0:
            raise ValueError("d0_m must be positive")
        if self.c0 <= 0:
            raise ValueError("c0 must be positive")
        if self.pt_w <= 0:
            raise ValueError("pt_w must be positive")
        if self.sigma2_w <= 0:
            raise ValueError("sigma2_w must be positive")


@dataclass(frozen=True)
class TwoRayGeometry:
    """Ground-reflection geometry: antenna heights, ground distance, wavelength, gains."""

    d_m: float
    ht_m: float
    hr_m: float
    lambda_m: float
    gt: float = 1.0
    gr: float = 1.0

    def __post_init__(self):
        if self.d_m <= 0 or self.ht_m <= 0 or self.hr_m <= 0:
            raise ValueError("d_m, ht_m and hr_m must be positive")
        if self.lambda_m <= 0:
            raise ValueError("lambda_m must be positive")
        if self.gt <= 0 or self.gr <= 0:
            raise ValueError("antenna gains must be positive")

    @property
    def far_field(self) -> bool:
        """True when the small-angle approximation is trustworthy."""
        return self.d_m >= 100.0 * self.ht_m * self.hr_m / self.lambda_m

    @property
    def los_length_m(self) -> float:
        return float(np.hypot(self.d_m, self.ht_m - self.hr_m))

    @property
    def reflected_length_m(self) -> float:
        return float(np.hypot(self.d_m, self.ht_m + self.hr_m))


@dataclass(frozen=True)
class ReflectedPath:
    """One reflected ray: reflection coefficient, effective path length, phase."""

    r: float
    d_m: float
    phi_rad: float

    def __post_init__(self):
        if not 0 < self.r <= 1:
            raise ValueError("reflection coefficient must satisfy 0 < r <= 1")
        if self.d_m <= 0:
            raise ValueError("path length must be positive")


def snr_free_space(link: FreeSpaceLink) -> float:
    """Receive SNR of a single line-of-sight path: c0^2 * Pt / (d0^2 * sigma2)."""
    return link.c0**2 / link.d0_m**2 * link.pt_w / link.sigma2_w


def snr_two_ray(geom: TwoRayGeometry, pt_w: float, sigma2_w: float) -> tuple[float, float]:
    """SNR of the two-ray ground-reflection model.

    Returns (snr_approx, snr_exact). The approximation is the classical
    gt*gr*ht^2*hr^2/d^4 form; the exact value keeps the two-term complex sum
    with a ground reflection coefficient of -1. A warning is issued when the
    geometry is outside the far-field validity region.
    """
    if pt_w <= 0 or sigma2_w <= 0:
        raise ValueError("pt_w and sigma2_w must be positive")
    if not geom.far_field:
        warnings.warn(
            "two-ray geometry is outside the far-field region "
            f"(d={geom.d_m} < 100*ht*hr/lambda = {100 * geom.ht_m * geom.hr_m / geom.lambda_m}); "
            "snr_approx is unreliable",
            RuntimeWarning,
            stacklevel=2,
        )

    snr_approx = geom.gt * geom.gr * (geom.ht_m * geom.hr_m) ** 2 / geom.d_m**4 * pt_w / sigma2_w

    c0 = np.sqrt(geom.gt * geom.gr) * geom.lambda_m / (4.0 * np.pi)
    d_los = geom.los_length_m
    d_ref = geom.reflected_length_m
    phase_los = 2.0 * np.pi * d_los / geom.lambda_m
    phase_ref = 2.0 * np.pi * d_ref / geom.lambda_m
    field = np.exp(-1j * phase_los) / d_los - np.exp(-1j * phase_ref) / d_ref
    snr_exact = c0**2 * np.abs(field) ** 2 * pt_w / sigma2_w

    return float(snr_approx), float(snr_exact)


def two_path_gain(p1: ReflectedPath, p2: ReflectedPath) -> tuple[float, float]:
    """Amplitude and phase of the coherent sum of two reflected paths.

    alpha = sqrt(r1^2/d1^2 + r2^2/d2^2 + 2 r1 r2 cos(phi1 - phi2)/(d1 d2)),
    phase = arg(r1 e^{j phi1}/d1 + r2 e^{j phi2}/d2).
    """
    u = p1.r / p1.d_m
    v = p2.r / p2.d_m
    cross = 2.0 * u * v * np.cos(p1.phi_rad - p2.phi_rad)
    alpha = float(np.sqrt(max(u**2 + v**2 + cross, 0.0)))
    z = u * np.exp(1j * p1.phi_rad) + v * np.exp(1j * p2.phi_rad)
    return alpha, float(np.angle(z))


def snr_case(
    case_id: str,
    p1: ReflectedPath,
    p2: ReflectedPath,
    pt_w: float,
    sigma2_w: float,
    c0: float = 1.0,
    amp_budget: float | None = None,
) -> float:
    """Receive SNR for one of the two-reflector channel-knowledge cases.

    Cases:
      fading              - no channel knowledge anywhere; paths interfere as-is
      mrc_rx              - receiver combines the two branches by conjugate weighting
      tx_phase_only       - transmitter pre-compensates phases, splitting power equally
      tx_full_csi         - transmitter weights amplitude and phase (same SNR as mrc_rx)
      reflector_phase     - reflectors rotate phases so paths add coherently, full power
      reflector_amp_phase - reflectors also scale amplitudes under a total budget
                            sum(alpha_i^2) = amp_budget, split optimally
    """
    if case_id not in CASE_IDS:
        raise ValueError(f"unknown case_id {case_id!r}; expected one of {CASE_IDS}")
    if pt_w <= 0 or sigma2_w <= 0:
        raise ValueError("pt_w and sigma2_w must be positive")
    if c0 <= 0:
        raise ValueError("c0 must be positive")

    u = p1.r / p1.d_m
    v = p2.r / p2.d_m
    scale = c0**2 * pt_w / sigma2_w

    if case_id == "fading":
        alpha, _ = two_path_gain(p1, p2)
        return scale * alpha**2
    if case_id in ("mrc_rx", "tx_full_csi"):
        return scale * (u**2 + v**2)
    if case_id == "tx_phase_only":
        return scale * (u + v) ** 2 / 2.0
    if case_id == "reflector_phase":
        return scale * (u + v) ** 2
    # reflector_amp_phase: optimal amplitudes are proportional to the per-path
    # gain-to-length ratios, which turns the budget into a plain sum of squares.
    if amp_budget is None:
        raise ValueError("amp_budget is required for the reflector_amp_phase case")
    if amp_budget <= 0:
        raise ValueError("amp_budget must be positive")
    return scale * amp_budget * (u**2 + v**2)
