"""Transmit precoders and power allocations for the multi-antenna downlink.

Covers matched-filter and zero-forcing precoding, uniform / water-filling /
max-SNR power allocation, the direct-vs-reflected power split, beam selection
for the reflected route in large arrays, and the multi-surface route split.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Precoder",
    "PowerBudget",
    "IllConditionedChannel",
    "mf_precoder",
    "zf_precoder",
    "uniform_beta",
    "waterfill_beta",
    "maxsnr_beta",
    "power_split_rho",
    "split_snr",
    "best_rpl_beam",
    "multi_ris_power_alloc",
    "compose_split_precoder",
]

_COND_LIMIT = 1e10


class IllConditionedChannel(ValueError):
    """Raised when a channel matrix is too ill-conditioned to invert honestly."""


@dataclass(frozen=True)
class Precoder:
    """Unscaled per-stream beams plus their power scalings.

    The effective transmit matrix is f @ diag(sqrt(beta)); rho optionally
    records the power-split coefficients that built the beams.
    """

    f: np.ndarray
    beta: np.ndarray
    rho: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "f", np.asarray(self.f, dtype=complex))
        object.__setattr__(self, "beta", np.atleast_1d(np.asarray(self.beta, dtype=float)))
        if self.f.ndim != 2:
            raise ValueError("f must be a 2-D matrix of per-stream columns")
        if self.beta.shape != (self.f.shape[1],):
            raise ValueError("beta must have one entry per precoder column")
        if np.any(self.beta < 0):
            raise ValueError("beta entries must be non-negative")
        if self.rho is not None:
            rho = np.atleast_1d(np.asarray(self.rho, dtype=float))
            object.__setattr__(self, "rho", rho)
            if np.any(rho < 0) or np.any(rho > 1):
                raise ValueError("rho entries must lie in [0, 1]")

    @property
    def num_streams(self) -> int:
        return self.f.shape[1]

    def scaled(self) -> np.ndarray:
        """Power-scaled transmit matrix."""
        return self.f * np.sqrt(self.beta)[None, :]


@dataclass(frozen=True)
class PowerBudget:
    """Maximum transmit powers at the BS and (optionally) the surface."""

    p_bs_max_w: float
    p_ris_max_w: float | None = None

    def __post_init__(self):
        if self.p_bs_max_w <= 0:
            raise ValueError("p_bs_max_w must be positive")
        if self.p_ris_max_w is not None and self.p_ris_max_w <= 0:
            raise ValueError("p_ris_max_w must be positive when given")


def mf_precoder(h_eff: np.ndarray) -> np.ndarray:
    """Matched-filter beam: conjugate of the row channel, unit norm.

    Maximizes |h_eff^T f| over unit-norm f (Cauchy-Schwarz equality).
    """
    h_eff = np.asarray(h_eff, dtype=complex).reshape(-1)
    norm = np.linalg.norm(h_eff)
    if norm == 0.0:
        raise ValueError("cannot match-filter a zero channel")
    return np.conj(h_eff) / norm


def zf_precoder(h_eff: np.ndarray) -> np.ndarray:
    """Zero-forcing precoder F = H^H (H H^H)^{-1}, so H F = I exactly."""
    h_eff = np.asarray(h_eff, dtype=complex)
    if h_eff.ndim != 2:
        raise ValueError("h_eff must be a 2-D matrix (streams x antennas)")
    k, m = h_eff.shape
    if k > m:
        raise ValueError(f"zero forcing needs at least as many antennas as streams ({k} > {m})")
    gram = h_eff @ h_eff.conj().T
    if not np.all(np.isfinite(gram)) or np.linalg.cond(gram) > _COND_LIMIT:
        raise IllConditionedChannel("effective channel is rank deficient or ill conditioned")
    return h_eff.conj().T @ np.linalg.inv(gram)


def uniform_beta(h_eff: np.ndarray, p_max: float) -> float:
    """Single power scaling for all streams: beta = p_max / tr((H H^H)^{-1})."""
    if p_max <= 0:
        raise ValueError("p_max must be positive")
    h_eff = np.asarray(h_eff, dtype=complex)
    gram = h_eff @ h_eff.conj().T
    if not np.all(np.isfinite(gram)) or np.linalg.cond(gram) > _COND_LIMIT:
        raise IllConditionedChannel("effective channel is rank deficient or ill conditioned")
    return float(p_max / np.trace(np.linalg.inv(gram)).real)


def waterfill_beta(a, sigma2, p_max: float) -> np.ndarray:
    """Rate-optimal power levels under per-stream power costs.

    Maximizes sum log2(1 + beta_k/n_k) subject to sum a_k beta_k = p_max, where
    a_k is the power cost of stream k and n_k its noise level (scalar sigma2 is
    broadcast). Exact sorted-channel solution: streams are activated in order
    of increasing a_k*n_k and the common water level 1/nu satisfies
    beta_k = 1/(nu a_k) - n_k on the active set.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    noise = np.broadcast_to(np.asarray(sigma2, dtype=float), a.shape).copy()
    if np.any(a <= 0):
        raise ValueError("power costs must be positive")
    if np.any(noise <= 0):
        raise ValueError("noise levels must be positive")
    if p_max <= 0:
        raise ValueError("p_max must be positive")

    cost = a * noise
    order = np.argsort(cost, kind="stable")
    m = a.shape[0]
    while m > 0:
        active = order[:m]
        inv_nu = (p_max + np.sum(cost[active])) / m
        if inv_nu > cost[order[m - 1]]:
            break
        m -= 1
    beta = np.zeros_like(a)
    active = order[:m]
    beta[active] = inv_nu / a[active] - noise[active]
    return beta


def maxsnr_beta(a, sigma2, p_max: float) -> np.ndarray:
    """Power levels minimizing the summed inverse SNR under sum a_k beta_k <= p_max.

    Closed form beta_k = p_max * a_k^{-1/2} / sum_l a_l^{1/2}; the optimum does
    not depend on the noise level, which only scales the objective.
    """
    del sigma2
    a = np.atleast_1d(np.asarray(a, dtype=float))
    if np.any(a <= 0):
        raise ValueError("power costs must be positive")
    if p_max <= 0:
        raise ValueError("p_max must be positive")
    return p_max / (np.sqrt(a) * np.sum(np.sqrt(a)))


def power_split_rho(a: float, b: float) -> float:
    """Optimal fraction of transmit power on the direct route.

    a and b are the direct- and reflected-route amplitudes; the SNR-maximizing
    split is rho = a^2/(a^2 + b^2), achieving M*(a^2+b^2)/sigma2.
    """
    if a < 0 or b < 0:
        raise ValueError("route amplitudes must be non-negative")
    if a == 0 and b == 0:
        raise ValueError("at least one route amplitude must be positive")
    return float(a**2 / (a**2 + b**2))


def split_snr(
    a: float,
    b: float,
    rho: float,
    m: int = 1,
    pt_w: float = 1.0,
    sigma2_w: float = 1.0,
) -> float:
    """Receive SNR of a two-route transmission at direct-route power fraction rho."""
    if not 0 <= rho <= 1:
        raise ValueError("rho must lie in [0, 1]")
    amp = np.sqrt(rho) * a + np.sqrt(1.0 - rho) * b
    return float(m * pt_w * amp**2 / sigma2_w)


def best_rpl_beam(h2_k: np.ndarray, h1: np.ndarray) -> tuple[np.ndarray, int]:
    """Pick the surface element whose feed row carries the strongest reflected route.

    Scores lambda_i = |h2_k[i]| * ||h1[i, :]||^2, takes the argmax (lowest index
    on ties), and returns the matched-filter beam for that row.
    """
    h2_k = np.asarray(h2_k, dtype=complex).reshape(-1)
    h1 = np.asarray(h1, dtype=complex)
    if h1.ndim != 2 or h1.shape[0] != h2_k.shape[0]:
        raise ValueError("h2_k and h1 have inconsistent shapes")
    row_norms_sq = np.sum(np.abs(h1) ** 2, axis=1)
    scores = np.abs(h2_k) * row_norms_sq
    i_opt = int(np.argmax(scores))
    row = h1[i_opt]
    norm = np.linalg.norm(row)
    if norm == 0.0:
        raise ValueError("selected feed row is zero; beam undefined")
    return np.conj(row) / norm, i_opt


def multi_ris_power_alloc(lambdas) -> tuple[np.ndarray, float]:
    """Maximal-ratio power split across routes with amplitudes lambda_u.

    rho_u = lambda_u^2 / sum lambda^2; the combined amplitude then satisfies
    (sum sqrt(rho_u)*lambda_u)^2 = sum lambda_u^2, returned as snr_over_sigma2.
    """
    lam = np.atleast_1d(np.asarray(lambdas, dtype=float))
    if np.any(lam < 0):
        raise ValueError("route amplitudes must be non-negative")
    total = float(np.sum(lam**2))
    if total <= 0.0:
        raise ValueError("at least one route amplitude must be positive")
    return lam**2 / total, total


def compose_split_precoder(f_parts, rhos) -> np.ndarray:
    """Blend per-route unit beams: f = sum_u sqrt(rho_u) * f_u."""
    rhos = np.atleast_1d(np.asarray(rhos, dtype=float))
    if len(f_parts) != rhos.shape[0]:
        raise ValueError("one rho per beam part is required")
    parts = [np.asarray(p, dtype=complex).reshape(-1) for p in f_parts]
    if any(p.shape != parts[0].shape for p in parts):
        raise ValueError("beam parts must share one length")
    return np.sum([np.sqrt(r) * p for r, p in zip(rhos, parts)], axis=0)
