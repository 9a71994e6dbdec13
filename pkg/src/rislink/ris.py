"""Reflection matrices: representation, coherent phase design, and multi-user combining.

A reflecting surface applies one complex coefficient per element. Passive
surfaces are restricted to unit modulus (phase-only); active surfaces may
scale amplitudes under a power budget and inject their own noise.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .arrays import LinkSet

__all__ = [
    "ReflectionMatrix",
    "composite_channel",
    "coherent_phases_rpl_only",
    "coherent_phases_with_dpl",
    "coherent_phases_given_beam",
    "combine_psi_average",
    "combine_psi_partition",
    "default_partition",
    "ris_transmit_power",
]

KINDS = ("passive_diagonal", "active_diagonal", "general")

_UNIT_TOL = 1e-12
_DEGENERATE_TOL = 1e-9


@dataclass(frozen=True)
class ReflectionMatrix:
    """Per-element reflection coefficients of one surface.

    kind "passive_diagonal" and "active_diagonal" store a length-N vector of
    diagonal values; "general" stores a full N x N matrix. power_budget_w is
    meaningful for active surfaces only.
    """

    kind: str
    values: np.ndarray
    power_budget_w: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}; expected one of {KINDS}")
        object.__setattr__(self, "values", np.asarray(self.values, dtype=complex))
        if self.kind == "general":
            if self.values.ndim != 2 or self.values.shape[0] != self.values.shape[1]:
                raise ValueError("general reflection matrices must be square 2-D arrays")
            return
        if self.values.ndim != 1:
            raise ValueError("diagonal reflection matrices store a 1-D value vector")
        mods = np.abs(self.values)
        if self.kind == "passive_diagonal" and np.any(np.abs(mods - 1.0) > _UNIT_TOL):
            raise ValueError("passive elements must have unit modulus")
        if self.kind == "active_diagonal" and np.any(mods <= 0.0):
            raise ValueError("active elements must have positive modulus")

    @classmethod
    def passive(cls, phases: np.ndarray) -> "ReflectionMatrix":
        """Unit-modulus diagonal surface from a vector of phases."""
        return cls(kind="passive_diagonal", values=np.exp(1j * np.asarray(phases, dtype=float)))

    @classmethod
    def identity(cls, n: int) -> "ReflectionMatrix":
        return cls(kind="passive_diagonal", values=np.ones(n, dtype=complex))

    @property
    def is_diagonal(self) -> bool:
        return self.kind != "general"

    @property
    def num_elements(self) -> int:
        return self.values.shape[0]

    @property
    def phases(self) -> np.ndarray:
        if not self.is_diagonal:
            raise ValueError("phases are defined for diagonal kinds only")
        return np.angle(self.values)

    def as_matrix(self) -> np.ndarray:
        return np.diag(self.values) if self.is_diagonal else self.values

    def frobenius_sq(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2))


def composite_channel(links: LinkSet, psi: ReflectionMatrix) -> np.ndarray:
    """Effective BS->UE channel h0 + h2 Psi h1 for a given reflection matrix."""
    if psi.num_elements != links.num_ris_elements:
        raise ValueError(
            f"reflection matrix has {psi.num_elements} elements, "
            f"links expect {links.num_ris_elements}"
        )
    if psi.is_diagonal:
        return links.h0 + (links.h2 * psi.values) @ links.h1
    return links.h0 + links.h2 @ psi.values @ links.h1


def coherent_phases_rpl_only(h1_phases: np.ndarray, h2_phases: np.ndarray) -> ReflectionMatrix:
    """Phase design that aligns every reflected-path element, with no direct link.

    Element n gets psi_n = -(h1_phases[n] + h2_phases[n]), so the cascaded
    scalar channel magnitudes add: |h2^T Psi h1| = N*|h1||h2| for single-path
    feed/drop responses.
    """
    h1_phases = np.asarray(h1_phases, dtype=float)
    h2_phases = np.asarray(h2_phases, dtype=float)
    if h1_phases.shape != h2_phases.shape:
        raise ValueError("phase vectors must have the same length")
    return ReflectionMatrix.passive(-(h1_phases + h2_phases))


def coherent_phases_with_dpl(
    phi0: float, h1_phases: np.ndarray, h2_phases: np.ndarray
) -> ReflectionMatrix:
    """Phase design that aligns the reflected path onto the direct-link phase phi0."""
    h1_phases = np.asarray(h1_phases, dtype=float)
    h2_phases = np.asarray(h2_phases, dtype=float)
    if h1_phases.shape != h2_phases.shape:
        raise ValueError("phase vectors must have the same length")
    return ReflectionMatrix.passive(phi0 - h1_phases - h2_phases)


def coherent_phases_given_beam(
    h2_k: np.ndarray, h1: np.ndarray, f: np.ndarray
) -> tuple[ReflectionMatrix, float]:
    """Per-element phases that cohere the reflected route for a fixed transmit beam.

    With t_n = h1[n, :] @ f, element n compensates both its drop-channel phase
    and the beamformed feed phase: psi_n = -arg(h2_k[n]) - arg(t_n). Returns
    the surface and the coherent route amplitude b = sum_n |h2_k[n]|*|t_n|.
    """
    h2_k = np.asarray(h2_k, dtype=complex).reshape(-1)
    f = np.asarray(f, dtype=complex).reshape(-1)
    h1 = np.asarray(h1, dtype=complex)
    if h1.ndim != 2 or h1.shape[0] != h2_k.shape[0] or h1.shape[1] != f.shape[0]:
        raise ValueError("h2_k, h1 and f have inconsistent shapes")
    norm_f = np.linalg.norm(f)
    if abs(norm_f - 1.0) > 1e-9:
        raise ValueError("beam must be unit norm")

    t = h1 @ f
    mags = np.abs(h2_k) * np.abs(t)
    if np.any(mags == 0.0):
        warnings.warn(
            "zero-magnitude element(s) in coherent phase design; their phase is set to 0",
            RuntimeWarning,
            stacklevel=2,
        )
    phases = -(np.angle(h2_k) + np.angle(t))
    return ReflectionMatrix.passive(phases), float(np.sum(mags))


def combine_psi_average(
    per_ue: list[ReflectionMatrix],
    mode: str = "passive",
    p_ris_w: float | None = None,
) -> ReflectionMatrix:
    """Merge per-UE surface designs by element-wise phasor averaging.

    The per-element sum s_n = sum_k values_k[n] is rescaled per mode:
    "passive" divides each element by |s_n| (unit modulus restored); "active"
    applies one common real gain so the squared Frobenius norm meets p_ris_w.
    """
    if not per_ue:
        raise ValueError("at least one per-UE design is required")
    if mode not in ("passive", "active"):
        raise ValueError("mode must be 'passive' or 'active'")
    n = per_ue[0].num_elements
    for rm in per_ue:
        if not rm.is_diagonal:
            raise ValueError("combining requires diagonal reflection matrices")
        if rm.num_elements != n:
            raise ValueError("all per-UE designs must have the same element count")

    s = np.sum([rm.values for rm in per_ue], axis=0)
    if mode == "active":
        if p_ris_w is None or p_ris_w <= 0:
            raise ValueError("active combining requires a positive p_ris_w")
        total = float(np.sum(np.abs(s) ** 2))
        if total <= 0.0:
            raise ValueError("degenerate all-zero phasor sum")
        scale = np.sqrt(p_ris_w / total)
        return ReflectionMatrix(kind="active_diagonal", values=scale * s, power_budget_w=p_ris_w)

    mags = np.abs(s)
    if np.any(mags < _DEGENERATE_TOL):
        raise ValueError(
            "antipodal per-UE phases cancel on some element; "
            "phase undefined — use partition combining instead"
        )
    return ReflectionMatrix(kind="passive_diagonal", values=s / mags)


def default_partition(n: int, k: int) -> list[int]:
    """Contiguous block assignment of n elements to k UEs; remainder to the last UE."""
    if k < 1 or n < k:
        raise ValueError("need at least one element per UE")
    block = n // k
    return [min(i // block, k - 1) for i in range(n)]


def combine_psi_partition(
    per_ue: list[ReflectionMatrix],
    assignment: list[int] | None = None,
) -> ReflectionMatrix:
    """Merge per-UE surface designs by giving each element to exactly one UE."""
    if not per_ue:
        raise ValueError("at least one per-UE design is required")
    n = per_ue[0].num_elements
    for rm in per_ue:
        if not rm.is_diagonal:
            raise ValueError("combining requires diagonal reflection matrices")
        if rm.num_elements != n:
            raise ValueError("all per-UE designs must have the same element count")
    if assignment is None:
        assignment = default_partition(n, len(per_ue))
    if len(assignment) != n:
        raise ValueError("assignment must give one UE index per element")
    if any(not 0 <= a < len(per_ue) for a in assignment):
        raise ValueError("assignment contains an invalid UE index")

    values = np.array([per_ue[a].values[i] for i, a in enumerate(assignment)])
    kind = per_ue[0].kind
    return ReflectionMatrix(kind=kind, values=values)


def ris_transmit_power(
    psi: ReflectionMatrix,
    h1: np.ndarray,
    f: np.ndarray,
    sigma_r2_w: float = 0.0,
) -> float:
    """Power leaving the surface: sum_s ||Psi h1 f_s||^2 + ||Psi||_F^2 * sigma_r2.

    f may be a single beam (M,) or a matrix of per-stream columns (M, S);
    columns are assumed already power-scaled.
    """
    f = np.asarray(f, dtype=complex)
    if f.ndim == 1:
        f = f[:, None]
    h1 = np.asarray(h1, dtype=complex)
    if h1.shape[0] != psi.num_elements or h1.shape[1] != f.shape[0]:
        raise ValueError("psi, h1 and f have inconsistent shapes")
    if sigma_r2_w < 0:
        raise ValueError("sigma_r2_w must be non-negative")

    fed = h1 @ f
    reflected = psi.values[:, None] * fed if psi.is_diagonal else psi.values @ fed
    signal = float(np.sum(np.abs(reflected) ** 2))
    return signal + psi.frobenius_sq() * sigma_r2_w
