"""Reflection matrices, composite channels, and phase-alignment designs.

Oracles: composite channels rebuilt with a dense diag() product; coherent
designs checked by verifying the resulting cascades are real, positive, and
equal to the sum of element magnitudes.
"""

import numpy as np
import pytest

from rislink import (
    LinkSet,
    ReflectionMatrix,
    combine_psi_average,
    combine_psi_partition,
    composite_channel,
    coherent_phases_given_beam,
    coherent_phases_rpl_only,
    coherent_phases_with_dpl,
    default_partition,
    ris_transmit_power,
)
from tests.conftest import crandn


# ---------------------------------------------------------------------------
# ReflectionMatrix container
# ---------------------------------------------------------------------------


def test_passive_constructor_round_trips_phases():
    phases = np.array([0.1, -2.0, 3.0])
    rm = ReflectionMatrix.passive(phases)
    assert rm.kind == "passive_diagonal" and rm.is_diagonal
    assert rm.num_elements == 3
    assert np.allclose(np.abs(rm.values), 1.0)
    assert np.allclose(rm.phases, phases)
    assert np.allclose(rm.as_matrix(), np.diag(np.exp(1j * phases)))
    assert rm.frobenius_sq() == pytest.approx(3.0)


def test_identity_surface_is_transparent():
    rm = ReflectionMatrix.identity(4)
    assert np.allclose(rm.values, 1.0)


def test_passive_rejects_non_unit_modulus():
    with pytest.raises(ValueError, match="unit modulus"):
        ReflectionMatrix(kind="passive_diagonal", values=np.array([1.0, 0.5]))


def test_active_requires_positive_modulus():
    ReflectionMatrix(kind="active_diagonal", values=np.array([2.0, 0.5j]), power_budget_w=5.0)
    with pytest.raises(ValueError, match="positive modulus"):
        ReflectionMatrix(kind="active_diagonal", values=np.array([1.0, 0.0]))


def test_general_kind_wants_square_matrices():
    rm = ReflectionMatrix(kind="general", values=np.eye(3) * 1j)
    assert not rm.is_diagonal
    assert np.allclose(rm.as_matrix(), np.eye(3) * 1j)
    with pytest.raises(ValueError, match="square"):
        ReflectionMatrix(kind="general", values=np.zeros((2, 3)))
    with pytest.raises(ValueError, match="phases"):
        rm.phases


def test_unknown_kind_rejected():
    with pytest.raises(ValueError, match="unknown kind"):
        ReflectionMatrix(kind="holographic", values=np.ones(2))


# ---------------------------------------------------------------------------
# composite channel
# ---------------------------------------------------------------------------


def _links(rng, v=2, m=3, n=4, direct=True):
    return LinkSet(
        h0=crandn(rng, v, m) if direct else np.zeros((v, m), complex),
        h1=crandn(rng, n, m),
        h2=crandn(rng, v, n),
        sigma2_w=1.0,
    )


def test_composite_channel_matches_dense_oracle(rng):
    links = _links(rng)
    psi = ReflectionMatrix.passive(rng.uniform(0, 2 * np.pi, 4))
    h = composite_channel(links, psi)
    oracle = links.h0 + links.h2 @ np.diag(psi.values) @ links.h1
    assert np.allclose(h, oracle, atol=1e-13)

    full = ReflectionMatrix(kind="general", values=crandn(rng, 4, 4))
    assert np.allclose(
        composite_channel(links, full), links.h0 + links.h2 @ full.values @ links.h1, atol=1e-13
    )


def test_composite_channel_checks_element_count(rng):
    with pytest.raises(ValueError, match="elements"):
        composite_channel(_links(rng, n=4), ReflectionMatrix.identity(5))


# ---------------------------------------------------------------------------
# coherent phase designs
# ---------------------------------------------------------------------------


def test_rpl_only_alignment_sums_magnitudes(rng):
    # single-antenna cascade: with aligned phases the magnitudes add exactly
    n = 16
    g1 = crandn(rng, n)
    g2 = crandn(rng, n)
    psi = coherent_phases_rpl_only(np.angle(g1), np.angle(g2))
    cascade = np.sum(g2 * psi.values * g1)
    assert cascade.imag == pytest.approx(0.0, abs=1e-12)
    assert cascade.real == pytest.approx(np.sum(np.abs(g1) * np.abs(g2)), rel=1e-12)


def test_dpl_alignment_lands_on_direct_phase(rng):
    n = 8
    g1, g2 = crandn(rng, n), crandn(rng, n)
    phi0 = 0.7
    psi = coherent_phases_with_dpl(phi0, np.angle(g1), np.angle(g2))
    cascade = np.sum(g2 * psi.values * g1)
    assert np.angle(cascade) == pytest.approx(phi0, abs=1e-12)
    # direct + reflected now add constructively
    h0 = 0.9 * np.exp(1j * phi0)
    assert abs(h0 + cascade) == pytest.approx(abs(h0) + abs(cascade), rel=1e-12)


def test_given_beam_alignment_and_amplitude(rng):
    n, m = 6, 4
    h1 = crandn(rng, n, m)
    h2_k = crandn(rng, n)
    f = crandn(rng, m)
    f = f / np.linalg.norm(f)
    psi, b = coherent_phases_given_beam(h2_k, h1, f)
    route = (h2_k * psi.values) @ (h1 @ f)
    assert route.imag == pytest.approx(0.0, abs=1e-10)
    assert route.real == pytest.approx(b, rel=1e-12)
    assert b == pytest.approx(np.sum(np.abs(h2_k) * np.abs(h1 @ f)), rel=1e-12)


def test_given_beam_requires_unit_norm(rng):
    h1 = crandn(rng, 3, 2)
    with pytest.raises(ValueError, match="unit norm"):
        coherent_phases_given_beam(crandn(rng, 3), h1, 2.0 * np.ones(2))


def test_given_beam_warns_on_dead_elements(rng):
    h1 = crandn(rng, 3, 2)
    h2 = crandn(rng, 3)
    h2[1] = 0.0
    f = np.array([1.0, 0.0], complex)
    with pytest.warns(RuntimeWarning, match="zero-magnitude"):
        coherent_phases_given_beam(h2, h1, f)


def test_given_beam_is_optimal_among_random_phases(rng):
    # no phase vector can push the route amplitude above the magnitude sum
    n, m = 5, 3
    h1, h2_k = crandn(rng, n, m), crandn(rng, n)
    f = crandn(rng, m)
    f /= np.linalg.norm(f)
    _, b = coherent_phases_given_beam(h2_k, h1, f)
    t = h1 @ f
    for _ in range(300):
        random_vals = np.exp(1j * rng.uniform(0, 2 * np.pi, n))
        assert abs(np.sum(h2_k * random_vals * t)) <= b * (1 + 1e-12)


# ---------------------------------------------------------------------------
# combining per-UE designs on one surface
# ---------------------------------------------------------------------------


def test_average_combining_matches_normalized_phasor_sum(rng):
    designs = [ReflectionMatrix.passive(rng.uniform(0, 2 * np.pi, 5)) for _ in range(3)]
    merged = combine_psi_average(designs)
    s = sum(d.values for d in designs)
    assert merged.kind == "passive_diagonal"
    assert np.allclose(np.abs(merged.values), 1.0)
    assert np.allclose(merged.values, s / np.abs(s), atol=1e-13)


def test_average_combining_rejects_antipodal_cancellation():
    a = ReflectionMatrix.passive(np.array([0.0, 0.0]))
    b = ReflectionMatrix.passive(np.array([np.pi, 1.0]))
    with pytest.raises(ValueError, match="partition"):
        combine_psi_average([a, b])


def test_active_average_combining_meets_power_budget(rng):
    designs = [ReflectionMatrix.passive(rng.uniform(0, 2 * np.pi, 6)) for _ in range(2)]
    merged = combine_psi_average(designs, mode="active", p_ris_w=9.0)
    assert merged.kind == "active_diagonal"
    assert merged.power_budget_w == 9.0
    assert merged.frobenius_sq() == pytest.approx(9.0, rel=1e-12)
    # common positive gain: phase pattern matches the plain phasor sum
    s = sum(d.values for d in designs)
    assert np.allclose(np.angle(merged.values), np.angle(s))
    with pytest.raises(ValueError, match="p_ris_w"):
        combine_psi_average(designs, mode="active")


def test_partition_combining_assigns_each_element_once(rng):
    a = ReflectionMatrix.passive(np.full(4, 0.5))
    b = ReflectionMatrix.passive(np.full(4, -1.0))
    merged = combine_psi_partition([a, b], assignment=[0, 1, 1, 0])
    assert np.allclose(merged.values, [a.values[0], b.values[1], b.values[2], a.values[3]])
    with pytest.raises(ValueError, match="invalid UE index"):
        combine_psi_partition([a, b], assignment=[0, 2, 0, 0])
    with pytest.raises(ValueError, match="one UE index per element"):
        combine_psi_partition([a, b], assignment=[0, 1])


def test_default_partition_blocks():
    assert default_partition(6, 2) == [0, 0, 0, 1, 1, 1]
    assert default_partition(7, 3) == [0, 0, 1, 1, 2, 2, 2]  # remainder to last
    assert default_partition(3, 3) == [0, 1, 2]
    with pytest.raises(ValueError):
        default_partition(2, 3)


# ---------------------------------------------------------------------------
# radiated surface power
# ---------------------------------------------------------------------------


def test_ris_transmit_power_matches_dense_oracle(rng):
    n, m, s = 5, 4, 2
    h1 = crandn(rng, n, m)
    f = crandn(rng, m, s)
    gains = rng.uniform(0.5, 2.0, n)
    psi = ReflectionMatrix(kind="active_diagonal", values=gains * np.exp(1j * rng.uniform(0, 6, n)))
    sigma_r2 = 0.3
    got = ris_transmit_power(psi, h1, f, sigma_r2)
    oracle = sum(
        np.linalg.norm(np.diag(psi.values) @ h1 @ f[:, j]) ** 2 for j in range(s)
    ) + np.sum(gains**2) * sigma_r2
    assert got == pytest.approx(oracle, rel=1e-12)


def test_ris_transmit_power_accepts_single_beam(rng):
    h1 = crandn(rng, 3, 2)
    f = crandn(rng, 2)
    psi = ReflectionMatrix.identity(3)
    assert ris_transmit_power(psi, h1, f) == pytest.approx(np.linalg.norm(h1 @ f) ** 2, rel=1e-12)


def test_ris_transmit_power_validates_shapes(rng):
    with pytest.raises(ValueError, match="inconsistent"):
        ris_transmit_power(ReflectionMatrix.identity(3), crandn(rng, 4, 2), crandn(rng, 2))
    with pytest.raises(ValueError, match="sigma_r2_w"):
        ris_transmit_power(ReflectionMatrix.identity(3), crandn(rng, 3, 2), crandn(rng, 2), -1.0)
