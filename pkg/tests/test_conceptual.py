"""Antenna-free reference links: free space, two-ray ground bounce, two-path cases.

Oracles: every SNR formula is re-derived here from first principles (complex
path sums evaluated with plain numpy arithmetic) and the closed forms are
checked against those sums, not against themselves.
"""

import numpy as np
import pytest

from rislink import (
    CASE_IDS,
    FreeSpaceLink,
    ReflectedPath,
    TwoRayGeometry,
    snr_case,
    snr_free_space,
    snr_two_ray,
    two_path_gain,
)


# ---------------------------------------------------------------------------
# free space
# ---------------------------------------------------------------------------


def test_free_space_matches_inverse_square_law():
    link = FreeSpaceLink(d0_m=2.0, c0=3.0, pt_w=5.0, sigma2_w=0.5)
    assert snr_free_space(link) == pytest.approx(3.0**2 / 2.0**2 * 5.0 / 0.5)


def test_free_space_slope_is_20_db_per_decade():
    snrs = [
        snr_free_space(FreeSpaceLink(d0_m=d, c0=1.0, pt_w=1.0, sigma2_w=1.0))
        for d in (10.0, 100.0, 1000.0)
    ]
    drops = np.diff(10.0 * np.log10(snrs))
    assert np.allclose(drops, -20.0, atol=1e-12)


def test_free_space_rejects_nonpositive_inputs():
    with pytest.raises(ValueError):
        FreeSpaceLink(d0_m=0.0, c0=1.0, pt_w=1.0, sigma2_w=1.0)
    with pytest.raises(ValueError):
        FreeSpaceLink(d0_m=1.0, c0=1.0, pt_w=-1.0, sigma2_w=1.0)
    with pytest.raises(ValueError):
        FreeSpaceLink(d0_m=1.0, c0=1.0, pt_w=1.0, sigma2_w=0.0)


# ---------------------------------------------------------------------------
# two-ray ground reflection
# ---------------------------------------------------------------------------


def test_two_ray_exact_matches_complex_field_oracle():
    geom = TwoRayGeometry(d_m=25000.0, ht_m=10.0, hr_m=2.0, lambda_m=0.1, gt=2.0, gr=3.0)
    pt, sigma2 = 4.0, 0.25
    _, exact = snr_two_ray(geom, pt, sigma2)

    # Oracle: phasor sum of the direct ray and an inverted ground bounce.
    d_los = np.sqrt(geom.d_m**2 + (geom.ht_m - geom.hr_m) ** 2)
    d_ref = np.sqrt(geom.d_m**2 + (geom.ht_m + geom.hr_m) ** 2)
    c0 = np.sqrt(geom.gt * geom.gr) * geom.lambda_m / (4 * np.pi)
    field = np.exp(-2j * np.pi * d_los / geom.lambda_m) / d_los
    field -= np.exp(-2j * np.pi * d_ref / geom.lambda_m) / d_ref
    assert exact == pytest.approx(c0**2 * abs(field) ** 2 * pt / sigma2, rel=1e-12)


def test_two_ray_approx_tracks_exact_in_far_field():
    # Far beyond the crossover the small-angle form and the phasor sum agree.
    geom = TwoRayGeometry(d_m=2.0e5, ht_m=10.0, hr_m=2.0, lambda_m=0.1)
    approx, exact = snr_two_ray(geom, 1.0, 1.0)
    assert approx == pytest.approx(exact, rel=0.05)


def test_two_ray_slope_is_40_db_per_decade():
    snrs = [
        snr_two_ray(TwoRayGeometry(d_m=d, ht_m=1.0, hr_m=1.0, lambda_m=1.0), 1.0, 1.0)[0]
        for d in (1e2, 1e3, 1e4)
    ]
    drops = np.diff(10.0 * np.log10(snrs))
    assert np.allclose(drops, -40.0, atol=1e-12)


def test_two_ray_warns_inside_near_field():
    geom = TwoRayGeometry(d_m=50.0, ht_m=1.0, hr_m=1.0, lambda_m=1.0)
    assert not geom.far_field
    with pytest.warns(RuntimeWarning, match="far-field"):
        snr_two_ray(geom, 1.0, 1.0)


def test_two_ray_far_field_boundary_is_quiet():
    # d == 100*ht*hr/lambda sits exactly on the validity boundary.
    geom = TwoRayGeometry(d_m=100.0, ht_m=1.0, hr_m=1.0, lambda_m=1.0)
    assert geom.far_field
    with np.errstate(all="raise"):
        snr_two_ray(geom, 1.0, 1.0)


# ---------------------------------------------------------------------------
# two reflected paths: coherent gain and the channel-knowledge cases
# ---------------------------------------------------------------------------


def _phasor(p: ReflectedPath) -> complex:
    return p.r / p.d_m * np.exp(1j * p.phi_rad)


def test_two_path_gain_matches_phasor_oracle():
    rng = np.random.default_rng(7)
    for _ in range(200):
        p1 = ReflectedPath(r=rng.uniform(0.1, 1), d_m=rng.uniform(1, 50), phi_rad=rng.uniform(-np.pi, np.pi))
        p2 = ReflectedPath(r=rng.uniform(0.1, 1), d_m=rng.uniform(1, 50), phi_rad=rng.uniform(-np.pi, np.pi))
        alpha, phase = two_path_gain(p1, p2)
        z = _phasor(p1) + _phasor(p2)
        assert alpha == pytest.approx(abs(z), rel=1e-12)
        assert phase == pytest.approx(np.angle(z), abs=1e-12)


def test_case_fading_equals_uncompensated_phasor_sum():
    p1 = ReflectedPath(r=1.0, d_m=2.0, phi_rad=0.3)
    p2 = ReflectedPath(r=0.5, d_m=3.0, phi_rad=-1.1)
    snr = snr_case("fading", p1, p2, pt_w=2.0, sigma2_w=0.5, c0=1.5)
    assert snr == pytest.approx(1.5**2 * 2.0 / 0.5 * abs(_phasor(p1) + _phasor(p2)) ** 2, rel=1e-12)


def test_case_identities_across_random_draws():
    """mrc_rx == tx_full_csi; reflector_phase == 2 * tx_phase_only;
    reflector_amp_phase == budget * mrc_rx; fading never beats mrc_rx."""
    rng = np.random.default_rng(11)
    for _ in range(500):
        p1 = ReflectedPath(r=rng.uniform(0.1, 1), d_m=rng.uniform(1, 20), phi_rad=rng.uniform(-np.pi, np.pi))
        p2 = ReflectedPath(r=rng.uniform(0.1, 1), d_m=rng.uniform(1, 20), phi_rad=rng.uniform(-np.pi, np.pi))
        args = (p1, p2, 1.0, 1.0)
        mrc = snr_case("mrc_rx", *args)
        assert snr_case("tx_full_csi", *args) == pytest.approx(mrc, rel=1e-12)
        assert snr_case("reflector_phase", *args) == pytest.approx(
            2.0 * snr_case("tx_phase_only", *args), rel=1e-12
        )
        assert snr_case("reflector_amp_phase", *args, amp_budget=7.0) == pytest.approx(
            7.0 * mrc, rel=1e-12
        )
        # uncontrolled interference never beats full phase control
        assert snr_case("fading", *args) <= snr_case("reflector_phase", *args) * (1 + 1e-12)


def test_tx_phase_only_gap_closes_only_for_equal_branches():
    # (u+v)^2/2 <= u^2+v^2 with equality iff u == v (Cauchy-Schwarz).
    equal = ReflectedPath(r=0.6, d_m=3.0, phi_rad=0.2)
    other = ReflectedPath(r=0.6, d_m=3.0, phi_rad=-2.0)
    assert snr_case("tx_phase_only", equal, other, 1.0, 1.0) == pytest.approx(
        snr_case("mrc_rx", equal, other, 1.0, 1.0), rel=1e-12
    )
    p1 = ReflectedPath(r=1.0, d_m=2.0, phi_rad=0.0)
    p2 = ReflectedPath(r=0.2, d_m=9.0, phi_rad=0.0)
    assert snr_case("tx_phase_only", p1, p2, 1.0, 1.0) < snr_case("mrc_rx", p1, p2, 1.0, 1.0)


def test_amp_phase_budget_one_recovers_mrc():
    p1 = ReflectedPath(r=0.9, d_m=4.0, phi_rad=1.0)
    p2 = ReflectedPath(r=0.3, d_m=2.0, phi_rad=2.0)
    assert snr_case("reflector_amp_phase", p1, p2, 1.0, 1.0, amp_budget=1.0) == pytest.approx(
        snr_case("mrc_rx", p1, p2, 1.0, 1.0), rel=1e-12
    )


def test_amp_phase_beats_any_feasible_split_oracle():
    """The closed form dominates a dense grid of budget splits alpha1^2+alpha2^2 = B."""
    p1 = ReflectedPath(r=0.7, d_m=3.0, phi_rad=0.4)
    p2 = ReflectedPath(r=0.4, d_m=5.0, phi_rad=-0.9)
    u, v = p1.r / p1.d_m, p2.r / p2.d_m
    budget = 3.0
    best = snr_case("reflector_amp_phase", p1, p2, 1.0, 1.0, amp_budget=budget)
    ts = np.linspace(0.0, 1.0, 20001)
    grid = (np.sqrt(budget * ts) * u + np.sqrt(budget * (1 - ts)) * v) ** 2
    assert best >= grid.max() - 1e-12
    assert best == pytest.approx(grid.max(), rel=1e-6)


def test_case_validation_errors():
    p = ReflectedPath(r=0.5, d_m=1.0, phi_rad=0.0)
    with pytest.raises(ValueError, match="unknown case_id"):
        snr_case("bogus", p, p, 1.0, 1.0)
    with pytest.raises(ValueError, match="amp_budget"):
        snr_case("reflector_amp_phase", p, p, 1.0, 1.0)
    with pytest.raises(ValueError):
        snr_case("fading", p, p, -1.0, 1.0)
    with pytest.raises(ValueError):
        ReflectedPath(r=0.0, d_m=1.0, phi_rad=0.0)
    with pytest.raises(ValueError):
        ReflectedPath(r=1.5, d_m=1.0, phi_rad=0.0)
    assert len(CASE_IDS) == 6
