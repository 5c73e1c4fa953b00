"""Weighted-L² laboratory: quadrature, phases, Hardy constants, primitives."""

import math

import numpy as np
import pytest

from connexion_lab.errors import (DomainError, NotMonotone,
                                  SectorContainsCosZero, UnboundedRatio)
from connexion_lab.l2lab import (SectorGrid, WeightedLineData,
                                 build_primitive_angular,
                                 build_primitive_radial, default_bump,
                                 hardy_angular, log_psi, phase_sign_check,
                                 psi_profile, solve_tau, vanishing_report,
                                 weighted_norm)

FULL = (0.0, 2.0 * math.pi)


def grid(sector=FULL, preset="default", r1=0.5):
    return SectorGrid.make(sector=sector, r1=r1, preset=preset)


def flat(beta=0.0, kappa=0):
    return WeightedLineData.create(beta=beta, kappa=kappa, a_ell=0.0, r1=0.5)


ONE = staticmethod(lambda r, t: np.ones_like(r))


# -- quadrature ---------------------------------------------------------------

def test_calibration_log_weight():
    # ∫_0^{1/2}∫_0^{2π} |log r|^{-2} dθ dr/r = 2π / log 2
    v = weighted_norm(0, lambda r, t: np.ones_like(r), flat(0.0, 0), grid())
    assert abs(v / (2 * math.pi / math.log(2)) - 1) < 1e-3


def test_calibration_power_weight():
    # ∫ r^2 dθ dr/r = 2π r1²/2 = π/4
    v = weighted_norm(0, lambda r, t: np.ones_like(r), flat(1.0, 2), grid())
    assert abs(v / (math.pi / 4) - 1) < 1e-3


def test_norm_accepts_arrays_and_validates_shape():
    g = grid(preset="coarse")
    arr = np.ones((len(g.radii), len(g.thetas)))
    v = weighted_norm(0, arr, flat(1.0, 2), g)
    assert abs(v / (math.pi / 4) - 1) < 1e-2
    with pytest.raises(DomainError):
        weighted_norm(0, np.ones((3, 3)), flat(1.0, 2), g)


def test_one_form_norm_sums_components():
    g = grid(preset="coarse")
    d = flat(1.0, 0)
    f = lambda r, t: np.ones_like(r)
    v1 = weighted_norm(1, (f, f), d, g)
    v0 = weighted_norm(0, f, WeightedLineData.create(beta=1.0, kappa=2,
                                                     a_ell=0.0, r1=0.5), g)
    assert abs(v1 / (2 * v0) - 1) < 1e-12


def test_divergent_norm_is_infinite():
    # β = 0, κ = 0 gives the measure u^{-2}... for p = 0 it converges, but
    # p = 2 carries u^{κ+2} which diverges against dr/r
    d = flat(0.0, 0)
    v = weighted_norm(2, lambda r, t: np.ones_like(r), d, grid(), check=False)
    assert v == math.inf


# -- phase structure ----------------------------------------------------------

def test_solve_tau_matches_argument():
    for a in (1.0, -2.0, 1j, -3 + 4j):
        for ell in (1, 2, 3):
            tau = solve_tau(a, ell)
            expected = math.atan2((-a).imag, (-a).real)
            assert abs(math.remainder(tau - expected, 2 * math.pi)) < 1e-9


def test_tau_identity_enforced_on_creation():
    d = WeightedLineData.create(a_ell=2j, ell=2, sector=(0.1, 0.8), r1=0.5)
    r, th = 1e-3, 0.4
    lead = abs(d.a_ell) / r ** d.ell
    val = -np.real(d.a_ell * (r * np.exp(1j * th)) ** (-d.ell))
    assert abs(val - lead * math.cos(d.ell * th - d.tau)) < 1e-9 * lead


def test_phase_sign_check_full_radius():
    d = WeightedLineData.create(a_ell=1.0, ell=1, sector=(0.3, 1.2), r1=0.5)
    g = grid((0.3, 1.2))
    assert phase_sign_check(d, g) == pytest.approx(0.5)


def test_phase_sign_check_needs_leading_term():
    with pytest.raises(DomainError):
        phase_sign_check(flat(), grid())


# -- psi profile --------------------------------------------------------------

def test_log_psi_flat_weight():
    g = grid()
    lp = log_psi(flat(), g)
    assert np.allclose(lp, math.log(2 * math.pi), atol=1e-12)


def test_psi_profile_verdicts_decaying_weight():
    sec = (0.3, 1.2)
    d = WeightedLineData.create(a_ell=1.0, ell=1, sector=sec, r1=0.5)
    out = psi_profile(d, range(-5, 6), grid(sec))
    assert out["cos_sign"] == -1
    for n in range(-2, 6):
        assert out["verdicts"][n]["monotone"], n
    assert all(v["sign"] == 1 for v in out["verdicts"].values())


def test_psi_profile_verdicts_stable_across_grids():
    for params in [dict(a_ell=1.0, ell=1, sector=(0.3, 1.2)),
                   dict(a_ell=-1.0, ell=1, sector=(2.0, 2.9)),
                   dict(a_ell=1j, ell=1, sector=(2.0, 2.9)),
                   dict(a_ell=0.0, beta=0.5, sector=(0.2, 2.1)),
                   dict(a_ell=2.0, ell=2, sector=(1.7, 2.2))]:
        sec = params.pop("sector")
        d = WeightedLineData.create(r1=0.5, sector=sec, **params)
        coarse = psi_profile(d, range(-5, 6), grid(sec, "coarse"))
        fine = psi_profile(d, range(-5, 6), grid(sec, "default"))
        for n in range(-5, 6):
            assert coarse["verdicts"][n]["monotone"] == \
                fine["verdicts"][n]["monotone"], (params, n)


def test_psi_profile_rejects_cos_zero_sector():
    d = WeightedLineData.create(a_ell=1.0, ell=1, sector=(1.0, 2.0), r1=0.5)
    with pytest.raises(SectorContainsCosZero):
        psi_profile(d, range(-1, 2), grid((1.0, 2.0)))
    # a good sub-sector rescues the profile
    out = psi_profile(d, range(-1, 2), grid((1.0, 2.0)),
                      sub_sector=(1.7, 2.0))
    assert out["cos_sign"] == 1
    assert out["kappa_ratio"] >= 1.0


# -- Hardy --------------------------------------------------------------------

HARDY_CASES = [
    dict(a_ell=1.0, ell=1, sector=(0.3, 1.2)),
    dict(a_ell=-1.0, ell=1, sector=(0.3, 1.2)),
    dict(a_ell=1j, ell=1, sector=(2.0, 2.9)),
    dict(a_ell=0.0, beta=0.5, sector=(0.2, 2.1)),
    dict(a_ell=2.0, ell=2, sector=(1.7, 2.2)),
]


def test_hardy_battery_within_width_squared():
    for params in HARDY_CASES:
        params = dict(params)
        sec = params.pop("sector")
        d = WeightedLineData.create(r1=0.5, sector=sec, **params)
        g = grid(sec)
        w = sec[1] - sec[0]
        inner = (sec[0] + 0.25 * w, sec[1] - 0.25 * w)
        c = hardy_angular(d, inner, sec, g)
        assert c <= w * w + 1e-9, params


def test_hardy_rejects_nonmonotone_weight():
    d = WeightedLineData.create(a_ell=1.0, ell=1, sector=(2.5, 4.0), r1=0.5)
    with pytest.raises(NotMonotone):
        hardy_angular(d, (2.8, 3.6), (2.5, 4.0), grid((2.5, 4.0)))


def test_hardy_radial_bound():
    sec = (0.3, 1.2)
    d = WeightedLineData.create(a_ell=1.0, ell=1, sector=sec, r1=0.5)
    g = grid(sec)
    out = build_primitive_radial(lambda r: r ** 2, d, g)
    assert out["ratio_sq"] <= out["bound"]
    assert out["cauchy_schwarz_ok"]
    # the proof's closed-form bound: 4·sup ρ(r1−ρ)/log²ρ
    rho = np.linspace(1e-9, 0.5, 100001)[1:]
    ref = 4.0 * np.max(rho * (0.5 - rho) / np.log(rho) ** 2)
    assert out["bound"] == pytest.approx(ref, rel=1e-3)


def test_radial_primitive_growing_weight_branch():
    # cos(ℓθ−τ) > 0: integration from the outer edge inward
    sec = (2.0, 2.9)
    d = WeightedLineData.create(a_ell=1.0, ell=1, sector=sec, r1=0.5)
    out = build_primitive_radial(lambda r: np.ones_like(r), d, grid(sec))
    assert out["branch"] == 1
    assert out["u"][-1] == pytest.approx(0.0)


def test_radial_primitive_rejects_straddling_sector():
    sec = (1.0, 2.0)
    d = WeightedLineData.create(a_ell=1.0, ell=1, sector=sec, r1=0.5)
    with pytest.raises(NotMonotone):
        build_primitive_radial(lambda r: r, d, grid(sec))


# -- primitives and vanishing ------------------------------------------------

def test_default_bump_plateau():
    chi = default_bump((0.6, 1.7), (0.2, 2.1))
    th = np.linspace(0.2, 2.1, 101)
    v = chi(th)
    assert np.all(v[(th >= 0.6) & (th <= 1.7)] == 1.0)
    assert v[0] == 0.0 and v[-1] == 0.0


def test_angular_primitive_reconstructs_gradient():
    sec = (0.3, 1.2)
    d = WeightedLineData.create(a_ell=1.0, ell=1, sector=sec, r1=0.5)
    g = grid(sec)
    f = lambda r, t: np.zeros_like(r)
    gt = lambda r, t: np.cos(t)
    out = build_primitive_angular((f, gt), d, g, inner=(0.5, 1.0))
    # the residual is a centred-difference diagnostic, second order in h
    assert out["residual"] < 5e-3
    assert out["curl_rel"] < 1e-8
    assert out["ratio"] <= out["bound"]
    # the primitive itself is Gauss-accurate: compare against sin on the
    # plateau modulo a function of r
    rr, tt = np.meshgrid(g.radii, g.thetas, indexing="ij")
    mask = out["chi"] >= 1.0 - 1e-12
    diff = (out["u"] - np.sin(tt))[:, mask]
    diff = diff - diff.mean(axis=1, keepdims=True)
    assert np.max(np.abs(diff)) < 1e-9


def test_angular_primitive_unbounded_on_growing_side():
    # the sector where the weight explodes makes the ratio infinite
    sec = (2.0, 2.9)
    d = WeightedLineData.create(a_ell=-1.0, ell=1, sector=(0.3, 1.2), r1=0.5)
    # reuse the data on its growing sector by building a grid there
    d_bad = WeightedLineData.create(a_ell=1.0, ell=1, sector=sec, r1=0.5)
    g = grid(sec)
    gt = lambda r, t: np.cos(t)
    with pytest.raises(UnboundedRatio):
        build_primitive_angular((lambda r, t: np.zeros_like(r), gt),
                                d_bad, g, inner=(2.25, 2.65))


def test_vanishing_report_leading_term_case():
    sec = (0.3, 1.2)
    d = WeightedLineData.create(a_ell=1.0, ell=1, sector=sec, r1=0.5)
    rows = vanishing_report(d, 8, grid(sec), seed=0)
    assert all(r["verdict"] == "ok" for r in rows)
    assert all(r["residual"] <= 1e-6 for r in rows)


def test_vanishing_report_beta_case():
    d = WeightedLineData.create(beta=0.5, a_ell=0.0, sector=(0.2, 2.1),
                                r1=0.5)
    rows = vanishing_report(d, 8, grid((0.2, 2.1)), seed=1)
    assert all(r["verdict"] == "ok" for r in rows)


def test_vanishing_report_excluded_case():
    d = flat()
    rows = vanishing_report(d, 3, grid((0.2, 2.1)), seed=0)
    assert all(r["verdict"] == "excluded" for r in rows)


def test_weighted_line_data_validation():
    with pytest.raises(DomainError):
        WeightedLineData.create(r1=1.5)
    from connexion_lab.series import CQ, PuiseuxSeries
    bad_tail = PuiseuxSeries(1, {-1: CQ.of(1)}, 8)
    with pytest.raises(DomainError):
        WeightedLineData.create(tail=bad_tail)
