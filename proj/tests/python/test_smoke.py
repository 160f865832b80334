"""Smoke tests for the cirlab python module."""

import math

import pytest

import cirlab


def test_reparameterization_round_trip():
    cir = cirlab.CirParams(a=1.0, b=1.0, sigma=2.0, x0=2.0, T=4.0)
    bt = cirlab.to_bessel(cir)
    assert bt.params.delta == pytest.approx(1.0)
    assert bt.params.b == pytest.approx(4.0)
    assert bt.params.z0 == pytest.approx(0.5)
    assert bt.space_scale == pytest.approx(0.25)
    back = cirlab.to_cir(bt)
    assert back.a == pytest.approx(cir.a)
    assert back.sigma == pytest.approx(cir.sigma)
    assert back.x0 == pytest.approx(cir.x0)


def test_closed_forms():
    p = cirlab.BesselParams(delta=1.0, b=0.0, z0=1.0)
    assert cirlab.mean_at(p, 1.0) == 2.0
    assert cirlab.l1_distance_exact(3.0, 1.0, 1.0, 1.0) == pytest.approx(2.0 * math.exp(-1.0))
    assert cirlab.feller_class(0.5) == cirlab.FellerClass.HitsZeroAlmostSurely
    assert cirlab.feller_class(2.0) == cirlab.FellerClass.NeverHitsZero
    assert cirlab.chi_moment(1.0) == pytest.approx(math.sqrt(2.0 / math.pi))


def test_validation_errors_become_value_errors():
    with pytest.raises(ValueError):
        cirlab.BesselParams(delta=0.0, b=0.0, z0=0.0)
    with pytest.raises(ValueError):
        cirlab.chi_moment(2.5)


def test_generator_is_deterministic():
    a = cirlab.Generator(cirlab.SeedSpec(root_seed=1, stream_id=2, replication_index=3))
    b = cirlab.Generator(cirlab.SeedSpec(root_seed=1, stream_id=2, replication_index=3))
    assert [a.next_u64() for _ in range(32)] == [b.next_u64() for _ in range(32)]


def test_exact_transition_mean():
    p = cirlab.BesselParams(delta=1.0, b=1.0, z0=0.0)
    est = cirlab.mc_mean_exact(p, 1.0, 50000, 7)
    target = cirlab.mean_at(p, 1.0)
    assert abs(est.mean - target) < 4.0 * est.std_error


def test_solve_path_and_zero_hit():
    g = cirlab.derive(cirlab.SeedSpec(root_seed=5, stream_id=1, replication_index=0))
    driver = cirlab.sample_bm(g, 64, 1.0 / 64.0)
    coeffs = cirlab.SdeCoeffs.of_bessel(cirlab.BesselParams(delta=0.5, b=0.0, z0=0.0))
    result = cirlab.solve_path(cirlab.SchemeKind.TruncatedMilstein, coeffs, 0.0, driver)
    assert result.terminal_value >= 0.0
    assert cirlab.first_zero_hit(result) == 0.0


def test_strong_error_reproducible():
    p = cirlab.BesselParams(delta=0.5, b=0.0, z0=0.0)
    a = cirlab.strong_error(cirlab.SchemeKind.TruncatedMilstein, p, 16, 400, 8, 11, 1)
    b = cirlab.strong_error(cirlab.SchemeKind.TruncatedMilstein, p, 16, 400, 8, 11, 4)
    assert a.mean_abs_error == b.mean_abs_error
    assert a.std_error == b.std_error
    assert a.mean_abs_error > 0.0


def test_lower_bound_positive():
    p = cirlab.BesselParams(delta=0.5, b=0.0, z0=0.0)
    est = cirlab.lower_bound_coupling(
        p, 8, 2000, 16, cirlab.CouplingVariant.FullConditionalRefill, 3
    )
    assert est.mean_abs_error > 3.0 * est.std_error


def test_fit_rate():
    pts = [(float(n), float(n) ** -0.5) for n in (8, 16, 32, 64)]
    fit = cirlab.fit_rate(pts)
    assert fit.slope == pytest.approx(-0.5)
    assert fit.r_squared == pytest.approx(1.0)
