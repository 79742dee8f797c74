import math

import pytest

import ringtrio as rt


def test_potential_minimum():
    assert rt.potential(0.0, 0.0) == pytest.approx(0.0, abs=1e-14)
    assert rt.potential(0.0, 0.5) == pytest.approx(0.1376460561957428540819843, rel=1e-13)


def test_domain_error_translates():
    with pytest.raises(ValueError):
        rt.potential(0.0, -2.0)
    assert not rt.in_domain(0.0, -2.0)


def test_energy_and_integration():
    z0 = rt.PhasePoint(0.0, 0.0, math.sqrt(20.0), math.sqrt(8.0))
    assert rt.energy(z0) == pytest.approx(7.0, rel=1e-14)
    samples, drift = rt.integrate(z0, 20.0, 0.5)
    assert len(samples) == 41
    assert drift < 1e-11
    t, x, y, px, py = samples[-1]
    assert t == pytest.approx(20.0)
    e = (px * px + py * py) / 4.0 + rt.potential(x, y)
    assert e == pytest.approx(7.0, rel=1e-10)


def test_units():
    hz = rt.to_physical_units(7.0, rt.UnitKind.EnergyHz, 3.0, 7.0, 1.44316060e-25)
    assert 175e3 < hz < 205e3


def test_section_and_boundary():
    z0 = rt.PhasePoint(0.0, 0.0, math.sqrt(24.0), 2.0)
    crossings = rt.section_crossings(z0, 40, 200.0)
    assert len(crossings) == 40
    for t, y, py in crossings:
        e = py * py / 4.0 + rt.potential(0.0, y)
        assert e <= 7.0 + 1e-8
    boundary = rt.section_boundary(7.0, 64)
    for y, py in boundary:
        assert py * py / 4.0 + rt.potential(0.0, y) == pytest.approx(7.0, abs=1e-8)


def test_periodic_orbits():
    assert rt.period_A_quadrature(7.0) == pytest.approx(1.7033160988084635, rel=1e-10)
    a0 = rt.orbit_A_quadrature(7.0)
    assert a0.family == "A0"
    assert a0.stable
    cp = rt.find_periodic(rt.seed_C(0.05), 0.05)
    assert cp.family == "C+"
    assert cp.period == pytest.approx(7.2227645703346663, rel=1e-8)
    branch = rt.continue_family(cp, 1.0, 7.0, 3)
    assert [o.energy for o in branch] == pytest.approx([1.0, 4.0, 7.0])
    assert branch[-1].period == pytest.approx(1.4936602921932243, rel=1e-8)


def test_classification_labels():
    a0 = rt.PhasePoint(0.0, 0.0, 0.0, 2.0 * math.sqrt(7.0))
    verdict = rt.classify_orbit(a0)
    assert verdict["kind"] == "regular"
    square = [((i * 37 % 101) / 101.0, (i * 61 % 89) / 89.0) for i in range(600)]
    assert rt.box_counting_dimension(square) > 1.5
