import math

import numpy as np
import pytest

from engine.errors import DomainError
from engine.profiles import (
    AlphaShiftProfile,
    AtomProfile,
    GridProfile,
    ParetoProfile,
    PShiftProfile,
    profile_from_dict,
    stable_negative_moment,
)


def test_atom_integrates_point_value():
    prof = AtomProfile(2.0, 3.0)
    assert prof.integrate(lambda r: r * r) == pytest.approx(12.0)
    # half-open interval (lo, hi]
    assert prof.integrate(lambda r: 1.0, 2.0, 5.0) == 0.0
    assert prof.integrate(lambda r: 1.0, 1.0, 2.0) == 3.0
    assert prof.power_integral(0.5) == pytest.approx(3.0 * math.sqrt(2.0))


def test_atom_rejects_bad_input():
    with pytest.raises(DomainError):
        AtomProfile(0.0, 1.0)
    with pytest.raises(DomainError):
        AtomProfile(1.0, -1.0)


def test_pareto_power_integral_closed_form():
    prof = ParetoProfile(1.0, 1.5, 1.0)
    assert prof.power_integral(0.5) == pytest.approx(1.5, rel=1e-12)
    assert prof.mass(1.0) == pytest.approx(1.0)
    assert prof.mass(2.0) == pytest.approx(2.0 ** -1.5)


def test_pareto_closed_form_matches_quadrature():
    prof = ParetoProfile(0.5, 2.5, 1.7)
    closed = prof.power_integral(1.2, 0.8, 40.0)
    numeric = prof.integrate(lambda r: r ** 1.2, 0.8, 40.0)
    assert closed == pytest.approx(numeric, rel=1e-8)


def test_pareto_divergence_flags():
    prof = ParetoProfile(1.0, 0.3, 1.0)
    assert prof.power_integral(0.5, 1.0) == math.inf
    assert prof.power_integral(0.3, 1.0) == math.inf
    assert math.isfinite(prof.power_integral(0.2, 1.0))
    origin = ParetoProfile(0.0, 1.5, 1.0)
    assert origin.power_integral(1.5, 0.0, 1.0) == math.inf
    assert math.isfinite(origin.power_integral(2.0, 0.0, 1.0))


def test_pareto_log_power_integral():
    prof = ParetoProfile(1.0, 3.0, 1.0)
    numeric = prof.integrate(lambda r: r * math.log(r), 1.0, math.inf)
    assert prof.log_power_integral(1.0) == pytest.approx(numeric, rel=1e-8)
    assert ParetoProfile(1.0, 0.5, 1.0).log_power_integral(0.5) == math.inf


def test_grid_trapezoid():
    prof = GridProfile([1.0, 2.0], [1.0, 1.0])
    assert prof.mass() == pytest.approx(1.0)
    assert prof.power_integral(1.0) == pytest.approx(1.5)
    assert prof.mass(1.5, 10.0) == pytest.approx(0.5)
    assert prof.bounded
    assert prof.density(np.array([0.5, 1.5, 3.0])) == pytest.approx([0.0, 1.0, 0.0])


def test_grid_validation():
    with pytest.raises(DomainError):
        GridProfile([2.0, 1.0], [1.0, 1.0])
    with pytest.raises(DomainError):
        GridProfile([1.0, 2.0], [1.0, -1.0])
    with pytest.raises(DomainError):
        GridProfile([1.0], [1.0])


def test_alpha_shift_keeps_mass_weighted_moment():
    # int r^q R'(dr) = B((q-beta)/p, c) / (p K) * int r^q R(dr)
    src = AtomProfile(1.0, 1.0)
    prof = AlphaShiftProfile(src, 1.5, 0.5, 1.0)
    closed = prof.power_integral(2.0)
    numeric = prof.integrate(lambda r: r * r)
    assert closed == pytest.approx(numeric, rel=1e-6)
    assert prof.support() == (0.0, 1.0)
    assert prof.origin_index == 1.5


def test_p_shift_power_moment():
    src = AtomProfile(1.0, 1.0)
    prof = PShiftProfile(src, 0.5, 1.0, 2.0)
    assert prof.exact_kernel
    closed = prof.power_integral(1.0)
    numeric = prof.integrate(lambda r: r)
    assert closed == pytest.approx(numeric, rel=1e-5)
    assert closed == pytest.approx(stable_negative_moment(-0.25, 0.5), rel=1e-12)


def test_stable_negative_moment_boundary():
    assert stable_negative_moment(0.5, 0.5) == math.inf
    assert stable_negative_moment(0.0, 0.5) == pytest.approx(1.0)


def test_profile_dict_round_trip_nested():
    prof = PShiftProfile(AlphaShiftProfile(ParetoProfile(1.0, 3.0, 2.0), 1.5, 0.5, 1.0), 0.5, 1.0, 2.0)
    assert profile_from_dict(prof.to_dict()) == prof


def test_profile_from_dict_unknown_kind():
    with pytest.raises(DomainError):
        profile_from_dict({"kind": "lognormal"})
