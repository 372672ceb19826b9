import math

import numpy as np
import pytest

from engine.errors import DomainError, InvalidMeasureError, NotProperError, UnknownDirectionError
from engine.measure import (
    Ray,
    RosinskiMeasure,
    SpectralForm,
    TSParams,
    atom_measure,
    from_spectral,
    is_proper,
    proper_integral,
    subclass_name,
    tempering_function,
    to_spectral,
    validate,
    validate_spectral,
)
from engine.profiles import AtomProfile, GridProfile, ParetoProfile
from engine.transforms import stable_embedding


def _pareto(r0, rho, c=1.0):
    return RosinskiMeasure(1, (Ray((1.0,), ParetoProfile(r0, rho, c)),))


def test_single_atom_is_valid():
    report = validate(0.5, atom_measure([((1.0,), 1.0, 1.0)]))
    assert report.valid
    assert report.violations == []


def test_heavy_pareto_tail_is_invalid():
    report = validate(0.5, _pareto(1.0, 0.3))
    assert not report.valid
    assert report.violation_names == ["tail-alpha-integral"]
    assert report.integrals["tail-alpha-integral"] == math.inf


def test_negative_alpha_only_needs_finite_mass():
    report = validate(-1.0, _pareto(1.0, 0.5))
    assert report.valid
    assert report.integrals["tail-mass-integral"] == pytest.approx(1.0)


def test_origin_singularity_is_reported():
    report = validate(0.5, _pareto(0.0, 2.5))
    assert "near-origin-integral" in report.violation_names


def test_alpha_zero_uses_log_condition():
    assert validate(0.0, _pareto(1.0, 0.5)).valid
    m = RosinskiMeasure(1, (Ray((1.0,), GridProfile([1.0, 10.0], [1.0, 1.0])),))
    report = validate(0.0, m)
    assert report.valid
    assert "tail-log-integral" in report.integrals


@pytest.mark.parametrize("alpha", [-1.0, -0.5, 0.0, 0.5, 1.5])
@pytest.mark.parametrize("rho", [0.1, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.5, 4.0])
def test_pareto_validity_dichotomy(alpha, rho):
    # divergent exactly when rho <= max(alpha, 0); the tail sits at r >= 1
    assert validate(alpha, _pareto(1.0, rho)).valid == (rho > max(alpha, 0.0))


def test_ensure_valid_raises_with_violations():
    params = TSParams(0.5, 1.0, (0.0,), _pareto(1.0, 0.3))
    with pytest.raises(InvalidMeasureError) as exc:
        params.ensure_valid()
    assert [v.name for v in exc.value.violations] == ["tail-alpha-integral"]


def test_ray_direction_must_be_unit():
    with pytest.raises(DomainError):
        Ray((1.0, 1.0), AtomProfile(1.0, 1.0))


def test_params_checks():
    with pytest.raises(DomainError):
        TSParams(2.0, 1.0, (0.0,), RosinskiMeasure.zero(1))
    with pytest.raises(DomainError):
        TSParams(0.5, 0.0, (0.0,), RosinskiMeasure.zero(1))
    with pytest.raises(DomainError):
        TSParams(0.5, 1.0, (0.0, 0.0), RosinskiMeasure.zero(1))
    with pytest.raises(DomainError):
        RosinskiMeasure(9)


def test_properness():
    assert is_proper(0.5, atom_measure([((1.0,), 1.0, 1.0)]))
    m = _pareto(1.0, 1.5)
    assert proper_integral(0.5, m) == pytest.approx(1.5, rel=1e-12)
    assert is_proper(0.5, m)


def test_stable_embedding_is_not_proper():
    m = stable_embedding([((1.0,), 1.0)], beta=1.5, alpha=0.5, p=1.0)
    assert validate(0.5, m).valid
    assert not is_proper(0.5, m)


def test_is_proper_refuses_invalid_measure():
    with pytest.raises(InvalidMeasureError):
        is_proper(0.5, _pareto(1.0, 0.3))


def test_to_spectral_atom_weight():
    params = TSParams(0.5, 1.0, (0.0,), atom_measure([((1.0,), 4.0, 2.0)]))
    form = to_spectral(params)
    assert form.sigma == pytest.approx((4.0,))
    (q_prof,) = form.qu[0]
    assert isinstance(q_prof, AtomProfile)
    assert q_prof.r0 == pytest.approx(0.25)
    assert q_prof.w == pytest.approx(1.0)


def test_to_spectral_zero_measure():
    form = to_spectral(TSParams(0.5, 1.0, (0.0,), RosinskiMeasure.zero(1)))
    assert form.sigma == ()


@pytest.mark.parametrize("dim", [1, 3])
def test_zero_measure_keeps_dimension_through_spectral_form(dim):
    form = to_spectral(TSParams(0.5, 1.0, (0.0,) * dim, RosinskiMeasure.zero(dim)))
    assert form.dim == dim
    back = from_spectral(form)
    assert back.dim == dim
    assert back.is_zero()


def test_spectral_form_rejects_mismatched_dimension():
    with pytest.raises(DomainError):
        SpectralForm(((1.0, 0.0),), (1.0,), ((AtomProfile(1.0, 1.0),),), 0.5, 1.0, 3)


def test_to_spectral_refuses_improper():
    m = stable_embedding([((1.0,), 1.0)], beta=1.5, alpha=0.5, p=1.0)
    params = TSParams(0.5, 1.0, (0.0,), m)
    with pytest.raises(NotProperError):
        to_spectral(params)


@pytest.mark.parametrize("s,p,alpha,radius,weight", [
    (1.0, 1.7, 0.3, 1.0, 1.0),
    (8.0, 3.0, 0.0, 0.5, 1.0),
    (4.0, 2.0, 1.0, 0.5, 2.0),
])
def test_from_spectral_atoms(s, p, alpha, radius, weight):
    form = SpectralForm(((1.0,),), (1.0,), ((AtomProfile(s, 1.0),),), alpha, p)
    m = from_spectral(form)
    (ray,) = m.rays
    assert ray.profile.r0 == pytest.approx(radius, rel=1e-12)
    assert ray.profile.w == pytest.approx(weight, rel=1e-12)


def test_spectral_round_trip_two_directions():
    m = atom_measure([((1.0, 0.0), 2.0, 3.0), ((0.0, -1.0), 0.5, 1.0)])
    params = TSParams(0.7, 2.0, (0.0, 0.0), m)
    back = from_spectral(to_spectral(params))
    for got, want in zip(back.rays, m.rays):
        assert got.direction == want.direction
        assert got.profile.r0 == pytest.approx(want.profile.r0, rel=1e-12)
        assert got.profile.w == pytest.approx(want.profile.w, rel=1e-12)


def test_tempering_function_values():
    one = SpectralForm(((1.0,),), (1.0,), ((AtomProfile(2.0, 1.0),),), 0.5, 1.0)
    assert tempering_function(one, 1.0, 0) == pytest.approx(math.exp(-2.0), rel=1e-14)
    two = SpectralForm(((1.0,),), (1.0,), ((AtomProfile(1.0, 0.5), AtomProfile(3.0, 0.5)),), 0.5, 2.0)
    assert tempering_function(two, 1.0, (1.0,)) == pytest.approx(0.208846, abs=1e-6)
    unit = SpectralForm(((1.0,),), (1.0,), ((AtomProfile(1.0, 1.0),),), 0.5, 1.0)
    assert tempering_function(unit, 1e-9, 0) == pytest.approx(1.0, abs=1e-8)


def test_tempering_function_unknown_direction():
    form = SpectralForm(((1.0,),), (1.0,), ((AtomProfile(1.0, 1.0),),), 0.5, 1.0)
    with pytest.raises(UnknownDirectionError):
        tempering_function(form, 1.0, (-1.0,))
    with pytest.raises(UnknownDirectionError):
        tempering_function(form, 1.0, 3)


def test_validate_spectral_agrees_on_atoms():
    params = TSParams(0.5, 1.0, (0.0,), atom_measure([((1.0,), 2.0, 1.0)]))
    report = validate_spectral(to_spectral(params))
    assert report.valid
    assert all(math.isfinite(v) for v in report.integrals.values())


def test_subclass_names():
    assert subclass_name(0.0, 1.0) == "Thorin"
    assert subclass_name(-1.0, 1.0) == "Goldie-Steutel-Bondesson"
    assert subclass_name(0.0, 2.0) == "type M"
    assert subclass_name(-1.0, 2.0) == "type G"
    assert subclass_name(0.5, 3.0) is None


def test_measure_scaling_and_addition():
    a = atom_measure([((1.0,), 1.0, 1.0)])
    b = atom_measure([((-1.0,), 2.0, 1.0)])
    both = a + b.scaled(2.0)
    assert len(both.rays) == 2
    assert both.rays[1].profile.w == 2.0
    assert RosinskiMeasure.from_dict(both.to_dict()) == both


@pytest.mark.parametrize("measure", [
    _pareto(1.0, 0.3),
    _pareto(1.0, 0.8),
    _pareto(1.0, 1.5),
    atom_measure([((1.0,), 2.0, 1.0)]),
    RosinskiMeasure(1, (Ray((1.0,), GridProfile([0.5, 4.0], [1.0, 1.0])),)),
])
def test_validity_is_monotone_in_index(measure):
    indices = [-1.5, -0.5, 0.0, 0.2, 0.5, 0.9, 1.2, 1.6, 1.9]
    valid = [validate(a, measure).valid for a in indices]
    # once an index fails, every larger index fails too
    first_bad = valid.index(False) if False in valid else len(valid)
    assert all(valid[:first_bad])
    assert not any(valid[first_bad:])


def test_tempering_function_is_completely_monotone():
    q_u = (AtomProfile(0.5, 0.3), AtomProfile(2.0, 0.2), GridProfile([0.1, 1.0, 3.0], [0.1, 0.2, 0.05]))
    form = SpectralForm(((1.0,),), (1.0,), (q_u,), 0.5, 1.0)
    ts = 0.2 + 0.3 * np.arange(8)
    values = np.array([tempering_function(form, t, 0) for t in ts])
    for order in range(1, 6):
        diffs = np.diff(values, n=order)
        assert np.all((-1) ** order * diffs >= -1e-14)


def test_validate_spectral_flags_divergent_q():
    form = SpectralForm(((1.0,),), (1.0,), ((ParetoProfile(0.0, 1.5, 1.0),),), 0.5, 1.0)
    report = validate_spectral(form)
    assert not report.valid
    assert report.violation_names == ["spectral-large-jump-integral"]
    assert report.integrals["spectral-large-jump-integral"] == math.inf


def test_validate_spectral_agrees_with_validate_on_pareto():
    params = TSParams(0.5, 1.0, (0.0,), _pareto(1.0, 3.0))
    assert validate_spectral(to_spectral(params)).valid == validate(0.5, params.measure).valid
