import math

import pytest

from engine.errors import DomainError
from engine.levy import tail
from engine.measure import Ray, RosinskiMeasure, TSParams, atom_measure, is_proper, proper_integral
from engine.profiles import AlphaShiftProfile, GridProfile, PShiftProfile
from engine.transforms import (
    alpha_shift_constant,
    lower_alpha,
    materialise,
    raise_p,
    stable_embedding,
    verify_membership,
)

R_GRID = (0.3, 1.0, 2.5)


def test_alpha_shift_constant():
    assert alpha_shift_constant(1.5, 0.5, 1.0) == pytest.approx(1.0, rel=1e-14)
    assert alpha_shift_constant(1.0, 0.0, 2.0) == pytest.approx(math.gamma(0.5) / 2.0, rel=1e-14)
    with pytest.raises(DomainError):
        alpha_shift_constant(0.5, 0.5, 1.0)


def test_lower_alpha_keeps_levy_measure(delta_one):
    lowered = lower_alpha(delta_one, -0.5)
    assert lowered.alpha == -0.5
    assert isinstance(lowered.measure.rays[0].profile, AlphaShiftProfile)
    report = verify_membership(delta_one, lowered, R_GRID, tol=1e-6)
    assert report.passed, report.table


def test_raise_p_keeps_levy_measure(delta_one):
    raised = raise_p(delta_one, 2.0)
    assert raised.p == 2.0
    assert isinstance(raised.measure.rays[0].profile, PShiftProfile)
    report = verify_membership(delta_one, raised, R_GRID, tol=1e-6)
    assert report.passed, report.table


@pytest.mark.parametrize("r,tol", [(0.5, 1e-6), (1.0, 1e-6), (2.0, 1e-6), (5.0, 1e-5)])
def test_lowering_stable_index_one_and_a_half_to_one_half(r, tol):
    source = TSParams(1.5, 1.0, (0.0,), atom_measure([((1.0,), 1.0, 1.0)]))
    lowered = lower_alpha(source, 0.5)
    assert (lowered.alpha, lowered.p) == (0.5, 1.0)
    assert tail(lowered, r) == pytest.approx(tail(source, r), rel=tol)


@pytest.mark.parametrize("r,tol", [(0.5, 1e-6), (1.0, 1e-6), (2.0, 1e-6), (5.0, 1e-5)])
def test_raising_p_from_one_to_two(delta_one, r, tol):
    raised = raise_p(delta_one, 2.0)
    assert raised.measure.rays[0].profile.exact_kernel
    assert tail(raised, r) == pytest.approx(tail(delta_one, r), rel=tol)


def test_membership_fails_for_unrelated_measures(delta_one):
    other = TSParams(0.5, 1.0, (0.0,), atom_measure([((1.0,), 2.0, 1.0)]))
    report = verify_membership(delta_one, other, R_GRID)
    assert not report.passed
    assert report.max_rel_deviation > 0.1
    assert set(report.table.columns) == {"direction", "r", "tail_a", "tail_b", "rel_dev"}


def test_membership_compares_per_direction(symmetric_delta):
    one_sided = TSParams(0.5, 1.0, (0.0,), atom_measure([((1.0,), 1.0, 2.0)]))
    # same total tail, different split between +1 and -1
    assert tail(one_sided, 1.0) == pytest.approx(tail(symmetric_delta, 1.0))
    assert not verify_membership(symmetric_delta, one_sided, R_GRID).passed


def test_membership_dimension_mismatch(delta_one):
    two_d = TSParams(0.5, 1.0, (0.0, 0.0), atom_measure([((1.0, 0.0), 1.0, 1.0)]))
    with pytest.raises(DomainError):
        verify_membership(delta_one, two_d, R_GRID)


def test_transforms_refuse_wrong_direction(delta_one):
    with pytest.raises(DomainError):
        lower_alpha(delta_one, 0.5)
    with pytest.raises(DomainError):
        lower_alpha(delta_one, 1.0)
    with pytest.raises(DomainError):
        raise_p(delta_one, 1.0)


def test_zero_measure_maps_to_zero():
    zero = TSParams(0.5, 1.0, (0.0,), RosinskiMeasure.zero(1))
    assert lower_alpha(zero, 0.0).measure.is_zero()
    assert raise_p(zero, 3.0).measure.is_zero()


def test_lowering_alpha_can_break_properness():
    source = TSParams(1.5, 1.0, (0.0,), atom_measure([((1.0,), 1.0, 1.0)]))
    assert is_proper(1.5, source.measure)
    lowered = lower_alpha(source, 0.5)
    assert not is_proper(0.5, lowered.measure)

    def gridded(lower):
        ray = lowered.measure.rays[0]
        return RosinskiMeasure(1, (Ray(ray.direction, ray.profile.to_grid(200, lower)),))

    # the tabulated integral grows without bound as the lower cutoff shrinks
    assert proper_integral(0.5, gridded(1e-5)) > 5.0 * proper_integral(0.5, gridded(1e-3))


def test_raise_p_preserves_properness(pareto_three):
    raised = raise_p(pareto_three, 2.0)
    assert is_proper(0.5, raised.measure)
    assert proper_integral(0.5, raised.measure) == pytest.approx(proper_integral(0.5, pareto_three.measure),
                                                               rel=1e-12)


def test_materialise_grid_tracks_exact_tail(delta_one):
    exact = lower_alpha(delta_one, -0.5)
    gridded = materialise(exact, 200, 1e-6)
    assert isinstance(gridded.measure.rays[0].profile, GridProfile)
    assert tail(gridded, 0.5) == pytest.approx(tail(exact, 0.5), rel=1e-2)


def test_stable_embedding_tail():
    m = stable_embedding([((1.0,), 1.0)], beta=1.5, alpha=0.5, p=1.0)
    params = TSParams(0.5, 1.0, (0.0,), m)
    t1 = tail(params, 1.0)
    assert t1 == pytest.approx(1.0 / 1.5, rel=1e-12)
    assert tail(params, 2.0) / t1 == pytest.approx(2.0 ** -1.5, rel=1e-12)
    assert not is_proper(0.5, m)


def test_stable_embedding_range():
    with pytest.raises(DomainError):
        stable_embedding([((1.0,), 1.0)], beta=0.4, alpha=0.5, p=1.0)
    with pytest.raises(DomainError):
        stable_embedding([], beta=1.5, alpha=0.5, p=1.0)
