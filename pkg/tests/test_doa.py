import math

import numpy as np
import pytest

from engine.errors import IndexOutOfRangeError
from engine.measure import Ray, RosinskiMeasure, TSParams
from engine.profiles import ParetoProfile
from services.doa import doa_experiment, stable_limit_cf


def _pareto(rho, alpha=0.5, p=1.0, rays=((1.0,),)):
    return TSParams(alpha, p, (0.0,) * len(rays[0]),
                    RosinskiMeasure(len(rays[0]), tuple(Ray(d, ParetoProfile(1.0, rho, 1.0)) for d in rays)))


def test_refuses_measures_without_regular_variation(delta_one):
    with pytest.raises(IndexOutOfRangeError):
        doa_experiment(delta_one, n_values=[10], m_sums=10)


def test_refuses_indices_outside_stable_range(pareto_three):
    with pytest.raises(IndexOutOfRangeError):
        doa_experiment(pareto_three, n_values=[10], m_sums=10)
    with pytest.raises(IndexOutOfRangeError):
        doa_experiment(_pareto(1.0), n_values=[10], m_sums=10)
    with pytest.raises(IndexOutOfRangeError):
        doa_experiment(_pareto(1.5), n_values=[10], m_sums=1)


def test_limit_cf_normalised_and_bounded():
    params = _pareto(1.5)
    z = np.array([[0.0], [0.5], [-2.0]])
    cf = stable_limit_cf(params, 1.5, {0: 1.0}, z)
    assert cf[0] == pytest.approx(1.0)
    assert np.all(np.abs(cf) <= 1.0)
    # conjugate symmetry of a characteristic function
    assert stable_limit_cf(params, 1.5, {0: 1.0}, -z)[1] == pytest.approx(np.conj(cf[1]))


def test_limit_cf_symmetric_is_real():
    params = _pareto(1.5, rays=((1.0,), (-1.0,)))
    cf = stable_limit_cf(params, 1.5, {0: 1.0, 1: 1.0}, np.array([[0.3], [1.0], [-2.0]]))
    assert np.max(np.abs(cf.imag)) < 1e-14


def test_limit_cf_matches_levy_khintchine():
    # exponent = C_u int_0^inf (e^{iwr} - 1 - iwr) gamma r^(-gamma-1) dr with C_u = Gamma(1) for these params
    params = _pareto(1.5)
    w = 0.7
    cf = stable_limit_cf(params, 1.5, {0: 1.0}, np.array([[w]]))[0]
    expected = math.gamma(-1.5) * 1.5 * (-1j * w) ** 1.5
    assert np.log(cf) == pytest.approx(expected, rel=1e-12)


def test_small_experiment_report_shape():
    report = doa_experiment(_pareto(1.5), n_values=[10, 100], m_sums=50, seed=3, epsilon=0.05)
    assert report.gamma == 1.5
    assert list(report.table.columns) == ["n", "a_n", "distance", "max_abs_imag"]
    assert report.table["a_n"].tolist() == pytest.approx([10 ** (2 / 3), 100 ** (2 / 3)])
    assert np.all(np.isfinite(report.distances))
    assert report.noise_tol == pytest.approx(2.0 / math.sqrt(50))


def test_experiment_is_reproducible():
    a = doa_experiment(_pareto(1.5), n_values=[10], m_sums=20, seed=11)
    b = doa_experiment(_pareto(1.5), n_values=[10], m_sums=20, seed=11)
    assert a.distances == b.distances


@pytest.mark.slow
def test_distance_decreases_with_n():
    report = doa_experiment(_pareto(1.5), n_values=[100, 1000, 10000], m_sums=200, seed=0)
    assert report.monotone


@pytest.mark.slow
def test_symmetric_sums_have_vanishing_imaginary_part():
    params = _pareto(1.5, rays=((1.0,), (-1.0,)))
    report = doa_experiment(params, n_values=[1000], m_sums=400, seed=2)
    assert report.table["max_abs_imag"].iloc[0] < 3.0 / math.sqrt(400)
