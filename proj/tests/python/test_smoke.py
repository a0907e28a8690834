import math

import pytest

import stochhawkes as sh


def test_simulate_is_reproducible():
    params = sh.HawkesParams(a=1.0, lambda0=2.0, delta=1.5)
    spec = sh.SdeSpec.gbm(mu=0.0, sigma2=0.05, y0=0.5)
    ev1, y1 = sh.simulate(params, spec, horizon=20.0, seed=3)
    ev2, y2 = sh.simulate(params, spec, horizon=20.0, seed=3)
    assert ev1.times == ev2.times
    assert y1 == y2
    assert len(ev1) == len(y1)
    assert all(0.0 < t <= 20.0 for t in ev1.times)


def test_poisson_likelihood_closed_form():
    events = sh.EventSequence([0.5, 1.2, 3.0], 4.0)
    params = sh.HawkesParams(a=1.3, lambda0=1.3, delta=1.0)
    y = [0.0, 0.0, 0.0]
    assert sh.log_likelihood(events, y, params) == pytest.approx(3 * math.log(1.3) - 1.3 * 4.0, abs=1e-12)
    assert sh.integrated_intensity(4.0, events, y, params) == pytest.approx(1.3 * 4.0, abs=1e-12)


def test_probabilities_are_normalized():
    events = sh.EventSequence([0.5, 1.2, 1.4, 3.0], 4.0)
    params = sh.HawkesParams(a=1.0, lambda0=2.0, delta=2.0)
    probs = sh.branching_probabilities(3, events, [0.4, 0.9, 1.1, 0.3], params)
    assert len(probs) == 4
    assert sum(probs) == pytest.approx(1.0, abs=1e-12)
    for row in sh.em_responsibilities(events, params, psi=0.7):
        assert sum(row) == pytest.approx(1.0, abs=1e-12)


def test_invalid_params_raise_value_error():
    with pytest.raises(ValueError):
        sh.HawkesParams(a=1.0, lambda0=1.0, delta=-1.0)


def test_short_chain_and_rescaling():
    params = sh.HawkesParams(a=2.0, lambda0=2.0, delta=2.0)
    events, y = sh.simulate(params, sh.SdeSpec.constant(0.5), horizon=60.0, seed=11)
    stat, p_value, n = sh.time_rescaling_test(events, y, params)
    assert n == len(events)
    assert 0.0 <= p_value <= 1.0
    chain = sh.run_mcmc(events, "gamma", iterations=300, burn_in=100, seed=2)
    assert chain["kind"] == "gamma"
    assert len(chain["draws"]["a"]) == 200
    assert all(0.0 <= r <= 1.0 for r in chain["acceptance_rates"].values())
