import math

import numpy as np
import pytest

from conftest import fig5_params, random_interior_state, random_params
from vaxgame.engine import (IntegratorConfig, Path, RandomStream, Scheme,
                            XAbsorption, ensemble, simulate, step)
from vaxgame.model import DomainError, ModelParams, State, drift, in_domain


def noiseless_params(**overrides):
    base = dict(mu=0.02, beta=0.5, gamma=1.0, kappa=1.0, omega=0.1, delta=0.2,
                sigma1_sq=0.0, sigma2_sq=0.0, sigma3_sq=0.0)
    base.update(overrides)
    return ModelParams(**base)


def config(**kw):
    defaults = dict(scheme=Scheme.MILSTEIN, dt=1e-3, t_end=1.0,
                    record_stride=1)
    defaults.update(kw)
    return IntegratorConfig(**defaults)


class TestStep:
    def test_zero_noise_reduces_to_euler(self):
        p = noiseless_params()
        s = State(0.4, 0.3, 0.6)
        cfg = config()
        out = step(s, p, 0.0, [0.7, -1.2], cfg)
        expected = s.as_array() + drift(s, p) * cfg.dt
        np.testing.assert_allclose(out.as_array(), expected, rtol=1e-14)

    def test_e1_absorbing_for_any_increment(self, rng):
        p = random_params(rng)
        out = step(State(0.0, 0.0, 1.0), p, 0.0, [2.0, -3.0], config())
        assert out == State(0.0, 0.0, 1.0)

    def test_milstein_x_update_matches_scalar_oracle(self):
        # with sigma1^2 = 0 the x equation decouples from the (S, I) noise;
        # one step must match an independently coded scalar Milstein update
        p = ModelParams(mu=0.02, beta=0.5, gamma=1.0, kappa=1.3, omega=0.2,
                        delta=0.3, sigma1_sq=0.0, sigma2_sq=0.7,
                        sigma3_sq=0.4)
        s = State(0.2, 0.15, 0.37)
        cfg = config(dt=1e-3)
        dW2 = 0.041
        out = step(s, p, 0.0, [0.0, dW2], cfg)

        x, I = s.x, s.I
        ssq = p.sigma2_sq + p.sigma3_sq
        f = p.kappa * x * (1 - x) * (-p.omega + I + p.delta * (2 * x - 1)
                                     + p.kappa * (p.sigma3_sq - ssq * x))
        g = p.kappa * math.sqrt(ssq) * x * (1 - x)
        gprime = p.kappa * math.sqrt(ssq) * (1 - 2 * x)
        oracle = (x + f * cfg.dt + g * dW2
                  + 0.5 * g * gprime * (dW2 ** 2 - cfg.dt))
        assert out.x == pytest.approx(oracle, rel=1e-13)

    def test_one_step_simulate_equals_step(self, rng):
        p = random_params(rng)
        s = random_interior_state(rng)
        cfg = config(dt=1e-3, t_end=1e-3)
        dW = np.array([[0.01, -0.02]])
        path = simulate(s, p, config=cfg, dW=dW)
        direct = step(s, p, 0.0, dW[0], cfg)
        np.testing.assert_array_equal(path.states[1], direct.as_array())


class TestSimulate:
    def test_zero_noise_subcritical_reaches_disease_free(self):
        p = noiseless_params(beta=0.5)   # R0 < 1
        path = simulate(State(0.9, 0.1, 0.0), p,
                        config=config(t_end=400.0, record_stride=100))
        assert path.field("I")[-1] < 1e-6
        # S relaxes to 1 at the slow demographic rate mu
        assert path.field("S")[-1] == pytest.approx(1.0, abs=1e-3)

    def test_reproducible_per_stream(self):
        p = fig5_params(13.0)
        cfg = config(t_end=2.0)
        a = simulate(State(0.2, 0.01, 0.4), p, config=cfg,
                     stream=RandomStream(42, 7))
        b = simulate(State(0.2, 0.01, 0.4), p, config=cfg,
                     stream=RandomStream(42, 7))
        np.testing.assert_array_equal(a.states, b.states)
        c = simulate(State(0.2, 0.01, 0.4), p, config=cfg,
                     stream=RandomStream(42, 8))
        assert not np.array_equal(a.states, c.states)

    def test_recorded_states_stay_in_solution_set(self, rng):
        for trial in range(10):
            p = random_params(rng)
            s = random_interior_state(rng)
            path = simulate(s, p, config=config(t_end=10.0),
                            stream=RandomStream(99, trial))
            S, I, x = path.states.T
            assert np.all(S >= 0) and np.all(I >= 0)
            assert np.all(S + I <= 1.0 + 1e-15)
            assert np.all((x >= 0) & (x <= 1))

    def test_absorption_pins_coordinate(self):
        # strong vaccinator-side noise drives x to an absorbing state fast
        p = ModelParams(mu=0.02, beta=5.0, gamma=1.0, kappa=2.0, omega=1.5,
                        delta=0.0, sigma1_sq=0.0, sigma2_sq=3.0,
                        sigma3_sq=0.1)
        path = simulate(State(0.5, 0.1, 0.3), p,
                        config=config(t_end=50.0, record_stride=10),
                        stream=RandomStream(5, 0))
        assert path.absorbed_x is XAbsorption.AT_ZERO
        k = np.searchsorted(path.times, path.absorbed_x_time)
        assert np.all(path.field("x")[k + 1:] == 0.0)

    def test_euler_and_milstein_agree_on_shared_drivers_as_dt_shrinks(self):
        p = fig5_params(2.0)
        s = State(0.3, 0.1, 0.5)
        rng = np.random.default_rng(3)
        diffs = []
        for dt in (4e-3, 5e-4):
            n = int(round(1.0 / dt))
            gap = 0.0
            for _ in range(20):
                dW = rng.standard_normal((n, 2)) * math.sqrt(dt)
                cfg_kwargs = dict(dt=dt, t_end=1.0, record_stride=n)
                em = simulate(s, p, config=config(scheme=Scheme.EULER_MARUYAMA,
                                                  **cfg_kwargs), dW=dW)
                mi = simulate(s, p, config=config(scheme=Scheme.MILSTEIN,
                                                  **cfg_kwargs), dW=dW)
                gap += np.max(np.abs(em.states[-1] - mi.states[-1]))
            diffs.append(gap / 20)
        assert diffs[1] < diffs[0]

    def test_driver_record_roundtrip(self):
        p = fig5_params(1.0)
        cfg = config(t_end=0.5)
        a = simulate(State(0.3, 0.1, 0.5), p, config=cfg,
                     stream=RandomStream(11, 0), record_drivers=True)
        b = simulate(State(0.3, 0.1, 0.5), p, config=cfg, dW=a.driver_record)
        np.testing.assert_array_equal(a.states, b.states)

    def test_rejects_initial_outside_domain(self):
        with pytest.raises(DomainError):
            simulate(State(0.9, 0.5, 0.2), noiseless_params(), config=config())


class TestEnsemble:
    def test_single_path_equals_simulate(self):
        p = fig5_params(1.0)
        cfg = config(t_end=1.0)
        s = State(0.3, 0.1, 0.5)
        [res] = ensemble(s, p, cfg, 1, 77, lambda path: path.states[-1].copy())
        direct = simulate(s, p, config=cfg, stream=RandomStream(77, 0))
        np.testing.assert_array_equal(res, direct.states[-1])

    def test_worker_count_does_not_change_aggregate(self):
        p = fig5_params(1.0)
        cfg = config(t_end=1.0)
        s = State(0.3, 0.1, 0.5)
        red = lambda path: float(path.states[-1, 1])
        serial = ensemble(s, p, cfg, 12, 123, red, n_workers=1)
        parallel = ensemble(s, p, cfg, 12, 123, red, n_workers=4)
        assert serial == parallel


def test_path_csv_format(tmp_path):
    p = fig5_params(0.0)
    path = simulate(State(0.3, 0.1, 0.5), p,
                    config=config(t_end=0.01), stream=RandomStream(1, 0))
    out = tmp_path / "path.csv"
    path.to_csv(out, header_comment="seed=1")
    lines = out.read_text().splitlines()
    assert lines[0] == "# seed=1"
    assert lines[1] == "t,S,I,x"
    t, s, i, x = lines[2].split(",")
    assert float(t) == 0.0 and float(s) == 0.3


def test_proposition1_tail_inequality():
    # 1 - x^* - (gamma/mu) I^* <= S_* + I_* <= S^* + I^* <= 1 - x_* - (gamma/mu) I_*
    p = fig5_params(0.0)
    path = simulate(State(0.17, 0.001, 0.45), p,
                    config=config(t_end=150.0, record_stride=100),
                    stream=RandomStream(2024, 0))
    tail = path.states[len(path.states) // 2:]
    S, I, x = tail.T
    si = S + I
    tol = 0.05   # finite-horizon estimates of tail extrema
    assert 1 - x.max() - (p.gamma / p.mu) * I.max() <= si.min() + tol
    assert si.max() <= 1 - x.min() - (p.gamma / p.mu) * I.min() + tol
