import math

import numpy as np
import pytest

from conftest import fig3_params
from vaxgame.engine import Path, XAbsorption
from vaxgame.estimators import (AbsorptionTable, absorption_sweep,
                                classify_x_outcome, growth_rate, tail_extrema,
                                time_average)
from vaxgame.model import DomainError


def synthetic_path(times, S=None, I=None, x=None, absorbed_x=None):
    times = np.asarray(times, dtype=np.float64)
    n = len(times)
    states = np.zeros((n, 3))
    for col, arr in enumerate((S, I, x)):
        if arr is not None:
            states[:, col] = np.asarray(arr, dtype=np.float64)
    return Path(times=times, states=states, absorbed_x=absorbed_x,
                dt=float(times[1] - times[0]))


class TestTimeAverage:
    def test_constant_signal(self):
        t = np.linspace(0.0, 10.0, 101)
        p = synthetic_path(t, I=np.full_like(t, 0.37))
        assert time_average(p, "I") == pytest.approx(0.37, rel=1e-14)

    def test_linear_signal_exact_under_trapezoid(self):
        # trapezoidal integration is exact for affine integrands, so the
        # average of 2t over [2, 10] is (4 + 20)/2 = 12
        t = np.linspace(0.0, 10.0, 11)
        p = synthetic_path(t, S=2.0 * t)
        assert time_average(p, "S") == pytest.approx(12.0, rel=1e-14)

    def test_burn_in_override(self):
        t = np.linspace(0.0, 10.0, 101)
        y = np.where(t < 5.0, 1.0, 0.0)
        p = synthetic_path(t, I=y)
        assert time_average(p, "I", burn_in=5.0) == pytest.approx(0.0)

    def test_refinement_invariance_for_smooth_signal(self):
        vals = []
        for n in (201, 2001):
            t = np.linspace(0.0, 20.0, n)
            p = synthetic_path(t, x=0.5 + 0.3 * np.sin(t))
            vals.append(time_average(p, "x", burn_in=0.0))
        assert vals[0] == pytest.approx(vals[1], abs=1e-4)

    def test_rejects_burn_in_past_end(self):
        t = np.linspace(0.0, 1.0, 11)
        with pytest.raises(DomainError):
            time_average(synthetic_path(t), "S", burn_in=2.0)


class TestGrowthRate:
    def test_exact_exponential_decay(self):
        t = np.linspace(0.0, 10.0, 1001)
        p = synthetic_path(t, I=0.2 * np.exp(-0.7 * t))
        g = growth_rate(p, "I")
        assert g.rate == pytest.approx(-0.7, abs=1e-6)
        assert g.r_squared > 1.0 - 1e-12
        assert not g.truncated

    def test_exact_logistic_rate(self):
        t = np.linspace(0.0, 10.0, 1001)
        z = -1.0 + 0.45 * t
        p = synthetic_path(t, x=1.0 / (1.0 + np.exp(-z)))
        g = growth_rate(p, "x", transform="logit_over_t")
        assert g.rate == pytest.approx(0.45, abs=1e-6)

    def test_fit_window_is_tail_half(self):
        t = np.linspace(0.0, 10.0, 101)
        p = synthetic_path(t, I=0.2 * np.exp(-0.7 * t))
        g = growth_rate(p, "I")
        assert g.window[0] == pytest.approx(5.0)
        assert g.window[1] == pytest.approx(10.0)

    def test_truncates_at_absorption(self):
        t = np.linspace(0.0, 10.0, 101)
        y = 0.2 * np.exp(-0.7 * t)
        y[60:] = 0.0
        g = growth_rate(synthetic_path(t, I=y), "I")
        assert g.truncated
        assert g.window[1] < 6.0
        assert g.rate == pytest.approx(-0.7, abs=1e-6)

    def test_rejects_unknown_transform(self):
        t = np.linspace(0.0, 1.0, 11)
        with pytest.raises(DomainError):
            growth_rate(synthetic_path(t, I=np.full(11, 0.1)), "I",
                        transform="sqrt")

    def test_rejects_fully_absorbed_path(self):
        t = np.linspace(0.0, 1.0, 11)
        with pytest.raises(DomainError):
            growth_rate(synthetic_path(t, I=np.zeros(11)), "I")


class TestTailExtrema:
    def test_sinusoid_tail(self):
        t = np.linspace(0.0, 100.0, 4001)
        p = synthetic_path(t, I=0.5 + 0.2 * np.sin(t))
        est = tail_extrema(p, "I")
        assert est.value_sup == pytest.approx(0.7, abs=1e-3)
        assert est.value_inf == pytest.approx(0.3, abs=1e-3)
        assert est.converged

    def test_decaying_transient_is_ignored(self):
        # an initial spike decays; the tail oscillates in [0.4, 0.6]
        t = np.linspace(0.0, 200.0, 8001)
        p = synthetic_path(t, x=0.5 + 0.1 * np.sin(t) + 0.4 * np.exp(-t))
        est = tail_extrema(p, "x")
        assert est.value_sup == pytest.approx(0.6, abs=1e-3)
        assert est.value_inf == pytest.approx(0.4, abs=1e-3)

    def test_monotone_signal_not_converged(self):
        t = np.linspace(0.0, 10.0, 1001)
        p = synthetic_path(t, S=0.1 + 0.05 * t)
        est = tail_extrema(p, "S")
        assert not est.converged

    def test_rejects_short_path(self):
        t = np.linspace(0.0, 1.0, 4)
        with pytest.raises(DomainError):
            tail_extrema(synthetic_path(t), "S")


class TestClassifyOutcome:
    def test_absorbed_states_win_over_terminal_value(self):
        t = np.linspace(0.0, 1.0, 11)
        p = synthetic_path(t, x=np.full(11, 0.9),
                           absorbed_x=XAbsorption.AT_ZERO)
        assert classify_x_outcome(p)
        q = synthetic_path(t, x=np.full(11, 0.1),
                           absorbed_x=XAbsorption.AT_ONE)
        assert not classify_x_outcome(q)

    def test_unabsorbed_split_at_half(self):
        t = np.linspace(0.0, 1.0, 11)
        assert classify_x_outcome(synthetic_path(t, x=np.full(11, 0.49)))
        assert not classify_x_outcome(synthetic_path(t, x=np.full(11, 0.51)))


class TestAbsorptionSweep:
    def test_extreme_noise_cells_pin_the_outcome(self):
        # dominant vaccinator-side noise forces x -> 0, dominant
        # non-vaccinator-side noise forces x -> 1
        table = absorption_sweep(
            fig3_params(0.15, 0.2), sigma2_sq_grid=[2.0], sigma3_sq_grid=[0.05],
            x0_grid=[0.5], n_per_cell=10, T=40.0, dt=1e-3, master_seed=7)
        assert table.p_hat[0, 0, 0] == 1.0
        table2 = absorption_sweep(
            fig3_params(0.15, 0.2), sigma2_sq_grid=[0.05], sigma3_sq_grid=[2.0],
            x0_grid=[0.5], n_per_cell=10, T=40.0, dt=1e-3, master_seed=7)
        assert table2.p_hat[0, 0, 0] == 0.0

    def test_reproducible_and_worker_independent(self):
        kwargs = dict(sigma2_sq_grid=[0.3, 0.6], sigma3_sq_grid=[0.4],
                      x0_grid=[0.3, 0.7], n_per_cell=4, T=10.0, dt=1e-3,
                      master_seed=11)
        a = absorption_sweep(fig3_params(0.3, 0.4), **kwargs)
        b = absorption_sweep(fig3_params(0.3, 0.4), n_workers=4, **kwargs)
        np.testing.assert_array_equal(a.p_hat, b.p_hat)
        assert not a.errors and not b.errors

    def test_standard_error_formula(self):
        table = AbsorptionTable(
            sigma2_sq=np.array([0.1]), sigma3_sq=np.array([0.1]),
            x0=np.array([0.5]), p_hat=np.array([[[0.25]]]),
            n_trials=100, master_seed=0)
        assert table.std_err[0, 0, 0] == pytest.approx(
            math.sqrt(0.25 * 0.75 / 100))

    def test_csv_long_format(self, tmp_path):
        table = AbsorptionTable(
            sigma2_sq=np.array([0.1, 0.2]), sigma3_sq=np.array([0.3]),
            x0=np.array([0.4]), p_hat=np.array([[[0.5]], [[1.0]]]),
            n_trials=8, master_seed=3)
        out = tmp_path / "table.csv"
        table.to_csv(out, header_comment="seed=3")
        lines = out.read_text().splitlines()
        assert lines[0] == "# seed=3"
        assert lines[1] == "sigma2_sq,sigma3_sq,x0,n,p_hat,se"
        assert len(lines) == 4
        s2, s3, x0, n, p, se = lines[2].split(",")
        assert (float(s2), float(s3), float(x0)) == (0.1, 0.3, 0.4)
        assert int(n) == 8 and float(p) == 0.5

    def test_rejects_empty_grid(self):
        with pytest.raises(DomainError):
            absorption_sweep(fig3_params(0.3, 0.4), [], [0.1], [0.5],
                             n_per_cell=1, T=1.0, dt=1e-3, master_seed=0)
