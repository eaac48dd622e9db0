import numpy as np
import pytest

from vaxgame.model import ModelParams, State

YEAR_GAMMA = 365.0 / 22.0


def fig1a_params():
    return ModelParams(mu=1 / 50, beta=31.0, gamma=YEAR_GAMMA, kappa=1.69,
                       omega=0.0015, delta=0.0005, sigma1_sq=30.0,
                       sigma2_sq=0.0008, sigma3_sq=0.0006)


def fig1b_params():
    return ModelParams(mu=1 / 50, beta=33.3, gamma=YEAR_GAMMA, kappa=1.69,
                       omega=0.0015, delta=0.0005, sigma1_sq=50.0,
                       sigma2_sq=0.0008, sigma3_sq=0.0006)


def fig3_params(sigma2_sq, sigma3_sq):
    return ModelParams(mu=1 / 50, beta=100.0, gamma=YEAR_GAMMA, kappa=1.69,
                       omega=0.1, delta=0.5, sigma1_sq=0.16,
                       sigma2_sq=sigma2_sq, sigma3_sq=sigma3_sq)


def fig5_params(sigma1_sq):
    return ModelParams(mu=1 / 50, beta=100.0, gamma=YEAR_GAMMA, kappa=1.69,
                       omega=0.0004, delta=0.00005, sigma1_sq=sigma1_sq,
                       sigma2_sq=0.0008, sigma3_sq=0.0006)


def random_params(rng: np.random.Generator) -> ModelParams:
    return ModelParams(
        mu=rng.uniform(0.005, 0.1),
        beta=rng.uniform(0.5, 120.0),
        gamma=rng.uniform(0.05, 20.0),
        kappa=rng.uniform(0.1, 3.0),
        omega=rng.uniform(0.0, 2.0),
        delta=rng.uniform(0.0, 1.0),
        sigma1_sq=rng.uniform(0.0, 40.0),
        sigma2_sq=rng.uniform(0.0, 2.0),
        sigma3_sq=rng.uniform(0.0, 2.0),
    )


def random_interior_state(rng: np.random.Generator) -> State:
    s = rng.uniform(0.05, 0.9)
    i = rng.uniform(0.05, 0.95 - s)
    x = rng.uniform(0.05, 0.95)
    return State(s, i, x)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
