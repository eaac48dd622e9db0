"""Simulation and analysis toolkit for a stochastic SIR epidemic coupled to
stochastic replicator dynamics of parental vaccination decisions."""

from .analysis import (DeviationBound, EndemicMeanBounds, EquilibriumReport,
                       ExtinctionVerdict, LogisticVerdict, PathwiseBounds,
                       RegimeError, Thresholds, deviation_bound,
                       endemic_mean_bounds, equilibrium_report,
                       extinction_check, logistic_classifier, pathwise_bounds,
                       thresholds)
from .control import (ControlProblem, ControlSolution, CostWeights,
                      CostatePath, SweepConfig, costate_backward, hamiltonian,
                      objective, sweep_solve)
from .engine import (IntegratorConfig, NumericalBlowupError, Path,
                     RandomStream, Scheme, XAbsorption, ensemble, simulate,
                     step)
from .estimators import (AbsorptionTable, GrowthRate, TailEstimate,
                         absorption_sweep, growth_rate, tail_extrema,
                         time_average)
from .model import (DomainError, ModelParams, State, diffusion,
                    diffusion_state_jacobian, drift, in_domain, payoffs)
from .scenarios import BUNDLED, Scenario, ScenarioError, load_scenario

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
