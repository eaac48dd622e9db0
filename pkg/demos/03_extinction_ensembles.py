"""Monte Carlo verification of the two almost-sure extinction conditions.

Each scenario satisfies exactly one sufficient condition for the infection
to die out: a large-noise condition in one case and a subcritical
noise-corrected reproduction number in the other.  We run 200 paths each,
measure the fraction absorbed below 1e-6, and fit the empirical pathwise
decay rate (1/t) log I(t) for comparison against the proved bound.
"""

import math

import numpy as np

from vaxgame.analysis import extinction_check
from vaxgame.engine import IntegratorConfig, Scheme, ensemble
from vaxgame.estimators import growth_rate
from vaxgame.scenarios import load_scenario

cfg = IntegratorConfig(scheme=Scheme.MILSTEIN, dt=1e-3, t_end=100.0,
                       record_stride=100)


def reduce(path):
    gone = path.absorbed_I or path.field("I")[-1] < 1e-6
    try:
        rate = growth_rate(path, "I", "log_over_t").rate
    except ValueError:
        rate = None
    return gone, rate


for name in ("fig1a", "fig1b"):
    sc = load_scenario(name)
    verdict = extinction_check(sc.params)
    results = ensemble(sc.initial, sc.params, cfg, 200, sc.seed, reduce,
                       n_workers=4)
    frac = np.mean([g for g, _ in results])
    rates = np.array([r for _, r in results if r is not None])
    se = rates.std(ddof=1) / math.sqrt(len(rates))
    print(f"=== {name}: condition {verdict.condition}, "
          f"proved decay bound {verdict.rate_bound:.3f}/yr")
    print(f"  {frac:.0%} of 200 paths below 1e-6 by t=100")
    print(f"  fitted mean decay rate {rates.mean():.3f} "
          f"+- {se:.3f}/yr (should sit at or below the bound)")
