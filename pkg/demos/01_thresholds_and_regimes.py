"""Closed-form regime analysis across the bundled scenarios.

For each bundled parameter set this prints the basic reproduction number,
its noise-corrected counterpart, the susceptible divider level (when the
noisy threshold exceeds one), the equilibrium report, and the two
almost-sure verdicts that need no simulation at all: the infection
extinction check and the logistic classification of the vaccinating
fraction.
"""

from vaxgame.analysis import (RegimeError, equilibrium_report,
                              extinction_check, logistic_classifier,
                              susceptible_divider, thresholds)
from vaxgame.scenarios import BUNDLED, load_scenario

for name in BUNDLED:
    sc = load_scenario(name)
    th = thresholds(sc.params)
    print(f"=== {name}")
    print(f"  r0 = {th.r0:.4f}   r0s = {th.r0s:.4f}")
    s_d = susceptible_divider(sc.params)
    if s_d is None:
        print("  susceptible divider: absent (noisy threshold below one)")
    else:
        print(f"  susceptible divider s_d = {s_d:.4f}")

    rep = equilibrium_report(sc.params)
    for label, eq in (("e3 (disease-free, interior x)", rep.e3),
                      ("e5 (endemic, interior x)", rep.e5)):
        if eq is None:
            print(f"  {label}: absent")
        else:
            print(f"  {label}: S={eq.S:.4f} I={eq.I:.3e} x={eq.x:.4f}")

    verdict = extinction_check(sc.params)
    if verdict.condition is None:
        print("  extinction: neither sufficient condition holds")
    else:
        print(f"  extinction: condition {verdict.condition}, "
              f"pathwise log-growth of I bounded by {verdict.rate_bound:.3f}")

    # classify the fate of the vaccinating fraction at a representative
    # prevalence: the endemic mean of I when it exists, else zero
    i_rep = rep.e5.I if rep.e5 is not None else 0.0
    cls = logistic_classifier(sc.params, i_rep)
    print(f"  vaccinating fraction: {cls.classification} "
          f"(L(1)={cls.L_at_one:.3f}, L(0)={cls.L_at_zero:.3f})")
