"""Absorption-probability sweep over the bistable regime of the
vaccination game.

When the replicator drift pushes the vaccinating fraction x toward both
boundaries, which one wins is random.  This sweeps initial condition x0
and the two strategy-noise intensities on a small grid, estimating the
probability that x is absorbed at zero, and prints the monotone trends:
the probability falls with x0, rises with the non-vaccinator noise, and
falls with the vaccinator noise.
"""

from vaxgame.estimators import absorption_sweep
from vaxgame.scenarios import load_scenario

sc = load_scenario("fig2b")
grid = (0.1, 0.8, 1.5)
x0s = (0.1, 0.5, 0.9)
table = absorption_sweep(sc.params, grid, grid, x0s, n_per_cell=40,
                         T=100.0, dt=1e-3, master_seed=sc.seed,
                         S0=0.4, I0=0.4, n_workers=4)

print("sigma2_sq  sigma3_sq  x0    P(absorbed at 0)   +- se")
for i, s2 in enumerate(grid):
    for j, s3 in enumerate(grid):
        for k, x0 in enumerate(x0s):
            print(f"  {s2:5.2f}     {s3:5.2f}   {x0:4.2f}      "
                  f"{table.p_hat[i, j, k]:5.3f}        {table.std_err[i, j, k]:.3f}")
print()
print("averaged over the rest of the grid:")
for k, x0 in enumerate(x0s):
    print(f"  x0={x0:4.2f}: mean P = {table.p_hat[:, :, k].mean():.3f}")
for i, s2 in enumerate(grid):
    print(f"  sigma2_sq={s2:4.2f}: mean P = {table.p_hat[i].mean():.3f}")
for j, s3 in enumerate(grid):
    print(f"  sigma3_sq={grid[j]:4.2f}: mean P = {table.p_hat[:, j].mean():.3f}")
