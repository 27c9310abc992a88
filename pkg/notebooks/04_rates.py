# %% [markdown]
# # Domination and transfer of rates
#
# Because `x[n] = T(y[n])` and `T` is nonexpansive, every distance among the
# `x` iterates is bounded by the matching distance among the `y` iterates.
# Any rate of asymptotic regularity or of convergence for `y` is therefore
# also a rate for `x`.

# %%
import math

import numpy as np

from altiter import geometry as geo
from altiter import maps as mp
from altiter.iterate import Harmonic, IterationConfig, iterate_coupled
from altiter.rates import (
    EpsilonGrid, RateTable, check_convergence_transfer, check_domination, check_rate,
    check_rate_transfer, distance_to_fixed_point_series, empirical_rate,
)

E2 = geo.euclidean(2)
cfg = IterationConfig(E2, mp.EuclideanRotation(math.pi / 2), [1.0, 0.0], [0.0, 1.0], Harmonic(), 10_000)
traj = iterate_coupled(cfg)

# %%
rep = check_domination(traj, mp.fixed_point_oracle(cfg.mapping), pairs=2000)
print(f"pair excess {rep.pair_max_excess:.2e}, fixed-point excess {rep.fixed_point_max_excess:.2e}")

# %% [markdown]
# Empirical rates: the first index after which every step stays below epsilon.

# %%
transfer = check_rate_transfer(traj)
for e in transfer.entries:
    print(f"eps={e.epsilon:.0e}  x rate {e.rate_x}  y rate {e.rate_y}")

# %% [markdown]
# A rate table read off the `y` sequence also holds for the `x` sequence.

# %%
grid = EpsilonGrid((1e-1, 1e-2, 1e-3, 1e-4))
phi = RateTable(tuple((e, empirical_rate(traj.y_steps, e, start=1)) for e in grid))
print(check_rate(traj.y_steps, phi, grid, start=1).passed, check_rate(traj.x_steps[1:], phi, grid, start=1).passed)

# %% [markdown]
# Strong convergence to the fixed point transfers too.

# %%
dx = distance_to_fixed_point_series(traj.xs, E2, [0, 0])
print(f"d(x_N, 0) = {dx[-1]:.3e}")
print(check_convergence_transfer(traj, [0, 0], 1e-2).as_dict())
