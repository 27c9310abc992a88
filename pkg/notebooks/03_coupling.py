# %% [markdown]
# # The alternative iteration and its Halpern shadow
#
# The alternative iteration anchors before applying the map:
# `x[n+1] = T(combine(lam[n+1], u, x[n]))`. The point fed to `T` at each
# step is a Halpern iterate `y[n+1]`, so `x[n] = T(y[n])` for every `n >= 1`.

# %%
import numpy as np

from altiter import geometry as geo
from altiter import maps as mp
from altiter.iterate import Harmonic, IterationConfig, iterate_coupled, iterate_halpern, verify_coupling

E1 = geo.euclidean(1)
cfg = IterationConfig(E1, mp.EuclideanScaling(0.5, (0.0,)), [1.0], [1.0], Harmonic(), 8)
traj = iterate_coupled(cfg)

# %% [markdown]
# For `T(x) = x/2` with `u = x0 = 1` and `lam[n] = 1/(n+1)` both sequences
# are explicit: `x[n] = 1/(n+1)` and `y[n] = 2/(n+1)`.

# %%
n = np.arange(cfg.horizon + 1)
print(np.column_stack([n, traj.xs[:, 0], 1 / (n + 1)]))
print(np.column_stack([n[1:], traj.ys[:, 0], 2 / (n[1:] + 1)]))

# %% [markdown]
# The coupling report checks the identity `x[n] = T(y[n])`, the Halpern
# recurrence for `y`, and agreement with a separately run Halpern engine.

# %%
print(verify_coupling(traj))
ys = iterate_halpern(E1, cfg.mapping, [1.0], traj.y(1), Harmonic(), cfg.horizon)
print("independent engine max deviation", np.abs(ys - traj.ys).max())

# %% [markdown]
# The same holds in the disk.

# %%
H = geo.hyperbolic_disk()
T = mp.Average(0.5, mp.HyperbolicRotation((0.2, -0.1), 1.0), mp.HyperbolicRotation((-0.3, 0.4), -2.0))
disk = iterate_coupled(IterationConfig(H, T, [0.5, 0.3], [-0.6, 0.2], Harmonic(), 500))
print(verify_coupling(disk).passed)
