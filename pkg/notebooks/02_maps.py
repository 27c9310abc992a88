# %% [markdown]
# # Nonexpansive maps
#
# The catalog holds maps that never increase distances. The sampled guard
# estimates the Lipschitz constant and rejects anything above 1.

# %%
import math

from altiter import geometry as geo
from altiter import maps as mp

E2 = geo.euclidean(2)
H = geo.hyperbolic_disk()

catalog = [
    ("rotation", mp.EuclideanRotation(math.pi / 2), E2),
    ("scaling", mp.EuclideanScaling(0.5, (0.0, 0.0)), E2),
    ("ball projection", mp.ProjectionOntoDomain(geo.Ball((0.25, 0.25), 1.0)), E2),
    ("disk rotation", mp.HyperbolicRotation((0.2, -0.1), 1.0), H),
]
for name, T, space in catalog:
    rep = mp.check_nonexpansive(T, space, 5000)
    witness = mp.fixed_point_oracle(T)
    p = None if witness is None else witness.point.tolist()
    print(f"{name:16} max ratio {rep.max_ratio:.9f}  fixed point {p}")

# %% [markdown]
# An expansion is refused at construction. With validation turned off it
# builds, and the guard then catches it.

# %%
try:
    mp.EuclideanAffine(((2, 0), (0, 2)), (0, 0))
except ValueError as exc:
    print("refused:", exc)

double = mp.EuclideanAffine(((2, 0), (0, 2)), (0, 0), validate=False)
print(mp.check_nonexpansive(double, E2, 1000).as_dict())
