# Truncated Taylor jets and the curvature they feed.
#
# A jet carries every partial derivative of a function up to a fixed order.
# Seeding the chart coordinates and evaluating the metric on them yields the
# metric together with its derivatives, which is all Christoffel symbols and
# curvature need.

# %%
import numpy as np

from weakcontact import jets
from weakcontact.gallery import ellipsoid, round_sphere
from weakcontact.jets import partial, seed_point
from weakcontact.oracle import fd_riemann, relative_error
from weakcontact.riemann import local_geometry, ricci_and_scalar, sectional

# %% [markdown]
# One variable: the coefficients of sin at 0 are 0, 1, 0, -1/6.

# %%
(x,) = seed_point([0.0], 3)
s = jets.sin(x)
print([float(s.coefficient((k,))) for k in range(4)])
print("third derivative:", partial(s, (3,)))

# %% [markdown]
# Two variables: the mixed partial of x*y is 1.

# %%
x, y = seed_point([2.0, 5.0], 2)
print(partial(x * y, (1, 0)), partial(x * y, (0, 1)), partial(x * y, (1, 1)))

# %% [markdown]
# The unit sphere S^3 comes from its embedding in R^4.  Its Ricci tensor is
# twice the metric, the scalar curvature is 6 and every sectional curvature is 1.

# %%
S3 = round_sphere().chart
p = np.array([0.6, 0.2, -1.0])
ric, tau = ricci_and_scalar(S3.metric, p, check=True)
print("Ric - 2g:", np.max(np.abs(ric - 2 * S3.metric.at(p))))
print("tau:", tau)
print("K(d_rho, d_t1):", sectional(S3.metric, p, [1, 0, 0], [0, 1, 0]))

# %% [markdown]
# The ellipsoid is not Einstein.  Its curvature is checked against a
# jet-free five-point finite-difference oracle.

# %%
E = ellipsoid(2.0).chart
geo = local_geometry(E.metric, p, 2)
print("Ric at p:\n", np.round(geo.ricci.value, 6))
print("relative error vs oracle:", relative_error(geo.riemann.value, fd_riemann(E, p)))
