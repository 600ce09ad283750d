# Building a weak K-contact structure from a unit Killing field.
#
# On the ellipsoid u1^2 + u2^2 + a (u3^2 + u4^2) = 1 the field
# d_t1 + sqrt(a) d_t2 is unit and Killing.  Setting eta = g(xi, .),
# phi = -nabla xi and Q X = R(X, xi) xi on ker eta gives a weak structure
# whose Q differs from the identity unless a = 1.

# %%
import numpy as np

from weakcontact import SamplePlan, classify, construct_from_killing, homothety, sample_points
from weakcontact.errors import DegenerateQ
from weakcontact.gallery import ellipsoid, flat_torus

# %%
entry = ellipsoid(2.0)
S = construct_from_killing(entry.chart, entry.xi)
pts = sample_points(entry.chart, SamplePlan(count=20, seed=1))
result = classify(S, pts)
print(result.describe())
print("normal:", result.normal)
print("|Q - id| over the sample: min %.3f, max %.3f" % (result.qtilde_norms.min(), result.qtilde_norms.max()))

# %% [markdown]
# In dimension three Q acts on ker eta as a multiple mu of the identity.
# Rescaling by mu at a point gives a classical structure at that point.

# %%
ls = S.local(pts[0])
mu = np.mean([e @ ls.gv @ (ls.Q.value @ e) for e in ls.E])
print("mu =", mu)
print(classify(homothety(S, mu), [pts[0]]).describe())

# %% [markdown]
# The round sphere is the classical case a = 1.

# %%
sphere = ellipsoid(1.0)
print(classify(construct_from_killing(sphere.chart, sphere.xi), pts).describe())

# %% [markdown]
# A parallel field on a flat torus has zero xi-sectional curvature, so Q
# degenerates and the construction refuses it.

# %%
t = flat_torus()
try:
    construct_from_killing(t.chart, t.xi)
except DegenerateQ as exc:
    print(exc.reason, "-", exc)
