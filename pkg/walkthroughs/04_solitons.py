# Generalized gradient Ricci solitons
#     Hess f = -c1 df (x) df + c2 Ric + lam g
# and the rigidity diagnostic, including its excluded case.

# %%
import numpy as np

from weakcontact import (
    Field, Potential, SamplePlan, SolitonParams, TwoPotentials,
    construct_from_killing, sample_points, theorem51_diagnostic,
)
from weakcontact import jets
from weakcontact.gallery import round_sphere
from weakcontact.soliton import lemma_checks, random_potential, soliton_check

entry = round_sphere()
S = construct_from_killing(entry.chart, entry.xi)
pts = sample_points(entry.chart, SamplePlan(count=20))

# %% [markdown]
# Ric = 2g on S^3, so a constant potential with c2 = 1, lam = -2 is a soliton
# and the diagnostic confirms the Einstein conclusion.

# %%
const = Field.constant(1.0, "scalar")
rep = theorem51_diagnostic(S, const, SolitonParams(1.0, 1.0, -2.0), pts)
print(rep.meta["theorem51"]["applicable"], [c.status for c in rep.checks])

# %% [markdown]
# The excluded case.  u = cos(rho) cos(t1) restricts a linear function of
# R^4, so Hess u = -u g.  Then f = log(u) / c1 satisfies the equation with
# c2 = 0 and c1 lam = -1, and f is not constant.  The diagnostic reports the
# violated nondegeneracy condition instead of asserting grad f = 0.

# %%
c1 = 1.0
f = Field.closed_form(lambda x: jets.log(jets.cos(x[0]) * jets.cos(x[1])) / c1, "scalar")
prm = SolitonParams(c1, 0.0, -1.0 / c1)
good = np.array([p for p in sample_points(entry.chart, SamplePlan(count=80)) if np.cos(p[0]) * np.cos(p[1]) > 0.05][:20])
print("soliton residual:", max(soliton_check(S, Potential(f), prm, p) for p in good))
print(theorem51_diagnostic(S, f, prm, good).meta["theorem51"]["failed"])

# %% [markdown]
# Lie-derivative lemma for df (x) df holds for any potential; equal potentials
# in the two-potential form reproduce the one-potential residual.

# %%
rng = np.random.default_rng(0)
g = random_potential(rng, 3)
print("L52:", max(lemma_checks(S, Potential(g), p)["L52"].residual for p in pts))
prm = SolitonParams(0.3, 0.5, -1.0)
print("two-potential gap:", max(abs(soliton_check(S, Potential(g), prm, p) - soliton_check(S, TwoPotentials(g, g), prm, p)) for p in pts))
