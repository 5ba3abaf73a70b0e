"""
Closed-form evidence for a contingency table.

Under a symmetric Dirichlet prior the marginal likelihood of a saturated
table is a ratio of gamma functions. Here we compare it with brute-force
Monte Carlo over the simplex, then score a few regressions on a toy
dataset.
"""
# %%
import numpy as np
from scipy.special import logsumexp

from mossgwas import ContingencyTable, PriorConfig, log_marglik_saturated
from mossgwas.core import contingency_table
from mossgwas.evidence import log_marglik_regression
from mossgwas import SimConfig, simulate_dataset

counts = np.array([7, 2, 3, 9])            # a 2x2 table, first variable fastest
t = ContingencyTable((0, 1), (2, 2), counts)
prior = PriorConfig(alpha=1.0)
print("closed form :", log_marglik_saturated(t, prior))

# %%
# Monte Carlo: average the multinomial likelihood over prior draws
rng = np.random.default_rng(0)
theta = rng.dirichlet(np.full(4, prior.alpha / 4), size=400_000)
loglik = (counts * np.log(theta)).sum(axis=1)
print("monte carlo :", logsumexp(loglik) - np.log(len(loglik)))

# %%
# Regression evidence is joint minus predictor-margin evidence.
d = simulate_dataset(SimConfig(n_cases=300, n_controls=300, p=5, causal=(0, 1), seed=1))
y = d.response_index
for preds in ([0], [1], [2], [0, 1], [2, 3]):
    names = ", ".join(d.names[j] for j in preds)
    print(f"[aff | {names}]".ljust(22), round(log_marglik_regression(d, y, preds, prior), 3))

# the saturated evidence of the joint table is the sum of both pieces
joint = contingency_table(d, [0, 1, y])
print(np.isclose(log_marglik_saturated(joint),
                 log_marglik_regression(d, y, [0, 1]) + log_marglik_saturated(contingency_table(d, [0, 1]))))
