"""
Stage 1: stochastic search over regressions.

With a dozen SNPs the 78 regressions with at most two predictors can be
scored exhaustively, so we can watch the shotgun search land on the same
answer while scoring only part of the space.
"""
# %%
from mossgwas import (PriorConfig, SearchConfig, SimConfig, exhaustive_regressions,
                      moss_stage1, posterior_inclusion_probs, simulate_dataset)
from mossgwas.stage1 import ScoreCache

d = simulate_dataset(SimConfig(n_cases=500, n_controls=500, p=12, causal=(3, 8), seed=7))
prior = PriorConfig()

truth = exhaustive_regressions(d, prior, max_predictors=2)
print("exhaustive best:", truth[0].formula(d.names, d.response_index), round(truth[0].score, 3))

# %%
cache = ScoreCache(d, prior)
found = moss_stage1(d, prior, SearchConfig(seed=1), cache=cache)
print(f"scored {len(cache)} of {len(truth)} regressions")
for r in found:
    print(r.formula(d.names, d.response_index).ljust(28), round(r.score, 3))

# %%
# inclusion probabilities are evidence-weighted frequencies over the retained list
for v, p in posterior_inclusion_probs(found).items():
    print(d.names[v], round(p, 4))

# %%
# confounders can be forced into every regression
forced = moss_stage1(d, prior, SearchConfig(maxVars=4, confVars=(0,), seed=1))
print([r.formula(d.names, d.response_index) for r in forced[:3]])
