"""
Stage 2: hierarchical log-linear models for one regression.

The winning regression's table is searched over hierarchical models. On
three variables the space has nine members, small enough to list.
"""
# %%
from mossgwas import (GeneratingClass, PriorConfig, SearchConfig, SimConfig, contingency_table,
                      dual_generators, enumerate_models, fit_posterior_mode, log_marglik_loglinear,
                      model_neighborhood, moss_stage2, simulate_dataset)

d = simulate_dataset(SimConfig(n_cases=1000, n_controls=1000, p=10, causal=(2, 5), seed=3))
names = dict(enumerate(d.names))
t = contingency_table(d, [2, 5, d.response_index])

m = GeneratingClass.main_effects(t.variables)
print("dual generators of", m.formula(names), "->", dual_generators(m))
print("neighbours:", [nb.formula(names) for nb in model_neighborhood(m)])

# %%
for model in sorted(enumerate_models(t.variables), key=lambda g: -log_marglik_loglinear(t, g)):
    print(model.formula(names).ljust(36), round(log_marglik_loglinear(t, model), 3))

# %%
res = moss_stage2(t, PriorConfig(), SearchConfig(seed=0))
print("search picks", res.best.formula(names))

fit = fit_posterior_mode(t, res.best)
for name, value in fit.coefficients(d.names).items():
    print(name.ljust(14), f"{value: .4f}")
