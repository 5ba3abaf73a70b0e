"""
Case-control data from a two-SNP logistic disease model with an
environmental factor:

    logit P(Y=1 | g1, g2, e) = b0 + b1 g1 + b2 g2 + b12 g1 g2 + b1e g1 e + b2e g2 e

Genotypes are minor-allele counts (0/1/2) drawn under Hardy-Weinberg
equilibrium, independently across SNPs. ``e`` is Bernoulli and is not part
of the output. Subjects are drawn until the case and control quotas are met.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Optional, Tuple

import numpy as np
from scipy.special import expit

from .core import Dataset


@dataclass(frozen=True)
class SimConfig:
    n_cases: int = 1000
    n_controls: int = 1000
    p: int = 100
    causal: Tuple[int, int] = (0, 1)
    intercept: float = -5.0
    beta_g1: float = 0.4
    beta_g2: float = 0.4
    beta_g1g2: float = 0.4
    beta_g1e: float = 0.4
    beta_g2e: float = 0.4
    e_prob: float = 0.5
    maf_range: Tuple[float, float] = (0.05, 0.5)
    causal_maf_range: Tuple[float, float] = (0.2, 0.4)
    seed: Optional[int] = None
    batch_size: int = 100_000
    max_draws: int = 50_000_000

    def __post_init__(self):
        object.__setattr__(self, "causal", tuple(int(c) for c in self.causal))
        object.__setattr__(self, "maf_range", tuple(self.maf_range))
        object.__setattr__(self, "causal_maf_range", tuple(self.causal_maf_range))
        if self.n_cases < 1 or self.n_controls < 1 or self.p < 1:
            raise ValueError("n_cases, n_controls and p must be positive")
        if len(self.causal) != 2 or len(set(self.causal)) != 2:
            raise ValueError("exactly two distinct causal SNPs are required")
        if not all(0 <= c < self.p for c in self.causal):
            raise ValueError("causal indices must be below p")
        for lo, hi in (self.maf_range, self.causal_maf_range):
            if not 0 <= lo <= hi <= 1:
                raise ValueError("MAF ranges must lie in [0, 1]")
        if not 0 <= self.e_prob <= 1:
            raise ValueError("e_prob must be a probability")

    @classmethod
    def from_json(cls, path: str, **overrides) -> "SimConfig":
        with open(path) as fh:
            cfg = json.load(fh)
        cfg.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**cfg)

    def to_dict(self) -> dict:
        return asdict(self)


def disease_probability(g1, g2, e, cfg: SimConfig = SimConfig()):
    """P(Y = 1) under the logistic disease model."""
    g1, g2, e = (np.asarray(v, dtype=float) for v in (g1, g2, e))
    eta = (cfg.intercept + cfg.beta_g1 * g1 + cfg.beta_g2 * g2 + cfg.beta_g1g2 * g1 * g2
           + cfg.beta_g1e * g1 * e + cfg.beta_g2e * g2 * e)
    return expit(eta)


def draw_subjects(cfg: SimConfig, n: int, maf: Tuple[float, float], rng):
    """Unconditioned draws of (g1, g2, e, y) for ``n`` subjects."""
    g1 = rng.binomial(2, maf[0], size=n)
    g2 = rng.binomial(2, maf[1], size=n)
    e = rng.binomial(1, cfg.e_prob, size=n)
    y = (rng.random(n) < disease_probability(g1, g2, e, cfg)).astype(np.int64)
    return g1, g2, e, y


def simulate_dataset(cfg: SimConfig = SimConfig(), rng=None) -> Dataset:
    """
    Draw a case-control sample with exactly ``n_cases`` ones and
    ``n_controls`` zeros in the response column (named ``aff``).
    """
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    mafs = rng.uniform(*cfg.maf_range, size=cfg.p)
    for c in cfg.causal:
        mafs[c] = rng.uniform(*cfg.causal_maf_range)
    causal_maf = (mafs[cfg.causal[0]], mafs[cfg.causal[1]])

    need = {1: cfg.n_cases, 0: cfg.n_controls}
    kept = []   # (g1, g2, y) per accepted batch, in draw order
    drawn = 0
    while need[0] or need[1]:
        if drawn >= cfg.max_draws:
            raise RuntimeError(
                f"quotas not met after {drawn} draws "
                f"({cfg.n_cases - need[1]} cases, {cfg.n_controls - need[0]} controls)"
            )
        g1, g2, _, y = draw_subjects(cfg, cfg.batch_size, causal_maf, rng)
        drawn += cfg.batch_size
        take = np.zeros(len(y), dtype=bool)
        for cls in (0, 1):
            idx = np.flatnonzero(y == cls)[: need[cls]]
            take[idx] = True
            need[cls] -= len(idx)
        kept.append((g1[take], g2[take], y[take]))

    g1 = np.concatenate([k[0] for k in kept])
    g2 = np.concatenate([k[1] for k in kept])
    y = np.concatenate([k[2] for k in kept])
    n = len(y)
    geno = rng.binomial(2, mafs, size=(n, cfg.p))
    geno[:, cfg.causal[0]] = g1
    geno[:, cfg.causal[1]] = g2
    names = tuple(f"snp{j + 1}" for j in range(cfg.p)) + ("aff",)
    return Dataset(names, (3,) * cfg.p + (2,), np.column_stack([geno, y]))
