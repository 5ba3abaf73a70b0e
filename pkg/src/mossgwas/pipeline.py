"""
End-to-end two-stage analysis and its report.

``moss_gwas`` runs the regression search, and when ``k`` is given also the
log-linear search for every retained regression, posterior-mode fits and
cross-validation of the averaged classifier.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict
from typing import Any, Dict, List, Optional

import numpy as np

from .core import Dataset, contingency_table
from .evidence import PriorConfig
from .loglin import ConvergenceError, fit_posterior_mode
from .predict import cross_validate
from .stage1 import SearchConfig, default_threads, moss_stage1, posterior_inclusion_probs
from .stage2 import moss_stage2

logger = logging.getLogger(__name__)


class NumericalFailure(ArithmeticError):
    """Every log-linear model search failed."""


@dataclass
class RunReport:
    topRegressions: List[Dict[str, Any]]
    postIncProbs: List[Dict[str, Any]]
    interactionModels: Optional[List[Dict[str, Any]]] = None
    fits: Optional[List[Dict[str, Any]]] = None
    cvMatrix: Optional[List[List[int]]] = None
    cvDiag: Optional[Dict[str, float]] = None
    failures: List[str] = field(default_factory=list)
    provenance: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {k: v for k, v in asdict(self).items() if v is not None}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_text(self) -> str:
        return render_text(self)


def moss_gwas(
    data: Dataset,
    prior: PriorConfig = PriorConfig(),
    cfg: SearchConfig = SearchConfig(),
    k: Optional[int] = None,
    threads: Optional[int] = None,
) -> RunReport:
    """Run the two-stage search (and cross-validation when ``k`` is set)."""
    from . import __version__

    threads = threads or default_threads()
    seq = np.random.SeedSequence(cfg.seed)
    s1, s2, s3 = seq.spawn(3)
    names = data.names
    y = data.response_index

    regs = moss_stage1(data, prior, cfg, np.random.default_rng(s1), threads=threads)
    pip = posterior_inclusion_probs(regs)
    report = RunReport(
        topRegressions=[{"formula": r.formula(names, y), "logMargLik": r.score} for r in regs],
        postIncProbs=[{"variable": names[v], "postIncProb": p} for v, p in pip.items()],
        provenance={
            "version": __version__,
            "seed": cfg.seed,
            "config": {"alpha": prior.alpha, "c": cfg.c, "cPrime": cfg.cPrime, "q": cfg.q,
                       "replicates": cfg.replicates, "maxVars": cfg.maxVars,
                       "confVars": [names[v] for v in cfg.confVars], "k": k},
            "n": data.n,
            "n_dropped": data.n_dropped,
        },
    )
    if data.label_maps:
        report.provenance["label_maps"] = data.label_maps
    if k is None:
        return report

    streams = s2.spawn(len(regs))

    def search(i):
        r = regs[i]
        table = contingency_table(data, list(r.predictors) + [y])
        try:
            res = moss_stage2(table, prior, cfg, np.random.default_rng(streams[i]))
            fit = fit_posterior_mode(table, res.best, prior)
        except ConvergenceError as err:
            return r, None, None, str(err)
        return r, res, fit, None

    if threads > 1 and len(regs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(search, range(len(regs))))
    else:
        results = [search(i) for i in range(len(regs))]

    interaction, fits, structure = [], [], []
    for r, res, fit, err in results:
        if err is not None:
            report.failures.append(f"{r.formula(names, y)}: {err}")
            logger.warning("log-linear search failed for %s: %s", r.formula(names, y), err)
            continue
        formula = res.best.formula(names)
        interaction.append({"regression": r.formula(names, y), "formula": formula,
                            "logMargLik": res.score})
        fits.append({"formula": formula, "coefficients": fit.coefficients(names)})
        structure.append((res.best, r.score))
    if not structure:
        raise NumericalFailure("log-linear search failed for every regression")
    report.interactionModels = interaction
    report.fits = fits
    cv = cross_validate(data, structure, prior, k, np.random.default_rng(s3))
    report.cvMatrix = cv.confusion.tolist()
    report.cvDiag = cv.diag()
    return report


def _table(headers, rows) -> str:
    widths = [max(len(str(x)) for x in col) for col in zip(headers, *rows)]
    iw = len(str(len(rows)))
    lines = [" " * iw + " " + " ".join(h.rjust(w) for h, w in zip(headers, widths))]
    for i, row in enumerate(rows, 1):
        lines.append(str(i).ljust(iw) + " " + " ".join(str(x).rjust(w) for x, w in zip(row, widths)))
    return "\n".join(lines)


def render_text(report: RunReport) -> str:
    """Plain-text rendering in the section layout of the R package's printout."""
    out = ["$topRegressions",
           _table(["formula", "logMargLik"],
                  [[r["formula"], f"{r['logMargLik']:.3f}"] for r in report.topRegressions]),
           "",
           "$postIncProbs",
           _table(["variable", "postIncProb"],
                  [[p["variable"], f"{p['postIncProb']:.4g}"] for p in report.postIncProbs]),
           ""]
    if report.interactionModels is not None:
        out += ["$interactionModels",
                _table(["formula", "logMargLik"],
                       [[m["formula"], f"{m['logMargLik']:.2f}"] for m in report.interactionModels]),
                "",
                "$fits"]
        for i, f in enumerate(report.fits, 1):
            out += [f"$fits[[{i}]]", "", f'Call:  "{f["formula"]}"', "", "Coefficients:"]
            items = list(f["coefficients"].items())
            for j in range(0, len(items), 4):
                chunk = items[j:j + 4]
                w = [max(len(n), 10) for n, _ in chunk]
                out.append(" ".join(n.rjust(x) for (n, _), x in zip(chunk, w)))
                out.append(" ".join(f"{v:.4f}".rjust(x) for (_, v), x in zip(chunk, w)))
            out.append("")
    if report.cvMatrix is not None:
        m = report.cvMatrix
        out += ["$cvMatrix",
                "     decision",
                "pheno " + " ".join(str(x).rjust(5) for x in (0, 1)),
                "    0 " + " ".join(str(x).rjust(5) for x in m[0]),
                "    1 " + " ".join(str(x).rjust(5) for x in m[1]),
                "",
                "$cvDiag",
                _table(["acc", "tpr", "fpr", "auc"],
                       [[f"{report.cvDiag[k]:.1f}" for k in ("acc", "tpr", "fpr", "auc")]]),
                ""]
    if report.failures:
        out += ["$failures"] + report.failures + [""]
    return "\n".join(out) + "\n"
