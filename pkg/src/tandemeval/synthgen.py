"""Synthetic trial tables with analytically known operating characteristics.

Scores are Gaussian per class, CM and ASV drawn independently given the
class, from the portable SplitMix64/Box-Muller stream, so fixtures are
byte-identical for a given seed on every platform. For two equal-variance
Gaussians the EER is Phi(-(mu_pos - mu_neg) / (2 sigma)) with Phi the
standard normal CDF, giving every metric module an end-to-end oracle.

Draw order (fixed): for each class in (target, nontarget, spoof), the CM
scores, then the ASV scores. Trial ids are "syn-<class>-<index>".
"""

import math
from dataclasses import dataclass

from .rng import SplitMix64
from .score_io import ScoreRecord, TrialClass, TrialTable

_CLASS_ORDER = (TrialClass.TARGET, TrialClass.NONTARGET, TrialClass.SPOOF)


@dataclass(frozen=True)
class ClassScoreSpec:
    mu: float
    sigma: float
    n: int

    def validate(self):
        if self.sigma <= 0:
            raise ValueError(f"sigma must be > 0, got {self.sigma!r}")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n!r}")
        return self


@dataclass(frozen=True)
class SynthSpec:
    """Per-class CM and ASV score distributions plus the seed."""

    cm: dict
    asv: dict
    seed: int

    def validate(self):
        for side in (self.cm, self.asv):
            for cls in _CLASS_ORDER:
                if cls not in side:
                    raise ValueError(f"missing spec for class {cls.value}")
                side[cls].validate()
        for cls in _CLASS_ORDER:
            if self.cm[cls].n != self.asv[cls].n:
                raise ValueError(
                    f"cm/asv trial counts differ for class {cls.value}"
                )
        return self


def generate(spec):
    """Deterministic TrialTable for the given spec."""
    spec.validate()
    rng = SplitMix64(spec.seed)
    ids, classes, cm_scores, asv_scores = [], [], [], []
    for cls in _CLASS_ORDER:
        n = spec.cm[cls].n
        cm = spec.cm[cls].mu + spec.cm[cls].sigma * rng.normals(n)
        asv = spec.asv[cls].mu + spec.asv[cls].sigma * rng.normals(n)
        ids.extend(f"syn-{cls.value}-{i}" for i in range(n))
        classes.extend([cls] * n)
        cm_scores.extend(cm.tolist())
        asv_scores.extend(asv.tolist())
    return TrialTable(ids, classes, cm_scores, asv_scores)


def normal_cdf(x):
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def analytic_eer(mu_pos, mu_neg, sigma):
    """EER of two equal-variance Gaussians: Phi(-(mu_pos - mu_neg) / (2 sigma))."""
    if sigma <= 0:
        raise ValueError("sigma must be > 0")
    return normal_cdf(-(mu_pos - mu_neg) / (2.0 * sigma))


def score_records(table, side):
    """Canonical ScoreRecords for one side ("cm" or "asv") of a table."""
    scores = table.cm_scores if side == "cm" else table.asv_scores
    return [ScoreRecord(tid, float(s)) for tid, s in zip(table.trial_ids, scores)]


def spec_from_dict(d):
    """Build a SynthSpec from the CLI/config JSON shape.

    {"seed": 7, "classes": {"target": {"n": 100,
        "cm": {"mu": 1.0, "sigma": 1.0}, "asv": {"mu": 2.0, "sigma": 1.0}}, ...}}
    """
    classes = d["classes"]
    cm, asv = {}, {}
    for cls in _CLASS_ORDER:
        entry = classes[cls.value]
        n = int(entry["n"])
        cm[cls] = ClassScoreSpec(
            mu=float(entry["cm"]["mu"]), sigma=float(entry["cm"]["sigma"]), n=n
        )
        asv[cls] = ClassScoreSpec(
            mu=float(entry["asv"]["mu"]), sigma=float(entry["asv"]["sigma"]), n=n
        )
    return SynthSpec(cm=cm, asv=asv, seed=int(d["seed"])).validate()
