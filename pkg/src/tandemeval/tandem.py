"""Countermeasure-gated speaker verification: cascade costs and t-DCF.

The system under evaluation places a spoofing countermeasure (CM) in front
of the speaker verifier (ASV): a trial is first screened by the CM and
reaches the ASV only if its CM score passes the CM threshold. Three
outcomes exist per trial: rejected by the CM, rejected by the ASV, or
accepted.

Two cost views are exposed and kept distinct:

  - empirical_tandem_cost runs every trial through the cascade at a fixed
    threshold pair and prices the three error events directly;
  - the t-DCF factorization assumes CM and ASV scores are independent given
    the trial class (the two subsystems are developed and measured in
    isolation), which collapses the expected cascade cost to
        c0 + c1 * P_miss_cm(s) + c2 * P_fa_cm(s)
    as a function of the CM threshold s alone, with ASV behavior frozen at
    one operating point:
        c0 = pi_tar*c_miss*p_miss_asv + pi_non*c_fa*p_fa_asv
        c1 = pi_tar*c_miss*(1 - p_miss_asv) - pi_non*c_fa*p_fa_asv
        c2 = pi_spoof*c_fa_spoof*p_fa_spoof_asv

CM error roles: a CM "miss" rejects a bona fide trial (target or
nontarget; both share the bona fide accept rate), a CM "false alarm"
passes a spoof onward. Normalization divides by c0 + min(c1, c2), the best
cost achievable with an uninformative CM, so a normalized value of 1.0
means the CM contributes nothing and larger values mean it actively hurts.
c1 <= 0 or c2 <= 0 leaves nothing for the CM to trade off and the
normalized metric undefined (degenerate configuration).

All operations are pure over immutable tables.
"""

import enum
from dataclasses import dataclass

import numpy as np

from . import detmetrics
from .errors import DegenerateConfigError, EmptyTableError
from .score_io import TrialClass


@dataclass(frozen=True)
class CostModel:
    """Six-parameter cost/prior model of the deployment environment."""

    c_miss: float
    c_fa: float
    c_fa_spoof: float
    pi_tar: float
    pi_non: float
    pi_spoof: float

    def validate(self):
        for name in ("c_miss", "c_fa", "c_fa_spoof"):
            if getattr(self, name) <= 0:
                raise DegenerateConfigError(f"{name} must be > 0")
        for name in ("pi_tar", "pi_non", "pi_spoof"):
            if getattr(self, name) < 0:
                raise DegenerateConfigError(f"{name} must be >= 0")
        total = self.pi_tar + self.pi_non + self.pi_spoof
        if abs(total - 1.0) > 1e-9:
            raise DegenerateConfigError(
                f"priors must sum to 1 (got {total!r})"
            )
        return self

    def as_dict(self):
        return {
            "c_miss": self.c_miss,
            "c_fa": self.c_fa,
            "c_fa_spoof": self.c_fa_spoof,
            "pi_tar": self.pi_tar,
            "pi_non": self.pi_non,
            "pi_spoof": self.pi_spoof,
        }


# Illustrative default: an access-control setting where genuine users and
# spoofing attacks are about equally common, zero-effort impostors are rare,
# and any false acceptance costs ten times a false rejection. Reports must
# label these values as illustrative defaults, not benchmark-prescribed ones.
DEFAULT_COST_MODEL = CostModel(
    c_miss=1.0,
    c_fa=10.0,
    c_fa_spoof=10.0,
    pi_tar=0.475,
    pi_non=0.05,
    pi_spoof=0.475,
)


@dataclass(frozen=True)
class AsvOperatingPoint:
    """ASV error rates measured at one fixed ASV threshold."""

    threshold: float
    p_miss_asv: float
    p_fa_asv: float
    p_fa_spoof_asv: float

    def as_dict(self):
        return {
            "threshold": self.threshold,
            "p_miss": self.p_miss_asv,
            "p_fa": self.p_fa_asv,
            "p_fa_spoof": self.p_fa_spoof_asv,
        }


@dataclass(frozen=True)
class TdcfCoefficients:
    c0: float
    c1: float
    c2: float

    @property
    def default_cost(self):
        return self.c0 + min(self.c1, self.c2)


class CascadeOutcome(enum.Enum):
    REJECTED_BY_CM = "rejected_by_cm"
    REJECTED_BY_ASV = "rejected_by_asv"
    ACCEPTED = "accepted"


def asv_rates(table, t_asv):
    """ASV operating point on the table's target/nontarget/spoof rows."""
    table.require_classes(spoof=True)
    p_miss = np.count_nonzero(table.asv_target() < t_asv) / table.n_target
    p_fa = np.count_nonzero(table.asv_nontarget() >= t_asv) / table.n_nontarget
    p_fa_spoof = np.count_nonzero(table.asv_spoof() >= t_asv) / table.n_spoof
    return AsvOperatingPoint(
        threshold=float(t_asv),
        p_miss_asv=float(p_miss),
        p_fa_asv=float(p_fa),
        p_fa_spoof_asv=float(p_fa_spoof),
    )


def cascade(cm_score, asv_score, theta_cm, theta_asv):
    """Route one trial through the CM gate, then the ASV."""
    if cm_score < theta_cm:
        return CascadeOutcome.REJECTED_BY_CM
    if asv_score < theta_asv:
        return CascadeOutcome.REJECTED_BY_ASV
    return CascadeOutcome.ACCEPTED


def _accept_mask(table, theta_cm, theta_asv):
    return (table.cm_scores >= theta_cm) & (table.asv_scores >= theta_asv)


def empirical_tandem_cost(table, theta_cm, theta_asv, cost_model):
    """Expected cascade cost priced directly from per-trial outcomes.

    pi_tar*c_miss*P(target not accepted) + pi_non*c_fa*P(nontarget accepted)
    + pi_spoof*c_fa_spoof*P(spoof accepted), probabilities as per-class
    empirical fractions.
    """
    cost_model.validate()
    table.require_classes(spoof=True)
    accepted = _accept_mask(table, theta_cm, theta_asv)
    p_tar_rejected = 1.0 - (
        np.count_nonzero(accepted[table.mask(TrialClass.TARGET)]) / table.n_target
    )
    p_non_accepted = (
        np.count_nonzero(accepted[table.mask(TrialClass.NONTARGET)])
        / table.n_nontarget
    )
    p_spoof_accepted = (
        np.count_nonzero(accepted[table.mask(TrialClass.SPOOF)]) / table.n_spoof
    )
    return float(
        cost_model.pi_tar * cost_model.c_miss * p_tar_rejected
        + cost_model.pi_non * cost_model.c_fa * p_non_accepted
        + cost_model.pi_spoof * cost_model.c_fa_spoof * p_spoof_accepted
    )


def tdcf_coefficients(cost_model, asv_point):
    """Constants of the factorized t-DCF; raises on degenerate configurations."""
    cost_model.validate()
    c0 = (
        cost_model.pi_tar * cost_model.c_miss * asv_point.p_miss_asv
        + cost_model.pi_non * cost_model.c_fa * asv_point.p_fa_asv
    )
    c1 = (
        cost_model.pi_tar * cost_model.c_miss * (1.0 - asv_point.p_miss_asv)
        - cost_model.pi_non * cost_model.c_fa * asv_point.p_fa_asv
    )
    c2 = cost_model.pi_spoof * cost_model.c_fa_spoof * asv_point.p_fa_spoof_asv
    if c1 <= 0.0:
        raise DegenerateConfigError(
            f"t-DCF coefficient c1 = {c1!r} <= 0: the ASV operating point "
            "leaves the CM no bona fide trials worth admitting"
        )
    if c2 <= 0.0:
        raise DegenerateConfigError(
            f"t-DCF coefficient c2 = {c2!r} <= 0: the ASV never accepts a "
            "spoof, so the CM threshold has no effect on spoof cost"
        )
    return TdcfCoefficients(c0=float(c0), c1=float(c1), c2=float(c2))


@dataclass(frozen=True)
class TdcfCurve:
    """Normalized t-DCF against the CM threshold sweep."""

    thresholds: np.ndarray
    p_miss_cm: np.ndarray
    p_fa_cm: np.ndarray
    t_dcf_norm: np.ndarray
    coefficients: TdcfCoefficients
    asv_point: AsvOperatingPoint


def tdcf_curve(table, cost_model, t_asv):
    """Sweep the CM threshold over bona fide vs spoof CM scores."""
    asv_point = asv_rates(table, t_asv)
    coeff = tdcf_coefficients(cost_model, asv_point)
    curve = detmetrics.det_curve(table.cm_bonafide(), table.cm_spoof())
    t_dcf = coeff.c0 + coeff.c1 * curve.p_miss + coeff.c2 * curve.p_fa
    return TdcfCurve(
        thresholds=curve.thresholds,
        p_miss_cm=curve.p_miss,
        p_fa_cm=curve.p_fa,
        t_dcf_norm=t_dcf / coeff.default_cost,
        coefficients=coeff,
        asv_point=asv_point,
    )


def min_tdcf(table, cost_model, t_asv):
    """Minimum normalized t-DCF and the CM threshold achieving it."""
    curve = tdcf_curve(table, cost_model, t_asv)
    idx = int(np.argmin(curve.t_dcf_norm))
    return float(curve.t_dcf_norm[idx]), float(curve.thresholds[idx])


def default_asv_threshold(table):
    """EER threshold of the ASV on (target, nontarget) scores."""
    table.require_classes()
    return detmetrics.eer(table.asv_target(), table.asv_nontarget()).threshold


@dataclass(frozen=True)
class PrivacyReport:
    """Outcome fractions for a (typically anonymized) trial population.

    accepted      -> the speaker is verified despite the transformation
    rejected_by_asv -> unlinkable to the claimed speaker but passes the gate
    rejected_by_cm  -> blocked as a spoofing artifact before verification
    """

    accepted: float
    rejected_by_asv: float
    rejected_by_cm: float
    theta_cm: float
    theta_asv: float
    n_trials: int

    def as_dict(self):
        return {
            "accepted": self.accepted,
            "rejected_by_asv": self.rejected_by_asv,
            "rejected_by_cm": self.rejected_by_cm,
            "theta_cm": self.theta_cm,
            "theta_asv": self.theta_asv,
            "n_trials": self.n_trials,
        }


def privacy_report(table, theta_cm, theta_asv):
    """Fractions of the three cascade outcomes over all rows of the table."""
    if len(table) == 0:
        raise EmptyTableError("privacy report on an empty table")
    rej_cm = table.cm_scores < theta_cm
    rej_asv = ~rej_cm & (table.asv_scores < theta_asv)
    n = len(table)
    n_rej_cm = int(np.count_nonzero(rej_cm))
    n_rej_asv = int(np.count_nonzero(rej_asv))
    return PrivacyReport(
        accepted=float((n - n_rej_cm - n_rej_asv) / n),
        rejected_by_asv=float(n_rej_asv / n),
        rejected_by_cm=float(n_rej_cm / n),
        theta_cm=float(theta_cm),
        theta_asv=float(theta_asv),
        n_trials=n,
    )


def tdcf_curve_csv(curve):
    """CSV export, header theta_cm,p_miss_cm,p_fa_cm,t_dcf_norm."""
    lines = ["theta_cm,p_miss_cm,p_fa_cm,t_dcf_norm"]
    for t, pm, pf, v in zip(
        curve.thresholds, curve.p_miss_cm, curve.p_fa_cm, curve.t_dcf_norm
    ):
        lines.append(f"{t:.9g},{pm:.9g},{pf:.9g},{v:.9g}")
    return "\n".join(lines) + "\n"
