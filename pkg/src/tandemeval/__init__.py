"""Joint security/privacy evaluation of CM-gated speaker verification."""

from .calibration import CalibrationMap, cllr, cllr_min, default_ece, ece, pav_calibrate
from .detmetrics import DetCurve, EerResult, OperatingPoint, det_curve, eer, error_rates
from .score_io import (
    ScoreRecord,
    TrialClass,
    TrialTable,
    join,
    parse_keys,
    parse_scores,
)
from .synthgen import ClassScoreSpec, SynthSpec, analytic_eer, generate
from .tandem import (
    AsvOperatingPoint,
    CascadeOutcome,
    CostModel,
    DEFAULT_COST_MODEL,
    TdcfCoefficients,
    asv_rates,
    cascade,
    empirical_tandem_cost,
    min_tdcf,
    privacy_report,
    tdcf_coefficients,
    tdcf_curve,
)
from .zebra import ZebraProfile, categorical_tag, population_disclosure, worst_case, zebra_profile

__version__ = "0.1.0"

__all__ = [
    "AsvOperatingPoint",
    "CalibrationMap",
    "CascadeOutcome",
    "ClassScoreSpec",
    "CostModel",
    "DEFAULT_COST_MODEL",
    "DetCurve",
    "EerResult",
    "OperatingPoint",
    "ScoreRecord",
    "SynthSpec",
    "TdcfCoefficients",
    "TrialClass",
    "TrialTable",
    "ZebraProfile",
    "analytic_eer",
    "asv_rates",
    "cascade",
    "categorical_tag",
    "cllr",
    "cllr_min",
    "default_ece",
    "det_curve",
    "ece",
    "eer",
    "empirical_tandem_cost",
    "error_rates",
    "generate",
    "join",
    "min_tdcf",
    "parse_keys",
    "parse_scores",
    "pav_calibrate",
    "population_disclosure",
    "privacy_report",
    "tdcf_coefficients",
    "tdcf_curve",
    "worst_case",
    "zebra_profile",
]
