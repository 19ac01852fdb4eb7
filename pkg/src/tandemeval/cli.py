"""Command-line front end.

Subcommands: eer, cllr, zebra, tdcf, tandem, privacy-report, synth, recon.
Every command resolves its configuration from flags plus an optional JSON
config file (flags win), writes a JSON report and any CSV curves into the
output directory, and prints the report to stdout. Reports embed the
effective configuration and a format-version field and are byte-identical
across runs for identical inputs.

Exit codes: 0 success, 1 usage error, 2 data/validation error,
3 degenerate configuration.
"""

import argparse
import json
import os
import sys

from . import calibration, detmetrics, recon, reports, score_io, synthgen, tandem, zebra
from .errors import DegenerateConfigError, InputError, TandemEvalError

_COST_FIELDS = ("c_miss", "c_fa", "c_fa_spoof", "pi_tar", "pi_non", "pi_spoof")

_DEFAULTS = {
    "out": ".",
    "seed": 0,
    "asv_threshold": "eer",
    "strict_join": True,
    "asvspoof_cm": False,
    "label": "asv",
    "cm_threshold": None,
    "only_class": "all",
    "epochs": 200,
    "lr": 0.05,
    "batch_size": 8,
    "hidden": "",
    "penalty": "squared",
    "recon_weight": 1.0,
    "cos_weight": 1.0,
    "eval_pairs": None,
    "cm_scores": None,
    "asv_scores": None,
    "keys": None,
    "pairs": None,
}
_DEFAULTS.update({f: getattr(tandem.DEFAULT_COST_MODEL, f) for f in _COST_FIELDS})


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser():
    parser = _Parser(
        prog="tandemeval",
        description="Tandem countermeasure/speaker-verification evaluation toolkit.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = _Parser(add_help=False)
    common.add_argument("--cm-scores", help="countermeasure score file")
    common.add_argument("--asv-scores", help="speaker-verification score file")
    common.add_argument("--keys", help="trial key file (target|nontarget|spoof)")
    common.add_argument("--config", help="JSON config file; flags override it")
    common.add_argument("--out", help="output directory (default '.')")
    common.add_argument("--seed", type=int, help="RNG seed where applicable")
    common.add_argument(
        "--asv-threshold",
        help="ASV threshold: a number, or 'eer' for the ASV EER threshold (default)",
    )
    common.add_argument(
        "--strict-join",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="require identical trial-id sets across inputs (default on)",
    )
    common.add_argument(
        "--asvspoof-cm",
        action="store_true",
        default=None,
        help="read the CM file as 5-column ASVspoof-2019 style",
    )
    for field in _COST_FIELDS:
        common.add_argument(
            "--" + field.replace("_", "-"), type=float, help=f"cost model {field}"
        )

    sub.add_parser("eer", parents=[common], help="EER of the CM and ASV detectors")
    sub.add_parser("cllr", parents=[common], help="Cllr / Cllr_min of ASV scores")
    p = sub.add_parser("zebra", parents=[common], help="privacy disclosure profile")
    p.add_argument("--label", help="system name used in the rendered profile line")
    sub.add_parser("tdcf", parents=[common], help="normalized t-DCF sweep and minimum")
    sub.add_parser("tandem", parents=[common], help="full tandem evaluation report")
    p = sub.add_parser(
        "privacy-report", parents=[common], help="cascade outcome fractions"
    )
    p.add_argument("--cm-threshold", type=float, help="CM gate threshold (default: CM EER)")
    p.add_argument(
        "--only-class",
        choices=["all", "target", "nontarget", "spoof"],
        help="restrict reported rows to one class (thresholds still use the full table)",
    )
    sub.add_parser("synth", parents=[common], help="generate synthetic score/key files")
    p = sub.add_parser("recon", parents=[common], help="train the reconstruction attack")
    p.add_argument("--pairs", help="embedding pair file (training set)")
    p.add_argument("--eval-pairs", help="held-out pair file for error reporting")
    p.add_argument("--epochs", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--hidden", help="comma-separated hidden layer widths, e.g. 16,16")
    p.add_argument("--penalty", choices=["squared", "absolute"])
    p.add_argument("--recon-weight", type=float)
    p.add_argument("--cos-weight", type=float)
    return parser


def _resolve(args):
    """Merge flags over the config file over defaults."""
    file_cfg = {}
    if getattr(args, "config", None):
        if not os.path.exists(args.config):
            raise InputError(f"config file not found: {args.config}")
        with open(args.config, encoding="utf-8") as fh:
            try:
                file_cfg = json.load(fh)
            except json.JSONDecodeError as exc:
                raise InputError(f"config file {args.config}: {exc}")
    resolved = {}
    for key, default in _DEFAULTS.items():
        flag = getattr(args, key, None)
        if flag is not None:
            resolved[key] = flag
        elif key in file_cfg:
            resolved[key] = file_cfg[key]
        else:
            resolved[key] = default
    resolved["_file_cfg"] = file_cfg
    resolved["_cost_model_user_set"] = any(
        getattr(args, f, None) is not None or f in file_cfg for f in _COST_FIELDS
    )
    return resolved


def _cost_model(resolved):
    model = tandem.CostModel(**{f: float(resolved[f]) for f in _COST_FIELDS})
    model.validate()
    source = (
        "user-specified" if resolved["_cost_model_user_set"] else "illustrative-default"
    )
    return model, source


def _read_text(path, what):
    if path is None:
        raise UsageError(f"missing required input: {what}")
    if not os.path.exists(path):
        raise InputError(f"{what} file not found: {path}")
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _load_table(resolved):
    cm_text = _read_text(resolved["cm_scores"], "--cm-scores")
    asv_text = _read_text(resolved["asv_scores"], "--asv-scores")
    key_text = _read_text(resolved["keys"], "--keys")
    if resolved["asvspoof_cm"]:
        cm = score_io.parse_asvspoof_cm_scores(
            cm_text.splitlines(True), path=resolved["cm_scores"]
        )
    else:
        cm = score_io.parse_scores(cm_text.splitlines(True), path=resolved["cm_scores"])
    asv = score_io.parse_scores(asv_text.splitlines(True), path=resolved["asv_scores"])
    keys = score_io.parse_keys(key_text.splitlines(True), path=resolved["keys"])
    return score_io.join(cm, asv, keys, strict=resolved["strict_join"])


def _asv_threshold(resolved, table):
    raw = resolved["asv_threshold"]
    if isinstance(raw, str) and raw.lower() == "eer":
        return tandem.default_asv_threshold(table)
    try:
        return float(raw)
    except (TypeError, ValueError):
        raise UsageError(f"--asv-threshold must be a number or 'eer', got {raw!r}")


def _base_config(resolved):
    return {
        "cm_scores": resolved["cm_scores"],
        "asv_scores": resolved["asv_scores"],
        "keys": resolved["keys"],
        "strict_join": bool(resolved["strict_join"]),
        "asvspoof_cm": bool(resolved["asvspoof_cm"]),
        "asv_threshold": resolved["asv_threshold"],
        "out": resolved["out"],
    }


def _report_skeleton(resolved):
    return {
        "format_version": reports.FORMAT_VERSION,
        "config": _base_config(resolved),
    }


def _cost_model_dict(model, source):
    d = model.as_dict()
    d["source"] = source
    return d


def cmd_eer(resolved):
    table = _load_table(resolved)
    report = _report_skeleton(resolved)
    artifacts = []
    table.require_classes()
    asv_eer = detmetrics.eer(table.asv_target(), table.asv_nontarget())
    report["eer_asv"] = {"eer": asv_eer.eer, "threshold": asv_eer.threshold}
    artifacts.append(
        (
            "det_asv.csv",
            detmetrics.det_curve_csv(
                detmetrics.det_curve(table.asv_target(), table.asv_nontarget())
            ),
        )
    )
    if table.n_spoof > 0:
        cm_eer = detmetrics.eer(table.cm_bonafide(), table.cm_spoof())
        report["eer_cm"] = {"eer": cm_eer.eer, "threshold": cm_eer.threshold}
        artifacts.append(
            (
                "det_cm.csv",
                detmetrics.det_curve_csv(
                    detmetrics.det_curve(table.cm_bonafide(), table.cm_spoof())
                ),
            )
        )
    else:
        report["eer_cm"] = None
    return report, artifacts, "eer.json"


def cmd_cllr(resolved):
    table = _load_table(resolved)
    table.require_classes()
    tar, non = table.asv_target(), table.asv_nontarget()
    report = _report_skeleton(resolved)
    report["cllr"] = calibration.cllr(tar, non)
    report["cllr_min"] = calibration.cllr_min(tar, non)
    rows = calibration.ece_curve(tar, non)
    return report, [("ece_curve.csv", calibration.ece_curve_csv(rows))], "cllr.json"


def cmd_zebra(resolved):
    table = _load_table(resolved)
    table.require_classes()
    profile = zebra.zebra_profile(table.asv_target(), table.asv_nontarget())
    report = _report_skeleton(resolved)
    report.update(zebra.profile_dict(profile))
    report["rendered"] = zebra.render_profile(resolved["label"], profile)
    return report, [], "zebra.json"


def cmd_tdcf(resolved):
    table = _load_table(resolved)
    model, source = _cost_model(resolved)
    t_asv = _asv_threshold(resolved, table)
    curve = tandem.tdcf_curve(table, model, t_asv)
    value, theta = tandem.min_tdcf(table, model, t_asv)
    report = _report_skeleton(resolved)
    report["cost_model"] = _cost_model_dict(model, source)
    report["asv_operating_point"] = curve.asv_point.as_dict()
    report["coefficients"] = {
        "c0": curve.coefficients.c0,
        "c1": curve.coefficients.c1,
        "c2": curve.coefficients.c2,
    }
    report["min_t_dcf"] = value
    report["theta_star"] = theta
    report["uninformative_baseline"] = 1.0
    return report, [("tdcf_curve.csv", tandem.tdcf_curve_csv(curve))], "tdcf.json"


def cmd_tandem(resolved):
    table = _load_table(resolved)
    model, source = _cost_model(resolved)
    t_asv = _asv_threshold(resolved, table)
    curve = tandem.tdcf_curve(table, model, t_asv)
    value, theta = tandem.min_tdcf(table, model, t_asv)
    cm_eer = detmetrics.eer(table.cm_bonafide(), table.cm_spoof())
    asv_eer = detmetrics.eer(table.asv_target(), table.asv_nontarget())
    privacy = tandem.privacy_report(table, theta, t_asv)
    report = _report_skeleton(resolved)
    report["cost_model"] = _cost_model_dict(model, source)
    report["asv_operating_point"] = curve.asv_point.as_dict()
    report["min_t_dcf"] = value
    report["theta_star"] = theta
    report["eer_cm"] = {"eer": cm_eer.eer, "threshold": cm_eer.threshold}
    report["eer_asv"] = {"eer": asv_eer.eer, "threshold": asv_eer.threshold}
    report["privacy_report"] = privacy.as_dict()
    return report, [("tdcf_curve.csv", tandem.tdcf_curve_csv(curve))], "tandem.json"


def cmd_privacy_report(resolved):
    table = _load_table(resolved)
    theta_cm = resolved["cm_threshold"]
    if theta_cm is None:
        table.require_classes(spoof=True)
        theta_cm = detmetrics.eer(table.cm_bonafide(), table.cm_spoof()).threshold
    theta_asv = _asv_threshold(resolved, table)
    only = resolved["only_class"]
    rows = table if only == "all" else table.subset(score_io.TrialClass(only))
    privacy = tandem.privacy_report(rows, float(theta_cm), theta_asv)
    report = _report_skeleton(resolved)
    report["only_class"] = only
    report["privacy_report"] = privacy.as_dict()
    return report, [], "privacy_report.json"


def cmd_synth(resolved):
    file_cfg = resolved["_file_cfg"]
    if "classes" not in file_cfg:
        raise UsageError("synth needs --config with a 'classes' section")
    spec_dict = {"seed": resolved["seed"], "classes": file_cfg["classes"]}
    spec = synthgen.spec_from_dict(spec_dict)
    table = synthgen.generate(spec)
    keys = {tid: table.class_of(i) for i, tid in enumerate(table.trial_ids)}
    artifacts = [
        ("cm_scores.txt", score_io.serialize_scores(synthgen.score_records(table, "cm"))),
        ("asv_scores.txt", score_io.serialize_scores(synthgen.score_records(table, "asv"))),
        ("keys.txt", score_io.serialize_keys(keys)),
    ]
    report = {
        "format_version": reports.FORMAT_VERSION,
        "config": {"seed": spec.seed, "classes": file_cfg["classes"], "out": resolved["out"]},
        "n_trials": len(table),
        "files": [name for name, _ in artifacts],
    }
    return report, artifacts, "synth.json"


def cmd_recon(resolved):
    pairs = recon.parse_pairs(
        _read_text(resolved["pairs"], "--pairs").splitlines(True),
        path=resolved["pairs"],
    )
    eval_pairs = pairs
    if resolved["eval_pairs"]:
        eval_pairs = recon.parse_pairs(
            _read_text(resolved["eval_pairs"], "--eval-pairs").splitlines(True),
            path=resolved["eval_pairs"],
        )
    hidden = tuple(
        int(tok) for tok in str(resolved["hidden"]).split(",") if tok.strip()
    )
    result = recon.train(
        pairs,
        epochs=int(resolved["epochs"]),
        lr=float(resolved["lr"]),
        batch_size=int(resolved["batch_size"]),
        seed=int(resolved["seed"]),
        hidden=hidden,
        recon_weight=float(resolved["recon_weight"]),
        cos_weight=float(resolved["cos_weight"]),
        penalty=resolved["penalty"],
    )
    report = {
        "format_version": reports.FORMAT_VERSION,
        "config": {
            "pairs": resolved["pairs"],
            "eval_pairs": resolved["eval_pairs"],
            "epochs": int(resolved["epochs"]),
            "lr": float(resolved["lr"]),
            "batch_size": int(resolved["batch_size"]),
            "hidden": list(hidden),
            "penalty": resolved["penalty"],
            "recon_weight": float(resolved["recon_weight"]),
            "cos_weight": float(resolved["cos_weight"]),
            "seed": int(resolved["seed"]),
            "out": resolved["out"],
        },
        "initial_loss": result.initial_loss,
        "final_loss": result.final_loss,
        "baseline_error": recon.baseline_error(eval_pairs),
        "reconstruction_error": recon.mean_reconstruction_error(result.net, eval_pairs),
        "epochs_run": result.epochs_run,
    }
    net_json = json.dumps(result.net.to_dict(), indent=2) + "\n"
    return report, [("recon_net.json", net_json)], "recon.json"


_COMMANDS = {
    "eer": cmd_eer,
    "cllr": cmd_cllr,
    "zebra": cmd_zebra,
    "tdcf": cmd_tdcf,
    "tandem": cmd_tandem,
    "privacy-report": cmd_privacy_report,
    "synth": cmd_synth,
    "recon": cmd_recon,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        resolved = _resolve(args)
        report, artifacts, report_name = _COMMANDS[args.command](resolved)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except DegenerateConfigError as exc:
        print(f"degenerate configuration: {exc}", file=sys.stderr)
        return 3
    except TandemEvalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    out_dir = resolved["out"]
    os.makedirs(out_dir, exist_ok=True)
    rendered = reports.render_json(report)
    with open(os.path.join(out_dir, report_name), "w", encoding="utf-8") as fh:
        fh.write(rendered)
    for name, text in artifacts:
        with open(os.path.join(out_dir, name), "w", encoding="utf-8") as fh:
            fh.write(text)
    sys.stdout.write(rendered)
    return 0


def entrypoint():
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
