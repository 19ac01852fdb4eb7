import numpy as np
import pytest

from tandemeval import detmetrics, tandem
from tandemeval.errors import DegenerateConfigError, EmptyClassError, EmptyTableError
from tandemeval.score_io import TrialClass, TrialTable
from tandemeval.tandem import AsvOperatingPoint, CascadeOutcome, CostModel

EXAMPLE_MODEL = CostModel(
    c_miss=1.0, c_fa=10.0, c_fa_spoof=10.0, pi_tar=0.5, pi_non=0.25, pi_spoof=0.25
)
EXAMPLE_ASV = AsvOperatingPoint(
    threshold=0.0, p_miss_asv=0.1, p_fa_asv=0.05, p_fa_spoof_asv=0.6
)


def make_table(rows):
    """rows: list of (TrialClass, cm_score, asv_score)."""
    return TrialTable(
        [f"t{i:03d}" for i in range(len(rows))],
        [r[0] for r in rows],
        [r[1] for r in rows],
        [r[2] for r in rows],
    )


def expanded_cascade_cost(model, asv, p_miss_cm, p_fa_cm):
    """Direct expansion of the class-conditional cascade expectation."""
    return (
        model.pi_tar
        * model.c_miss
        * (p_miss_cm + (1 - p_miss_cm) * asv.p_miss_asv)
        + model.pi_non * model.c_fa * (1 - p_miss_cm) * asv.p_fa_asv
        + model.pi_spoof * model.c_fa_spoof * p_fa_cm * asv.p_fa_spoof_asv
    )


class TestCostModel:
    def test_default_priors_sum_to_one(self):
        tandem.DEFAULT_COST_MODEL.validate()

    def test_bad_prior_sum(self):
        with pytest.raises(DegenerateConfigError):
            CostModel(1, 10, 10, 0.5, 0.2, 0.2).validate()

    def test_nonpositive_cost(self):
        with pytest.raises(DegenerateConfigError):
            CostModel(0, 10, 10, 0.5, 0.25, 0.25).validate()

    def test_negative_prior(self):
        with pytest.raises(DegenerateConfigError):
            CostModel(1, 10, 10, 1.2, -0.1, -0.1).validate()


class TestAsvRates:
    def test_perfect_asv(self):
        table = make_table(
            [
                (TrialClass.TARGET, 0.0, 2.0),
                (TrialClass.NONTARGET, 0.0, -2.0),
                (TrialClass.SPOOF, 0.0, -3.0),
            ]
        )
        point = tandem.asv_rates(table, 0.0)
        assert (point.p_miss_asv, point.p_fa_asv, point.p_fa_spoof_asv) == (0, 0, 0)

    def test_accept_all(self):
        table = make_table(
            [
                (TrialClass.TARGET, 0.0, 2.0),
                (TrialClass.NONTARGET, 0.0, -2.0),
                (TrialClass.SPOOF, 0.0, -3.0),
            ]
        )
        point = tandem.asv_rates(table, -10.0)
        assert (point.p_miss_asv, point.p_fa_asv, point.p_fa_spoof_asv) == (0, 1, 1)

    def test_hand_counted_fixture(self):
        table = make_table(
            [
                (TrialClass.TARGET, 0.0, 1.0),
                (TrialClass.TARGET, 0.0, -1.0),
                (TrialClass.NONTARGET, 0.0, -0.5),
                (TrialClass.NONTARGET, 0.0, -2.0),
                (TrialClass.SPOOF, 0.0, 2.0),
                (TrialClass.SPOOF, 0.0, 1.0),
            ]
        )
        point = tandem.asv_rates(table, 0.0)
        assert point.p_miss_asv == 0.5  # one of two targets below 0
        assert point.p_fa_asv == 0.0  # no nontarget at/above 0
        assert point.p_fa_spoof_asv == 1.0  # both spoofs at/above 0

    def test_missing_class(self):
        table = make_table([(TrialClass.TARGET, 0.0, 1.0)])
        with pytest.raises(EmptyClassError):
            tandem.asv_rates(table, 0.0)


class TestCascade:
    def test_accepted(self):
        assert tandem.cascade(1.0, 1.0, 0.0, 0.0) is CascadeOutcome.ACCEPTED

    def test_cm_gate_blocks_before_asv(self):
        assert tandem.cascade(-1.0, 99.0, 0.0, 0.0) is CascadeOutcome.REJECTED_BY_CM

    def test_rejected_by_asv(self):
        assert tandem.cascade(1.0, -1.0, 0.0, 0.0) is CascadeOutcome.REJECTED_BY_ASV


class TestEmpiricalTandemCost:
    def test_perfect_table_is_free(self):
        table = make_table(
            [
                (TrialClass.TARGET, 1.0, 1.0),
                (TrialClass.NONTARGET, 1.0, -1.0),
                (TrialClass.SPOOF, -1.0, 1.0),
            ]
        )
        assert tandem.empirical_tandem_cost(table, 0.0, 0.0, EXAMPLE_MODEL) == 0.0

    def test_cm_rejects_everything(self):
        table = make_table(
            [
                (TrialClass.TARGET, 1.0, 1.0),
                (TrialClass.NONTARGET, 1.0, -1.0),
                (TrialClass.SPOOF, -1.0, 1.0),
            ]
        )
        cost = tandem.empirical_tandem_cost(table, 10.0, 0.0, EXAMPLE_MODEL)
        assert cost == EXAMPLE_MODEL.pi_tar * EXAMPLE_MODEL.c_miss

    def test_six_row_fixture_hand_enumeration(self):
        # outcomes at (0, 0): accepted, rej-CM, accepted, rej-ASV, accepted, rej-CM
        table = make_table(
            [
                (TrialClass.TARGET, 1.0, 1.0),
                (TrialClass.TARGET, -1.0, 1.0),
                (TrialClass.NONTARGET, 1.0, 1.0),
                (TrialClass.NONTARGET, 1.0, -1.0),
                (TrialClass.SPOOF, 1.0, 1.0),
                (TrialClass.SPOOF, -1.0, -1.0),
            ]
        )
        # 0.5*1*(1/2) + 0.25*10*(1/2) + 0.25*10*(1/2) = 2.75
        cost = tandem.empirical_tandem_cost(table, 0.0, 0.0, EXAMPLE_MODEL)
        assert cost == pytest.approx(2.75, abs=1e-15)


class TestTdcfCoefficients:
    def test_worked_example(self):
        coeff = tandem.tdcf_coefficients(EXAMPLE_MODEL, EXAMPLE_ASV)
        assert coeff.c0 == pytest.approx(0.175, abs=1e-15)
        assert coeff.c1 == pytest.approx(0.325, abs=1e-15)
        assert coeff.c2 == pytest.approx(1.5, abs=1e-15)

    def test_perfect_asv_degenerates_c2(self):
        perfect = AsvOperatingPoint(0.0, 0.0, 0.0, 0.0)
        with pytest.raises(DegenerateConfigError) as err:
            tandem.tdcf_coefficients(EXAMPLE_MODEL, perfect)
        assert "c2" in str(err.value)

    def test_blind_asv_degenerates_c1(self):
        blind = AsvOperatingPoint(0.0, 1.0, 0.5, 0.5)
        with pytest.raises(DegenerateConfigError) as err:
            tandem.tdcf_coefficients(EXAMPLE_MODEL, blind)
        assert "c1" in str(err.value)

    def test_algebraic_identity_randomized(self):
        rng = np.random.default_rng(10)
        for _ in range(2000):
            priors = rng.dirichlet([1.0, 1.0, 1.0])
            model = CostModel(
                c_miss=rng.uniform(0.1, 10),
                c_fa=rng.uniform(0.1, 10),
                c_fa_spoof=rng.uniform(0.1, 10),
                pi_tar=priors[0],
                pi_non=priors[1],
                pi_spoof=priors[2],
            )
            asv = AsvOperatingPoint(
                0.0, rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(0, 1)
            )
            try:
                coeff = tandem.tdcf_coefficients(model, asv)
            except DegenerateConfigError:
                continue
            pm, pf = rng.uniform(0, 1), rng.uniform(0, 1)
            linear = coeff.c0 + coeff.c1 * pm + coeff.c2 * pf
            assert linear == pytest.approx(
                expanded_cascade_cost(model, asv, pm, pf), abs=1e-12
            )


def tandem_fixture_table(seed=11, n=40):
    rng = np.random.default_rng(seed)
    rows = []
    rows += [
        (TrialClass.TARGET, rng.normal(2, 1), rng.normal(2, 1)) for _ in range(n)
    ]
    rows += [
        (TrialClass.NONTARGET, rng.normal(2, 1), rng.normal(-2, 1)) for _ in range(n)
    ]
    rows += [
        (TrialClass.SPOOF, rng.normal(-2, 1), rng.normal(0, 1)) for _ in range(n)
    ]
    return make_table(rows)


class TestTdcfCurve:
    def test_perfect_cm_value(self):
        # CM separates bona fide from spoof; ASV rates pinned by construction
        table = make_table(
            [
                (TrialClass.TARGET, 1.0, 1.0),
                (TrialClass.TARGET, 2.0, -1.0),  # tie p_miss_asv at 0.5
                (TrialClass.NONTARGET, 1.5, -1.0),
                (TrialClass.NONTARGET, 2.5, -2.0),
                (TrialClass.SPOOF, -1.0, 1.0),
                (TrialClass.SPOOF, -2.0, -1.0),  # p_fa_spoof_asv = 0.5
            ]
        )
        model = CostModel(1.0, 10.0, 10.0, 0.5, 0.25, 0.25)
        point = tandem.asv_rates(table, 0.0)
        assert (point.p_miss_asv, point.p_fa_asv, point.p_fa_spoof_asv) == (
            0.5,
            0.0,
            0.5,
        )
        coeff = tandem.tdcf_coefficients(model, point)
        value, theta = tandem.min_tdcf(table, model, 0.0)
        assert value == pytest.approx(
            coeff.c0 / (coeff.c0 + min(coeff.c1, coeff.c2)), abs=1e-12
        )
        assert -1.0 < theta < 1.0

    def test_worked_example_endpoints(self):
        # build a table whose ASV rates reproduce the worked example
        table = make_table(
            [
                (TrialClass.TARGET, 1.0, 1.0) if i < 9 else (TrialClass.TARGET, 1.0, -1.0)
                for i in range(10)
            ]
            + [
                (TrialClass.NONTARGET, 1.0, 1.0) if i < 1 else (TrialClass.NONTARGET, 1.0, -1.0)
                for i in range(20)
            ]
            + [
                (TrialClass.SPOOF, -1.0, 1.0) if i < 3 else (TrialClass.SPOOF, -1.0, -1.0)
                for i in range(5)
            ]
        )
        point = tandem.asv_rates(table, 0.0)
        assert (point.p_miss_asv, point.p_fa_asv, point.p_fa_spoof_asv) == (
            0.1,
            0.05,
            0.6,
        )
        curve = tandem.tdcf_curve(table, EXAMPLE_MODEL, 0.0)
        norm = curve.coefficients.default_cost
        # accept-all endpoint: P_miss=0, P_fa=1; reject-all: P_miss=1, P_fa=0
        assert curve.t_dcf_norm[0] == pytest.approx((0.175 + 1.5) / norm, abs=1e-12)
        assert curve.t_dcf_norm[-1] == pytest.approx((0.175 + 0.325) / norm, abs=1e-12)
        assert curve.t_dcf_norm[-1] == pytest.approx(1.0, abs=1e-12)
        # perfect CM: P_miss = P_fa = 0 somewhere in the middle
        assert curve.t_dcf_norm.min() == pytest.approx(0.175 / 0.5, abs=1e-12)

    def test_min_leq_endpoints_and_one(self):
        table = tandem_fixture_table()
        value, _ = tandem.min_tdcf(table, tandem.DEFAULT_COST_MODEL, 0.0)
        curve = tandem.tdcf_curve(table, tandem.DEFAULT_COST_MODEL, 0.0)
        assert value <= curve.t_dcf_norm[0] + 1e-12
        assert value <= curve.t_dcf_norm[-1] + 1e-12
        assert value <= 1.0 + 1e-12

    def test_uninformative_cm_hits_one(self):
        rng = np.random.default_rng(12)
        rows = []
        for cls, asv_mu in (
            (TrialClass.TARGET, 2.0),
            (TrialClass.NONTARGET, -2.0),
            (TrialClass.SPOOF, 0.0),
        ):
            rows += [(cls, 0.0, rng.normal(asv_mu, 1)) for _ in range(30)]
        table = make_table(rows)
        value, _ = tandem.min_tdcf(table, tandem.DEFAULT_COST_MODEL, 0.0)
        assert value == pytest.approx(1.0, abs=1e-12)

    def test_grid_scan_oracle_on_random_table(self):
        table = tandem_fixture_table(seed=13, n=17)  # ~50 trials
        model = tandem.DEFAULT_COST_MODEL
        t_asv = 0.0
        value, theta = tandem.min_tdcf(table, model, t_asv)

        point = tandem.asv_rates(table, t_asv)
        coeff = tandem.tdcf_coefficients(model, point)
        bona = table.cm_bonafide()
        spoof = table.cm_spoof()
        lo = float(table.cm_scores.min()) - 1.0
        hi = float(table.cm_scores.max()) + 1.0
        best = np.inf
        for t in np.linspace(lo, hi, 20001):
            pm, pf = detmetrics.error_rates(bona, spoof, t)
            best = min(best, coeff.c0 + coeff.c1 * pm + coeff.c2 * pf)
        assert value == pytest.approx(best / coeff.default_cost, abs=1e-12)

    def test_cost_scaling_invariance(self):
        table = tandem_fixture_table(seed=14)
        base = tandem.DEFAULT_COST_MODEL
        for k in (0.5, 3.0, 117.0):
            scaled = CostModel(
                c_miss=base.c_miss * k,
                c_fa=base.c_fa * k,
                c_fa_spoof=base.c_fa_spoof * k,
                pi_tar=base.pi_tar,
                pi_non=base.pi_non,
                pi_spoof=base.pi_spoof,
            )
            v0, t0 = tandem.min_tdcf(table, base, 0.0)
            v1, t1 = tandem.min_tdcf(table, scaled, 0.0)
            assert v1 == pytest.approx(v0, abs=1e-12)
            assert t1 == t0

    def test_curve_csv_header(self):
        table = tandem_fixture_table(seed=15, n=5)
        curve = tandem.tdcf_curve(table, tandem.DEFAULT_COST_MODEL, 0.0)
        text = tandem.tdcf_curve_csv(curve)
        assert text.startswith("theta_cm,p_miss_cm,p_fa_cm,t_dcf_norm\n")


class TestPrivacyReport:
    def test_gate_blocks_everything(self):
        table = make_table(
            [
                (TrialClass.SPOOF, -1.0, 1.0),
                (TrialClass.SPOOF, -2.0, -1.0),
                (TrialClass.SPOOF, -0.5, 0.0),
            ]
        )
        report = tandem.privacy_report(table, 0.0, 0.0)
        assert (report.accepted, report.rejected_by_asv, report.rejected_by_cm) == (
            0.0,
            0.0,
            1.0,
        )

    def test_everything_accepted_at_minus_infinity(self):
        table = make_table(
            [(TrialClass.TARGET, -5.0, -5.0), (TrialClass.SPOOF, -9.0, -9.0)]
        )
        report = tandem.privacy_report(table, -np.inf, -np.inf)
        assert (report.accepted, report.rejected_by_asv, report.rejected_by_cm) == (
            1.0,
            0.0,
            0.0,
        )

    def test_four_row_fixture(self):
        table = make_table(
            [
                (TrialClass.TARGET, 1.0, 1.0),  # accepted
                (TrialClass.TARGET, 1.0, -1.0),  # rejected by ASV
                (TrialClass.TARGET, -1.0, 5.0),  # rejected by CM
                (TrialClass.TARGET, -1.0, -1.0),  # rejected by CM
            ]
        )
        report = tandem.privacy_report(table, 0.0, 0.0)
        assert report.accepted == 0.25
        assert report.rejected_by_asv == 0.25
        assert report.rejected_by_cm == 0.5
        assert report.accepted + report.rejected_by_asv + report.rejected_by_cm == 1.0

    def test_empty_table(self):
        table = make_table([(TrialClass.TARGET, 1.0, 1.0)]).subset(TrialClass.SPOOF)
        with pytest.raises(EmptyTableError):
            tandem.privacy_report(table, 0.0, 0.0)
