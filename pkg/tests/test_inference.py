"""Model-assessment tests: adequacy, nested comparison, AIC selection."""

import pytest

import tariffglm as tg
from conftest import make_fit_stub

INTERCEPT = tg.Term("intercept", ())
REGION = tg.Term("main", ("region",))
TYPE = tg.Term("main", ("type",))
JOB = tg.Term("main", ("job",))
SEX = tg.Term("main", ("sex",))
REGION_TYPE = tg.Term("interaction", ("region", "type"))


class TestGoodnessOfFit:
    @pytest.mark.parametrize(
        "deviance,df,p_expected",
        [
            (41.93, 46, 0.6433506),
            (43.755, 47, 0.6077625),
            (44.94, 49, 0.6383855),
        ],
    )
    def test_adequate_models(self, deviance, df, p_expected):
        stub = make_fit_stub(deviance=deviance, df_residual=df)
        report = tg.goodness_of_fit(stub, alpha=0.05)
        assert report.statistic == deviance
        assert report.df == df
        assert report.p_value == pytest.approx(p_expected, abs=5e-7)
        assert report.decision == "fail-to-reject"

    def test_gross_misfit_rejected(self):
        report = tg.goodness_of_fit(
            make_fit_stub(deviance=100.0, df_residual=10), alpha=0.05
        )
        assert report.p_value < 1e-15
        assert report.decision == "reject"

    def test_saturated_model_has_no_test(self):
        with pytest.raises(tg.DataError):
            tg.goodness_of_fit(make_fit_stub(deviance=0.0, df_residual=0))

    def test_decision_threshold_follows_alpha(self):
        stub = make_fit_stub(deviance=41.93, df_residual=46)
        assert tg.goodness_of_fit(stub, alpha=0.65).decision == "reject"
        assert tg.goodness_of_fit(stub, alpha=0.05).decision == "fail-to-reject"


def fit3_stub(**kw):
    return make_fit_stub(
        deviance=44.94,
        df_residual=49,
        terms=[INTERCEPT, REGION, TYPE],
        coefficients={f"c{i}": 0.0 for i in range(5)},
        **kw,
    )


def fit4_stub(**kw):
    return make_fit_stub(
        deviance=42.412,
        df_residual=45,
        terms=[INTERCEPT, REGION, TYPE, REGION_TYPE],
        coefficients={f"c{i}": 0.0 for i in range(9)},
        **kw,
    )


class TestCompareNested:
    def test_interaction_not_justified(self):
        report = tg.compare_nested(fit3_stub(), fit4_stub(), alpha=0.05)
        assert report.statistic == pytest.approx(2.528, abs=1e-9)
        assert report.df == 4
        assert report.p_value == pytest.approx(0.6396290758300154, abs=1e-9)
        assert report.decision == "fail-to-reject"

    def test_dropping_one_factor(self):
        reduced = make_fit_stub(
            deviance=43.755,
            df_residual=47,
            terms=[INTERCEPT, REGION, TYPE, JOB],
            coefficients={f"c{i}": 0.0 for i in range(7)},
        )
        full = make_fit_stub(
            deviance=41.93,
            df_residual=46,
            terms=[INTERCEPT, SEX, REGION, TYPE, JOB],
            coefficients={f"c{i}": 0.0 for i in range(8)},
        )
        report = tg.compare_nested(reduced, full, alpha=0.05)
        assert report.statistic == pytest.approx(1.825, abs=1e-9)
        assert report.df == 1
        assert report.p_value == pytest.approx(0.17671926396397838, abs=1e-9)
        assert report.decision == "fail-to-reject"

    def test_model_vs_itself_not_strictly_nested(self):
        with pytest.raises(tg.NestingError, match="nested"):
            tg.compare_nested(fit3_stub(), fit3_stub())

    def test_swapped_roles_raise(self):
        with pytest.raises(tg.NestingError):
            tg.compare_nested(fit4_stub(), fit3_stub())

    def test_different_data_rejected(self):
        with pytest.raises(tg.NestingError, match="different data"):
            tg.compare_nested(fit3_stub(), fit4_stub(fingerprint="other"))

    def test_different_offsets_rejected(self):
        with pytest.raises(tg.NestingError, match="offset"):
            tg.compare_nested(fit3_stub(), fit4_stub(offset_column="exposure"))

    def test_different_families_rejected(self):
        with pytest.raises(tg.NestingError, match="famil"):
            tg.compare_nested(fit3_stub(), fit4_stub(family=tg.NORMAL))

    def test_real_fits_on_bundled_data(self, portfolio):
        reduced = tg.fit(
            tg.encode_design(portfolio, tg.parse_formula("claims ~ region + type")),
            tg.POISSON,
        )
        full = tg.fit(
            tg.encode_design(portfolio, tg.parse_formula("claims ~ region * type")),
            tg.POISSON,
        )
        report = tg.compare_nested(reduced, full, alpha=0.05)
        assert report.df == 4
        assert report.statistic == pytest.approx(
            reduced.deviance - full.deviance, abs=1e-10
        )
        with pytest.raises(tg.NestingError):
            tg.compare_nested(full, reduced, alpha=0.05)


class TestSelectByAIC:
    def test_smallest_aic_wins(self):
        fits = [
            make_fit_stub(aic=288.24, coefficients={f"c{i}": 0.0 for i in range(8)}),
            make_fit_stub(aic=288.06, coefficients={f"c{i}": 0.0 for i in range(7)}),
            make_fit_stub(aic=285.25, coefficients={f"c{i}": 0.0 for i in range(5)}),
            make_fit_stub(aic=290.72, coefficients={f"c{i}": 0.0 for i in range(9)}),
        ]
        assert tg.select_by_aic(fits) == 2

    def test_single_fit(self):
        assert tg.select_by_aic([make_fit_stub(aic=10.0)]) == 0

    def test_tie_prefers_fewer_parameters(self):
        fits = [
            make_fit_stub(aic=10.0, coefficients={"a": 0.0, "b": 0.0, "c": 0.0}),
            make_fit_stub(aic=10.0, coefficients={"a": 0.0, "b": 0.0}),
        ]
        assert tg.select_by_aic(fits) == 1

    def test_full_tie_prefers_lower_index(self):
        fits = [
            make_fit_stub(aic=10.0, coefficients={"a": 0.0}),
            make_fit_stub(aic=10.0, coefficients={"a": 0.0}),
        ]
        assert tg.select_by_aic(fits) == 0

    def test_empty_list_rejected(self):
        with pytest.raises(tg.DataError):
            tg.select_by_aic([])

    def test_mixed_data_rejected(self):
        with pytest.raises(tg.DataError):
            tg.select_by_aic(
                [make_fit_stub(aic=1.0), make_fit_stub(aic=2.0, fingerprint="other")]
            )


class TestTestReport:
    def test_inconsistent_decision_rejected(self):
        with pytest.raises(ValueError):
            tg.TestReport(
                statistic=1.0,
                df=1,
                p_value=0.5,
                alpha=0.05,
                decision="reject",
                narrative="bad",
            )

    def test_p_value_range_enforced(self):
        with pytest.raises(ValueError):
            tg.TestReport(
                statistic=1.0,
                df=1,
                p_value=1.5,
                alpha=0.05,
                decision="fail-to-reject",
                narrative="bad",
            )
