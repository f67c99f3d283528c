"""Tests for the built-in catalog and the verification runner."""

from types import SimpleNamespace

import pytest

from pyk3fibration.autom import MonomialAutomorphism, WeightedHypersurface
from pyk3fibration.catalog import (
    CatalogEntry,
    ExpectedConfiguration,
    VerificationReport,
    catalog_table,
    entries,
    get_entry,
    normal_form_relations,
    verify_all,
    verify_entry,
)
from pyk3fibration.fibration import WeierstrassModel
from pyk3fibration.kodaira import II, III

PRIME_ENTRIES = ["X_19", "X_17", "X_13-corrected", "X_11", "X_7", "X_5"]
NORMAL_FORMS = ["NF-19", "NF-17", "NF-13", "NF-11", "NF-7", "NF-5"]
THREE_POWER_ENTRIES = ["X_27", "X_9", "X_3-corrected", "TP-27", "TP-9", "TP-3"]


@pytest.fixture
def summary():
    return verify_all()


class TestCatalogLoading:
    """Test cases for reading the catalog data."""

    def test_entry_count(self):
        """Test every record is loaded."""
        assert len(entries()) == 21
        assert len({entry.id for entry in entries()}) == 21

    def test_lookup(self):
        """Test lookup by id."""
        entry = get_entry("X_19")
        assert entry.model == WeierstrassModel.from_strings("t^7", "t")
        assert entry.automorphism == MonomialAutomorphism(19, 7, 1, 2)
        assert entry.expected_rho == 4

    def test_unknown_id(self):
        """Test a missing id."""
        with pytest.raises(ValueError, match="Unknown catalog entry"):
            get_entry("X_23")

    def test_solved_generators(self):
        """Test normal form entries get their generator from the solver."""
        assert get_entry("NF-19").automorphism.exponents == (13, 10, 1)
        assert get_entry("NF-5").automorphism.exponents == (0, 0, 1)

    def test_weighted_entry(self):
        """Test the order 25 surface is a weighted hypersurface."""
        entry = get_entry("X_25")
        assert entry.is_weighted
        assert isinstance(entry.model, WeightedHypersurface)
        assert entry.expected_rho == 2

    def test_flags(self):
        """Test the printed and corrected twins."""
        assert get_entry("X_13-printed").flags == {"as_printed", "expect_invariance_failure"}
        assert get_entry("X_3-corrected").flags == {"corrected"}

    def test_table(self):
        """Test the tabular listing."""
        table = catalog_table()
        assert list(table.columns) == ["id", "source", "equation", "automorphism", "order", "flags"]
        row = table.set_index("id").loc["X_19"]
        assert row["equation"] == "y^2 = x^3 + (t^7)*x + (t)"
        assert row["automorphism"] == "(19; 7, 1, 2)"


class TestCatalogEntry:
    """Test cases for entry validation."""

    def _entry(self, **overrides):
        fields = dict(
            id="test",
            source="test",
            model=WeierstrassModel.from_strings("t^7", "t"),
            automorphism=MonomialAutomorphism(19, 7, 1, 2),
            expected_order=19,
            expected_rho=4,
        )
        fields.update(overrides)
        return CatalogEntry(**fields)

    def test_unknown_flag(self):
        """Test flags outside the known set."""
        with pytest.raises(ValueError, match="unknown flags"):
            self._entry(flags=frozenset({"typo"}))

    def test_conflicting_flags(self):
        """Test as_printed and corrected exclude each other."""
        with pytest.raises(ValueError, match="both"):
            self._entry(flags=frozenset({"as_printed", "corrected"}))

    def test_rho(self):
        """Test rho must equal 22 - phi(order)."""
        with pytest.raises(ValueError, match="expected_rho"):
            self._entry(expected_rho=5)

    def test_to_dict(self):
        """Test the serialized entry."""
        data = self._entry().to_dict()
        assert data["model"] == {"a": "t^7", "b": "t"}
        assert data["automorphism"] == {"N": 19, "alpha": 7, "beta": 1, "gamma": 2}


class TestExpectedConfiguration:
    """Test cases for the expected fiber configuration."""

    def test_matches(self, x19_config):
        """Test matching against an analyzed configuration."""
        expected = ExpectedConfiguration.from_dict(
            {"zero": "II", "infinity": "III", "others": {"I1": 19}}
        )
        assert (expected.zero, expected.infinity) == (II, III)
        assert expected.matches(x19_config)
        assert str(expected) == "0: II, inf: III, others: I1 x19"

    def test_mismatch(self, x19_config):
        """Test swapped fibers do not match."""
        expected = ExpectedConfiguration.from_dict(
            {"zero": "III", "infinity": "II", "others": {"I1": 19}}
        )
        assert not expected.matches(x19_config)


class TestVerifyEntry:
    """Test cases for single entry verification."""

    @pytest.mark.parametrize("entry_id", PRIME_ENTRIES + NORMAL_FORMS)
    def test_prime_orders_pass(self, entry_id):
        """Test every check passes for the prime order entries."""
        report = verify_entry(get_entry(entry_id))
        assert report.status == "pass", report.to_dict()
        assert report.checks["stable_pair"].status == "pass"
        assert report.checks["shioda_tate"].status == "pass"
        assert report.data["mw_rank"] == 1

    @pytest.mark.parametrize("entry_id", THREE_POWER_ENTRIES)
    def test_three_powers_pass(self, entry_id):
        """Test the three-power entries, with Mordell-Weil rank 0."""
        report = verify_entry(get_entry(entry_id))
        assert report.status == "pass", report.to_dict()
        assert report.checks["trivial_lattice"].status == "pass"
        assert report.data["mw_rank"] == 0

    def test_order_19_data(self):
        """Test the recorded data for the order 19 entry."""
        report = verify_entry(get_entry("X_19"))
        assert report.data["omega_multiplier"] == 8
        assert report.data["orbit_identity"] == [5, 19, 1, 0, True]
        assert report.data["mw_height"] == "19/2"
        assert "P.O = 3" in report.checks["shioda_tate"].detail

    def test_order_27_traces(self):
        """Test the Lefschetz number 6 of the order 27 entry."""
        report = verify_entry(get_entry("X_27"))
        assert report.data["order"] == 27
        assert report.data["base_order"] == 9
        assert report.checks["trace"].detail == "Lefschetz 6, stable fibers 6"

    def test_order_3_skips_trace(self):
        """Test base order 1 skips the trace."""
        report = verify_entry(get_entry("X_3-corrected"))
        assert report.checks["trace"].status == "skipped"
        assert report.checks["stable_pair"].status == "skipped"

    def test_printed_order_13(self):
        """Test the flagged invariance failure skips the automorphism checks."""
        report = verify_entry(get_entry("X_13-printed"))
        assert report.status == "flagged-pass"
        assert report.flagged_failures == ["invariance"]
        assert report.checks["orders"].status == "skipped"
        assert report.checks["j_invariant"].status == "pass"

    def test_printed_order_3(self):
        """Test the printed order 3 equation fails only flagged checks."""
        report = verify_entry(get_entry("X_3-printed"))
        assert report.status == "flagged-pass"
        assert set(report.flagged_failures) == {"configuration", "trivial_lattice", "shioda_tate"}
        assert report.data["mw_rank"] == 16

    def test_weighted(self):
        """Test the order 25 weighted entry."""
        report = verify_entry(get_entry("X_25"))
        assert report.status == "pass"
        assert report.data["omega_multiplier"] == 21
        assert set(report.checks) == {"invariance", "orders", "omega"}

    def test_small_intersection_bound(self):
        """Test a height out of reach of max_intersection fails Shioda-Tate."""
        report = verify_entry(get_entry("X_19"), max_intersection=2)
        assert report.status == "fail"
        assert report.failed_checks == ["shioda_tate"]

    def test_bad_automorphism_is_reported(self):
        """Test a wrong automorphism is a failure, not an exception."""
        entry = CatalogEntry(
            id="bad",
            source="test",
            model=WeierstrassModel.from_strings("t^7", "t"),
            automorphism=MonomialAutomorphism(19, 7, 1, 3),
            expected_order=19,
            expected_rho=4,
        )
        report = verify_entry(entry)
        assert report.status == "fail"
        assert report.unflagged_failures == ["invariance"]


class TestVerificationReport:
    """Test cases for report status bookkeeping."""

    def test_missing_expected_discrepancy(self):
        """Test a coverage flag without any failure is itself a failure."""
        report = VerificationReport("test", frozenset({"expect_invariance_failure"}))
        report.record("invariance", True)
        assert report.status == "fail"
        assert report.unflagged_failures == ["expected_discrepancy"]

    def test_statuses(self):
        """Test pass, flagged-pass and fail."""
        report = VerificationReport("test", frozenset({"expect_config_mismatch"}))
        report.record("configuration", False, "mismatch")
        assert report.status == "flagged-pass"
        report.record("euler", False)
        assert report.status == "fail"
        assert report.to_dict()["checks"]["configuration"] == {
            "status": "fail",
            "detail": "mismatch",
        }


class TestVerifyAll:
    """Test cases for whole-catalog verification."""

    def test_summary(self, summary):
        """Test only the printed entries are flagged and nothing fails."""
        assert summary.flagged == ["X_13-printed", "X_3-printed"]
        assert summary.failed == []
        assert summary.exit_code == 0

    def test_reports_sorted(self, summary):
        """Test reports come in id order."""
        ids = [report.entry_id for report in summary.reports]
        assert ids == sorted(ids)
        assert len(ids) == 21

    def test_parallel_matches_serial(self, summary):
        """Test the thread pool gives the same statuses."""
        parallel = verify_all(parallel=True, workers=3)
        assert parallel.table().equals(summary.table())

    def test_selected_ids(self):
        """Test verification of a subset."""
        result = verify_all(ids=["X_19", "X_27"])
        assert [report.entry_id for report in result.reports] == ["X_19", "X_27"]
        assert verify_all(ids=[]).reports == []

    def test_unknown_id(self):
        """Test an unknown id raises."""
        with pytest.raises(ValueError, match="Unknown catalog entry"):
            verify_all(ids=["nope"])

    def test_progress_bar(self, mocker):
        """Test the progress setting reaches tqdm."""
        spy = mocker.patch("pyk3fibration.catalog.tqdm", side_effect=lambda items, **kw: items)
        verify_all(ids=["X_19"], progress=True)
        assert spy.call_args.kwargs["disable"] is False


class TestNormalFormRelations:
    """Test cases for the normal form comparison."""

    def test_relations(self):
        """Test twist, invert and distinct relations."""
        table = normal_form_relations().set_index("p")
        assert table.loc[19, "relation"] == "twist"
        assert table.loc[17, "relation"] == "twist"
        assert table.loc[13, "relation"] == "twist"
        assert table.loc[7, "relation"] == "invert"
        assert table.loc[5, "relation"] == "invert"
        assert table.loc[11, "relation"] == "distinct"
        assert bool(table.loc[11, "pairs_listed"])
        assert table["consistent"].all()

    def test_scaled_counterparts(self, mocker):
        """Test counterparts differing by t -> lambda * t are related, not distinct."""
        models = {
            "NF-19": WeierstrassModel.from_strings("t^7", "t"),
            "X_19": WeierstrassModel.from_strings("128*t^7", "2*t"),
            "NF-7": WeierstrassModel.from_strings("t^5", "t^4"),
            "X_7": WeierstrassModel.from_strings("27*t^3", "6561*t^8"),
        }
        mocker.patch.dict(
            "pyk3fibration.catalog.NORMAL_FORM_COUNTERPARTS",
            {19: ("NF-19", "X_19"), 7: ("NF-7", "X_7")},
            clear=True,
        )
        mocker.patch(
            "pyk3fibration.catalog.get_entry",
            side_effect=lambda entry_id: SimpleNamespace(model=models[entry_id]),
        )
        table = normal_form_relations().set_index("p")
        assert table.loc[19, "relation"] == "scale"
        assert table.loc[7, "relation"] == "invert+scale"
        assert table["consistent"].all()
