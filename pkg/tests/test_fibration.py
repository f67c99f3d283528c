"""Tests for Weierstrass models and their fiber configurations."""

from collections import Counter
from fractions import Fraction

import pytest

from pyk3fibration.catalog import entries
from pyk3fibration.exact_arith import INF, T, parse_poly, product
from pyk3fibration.fibration import (
    INFINITY,
    ZERO,
    EulerSumError,
    FiberConfiguration,
    Place,
    RationalEllipticSurfaceError,
    WeierstrassModel,
    analysis_report,
    analyze,
    base_transform,
    decompose_places,
    discriminant,
    j_invariant_at,
    j_kind,
    k3_level,
    matches_normal_form,
    minimalize,
    orientation_classes,
    place_valuations,
    reconstruct_monomial_model,
    scale_relating,
    trivial_lattice,
    twist_equivalent,
)
from pyk3fibration.kodaira import I0, II, III, IV, IIIstar, IIstar, IVstar, euler_number
from pyk3fibration.lattice import parse_lattice_spec, same_components


def model(a, b):
    return WeierstrassModel.from_strings(a, b)


class TestWeierstrassModel:
    """Test cases for models, places and the discriminant."""

    def test_discriminant(self, x19_model):
        """Test 4a^3 + 27b^2 for the order 19 model."""
        assert str(discriminant(x19_model)) == "4*t^21 + 27*t^2"

    @pytest.mark.parametrize("a,b", [("0", "0"), ("-3*t^2", "2*t^3")])
    def test_zero_discriminant(self, a, b):
        """Test identically vanishing discriminants."""
        with pytest.raises(ValueError, match="identically zero"):
            discriminant(model(a, b))

    def test_coefficients_are_coerced(self):
        """Test strings and integers become polynomials."""
        m = WeierstrassModel("t^7", 1)
        assert m.a == T**7
        assert m.b == 1
        assert str(m) == "y^2 = x^3 + (t^7)*x + (1)"

    def test_place_validation(self):
        """Test finite places must be monic, non-constant and squarefree."""
        with pytest.raises(ValueError, match="monic"):
            Place(2 * T)
        with pytest.raises(ValueError, match="squarefree"):
            Place(T**2)
        assert Place(T).is_zero
        assert INFINITY.is_infinity and INFINITY.degree == 1
        assert Place(parse_poly("t^19 + 27/4")).degree == 19

    @pytest.mark.parametrize(
        "a,b,level", [("t^7", "t", 2), ("t", "t", 1), ("t^9", "1", 3), ("0", "t^12", 2)]
    )
    def test_k3_level(self, a, b, level):
        """Test the weight level of the chart at infinity."""
        assert k3_level(model(a, b)) == level


class TestMinimalize:
    """Test cases for minimalization."""

    def test_monomial(self):
        """Test (t^11, t^7) becomes (t^7, t)."""
        assert minimalize(model("t^11", "t^7")) == model("t^7", "t")

    def test_already_minimal(self, x19_model):
        """Test a minimal model is unchanged."""
        assert minimalize(x19_model) == x19_model

    def test_non_linear_place(self):
        """Test minimalization at t^2 + 1."""
        m = model("t*(t^2 + 1)^4", "(t + 2)*(t^2 + 1)^6")
        assert minimalize(m) == model("t", "t + 2")

    def test_zero_a(self):
        """Test a = 0 with b divisible by a sixth power."""
        assert minimalize(model("0", "t^13")) == model("0", "t")

    def test_twice(self):
        """Test a place divided out twice."""
        assert minimalize(model("t^9", "t^13")) == model("t", "t")


class TestDecomposePlaces:
    """Test cases for the place decomposition."""

    def test_order_19(self, x19_model):
        """Test places t, t^19 + 27/4 and infinity."""
        places = decompose_places(x19_model)
        assert [p.label for p in places] == ["t", "t^19 + 27/4", "inf"]

    def test_uniform_valuations(self):
        """Test places split by the valuation of b."""
        places = decompose_places(model("0", "t^2*(t^2 - 1)^5"))
        assert [p.label for p in places] == ["t", "t^2 - 1", "inf"]

    def test_zero_split_from_equal_multiplicity(self):
        """Test t = 0 is separated even when it shares a squarefree layer."""
        places = decompose_places(model("0", "t^10 - t"))
        assert [p.label for p in places] == ["t", "t^9 - 1", "inf"]

    def test_valuations(self, x19_model):
        """Test valuation triples at 0 and at infinity."""
        assert place_valuations(x19_model, ZERO) == (7, 1, 2)
        assert place_valuations(x19_model, INFINITY) == (1, 11, 3)
        m = model("0", "t^2*(t^2 - 1)^5")
        assert place_valuations(m, Place(parse_poly("t^2 - 1"))) == (INF, 5, 10)


class TestAnalyze:
    """Test cases for the fiber configuration."""

    def test_order_19(self, x19_config):
        """Test II, III and nineteen I1 fibers."""
        assert x19_config.at_zero == II
        assert x19_config.at_infinity == III
        assert x19_config.others() == Counter({"I1": 19})
        assert x19_config.euler_total == 24
        assert x19_config.is_k3

    @pytest.mark.parametrize(
        "a,b,zero,infinity",
        [
            ("t^7", "t^2", IV, III),
            ("t^5", "t", II, IIIstar),
            ("t^7", "t^5", IIstar, III),
            ("t^5", "t^4", IVstar, IIIstar),
            ("t^5", "t^5", IIstar, IIIstar),
        ],
    )
    def test_normal_forms(self, a, b, zero, infinity):
        """Test the prime order normal forms."""
        config = analyze(model(a, b))
        assert (config.at_zero, config.at_infinity) == (zero, infinity)
        singular = 24 - euler_number(zero) - euler_number(infinity)
        assert config.others() == Counter({"I1": singular})

    def test_order_3(self, n3_config):
        """Test IV at 0, two II* over t^2 - 1 and a smooth fiber at infinity."""
        assert n3_config.at_zero == IV
        assert n3_config.at_infinity == I0
        assert n3_config.fiber_counts() == Counter({"II*": 2, "IV": 1})

    def test_order_9(self):
        """Test II* at 0, IV* at infinity and three II."""
        config = analyze(model("0", "t^5*(t^3 - 1)"))
        assert (config.at_zero, config.at_infinity) == (IIstar, IVstar)
        assert config.others() == Counter({"II": 3})

    def test_order_27(self):
        """Test II at 0, IV at infinity and nine II."""
        config = analyze(model("0", "t*(t^9 - 1)"))
        assert (config.at_zero, config.at_infinity) == (II, IV)
        assert config.others() == Counter({"II": 9})

    def test_printed_order_3_equation(self):
        """Test the equation b = t^2 (t^10 - 1) has ten II fibers, not two II*."""
        config = analyze(model("0", "t^2*(t^10 - 1)"))
        assert config.at_zero == IV
        assert config.others() == Counter({"II": 10})

    def test_non_minimal_warns(self):
        """Test a non-minimal model is minimalized with a warning."""
        with pytest.warns(UserWarning, match="not minimal"):
            config = analyze(model("t^11", "t^7"))
        assert config.minimal_model == model("t^7", "t")
        assert "minimalized" in analysis_report(config)["flags"]

    def test_rational_elliptic_surface(self):
        """Test an Euler sum of 12."""
        with pytest.raises(RationalEllipticSurfaceError, match="rational elliptic surface"):
            analyze(model("t", "t"))

    def test_wrong_euler_sum(self):
        """Test an Euler sum of 36."""
        with pytest.raises(EulerSumError, match="sum to 36"):
            analyze(model("t^9", "1"))

    def test_round_trip(self, x19_config):
        """Test to_dict / from_dict."""
        assert FiberConfiguration.from_dict(x19_config.to_dict()) == x19_config

    def test_from_dict_invalid(self):
        """Test malformed configuration data."""
        with pytest.raises(ValueError, match="places"):
            FiberConfiguration.from_dict({})


class TestTrivialLattice:
    """Test cases for the trivial lattice."""

    def test_order_19(self, x19_config):
        """Test U + A1."""
        lattice = trivial_lattice(x19_config)
        assert lattice.name == "U+A1"
        assert lattice.rank == 3

    def test_order_13_context(self, p13_config):
        """Test U + E6 + A1 with |det| 6."""
        lattice = trivial_lattice(p13_config)
        assert same_components(lattice, parse_lattice_spec("U+E6+A1"))
        assert lattice.det_abs == 6

    def test_three_power_lattices(self, n3_config):
        """Test the trivial lattices equal the candidate Neron-Severi lattices."""
        assert same_components(trivial_lattice(n3_config), parse_lattice_spec("U+E8+E8+A2"))
        config = analyze(model("0", "t^5*(t^3 - 1)"))
        assert same_components(trivial_lattice(config), parse_lattice_spec("U+E8+E6"))
        config = analyze(model("0", "t*(t^9 - 1)"))
        assert same_components(trivial_lattice(config), parse_lattice_spec("U+A2"))


class TestTransforms:
    """Test cases for twists and base changes."""

    def test_twist(self):
        """Test (a, b) ~ (u^4 a, u^6 b)."""
        assert twist_equivalent(model("t^7", "t"), model("4*t^7", "8*t"))
        assert not twist_equivalent(model("t^7", "t"), model("2*t^7", "t"))
        assert twist_equivalent(model("0", "t"), model("0", "5*t"))
        assert not twist_equivalent(model("t^7", "t"), model("t^5", "t"))

    def test_invert(self):
        """Test t -> 1/t maps (t^5, t^4) to (t^3, t^8)."""
        assert base_transform(model("t^5", "t^4"), "invert") == model("t^3", "t^8")
        assert base_transform(model("t^5", "t^5"), "invert") == model("t^3", "t^7")

    def test_invert_minimalizes(self):
        """Test inversion of (t, 1) divides out t^4, t^6."""
        assert base_transform(model("t", "1"), "invert") == model("t^3", "t^6")

    def test_scale(self):
        """Test t -> 2t."""
        assert base_transform(model("t^7", "t"), "scale", Fraction(2)) == model("128*t^7", "2*t")

    def test_invalid_transforms(self):
        """Test zero factors, unknown transforms and degree overflow."""
        with pytest.raises(ValueError, match="nonzero"):
            base_transform(model("t", "t"), "scale", 0)
        with pytest.raises(ValueError, match="Unknown base transform"):
            base_transform(model("t", "t"), "shift")
        with pytest.raises(ValueError, match="exceeds the weight"):
            base_transform(model("t^9", "t"), "invert")


class TestJInvariant:
    """Test cases for the J-invariant."""

    def test_values_at_fixed_points(self, x19_model):
        """Test J = 0 at the II fiber and J = 1 at the III fiber."""
        assert j_invariant_at(x19_model, ZERO) == 0
        assert j_invariant_at(x19_model, INFINITY) == 1

    def test_regular_point(self):
        """Test J at a rational point away from the discriminant."""
        m = model("t^5 - 3", "t^2")
        assert analyze(m).fiber_at(ZERO) == I0
        assert j_invariant_at(m, Place(T - 1)) == Fraction(4 * (-2) ** 3, 4 * (-2) ** 3 + 27)

    def test_higher_degree_place(self, x19_model):
        """Test J is only evaluated at rational points."""
        with pytest.raises(ValueError, match="rational points"):
            j_invariant_at(x19_model, Place(parse_poly("t^19 + 27/4")))

    @pytest.mark.parametrize(
        "a,b,kind",
        [
            ("0", "t^5", "0"),
            ("t", "0", "1"),
            ("t^2", "t^3", "constant"),
            ("t^7", "t", "nonconstant"),
        ],
    )
    def test_kind(self, a, b, kind):
        """Test the classification of J."""
        assert j_kind(model(a, b)) == kind

    def test_report(self, x19_config):
        """Test the JSON-ready report."""
        report = analysis_report(x19_config)
        assert report["flags"] == ["k3"]
        assert report["trivial_lattice"] == {"name": "U+A1", "rank": 3, "det_abs": 2}
        assert report["j_invariant"]["values"] == {"t": "0", "inf": "1"}
        assert report["places"][-1]["va"] == "1"


class TestNormalFormReconstruction:
    """Test cases for the monomial normal forms."""

    @pytest.mark.parametrize(
        "p,expected",
        [
            (19, {(7, 1), (1, 11)}),
            (17, {(7, 2), (1, 10)}),
            (13, {(5, 1), (3, 11)}),
            (11, {(7, 5), (1, 7)}),
            (7, {(5, 4), (3, 8)}),
            (5, {(5, 5), (3, 7)}),
        ],
    )
    def test_reconstruct(self, p, expected):
        """Test the monomial models realizing each normal form configuration."""
        found = reconstruct_monomial_model(p)
        assert found == expected
        assert len(orientation_classes(found)) == 1

    def test_unknown_prime(self):
        """Test only the six normal form primes are accepted."""
        with pytest.raises(ValueError, match="must be one of"):
            reconstruct_monomial_model(23)

    def test_matches_normal_form(self, x19_config, p13_config):
        """Test configuration matching ignores orientation."""
        assert matches_normal_form(x19_config, 19)
        assert not matches_normal_form(p13_config, 13)

    def test_orientation_classes(self):
        """Test pairs are grouped under (m, n) ~ (8 - m, 12 - n)."""
        classes = orientation_classes([(7, 1), (1, 11), (5, 4)])
        assert classes == [frozenset({(1, 11), (7, 1)}), frozenset({(5, 4), (3, 8)})]


CATALOG_MODELS = [entry for entry in entries() if not entry.is_weighted]


@pytest.fixture(params=CATALOG_MODELS, ids=lambda entry: entry.id)
def catalog_model(request):
    """Minimal Weierstrass model of each catalog entry."""
    return minimalize(request.param.model)


class TestCatalogModelInvariants:
    """Test cases for analysis invariants over every catalog model."""

    def test_twist_leaves_analysis_unchanged(self, catalog_model):
        """Test (a, b) -> (4a, 8b) gives the same fiber configuration."""
        twisted = WeierstrassModel(4 * catalog_model.a, 8 * catalog_model.b)
        assert twist_equivalent(catalog_model, twisted)
        assert analyze(twisted) == analyze(catalog_model)

    @pytest.mark.parametrize("factor", [Fraction(2), Fraction(-1, 3)])
    def test_scale_keeps_fibers(self, catalog_model, factor):
        """Test t -> factor * t keeps the fibers at 0 and infinity and all fiber counts."""
        config = analyze(catalog_model)
        scaled = analyze(base_transform(catalog_model, "scale", factor))
        assert scaled.at_zero == config.at_zero
        assert scaled.at_infinity == config.at_infinity
        assert scaled.fiber_counts() == config.fiber_counts()
        assert scale_relating(catalog_model, scaled.minimal_model) is not None

    def test_invert_swaps_zero_and_infinity(self, catalog_model):
        """Test t -> 1/t exchanges the fibers at 0 and infinity and keeps all counts."""
        config = analyze(catalog_model)
        inverted = analyze(base_transform(catalog_model, "invert"))
        assert inverted.at_zero == config.at_infinity
        assert inverted.at_infinity == config.at_zero
        assert inverted.fiber_counts() == config.fiber_counts()
        assert inverted.euler_total == 24

    def test_places_rebuild_discriminant(self, catalog_model):
        """Test the product of the finite places to their multiplicities is the discriminant."""
        delta = discriminant(catalog_model)
        factors = [
            place.poly ** place_valuations(catalog_model, place)[2]
            for place in decompose_places(catalog_model)
            if not place.is_infinity
        ]
        quotient, remainder = delta.divrem(product(factors))
        assert remainder.is_zero
        assert quotient.degree == 0


class TestScaleRelating:
    """Test cases for the rational scale search."""

    def test_scale_factor(self):
        """Test t -> 2t relates (t^7, t) to (128 t^7, 2 t)."""
        assert scale_relating(model("t^7", "t"), model("128*t^7", "2*t")) == 2

    def test_after_inversion(self):
        """Test a scale by 3 found after inverting (t^5, t^4)."""
        target = base_transform(model("t^3", "t^8"), "scale", Fraction(3))
        assert scale_relating(model("t^5", "t^4"), target) is None
        assert scale_relating(base_transform(model("t^5", "t^4"), "invert"), target) == 3

    def test_twist_needs_no_scale(self):
        """Test twist equivalent models give factor 1."""
        assert scale_relating(model("t^7", "t"), model("4*t^7", "8*t")) == 1

    @pytest.mark.parametrize(
        "a,b",
        [
            ("4*t^7", "t"),
            ("t^5", "t"),
            ("t^7 + t", "t"),
        ],
    )
    def test_no_rational_scale(self, a, b):
        """Test irrational factors and different supports give None."""
        assert scale_relating(model("t^7", "t"), model(a, b)) is None
