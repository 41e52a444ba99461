import pytest
from hypothesis import given, settings as hypothesis_settings, strategies as st

from app.core.exceptions import DivisionByZeroError, NegativeValuationError, ParseError
from app.services.scalar import (
    INFINITY,
    PowerSeriesApprox,
    RationalFunction,
    TPolynomial,
    is_deformation_unit,
    parse_rational_function,
    polynomials_up_to,
    rational_reconstruction,
    rf_add,
    rf_at_zero,
    rf_expand,
    rf_inv,
    rf_mul,
    rf_valuation,
)
from tests.conftest import rf

ZERO = RationalFunction.zero()
ONE = RationalFunction.one()

polynomial_bits = st.integers(min_value=0, max_value=(1 << 9) - 1)
nonzero_bits = st.integers(min_value=1, max_value=(1 << 9) - 1)
rationals = st.builds(RationalFunction, polynomial_bits, nonzero_bits)
nonzero_rationals = st.builds(RationalFunction, nonzero_bits, nonzero_bits)
power_series_rationals = st.builds(
    RationalFunction, polynomial_bits, st.integers(min_value=0, max_value=255).map(lambda b: 2 * b + 1)
)


class TestTPolynomial:
    """Test bit-packed GF(2)[t] arithmetic"""

    def test_carry_less_multiplication(self):
        """(1+t)^2 should be 1+t^2 in characteristic 2"""
        p = TPolynomial(0b11)
        assert p * p == TPolynomial(0b101)

    def test_degree_and_valuation(self):
        """Should report degree and t-adic valuation"""
        p = TPolynomial(0b1100)
        assert p.degree == 3
        assert p.valuation == 2
        assert TPolynomial(0).valuation == INFINITY

    def test_divmod_by_zero(self):
        """Should refuse division by the zero polynomial"""
        with pytest.raises(DivisionByZeroError):
            divmod(TPolynomial(0b11), TPolynomial(0))

    @given(polynomial_bits, nonzero_bits)
    def test_division_identity(self, a, b):
        """a = q b + r with deg r < deg b"""
        pa, pb = TPolynomial(a), TPolynomial(b)
        q, r = divmod(pa, pb)
        assert q * pb + r == pa
        assert not r or r.degree < pb.degree

    @given(nonzero_bits, nonzero_bits)
    def test_bezout(self, a, b):
        """gcdext should return g = s a + u b with g the gcd"""
        pa, pb = TPolynomial(a), TPolynomial(b)
        g, s, u = pa.gcdext(pb)
        assert s * pa + u * pb == g
        assert not pa % g and not pb % g

    def test_enumeration(self):
        """Should enumerate all 2^(d+1) polynomials of degree <= d"""
        assert len(list(polynomials_up_to(2))) == 8


class TestParsing:
    """Test the rational function text grammar"""

    @pytest.mark.parametrize(
        "text",
        ["1+t^2+t^3", "(t+t^2+t^3)/(1+t)", "1/(1+t)", "1+t+t^2", "t", "0", "1"],
    )
    def test_canonical_text(self, text):
        """Canonical forms should print back unchanged"""
        assert str(parse_rational_function(text)) == text

    def test_reduces_on_parse(self):
        """(1+t^2)/(1+t) should reduce to 1+t"""
        assert rf("(1+t^2)/(1+t)") == rf("1+t")

    def test_products_and_nesting(self):
        """Should parse products and nested quotients"""
        assert rf("t*(1+t)") == rf("t+t^2")
        assert rf("(1/(1+t))/(1+t)") == rf("1/(1+t^2)")

    @pytest.mark.parametrize("text", ["2*t", "1+", "t^", "(1+t", "x+1", "", "1/0", "1+t)"])
    def test_rejects_bad_text(self, text):
        """Should raise ParseError for text outside the grammar"""
        with pytest.raises(ParseError):
            parse_rational_function(text)

    @pytest.mark.parametrize(
        "text",
        ["t^100000000000", "t^4097", "1/(1+t^5000)", "t^4096*t^4096", "t^" + "9" * 5000],
    )
    def test_rejects_oversized_degrees(self, text):
        """Should refuse degrees above MAX_PARSE_DEGREE instead of building them"""
        with pytest.raises(ParseError):
            parse_rational_function(text)

    def test_accepts_degree_at_the_cap(self):
        assert rf("t^4096").numerator.degree == 4096


class TestRationalFunction:
    """Test GF(2)(t) field operations"""

    def test_inverse_of_example_c(self):
        """The inverse of 1/(1+t) should be 1+t"""
        assert rf_inv(rf("1/(1+t)")) == rf("1+t")

    def test_add_and_mul(self):
        """Should add and multiply exactly"""
        assert rf_add(rf("1/(1+t)"), ONE) == rf("t/(1+t)")
        assert rf_mul(rf("1/(1+t)"), rf("1+t")) == ONE

    def test_characteristic_two(self):
        """x + x should be zero"""
        x = rf("(t+t^2+t^3)/(1+t)")
        assert not x + x

    def test_inverse_of_zero(self):
        """Inverting zero should raise DivisionByZeroError"""
        with pytest.raises(DivisionByZeroError):
            rf_inv(ZERO)
        with pytest.raises(ZeroDivisionError):
            ONE / ZERO

    def test_valuations(self):
        """Should compute t-adic valuations including infinity for zero"""
        assert rf_valuation(rf("(t+t^2+t^3)/(1+t)")) == 1
        assert rf_valuation(rf("1/t")) == -1
        assert rf_valuation(RationalFunction.t(-2)) == -2
        assert rf_valuation(ZERO) == INFINITY
        assert INFINITY > 10 ** 9

    def test_expand(self):
        """1/(1+t) should expand to the geometric series"""
        series = rf_expand(rf("1/(1+t)"), 5)
        assert series.coefficients == (1, 1, 1, 1, 1)
        assert str(series) == "1+t+t^2+t^3+t^4+O(t^5)"

    def test_expand_negative_valuation(self):
        """Values outside k[[t]] cannot be expanded or specialized"""
        with pytest.raises(NegativeValuationError):
            rf_expand(rf("1/t"), 4)
        with pytest.raises(NegativeValuationError):
            rf_at_zero(rf("1/(t+t^2)"))

    def test_at_zero(self):
        """Should specialize t = 0"""
        assert rf_at_zero(rf("1/(1+t)")) == 1
        assert rf_at_zero(rf("(t+t^2+t^3)/(1+t)")) == 0

    @pytest.mark.parametrize(
        "text,expected",
        [("1+t", True), ("1/(1+t)", True), ("1+t+t^2", True), ("t", False), ("1/t", False), ("0", False)],
    )
    def test_deformation_units(self, text, expected):
        """1-units are exactly the values congruent to 1 mod t"""
        assert is_deformation_unit(rf(text)) is expected

    def test_immutable(self):
        """Should refuse attribute assignment"""
        with pytest.raises(AttributeError):
            ONE.num = 3


class TestFieldAxioms:
    """Property suite for the field axioms of GF(2)(t)"""

    @hypothesis_settings(max_examples=1000, deadline=None)
    @given(rationals, rationals, rationals)
    def test_ring_axioms(self, a, b, c):
        """Commutativity, associativity and distributivity"""
        assert a + b == b + a
        assert a * b == b * a
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a + ZERO == a and a * ONE == a

    @hypothesis_settings(max_examples=300, deadline=None)
    @given(nonzero_rationals)
    def test_inverses(self, a):
        """Every nonzero value has a multiplicative inverse; a + a = 0"""
        assert a * a.inverse() == ONE
        assert not a + a
        assert a / a == ONE

    @hypothesis_settings(max_examples=300, deadline=None)
    @given(nonzero_rationals, nonzero_rationals)
    def test_valuation_is_a_valuation(self, a, b):
        """val(ab) = val(a) + val(b) and val(a+b) >= min"""
        assert (a * b).valuation() == a.valuation() + b.valuation()
        assert (a + b).valuation() >= min(a.valuation(), b.valuation())

    @hypothesis_settings(max_examples=300, deadline=None)
    @given(rationals)
    def test_text_is_canonical(self, a):
        """Printing then parsing should give back the same value"""
        assert parse_rational_function(str(a)) == a


class TestPowerSeries:
    """Test truncated power series and rational reconstruction"""

    def test_series_inverse(self):
        """(1+t) times its series inverse should be 1 mod t^N"""
        series = PowerSeriesApprox(0b11, 8)
        assert series * series.inverse() == PowerSeriesApprox(1, 8)

    def test_series_inverse_needs_unit(self):
        """Series without constant term have no inverse"""
        with pytest.raises(DivisionByZeroError):
            PowerSeriesApprox(0b10, 8).inverse()

    def test_reconstruction(self):
        """Should recover (1+t)/(1+t+t^2) from its expansion"""
        value = rf("(1+t)/(1+t+t^2)")
        assert rational_reconstruction(value.expand(8), 1, 2) == value

    def test_reconstruction_budget(self):
        """Degree budgets must stay below the precision"""
        with pytest.raises(ValueError):
            rational_reconstruction(PowerSeriesApprox(1, 4), 2, 2)


class TestSeriesLaws:
    """Expansion and specialization on the subring k[[t]] ∩ GF(2)(t)"""

    @hypothesis_settings(max_examples=300, deadline=None)
    @given(
        power_series_rationals,
        st.integers(min_value=1, max_value=16),
        st.integers(min_value=0, max_value=16),
    )
    def test_expansion_truncates_consistently(self, r, m, extra):
        """Truncating the order-N expansion to M < N gives the order-M expansion"""
        assert rf_expand(r, m + extra).truncate(m) == rf_expand(r, m)

    @hypothesis_settings(max_examples=300, deadline=None)
    @given(power_series_rationals, power_series_rationals)
    def test_at_zero_is_a_ring_homomorphism(self, a, b):
        """Specializing t = 0 respects sums and products"""
        assert rf_at_zero(a + b) == rf_at_zero(a) ^ rf_at_zero(b)
        assert rf_at_zero(a * b) == rf_at_zero(a) * rf_at_zero(b)
        assert rf_at_zero(ONE) == 1
