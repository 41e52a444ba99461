import pytest
from hypothesis import given, settings as hypothesis_settings, strategies as st

from app.core.exceptions import ParseError, PreconditionError
from app.schemas.params import DeformationParams
from app.services.params import (
    coefficient_system_holds,
    identity_holds,
    load_params_file,
    params_to_text,
    search,
    validate,
)
from app.services.scalar import RationalFunction
from app.services.verification import run_verification
from tests.conftest import rf

small_rationals = st.builds(
    RationalFunction,
    st.integers(min_value=0, max_value=31),
    st.integers(min_value=1, max_value=31),
)


def failures(params: DeformationParams):
    return {c.name for c in validate(params).failures()}


class TestExample:
    """Test the worked example tuple"""

    def test_values(self, params):
        """Example tuple values in canonical text"""
        dumped = params.model_dump()
        assert dumped["a"] == "(t+t^2+t^3)/(1+t)"
        assert dumped["b"] == "1+t^2+t^3"
        assert dumped["c"] == "1/(1+t)"
        assert dumped["d"] == "1+t+t^2"
        assert dumped["w"] == "t" and dumped["z"] == "t"
        assert params.series_precision == 16

    def test_derived_a_and_b(self, params):
        """a and b follow from w, c, d when omitted"""
        derived = DeformationParams(w="t", c="1/(1+t)", d="1+t+t^2", z="t")
        assert derived == params

    def test_validates(self, params):
        """The example satisfies every hypothesis"""
        report = validate(params)
        assert report.passed
        assert report.failures() == []

    def test_precision_bounds(self):
        """Series precision must be positive"""
        with pytest.raises(ValueError):
            DeformationParams(w="t", c="1/(1+t)", d="1+t+t^2", z="t", series_precision=0)


class TestValidation:
    """Test that each violated hypothesis is reported"""

    def test_c_equals_d(self):
        """c = d is rejected"""
        bad = DeformationParams(a="t", b="1+t^2", c="1+t", d="1+t", w="t", z="t")
        assert "c_ne_d" in failures(bad)

    def test_w_zero(self):
        """w = 0 forces c + d = 0"""
        bad = DeformationParams(w="0", c="1/(1+t)", d="1+t+t^2", z="t")
        assert "sum_equals_product" in failures(bad)

    def test_z_unit(self, params):
        """z must lie in t k[[t]]"""
        bad = DeformationParams(**{**params.model_dump(), "z": "1+t"})
        assert failures(bad) == {"z_nonzero_non_unit"}

    def test_a_unit(self, params):
        """A unit a fails both the ideal check and the irreducibility precondition"""
        bad = DeformationParams(**{**params.model_dump(), "a": "1"})
        assert {"a_in_maximal_ideal", "pi_irreducible"} <= failures(bad)

    def test_b_not_one_unit(self, params):
        bad = DeformationParams(**{**params.model_dump(), "b": "t"})
        assert "b_one_unit" in failures(bad)

    def test_reducible_pi(self, params):
        """pi = (x+1)(x+1+t) is rejected with its root"""
        bad = DeformationParams(**{**params.model_dump(), "a": "t", "b": "1+t"})
        check = next(c for c in validate(bad).checks if c.name == "pi_irreducible")
        assert not check.passed
        assert "reducible_with_root" in check.detail

    @hypothesis_settings(max_examples=200, deadline=None)
    @given(small_rationals, small_rationals, small_rationals, small_rationals, small_rationals)
    def test_identity_iff_coefficient_system(self, a, b, c, d, w):
        """x pi(x) + a = (x+w)(x+c)(x+d) exactly when the coefficient system holds"""
        candidate = DeformationParams(a=a, b=b, c=c, d=d, w=w, z=rf("t"))
        assert identity_holds(candidate) == coefficient_system_holds(candidate)

    def test_identity_on_example(self, params):
        assert identity_holds(params) and coefficient_system_holds(params)


class TestSearch:
    """Test the search over small-degree tuples"""

    def test_degree_zero_is_empty(self):
        """No nonzero w vanishes at 0 with degree 0"""
        assert search(0) == []

    def test_degree_one_contains_example(self, params):
        """The example tuple is found at degree bound 1"""
        assert params in search(1)

    def test_results_validate_and_are_distinct(self):
        """Every reported tuple passes validation; c/d swaps are reported once"""
        found = search(3, limit=6)
        assert 0 < len(found) <= 6
        keys = set()
        for p in found:
            assert validate(p).passed
            key = (p.w, frozenset((p.c, p.d)))
            assert key not in keys
            keys.add(key)

    def test_limit(self):
        assert len(search(3, limit=1)) == 1

    @pytest.mark.parametrize("bound", [-1, 9])
    def test_bound_range(self, bound):
        with pytest.raises(PreconditionError):
            search(bound)

    def test_validated_tuples_pass_the_pipeline(self):
        """Every tuple found at degree bound 3 passes every verification check"""
        found = search(3)
        assert len(found) == 5
        for p in found:
            report = run_verification(p)
            assert report.passed, [c.id for c in report.checks if not c.passed]


class TestParamsFile:
    """Test the key=value params file format"""

    def test_load_full_file(self, params, params_file):
        """A file written by params_to_text loads back to the same tuple"""
        path = params_file(params_to_text(params))
        assert load_params_file(path) == params

    def test_derives_a_and_b(self, params, params_file):
        """a and b may be omitted"""
        path = params_file("# example\nw=t\nc=1/(1+t)\nd=1+t+t^2\nz=t\n")
        assert load_params_file(path) == params

    def test_precision_key(self, params_file):
        path = params_file("w=t\nc=1/(1+t)\nd=1+t+t^2\nprecision=24\n")
        assert load_params_file(path).series_precision == 24

    @pytest.mark.parametrize(
        "content",
        [
            "not a params file\n",
            "w=t\nc=1/(1+t)\nd=1+t+t^2\ncolor=blue\n",
            "w=t\nc=1/(1+t)\nd=2+t\n",
            "a=t\nb=1\n",
            "w=t\nc=1/(1+t)\nd=1+t+t^2\nprecision=0\n",
        ],
    )
    def test_rejects_bad_files(self, params_file, content):
        """Unknown keys, bad values and missing fields raise ParseError"""
        with pytest.raises(ParseError):
            load_params_file(params_file(content))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError):
            load_params_file(tmp_path / "absent.params")
