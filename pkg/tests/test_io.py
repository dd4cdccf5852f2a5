from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from siegelfx import ParseError, ProbabilityError, RateScenario, ReciprocityViolation, ValidationError
from siegelfx.io import (
    detect_format,
    load_beta_spec,
    load_scenario,
    parse_beta_spec,
    parse_scenario,
    save_scenario,
    serialize_beta_spec,
    serialize_scenario,
)
from siegelfx.reciprocity import power_law_beta


class TestParse:
    def test_json_uniform(self):
        s = parse_scenario(b'{"rates":[1,4]}', "json")
        assert s.rates == (1.0, 4.0) and s.probabilities is None and s.is_uniform

    def test_csv_weighted(self):
        s = parse_scenario("2,16\n1/3,2/3\n", "csv")
        assert s.rates == (2.0, 16.0)
        assert s.probabilities == (Fraction(1, 3), Fraction(2, 3))

    def test_negative_rate(self):
        with pytest.raises(ValidationError):
            parse_scenario('{"rates":[1,-4]}')

    def test_decimal_strings_convert_once(self):
        s = parse_scenario('{"rates":["0.1", 0.1, 1e-3]}')
        assert s.rates == (0.1, 0.1, 0.001)

    def test_probabilities_stay_exact(self):
        s = parse_scenario('{"rates":[1,2,3],"probabilities":["1/10", 0.2, "0.7"]}')
        assert s.probabilities == (Fraction(1, 10), Fraction(1, 5), Fraction(7, 10))

    @pytest.mark.parametrize(
        "text, err",
        [
            ('{"rates":[1,2],"probabilities":["1/3","1/3"]}', ProbabilityError),
            ('{"rates":[1,2],"probabilities":["1/0","1"]}', ParseError),
            ('{"rates":[1,2],"probabilities":["1/2"]}', ProbabilityError),
            ('{"rates":[]}', ValidationError),
            ('{"rates":[1, NaN]}', ParseError),
            ('{"rates":[1, Infinity]}', ParseError),
            ('{"rates":[1e999]}', ValidationError),
            ('{"rates":[true]}', ParseError),
            ('{"rates":"1,2"}', ParseError),
            ('{"rate":[1]}', ParseError),
            ('[1,2]', ParseError),
            ('{"rates":[1,2]', ParseError),
            ('{"rates":[0]}', ValidationError),
        ],
    )
    def test_json_errors(self, text, err):
        with pytest.raises(err):
            parse_scenario(text)

    def test_json_error_position(self):
        with pytest.raises(ParseError) as exc:
            parse_scenario('{\n  "rates": [1, 2,,]\n}')
        assert exc.value.position.startswith("line 2")

    def test_field_path_in_error(self):
        with pytest.raises(ParseError) as exc:
            parse_scenario('{"rates":[1, "abc"]}')
        assert exc.value.position == "rates[1]"

    @pytest.mark.parametrize(
        "text",
        ["", "# only a comment\n", "1,2\n1/2,1/2\n3\n", "1,x\n", "1,2\n1/2,half\n"],
    )
    def test_csv_errors(self, text):
        with pytest.raises(ParseError):
            parse_scenario(text, "csv")

    def test_csv_error_position(self):
        with pytest.raises(ParseError) as exc:
            parse_scenario("# pair=EURUSD\n1,2\n1/2,oops\n", "csv")
        assert exc.value.position == "line 3 field 2"

    def test_bad_utf8(self):
        with pytest.raises(ParseError):
            parse_scenario(b'{"rates":[1]}\xff')

    def test_unknown_format(self):
        with pytest.raises(ParseError):
            parse_scenario("1,2", "xml")
        with pytest.raises(ParseError):
            detect_format("scenario.xml")

    def test_deep_nesting(self):
        with pytest.raises(ParseError):
            parse_scenario('{"rates":[1],"metadata":' + "[" * 100000 + "]" * 100000 + "}")


scenarios = st.builds(
    lambda rates, weights, meta: RateScenario(
        tuple(rates),
        None if weights is None else tuple(Fraction(w, sum(weights[: len(rates)])) for w in weights[: len(rates)]),
        meta,
    ),
    st.lists(st.floats(min_value=1e-300, max_value=1e300), min_size=1, max_size=8),
    st.one_of(st.none(), st.lists(st.integers(1, 50), min_size=8, max_size=8)),
    st.dictionaries(st.sampled_from(["pair", "horizon", "desk"]), st.text(alphabet="ABCDEFGHxyz0123456789 /", max_size=10).map(str.strip)),
)


class TestRoundTrip:
    @given(scenarios)
    def test_json(self, s):
        assert parse_scenario(serialize_scenario(s, "json"), "json") == s

    @given(scenarios)
    def test_csv(self, s):
        assert parse_scenario(serialize_scenario(s, "csv"), "csv") == s

    def test_files(self, tmp_path):
        s = RateScenario((1.1, 1.3), (Fraction(1, 4), Fraction(3, 4)), {"pair": "EURUSD"})
        for name in ("s.json", "s.csv"):
            save_scenario(s, tmp_path / name)
            assert load_scenario(tmp_path / name) == s

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError):
            load_scenario(tmp_path / "nope.json")


class TestBetaSpec:
    def test_load_and_round_trip(self, tmp_path):
        beta = parse_beta_spec('{"arity":2,"representation":"power_law","exponents":["-1/3","1/3"]}')
        assert beta.exponents == (Fraction(-1, 3), Fraction(1, 3))
        again = parse_beta_spec(serialize_beta_spec(beta))
        assert again.exponents == beta.exponents
        p = tmp_path / "m.beta"
        p.write_text(serialize_beta_spec(beta))
        assert load_beta_spec(p).exponents == beta.exponents

    @given(st.lists(st.fractions(max_denominator=1000), min_size=0, max_size=3), st.booleans())
    def test_round_trip_property(self, half, odd):
        exps = half + ([Fraction(0)] if odd else []) + [-h for h in reversed(half)]
        if not exps:
            exps = [Fraction(0)]
        beta = power_law_beta(exps)
        assert parse_beta_spec(serialize_beta_spec(beta)).exponents == beta.exponents

    def test_decimal_exponents_exact(self):
        beta = parse_beta_spec('{"exponents":["-0.1", 0, "0.1"]}')
        assert beta.exponents == (Fraction(-1, 10), 0, Fraction(1, 10))

    def test_antisymmetry_enforced(self):
        with pytest.raises(ReciprocityViolation):
            parse_beta_spec('{"arity":1,"exponents":["0.5"]}')
        beta = parse_beta_spec('{"arity":1,"exponents":["0.5"]}', validate=False)
        assert beta.exponents == (Fraction(1, 2),)

    @pytest.mark.parametrize(
        "text",
        [
            '{"arity":3,"exponents":["-1/3","1/3"]}',
            '{"representation":"spline","exponents":[0]}',
            '{"exponents":[]}',
            '{"exponents":"0"}',
            "[]",
        ],
    )
    def test_malformed(self, text):
        with pytest.raises(ParseError):
            parse_beta_spec(text)
