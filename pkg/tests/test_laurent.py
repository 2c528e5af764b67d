import pytest
from hypothesis import given, settings, strategies as st

from surfcluster.laurent import ExactDivisionError, LaurentPoly

x = LaurentPoly.var


def test_mul_difference_of_squares():
    p = (x(1) + x(2)) * (x(1) - x(2))
    assert p == x(1) ** 2 - x(2) ** 2


def test_exact_div_monomial():
    p = x(1) * x(2) + x(2) ** 2
    assert p.exact_div(x(2)) == x(1) + x(2)


def test_exact_div_failure():
    with pytest.raises(ExactDivisionError):
        (x(1) + x(2)).exact_div(x(3))
    with pytest.raises(ExactDivisionError):
        (x(1) + x(2)).exact_div(LaurentPoly.zero())


def test_exact_div_general_polynomial():
    p = (x(1) + x(2)) * (x(1) + x(3) ** -1 + LaurentPoly.const(2))
    assert p.exact_div(x(1) + x(2)) == x(1) + x(3) ** -1 + LaurentPoly.const(2)


def test_reduced_fraction_simple():
    p = x(7) * x(11) * x(3) ** -1
    num, den = p.reduced_fraction_form()
    assert num == x(7) * x(11)
    assert den.exps == {3: 1}


def test_reduced_fraction_trivial():
    num, den = x(5).reduced_fraction_form()
    assert num == x(5)
    assert den.exps == {}
    with pytest.raises(ValueError):
        LaurentPoly.zero().reduced_fraction_form()


def test_format_and_parse_roundtrip():
    p = LaurentPoly.monomial(2, {1: -2, 2: 1, 3: -1}) + x(5) - LaurentPoly.const(7)
    s = p.format()
    assert LaurentPoly.parse(s) == p
    assert LaurentPoly.parse("0") == LaurentPoly.zero()
    assert LaurentPoly.parse("x1^-1*x5*x7") == x(1) ** -1 * x(5) * x(7)


def test_format_elides_unit_coefficient():
    assert (x(1) * x(2)).format() == "x1*x2"
    assert LaurentPoly.monomial(-1, {1: 1}).format() == "-x1"
    assert LaurentPoly.const(1).format() == "1"


def test_json_roundtrip():
    p = LaurentPoly.monomial(2, {1: -2, 3: -1}) + x(2)
    assert LaurentPoly.from_json(p.to_json()) == p


def test_substitute():
    p = x(9) ** 2 * x(1) + x(2)
    q = p.substitute(9, x(3) + x(4))
    assert q == (x(3) + x(4)) ** 2 * x(1) + x(2)
    with pytest.raises(ValueError):
        (x(9) ** -1).substitute(9, x(3))


small_polys = st.lists(
    st.tuples(
        st.integers(min_value=-9, max_value=9),
        st.dictionaries(
            st.integers(min_value=1, max_value=4),
            st.integers(min_value=-3, max_value=3),
            max_size=3,
        ),
    ),
    max_size=4,
).map(
    lambda ts: sum(
        (LaurentPoly.monomial(c, e) for c, e in ts if c != 0), LaurentPoly.zero()
    )
)


@settings(max_examples=60, deadline=None)
@given(small_polys, small_polys, small_polys)
def test_ring_axioms(p, q, r):
    assert p + q == q + p
    assert p * q == q * p
    assert (p + q) + r == p + (q + r)
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r


@settings(max_examples=60, deadline=None)
@given(small_polys, small_polys)
def test_exact_div_inverts_mul(p, q):
    if q.is_zero():
        return
    assert (p * q).exact_div(q) == p


@settings(max_examples=60, deadline=None)
@given(small_polys)
def test_canonical_idempotent(p):
    assert LaurentPoly(p.terms) == p
    assert LaurentPoly.parse(p.format()) == p
