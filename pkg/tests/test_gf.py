import itertools

import pytest
from hypothesis import given, strategies as st

from cameron_liebler.gf import GF, FieldError, is_irreducible, factor_prime_power

ORDERS = [3, 5, 7, 9, 11, 13, 25, 49, 81]


def field(q):
    return GF.of_order(q)


def gf9_mul(a, b):
    # (a0 + a1 x)(b0 + b1 x) with x^2 = -1 over GF(3)
    return ((a[0] * b[0] - a[1] * b[1]) % 3, (a[0] * b[1] + a[1] * b[0]) % 3)


def test_prime_field_basics():
    F = GF(5)
    assert F(3) + F(4) == 2
    assert F(2).inv() == 3
    assert F(4).is_square() and not F(2).is_square()
    assert F(4).sqrt() == 2
    assert F(2).sqrt() is None
    assert [int(e) for e in F.enumerate()] == [0, 1, 2, 3, 4]


def test_gf9_modulus_forces_x_squared():
    F = GF(3, 2)
    x = F([0, 1])
    assert x * x == F(2)
    assert F(-1).is_square()
    assert F(2).sqrt() == x
    assert len(F.enumerate()) == 9


def test_gf9_tables_match_polynomial_oracle():
    F = GF(3, 2)
    for a, b in itertools.product(itertools.product(range(3), repeat=2), repeat=2):
        assert (F(list(a)) * F(list(b))).coeffs == gf9_mul(a, b)
        assert (F(list(a)) + F(list(b))).coeffs == ((a[0] + b[0]) % 3, (a[1] + b[1]) % 3)


def test_first_nonsquare():
    assert GF(13).nonsquare == 2
    assert GF(5).nonsquare == 2
    # lexicographic order with the constant term most significant
    assert GF(3, 2).nonsquare.coeffs == (1, 1)


def test_zero_inverse_raises():
    with pytest.raises(ZeroDivisionError):
        GF(7).zero.inv()


def test_rejects_bad_configuration():
    with pytest.raises(FieldError):
        GF(3, 2, modulus=(2, 0, 1))  # x^2 + 2 = (x-1)(x+1)
    with pytest.raises((FieldError, ValueError)):
        GF.of_order(15)
    assert not is_irreducible((2, 0, 1), 3)
    assert is_irreducible((1, 0, 1), 3)
    assert factor_prime_power(81) == (3, 4)


@pytest.mark.parametrize("q", ORDERS)
def test_square_classes(q):
    F = field(q)
    squares = {(e * e).code for e in F}
    nonzero = [e for e in F if e.code]
    assert sum(e.is_square() for e in nonzero) == (q - 1) // 2
    assert all(e.is_square() == (e.code in squares) for e in F)
    assert F(-1).is_square() == (q % 4 == 1)
    assert F.nonsquare ** ((q - 1) // 2) == F(-1)
    for e in nonzero:
        assert e ** (q - 1) == 1
        assert e * e.inv() == 1
        r = e.sqrt()
        assert (r is not None) == e.is_square()
        if r is not None:
            assert r * r == e
            assert not (-r < r)


@pytest.mark.parametrize("q", [9, 25, 81])
def test_elements_are_distinct_and_zero_first(q):
    F = field(q)
    els = F.enumerate()
    assert len({e.code for e in els}) == q
    assert els[0].code == 0
    assert [e.coeffs for e in els] == sorted(e.coeffs for e in els)


@st.composite
def field_triples(draw):
    F = field(draw(st.sampled_from(ORDERS)))
    a, b, c = (F.from_code(draw(st.integers(0, F.q - 1))) for _ in range(3))
    return F, a, b, c


@given(field_triples())
def test_field_axioms(t):
    F, a, b, c = t
    assert a + b == b + a and a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == 0 and a + (-a) == 0
    if b.code:
        assert (a / b) * b == a


@given(field_triples())
def test_square_multiplicativity(t):
    F, a, b, _ = t
    if a.code and b.code:
        assert (a * b).is_square() == (a.is_square() == b.is_square())
