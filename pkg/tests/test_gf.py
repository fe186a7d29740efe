import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_irreducible_p, gf_mul, gf_rem

from twistedcubic.gf import (
    GF,
    DivideByZero,
    EvenField,
    FieldElement,
    NoTableRoom,
    NotPrime,
    Reducible,
    SpecMismatch,
    field_new,
    nonsquare,
    prime_power,
)

ORDERS = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 25, 27, 32, 64]


def _poly_of(F, x):
    # field index -> coefficient list, highest degree first (sympy's convention)
    digits = []
    for _ in range(F.h):
        digits.append(x % F.p)
        x //= F.p
    return [int(c) for c in reversed(digits)]


def _index_of(F, poly):
    poly = [0] * (F.h - len(poly)) + list(poly)
    x = 0
    for c in poly:
        x = x * F.p + int(c)
    return x


def _oracle_mul(F, x, y):
    mod = [int(c) for c in reversed(F.modulus)]
    return _index_of(F, gf_rem(gf_mul(_poly_of(F, x), _poly_of(F, y), F.p, ZZ), mod, F.p, ZZ))


@pytest.mark.parametrize("q", [4, 8, 9, 16, 25, 27])
def test_multiplication_matches_polynomial_arithmetic(q):
    F = GF(q)
    rng = np.random.default_rng(q)
    for x, y in rng.integers(0, q, size=(400, 2)):
        assert F.mul(int(x), int(y)) == _oracle_mul(F, int(x), int(y))


@pytest.mark.parametrize("q", [2, 3, 5, 7, 11, 13])
def test_prime_fields_are_integers_mod_p(q):
    F = GF(q)
    for x, y in itertools.product(range(q), repeat=2):
        assert F.add(x, y) == (x + y) % q
        assert F.mul(x, y) == (x * y) % q


@pytest.mark.parametrize("q", ORDERS)
def test_default_modulus_is_irreducible_and_primitive(q):
    F = GF(q)
    assert gf_irreducible_p([int(c) for c in reversed(F.modulus)], F.p, ZZ)
    powers = {F.pow(F.primitive, k) for k in range(q - 1)}
    assert powers == set(range(1, q))


@pytest.mark.parametrize("q", ORDERS)
def test_tables_are_consistent(q):
    F = GF(q)
    for x in range(1, q):
        assert F.exp_table[F.log_table[x]] == x
        assert F.mul(x, F.inv(x)) == 1
        assert F.add(x, F.neg(x)) == 0
    # the exp table must be periodic for index sums up to 2(q-2)
    for e in range(2 * (q - 1) - 1):
        assert F.exp_table[e] == F.exp_table[e % (q - 1)]


@pytest.mark.parametrize("q", [5, 8, 9, 16])
def test_vectorized_ops_match_scalar(q):
    F = GF(q)
    x, y = (a.ravel().astype(F.dtype) for a in np.meshgrid(np.arange(q), np.arange(q)))
    assert list(F.vadd(x, y)) == [F.add(int(a), int(b)) for a, b in zip(x, y)]
    assert list(F.vmul(x, y)) == [F.mul(int(a), int(b)) for a, b in zip(x, y)]
    assert list(F.vsub(x, y)) == [F.sub(int(a), int(b)) for a, b in zip(x, y)]
    nz = np.arange(1, q, dtype=F.dtype)
    assert list(F.vinv(nz)) == [F.inv(int(a)) for a in nz]


@settings(max_examples=200, deadline=None)
@given(q=st.sampled_from(ORDERS), data=st.data())
def test_field_axioms(q, data):
    F = GF(q)
    x, y, z = (data.draw(st.integers(0, q - 1)) for _ in range(3))
    assert F.mul(x, F.add(y, z)) == F.add(F.mul(x, y), F.mul(x, z))
    assert F.mul(F.mul(x, y), z) == F.mul(x, F.mul(y, z))
    assert F.add(F.add(x, y), z) == F.add(x, F.add(y, z))
    assert F.pow(x, q) == x
    if x:
        assert F.div(F.mul(x, y), x) == y


@pytest.mark.parametrize("q", [3, 5, 7, 9, 11, 13, 25, 27])
def test_nonsquare_by_enumeration(q):
    F = GF(q)
    squares = {F.mul(x, x) for x in range(q)}
    rho = F.nonsquare().index
    assert rho not in squares and rho != 0
    assert rho == min(set(range(1, q)) - squares)
    assert all(F.is_square(x) == (x in squares) for x in range(q))
    assert int(nonsquare(F)) == rho


def test_known_nonsquares():
    assert GF(5).nonsquare().index == 2
    assert GF(7).nonsquare().index == 3
    # integers compare as elements of the prime field, so 3 means 0 in GF(9)
    rho9 = GF(9).nonsquare()
    assert rho9.index == 3 and rho9 != 3 and FieldElement(GF(9), 0) == 3


def test_xi():
    assert [GF(q).xi for q in (5, 7, 8, 9, 16, 27)] == [-1, 1, -1, 0, 1, 0]


def test_field_elements():
    F = GF(9)
    a, b = FieldElement(F, 4), FieldElement(F, 7)
    assert int(a * b) == F.mul(4, 7)
    assert int(a / b) == F.div(4, 7)
    assert (a - a) == 0 and not (a - a)
    assert a ** 8 == 1
    with pytest.raises(DivideByZero):
        _ = a / FieldElement(F, 0)
    with pytest.raises(SpecMismatch):
        _ = a + FieldElement(GF(3), 1)


def test_construction_errors():
    with pytest.raises(NotPrime):
        field_new(6)
    with pytest.raises(Reducible):
        field_new(3, 2, (2, 0, 1))  # x^2 + 2 = (x-1)(x+1) over GF(3)
    with pytest.raises(NoTableRoom):
        field_new(2, 20)
    with pytest.raises(EvenField):
        GF(8).nonsquare()
    with pytest.raises(ValueError):
        prime_power(12)


def test_custom_modulus():
    F = field_new(3, 2, (1, 0, 1))  # x^2 + 1, irreducible but not primitive
    assert F.q == 9
    assert {F.pow(F.primitive, k) for k in range(8)} == set(range(1, 9))
