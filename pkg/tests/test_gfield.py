import itertools

import pytest
from hypothesis import given, strategies as st

from edgedom.errors import EvenCharacteristic, NonDivisor, NonPrimeCharacteristic, OrderOverflow
from edgedom.gfield import field_create, field_of_order, quadratic_character, root_of_unity
from oracles import poly_mulmod

SMALL = [(2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (3, 3), (5, 1), (5, 2), (7, 2), (11, 2), (13, 1)]


def _irreducible_by_division(mod, p):
    """No monic polynomial of degree 1..h/2 divides mod."""
    h = len(mod) - 1
    for d in range(1, h // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            div = list(low) + [1]
            rem = list(mod)
            for top in range(h, d - 1, -1):
                c = rem[top]
                if c:
                    for i in range(d + 1):
                        rem[top - d + i] = (rem[top - d + i] - c * div[i]) % p
            if not any(rem[:d]):
                return False
    return True


@pytest.mark.parametrize("p,h", SMALL)
def test_modulus_irreducible_and_lexicographically_first(p, h):
    F = field_create(p, h)
    assert _irreducible_by_division(F.modulus, p)
    code = sum(c * p**i for i, c in enumerate(F.modulus[:-1]))
    for smaller in range(code):
        low = [(smaller // p**i) % p for i in range(h)]
        assert not _irreducible_by_division(low + [1], p)


@pytest.mark.parametrize("p,h", SMALL)
def test_omega_is_primitive(p, h):
    F = field_create(p, h)
    seen, x = set(), 1
    for _ in range(F.q - 1):
        seen.add(x)
        x = F.mul(x, F.omega)
    assert len(seen) == F.q - 1 and x == 1
    # smallest element of full order
    assert all(F.order(y) < F.q - 1 for y in range(1, F.omega))


def test_examples():
    assert field_create(3, 2).modulus == (1, 0, 1)  # x^2 + 1
    assert field_create(2, 1).omega == 1
    assert field_create(2, 3).order(field_create(2, 3).omega) == 7


@pytest.mark.parametrize("p,h", [(2, 3), (3, 2), (5, 2), (2, 4)])
def test_multiplication_matches_polynomial_oracle(p, h):
    F = field_create(p, h)
    for a in range(F.q):
        for b in range(F.q):
            expect = poly_mulmod(list(F.coeffs(a)), list(F.coeffs(b)), list(F.modulus), p)
            assert F.coeffs(F.mul(a, b)) == tuple(expect)


def test_log_tables_match_slow_path():
    F = field_create(3, 5)  # 243: tables built
    for a in range(0, F.q, 7):
        for b in range(0, F.q, 11):
            assert F.mul(a, b) == F._mul_poly(a, b)


@given(st.sampled_from(SMALL + [(2, 8), (3, 7), (257, 1), (2, 16)]), st.data())
def test_field_axioms(ph, data):
    F = field_create(*ph)
    a, b, c = (data.draw(st.integers(0, F.q - 1)) for _ in range(3))
    assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
    assert F.add(F.add(a, b), c) == F.add(a, F.add(b, c))
    assert F.add(a, F.neg(a)) == 0
    if a:
        assert F.mul(a, F.inv(a)) == 1


def test_vector_ops_match_scalar():
    import numpy as np
    for p, h in [(2, 5), (3, 3), (7, 1)]:
        F = field_create(p, h)
        xs = np.arange(F.q)
        ys = (xs * 5 + 3) % F.q
        assert F.vmul(xs, ys).tolist() == [F.mul(int(a), int(b)) for a, b in zip(xs, ys)]
        assert F.vadd(xs, ys).tolist() == [F.add(int(a), int(b)) for a, b in zip(xs, ys)]
        assert F.vpow(xs, 3).tolist() == [F.pow(int(a), 3) for a in xs]


@pytest.mark.parametrize("q", [3, 5, 7, 9, 11, 25, 27, 49, 121])
def test_character_multiplicative(q):
    F = field_of_order(q)
    chi = [quadratic_character(F, x) for x in range(q)]
    squares = {F.mul(x, x) for x in range(1, q)}
    assert chi[0] == 0
    assert all(chi[x] == (1 if x in squares else -1) for x in range(1, q))
    for x in range(1, q):
        for y in range(1, q):
            assert chi[F.mul(x, y)] == chi[x] * chi[y]


def test_character_examples():
    assert quadratic_character(field_of_order(5), 4) == 1
    assert quadratic_character(field_of_order(5), 0) == 0
    F9 = field_of_order(9)
    assert quadratic_character(F9, F9.neg(1)) == 1
    with pytest.raises(EvenCharacteristic):
        quadratic_character(field_of_order(8), 1)


def test_roots_of_unity():
    F9 = field_of_order(9)
    z = root_of_unity(F9, 4)
    assert F9.pow(z, 4) == 1 and F9.pow(z, 2) != 1
    assert root_of_unity(F9, 1) == 1
    F8 = field_of_order(8)
    assert root_of_unity(F8, 7) == F8.omega
    with pytest.raises(NonDivisor):
        root_of_unity(F9, 5)


@pytest.mark.parametrize("q", [4, 8, 9, 16, 27, 64, 81, 256, 625, 4096])
def test_coordinates_bijective(q):
    F = field_of_order(q)
    coords = {F.coeffs(x) for x in range(q)}
    assert len(coords) == q
    assert all(F.from_coeffs(F.coeffs(x)) == x for x in range(q))
    om = {F.omega_coords(x) for x in range(q)}
    assert len(om) == q
    assert all(F.from_omega_coords(F.omega_coords(x)) == x for x in range(0, q, max(1, q // 97)))


def test_subfield_is_fixed_field():
    F = field_of_order(81)
    sub = set(F.subfield(2))
    assert len(sub) == 9
    assert sub == {x for x in range(81) if F.pow(x, 9) == x}
    with pytest.raises(NonDivisor):
        F.subfield(3)


def test_errors():
    with pytest.raises(NonPrimeCharacteristic):
        field_create(4, 1)
    with pytest.raises(OrderOverflow):
        field_create(2, 33)
    F = field_create(2, 32)  # largest allowed
    assert F.q == 2**32


def test_element_wrapper():
    F = field_of_order(9)
    a, b = F(5), F(7)
    assert int(a * b) == F.mul(5, 7)
    assert (a / b) * b == a
    assert a ** 8 == F(1)
    assert -a + a == F(0)
