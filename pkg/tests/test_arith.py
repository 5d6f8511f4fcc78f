import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from congrue.arith import (
    FactorizationError,
    factorize,
    is_prime,
    is_squarefree,
    legendre,
    primes_upto,
    sqrt_mod,
    squarefree_part,
    valuation,
)

# Squares mod 13 by direct enumeration: {1, 3, 4, 9, 10, 12}.
SQUARES_MOD_13 = sorted({x * x % 13 for x in range(1, 13)})


def test_squares_mod_13_oracle():
    assert SQUARES_MOD_13 == [1, 3, 4, 9, 10, 12]


def test_legendre_examples():
    assert legendre(1, 7) == 1
    assert legendre(0, 5) == 0
    assert legendre(2, 13) == -1
    assert 2 not in SQUARES_MOD_13


def test_legendre_matches_enumeration_mod_13():
    for a in range(13):
        expected = 0 if a == 0 else (1 if a in SQUARES_MOD_13 else -1)
        assert legendre(a, 13) == expected


def test_legendre_rejects_bad_modulus():
    for l in (2, 1, 9, 15, -7):
        with pytest.raises(ValueError):
            legendre(3, l)


@given(st.integers(), st.integers())
@settings(max_examples=200)
def test_legendre_multiplicative(a, b):
    l = 101
    assert legendre(a * b, l) == legendre(a, l) * legendre(b, l)


def test_valuation_examples():
    assert valuation(-297675, 3) == (5, -1225)
    delta2 = -297675 * 13**17
    k, cof = valuation(delta2, 13)
    assert k == 17
    assert valuation(1, 7) == (0, 1)


def test_valuation_rejects_zero():
    with pytest.raises(ValueError):
        valuation(0, 5)


@given(st.integers(min_value=-(10**12), max_value=10**12).filter(lambda n: n != 0))
@settings(max_examples=200)
def test_valuation_roundtrip(n):
    for q in (2, 3, 13):
        k, cof = valuation(n, q)
        assert q**k * cof == n
        assert cof % q != 0


def _primes_by_trial(bound):
    return [
        n
        for n in range(2, bound + 1)
        if all(n % d for d in range(2, math.isqrt(n) + 1))
    ]


def test_primes_upto_examples():
    assert primes_upto(10) == [2, 3, 5, 7]
    assert primes_upto(1) == []
    assert len(primes_upto(100)) == 25


@pytest.mark.parametrize("bound", [0, 1, 2, 3, 10, 97, 1000])
def test_primes_upto_matches_trial_division(bound):
    assert primes_upto(bound) == _primes_by_trial(bound)


def test_is_prime_small():
    primes = set(primes_upto(500))
    for n in range(-3, 500):
        assert is_prime(n) == (n in primes)


def test_sqrt_mod():
    for p in (2, 3, 5, 13, 17, 97, 1009):
        residues = {x * x % p for x in range(p)}
        for a in range(p):
            r = sqrt_mod(a, p)
            if a in residues:
                assert r is not None and r * r % p == a
            else:
                assert r is None


def test_factorize():
    assert factorize(-297675) == {3: 5, 5: 2, 7: 2}
    assert factorize(-297675 * 13**17) == {3: 5, 5: 2, 7: 2, 13: 17}
    assert factorize(1) == {}
    big_prime = 2**61 - 1
    assert factorize(big_prime) == {big_prime: 1}
    with pytest.raises(ValueError):
        factorize(0)


def test_factorize_rejects_hard_composite():
    p, q = 2**61 - 1, 2**31 - 1
    with pytest.raises(FactorizationError):
        factorize(p * q)


def test_squarefree():
    assert is_squarefree(-15)
    assert not is_squarefree(12)
    assert not is_squarefree(0)
    assert squarefree_part(12) == 3
    assert squarefree_part(-50) == -2
    assert squarefree_part(7) == 7
