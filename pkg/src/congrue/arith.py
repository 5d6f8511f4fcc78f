"""Exact integer arithmetic: primes, valuations, residue symbols, factoring.

Everything here works on plain Python integers, which are arbitrary
precision; curve discriminants in the 10^24 range are handled exactly.
Prime bounds, in contrast, always fit comfortably in machine words.
"""

from __future__ import annotations

import math

__all__ = [
    "is_prime",
    "primes_upto",
    "legendre",
    "valuation",
    "sqrt_mod",
    "factorize",
    "prime_divisors",
    "is_squarefree",
    "squarefree_part",
    "FactorizationError",
]

# Witness set making Miller-Rabin deterministic for all n < 3.3 * 10^24,
# far beyond any prime this package tests for primality.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


class FactorizationError(ValueError):
    """Trial division gave up: the input has a large composite cofactor."""


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n == p:
            return True
        if n % p == 0:
            return False
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_upto(bound: int) -> list[int]:
    """All primes <= bound, ascending (sieve of Eratosthenes)."""
    if bound < 2:
        return []
    sieve = bytearray([1]) * (bound + 1)
    sieve[0] = sieve[1] = 0
    i = 2
    while i * i <= bound:
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, bound + 1, i)))
        i += 1
    return [i for i in range(2, bound + 1) if sieve[i]]


def legendre(a: int, l: int) -> int:
    """Legendre symbol (a|l) for an odd prime l, via Euler's criterion.

    Returns 0 if l divides a, +1 if a is a nonzero square mod l, -1
    otherwise.  Raises ValueError when l is not an odd prime.
    """
    if l == 2 or not is_prime(l):
        raise ValueError(f"legendre symbol needs an odd prime modulus, got {l}")
    a %= l
    if a == 0:
        return 0
    r = pow(a, (l - 1) // 2, l)
    return 1 if r == 1 else -1


def valuation(n: int, q: int) -> tuple[int, int]:
    """q-adic valuation of a nonzero integer: n = q**k * cofactor, q - cofactor.

    Returns (k, cofactor).  Raises ValueError on n == 0 (valuation infinite)
    or q < 2.
    """
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    if q < 2:
        raise ValueError(f"valuation base must be >= 2, got {q}")
    k = 0
    while n % q == 0:
        n //= q
        k += 1
    return k, n


def sqrt_mod(a: int, p: int) -> int | None:
    """A square root of a modulo the prime p, or None if a is a non-residue.

    Tonelli-Shanks for odd p; trivial for p = 2.
    """
    a %= p
    if p == 2 or a == 0:
        return a
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    # Tonelli-Shanks: write p - 1 = q * 2^s with q odd.
    q = p - 1
    s = 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        t2 = t
        i = 0
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t = t * c % p
        r = r * b % p
    return r


_TRIAL_LIMIT = 1 << 20


def factorize(n: int) -> dict[int, int]:
    """Factor |n| by trial division, as {prime: exponent}.

    Intended for curve discriminants and conductors, whose prime factors
    are small in practice.  If a cofactor survives trial division up to
    2^20 it is accepted when (a power of) a prime, otherwise
    FactorizationError is raised rather than returning a wrong answer.
    """
    if n == 0:
        raise ValueError("cannot factor 0")
    n = abs(n)
    out: dict[int, int] = {}
    for p in (2, 3, 5):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    d = 7
    incs = (4, 2, 4, 2, 4, 6, 2, 6)  # wheel mod 30
    i = 0
    while d * d <= n and d <= _TRIAL_LIMIT:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += incs[i]
        i = (i + 1) % 8
    if n > 1:
        if d * d > n or is_prime(n):
            out[n] = out.get(n, 0) + 1
        else:
            k, root = _prime_power(n)
            if k == 0:
                raise FactorizationError(
                    f"composite cofactor {n} exceeds trial division range"
                )
            out[root] = out.get(root, 0) + k
    return dict(sorted(out.items()))


def _prime_power(n: int) -> tuple[int, int]:
    """Return (k, p) with n = p**k for prime p, or (0, 0)."""
    for k in range(2, n.bit_length() + 1):
        root = round(n ** (1.0 / k))
        for cand in (root - 1, root, root + 1):
            if cand > 1 and cand**k == n and is_prime(cand):
                return k, cand
    return 0, 0


def prime_divisors(n: int) -> list[int]:
    """Distinct primes dividing n, ascending."""
    return list(factorize(n))


def is_squarefree(n: int) -> bool:
    if n == 0:
        return False
    return all(e == 1 for e in factorize(n).values())


def squarefree_part(n: int) -> int:
    """The squarefree d with n = d * (square), carrying the sign of n."""
    if n == 0:
        raise ValueError("0 has no squarefree part")
    d = -1 if n < 0 else 1
    for p, e in factorize(n).items():
        if e % 2:
            d *= p
    return d
