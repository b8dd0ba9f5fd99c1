"""Integer-arithmetic helpers: factorization, symbols, modular square roots.

Factorization and primality are delegated to sympy; everything here is
deterministic for inputs below 2**128, which is the declared working range.
"""

from __future__ import annotations

import math
from functools import lru_cache

from sympy import factorint, isprime
from sympy.ntheory.residue_ntheory import sqrt_mod

from .errors import GuardExceededError

FACTOR_LIMIT = 2**128


@lru_cache(maxsize=1 << 16)
def _factorize_cached(n: int) -> tuple[tuple[int, int], ...]:
    return tuple(sorted((int(p), int(e)) for p, e in factorint(n).items()))


def factorize(n: int) -> dict[int, int]:
    """Prime factorization of |n| as {prime: exponent}; n must be nonzero."""
    if n == 0:
        raise ValueError("cannot factor 0")
    n = abs(n)
    if n > FACTOR_LIMIT:
        raise GuardExceededError(f"refusing to factor {n} > 2**128")
    return dict(_factorize_cached(n))


@lru_cache(maxsize=1 << 16)
def is_prime(n: int) -> bool:
    return bool(isprime(n))


def is_squarefree(n: int) -> bool:
    if n == 0:
        return False
    return all(e == 1 for e in factorize(n).values())


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a|n), defined for all integers n."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    sign = 1
    if n < 0:
        n = -n
        if a < 0:
            sign = -sign
    # factor out twos of n
    t = 0
    while n % 2 == 0:
        n //= 2
        t += 1
    if t:
        if a % 2 == 0:
            return 0
        if t % 2 == 1 and a % 8 in (3, 5):
            sign = -sign
    # now n odd positive: Jacobi symbol
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                sign = -sign
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            sign = -sign
        a %= n
    return sign if n == 1 else 0


def sqrt_mod_prime(a: int, p: int) -> int | None:
    """A square root of a mod p, or None if a is a non-residue."""
    r = sqrt_mod(a, p)
    return int(r) if r is not None else None


def isqrt_exact(n: int) -> int | None:
    """Exact integer square root of n, or None if n is not a perfect square."""
    if n < 0:
        return None
    r = math.isqrt(n)
    return r if r * r == n else None
