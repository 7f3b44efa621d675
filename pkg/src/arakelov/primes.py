from sympy import isprime as _isprime
from sympy import nextprime, primerange

__all__ = ["is_prime", "next_prime", "primes_between"]


def is_prime(n) -> bool:
    return isinstance(n, int) and not isinstance(n, bool) and n > 1 and bool(_isprime(n))


def next_prime(n: int) -> int:
    """Smallest prime >= n."""
    return n if is_prime(n) else int(nextprime(n))


def primes_between(lo: int, hi: int) -> list[int]:
    """Primes p with lo <= p <= hi."""
    return [int(p) for p in primerange(lo, hi + 1)]
