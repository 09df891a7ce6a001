"""Number-theoretic primitives.

Prime sieving, k-free integer tests, vector gcd, and Riemann zeta values
with certified two-sided error bounds.  Everything here is pure and
deterministic; PrimeTable and ZetaValue are immutable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidArgumentError

# Below ~5e-15 the double-precision partial sum cannot honestly certify
# the bound any more.
_MIN_ZETA_TOL = 5e-15
_FP_MARGIN = 1e-15


@dataclass(frozen=True)
class PrimeTable:
    """All primes up to `bound`, strictly increasing, starting at 2."""

    bound: int
    primes: tuple[int, ...]

    def __iter__(self):
        return iter(self.primes)

    def __len__(self) -> int:
        return len(self.primes)


def primes_up_to(bound: int) -> PrimeTable:
    """Sieve of Eratosthenes up to and including `bound`."""
    if bound < 2:
        raise InvalidArgumentError(f"prime bound must be >= 2, got {bound}")
    sieve = bytearray([1]) * (bound + 1)
    sieve[0:2] = b"\x00\x00"
    for p in range(2, math.isqrt(bound) + 1):
        if sieve[p]:
            start = p * p
            sieve[start :: p] = b"\x00" * ((bound - start) // p + 1)
    return PrimeTable(bound, tuple(i for i in range(2, bound + 1) if sieve[i]))


@dataclass(frozen=True)
class ZetaValue:
    """zeta(s) with a proven bound on |value - zeta(s)|."""

    s: int
    value: float
    error_bound: float

    def __post_init__(self):
        # value lies in (1, 2] for s >= 2; for very large s the float
        # midpoint collapses onto 1.0 exactly, which we accept.
        if not (1.0 <= self.value <= 2.0):
            raise InvalidArgumentError(f"zeta value {self.value} outside (1, 2]")
        if self.error_bound < 0:
            raise InvalidArgumentError("error bound must be >= 0")


def zeta(s: int, tol: float) -> ZetaValue:
    """zeta(s) for integer s >= 2, certified to within `tol`.

    Method: the partial sum  S_M = sum_{m<=M} m^-s  plus the integral
    bracket of the tail,

        (M+1)^(1-s)/(s-1)  <=  sum_{m>M} m^-s  <=  M^(1-s)/(s-1).

    The returned value is S_M plus the bracket midpoint; the half-width of
    the bracket is at most M^-s/2, so M = ceil((1/tol)^(1/s)) suffices.
    """
    if s < 2:
        raise InvalidArgumentError(f"zeta series bound needs s >= 2, got {s}")
    if not tol > 0:
        raise InvalidArgumentError(f"tolerance must be positive, got {tol}")
    if tol < _MIN_ZETA_TOL:
        raise InvalidArgumentError(
            f"tolerance {tol} below double-precision floor {_MIN_ZETA_TOL}"
        )
    M = max(2, math.ceil((1.0 / tol) ** (1.0 / s)))
    while True:
        tail_hi = M ** (1 - s) / (s - 1)
        tail_lo = (M + 1) ** (1 - s) / (s - 1)
        half_width = (tail_hi - tail_lo) / 2.0
        if half_width + _FP_MARGIN <= tol:
            break
        M *= 2
    partial = math.fsum(m ** (-s) for m in range(1, M + 1))
    value = partial + (tail_hi + tail_lo) / 2.0
    return ZetaValue(s=s, value=value, error_bound=half_width + _FP_MARGIN)


def is_kfree_integer(m: int, k: int) -> bool:
    """True iff no prime power p^k divides m.

    Convention: 0 is not k-free (every p^k divides 0), +-1 is k-free.
    """
    if k < 1:
        raise InvalidArgumentError(f"k must be >= 1, got {k}")
    m = abs(m)
    if m == 0:
        return False
    if m == 1:
        return True
    if k == 1:
        return False  # any m > 1 has a prime divisor
    p = 2
    while p**k <= m:
        if m % p == 0:
            if m % p**k == 0:
                return False
            while m % p == 0:
                m //= p
        p += 1 if p == 2 else 2
    return True


def gcd_vector(x: tuple[int, ...]) -> int:
    """gcd of the absolute coordinates; 0 iff x is the zero vector."""
    return math.gcd(*x) if x else 0


def int_kth_root(m: int, k: int) -> int:
    """floor(m^(1/k)) for m >= 0, exact."""
    if m < 0:
        raise InvalidArgumentError("negative radicand")
    if m == 0:
        return 0
    r = max(1, int(round(m ** (1.0 / k))))
    while r**k > m:
        r -= 1
    while (r + 1) ** k <= m:
        r += 1
    return r


def prime_tail_sum(s: int, lo: int, hi: int) -> float:
    """sum of p^-s over primes in (lo, hi].

    Underestimates the full tail sum_{p>lo} p^-s by less than
    hi^(1-s)/(s-1), the integral bound on sum_{m>hi} m^-s.
    """
    if hi <= lo:
        return 0.0
    table = primes_up_to(hi)
    return math.fsum(p ** (-s) for p in table.primes if p > lo)
