"""Contrast harness: a regular model set with Euclidean internal space.

Points a + b*sqrt(d) whose algebraic conjugate a - b*sqrt(d) falls in a
half-open interval window.  The embedding lattice {(a+b√d, a-b√d)} has
covolume 2√d, so the point density is window-length/(2√d).  An interval
window has boundary of measure zero, so this set is regular: densities
converge to the target and the pattern count grows subexponentially (zero
entropy), unlike the k-free sets.

Window membership is decided exactly when the endpoints are quadratic
integers (u + v√d)/w; float endpoints fall back to a 1e-12 absolute
tolerance, with boundary hits resolved by the half-open convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO, Union

from .errors import InvalidArgumentError
from .patterns import EntropyReport, EntropyRow
from .sieve import FrequencyRow, FrequencyTable

_FLOAT_TOL = 1e-12

EndpointLike = Union[int, float, tuple[int, int, int]]


def _sign_quad(p: int, q: int, d: int) -> int:
    """Sign of p + q*sqrt(d) for integers p, q and positive nonsquare d."""
    if q == 0:
        return (p > 0) - (p < 0)
    if q > 0:
        if p >= 0:
            return 1
        return (q * q * d > p * p) - (q * q * d < p * p)
    if p <= 0:
        return -1
    return (p * p > q * q * d) - (p * p < q * q * d)


@dataclass(frozen=True)
class _Endpoint:
    """(u + v*sqrt(d))/w with integer u, v and w > 0; or a float fallback."""

    u: int = 0
    v: int = 0
    w: int = 1
    approx: float | None = None

    @classmethod
    def parse(cls, value: EndpointLike) -> "_Endpoint":
        if isinstance(value, bool):
            raise InvalidArgumentError("endpoint must be numeric")
        if isinstance(value, int):
            return cls(u=value)
        if isinstance(value, tuple):
            u, v, w = value
            if w <= 0:
                raise InvalidArgumentError("endpoint denominator must be positive")
            return cls(u=u, v=v, w=w)
        if isinstance(value, float):
            if value.is_integer():
                return cls(u=int(value))
            return cls(approx=value)
        raise InvalidArgumentError(f"cannot parse endpoint {value!r}")

    def to_float(self, d: int) -> float:
        if self.approx is not None:
            return self.approx
        return (self.u + self.v * math.sqrt(d)) / self.w

    def cmp_conjugate(self, a: int, b: int, d: int) -> int:
        """Sign of (a - b*sqrt(d)) - endpoint."""
        if self.approx is not None:
            diff = (a - b * math.sqrt(d)) - self.approx
            if abs(diff) <= _FLOAT_TOL:
                return 0
            return 1 if diff > 0 else -1
        # w*(a - b*sqrt(d)) - (u + v*sqrt(d))  =  (wa - u) + (-wb - v)*sqrt(d)
        return _sign_quad(self.w * a - self.u, -self.w * b - self.v, d)


@dataclass(frozen=True)
class QuadraticScheme:
    """Cut-and-project data for the ring Z[sqrt(d)] with an interval window."""

    d: int = 2
    window: tuple[EndpointLike, EndpointLike] = (0, 1)

    def __post_init__(self):
        if self.d < 2 or math.isqrt(self.d) ** 2 == self.d:
            raise InvalidArgumentError(f"d must be a nonsquare integer >= 2, got {self.d}")
        lo, hi = self.endpoints
        if lo.to_float(self.d) >= hi.to_float(self.d):
            raise InvalidArgumentError("window must have positive length")

    @property
    def endpoints(self) -> tuple[_Endpoint, _Endpoint]:
        return _Endpoint.parse(self.window[0]), _Endpoint.parse(self.window[1])

    @property
    def covolume(self) -> float:
        return 2.0 * math.sqrt(self.d)

    @property
    def dens(self) -> float:
        return 1.0 / self.covolume

    @property
    def window_length(self) -> float:
        lo, hi = self.endpoints
        return hi.to_float(self.d) - lo.to_float(self.d)

    def conjugate_in_window(self, a: int, b: int) -> bool:
        """Half-open test lo <= a - b*sqrt(d) < hi."""
        lo, hi = self.endpoints
        return lo.cmp_conjugate(a, b, self.d) >= 0 and hi.cmp_conjugate(a, b, self.d) < 0


@dataclass(frozen=True)
class ModelSetSegment:
    """Projection set points in the direct-space interval [0, T]."""

    scheme: QuadraticScheme
    T: float
    pairs: tuple[tuple[int, int], ...]  # (a, b), sorted by a + b*sqrt(d)

    @property
    def values(self) -> list[float]:
        s = math.sqrt(self.scheme.d)
        return [a + b * s for a, b in self.pairs]

    def min_gap(self) -> float:
        v = self.values
        if len(v) < 2:
            return math.inf
        return min(v[i + 1] - v[i] for i in range(len(v) - 1))

    def write_csv(self, f: IO[str]) -> None:
        f.write("# schema: kfree.euclid-points.v1\n")
        f.write("a,b,value\n")
        s = math.sqrt(self.scheme.d)
        for a, b in self.pairs:
            f.write(f"{a},{b},{a + b * s:.17g}\n")


def generate(scheme: QuadraticScheme, T: float) -> ModelSetSegment:
    """Enumerate lattice points with a + b*sqrt(d) in [0, T] and conjugate
    in the window, via a bounded b-range per a."""
    if not T > 0:
        raise InvalidArgumentError(f"T must be positive, got {T}")
    s = math.sqrt(scheme.d)
    lo_f = scheme.endpoints[0].to_float(scheme.d)
    hi_f = scheme.endpoints[1].to_float(scheme.d)
    pairs = []
    # a = (x + x*)/2 stays within the two intervals' midpoint range
    a_min = math.floor(lo_f / 2) - 1
    a_max = math.ceil((T + hi_f) / 2) + 1
    for a in range(a_min, a_max + 1):
        # x in [0, T]  =>  b in [-a/s, (T-a)/s];  x* in [lo, hi)  =>
        # b in ((a-hi)/s, (a-lo)/s]; intersect with one unit of slack.
        b_lo = math.floor(max(-a / s, (a - hi_f) / s)) - 1
        b_hi = math.ceil(min((T - a) / s, (a - lo_f) / s)) + 1
        for b in range(b_lo, b_hi + 1):
            x = a + b * s
            if 0 <= x <= T and scheme.conjugate_in_window(a, b):
                pairs.append((a, b))
    pairs.sort(key=lambda ab: ab[0] + ab[1] * s)
    return ModelSetSegment(scheme=scheme, T=float(T), pairs=tuple(pairs))


def regular_density_check(scheme: QuadraticScheme, Ts: list[float]) -> FrequencyTable:
    """Empirical densities against the target window-length/(2*sqrt(d))."""
    if not Ts:
        raise InvalidArgumentError("need at least one T")
    target = scheme.dens * scheme.window_length
    rows = []
    for T in Ts:
        seg = generate(scheme, T)
        rows.append(
            FrequencyRow(
                N=float(T),
                count=len(seg.pairs),
                volume=float(T),
                frequency=len(seg.pairs) / float(T),
                target_lower=target,
                target_upper=target,
            )
        )
    return FrequencyTable(family="euclid-regular", rows=rows)


def _gap_patterns(values: list[float], L: float) -> int:
    """Distinct rounded gap sequences within direct-space windows of length L."""
    pats = set()
    n = len(values)
    j = 0
    for i in range(n):
        if values[i] + L > values[-1]:
            break
        if j < i + 1:
            j = i + 1
        while j < n and values[j] < values[i] + L:
            j += 1
        pats.add(tuple(round(values[t + 1] - values[t], 9) for t in range(i, j - 1)))
    return len(pats)


def regular_entropy_check(
    scheme: QuadraticScheme, Ls: list[int], T: float | None = None
) -> EntropyReport:
    """Pattern counts along window lengths; per-length log-counts go to zero.

    Patterns are gap sequences between consecutive points inside windows of
    length L.  Both analytic bounds are zero: the interval window has
    boundary of measure zero.
    """
    if not Ls:
        raise InvalidArgumentError("need at least one window length")
    if T is None:
        T = 50.0 * max(Ls)
    seg = generate(scheme, T)
    values = seg.values
    rows = []
    for L in Ls:
        count = _gap_patterns(values, L) if len(values) >= 2 else 0
        per_site = math.log2(count) / L if count > 0 else 0.0
        rows.append(
            EntropyRow(L=L, count=count, per_site_log2=per_site, lower_bits=0.0, upper_bits=0.0)
        )
    return EntropyReport(rows=rows)
