"""Point generation and density estimation for k-free lattice points.

Membership reduces to the coordinate gcd: a nonzero x lies in V(k,n) iff
gcd(|x_1|,...,|x_n|) is k-free (p^k divides every coordinate exactly when
p^k divides the gcd).  Box scans therefore build a k-free lookup table by
sieving prime powers and index it with a gcd grid; the 0 entry of the table
is false, which excludes the origin automatically.

Hole certificates are exact: the CRT translation t makes every coordinate
of t+x divisible by the prime power assigned to the offset x, so the
translated box misses V(k,n), and so does every shift of it by a multiple
of the certificate modulus.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import IO, Iterator

import numpy as np

from . import adic, arith
from .adic import SchemeParams
from .errors import InvalidArgumentError, ResourceLimitError

SCAN_CAP = 1 << 28  # max points per box scan
_SLAB_CAP = 1 << 24  # max elements per in-memory slab


@dataclass(frozen=True)
class Box:
    """Axis-aligned integer box lo <= x <= hi (componentwise, inclusive)."""

    lo: tuple[int, ...]
    hi: tuple[int, ...]

    def __post_init__(self):
        if len(self.lo) != len(self.hi) or not self.lo:
            raise InvalidArgumentError("box needs matching nonempty lo/hi vectors")
        if any(l > h for l, h in zip(self.lo, self.hi)):
            raise InvalidArgumentError(f"empty box {self.lo}..{self.hi}")

    @classmethod
    def one_sided(cls, n: int, N: int) -> "Box":
        """[1, N]^n."""
        return cls((1,) * n, (N,) * n)

    @classmethod
    def centered(cls, n: int, N: int) -> "Box":
        """[-N, N]^n."""
        return cls((-N,) * n, (N,) * n)

    @property
    def n(self) -> int:
        return len(self.lo)

    @property
    def count(self) -> int:
        return math.prod(h - l + 1 for l, h in zip(self.lo, self.hi))

    @property
    def max_abs(self) -> int:
        return max(max(abs(l), abs(h)) for l, h in zip(self.lo, self.hi))

    def __str__(self) -> str:
        return "x".join(f"[{l},{h}]" for l, h in zip(self.lo, self.hi))


def _check_scan(box: Box) -> None:
    if box.count > SCAN_CAP:
        raise ResourceLimitError(f"box {box} has {box.count} points, cap {SCAN_CAP}")


def kfree_table(limit: int, k: int) -> np.ndarray:
    """k-free indicator over 0..limit; entry 0 is False."""
    table = np.ones(limit + 1, dtype=bool)
    table[0] = False
    root = arith.int_kth_root(limit, k) if limit >= 1 else 0
    if root >= 2:
        for p in arith.primes_up_to(root):
            q = p**k
            table[q::q] = False
    return table


def truncated_table(limit: int, k: int, P: int) -> np.ndarray:
    """Indicator of 'no p^k divides' over 0..limit, for primes p <= P only."""
    if P < 2:
        raise InvalidArgumentError(f"prime bound must be >= 2, got {P}")
    table = np.ones(limit + 1, dtype=bool)
    table[0] = False
    for p in arith.primes_up_to(P):
        q = p**k
        if q <= limit:
            table[q::q] = False
    return table


def _gcd_grid(box: Box) -> np.ndarray:
    """|gcd| of the coordinates over the box, shape (hi-lo+1) per axis."""
    g = np.abs(np.arange(box.lo[0], box.hi[0] + 1, dtype=np.int64))
    g = g.reshape((-1,) + (1,) * (box.n - 1))
    for a in range(1, box.n):
        axis = np.abs(np.arange(box.lo[a], box.hi[a] + 1, dtype=np.int64))
        g = np.gcd(g, axis.reshape((1,) * a + (-1,) + (1,) * (box.n - 1 - a)))
    return g


def _membership_mask(box: Box, table: np.ndarray) -> np.ndarray:
    if box.n == 1:
        vals = np.abs(np.arange(box.lo[0], box.hi[0] + 1, dtype=np.int64))
        return table[vals]
    return table[_gcd_grid(box)]


def kfree_mask(box: Box, params: SchemeParams) -> np.ndarray:
    """Boolean membership grid of V(k,n) over the box (origin excluded)."""
    _check_scan(box)
    return _membership_mask(box, kfree_table(box.max_abs, params.k))


def truncated_mask(box: Box, params: SchemeParams, P: int) -> np.ndarray:
    """Membership grid of the periodic approximant using primes <= P only."""
    _check_scan(box)
    return _membership_mask(box, truncated_table(box.max_abs, params.k, P))


def _mask_points(box: Box, mask: np.ndarray) -> list[tuple[int, ...]]:
    idx = np.argwhere(mask)
    lo = np.array(box.lo, dtype=np.int64)
    return [tuple(int(v) for v in row) for row in idx + lo]


def kfree_points(box: Box, params: SchemeParams) -> list[tuple[int, ...]]:
    """All points of V(k,n) in the box, in lexicographic order."""
    return _mask_points(box, kfree_mask(box, params))


def truncated_points(box: Box, params: SchemeParams, P: int) -> list[tuple[int, ...]]:
    """Points of the regular approximant (primes <= P) in the box.

    The result is periodic with period prod_{p<=P} p^k in every coordinate
    and is a superset of kfree_points(box, params).
    """
    return _mask_points(box, truncated_mask(box, params, P))


def _axis_slabs(box: Box, workers: int) -> list[Box]:
    """Split along axis 0 into slabs bounded in memory and >= workers chunks."""
    rows = box.hi[0] - box.lo[0] + 1
    per_row = box.count // rows
    max_rows = max(1, _SLAB_CAP // max(per_row, 1))
    n_slabs = max(workers, math.ceil(rows / max_rows))
    step = math.ceil(rows / n_slabs)
    slabs = []
    a = box.lo[0]
    while a <= box.hi[0]:
        b = min(a + step - 1, box.hi[0])
        slabs.append(Box((a,) + box.lo[1:], (b,) + box.hi[1:]))
        a = b + 1
    return slabs


def _map_slabs(fn, slabs: list[Box], workers: int) -> list:
    if workers <= 1 or len(slabs) == 1:
        return [fn(s) for s in slabs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, slabs))


def count_points(
    box: Box,
    params: SchemeParams,
    family: str = "kfree",
    P: int | None = None,
    workers: int = 1,
) -> int:
    """|Lambda ∩ box| for the chosen family, scanned in parallel slabs."""
    _check_scan(box)
    if family == "kfree":
        table = kfree_table(box.max_abs, params.k)
    elif family == "truncated":
        if P is None:
            raise InvalidArgumentError("truncated family needs a prime bound P")
        table = truncated_table(box.max_abs, params.k, P)
    elif family == "full":
        return box.count
    else:
        raise InvalidArgumentError(f"unknown family {family!r}")

    def slab_count(slab: Box) -> int:
        return int(np.count_nonzero(_membership_mask(slab, table)))

    return sum(_map_slabs(slab_count, _axis_slabs(box, workers), workers))


@dataclass(frozen=True)
class FrequencyRow:
    N: int | float
    count: int
    volume: int | float
    frequency: Fraction | float
    target_lower: float
    target_upper: float


@dataclass
class FrequencyTable:
    """Per-box point frequencies with the analytic sandwich targets."""

    family: str
    rows: list[FrequencyRow]

    SCHEMA = "kfree.frequency.v1"

    def write_csv(self, f: IO[str]) -> None:
        f.write(f"# schema: {self.SCHEMA} family: {self.family}\n")
        f.write("N,count,volume,frequency,target_lower,target_upper\n")
        for r in self.rows:
            f.write(
                f"{r.N},{r.count},{r.volume},{float(r.frequency):.17g},"
                f"{r.target_lower:.17g},{r.target_upper:.17g}\n"
            )


def density_scan(
    params: SchemeParams,
    boxes: list[Box],
    family: str = "kfree",
    P: int | None = None,
    zeta_tol: float = 1e-9,
    workers: int = 1,
) -> FrequencyTable:
    """Empirical point frequencies along an increasing box sequence.

    Frequencies are exact rationals count/volume.  Targets: the k-free
    window has empty interior and equals its closure, so the sandwich is
    [0, 1/zeta(nk)]; the truncated window is clopen, so both targets equal
    the finite product prod_{p<=P} (1 - p^-nk); the full window gives 1.
    """
    if not boxes:
        raise InvalidArgumentError("need at least one box")
    counts = [b.count for b in boxes]
    if any(c2 < c1 for c1, c2 in zip(counts, counts[1:])):
        raise InvalidArgumentError("boxes must be nondecreasing (van Hove sequence)")
    if family == "kfree":
        w = adic.haar_measure(adic.AdicWindow.kfree(params), zeta_tol)
        target_lower, target_upper = 0.0, w.upper
    elif family == "truncated":
        if P is None:
            raise InvalidArgumentError("truncated family needs a prime bound P")
        w = adic.haar_measure(adic.AdicWindow.truncated_kfree(params, P), zeta_tol)
        target_lower = target_upper = w.value
    elif family == "full":
        target_lower = target_upper = 1.0
    else:
        raise InvalidArgumentError(f"unknown family {family!r}")
    rows = []
    for box in boxes:
        c = count_points(box, params, family=family, P=P, workers=workers)
        rows.append(
            FrequencyRow(
                N=box.hi[0],
                count=c,
                volume=box.count,
                frequency=Fraction(c, box.count),
                target_lower=target_lower,
                target_upper=target_upper,
            )
        )
    return FrequencyTable(family=family, rows=rows)


def _first_primes(count: int) -> list[int]:
    if count == 0:
        return []
    bound = 15
    if count >= 6:
        x = float(count)
        bound = int(x * (math.log(x) + math.log(math.log(x)))) + 10
    while True:
        primes = arith.primes_up_to(bound).primes
        if len(primes) >= count:
            return list(primes[:count])
        bound *= 2


def _cube_offsets(n: int, side: int) -> list[tuple[int, ...]]:
    offs = [()]
    for _ in range(n):
        offs = [o + (c,) for o in offs for c in range(side)]
    return offs


@dataclass(frozen=True)
class HoleCertificate:
    """Proof that (t + {0..side-1}^n) misses V(k,n), lattice-periodically.

    Each box offset x is assigned a distinct prime p_x; every coordinate of
    t+x is divisible by p_x^k, so gcd(t+x) is not k-free.  The same holds
    for t shifted by any multiple of the modulus prod p_x^k, which is the
    lattice-periodic repetition of the hole (no claim is made about the
    full Delone set of hole translations).
    """

    params: SchemeParams
    side: int
    t: tuple[int, ...]
    assignments: dict[tuple[int, ...], int]
    modulus: int

    SCHEMA = "kfree.hole-certificate.v1"

    def verify(self) -> bool:
        """Exact big-integer re-check of every divisibility claim."""
        primes = list(self.assignments.values())
        if len(set(primes)) != len(primes):
            return False
        if self.modulus != math.prod(p**self.params.k for p in primes):
            return False
        for x, p in self.assignments.items():
            q = p**self.params.k
            for tj, xj in zip(self.t, x):
                if (tj + xj) % q != 0:
                    return False
        return True

    def to_json(self) -> str:
        doc = {
            "schema": self.SCHEMA,
            "n": self.params.n,
            "k": self.params.k,
            "side": self.side,
            "t": [str(v) for v in self.t],
            "modulus": str(self.modulus),
            "assignments": [
                {"offset": list(x), "prime": p, "exponent": self.params.k}
                for x, p in self.assignments.items()
            ],
        }
        return json.dumps(doc, indent=2)


def _crt_pair(r1: int, m1: int, r2: int, m2: int) -> tuple[int, int]:
    """Combine t = r1 mod m1 and t = r2 mod m2 for coprime moduli."""
    x = ((r2 - r1) * pow(m1, -1, m2)) % m2
    return (r1 + m1 * x) % (m1 * m2), m1 * m2


def crt_hole(params: SchemeParams, side: int) -> HoleCertificate:
    """Construct and verify a hole certificate for the cube of a given side.

    The first side^n primes are assigned to the cube offsets in
    lexicographic order; per coordinate j the congruences
    t_j = -x_j (mod p_x^k) are combined by the Chinese remainder theorem.
    Coordinates are normalized to [1, modulus].
    """
    if side < 1:
        raise InvalidArgumentError(f"side must be >= 1, got {side}")
    offsets = _cube_offsets(params.n, side)
    primes = _first_primes(len(offsets))
    assignments = dict(zip(offsets, primes))
    k = params.k
    t = []
    for j in range(params.n):
        r, m = 0, 1
        for x, p in assignments.items():
            r, m = _crt_pair(r, m, -x[j], p**k)
        t.append(r if r > 0 else m)
    modulus = math.prod(p**k for p in primes)
    cert = HoleCertificate(
        params=params, side=side, t=tuple(t), assignments=assignments, modulus=modulus
    )
    if not cert.verify():
        raise InvalidArgumentError("internal error: certificate failed verification")
    return cert


def scan_hole(params: SchemeParams, side: int, limit: int) -> tuple[int, ...] | None:
    """Lexicographically smallest t in [1, limit]^n such that the cube
    t + {0..side-1}^n contains no point of V(k,n); None if there is none."""
    if side < 1 or limit < 1:
        raise InvalidArgumentError("side and limit must be >= 1")
    box = Box((1,) * params.n, (limit + side - 1,) * params.n)
    _check_scan(box)
    holes = ~kfree_mask(box, params)
    blocks = holes.astype(np.int32)
    for axis in range(params.n):
        c = np.cumsum(blocks, axis=axis)
        lead = np.take(c, range(side - 1, c.shape[axis]), axis=axis)
        tail = np.take(c, range(0, c.shape[axis] - side + 1), axis=axis) - np.take(
            blocks, range(0, blocks.shape[axis] - side + 1), axis=axis
        )
        blocks = lead - tail
    hits = np.argwhere(blocks == side**params.n)
    if len(hits) == 0:
        return None
    return tuple(int(v) + 1 for v in hits[0])


def write_points(points: list[tuple[int, ...]], f: IO[str]) -> None:
    """Newline-delimited integer tuples, one point per line."""
    f.write("# schema: kfree.points.v1\n")
    for p in points:
        f.write(" ".join(str(c) for c in p) + "\n")


def iter_cube_schedule(n: int, N_max: int, steps: int = 6, one_sided: bool | None = None) -> Iterator[Box]:
    """Doubling cube schedule ending at N_max: one-sided [1,N] when n == 1,
    centered [-N,N]^n otherwise (overridable)."""
    if N_max < 1 or steps < 1:
        raise InvalidArgumentError("need N_max >= 1 and steps >= 1")
    if one_sided is None:
        one_sided = n == 1
    sizes = sorted({max(1, N_max >> j) for j in range(steps - 1, -1, -1)})
    for N in sizes:
        yield Box.one_sided(n, N) if one_sided else Box.centered(n, N)
