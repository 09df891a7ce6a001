"""Pattern censuses, the admissibility oracle, and entropy reports.

A pattern of a point set D on a finite shape A (a list of offsets
containing the origin) is the 01-colouring read off at a translate x+A.
Centered censuses translate only to points x of D; coloured censuses
translate to every lattice point.  Patterns are bit-packed in the shape's
fixed offset order, so deduplication is integer equality.

The admissibility oracle counts colourings whose 1-positions miss at least
one residue class mod p^k (componentwise) for every prime with
p^(nk) <= |A|; larger primes cannot be covered by fewer than p^(nk) ones.
Covering all classes of some prime forces a translate into p^k Z^n, so
such colourings never occur in V(k,n).  The converse (every colouring
passing the test occurs) is validated empirically by the census tests, not
assumed.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import IO, Callable, Iterable, Union

import numpy as np

from . import adic, sieve
from .adic import SchemeParams
from .sieve import Box
from .errors import InvalidArgumentError, ResourceLimitError

SHAPE_CAP = 128
ORACLE_CAP_DEFAULT = 24
_PREDICATE_CAP = 1 << 22

MaskLike = Union[np.ndarray, Callable[[tuple[int, ...]], bool], Iterable[tuple[int, ...]]]


@dataclass(frozen=True)
class Shape:
    """Finite ordered list of distinct offsets of Z^n containing the origin.

    The offset order is the canonical bit order of pattern encodings.
    """

    offsets: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if not self.offsets:
            raise InvalidArgumentError("shape needs at least one offset")
        dim = len(self.offsets[0])
        if any(len(o) != dim for o in self.offsets):
            raise InvalidArgumentError("offsets of mixed dimension")
        if len(set(self.offsets)) != len(self.offsets):
            raise InvalidArgumentError("duplicate offsets")
        if (0,) * dim not in self.offsets:
            raise InvalidArgumentError("shape must contain the origin")
        if len(self.offsets) > SHAPE_CAP:
            raise ResourceLimitError(f"shape size {len(self.offsets)} exceeds cap {SHAPE_CAP}")

    @classmethod
    def interval(cls, L: int) -> "Shape":
        """{0, 1, ..., L-1} in Z."""
        if L < 1:
            raise InvalidArgumentError(f"interval length must be >= 1, got {L}")
        return cls(tuple((i,) for i in range(L)))

    @classmethod
    def cube(cls, side: int, dim: int) -> "Shape":
        """{0..side-1}^dim in lexicographic offset order."""
        if side < 1 or dim < 1:
            raise InvalidArgumentError("cube needs side, dim >= 1")
        offs: list[tuple[int, ...]] = [()]
        for _ in range(dim):
            offs = [o + (c,) for o in offs for c in range(side)]
        return cls(tuple(offs))

    @property
    def size(self) -> int:
        return len(self.offsets)

    @property
    def dim(self) -> int:
        return len(self.offsets[0])

    @property
    def origin_index(self) -> int:
        return self.offsets.index((0,) * self.dim)


@dataclass(frozen=True)
class Pattern:
    """A 01-colouring of a shape, bit i giving membership of offset i."""

    shape: Shape
    bits: int

    def __post_init__(self):
        if not 0 <= self.bits < (1 << self.shape.size):
            raise InvalidArgumentError("bits outside the shape's range")

    def to_hex(self) -> str:
        return format(self.bits, f"0{(self.shape.size + 3) // 4}x")

    def ones(self) -> list[tuple[int, ...]]:
        return [o for i, o in enumerate(self.shape.offsets) if (self.bits >> i) & 1]


@dataclass(frozen=True)
class CensusEntry:
    multiplicity: int
    first_translation: tuple[int, ...]


@dataclass
class PatternCensus:
    """Deduplicated patterns seen over a scan region, keyed by bit code."""

    shape: Shape
    mode: str
    scan_region: Box
    entries: dict[int, CensusEntry]

    SCHEMA = "kfree.census.v1"

    @property
    def count(self) -> int:
        return len(self.entries)

    @property
    def codes(self) -> tuple[int, ...]:
        return tuple(sorted(self.entries))

    def patterns(self) -> list[Pattern]:
        return [Pattern(self.shape, c) for c in self.codes]

    def to_json(self, include_patterns: bool = False) -> str:
        doc = {
            "schema": self.SCHEMA,
            "shape": [list(o) for o in self.shape.offsets],
            "mode": self.mode,
            "region": {"lo": list(self.scan_region.lo), "hi": list(self.scan_region.hi)},
            "count": self.count,
        }
        if include_patterns:
            doc["patterns"] = [
                {
                    "bits": Pattern(self.shape, c).to_hex(),
                    "multiplicity": self.entries[c].multiplicity,
                    "first": list(self.entries[c].first_translation),
                }
                for c in self.codes
            ]
        return json.dumps(doc, indent=2)


def _as_mask(points: MaskLike, region: Box) -> np.ndarray:
    grid_shape = tuple(h - l + 1 for l, h in zip(region.lo, region.hi))
    if isinstance(points, np.ndarray):
        if points.shape != grid_shape:
            raise InvalidArgumentError(
                f"mask shape {points.shape} does not match region grid {grid_shape}"
            )
        return points.astype(bool, copy=False)
    mask = np.zeros(grid_shape, dtype=bool)
    if callable(points):
        if region.count > _PREDICATE_CAP:
            raise ResourceLimitError("region too large for a pointwise predicate; pass a mask")
        it = np.nditer(mask, flags=["multi_index"], op_flags=["writeonly"])
        for cell in it:
            x = tuple(i + l for i, l in zip(it.multi_index, region.lo))
            cell[...] = bool(points(x))
        return mask
    for pt in points:
        idx = tuple(c - l for c, l in zip(pt, region.lo))
        if all(0 <= i < s for i, s in zip(idx, grid_shape)):
            mask[idx] = True
    return mask


def _translation_range(region: Box, shape: Shape) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Inclusive range of translations x with x + shape inside the region."""
    xlo, xhi = [], []
    for a in range(region.n):
        offs = [o[a] for o in shape.offsets]
        lo = region.lo[a] - min(offs)
        hi = region.hi[a] - max(offs)
        if lo > hi:
            raise InvalidArgumentError(f"shape does not fit inside region {region}")
        xlo.append(lo)
        xhi.append(hi)
    return tuple(xlo), tuple(xhi)


def _pack_codes(mask: np.ndarray, region: Box, shape: Shape,
                xlo: tuple[int, ...], xhi: tuple[int, ...]) -> tuple[np.ndarray, np.ndarray | None]:
    """Bit-pack every translate's pattern over the grid of translations.

    Returns (lo_word, hi_word); hi_word is None for shapes of <= 64 offsets.
    """
    grid = tuple(h - l + 1 for l, h in zip(xlo, xhi))
    lo_word = np.zeros(grid, dtype=np.uint64)
    hi_word = np.zeros(grid, dtype=np.uint64) if shape.size > 64 else None
    for i, off in enumerate(shape.offsets):
        sl = tuple(
            slice(xlo[a] - region.lo[a] + off[a], xhi[a] - region.lo[a] + off[a] + 1)
            for a in range(region.n)
        )
        bits = mask[sl].astype(np.uint64)
        if i < 64:
            lo_word |= bits << np.uint64(i)
        else:
            hi_word |= bits << np.uint64(i - 64)
    return lo_word, hi_word


def _unique_with_first(lo_word: np.ndarray, hi_word: np.ndarray | None,
                       keep: np.ndarray | None):
    """Deduplicate flattened codes; returns (codes as int list, counts, flat first index)."""
    lo = lo_word.ravel()
    hi = hi_word.ravel() if hi_word is not None else None
    flat_idx = np.arange(lo.shape[0])
    if keep is not None:
        kf = keep.ravel()
        lo = lo[kf]
        hi = hi[kf] if hi is not None else None
        flat_idx = flat_idx[kf]
    if lo.shape[0] == 0:
        return [], np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    if hi is None:
        uniq, first, counts = np.unique(lo, return_index=True, return_counts=True)
        codes = [int(c) for c in uniq]
    else:
        stacked = np.stack([hi, lo], axis=1)
        uniq, first, counts = np.unique(stacked, axis=0, return_index=True, return_counts=True)
        codes = [(int(h) << 64) | int(l) for h, l in uniq]
    return codes, counts, flat_idx[first]


def census(
    points: MaskLike,
    region: Box,
    shape: Shape,
    mode: str = "coloured",
    workers: int = 1,
) -> PatternCensus:
    """Pattern census over every translate fully inside the region.

    Coloured mode reads the pattern at every lattice translation; centered
    mode only at translations that are themselves points of D.  The count
    is a lower bound for the pattern count of the infinite set.
    """
    if mode not in ("coloured", "centered"):
        raise InvalidArgumentError(f"unknown census mode {mode!r}")
    mask = _as_mask(points, region)
    xlo, xhi = _translation_range(region, shape)
    grid0 = xhi[0] - xlo[0] + 1
    chunks = min(max(1, workers), grid0)
    step = math.ceil(grid0 / chunks)
    origin_bit = shape.origin_index

    def scan_chunk(c: int) -> dict[int, CensusEntry]:
        clo = (xlo[0] + c * step,) + xlo[1:]
        chi = (min(xlo[0] + (c + 1) * step - 1, xhi[0]),) + xhi[1:]
        if clo[0] > chi[0]:
            return {}
        lo_word, hi_word = _pack_codes(mask, region, shape, clo, chi)
        keep = None
        if mode == "centered":
            word = lo_word if origin_bit < 64 else hi_word
            keep = (word >> np.uint64(origin_bit % 64)) & np.uint64(1) != 0
        codes, counts, first = _unique_with_first(lo_word, hi_word, keep)
        grid = tuple(h - l + 1 for l, h in zip(clo, chi))
        out = {}
        for code, cnt, fidx in zip(codes, counts, first):
            at = np.unravel_index(int(fidx), grid)
            trans = tuple(int(i) + l for i, l in zip(at, clo))
            out[code] = CensusEntry(int(cnt), trans)
        return out

    if chunks == 1:
        parts = [scan_chunk(0)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(scan_chunk, range(chunks)))
    merged: dict[int, CensusEntry] = {}
    for part in parts:
        for code, e in part.items():
            prev = merged.get(code)
            if prev is None:
                merged[code] = e
            else:
                merged[code] = CensusEntry(
                    prev.multiplicity + e.multiplicity,
                    min(prev.first_translation, e.first_translation),
                )
    ordered = {c: merged[c] for c in sorted(merged)}
    return PatternCensus(shape=shape, mode=mode, scan_region=region, entries=ordered)


def merge_censuses(censuses: list[PatternCensus]) -> PatternCensus:
    """Union of censuses of the same shape and mode.

    Equals the census of the union box whenever the inputs' translation
    ranges partition it (multiplicities add; first translations take the
    lexicographic minimum).
    """
    if not censuses:
        raise InvalidArgumentError("nothing to merge")
    shape, mode = censuses[0].shape, censuses[0].mode
    if any(c.shape != shape or c.mode != mode for c in censuses):
        raise InvalidArgumentError("censuses differ in shape or mode")
    merged: dict[int, CensusEntry] = {}
    for c in censuses:
        for code, e in c.entries.items():
            prev = merged.get(code)
            if prev is None:
                merged[code] = e
            else:
                merged[code] = CensusEntry(
                    prev.multiplicity + e.multiplicity,
                    min(prev.first_translation, e.first_translation),
                )
    lo = tuple(min(c.scan_region.lo[a] for c in censuses) for a in range(shape.dim))
    hi = tuple(max(c.scan_region.hi[a] for c in censuses) for a in range(shape.dim))
    return PatternCensus(
        shape=shape,
        mode=mode,
        scan_region=Box(lo, hi),
        entries={c: merged[c] for c in sorted(merged)},
    )


def _relevant_primes(shape: Shape, params: SchemeParams) -> list[int]:
    nk = params.n * params.k
    out = []
    p = 2
    while p**nk <= shape.size:
        if all(p % q for q in range(2, math.isqrt(p) + 1)):
            out.append(p)
        p += 1
    return out


def _admissible_flags(shape: Shape, params: SchemeParams, cap: int) -> np.ndarray:
    if shape.size > min(cap, 30):  # 2^30 flags is the hard enumeration ceiling
        raise ResourceLimitError(f"shape size {shape.size} over oracle cap {min(cap, 30)}")
    if shape.dim != params.n:
        raise InvalidArgumentError("shape dimension does not match the scheme")
    size = shape.size
    dtype = np.uint32 if size <= 31 else np.uint64
    codes = np.arange(1 << size, dtype=dtype)
    ok = np.ones(1 << size, dtype=bool)
    for p in _relevant_primes(shape, params):
        q = p**params.k
        class_masks: dict[tuple[int, ...], int] = {}
        for i, off in enumerate(shape.offsets):
            cls = tuple(c % q for c in off)
            class_masks[cls] = class_masks.get(cls, 0) | (1 << i)
        if len(class_masks) < q**params.n:
            continue  # some residue class untouched: coverage impossible
        covers = np.ones(1 << size, dtype=bool)
        for mask_bits in class_masks.values():
            covers &= (codes & dtype(mask_bits)) != 0
        ok &= ~covers
    return ok


def admissible_count(shape: Shape, params: SchemeParams, cap: int = ORACLE_CAP_DEFAULT) -> int:
    """Exact number of colourings of the shape admissible in V(k,n)."""
    return int(np.count_nonzero(_admissible_flags(shape, params, cap)))


def admissible_patterns(shape: Shape, params: SchemeParams, cap: int = ORACLE_CAP_DEFAULT) -> list[int]:
    """Sorted bit codes of all admissible colourings."""
    return [int(c) for c in np.flatnonzero(_admissible_flags(shape, params, cap))]


def subset_closure_check(
    pc: PatternCensus,
    params: SchemeParams,
    admissible: set[int] | None = None,
    cap: int = ORACLE_CAP_DEFAULT,
) -> list[tuple[int, int]]:
    """Check that every scanned pattern and each of its sub-patterns is
    oracle-admissible; returns (pattern, offending sub-pattern) pairs."""
    if admissible is None:
        admissible = set(admissible_patterns(pc.shape, params, cap))
    violations = []
    for code in pc.codes:
        sub = code
        while True:
            if sub not in admissible:
                violations.append((code, sub))
            if sub == 0:
                break
            sub = (sub - 1) & code
    return violations


@dataclass(frozen=True)
class ComplementCensus:
    census: PatternCensus
    complement: PatternCensus
    counts_equal: bool
    flip_bijection: bool

    @property
    def equal(self) -> bool:
        return self.counts_equal and self.flip_bijection


def complement_census(
    points: MaskLike, region: Box, shape: Shape, workers: int = 1
) -> ComplementCensus:
    """Coloured censuses of D and of its lattice complement over one region.

    Inverting colours maps the pattern set of D bijectively onto that of
    the complement, so the counts agree; both facts are checked literally.
    """
    mask = _as_mask(points, region)
    c1 = census(mask, region, shape, mode="coloured", workers=workers)
    c2 = census(~mask, region, shape, mode="coloured", workers=workers)
    full = (1 << shape.size) - 1
    flipped = {code ^ full for code in c1.entries}
    bijection = flipped == set(c2.entries)
    return ComplementCensus(
        census=c1,
        complement=c2,
        counts_equal=c1.count == c2.count,
        flip_bijection=bijection,
    )


@dataclass(frozen=True)
class EntropyRow:
    L: int
    count: int
    per_site_log2: float
    lower_bits: float
    upper_bits: float


@dataclass
class EntropyReport:
    """Per-shape normalized pattern counts next to the analytic sandwich.

    per_site_log2 = log2(count)/theta(A) with the convention log 0 = 0.
    The lower bound comes from the subset argument (max points of V in a
    scanned translate, per site); the upper bound is the thickened-boundary
    measure, which bounds the limit of per-site values, not each finite row.
    """

    rows: list[EntropyRow]

    SCHEMA = "kfree.entropy.v1"

    def write_csv(self, f: IO[str]) -> None:
        f.write(f"# schema: {self.SCHEMA}\n")
        f.write("L,count,per_site_log2,lower_bits,upper_bits\n")
        for r in self.rows:
            f.write(
                f"{r.L},{r.count},{r.per_site_log2:.17g},"
                f"{r.lower_bits:.17g},{r.upper_bits:.17g}\n"
            )


def _max_window_count(mask: np.ndarray, region: Box, shape: Shape) -> int:
    """max over translations of |(x + shape) ∩ D| for the mask of D."""
    xlo, xhi = _translation_range(region, shape)
    grid = tuple(h - l + 1 for l, h in zip(xlo, xhi))
    acc = np.zeros(grid, dtype=np.uint32)
    for off in shape.offsets:
        sl = tuple(
            slice(xlo[a] - region.lo[a] + off[a], xhi[a] - region.lo[a] + off[a] + 1)
            for a in range(region.n)
        )
        acc += mask[sl].astype(np.uint32)
    return int(acc.max())


def entropy_table(
    params: SchemeParams,
    entries: list[tuple[Shape, int]],
    P_U: int | list[int] = 100,
    scan_box: Box | None = None,
    scan_mask: np.ndarray | None = None,
    zeta_tol: float = 1e-9,
) -> EntropyReport:
    """Entropy report rows from (shape, pattern count) pairs.

    Counts may come from a census or from the admissibility oracle.  The
    scan region (defaulting to [1,10^6] for n=1, [-500,500]^n otherwise)
    feeds the subset-argument lower bound.
    """
    if scan_box is None:
        scan_box = Box.one_sided(1, 10**6) if params.n == 1 else Box.centered(params.n, 500)
    if scan_mask is None:
        scan_mask = sieve.kfree_mask(scan_box, params)
    sizes = [shape.size for shape, _ in entries]
    if any(a > b for a, b in zip(sizes, sizes[1:])):
        raise InvalidArgumentError("shapes must have nondecreasing size")
    bounds = P_U if isinstance(P_U, list) else [P_U] * len(entries)
    if len(bounds) != len(entries):
        raise InvalidArgumentError("P_U schedule length does not match entries")
    window = adic.AdicWindow.kfree(params)
    rows = []
    for (shape, count), pu in zip(entries, bounds):
        theta = shape.size
        per_site = math.log2(count) / theta if count > 0 else 0.0
        lower = _max_window_count(scan_mask, scan_box, shape) / theta
        upper = adic.van_hove_boundary_measure(window, pu, zeta_tol).value
        rows.append(EntropyRow(L=theta, count=count, per_site_log2=per_site,
                               lower_bits=lower, upper_bits=upper))
    return EntropyReport(rows=rows)
