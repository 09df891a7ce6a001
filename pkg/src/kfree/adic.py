"""Internal space for k-free lattice points.

The internal space is the compact group H = prod_p (Z^n / p^k Z^n) over all
primes p, with the product topology and the Haar measure that gives each
finite factor total mass 1 (this normalization is forced by the k-free
window measure prod_p (1 - p^-nk) = 1/zeta(nk); with counting measure on
Z^n the embedded lattice then has density 1).

Windows are restricted to product form: an explicit component per prime up
to a truncation bound, plus a uniform tail convention beyond it.  The
k-free window removes the zero residue from every factor; it is closed with
empty interior, so it equals its own topological boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Union

import numpy as np

from . import arith
from .errors import InvalidArgumentError, ResourceLimitError, UnsupportedWindowError

FULL = "full"
COMPLEMENT_OF_ZERO = "complement-of-zero"

# explicit residue sets are frozensets of coordinate tuples in [0, p^k)^n
Component = Union[str, frozenset]

_BRUTE_FORCE_CAP = 1 << 22


@dataclass(frozen=True)
class SchemeParams:
    """Dimension n and power k of the point set V(k,n); requires n*k > 1."""

    n: int
    k: int

    def __post_init__(self):
        if self.n < 1 or self.k < 1:
            raise InvalidArgumentError(f"need n, k >= 1, got n={self.n}, k={self.k}")
        if self.n * self.k <= 1:
            raise InvalidArgumentError("degenerate scheme: n*k must exceed 1")


@dataclass(frozen=True)
class StarImage:
    """Residues of a lattice point modulo p^k Z^n for each prime p <= truncation."""

    truncation: int
    residues: Mapping[int, tuple[int, ...]]


def star_map(x: tuple[int, ...], P: int, params: SchemeParams) -> StarImage:
    """Componentwise reduction x mod p^k Z^n for every prime p <= P."""
    if P < 2:
        raise InvalidArgumentError(f"prime bound must be >= 2, got {P}")
    if len(x) != params.n:
        raise InvalidArgumentError(f"point has dimension {len(x)}, scheme has n={params.n}")
    residues = {}
    for p in arith.primes_up_to(P):
        q = p**params.k
        residues[p] = tuple(c % q for c in x)
    return StarImage(truncation=P, residues=residues)


@dataclass(frozen=True)
class AdicWindow:
    """Product-form window: per-prime components up to a truncation, then a tail.

    components maps each prime p <= truncation to FULL, COMPLEMENT_OF_ZERO,
    or an explicit frozenset of residue tuples; primes beyond the truncation
    follow the tail convention (FULL or COMPLEMENT_OF_ZERO).
    """

    params: SchemeParams
    truncation: int
    components: Mapping[int, Component] = field(default_factory=dict)
    tail: str = COMPLEMENT_OF_ZERO

    def __post_init__(self):
        if self.truncation < 2:
            raise InvalidArgumentError("window truncation must be >= 2")
        if self.tail not in (FULL, COMPLEMENT_OF_ZERO):
            raise InvalidArgumentError(f"unknown tail convention {self.tail!r}")
        for p, comp in self.components.items():
            if isinstance(comp, str):
                if comp not in (FULL, COMPLEMENT_OF_ZERO):
                    raise InvalidArgumentError(f"unknown component {comp!r} at p={p}")
            else:
                order = p ** (self.params.n * self.params.k)
                if len(comp) > order:
                    raise InvalidArgumentError(f"component at p={p} exceeds group order")

    @classmethod
    def kfree(cls, params: SchemeParams, truncation: int = 2) -> "AdicWindow":
        """The k-free window: every component is the complement of zero."""
        comps = {p: COMPLEMENT_OF_ZERO for p in arith.primes_up_to(truncation)}
        return cls(params, truncation, comps, tail=COMPLEMENT_OF_ZERO)

    @classmethod
    def truncated_kfree(cls, params: SchemeParams, P: int) -> "AdicWindow":
        """Regular approximant: complement-of-zero up to P, full beyond."""
        comps = {p: COMPLEMENT_OF_ZERO for p in arith.primes_up_to(P)}
        return cls(params, P, comps, tail=FULL)

    @classmethod
    def full(cls, params: SchemeParams) -> "AdicWindow":
        """The whole internal space H."""
        return cls(params, 2, {2: FULL}, tail=FULL)

    def component_at(self, p: int) -> Component:
        if p <= self.truncation:
            return self.components.get(p, self.tail)
        return self.tail

    def is_kfree_family(self) -> bool:
        return self.tail == COMPLEMENT_OF_ZERO and all(
            c == COMPLEMENT_OF_ZERO for c in self.components.values()
        )


def _component_contains(comp: Component, residue: tuple[int, ...]) -> bool:
    if comp == FULL:
        return True
    if comp == COMPLEMENT_OF_ZERO:
        return any(c != 0 for c in residue)
    return residue in comp


def in_window(s: StarImage, W: AdicWindow) -> bool:
    """Membership of a star image in the window, checked prime by prime.

    Primes in (W.truncation, s.truncation] are tested against the tail
    convention; the image must be at least as finely truncated as the window.
    For complement-of-zero tails this decides membership of the truncated
    image: it is exact for a point x once s.truncation covers every prime
    with p^k <= max|x_i| (rejections are always definitive).
    """
    if s.truncation < W.truncation:
        raise InvalidArgumentError(
            f"star image truncated at {s.truncation}, window needs {W.truncation}"
        )
    for p, residue in s.residues.items():
        if not _component_contains(W.component_at(p), residue):
            return False
    return True


@dataclass(frozen=True)
class MeasureResult:
    """A Haar measure value with a rigorous bracket [lower, upper].

    `exact` carries the value as a Fraction whenever it is an exact
    rational (clopen cylinder windows and the closed-form boundary).
    """

    value: float
    lower: float
    upper: float
    exact: Fraction | None = None

    def __post_init__(self):
        if not (self.lower <= self.value <= self.upper):
            raise InvalidArgumentError("measure bracket does not contain value")


def _component_density(comp: Component, p: int, params: SchemeParams) -> Fraction:
    order = p ** (params.n * params.k)
    if comp == FULL:
        return Fraction(1)
    if comp == COMPLEMENT_OF_ZERO:
        return Fraction(order - 1, order)
    return Fraction(len(comp), order)


def haar_measure(W: AdicWindow, zeta_tol: float = 1e-9) -> MeasureResult:
    """theta_H of a product window.

    tail = FULL gives an exact rational (finite product of component
    densities).  tail = COMPLEMENT_OF_ZERO multiplies in the infinite
    product prod_{p>P} (1 - p^-nk) = (1/zeta(nk)) / prod_{p<=P} (1 - p^-nk),
    bracketed through the certified zeta value.
    """
    if not zeta_tol > 0:
        raise InvalidArgumentError("zeta tolerance must be positive")
    params = W.params
    nk = params.n * params.k
    comp_prod = Fraction(1)
    kfree_prod = Fraction(1)
    for p in arith.primes_up_to(W.truncation):
        comp_prod *= _component_density(W.component_at(p), p, params)
        order = p**nk
        kfree_prod *= Fraction(order - 1, order)
    if W.tail == FULL:
        v = float(comp_prod)
        return MeasureResult(value=v, lower=v, upper=v, exact=comp_prod)
    zv = arith.zeta(nk, zeta_tol)
    ratio = float(comp_prod / kfree_prod)
    value = ratio / zv.value
    lower = ratio / (zv.value + zv.error_bound) * (1 - 1e-14)
    upper = ratio / (zv.value - zv.error_bound) * (1 + 1e-14)
    return MeasureResult(value=value, lower=lower, upper=upper)


def van_hove_boundary_measure(
    W: AdicWindow, P_U: int, zeta_tol: float = 1e-9
) -> MeasureResult:
    """theta_H of the U-thickened boundary of the k-free window, where U is
    the cylinder unit neighbourhood {h : h_p = 0 for all p <= P_U}.

    The k-free window is closed with empty interior, so its boundary is the
    window itself and the closure of its complement is all of H; the
    thickened boundary then reduces to the dilation U.W, whose measure is
    the exact finite product prod_{p<=P_U} (1 - p^-nk).  This identity is
    validated against the literal finite-group computation in
    finite_boundary_check.
    """
    if not W.is_kfree_family():
        raise UnsupportedWindowError(
            "closed-form boundary measure implemented for the k-free window only"
        )
    if P_U < 2:
        raise InvalidArgumentError(f"cylinder prime bound must be >= 2, got {P_U}")
    nk = W.params.n * W.params.k
    prod = Fraction(1)
    for p in arith.primes_up_to(P_U):
        order = p**nk
        prod *= Fraction(order - 1, order)
    v = float(prod)
    result = MeasureResult(value=v, lower=v, upper=v, exact=prod)
    # the thickened boundary contains the boundary itself
    if result.value < haar_measure(W, zeta_tol).lower:
        raise InvalidArgumentError("boundary measure fell below the window measure")
    return result


@dataclass(frozen=True)
class FiniteBoundaryCheck:
    """Literal thickened-boundary computation in a finite truncation."""

    boundary: Fraction       # normalized size of (U.cl W ∩ cl W^c) ∪ (U.cl W^c ∩ cl W)
    dilated_window: Fraction  # normalized size of U.W
    sets_equal: bool          # thickened boundary == U.W as sets
    group_order: int


def finite_boundary_check(
    params: SchemeParams, P_U: int, prime_bound: int
) -> FiniteBoundaryCheck:
    """Brute-force evaluation of the thickened-boundary definition in the
    finite group prod_{p<=prime_bound} (Z/p^k Z)^n with counting measure.

    Closures are identities (the finite group is discrete); Minkowski sums
    are evaluated literally as indicator dilations.  The truncation must
    contain a prime beyond P_U: those factors stand in for the infinitely
    many tail factors that make the complement of the k-free window dense.
    """
    primes = arith.primes_up_to(prime_bound).primes
    if P_U >= primes[-1]:
        raise InvalidArgumentError(
            "finite model needs a truncation prime beyond the cylinder bound"
        )
    q = params.k
    mods: list[int] = []
    prime_axes: list[list[int]] = []
    for p in primes:
        axes = list(range(len(mods), len(mods) + params.n))
        prime_axes.append(axes)
        mods.extend([p**q] * params.n)
    order = math.prod(mods)
    if order > _BRUTE_FORCE_CAP:
        raise ResourceLimitError(f"finite group of order {order} exceeds cap")
    shape = tuple(mods)

    window = np.ones(shape, dtype=bool)
    for axes in prime_axes:
        idx: list[object] = [slice(None)] * len(mods)
        for a in axes:
            idx[a] = 0
        window[tuple(idx)] = False  # remove the zero residue of this factor

    cylinder = np.ones(shape, dtype=bool)
    for p, axes in zip(primes, prime_axes):
        if p > P_U:
            continue
        for a in axes:
            idx = [slice(None)] * len(mods)
            idx[a] = slice(1, None)
            cylinder[tuple(idx)] = False

    def dilate(a: np.ndarray, b: np.ndarray) -> np.ndarray:
        # Minkowski sum of indicator supports; roll the larger set by each
        # element of the smaller one (the group is a product of cyclic groups).
        if int(a.sum()) > int(b.sum()):
            a, b = b, a
        out = np.zeros(shape, dtype=bool)
        all_axes = tuple(range(len(mods)))
        for u in np.argwhere(a):
            out |= np.roll(b, tuple(int(c) for c in u), axis=all_axes)
        return out

    complement = ~window
    dilated_w = dilate(cylinder, window)
    dilated_wc = dilate(cylinder, complement)
    boundary = (dilated_w & complement) | (dilated_wc & window)
    return FiniteBoundaryCheck(
        boundary=Fraction(int(boundary.sum()), order),
        dilated_window=Fraction(int(dilated_w.sum()), order),
        sets_equal=bool(np.array_equal(boundary, dilated_w)),
        group_order=order,
    )
