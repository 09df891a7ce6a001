"""Runtime invariant suite behind the `verify` CLI subcommand.

Each check is deterministic: the detail string carries only counts and
exact values, never timings, so runs with different worker counts must
produce byte-identical reports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from . import adic, arith, euclid, patterns, sieve
from .adic import SchemeParams
from .sieve import Box


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str


def _factor_exponents(m: int) -> dict[int, int]:
    m = abs(m)
    out: dict[int, int] = {}
    p = 2
    while p * p <= m:
        while m % p == 0:
            out[p] = out.get(p, 0) + 1
            m //= p
        p += 1
    if m > 1:
        out[m] = out.get(m, 0) + 1
    return out


def check_zeta(workers: int) -> CheckResult:
    zv = arith.zeta(2, 1e-9)
    ok = abs(zv.value - math.pi**2 / 6) <= zv.error_bound <= 1e-9
    prod = 1.0
    for p in arith.primes_up_to(10**4):
        prod *= 1.0 / (1.0 - p**-2)
    ok &= abs(prod - zv.value) <= zv.error_bound + 1e-4  # integral tail at 10^4
    return CheckResult("arith.zeta-bracket", ok, f"zeta(2)={zv.value:.12f}")


def check_kfree_oracle(workers: int) -> CheckResult:
    bad = 0
    for m in range(-3000, 3001):
        for k in (1, 2, 3):
            if m == 0:
                expected = False
            elif abs(m) == 1:
                expected = True
            else:
                expected = all(e < k for e in _factor_exponents(m).values())
            if arith.is_kfree_integer(m, k) != expected:
                bad += 1
    return CheckResult("arith.kfree-vs-factorization", bad == 0, f"mismatches={bad}")


def check_haar_truncated(workers: int) -> CheckResult:
    w = adic.AdicWindow.truncated_kfree(SchemeParams(1, 2), 3)
    m = adic.haar_measure(w)
    ok = m.exact == Fraction(2, 3)
    return CheckResult("adic.haar-truncated-exact", ok, f"measure={m.exact}")


def check_haar_kfree(workers: int) -> CheckResult:
    m = adic.haar_measure(adic.AdicWindow.kfree(SchemeParams(1, 2)), 1e-9)
    ok = m.lower <= 6 / math.pi**2 <= m.upper and (m.upper - m.lower) < 1e-8
    return CheckResult("adic.haar-kfree-bracket", ok, f"value={m.value:.12f}")


def check_boundary_bruteforce(workers: int) -> CheckResult:
    params = SchemeParams(1, 2)
    ok = True
    details = []
    for pu, expected in ((2, Fraction(3, 4)), (3, Fraction(2, 3))):
        fb = adic.finite_boundary_check(params, pu, 5)
        closed = adic.van_hove_boundary_measure(adic.AdicWindow.kfree(params), pu).exact
        ok &= fb.sets_equal and fb.boundary == expected == closed
        details.append(f"P_U={pu}:{fb.boundary}")
    return CheckResult("adic.boundary-bruteforce", ok, " ".join(details))


def check_boundary_monotone(workers: int) -> CheckResult:
    params = SchemeParams(1, 2)
    w = adic.AdicWindow.kfree(params)
    vals = [adic.van_hove_boundary_measure(w, pu).value for pu in (2, 3, 5, 7, 11)]
    floor_ = adic.haar_measure(w).lower
    ok = all(a >= b for a, b in zip(vals, vals[1:])) and all(v >= floor_ for v in vals)
    return CheckResult("adic.boundary-monotone", ok, f"last={vals[-1]:.9f}")


def check_sieve_consistency(workers: int) -> CheckResult:
    p12 = SchemeParams(1, 2)
    box = Box.one_sided(1, 20000)
    root = arith.int_kth_root(box.max_abs, p12.k)
    ok = sieve.kfree_points(box, p12) == sieve.truncated_points(box, p12, max(2, root))
    p21 = SchemeParams(2, 1)
    box2 = Box.centered(2, 35)
    ok &= sieve.kfree_points(box2, p21) == sieve.truncated_points(box2, p21, 40)
    return CheckResult("sieve.kfree-vs-truncated", ok, "boxes=2")


def check_density_truncated(workers: int) -> CheckResult:
    table = sieve.density_scan(
        SchemeParams(1, 2), [Box.one_sided(1, 400000)], family="truncated", P=2,
        workers=workers,
    )
    f = table.rows[-1].frequency
    ok = f == Fraction(3, 4)
    return CheckResult("sieve.density-truncated-exact", ok, f"frequency={f}")


def check_density_kfree(workers: int) -> CheckResult:
    table = sieve.density_scan(
        SchemeParams(1, 2), [Box.one_sided(1, 10**6)], workers=workers
    )
    r = table.rows[-1]
    diff = abs(float(r.frequency) - 6 / math.pi**2)
    ok = diff < 2e-3
    return CheckResult("sieve.density-kfree", ok, f"count={r.count} diff={diff:.2e}")


def check_certificates(workers: int) -> CheckResult:
    ok = True
    p12 = SchemeParams(1, 2)
    for m in range(1, 9):
        cert = sieve.crt_hole(p12, m)
        ok &= cert.verify()
        shifted = sieve.HoleCertificate(
            params=cert.params, side=cert.side,
            t=tuple(v + cert.modulus for v in cert.t),
            assignments=cert.assignments, modulus=cert.modulus,
        )
        ok &= shifted.verify()
    p21 = SchemeParams(2, 1)
    for m in (1, 2):
        ok &= sieve.crt_hole(p21, m).verify()
    c3 = sieve.crt_hole(p12, 3)
    ok &= c3.t[0] % 900 == 548
    return CheckResult("sieve.crt-certificates", ok, f"m3_t={c3.t[0]}")


def check_scan_hole(workers: int) -> CheckResult:
    t3 = sieve.scan_hole(SchemeParams(1, 2), 3, 10**4)
    t1 = sieve.scan_hole(SchemeParams(1, 2), 1, 100)
    ok = t3 == (48,) and t1 == (4,)
    return CheckResult("sieve.scan-hole", ok, f"m3={t3} m1={t1}")


def check_census_oracle(workers: int) -> CheckResult:
    params = SchemeParams(1, 2)
    box = Box.one_sided(1, 10**6)
    mask = sieve.kfree_mask(box, params)
    counts = []
    ok = True
    for L in range(1, 7):
        shape = patterns.Shape.interval(L)
        c = patterns.census(mask, box, shape, workers=workers)
        o = patterns.admissible_count(shape, params)
        ok &= c.count == o
        counts.append(f"{L}:{c.count}")
    return CheckResult("patterns.census-oracle-equality", ok, " ".join(counts))


def check_subset_closure(workers: int) -> CheckResult:
    params = SchemeParams(1, 2)
    box = Box.one_sided(1, 10**6)
    shape = patterns.Shape.interval(6)
    c = patterns.census(sieve.kfree_mask(box, params), box, shape, workers=workers)
    v = patterns.subset_closure_check(c, params)
    return CheckResult("patterns.subset-closure", len(v) == 0, f"violations={len(v)}")


def check_complement(workers: int) -> CheckResult:
    params = SchemeParams(2, 1)
    box = Box.centered(2, 300)
    res = patterns.complement_census(
        sieve.kfree_mask(box, params), box, patterns.Shape.cube(3, 2), workers=workers
    )
    return CheckResult(
        "patterns.complement-invariance", res.equal,
        f"counts={res.census.count}/{res.complement.count}",
    )


def check_census_merge(workers: int) -> CheckResult:
    params = SchemeParams(1, 2)
    box = Box.one_sided(1, 10**5)
    mask = sieve.kfree_mask(box, params)
    shape = patterns.Shape.interval(5)
    c1 = patterns.census(mask, box, shape, workers=1)
    cw = patterns.census(mask, box, shape, workers=max(2, workers))
    ok = c1.entries == cw.entries
    return CheckResult("patterns.census-merge", ok, f"count={c1.count}")


def check_submultiplicative(workers: int) -> CheckResult:
    params = SchemeParams(1, 2)
    counts = {L: patterns.admissible_count(patterns.Shape.interval(L), params)
              for L in range(1, 13)}
    ok = all(
        counts[a + b] <= counts[a] * counts[b]
        for a in range(1, 12)
        for b in range(1, 13 - a)
    )
    return CheckResult("patterns.submultiplicativity", ok, f"N12={counts[12]}")


def check_euclid_density(workers: int) -> CheckResult:
    scheme = euclid.QuadraticScheme(d=2, window=(0, 1))
    table = euclid.regular_density_check(scheme, [5000.0])
    r = table.rows[-1]
    diff = abs(float(r.frequency) - r.target_upper)
    return CheckResult("euclid.regular-density", diff < 1e-2, f"count={r.count} diff={diff:.2e}")


def check_euclid_entropy(workers: int) -> CheckResult:
    scheme = euclid.QuadraticScheme(d=2, window=(0, 1))
    report = euclid.regular_entropy_check(scheme, [200])
    r = report.rows[-1]
    return CheckResult(
        "euclid.zero-entropy", r.per_site_log2 < 0.05,
        f"count={r.count} per_site={r.per_site_log2:.4f}",
    )


def check_euclid_discrete(workers: int) -> CheckResult:
    seg = euclid.generate(euclid.QuadraticScheme(d=2, window=(0, 1)), 2000.0)
    gap = seg.min_gap()
    return CheckResult("euclid.uniformly-discrete", gap > 0, f"min_gap={gap:.6f}")


CHECKS: list[Callable[[int], CheckResult]] = [
    check_zeta,
    check_kfree_oracle,
    check_haar_truncated,
    check_haar_kfree,
    check_boundary_bruteforce,
    check_boundary_monotone,
    check_sieve_consistency,
    check_density_truncated,
    check_density_kfree,
    check_certificates,
    check_scan_hole,
    check_census_oracle,
    check_subset_closure,
    check_complement,
    check_census_merge,
    check_submultiplicative,
    check_euclid_density,
    check_euclid_entropy,
    check_euclid_discrete,
]


def run_checks(workers: int = 1) -> list[CheckResult]:
    return [check(workers) for check in CHECKS]
