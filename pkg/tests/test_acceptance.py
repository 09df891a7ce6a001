"""Acceptance suite: every criterion at its stated tolerance.

Each test prints exactly one pass/fail line; run with `pytest -v -s
tests/test_acceptance.py` to see them all.
"""

import math
from fractions import Fraction

import pytest

from kfree import adic, arith, cli, euclid, patterns, sieve
from kfree.adic import AdicWindow, SchemeParams
from kfree.patterns import Shape
from kfree.sieve import Box

P12 = SchemeParams(1, 2)
P21 = SchemeParams(2, 1)

INV_ZETA2 = 6 / math.pi**2  # = 0.6079271018...


def report(num: int, ok: bool, detail: str) -> None:
    print(f"criterion {num}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def sqfree_1e7():
    box = Box.one_sided(1, 10**7)
    return box, sieve.kfree_mask(box, P12)


def test_criterion_1_density_formula():
    zv = arith.zeta(2, 1e-9)
    assert zv.error_bound <= 1e-9
    target = 1 / zv.value

    sq = sieve.count_points(Box.one_sided(1, 10**6), P12)
    f_sq = sq / 10**6
    d_sq = abs(f_sq - target)

    box = Box.centered(2, 1000)
    vis = sieve.count_points(box, P21)
    f_vis = vis / box.count
    d_vis = abs(f_vis - target)

    ok = d_sq < 2e-3 and d_vis < 5e-3
    report(1, ok, f"squarefree f={f_sq:.6f} (|diff|={d_sq:.2e} < 2e-3), "
                  f"visible f={f_vis:.6f} (|diff|={d_vis:.2e} < 5e-3)")


def test_criterion_2_truncated_density_exact():
    boxes = [Box.one_sided(1, 36 * m) for m in (5, 50, 5000, 25000)]
    table = sieve.density_scan(P12, boxes, family="truncated", P=3)
    expected = Fraction(3, 4) * Fraction(8, 9)
    ok = all(r.frequency == expected == Fraction(2, 3) for r in table.rows)
    window = adic.haar_measure(AdicWindow.truncated_kfree(P12, 3))
    ok &= window.exact == expected
    report(2, ok, f"frequency == {expected} exactly on {len(boxes)} boxes "
                  f"(sides {[36*m for m in (5, 50, 5000, 25000)]})")


def test_criterion_3_van_hove_boundary_convergence():
    W = AdicWindow.kfree(P12)
    vals = {}
    ok = True
    for P in (10, 100, 1000):
        v = adic.van_hove_boundary_measure(W, P).value
        tail = arith.prime_tail_sum(2, P, 2 * 10**6)
        ok &= abs(v - INV_ZETA2) <= 2 * tail
        vals[P] = v
    ok &= vals[10] >= vals[100] >= vals[1000] >= INV_ZETA2
    brute_ok = True
    for pu in (2, 3):
        fb = adic.finite_boundary_check(P12, pu, 5)
        closed = adic.van_hove_boundary_measure(W, pu).exact
        brute_ok &= fb.sets_equal and fb.boundary == closed
    ok &= brute_ok
    report(3, ok, f"products {vals[10]:.6f} >= {vals[100]:.6f} >= {vals[1000]:.6f} "
                  f"-> {INV_ZETA2:.6f}; finite brute force (primes<=5) exact: {brute_ok}")


def test_criterion_4_oracle_small_shapes(sqfree_1e7):
    box, mask = sqfree_1e7
    ok = patterns.admissible_count(Shape.interval(4), P12) == 15
    details = []
    for L in range(1, 9):
        shape = Shape.interval(L)
        c = patterns.census(mask, box, shape)
        oracle_codes = set(patterns.admissible_patterns(shape, P12))
        ok &= c.count == len(oracle_codes)
        ok &= set(c.entries) == oracle_codes
        violations = patterns.subset_closure_check(c, P12, admissible=oracle_codes)
        ok &= violations == []
        details.append(f"L{L}:{c.count}")
    report(4, ok, "census[1,1e7] == oracle and subset-closed for " + " ".join(details))


def test_criterion_5_entropy_sandwich():
    counts = {L: patterns.admissible_count(Shape.interval(L), P12) for L in range(1, 17)}
    counts[20] = patterns.admissible_count(Shape.interval(20), P12)
    per_site = {L: math.log2(counts[L]) / L for L in (4, 8, 12, 16, 20)}
    ok = all(INV_ZETA2 <= v <= 1.0 for v in per_site.values())
    sub_ok = all(
        counts[a + b] <= counts[a] * counts[b]
        for a in range(1, 16)
        for b in range(1, 17 - a)
    )
    ok &= sub_ok
    report(5, ok, "per-site bits " +
           " ".join(f"L{L}={per_site[L]:.4f}" for L in (4, 8, 12, 16, 20)) +
           f" all in [{INV_ZETA2:.4f}, 1]; submultiplicative up to 16: {sub_ok}")


def test_criterion_6_hole_certificates():
    cert3 = sieve.crt_hole(P12, 3)
    ok = cert3.t[0] % 900 == 548
    ok &= sorted(cert3.assignments.values()) == [2, 3, 5]
    for m in range(1, 21):
        ok &= sieve.crt_hole(P12, m).verify()
    for m in (1, 2, 3):
        ok &= sieve.crt_hole(P21, m).verify()
    scan = sieve.scan_hole(P12, 3, 10**4)
    ok &= scan == (48,)
    big = sieve.crt_hole(P12, 20).modulus
    report(6, ok, f"t=548 (mod 900); certificates verified to m=20 (n=1, modulus ~1e{len(str(big))-1}) "
                  f"and m=3 (n=2); scan_hole={scan[0]}")


def test_criterion_7_complement_invariance():
    box = Box.centered(2, 500)
    mask = sieve.kfree_mask(box, P21)
    res = patterns.complement_census(mask, box, Shape.cube(3, 2))
    ok = res.counts_equal and res.flip_bijection
    report(7, ok, f"visible/invisible 3x3 counts {res.census.count}/{res.complement.count} "
                  f"equal, flip bijection: {res.flip_bijection}")


def test_criterion_8_regular_contrast():
    scheme = euclid.QuadraticScheme(d=2, window=(0, 1))
    table = euclid.regular_density_check(scheme, [10**4])
    row = table.rows[-1]
    d = abs(float(row.frequency) - scheme.window_length / (2 * math.sqrt(2)))
    ok = d < 1e-2
    rep = euclid.regular_entropy_check(scheme, [200])
    e_euclid = rep.rows[-1].per_site_log2
    ok &= e_euclid < 0.05
    n20 = patterns.admissible_count(Shape.interval(20), P12)
    e_kfree = math.log2(n20) / 20
    ok &= e_kfree >= 0.6
    report(8, ok, f"euclid density diff {d:.2e} < 1e-2; per-site bits: "
                  f"euclid L=200 {e_euclid:.4f} < 0.05 vs k-free L=20 {e_kfree:.4f} >= 0.6")


def test_criterion_9_verify_determinism(capsys):
    outputs = []
    codes = []
    for w in ("1", "8"):
        codes.append(cli.main(["verify", "--workers", w]))
        outputs.append(capsys.readouterr().out)
    ok = codes == [0, 0] and outputs[0] == outputs[1]
    with capsys.disabled():
        report(9, ok, f"verify exit codes {codes}, reports byte-identical: "
                      f"{outputs[0] == outputs[1]} ({len(outputs[0].splitlines())} lines)")
