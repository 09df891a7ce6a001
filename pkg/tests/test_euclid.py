import math

import pytest

from kfree import euclid
from kfree.errors import InvalidArgumentError

SQRT2 = math.sqrt(2)


def brute_segment(scheme, T):
    """Independent exhaustive (a, b) enumeration with float window tests."""
    lo = scheme.endpoints[0].to_float(scheme.d)
    hi = scheme.endpoints[1].to_float(scheme.d)
    s = math.sqrt(scheme.d)
    out = []
    bound = int(T) + abs(int(lo)) + abs(int(hi)) + 3
    for a in range(-bound, bound + 1):
        for b in range(-bound, bound + 1):
            x = a + b * s
            conj = a - b * s
            if 0 <= x <= T and lo <= conj < hi:
                out.append((a, b))
    return sorted(out, key=lambda ab: ab[0] + ab[1] * s)


def test_scheme_validation():
    with pytest.raises(InvalidArgumentError):
        euclid.QuadraticScheme(d=4, window=(0, 1))
    with pytest.raises(InvalidArgumentError):
        euclid.QuadraticScheme(d=1, window=(0, 1))
    with pytest.raises(InvalidArgumentError):
        euclid.QuadraticScheme(d=2, window=(1, 1))  # zero-length window
    s = euclid.QuadraticScheme(d=2, window=(0, 1))
    assert s.covolume == 2 * SQRT2
    assert s.dens == 1 / (2 * SQRT2)


def test_generate_matches_bruteforce():
    scheme = euclid.QuadraticScheme(d=2, window=(0, 1))
    seg = euclid.generate(scheme, 100.0)
    assert list(seg.pairs) == brute_segment(scheme, 100.0)
    assert len(seg.pairs) == 36  # ~ 100/(2*sqrt(2)) = 35.4
    scheme3 = euclid.QuadraticScheme(d=3, window=(-1, 1))
    seg3 = euclid.generate(scheme3, 60.0)
    assert list(seg3.pairs) == brute_segment(scheme3, 60.0)


def test_generate_tiny_window():
    scheme = euclid.QuadraticScheme(d=2, window=((0, 0, 1), (1, 0, 100)))  # [0, 0.01)
    seg = euclid.generate(scheme, 10**4)
    target = 10**4 * 0.01 / (2 * SQRT2)
    assert abs(len(seg.pairs) - target) < 15


def test_points_sorted_uniformly_discrete():
    scheme = euclid.QuadraticScheme(d=2, window=(0, 1))
    for T in (500.0, 2000.0):
        seg = euclid.generate(scheme, T)
        v = seg.values
        assert all(a < b for a, b in zip(v, v[1:]))
        assert seg.min_gap() > 1.0  # gaps are 1+sqrt(2) or 2+sqrt(2)


def test_exact_halfopen_boundaries():
    scheme = euclid.QuadraticScheme(d=2, window=(0, 1))
    assert scheme.conjugate_in_window(0, 0)  # conjugate exactly at lo
    assert not scheme.conjugate_in_window(1, 0)  # conjugate exactly at hi
    # exact quadratic endpoint: window [0, (1+sqrt(2))/2)
    scheme2 = euclid.QuadraticScheme(d=2, window=((0, 0, 1), (1, 1, 2)))
    hi = (1 + SQRT2) / 2
    for a, b in [(1, 0), (2, 1), (0, -1), (1, -1), (3, 2)]:
        conj = a - b * SQRT2
        assert scheme2.conjugate_in_window(a, b) == (0 <= conj < hi), (a, b)


def test_float_window_tolerance_path():
    scheme = euclid.QuadraticScheme(d=2, window=(0.25, 1.25))
    seg = euclid.generate(scheme, 200.0)
    assert list(seg.pairs) == brute_segment(scheme, 200.0)


def test_density_convergence():
    scheme = euclid.QuadraticScheme(d=2, window=(0, 1))
    table = euclid.regular_density_check(scheme, [625.0, 10**4])
    target = 1 / (2 * SQRT2)
    assert table.rows[0].target_upper == pytest.approx(target)
    assert abs(float(table.rows[-1].frequency) - target) < 1e-2
    res_small = abs(float(table.rows[0].frequency) - target)
    res_big = abs(float(table.rows[-1].frequency) - target)
    assert res_big <= res_small  # residual shrinks from T to 16T


def test_density_scales_with_window():
    t1 = euclid.regular_density_check(euclid.QuadraticScheme(d=2, window=(0, 1)), [4000.0])
    t2 = euclid.regular_density_check(euclid.QuadraticScheme(d=2, window=(0, 2)), [4000.0])
    f1 = float(t1.rows[0].frequency)
    f2 = float(t2.rows[0].frequency)
    assert abs(f2 - 2 * f1) < 2e-2


def test_entropy_zero_behaviour():
    scheme = euclid.QuadraticScheme(d=2, window=(0, 1))
    report = euclid.regular_entropy_check(scheme, [25, 50, 100, 200])
    counts = {r.L: r.count for r in report.rows}
    # linear growth: far below the exponential 2^L of the k-free case
    assert all(counts[L] <= L for L in counts)
    last = report.rows[-1]
    assert last.L == 200 and last.per_site_log2 < 0.05
    assert last.lower_bits == last.upper_bits == 0.0


def test_entropy_one_gap_type():
    # window so small that segments carry a single gap type dominating
    scheme = euclid.QuadraticScheme(d=2, window=((0, 0, 1), (1, 0, 10)))
    report = euclid.regular_entropy_check(scheme, [50], T=4000.0)
    assert report.rows[0].count <= 6


def test_entropy_empty_segment_convention():
    scheme = euclid.QuadraticScheme(d=2, window=((0, 0, 1), (1, 0, 10**6)))
    report = euclid.regular_entropy_check(scheme, [10], T=20.0)
    row = report.rows[0]
    assert row.count == 0 and row.per_site_log2 == 0.0


def test_generate_invalid_T():
    with pytest.raises(InvalidArgumentError):
        euclid.generate(euclid.QuadraticScheme(), 0.0)


def test_points_csv():
    import io

    seg = euclid.generate(euclid.QuadraticScheme(d=2, window=(0, 1)), 30.0)
    buf = io.StringIO()
    seg.write_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "# schema: kfree.euclid-points.v1"
    assert lines[1] == "a,b,value"
    assert len(lines) == 2 + len(seg.pairs)
