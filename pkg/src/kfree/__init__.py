"""k-free lattice points as cut-and-project sets.

Exact window measures and thickened-boundary measures on the profinite
internal space, density scans along cube sequences, pattern censuses with
an exact small-shape admissibility oracle, CRT hole certificates, and a
regular Euclidean contrast scheme.
"""

from .adic import (
    COMPLEMENT_OF_ZERO,
    FULL,
    AdicWindow,
    MeasureResult,
    SchemeParams,
    StarImage,
    finite_boundary_check,
    haar_measure,
    in_window,
    star_map,
    van_hove_boundary_measure,
)
from .arith import PrimeTable, ZetaValue, gcd_vector, is_kfree_integer, primes_up_to, zeta
from .errors import InvalidArgumentError, ResourceLimitError, UnsupportedWindowError
from .euclid import ModelSetSegment, QuadraticScheme, generate, regular_density_check, regular_entropy_check
from .patterns import (
    EntropyReport,
    Pattern,
    PatternCensus,
    Shape,
    admissible_count,
    admissible_patterns,
    census,
    complement_census,
    entropy_table,
    merge_censuses,
    subset_closure_check,
)
from .sieve import (
    Box,
    FrequencyTable,
    HoleCertificate,
    crt_hole,
    density_scan,
    kfree_mask,
    kfree_points,
    scan_hole,
    truncated_mask,
    truncated_points,
)

__version__ = "0.1.0"
