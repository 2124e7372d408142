"""Generalized Thue-Morse words: construction, critical exponents and the
positions of critical powers."""

from .occurrences import (
    InadmissibleParameters,
    OccurrenceSet,
    bezout_set,
    critical_length_exists,
    critical_occurrences,
    digit_sum_identity_check,
    is_synchronized,
    scan_power_occurrences,
    set_A,
    set_B,
    set_C,
    suggested_horizon,
)
from .repetition import (
    INFINITE,
    CriticalExponentReport,
    FactorNotFound,
    IndexResult,
    critical_exponent_closed_form,
    find_overlap,
    find_squares,
    format_exponent,
    index_of_factor,
    max_exponent_in_prefix,
    max_exponent_naive,
    rational_power,
)
from .words import (
    CyclicPermutation,
    LazyWord,
    TMParams,
    block,
    digit_sum,
    is_periodic,
    is_sigma_cyclic,
    letter_at,
    prefix_by_morphism,
    rename,
)

__version__ = "0.1.0"
