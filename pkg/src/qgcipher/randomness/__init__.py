"""SP 800-22 subset and the multi-run battery built on it."""

from .battery import (
    TEST_NAMES,
    BatterySummary,
    PValueReport,
    TestParams,
    format_records,
    format_summary,
    preset_stream,
    run_battery,
    run_tests,
    summarize,
)
from .bits import BitSequence
from .stats import (
    test_approximate_entropy,
    test_block_frequency,
    test_cumulative_sums,
    test_fft,
    test_frequency,
    test_longest_run,
    test_rank,
    test_runs,
    test_serial,
)
