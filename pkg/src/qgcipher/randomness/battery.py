"""Multi-run battery: encrypt an input under fresh keys, test, average."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Callable, Mapping

from ..errors import SequenceTooShortError
from . import stats
from .bits import BitSequence

log = logging.getLogger(__name__)

TEST_NAMES = (
    "approximate_entropy",
    "block_frequency",
    "cusum_forward",
    "cusum_reverse",
    "fft",
    "frequency",
    "longest_run",
    "rank",
    "runs",
    "serial_1",
    "serial_2",
)

SIGNIFICANCE = 0.01


@dataclass(frozen=True)
class TestParams:
    __test__ = False

    block_frequency_m: int = 128
    approximate_entropy_m: int = 10
    serial_m: int = 16
    # accepted for configuration compatibility; the tests using them are not run
    linear_complexity_m: int = 500
    overlapping_template_m: int = 9
    non_overlapping_template_m: int = 9

    @classmethod
    def from_mapping(cls, values: Mapping[str, object]) -> "TestParams":
        known = {f.name for f in fields(cls)}
        unknown = set(values) - known
        if unknown:
            raise ValueError(f"unknown test parameters: {', '.join(sorted(unknown))}")
        return cls(**{k: int(v) for k, v in values.items()})


@dataclass
class PValueReport:
    label: str
    run: int
    pvalues: dict[str, float]
    skipped: dict[str, str] = field(default_factory=dict)

    @property
    def flagged(self) -> list[str]:
        """Tests whose P-value is exactly 0 or 1; both count as failures."""
        return [name for name, p in self.pvalues.items() if p in (0.0, 1.0)]


@dataclass
class BatterySummary:
    label: str
    runs: int
    means: dict[str, float]
    pass_counts: dict[str, int]
    reports: list[PValueReport] = field(default_factory=list, repr=False)


def run_tests(seq, params: TestParams = TestParams(), label: str = "", run: int = 0) -> PValueReport:
    """Run every implemented test once. Tests the sequence is too short for are skipped."""
    bits = seq if isinstance(seq, BitSequence) else BitSequence.from_bytes(seq)
    jobs: dict[str, Callable[[], object]] = {
        "approximate_entropy": lambda: stats.test_approximate_entropy(bits, params.approximate_entropy_m),
        "block_frequency": lambda: stats.test_block_frequency(bits, params.block_frequency_m),
        "cusum_forward": lambda: stats.test_cumulative_sums(bits, "forward"),
        "cusum_reverse": lambda: stats.test_cumulative_sums(bits, "reverse"),
        "fft": lambda: stats.test_fft(bits),
        "frequency": lambda: stats.test_frequency(bits),
        "longest_run": lambda: stats.test_longest_run(bits),
        "rank": lambda: stats.test_rank(bits),
        "runs": lambda: stats.test_runs(bits),
        "serial": lambda: stats.test_serial(bits, params.serial_m),
    }
    pvalues: dict[str, float] = {}
    skipped: dict[str, str] = {}
    for name, job in jobs.items():
        try:
            result = job()
        except SequenceTooShortError as exc:
            if name == "serial":
                skipped["serial_1"] = skipped["serial_2"] = str(exc)
            else:
                skipped[name] = str(exc)
            continue
        if name == "serial":
            pvalues["serial_1"], pvalues["serial_2"] = result
        else:
            pvalues[name] = result
    report = PValueReport(label, run, dict(sorted(pvalues.items())), skipped)
    for name in report.flagged:
        log.warning("%s run %d: %s returned P=%g", label, run, name, pvalues[name])
    return report


def summarize(reports: list[PValueReport], label: str = "") -> BatterySummary:
    if not reports:
        raise ValueError("need at least one report")
    names = sorted({n for r in reports for n in r.pvalues})
    means, passes = {}, {}
    for name in names:
        values = [r.pvalues[name] for r in reports if name in r.pvalues]
        means[name] = sum(values) / len(values)
        # P == 1 is as much a failure as P < alpha
        passes[name] = sum(SIGNIFICANCE <= p < 1.0 for p in values)
    return BatterySummary(label, len(reports), means, passes, list(reports))


def run_battery(
    stream: bytes,
    *,
    encrypt: Callable[[object, bytes], bytes] | None,
    keygen: Callable[[], object] | None = None,
    runs: int = 20,
    params: TestParams = TestParams(),
    label: str = "",
) -> BatterySummary:
    """Encrypt ``stream`` ``runs`` times, each under ``keygen()``, and test every ciphertext.

    With ``encrypt=None`` the stream itself is tested once (control run).
    """
    if runs < 1:
        raise ValueError("runs must be at least 1")
    if encrypt is None:
        return summarize([run_tests(stream, params, label, 0)], label)
    if keygen is None:
        raise ValueError("keygen is required when encrypting")
    reports = []
    for run in range(runs):
        ciphertext = encrypt(keygen(), stream)
        reports.append(run_tests(ciphertext, params, label, run))
    return summarize(reports, label)


# -- report output ---------------------------------------------------------

def format_summary(summary: BatterySummary) -> str:
    lines = [
        f"# {summary.label}  runs={summary.runs}  alpha={SIGNIFICANCE}",
        f"{'test':<22}{'mean P':>10}{'passed':>10}",
    ]
    for name, mean in summary.means.items():
        lines.append(f"{name:<22}{mean:>10.5f}{summary.pass_counts[name]:>5d}/{summary.runs}")
    return "\n".join(lines) + "\n"


def format_records(reports: list[PValueReport]) -> str:
    lines = ["test,run,p_value"]
    for r in reports:
        lines.extend(f"{name},{r.run},{p:.10g}" for name, p in r.pvalues.items())
    return "\n".join(lines) + "\n"


def read_records(path: str | Path) -> list[tuple[str, int, float]]:
    out = []
    for line in Path(path).read_text().splitlines()[1:]:
        name, run, p = line.split(",")
        out.append((name, int(run), float(p)))
    return out


DEFAULT_BITS = 1_000_000
PRESETS = ("zeros", "ones", "file")


def preset_stream(preset: str, n_bits: int = DEFAULT_BITS, path: str | Path | None = None) -> bytes:
    """Plaintext for a battery run: all-0x00, all-0xFF, or a file's contents.

    ``n_bits`` is rounded up to whole bytes for the constant presets; files
    are read whole.
    """
    n_bytes = -(-n_bits // 8)
    if preset == "zeros":
        return bytes(n_bytes)
    if preset == "ones":
        return b"\xff" * n_bytes
    if preset == "file":
        if path is None:
            raise ValueError("the file preset needs a path")
        return Path(path).read_bytes()
    raise ValueError(f"unknown input preset {preset!r}; choose from {', '.join(PRESETS)}")
