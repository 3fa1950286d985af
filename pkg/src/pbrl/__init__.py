"""Design toolkit for rate-compatible protograph-based raptor-like QC-LDPC codes.

Construct protomatrices by maximizing permanent-based upper bounds on the
minimum distance, validate them with iterative-decoding thresholds, lift
them to quasi-cyclic parity-check matrices, and measure frame error rates
under belief-propagation decoding.
"""

from importlib import resources

from .protomatrix import Protomatrix, RatePoint, parse, prefix, rate, serialize

__version__ = "0.1.0"

FIXTURES = (
    "hrc",
    "hrc_punctured",
    "pbd_unpunctured",
    "threshold_unpunctured",
    "pbd_punctured",
    "threshold_punctured",
    "threshold_unconstrained",
    "punctured_small",
)


def fixture_path(name: str):
    """Filesystem path of a bundled protomatrix fixture."""
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; choose from {FIXTURES}")
    return resources.files("pbrl.fixtures").joinpath(f"{name}.txt")


def load_fixture(name: str) -> Protomatrix:
    """Load one of the bundled protomatrix fixtures by name."""
    return parse(fixture_path(name).read_text())


__all__ = [
    "Protomatrix",
    "RatePoint",
    "parse",
    "serialize",
    "prefix",
    "rate",
    "fixture_path",
    "load_fixture",
    "FIXTURES",
    "__version__",
]
