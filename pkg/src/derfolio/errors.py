"""Exception hierarchy shared across the package.

Callers mostly care about two families: :class:`DataError` (bad input
files, malformed series, invalid portfolios; the CLI maps these to exit
code 2) and :class:`OptimizerError` (degenerate or infeasible
optimization problems; exit code 3).
"""


class DerfolioError(Exception):
    """Base class for all errors raised by this package."""


class DataError(DerfolioError):
    """Invalid input data, file, or portfolio; CLI exit code 2."""


class OptimizerError(DerfolioError):
    """Optimization cannot proceed or is ill-posed; CLI exit code 3."""


# --- series and file errors -------------------------------------------------

class InvalidPeriod(DataError):
    """Period label is neither an ISO date nor a YYYY-MM string."""


class DuplicatePeriod(DataError):
    pass


class OutOfOrderPeriods(DataError):
    pass


class MixedGranularity(DataError):
    """Daily and monthly period labels mixed within one series or file."""


class TooShort(DataError):
    """Fewer than two raw observations; no return can be formed."""


class TooFewRows(DataError):
    pass


class NegativeValue(DataError):
    """Raw resource observations must be non-negative."""


class NonNumericCell(DataError):
    pass


class MalformedHeader(DataError):
    pass


class MalformedRow(DataError):
    pass


class EncodingError(DataError):
    pass


class UnknownColumn(DataError):
    pass


class NoOverlap(DataError):
    """Period intersection across series has fewer than two entries."""


class InsufficientData(DataError):
    pass


class ZeroBaseline(DataError):
    """A zero observation makes the relative return undefined."""


class AssetCountExceeded(DataError):
    """More assets than the supported per-scenario bound."""


class DuplicateAsset(DataError):
    pass


class WriteFailure(DataError):
    pass


# --- portfolio validation ----------------------------------------------------

class WeightSumViolation(DataError):
    """Portfolio weights do not sum to one within tolerance."""


class NegativeWeight(DataError):
    """Long-only portfolios admit no negative weights."""


class StaleDerivedValues(DataError):
    """Stored expected return or risk disagrees with recomputation."""


# --- optimizer ----------------------------------------------------------------

class DimensionMismatch(DerfolioError):
    """Weight vector or asset list length disagrees with the statistics."""


class SingularAfterRidge(OptimizerError):
    """KKT system stayed singular even after the ridge fallback."""


class NoExcessReturn(OptimizerError):
    """No asset return exceeds the risk-free rate; max-Sharpe is ill-posed."""


class ZeroRisk(OptimizerError):
    """A zero-risk quantity where a positive risk is required."""


class TooManyAssets(OptimizerError):
    """Grid oracle is restricted to small asset counts."""
