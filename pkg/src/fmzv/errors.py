"""Exception types shared across the package."""


class FmzvError(Exception):
    """Base class for all package-specific errors."""


class ZeroInverse(FmzvError):
    """Attempted to invert a residue that is 0 modulo the modulus."""

    def __init__(self, value, modulus, position=None):
        self.value = value
        self.modulus = modulus
        self.position = position
        where = "" if position is None else f" at position {position}"
        super().__init__(f"{value} is not invertible mod {modulus}{where}")


class SharedFactor(FmzvError):
    """Base and modulus share a prime factor, so the quantity is undefined."""


class LevelSharesFactor(FmzvError):
    """The prime divides the level N; the colored sum is undefined there."""


class ArityMismatch(FmzvError):
    """Residue-class tuple length does not match the index depth."""


class LevelMismatch(FmzvError):
    """Operands of a symbolic operation live at different levels."""


class PoleAtVonStaudtClausen(FmzvError):
    """B_n mod p requested with p-1 | n, where B_n has p in its denominator."""


class ScanExhausted(FmzvError):
    """A least-element scan ran past its provable ceiling without a hit."""


class InvalidWeight(FmzvError):
    """Weight k in {1, 2, 4}, where the spanned space is {0}."""


class EmptyRange(FmzvError):
    """An operation that needs at least one prime got an empty range."""


class CapExceeded(FmzvError):
    """Requested prime exceeds the configured cap of an O(p^2) scan."""


class CheckpointMismatch(FmzvError):
    """Checkpoint file belongs to a different job fingerprint."""


class UsageError(FmzvError):
    """Invalid command-line parameters."""
