"""Exception hierarchy shared across the engine.

Everything raised on bad input data derives from SkopeError so the CLI can
map it to a single exit code.
"""


class SkopeError(Exception):
    """Base class for all engine errors."""


class PhonologyError(SkopeError):
    """Bad phoneme inventory data, unknown symbol, or unsyllabifiable input."""


class DecodeError(SkopeError):
    """Malformed spotting-frame input."""


class LatticeError(SkopeError):
    """Invalid phoneme lattice or confusion matrix."""


class DictionaryError(SkopeError):
    """Invalid morpheme dictionary or connectivity matrix data."""


class LexiconError(SkopeError):
    """Invalid syntactic lexicon, category expression, or missing entry."""


class ConfigError(SkopeError):
    """Invalid parameter file or configuration value."""
