"""Exception hierarchy shared by every module.

Everything raised on bad input or an unsolvable problem derives from
:class:`MevError`; the CLI maps :class:`ConfigError` to exit code 2 and every
other :class:`MevError` to exit code 3.
"""


class MevError(Exception):
    pass


class DomainError(MevError, ValueError):
    """An argument lies outside the domain of the operation."""


class ConfigError(MevError, ValueError):
    """A scenario or CLI configuration is malformed."""


class NoBracket(MevError):
    pass


class NoConvergence(MevError):
    pass


class UnsupportedRegime(DomainError):
    pass


class OutOfRegime(DomainError):
    pass


class ProbabilityError(DomainError):
    pass


class NotRegular(DomainError):
    """Virtual value is not monotone (or the distribution has no density)."""


class NoRoot(DomainError):
    pass


class DegenerateRates(DomainError):
    pass


class TooManyProposers(DomainError):
    pass


class NotDiminishing(DomainError):
    pass


class InsufficientDeltas(DomainError):
    pass


class UnknownProposer(DomainError):
    pass


class MixedTimestampPresence(DomainError):
    pass


class DuplicateId(DomainError):
    pass


class InconsistentDuplicateTips(DomainError):
    pass


class InconsistentDuplicateDeps(DomainError):
    pass
