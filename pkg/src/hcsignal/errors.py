"""Exception hierarchy.

Input problems derive from ``ValueError`` so callers can catch them generically;
``ConsistencyError`` marks an internal invariant that failed at runtime.
"""


class HcSignalError(Exception):
    pass


class InputError(HcSignalError, ValueError):
    pass


class ConsistencyError(HcSignalError, RuntimeError):
    pass


# quantum_core
class NonNormalizedState(InputError):
    pass


class NonUnitBloch(InputError):
    pass


class DuplicateParty(InputError):
    pass


# correlation_algebra
class ComponentOutOfRange(InputError):
    pass


class NotNormalized(InputError):
    pass


class EmptySubset(InputError):
    pass


# feasibility
class TooManyFreeComponents(InputError):
    pass


class FixedValueOutOfRange(InputError):
    pass


class ComponentNotFree(InputError):
    pass


class ZeroQMValue(InputError):
    pass


class NonMonotonePredicate(ConsistencyError):
    pass


# causal_timing
class SuperluminalFrame(InputError):
    pass


# witness_engine
class AfterAfterPresent(InputError):
    pass


class UnsupportedTimingPattern(InputError):
    pass


class EmptyIntervalEncountered(HcSignalError):
    """A setting pair admits no valid distribution at all (a stronger witness)."""

    def __init__(self, pair, message=None):
        self.pair = pair
        super().__init__(message or f"setting pair {pair} has an empty feasible region")
