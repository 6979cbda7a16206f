"""Exception hierarchy. Claim failures are never exceptions; these are."""


class IcfamError(Exception):
    """Base class for all errors raised by the package."""


class InputError(IcfamError):
    """Malformed or out-of-range input (bad syntax, element range, duplicates)."""


class NotClosedError(InputError):
    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class PreconditionError(IcfamError):
    """A family does not meet the ordering/distinctness assumptions a checker needs."""


class LimitExceeded(IcfamError):
    """An internal limit was hit: ground-set size, enumeration range, budget."""


class BudgetExceeded(LimitExceeded):
    def __init__(self, message, cylinder=None):
        super().__init__(message)
        self.cylinder = cylinder
