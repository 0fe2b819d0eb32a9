"""Exception hierarchy shared by every module."""


class AlpError(Exception):
    """Base class for domain errors (the CLI maps these to exit status 1)."""


class GrammarError(AlpError):
    pass


class TreebankError(GrammarError):
    pass


class ParseError(AlpError):
    pass


class OracleBoundError(ParseError):
    pass


class HeadRuleError(AlpError):
    pass


class LexiconError(AlpError):
    pass


class AugmentError(AlpError):
    pass


class BudgetError(AugmentError):
    """Raised when the dedup retry bound runs out before the budget is met."""

    def __init__(self, message, achieved, budget):
        super().__init__(message)
        self.achieved = achieved
        self.budget = budget


class DatasetError(AlpError):
    pass


class SplitError(AlpError):
    pass
