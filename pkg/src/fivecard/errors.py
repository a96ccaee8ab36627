class FiveCardError(ValueError):
    """Raised when an input lies outside the domain of a model operation."""


class ArrangementError(FiveCardError):
    pass


class ParameterError(FiveCardError):
    pass
