"""Exception hierarchy.

Input problems derive from :class:`InputError`; failures of the numerics on
otherwise valid input derive from :class:`NumericalError`. The CLI maps the
two families to exit codes 1 and 2.
"""


class LampTuneError(ValueError):
    """Base class for every error raised by the package."""


class InputError(LampTuneError):
    pass


class NumericalError(LampTuneError):
    pass


class ParseError(InputError):
    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class RaggedRow(InputError):
    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class MissingLabelColumn(InputError):
    pass


class InvalidK(InputError):
    pass


class ShapeMismatch(InputError):
    pass


class SingleClass(InputError):
    pass


class TooFewPoints(InputError):
    pass


class TooFewSamples(InputError):
    pass


class InvalidInterval(InputError):
    pass


class SingularSystem(NumericalError):
    pass


class DegenerateData(NumericalError):
    pass


class RankCollapse(NumericalError):
    pass


class DegenerateDenominator(NumericalError):
    pass
