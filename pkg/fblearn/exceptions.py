
class FblearnError(Exception):
    """Exception for all fblearn logic.

    The optional second argument overrides :attr:`code`, which the command
    line uses as its exit status.

    """

    _default_code = 1

    @property
    def code(self):
        try:
            return self.args[1]
        except IndexError:
            return self._default_code


class ChannelError(FblearnError):
    """A channel or distribution breaks its invariants."""
    pass


class RowNotStochastic(ChannelError):
    pass


class NegativeEntry(ChannelError):
    pass


class DimensionMismatch(ChannelError):
    pass


class SupportViolation(ChannelError):
    """An auxiliary distribution is zero where the channel puts mass."""
    pass


class ParameterError(FblearnError, ValueError):
    """A numeric parameter is outside of its documented domain."""
    pass


class InvalidDelta(ParameterError):
    pass


class InvalidAlpha(ParameterError):
    pass


class InvalidEpsilon(ParameterError):
    pass


class InvalidN0(ParameterError):
    pass


class DomainError(ParameterError):
    pass


class ZeroVariance(ParameterError):
    pass


class ComputationError(FblearnError):
    """A computation could not be carried out within its budget."""
    pass


class AtomBudgetExceeded(ComputationError):
    pass


class NotConverged(ComputationError):
    pass


class InfeasibleLp(ComputationError):
    pass


class UnboundedLp(ComputationError):
    pass


class CodebookTooLarge(ComputationError):
    pass


class LengthMismatch(ComputationError):
    pass


class ParseError(FblearnError):
    """Input text does not conform to its format.

    :param str message: What went wrong.
    :param int line: 1-based line number, if known.
    :param int column: 1-based column number, if known.

    """

    _default_code = 3

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = '%s (line %d%s)' % (
                message, line, ', column %d' % column if column else '')
        super(ParseError, self).__init__(message)
        self.line = line
        self.column = column


class IndexOutOfRange(ParseError):
    pass


class InternalError(FblearnError):
    """It is actually an error on our part."""

    _default_code = 70


class UnreachableOutputWithMass(InternalError):
    pass
