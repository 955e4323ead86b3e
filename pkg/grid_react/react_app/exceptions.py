"""
Error hierarchy for the toolkit.

Every error carries a human readable `detail` and the process `exit_code` the
management commands report: 1 for bad input, 2 for numerical failures, 3 for
failed verification suites.
"""

EXIT_INPUT = 1
EXIT_NUMERICAL = 2
EXIT_VERIFICATION = 3


class GridReactError(Exception):
    """
    Base class for toolkit errors.
    Subclasses should provide `.default_detail` and `.exit_code` properties.
    """
    default_detail = 'A toolkit error occurred.'
    exit_code = EXIT_NUMERICAL

    def __init__(self, detail=None):
        self.detail = detail if detail is not None else self.default_detail
        super().__init__(self.detail)

    def __str__(self):
        return str(self.detail)


# Input errors

class InputError(GridReactError):
    default_detail = 'Invalid input.'
    exit_code = EXIT_INPUT


class InvalidGrid(InputError):
    default_detail = 'Grid violates its structural invariants.'


class InvalidScenario(InputError):
    default_detail = 'Attack scenario is inconsistent with the grid.'


class InputFileError(InputError):
    default_detail = 'Could not read input file.'

    def __init__(self, detail=None, path=None, line=None, column=None):
        self.path = path
        self.line = line
        self.column = column
        location = ''
        if path is not None:
            location = str(path)
            if line is not None:
                location += ':%d' % line
                if column is not None:
                    location += ':%d' % column
            location += ': '
        super().__init__(location + str(detail if detail is not None else self.default_detail))


class MalformedInstance(InputError):
    default_detail = '3-partition instance does not satisfy its preconditions.'


class OutOfRange(InputError):
    default_detail = 'Argument outside its admissible range.'


class EmptyArea(InputError):
    default_detail = 'Area has neither nodes nor edges.'


class DisconnectsGrid(InputError):
    default_detail = 'Removing the failed lines disconnects the grid.'


# Numerical errors

class NumericalError(GridReactError):
    default_detail = 'Numerical failure.'
    exit_code = EXIT_NUMERICAL


class Disconnected(NumericalError):
    default_detail = 'Grid is not connected.'


class SingularSystem(NumericalError):
    default_detail = 'Injections are not balanced; the power flow system is singular.'


class InfeasibleArea(NumericalError):
    default_detail = 'The containment equation has no solution for this area.'

    def __init__(self, detail=None, residual=None):
        self.residual = residual
        super().__init__(detail)


class MaxIterations(NumericalError):
    default_detail = 'Simplex pivot limit exceeded.'


class LpFailure(NumericalError):
    default_detail = 'Failure-detection LP could not be solved.'

    def __init__(self, detail=None, status=None, partial=None):
        self.status = status
        self.partial = partial
        super().__init__(detail)


# Verification

class VerificationFailed(GridReactError):
    default_detail = 'Verification suite reported violations.'
    exit_code = EXIT_VERIFICATION
