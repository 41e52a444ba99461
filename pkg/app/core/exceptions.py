import click


class DeformationError(Exception):
    """Base exception for the deformation toolkit"""

    pass


class ParseError(DeformationError, ValueError):
    """Text could not be read as a rational function or params document"""

    pass


class NegativeValuationError(DeformationError):
    """Value lies outside k[[t]] (negative t-adic valuation)"""

    pass


class DivisionByZeroError(DeformationError, ZeroDivisionError):
    """Inverse of zero requested"""

    pass


class ContextMismatchError(DeformationError):
    """Operands belong to different quotient rings or twists"""

    pass


class NonMonicModulusError(DeformationError):
    """Reduction modulus is not monic of degree 4"""

    pass


class DegenerateParametersError(DeformationError):
    """Parameters make a construction divide by zero (a = 0 or c = d)"""

    pass


class PreconditionError(DeformationError):
    """Operation called outside its precondition"""

    pass


class InvalidParameterError(DeformationError):
    """A deformation parameter violates its hypothesis (e.g. z a unit)"""

    pass


class FlatnessViolationError(DeformationError):
    """A structure constant has negative t-adic valuation"""

    pass


class CentralityError(DeformationError):
    """An element expected to be central is not"""

    pass


class DependenceError(DeformationError):
    """Matrix images that should be independent are dependent"""

    pass


class AssemblyError(DeformationError):
    """A report needed to assemble a result is missing or failed"""

    pass


# Command-line exception helpers
def bad_input_exception(detail: str = "Invalid input") -> click.ClickException:
    exc = click.ClickException(detail)
    exc.exit_code = 2
    return exc


def check_failure_exception(detail: str = "Verification failed") -> click.ClickException:
    exc = click.ClickException(detail)
    exc.exit_code = 1
    return exc
