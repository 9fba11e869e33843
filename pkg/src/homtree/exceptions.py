class HomTreeError(Exception):
    pass


class PoleError(HomTreeError, ZeroDivisionError):
    """Spectral parameter sits on a pole of the c-function."""


class SingularSystem(HomTreeError, ArithmeticError):
    """Level system of the Poisson map is (numerically) singular."""

    def __init__(self, message, level=None):
        super().__init__(message)
        self.level = level


class NotEigenfunction(HomTreeError, ValueError):
    pass


class CalibrationError(HomTreeError, ArithmeticError):
    pass
