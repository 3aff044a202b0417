"""
Exceptions raised by :py:mod:`qfpi`.

Solver non-convergence is not an exception: it is reported through the
``converged`` flag of :py:class:`qfpi.solver.SteadyStateSolution`.
"""

class QFPIError(Exception):
    """
    Base class of all :py:mod:`qfpi` errors
    """

class InvalidParameterError(QFPIError, ValueError):
    """
    A physical or numerical parameter is outside its domain
    """

class SingularCavityError(QFPIError, ZeroDivisionError):
    """
    The Fabry-Perot denominator vanishes (perfect mirrors or a resonant
    round-trip with unit reflectances)
    """

class DesignSearchError(QFPIError, RuntimeError):
    """
    No converged point was found during a design search
    """
