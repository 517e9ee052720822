"""Exception hierarchy shared by all wirekit modules.

Every error raised by the library is a subclass of :class:`WirekitError`, so
CLI code (and library users) can catch one base class and still report the
precise failure kind by class name.
"""


class WirekitError(Exception):
    """Base class for all wirekit errors."""


class DomainMismatch(WirekitError):
    """Composite of functions whose domain/codomain sizes do not line up."""


class CodomainMismatch(WirekitError):
    """Pullback legs must share a codomain."""


class BoundaryMismatch(WirekitError):
    """(Co)span composition where the shared boundary objects differ."""


class TypeClash(WirekitError):
    """Port or junction types fail to agree where composition requires it."""


class ArityMismatch(WirekitError):
    """A map's components do not fit the arities of its endpoints."""


class IndexOutOfRange(WirekitError):
    """A multiset mentions a species index outside its net."""


class InvalidLeg(WirekitError):
    """A span leg handed to a pushout is not a valid homomorphism."""


class InterfaceMismatch(WirekitError):
    """A lens was applied to a system with a different interface."""


class EffectMismatch(WirekitError):
    """Machines with different effects cannot be combined."""


class DanglingPort(WirekitError):
    """A wiring diagram leaves a required port without a source."""


class MultipleFeeds(WirekitError):
    """A wiring diagram feeds one sink from more than one source."""


class CyclicThroughOuterInput(WirekitError):
    """An outer output would need an outer input value at readout time."""


class UnknownJunction(WirekitError):
    """A diagram references a junction that was never declared."""


class KindMismatch(WirekitError):
    """A diagram kind was applied to systems of the wrong kind."""


class HorizonTooLarge(WirekitError):
    """Trace enumeration would exceed the configured bound."""


class UnboundVariable(WirekitError):
    """Expression evaluation hit a variable missing from the environment."""


class DivisionByZero(WirekitError):
    """Expression evaluation divided by zero."""


class NonFiniteValue(WirekitError):
    """Numeric simulation produced NaN or infinity."""


class ParseError(WirekitError):
    """Syntax error in a DSL or JSON input, with source position."""

    def __init__(self, message, line=None, column=None, filename=None):
        self.line = line
        self.column = column
        self.filename = filename
        where = ""
        if filename is not None:
            where += str(filename)
        if line is not None:
            where += f":{line}"
            if column is not None:
                where += f":{column}"
        super().__init__(f"{where}: {message}" if where else message)
