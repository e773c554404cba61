"""Exception types shared across the package."""


class TrireduceError(Exception):
    """Base class for all package-specific errors."""


class DegenerateShape(TrireduceError):
    """Shape is degenerate (|s1| = 0 or r2 = 0): the body frame or the
    angle phi is undefined."""


class CollinearShape(TrireduceError):
    """The configuration is (numerically) collinear; the generic body-frame
    fit cannot pick the in-plane axis.  Callers should switch to the
    angular-momentum-aligned frame."""


class SingularInertia(TrireduceError):
    """The inertia tensor is singular (|sin phi| at or below threshold);
    the full inverse does not exist."""


class CollinearInput(TrireduceError):
    """A noncollinear-only routine was called at a collinear shape."""


class MisalignedFrame(TrireduceError):
    """Collinear evaluation requires the frame aligned with the angular
    momentum (J1 = J2 = 0 within tolerance)."""


class ZeroAngularMomentum(TrireduceError):
    """At a collinear configuration with L = 0 the body frame is not fixed
    by the angular momentum."""


class NotCollinear(TrireduceError):
    """The angular-momentum-aligned frame only applies to collinear states."""


class NumericalBlowup(TrireduceError):
    """Integration produced coordinates beyond the overflow guard."""


class PotentialSyntaxError(TrireduceError):
    """Malformed potential expression."""

    def __init__(self, position, expected, message=None):
        self.position = position
        self.expected = expected
        super().__init__(
            message or f"syntax error at offset {position}: expected {expected}"
        )


class UnknownIdentifier(TrireduceError):
    """Identifier in a potential expression is not a known variable,
    constant or function."""

    def __init__(self, name, position):
        self.name = name
        self.position = position
        super().__init__(f"unknown identifier '{name}' at offset {position}")


class DomainError(TrireduceError):
    """Potential evaluation left the domain of an operation (division by
    zero, log/sqrt of a negative number, ...)."""

    def __init__(self, node, value):
        self.node = node
        self.value = value
        super().__init__(f"domain error in '{node}' at value {value!r}")


class ConfigError(TrireduceError):
    """Invalid run configuration.  ``field`` is the offending field path."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"config field '{field}': {message}")
