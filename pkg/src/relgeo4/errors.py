"""Exception hierarchy shared by every relgeo4 module."""


class RelGeoError(Exception):
    """Base class for all errors raised by relgeo4.

    Errors raised while processing a batch of grid points carry the offending
    parameter point in ``point`` (``None`` otherwise).
    """

    point = None


# expression language / jets

class ExpressionSyntaxError(RelGeoError, SyntaxError):
    def __init__(self, message, line=1, column=1):
        self.line = line
        self.column = column
        super().__init__(f"{message} (line {line}, column {column})")


class UnknownIdentifier(RelGeoError):
    def __init__(self, name, line=1, column=1):
        self.name = name
        self.line = line
        self.column = column
        super().__init__(f"unknown identifier {name!r} (line {line}, column {column})")


class DomainError(RelGeoError, ValueError):
    pass


class OrderExceeded(RelGeoError):
    pass


# relative frame

class DegenerateImmersion(RelGeoError):
    pass


class SingularMetric(RelGeoError):
    pass


class VanishingGaussCurvature(RelGeoError):
    pass


class ZeroSupport(RelGeoError):
    pass


class SingularThirdForm(RelGeoError):
    pass


class SingularRelativeMetric(RelGeoError):
    pass


# parallel family

class OffsetSingular(RelGeoError):
    def __init__(self, message, point=None):
        self.point = point
        super().__init__(message)


class StarPrincipalUndefined(RelGeoError):
    pass


class ZeroRelativeCurvature(RelGeoError):
    pass


# bonnet

class PreconditionViolated(RelGeoError):
    pass


class DegenerateW(RelGeoError):
    pass


class ZeroRoot(RelGeoError):
    pass


class NoRealRoot(RelGeoError):
    pass


class NothingApplicable(RelGeoError):
    pass


# spec files

class FormatError(RelGeoError):
    def __init__(self, message, key=None, line=None):
        self.key = key
        self.line = line
        where = []
        if key is not None:
            where.append(f"key {key!r}")
        if line is not None:
            where.append(f"line {line}")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(message + suffix)


class ValidationError(RelGeoError):
    """A surface spec failed a geometric check on its sampling grid.

    ``check`` names the failing check (the class name of the underlying
    error, e.g. ``"ZeroSupport"``), ``point`` the offending parameter point.
    """

    def __init__(self, check, point, cause):
        self.check = check
        self.point = point
        self.cause = cause
        loc = "" if point is None else f" at u={tuple(round(float(p), 6) for p in point)}"
        super().__init__(f"{check}{loc}: {cause}")
