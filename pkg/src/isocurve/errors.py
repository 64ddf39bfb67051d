"""Exception hierarchy shared by every isocurve module."""


class IsocurveError(Exception):
    """Base class for all library errors."""


class ExpressionSyntaxError(IsocurveError, ValueError):
    def __init__(self, message, position, expected=None, text=None):
        self.position = position
        self.expected = expected
        self.text = text
        detail = f"{message} at offset {position}"
        if expected:
            detail += f" (expected {expected})"
        super().__init__(detail)


class UnknownIdentifier(IsocurveError, ValueError):
    def __init__(self, name, position=None):
        self.name = name
        self.position = position
        where = "" if position is None else f" at offset {position}"
        super().__init__(f"unknown identifier {name!r}{where}")


class DomainError(IsocurveError, ArithmeticError):
    """Function evaluated outside its domain, or a singular derivative."""


class DomainViolation(IsocurveError, ValueError):
    """A parameter or chart coordinate lies outside its declared domain."""


class NonImmersedPoint(IsocurveError, ArithmeticError):
    pass


class DegenerateMetric(IsocurveError, ArithmeticError):
    pass


class SingularSpeed(IsocurveError, ArithmeticError):
    pass


class VanishingCurvature(IsocurveError, ArithmeticError):
    pass


class NotANormalCurve(IsocurveError, ValueError):
    def __init__(self, s, delta):
        self.s = s
        self.delta = delta
        super().__init__(f"curve is not normal at s={s!r}: alpha.t = {delta!r}")


class SingularBasis(IsocurveError, ArithmeticError):
    pass


class HypothesisNotMet(IsocurveError):
    """A theorem/corollary precondition failed numerically; ``report`` holds diagnostics."""

    def __init__(self, message, report=None):
        self.report = report
        super().__init__(message)


class SceneError(IsocurveError, ValueError):
    def __init__(self, message, line=None, column=None, path=None):
        self.line = line
        self.column = column
        self.path = path
        loc = ""
        if line is not None:
            loc = f"{path or '<scene>'}:{line}"
            if column is not None:
                loc += f":{column}"
            loc += ": "
        super().__init__(loc + message)


class ParseError(SceneError):
    pass


class UnresolvedReference(SceneError):
    def __init__(self, name, line=None, path=None, column=None):
        self.name = name
        super().__init__(f"unresolved reference {name!r}", line, column, path)


class DuplicateName(SceneError):
    def __init__(self, name, line=None, path=None):
        self.name = name
        super().__init__(f"duplicate name {name!r}", line=line, path=path)


class NotUnitSpeed(IsocurveError, ValueError):
    pass
