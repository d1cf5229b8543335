"""Exception hierarchy.  Every error carries enough context to be reported per record."""


class AngleRankError(Exception):
    """Base class for all errors raised by this package."""


class WeilPolynomialError(AngleRankError, ValueError):
    """Input is not a Weil q-polynomial."""


class NotMonic(WeilPolynomialError):
    pass


class OddDegree(WeilPolynomialError):
    pass


class NotPrimePower(WeilPolynomialError):
    pass


class FunctionalEquationViolation(WeilPolynomialError):
    def __init__(self, index: int, message: str | None = None):
        self.index = index
        super().__init__(message or f"functional equation fails at index {index}")


class RootModulusViolation(WeilPolynomialError):
    """Some root provably lies off the circle |z| = sqrt(q)."""


class PrecisionExhausted(AngleRankError, ArithmeticError):
    def __init__(self, message: str, bits: int | None = None):
        self.bits = bits
        super().__init__(message)


class UnstableDetection(AngleRankError):
    """Relation lattices disagree across precisions up to the cap."""


class MalformedRow(AngleRankError, ValueError):
    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")
