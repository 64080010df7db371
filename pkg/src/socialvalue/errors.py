"""Exception types raised by the library.

Every class carries a short machine-readable ``code`` used by the CLI.
"""


class SocialValueError(Exception):
    code = "Error"


class IndeterminatePosterior(SocialValueError, ArithmeticError):
    """Public and private beliefs are conclusive in opposite directions."""

    code = "IndeterminatePosterior"


class ResourceLimit(SocialValueError):
    code = "ResourceLimit"

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class PreconditionViolated(SocialValueError, ValueError):
    code = "PreconditionViolated"


class HypothesisViolated(PreconditionViolated):
    """The hypothesis of a closed-form oracle or construction does not hold."""

    code = "HypothesisViolated"


class ParameterViolation(SocialValueError, ValueError):
    code = "ParameterViolation"


class ProfileIncomplete(SocialValueError, KeyError):
    code = "ProfileIncomplete"

    def __str__(self):
        return Exception.__str__(self)


class ShapeMismatch(SocialValueError, ValueError):
    code = "ShapeMismatch"


class InternalDisagreement(SocialValueError, AssertionError):
    """Two independent deciders returned different answers."""

    code = "InternalDisagreement"


class ParseError(SocialValueError, ValueError):
    code = "ParseError"
