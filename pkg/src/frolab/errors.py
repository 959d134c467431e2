"""Exception hierarchy. Every error carries a stable ``code`` string."""

from __future__ import annotations


class FrolabError(Exception):
    code = "ERROR"

    def __init__(self, message: str, **context):
        super().__init__(message)
        self.context = context

    def __str__(self) -> str:
        return f"{self.code}: {self.args[0]}"


class ShapeMismatch(FrolabError):
    code = "SHAPE_MISMATCH"


class RelationViolation(FrolabError):
    code = "RELATION_VIOLATION"


class ParseError(FrolabError):
    code = "PARSE_ERROR"


class ValidationError(FrolabError):
    code = "VALIDATION_ERROR"


class JacobiViolation(FrolabError):
    code = "JACOBI_VIOLATION"


class NonIntegrable(FrolabError):
    code = "NON_INTEGRABLE"


class NotPositiveDefinite(FrolabError):
    code = "NOT_POSITIVE_DEFINITE"


class TolAmbiguous(FrolabError):
    code = "TOL_AMBIGUOUS"


class LambdaNearEigenvalue(FrolabError):
    code = "LAMBDA_NEAR_EIGENVALUE"


class HZero(FrolabError):
    code = "H_ZERO"


class SectorInvalid(FrolabError):
    code = "SECTOR_INVALID"


class MissingTrivial(FrolabError):
    code = "MISSING_TRIVIAL"


class ModeError(FrolabError):
    code = "MODE_MISMATCH"


class ConfigError(FrolabError):
    code = "CONFIG_ERROR"
